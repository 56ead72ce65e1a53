use crate::cnf::{canonical_form, Lit};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Propagation {
    Conflict,
    Stable,
}

/// Clause database with an assignment trail.
///
/// The bottom of the trail holds the top-level consequences of the
/// database's unit clauses. It is extended incrementally on additions and
/// rebuilt lazily after deletions. Assumptions go on top and are undone
/// with [`PropagationState::backtrack`].
///
/// Whenever a literal becomes false, the clauses containing it are
/// rescanned for being falsified or unit.
#[derive(Clone, Debug)]
pub struct PropagationState {
    clauses: Vec<Vec<Lit>>,
    live: Vec<bool>,
    occurrences: Vec<Vec<usize>>,
    values: Vec<Option<bool>>,
    trail: Vec<Lit>,
    base_len: usize,
    base_conflict: bool,
    dirty: bool,
}

impl PropagationState {
    pub fn new(num_vars: usize) -> PropagationState {
        PropagationState {
            clauses: Vec::new(),
            live: Vec::new(),
            occurrences: vec![Vec::new(); 2 * num_vars],
            values: vec![None; num_vars],
            trail: Vec::new(),
            base_len: 0,
            base_conflict: false,
            dirty: false,
        }
    }

    fn grow(&mut self, lit: Lit) {
        let n = lit.var().index() + 1;
        if n > self.values.len() {
            self.values.resize(n, None);
            self.occurrences.resize(2 * n, Vec::new());
        }
    }

    pub fn value(&self, lit: Lit) -> Option<bool> {
        self.values.get(lit.var().index()).copied().flatten().map(|b| b != lit.is_negative())
    }

    pub fn clause(&self, id: usize) -> &[Lit] {
        &self.clauses[id]
    }

    pub fn is_live(&self, id: usize) -> bool {
        self.live[id]
    }

    pub fn live_clauses(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.clauses.len()).filter(|&id| self.live[id])
    }

    /// Clause ids containing `lit`, including deleted ones.
    pub fn occurrences(&self, lit: Lit) -> &[usize] {
        self.occurrences.get(lit.code()).map_or(&[], |v| v)
    }

    /// Literals assigned since `mark`.
    pub fn trail_since(&self, mark: usize) -> &[Lit] {
        &self.trail[mark.min(self.trail.len())..]
    }

    pub fn top_level_conflict(&mut self) -> bool {
        self.ensure_base();
        self.base_conflict
    }

    /// Adds a clause (repeated literals dropped) and returns its id. Must be
    /// called without pending assumptions.
    pub fn add_clause(&mut self, lits: &[Lit]) -> usize {
        let mut c = Vec::with_capacity(lits.len());
        for &l in lits {
            self.grow(l);
            if !c.contains(&l) {
                c.push(l);
            }
        }
        let id = self.clauses.len();
        for l in canonical_form(&c) {
            self.occurrences[l.code()].push(id);
        }
        self.clauses.push(c);
        self.live.push(true);
        if !self.dirty && !self.base_conflict {
            debug_assert_eq!(self.trail.len(), self.base_len, "clauses are added at top level");
            let start = self.trail.len();
            match self.visit(id) {
                Visit::Conflict => self.base_conflict = true,
                Visit::Unit(l) => {
                    self.set(l);
                    if self.propagate_from(start) == Propagation::Conflict {
                        self.base_conflict = true;
                    }
                }
                Visit::Open => {}
            }
            self.base_len = self.trail.len();
        }
        id
    }

    pub fn remove_clause(&mut self, id: usize) {
        if self.live[id] {
            self.live[id] = false;
            self.dirty = true;
        }
    }

    /// Trail position to backtrack to; brings the top level up to date.
    pub fn mark(&mut self) -> usize {
        self.ensure_base();
        self.trail.len()
    }

    pub fn backtrack(&mut self, mark: usize) {
        while self.trail.len() > mark.max(self.base_len) {
            let l = self.trail.pop().expect("non-empty trail");
            self.values[l.var().index()] = None;
        }
    }

    /// Assigns `lits` and propagates to fixpoint.
    pub fn assume(&mut self, lits: &[Lit]) -> Propagation {
        self.ensure_base();
        if self.base_conflict {
            return Propagation::Conflict;
        }
        let start = self.trail.len();
        for &l in lits {
            self.grow(l);
            match self.value(l) {
                Some(true) => {}
                Some(false) => return Propagation::Conflict,
                None => self.set(l),
            }
        }
        self.propagate_from(start)
    }

    fn set(&mut self, l: Lit) {
        self.values[l.var().index()] = Some(l.is_positive());
        self.trail.push(l);
    }

    fn propagate_from(&mut self, mut head: usize) -> Propagation {
        while head < self.trail.len() {
            let falsified = !self.trail[head];
            head += 1;
            for k in 0..self.occurrences[falsified.code()].len() {
                let id = self.occurrences[falsified.code()][k];
                if !self.live[id] {
                    continue;
                }
                match self.visit(id) {
                    Visit::Conflict => return Propagation::Conflict,
                    Visit::Unit(l) => self.set(l),
                    Visit::Open => {}
                }
            }
        }
        Propagation::Stable
    }

    fn visit(&self, id: usize) -> Visit {
        let mut open = None;
        let mut count = 0;
        for &l in &self.clauses[id] {
            match self.value(l) {
                Some(true) => return Visit::Open,
                Some(false) => {}
                None => {
                    count += 1;
                    open = Some(l);
                }
            }
        }
        match (count, open) {
            (0, _) => Visit::Conflict,
            (1, Some(l)) => Visit::Unit(l),
            _ => Visit::Open,
        }
    }

    fn ensure_base(&mut self) {
        if !self.dirty {
            return;
        }
        self.dirty = false;
        for l in self.trail.drain(..) {
            self.values[l.var().index()] = None;
        }
        self.base_conflict = false;
        for id in 0..self.clauses.len() {
            if !self.live[id] {
                continue;
            }
            match self.visit(id) {
                Visit::Conflict => {
                    self.base_conflict = true;
                    break;
                }
                Visit::Unit(l) => self.set(l),
                Visit::Open => {}
            }
        }
        if !self.base_conflict && self.propagate_from(0) == Propagation::Conflict {
            self.base_conflict = true;
        }
        self.base_len = self.trail.len();
    }
}

enum Visit {
    Conflict,
    Unit(Lit),
    Open,
}
