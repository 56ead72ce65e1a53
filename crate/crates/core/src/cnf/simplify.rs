use std::collections::{HashMap, VecDeque};

use super::{canonical_form, Formula, Lit};

/// One simplification action. Clause indices refer to the input formula.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SimplifyEvent {
    /// Repeated literals were dropped from a clause (first occurrences kept).
    DedupLiterals {
        clause: usize,
        removed: usize,
    },
    Tautology {
        clause: usize,
    },
    /// `clause` has the same literal set as the earlier clause `of`.
    Duplicate {
        clause: usize,
        of: usize,
    },
    /// `clause` became the unit `lit`, which was then propagated.
    Unit {
        lit: Lit,
        clause: usize,
    },
    /// `clause` lost all its literals.
    Conflict {
        clause: usize,
    },
}

/// Ordered record of what [`simplify`] did.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SimplificationLog {
    pub events: Vec<SimplifyEvent>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SimplifyOutcome {
    Simplified(Formula),
    /// Propagation derived the empty clause.
    Unsat,
}

impl SimplifyOutcome {
    pub fn formula(&self) -> Option<&Formula> {
        match self {
            SimplifyOutcome::Simplified(f) => Some(f),
            SimplifyOutcome::Unsat => None,
        }
    }
}

impl SimplificationLog {
    pub fn is_unsat(&self) -> bool {
        matches!(self.events.last(), Some(SimplifyEvent::Conflict { .. }))
    }

    pub fn propagated_units(&self) -> Vec<Lit> {
        self.events
            .iter()
            .filter_map(|e| match e {
                SimplifyEvent::Unit { lit, .. } => Some(*lit),
                _ => None,
            })
            .collect()
    }

    pub fn removed_tautologies(&self) -> usize {
        self.events.iter().filter(|e| matches!(e, SimplifyEvent::Tautology { .. })).count()
    }

    pub fn removed_duplicates(&self) -> usize {
        self.events.iter().filter(|e| matches!(e, SimplifyEvent::Duplicate { .. })).count()
    }

    pub fn removed_literals(&self) -> usize {
        self.events
            .iter()
            .map(|e| match e {
                SimplifyEvent::DedupLiterals { removed, .. } => *removed,
                _ => 0,
            })
            .sum()
    }

    /// Applies the logged events to `original` without re-deriving them.
    pub fn replay(&self, original: &Formula) -> SimplifyOutcome {
        let mut work = Workspace::new(original);
        for e in &self.events {
            work.apply(e);
        }
        work.finish(original)
    }
}

/// Mutable view of a formula under simplification, addressed by original
/// clause index.
pub(crate) struct Workspace {
    pub(crate) clauses: Vec<Option<Vec<Lit>>>,
    occurrences: Vec<Vec<usize>>,
    pub(crate) units: Vec<Lit>,
    conflict: bool,
}

impl Workspace {
    pub(crate) fn new(f: &Formula) -> Workspace {
        let mut occurrences = vec![Vec::new(); 2 * f.num_vars()];
        for (i, c) in f.clauses().iter().enumerate() {
            for l in c.canonical() {
                occurrences[l.code()].push(i);
            }
        }
        Workspace {
            clauses: f.clauses().iter().map(|c| Some(c.lits().to_vec())).collect(),
            occurrences,
            units: Vec::new(),
            conflict: false,
        }
    }

    pub(crate) fn apply(&mut self, event: &SimplifyEvent) {
        match *event {
            SimplifyEvent::DedupLiterals { clause, .. } => {
                if let Some(c) = &mut self.clauses[clause] {
                    let mut seen = Vec::with_capacity(c.len());
                    c.retain(|l| {
                        if seen.contains(l) {
                            false
                        } else {
                            seen.push(*l);
                            true
                        }
                    });
                }
            }
            SimplifyEvent::Tautology { clause } | SimplifyEvent::Duplicate { clause, .. } => {
                self.clauses[clause] = None;
            }
            SimplifyEvent::Unit { lit, .. } => {
                self.units.push(lit);
                for &i in &self.occurrences[lit.code()] {
                    self.clauses[i] = None;
                }
                for &i in &self.occurrences[(!lit).code()] {
                    if let Some(c) = &mut self.clauses[i] {
                        c.retain(|&l| l != !lit);
                    }
                }
            }
            SimplifyEvent::Conflict { .. } => self.conflict = true,
        }
    }

    pub(crate) fn neg_occurrences(&self, lit: Lit) -> &[usize] {
        &self.occurrences[(!lit).code()]
    }

    fn finish(self, original: &Formula) -> SimplifyOutcome {
        if self.conflict {
            return SimplifyOutcome::Unsat;
        }
        let mut f = Formula::new(original.num_vars());
        for c in self.clauses.into_iter().flatten() {
            f.push_clause(c);
        }
        for u in self.units {
            f.push_unit(u);
        }
        SimplifyOutcome::Simplified(f)
    }
}

/// Removes repeated literals, tautologies and duplicate clauses, and
/// propagates units to fixpoint, repeating until nothing changes.
///
/// Surviving clauses keep their relative order and literal order; the
/// propagated literals end up in [`Formula::units`].
pub fn simplify(f: &Formula) -> (SimplifyOutcome, SimplificationLog) {
    let mut work = Workspace::new(f);
    let mut log = SimplificationLog::default();
    let emit = |work: &mut Workspace, log: &mut SimplificationLog, e: SimplifyEvent| {
        work.apply(&e);
        log.events.push(e);
    };

    loop {
        let before = log.events.len();

        for i in 0..work.clauses.len() {
            let Some(c) = &work.clauses[i] else { continue };
            if c.is_empty() {
                emit(&mut work, &mut log, SimplifyEvent::Conflict { clause: i });
                return (SimplifyOutcome::Unsat, log);
            }
            let distinct = canonical_form(c).len();
            if distinct < c.len() {
                let removed = c.len() - distinct;
                emit(&mut work, &mut log, SimplifyEvent::DedupLiterals { clause: i, removed });
            }
        }

        for i in 0..work.clauses.len() {
            let Some(c) = &work.clauses[i] else { continue };
            let canon = canonical_form(c);
            if canon.windows(2).any(|w| w[0].var() == w[1].var()) {
                emit(&mut work, &mut log, SimplifyEvent::Tautology { clause: i });
            }
        }

        let mut first_seen: HashMap<Vec<Lit>, usize> = HashMap::new();
        for i in 0..work.clauses.len() {
            let Some(c) = &work.clauses[i] else { continue };
            let canon = canonical_form(c);
            match first_seen.get(&canon) {
                Some(&of) => emit(&mut work, &mut log, SimplifyEvent::Duplicate { clause: i, of }),
                None => {
                    first_seen.insert(canon, i);
                }
            }
        }

        let mut queue: VecDeque<usize> =
            (0..work.clauses.len()).filter(|&i| matches!(&work.clauses[i], Some(c) if c.len() == 1)).collect();
        while let Some(i) = queue.pop_front() {
            let lit = match &work.clauses[i] {
                Some(c) if c.len() == 1 => c[0],
                _ => continue,
            };
            emit(&mut work, &mut log, SimplifyEvent::Unit { lit, clause: i });
            let touched: Vec<usize> = work.neg_occurrences(lit).to_vec();
            for k in touched {
                match &work.clauses[k] {
                    Some(c) if c.is_empty() => {
                        emit(&mut work, &mut log, SimplifyEvent::Conflict { clause: k });
                        return (SimplifyOutcome::Unsat, log);
                    }
                    Some(c) if c.len() == 1 => queue.push_back(k),
                    _ => {}
                }
            }
        }

        if log.events.len() == before {
            break;
        }
    }
    (work.finish(f), log)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bench::brute_force_sat;
    use crate::cnf::lits;
    use proptest::prelude::*;

    fn simplified(f: &Formula) -> Formula {
        simplify(f).0.formula().cloned().expect("not UNSAT")
    }

    #[test]
    fn dedup_and_tautology() {
        let f = Formula::from_dimacs_clauses(2, &[&[1, 1, 2], &[1, -1]]);
        let g = simplified(&f);
        assert_eq!(g.num_clauses(), 1);
        assert_eq!(g.clause(0).lits(), lits(&[1, 2]).as_slice());
        assert!(g.units().is_empty());
    }

    #[test]
    fn propagation_chain() {
        let f = Formula::from_dimacs_clauses(3, &[&[1], &[-1, 2], &[-2, 3]]);
        let (out, log) = simplify(&f);
        let g = out.formula().unwrap();
        assert_eq!(g.num_clauses(), 0);
        assert_eq!(g.units(), lits(&[1, 2, 3]).as_slice());
        assert_eq!(log.propagated_units(), lits(&[1, 2, 3]));
    }

    #[test]
    fn contradiction_is_unsat_outcome() {
        let f = Formula::from_dimacs_clauses(1, &[&[1], &[-1]]);
        let (out, log) = simplify(&f);
        assert_eq!(out, SimplifyOutcome::Unsat);
        assert!(log.is_unsat());
    }

    #[test]
    fn duplicates_after_propagation_are_removed() {
        let f = Formula::from_dimacs_clauses(4, &[&[1, 2, -4], &[2, 1], &[4], &[3, -2, 1]]);
        let g = simplified(&f);
        assert_eq!(g.num_clauses(), 2);
        assert_eq!(g.clause(0).lits(), lits(&[1, 2]).as_slice());
        assert_eq!(g.clause(1).lits(), lits(&[3, -2, 1]).as_slice());
        assert_eq!(g.units(), lits(&[4]).as_slice());
    }

    #[test]
    fn order_is_preserved() {
        let f = Formula::from_dimacs_clauses(4, &[&[3, 1, 2], &[-4, 2], &[4, -3, 2, -1]]);
        assert_eq!(simplified(&f), f);
    }

    fn arb_formula() -> impl Strategy<Value = Formula> {
        (1usize..9).prop_flat_map(|n| {
            let lit = (1..=n as i32, any::<bool>()).prop_map(|(v, s)| if s { -v } else { v });
            prop::collection::vec(prop::collection::vec(lit, 1..4), 0..14).prop_map(move |cs| {
                let refs: Vec<&[i32]> = cs.iter().map(|c| c.as_slice()).collect();
                Formula::from_dimacs_clauses(n, &refs)
            })
        })
    }

    proptest! {
        #[test]
        fn simplification_is_equisatisfiable_and_replayable(f in arb_formula()) {
            let (out, log) = simplify(&f);
            prop_assert_eq!(log.replay(&f), out.clone());
            let before = brute_force_sat(&f).unwrap();
            match out {
                SimplifyOutcome::Unsat => prop_assert!(!before),
                SimplifyOutcome::Simplified(g) => {
                    prop_assert_eq!(before, brute_force_sat(&g).unwrap());
                    prop_assert_eq!(g.recount(), g.occurrence_table().to_vec());
                    for c in g.clauses() {
                        prop_assert!(!c.is_tautology());
                        prop_assert_eq!(c.canonical().len(), c.len());
                        prop_assert!(c.len() >= 2);
                    }
                    let multiset = g.canonical_multiset();
                    prop_assert!(multiset.values().all(|&n| n == 1));
                }
            }
        }
    }
}
