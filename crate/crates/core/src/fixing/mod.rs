//! The three unit-clause symmetry-breaking rules and the pipeline that
//! chains them with stabilizer updates.

use std::time::Instant;

use num_bigint::BigUint;
use thiserror::Error;

use crate::checker::propagates_to_conflict;
use crate::cnf::{Formula, Lit};
use crate::group::{orbit_of, GroupState, StabilizerMode};
use crate::proof::Substitution;
use crate::structure::{detect_orbitopes, OrbitopeMatrix};
use crate::symmetry::{validate_symmetry, LitPerm};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Rule {
    Orbitopal,
    Negation,
    Clausal,
}

impl Rule {
    pub fn name(self) -> &'static str {
        match self {
            Rule::Orbitopal => "orbitopal",
            Rule::Negation => "negation",
            Rule::Clausal => "clausal",
        }
    }
}

/// Why a fixed unit is redundant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Justification {
    /// Substitution-redundant with the given witness.
    Substitution(Substitution),
    /// Implied by unit propagation.
    Propagation,
    /// Fixed from a clause whose literals share an orbit: for each other
    /// literal `l` of the clause, a symmetry mapping the fixed literal to `l`.
    Clausal { witnesses: Vec<(Lit, LitPerm)> },
    /// A symmetry mapping the fixed literal to its negation.
    Negation(LitPerm),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FixedUnit {
    pub lit: Lit,
    pub rule: Rule,
    pub justification: Justification,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FixingStats {
    pub units_orbitopal: usize,
    pub units_negation: usize,
    pub units_clausal: usize,
    pub orbitopes: Vec<(usize, usize)>,
    pub skipped_orbitopes: usize,
    pub contradictions: usize,
    pub group_order_before: Option<BigUint>,
    pub group_order_after: Option<BigUint>,
    pub exact_stabilizers: bool,
    pub stabilizer_fallbacks: usize,
    pub time_ms: u128,
}

impl FixingStats {
    pub fn units(&self, rule: Rule) -> usize {
        match rule {
            Rule::Orbitopal => self.units_orbitopal,
            Rule::Negation => self.units_negation,
            Rule::Clausal => self.units_clausal,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FixingResult {
    /// Units in the order they were derived, which is the proof order.
    pub units: Vec<FixedUnit>,
    pub stats: FixingStats,
    /// The formula with all units propagates to a conflict.
    pub unsat: bool,
}

impl FixingResult {
    pub fn literals(&self) -> Vec<Lit> {
        self.units.iter().map(|u| u.lit).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FixingConfig {
    pub orbitopal: bool,
    pub negation: bool,
    pub clausal: bool,
    pub stabilizer: StabilizerMode,
}

impl FixingConfig {
    pub fn all() -> FixingConfig {
        FixingConfig { orbitopal: true, negation: true, clausal: true, stabilizer: StabilizerMode::default() }
    }

    pub fn none() -> FixingConfig {
        FixingConfig { orbitopal: false, negation: false, clausal: false, stabilizer: StabilizerMode::default() }
    }

    pub fn only(rule: Rule) -> FixingConfig {
        let mut c = FixingConfig::none();
        match rule {
            Rule::Orbitopal => c.orbitopal = true,
            Rule::Negation => c.negation = true,
            Rule::Clausal => c.clausal = true,
        }
        c
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OrbitopeSkip {
    #[error("matrix entry {0} is already fixed")]
    EntryFixed(Lit),
    #[error("swap of rows {0} and {1} is not a symmetry of the current formula")]
    NotASymmetry(usize, usize),
}

/// Current truth values by variable.
#[derive(Clone, Debug)]
pub struct Assignment {
    values: Vec<Option<bool>>,
}

impl Assignment {
    pub fn new(num_vars: usize, units: &[Lit]) -> Assignment {
        let mut a = Assignment { values: vec![None; num_vars] };
        for &u in units {
            a.assign(u);
        }
        a
    }

    pub fn value(&self, lit: Lit) -> Option<bool> {
        self.values.get(lit.var().index()).copied().flatten().map(|b| b != lit.is_negative())
    }

    pub fn assign(&mut self, lit: Lit) {
        let v = lit.var().index();
        if v >= self.values.len() {
            self.values.resize(v + 1, None);
        }
        self.values[v] = Some(lit.is_positive());
    }
}

/// Units of one orbitope: `¬l(i,j)` for `i <= n - j` column by column with
/// the row-swap witness, and `l(n,1)` by propagation right after the first
/// column.
///
/// `current` is the formula including every unit derived so far; the matrix
/// is skipped if an entry is already fixed or a row swap is no longer a
/// symmetry of it.
pub fn orbitopal_fix(current: &Formula, mat: &OrbitopeMatrix) -> Result<Vec<FixedUnit>, OrbitopeSkip> {
    let (n, m) = (mat.num_rows(), mat.num_cols());
    if n < 2 {
        return Ok(Vec::new());
    }
    let assigned = Assignment::new(current.num_vars(), current.units());
    for row in mat.rows() {
        for &l in row {
            if assigned.value(l).is_some() {
                return Err(OrbitopeSkip::EntryFixed(l));
            }
        }
    }
    for (i, sigma) in mat.row_swaps().iter().enumerate() {
        if !validate_symmetry(current, sigma) {
            return Err(OrbitopeSkip::NotASymmetry(i + 1, i + 2));
        }
    }
    let mut out = Vec::new();
    for j in 0..n.min(m) {
        for i in 0..n - 1 - j {
            let sigma = mat.adjacent_row_swap(i).expect("i < n - 1");
            let mut witness = Substitution::from_perm(sigma);
            witness.set_literal(mat.entry(i, j), false);
            witness.set_literal(mat.entry(i + 1, j), true);
            out.push(FixedUnit {
                lit: !mat.entry(i, j),
                rule: Rule::Orbitopal,
                justification: Justification::Substitution(witness),
            });
        }
        if j == 0 {
            out.push(FixedUnit {
                lit: mat.entry(n - 1, 0),
                rule: Rule::Orbitopal,
                justification: Justification::Propagation,
            });
        }
    }
    Ok(out)
}

/// Clausal fixing: each clause is looked at once, in index order. If all
/// its literals share an orbit, its first literal is fixed, the witnesses
/// mapping it to the other literals are recorded, and the group is replaced
/// by the stabilizer of the fixed literal.
pub fn clausal_fix(f: &Formula, state: &mut GroupState, assigned: &mut Assignment) -> (Vec<FixedUnit>, usize) {
    let mut out = Vec::new();
    let mut contradictions = 0;
    let mut orbits = state.orbits();
    for c in f.clauses() {
        if state.is_trivial() {
            break;
        }
        let mut lits: Vec<Lit> = Vec::with_capacity(c.len());
        for &l in c.lits() {
            if !lits.contains(&l) {
                lits.push(l);
            }
        }
        if lits.len() < 2 || !lits.iter().all(|&l| orbits.same_orbit(lits[0], l)) {
            continue;
        }
        let l1 = lits[0];
        match assigned.value(l1) {
            Some(true) => continue,
            Some(false) => {
                contradictions += 1;
                continue;
            }
            None => {}
        }
        let orbit = orbit_of(state.generators(), l1);
        let witnesses = lits[1..].iter().map(|&l| (l, orbit.witness(l).expect("literal shares the orbit"))).collect();
        out.push(FixedUnit { lit: l1, rule: Rule::Clausal, justification: Justification::Clausal { witnesses } });
        assigned.assign(l1);
        state.stabilize(&[l1]);
        orbits = state.orbits();
    }
    (out, contradictions)
}

/// Negation fixing: variables in ascending order; a variable whose positive
/// and negative literal share an orbit is fixed to true, with a symmetry
/// mapping it to its negation, and the group is replaced by the stabilizer.
pub fn negation_fix(f: &Formula, state: &mut GroupState, assigned: &mut Assignment) -> (Vec<FixedUnit>, usize) {
    let mut out = Vec::new();
    let mut contradictions = 0;
    let mut orbits = state.orbits();
    for v in 0..f.num_vars() {
        if state.is_trivial() {
            break;
        }
        let x = crate::cnf::Var::from_index(v).positive();
        if !orbits.same_orbit(x, !x) {
            continue;
        }
        if assigned.value(x).is_some() {
            contradictions += 1;
            continue;
        }
        let sigma = orbit_of(state.generators(), x).witness(!x).expect("negation shares the orbit");
        out.push(FixedUnit { lit: x, rule: Rule::Negation, justification: Justification::Negation(sigma) });
        assigned.assign(x);
        state.stabilize(&[x]);
        orbits = state.orbits();
    }
    (out, contradictions)
}

/// Runs the enabled rules in the order orbitopal, negation, clausal on a
/// simplified formula with symmetry generators `gens`.
///
/// Orbitopes come from `orbitopes` if given, else from the row swaps among
/// `gens`. After each rule the group is replaced by the pointwise
/// stabilizer of the new units.
pub fn run_pipeline(
    f: &Formula,
    gens: Vec<LitPerm>,
    orbitopes: Option<Vec<OrbitopeMatrix>>,
    config: &FixingConfig,
) -> FixingResult {
    let start = Instant::now();
    let mut state = GroupState::new(gens, f.num_vars(), config.stabilizer);
    let mut stats = FixingStats { group_order_before: state.order(), ..FixingStats::default() };
    let mut units: Vec<FixedUnit> = Vec::new();
    let mut assigned = Assignment::new(f.num_vars(), f.units());

    if config.orbitopal {
        let mats = orbitopes.unwrap_or_else(|| detect_orbitopes(state.generators(), f).0);
        let mut current = f.clone();
        let mut fixed = Vec::new();
        for mat in &mats {
            match orbitopal_fix(&current, mat) {
                Ok(new) => {
                    stats.orbitopes.push((mat.num_rows(), mat.num_cols()));
                    for u in &new {
                        assigned.assign(u.lit);
                        fixed.push(u.lit);
                    }
                    current = current.with_units(&new.iter().map(|u| u.lit).collect::<Vec<_>>());
                    units.extend(new);
                }
                Err(_) => stats.skipped_orbitopes += 1,
            }
        }
        stats.units_orbitopal = fixed.len();
        state.stabilize(&fixed);
    }
    if config.negation {
        let (new, bad) = negation_fix(f, &mut state, &mut assigned);
        stats.units_negation = new.len();
        stats.contradictions += bad;
        units.extend(new);
    }
    if config.clausal {
        let (new, bad) = clausal_fix(f, &mut state, &mut assigned);
        stats.units_clausal = new.len();
        stats.contradictions += bad;
        units.extend(new);
    }

    stats.group_order_after = state.order();
    stats.exact_stabilizers = state.is_exact();
    stats.stabilizer_fallbacks = state.fallbacks();
    let lits: Vec<Lit> = units.iter().map(|u| u.lit).collect();
    let unsat = propagates_to_conflict(&f.with_units(&lits));
    stats.time_ms = start.elapsed().as_millis();
    FixingResult { units, stats, unsat }
}
