//! CNF formulas: literals, clauses, DIMACS I/O, simplification and unique
//! literal clause detection.

mod dimacs;
mod lit;
mod simplify;

use std::collections::HashMap;
use std::fmt::Write as _;

pub use dimacs::{parse_dimacs, parse_dimacs_with_limit, ParseError, ParseErrorKind, DEFAULT_MAX_INPUT_BYTES};
pub use lit::{lits, Lit, Var};
pub use simplify::{simplify, SimplificationLog, SimplifyEvent, SimplifyOutcome};

/// A clause in stored (input) order, with its sorted, deduplicated
/// canonical form cached for set comparisons.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Clause {
    lits: Vec<Lit>,
    canonical: Vec<Lit>,
}

impl Clause {
    pub fn new(lits: Vec<Lit>) -> Clause {
        let canonical = canonical_form(&lits);
        Clause { lits, canonical }
    }

    pub fn lits(&self) -> &[Lit] {
        &self.lits
    }

    /// Sorted literals without duplicates.
    pub fn canonical(&self) -> &[Lit] {
        &self.canonical
    }

    pub fn len(&self) -> usize {
        self.lits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lits.is_empty()
    }

    pub fn is_tautology(&self) -> bool {
        self.canonical.windows(2).any(|w| w[0].var() == w[1].var())
    }
}

/// Sorted, deduplicated copy of `lits`.
pub fn canonical_form(lits: &[Lit]) -> Vec<Lit> {
    let mut c = lits.to_vec();
    c.sort_unstable();
    c.dedup();
    c
}

/// An indexed clause database with per-literal occurrence counts.
///
/// `units` holds literals already fixed by earlier processing (unit
/// propagation during simplification); they are part of the formula but are
/// kept apart from the clause list so clause indices stay stable.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Formula {
    num_vars: usize,
    clauses: Vec<Clause>,
    occurrences: Vec<u32>,
    units: Vec<Lit>,
}

impl Formula {
    pub fn new(num_vars: usize) -> Formula {
        Formula { num_vars, clauses: Vec::new(), occurrences: vec![0; 2 * num_vars], units: Vec::new() }
    }

    /// Builds a formula from DIMACS-style integer clauses.
    pub fn from_dimacs_clauses(num_vars: usize, clauses: &[&[i32]]) -> Formula {
        let mut f = Formula::new(num_vars);
        for c in clauses {
            f.push_clause(lits(c));
        }
        f
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn clauses(&self) -> &[Clause] {
        &self.clauses
    }

    pub fn clause(&self, index: usize) -> &Clause {
        &self.clauses[index]
    }

    pub fn num_clauses(&self) -> usize {
        self.clauses.len()
    }

    pub fn units(&self) -> &[Lit] {
        &self.units
    }

    /// Number of clauses containing `lit` (counting repeated occurrences).
    pub fn occurrences(&self, lit: Lit) -> u32 {
        self.occurrences.get(lit.code()).copied().unwrap_or(0)
    }

    /// Appends a clause, growing the variable range if needed.
    pub fn push_clause(&mut self, lits: Vec<Lit>) {
        if let Some(max) = lits.iter().map(|l| l.var().index() + 1).max() {
            self.ensure_vars(max);
        }
        for l in &lits {
            self.occurrences[l.code()] += 1;
        }
        self.clauses.push(Clause::new(lits));
    }

    pub(crate) fn push_unit(&mut self, lit: Lit) {
        self.ensure_vars(lit.var().index() + 1);
        self.units.push(lit);
    }

    fn ensure_vars(&mut self, n: usize) {
        if n > self.num_vars {
            self.num_vars = n;
            self.occurrences.resize(2 * n, 0);
        }
    }

    /// This formula conjoined with extra unit literals (kept in `units`).
    pub fn with_units(&self, extra: &[Lit]) -> Formula {
        let mut f = self.clone();
        for &l in extra {
            f.push_unit(l);
        }
        f
    }

    /// Variables occurring in some clause, ascending.
    pub fn variables(&self) -> Vec<Var> {
        (0..self.num_vars)
            .filter(|&v| self.occurrences[2 * v] + self.occurrences[2 * v + 1] > 0)
            .map(Var::from_index)
            .collect()
    }

    /// Literals occurring in some clause, ascending by code.
    pub fn literals(&self) -> Vec<Lit> {
        (0..2 * self.num_vars).filter(|&c| self.occurrences[c] > 0).map(Lit::from_code).collect()
    }

    /// Occurrence counts recomputed from scratch, indexed by literal code.
    pub fn recount(&self) -> Vec<u32> {
        let mut counts = vec![0; 2 * self.num_vars];
        for c in &self.clauses {
            for l in c.lits() {
                counts[l.code()] += 1;
            }
        }
        counts
    }

    pub(crate) fn occurrence_table(&self) -> &[u32] {
        &self.occurrences
    }

    /// Multiset of clause canonical forms.
    pub fn canonical_multiset(&self) -> HashMap<&[Lit], usize> {
        let mut m: HashMap<&[Lit], usize> = HashMap::with_capacity(self.clauses.len());
        for c in &self.clauses {
            *m.entry(c.canonical()).or_default() += 1;
        }
        m
    }
}

/// Indices of the unique literal clauses of `f`: clauses all of whose
/// literals occur exactly once in the whole formula.
///
/// One counting pass (maintained incrementally by [`Formula`]) and one scan.
pub fn find_ulcs(f: &Formula) -> Vec<usize> {
    let occ = f.occurrence_table();
    f.clauses()
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.is_empty() && c.lits().iter().all(|l| occ[l.code()] == 1))
        .map(|(i, _)| i)
        .collect()
}

/// DIMACS text: the clauses in stored order, then the formula's own units,
/// then `extra_units` in the given order.
pub fn write_dimacs(f: &Formula, extra_units: &[Lit]) -> String {
    let total = f.num_clauses() + f.units().len() + extra_units.len();
    let num_vars = extra_units.iter().map(|l| l.var().index() + 1).max().unwrap_or(0).max(f.num_vars());
    let mut out = String::with_capacity(16 * total + 32);
    let _ = writeln!(out, "p cnf {num_vars} {total}");
    for c in f.clauses() {
        write_clause_line(&mut out, c.lits());
    }
    for &u in f.units().iter().chain(extra_units) {
        write_clause_line(&mut out, &[u]);
    }
    out
}

pub(crate) fn write_clause_line(out: &mut String, lits: &[Lit]) {
    for l in lits {
        let _ = write!(out, "{} ", l);
    }
    out.push_str("0\n");
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn example1() -> Formula {
        Formula::from_dimacs_clauses(3, &[&[1, 2, 3], &[-1, -2], &[-1, -3], &[-2, -3]])
    }

    /// Quadratic re-scan: for every clause, compare against every other one.
    fn naive_ulcs(f: &Formula) -> Vec<usize> {
        (0..f.num_clauses())
            .filter(|&i| {
                let c = f.clause(i);
                !c.is_empty()
                    && c.lits().iter().enumerate().all(|(p, l)| {
                        !c.lits()[..p].contains(l)
                            && !c.lits()[p + 1..].contains(l)
                            && (0..f.num_clauses()).filter(|&k| k != i).all(|k| !f.clause(k).lits().contains(l))
                    })
            })
            .collect()
    }

    #[test]
    fn ulcs_of_example1() {
        let f = example1();
        assert_eq!(find_ulcs(&f), vec![0]);
        assert_eq!(naive_ulcs(&f), vec![0]);
    }

    #[test]
    fn single_clause_is_ulc() {
        let f = Formula::from_dimacs_clauses(2, &[&[1, 2]]);
        assert_eq!(find_ulcs(&f), vec![0]);
    }

    #[test]
    fn ulcs_of_php_5_4_are_the_column_clauses() {
        let f = crate::bench::gen_php(5, 4).formula;
        // Occurrence oracle: each p(i,j) occurs once (its ALO clause), each
        // negation in 4 pair clauses.
        for v in f.variables() {
            assert_eq!(f.occurrences(v.positive()), 1);
            assert_eq!(f.occurrences(v.negative()), 4);
        }
        assert_eq!(find_ulcs(&f), vec![0, 1, 2, 3, 4]);
        assert_eq!(naive_ulcs(&f), vec![0, 1, 2, 3, 4]);
    }

    #[test]
    fn counts_match_recount() {
        let mut f = example1();
        f.push_clause(lits(&[5, -1]));
        assert_eq!(f.recount(), f.occurrence_table());
        assert_eq!(f.num_vars(), 5);
        assert_eq!(f.variables().len(), 4);
    }

    #[test]
    fn write_appends_units() {
        let f = example1();
        let text = write_dimacs(&f, &lits(&[1]));
        assert_eq!(text, "p cnf 3 5\n1 2 3 0\n-1 -2 0\n-1 -3 0\n-2 -3 0\n1 0\n");
    }

    #[test]
    fn php_5_4_header_with_seven_units() {
        let f = crate::bench::gen_php(5, 4).formula;
        assert_eq!(f.num_clauses(), 45);
        let units = lits(&[-1, -2, -3, 4, -5, -6, -9]);
        let text = write_dimacs(&f, &units);
        assert!(text.starts_with("p cnf 20 52\n"));
    }

    #[test]
    fn tautology_detection() {
        assert!(Clause::new(lits(&[1, -2, -1])).is_tautology());
        assert!(!Clause::new(lits(&[1, 1, 2])).is_tautology());
    }
}
