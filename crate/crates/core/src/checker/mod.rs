//! Proof checking: a unit propagation engine over a clause database with
//! additions and deletions, and the substitution-redundancy check.

mod propagate;

use std::collections::HashMap;

use thiserror::Error;

use crate::cnf::{canonical_form, Formula, Lit};
use crate::proof::{parse_proof, Image, ProofParseError, ProofStep, Substitution};

pub use propagate::{Propagation, PropagationState};

/// Outcome of checking a proof.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verdict {
    pub accepted: bool,
    /// The database contains the empty clause after the last step.
    pub refutation: bool,
    pub steps_checked: usize,
    pub failure: Option<Failure>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Failure {
    /// 0-based index among proof steps.
    pub step: usize,
    /// 1-based line in the proof text, if known.
    pub line: usize,
    pub clause: Vec<Lit>,
    pub reason: FailureReason,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum FailureReason {
    #[error("clause is not implied by unit propagation")]
    NotRup,
    #[error("clause {0:?} of the database is not implied after applying the witness")]
    NotSr(Vec<i32>),
    #[error("deleted clause is not in the database")]
    MissingClause,
}

/// Checking options.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct CheckOptions {
    /// Propagate for every database clause instead of skipping the ones the
    /// witness leaves unchanged or maps onto database clauses.
    pub strict: bool,
}

/// A clause database that applies checked proof steps.
pub struct Checker {
    state: PropagationState,
    index: HashMap<Vec<Lit>, Vec<usize>>,
    options: CheckOptions,
}

impl Checker {
    pub fn new(f: &Formula, options: CheckOptions) -> Checker {
        let mut state = PropagationState::new(f.num_vars());
        let mut index: HashMap<Vec<Lit>, Vec<usize>> = HashMap::new();
        let unit_clauses = f.units().iter().map(std::slice::from_ref);
        for lits in f.clauses().iter().map(|c| c.lits()).chain(unit_clauses) {
            let id = state.add_clause(lits);
            index.entry(canonical_form(lits)).or_default().push(id);
        }
        Checker { state, index, options }
    }

    pub fn state(&self) -> &PropagationState {
        &self.state
    }

    pub fn contains(&self, clause: &[Lit]) -> bool {
        self.index.get(&canonical_form(clause)).is_some_and(|ids| !ids.is_empty())
    }

    pub fn has_empty_clause(&self) -> bool {
        self.contains(&[])
    }

    /// Clause implied by unit propagation: assigning its negation conflicts.
    pub fn check_rup(&mut self, clause: &[Lit]) -> bool {
        let negation: Vec<Lit> = clause.iter().map(|&l| !l).collect();
        let mark = self.state.mark();
        let conflict = self.state.assume(&negation) == Propagation::Conflict;
        self.state.backtrack(mark);
        conflict
    }

    /// Checks that `clause` is substitution-redundant with witness `omega`:
    /// with the negation of `clause` assigned, unit propagation refutes the
    /// negation of `D` under `omega` for every database clause `D` and for
    /// `clause` itself. Returns the first failing clause.
    pub fn check_sr(&mut self, clause: &[Lit], omega: &Substitution) -> Result<(), Vec<Lit>> {
        let negation: Vec<Lit> = clause.iter().map(|&l| !l).collect();
        let mark = self.state.mark();
        if self.state.assume(&negation) == Propagation::Conflict {
            self.state.backtrack(mark);
            return Ok(());
        }
        let candidates: Vec<usize> = if self.options.strict {
            self.state.live_clauses().collect()
        } else {
            let mut ids: Vec<usize> = omega
                .domain()
                .flat_map(|v| [v.positive(), v.negative()])
                .flat_map(|l| self.state.occurrences(l).iter().copied())
                .filter(|&id| self.state.is_live(id))
                .collect();
            ids.sort_unstable();
            ids.dedup();
            ids
        };
        let own = canonical_form(clause);
        let targets: Vec<(Option<usize>, Vec<Lit>)> = candidates
            .into_iter()
            .map(|id| (Some(id), self.state.clause(id).to_vec()))
            .chain(std::iter::once((None, own)))
            .collect();
        let mut result = Ok(());
        for (id, d) in targets {
            let Some(reduced) = reduce(&d, omega) else { continue };
            if !self.options.strict && id.is_some() {
                if reduced == canonical_form(&d) || self.contains(&reduced) {
                    continue;
                }
            }
            if !self.implied_under_current(&reduced) {
                result = Err(d);
                break;
            }
        }
        self.state.backtrack(mark);
        result
    }

    /// Whether assigning the negation of `clause` on top of the current
    /// assignment conflicts.
    fn implied_under_current(&mut self, clause: &[Lit]) -> bool {
        let negation: Vec<Lit> = clause.iter().map(|&l| !l).collect();
        let mark = self.state.mark();
        let conflict = self.state.assume(&negation) == Propagation::Conflict;
        self.state.backtrack(mark);
        conflict
    }

    pub fn add(&mut self, clause: &[Lit]) {
        let id = self.state.add_clause(clause);
        self.index.entry(canonical_form(clause)).or_default().push(id);
    }

    /// Removes one copy of `clause`; false if there is none.
    pub fn delete(&mut self, clause: &[Lit]) -> bool {
        let key = canonical_form(clause);
        let Some(id) = self.index.get_mut(&key).and_then(|ids| ids.pop()) else {
            return false;
        };
        self.state.remove_clause(id);
        true
    }

    /// Checks and applies one step.
    pub fn apply(&mut self, step: &ProofStep) -> Result<(), FailureReason> {
        match step {
            ProofStep::Rup(c) => {
                if !self.check_rup(c) {
                    return Err(FailureReason::NotRup);
                }
                self.add(c);
            }
            ProofStep::Sr { clause, witness } => {
                self.check_sr(clause, witness)
                    .map_err(|d| FailureReason::NotSr(d.iter().map(|l| l.to_dimacs()).collect()))?;
                self.add(clause);
            }
            ProofStep::Delete(c) => {
                if !self.delete(c) {
                    return Err(FailureReason::MissingClause);
                }
            }
        }
        Ok(())
    }
}

/// `D` under `omega`, canonical; `None` if satisfied or tautological.
fn reduce(d: &[Lit], omega: &Substitution) -> Option<Vec<Lit>> {
    let mut out = Vec::with_capacity(d.len());
    for &l in d {
        match omega.apply(l) {
            Image::True => return None,
            Image::False => {}
            Image::Lit(m) => out.push(m),
        }
    }
    let out = canonical_form(&out);
    if out.windows(2).any(|w| w[0].var() == w[1].var()) {
        return None;
    }
    Some(out)
}

#[derive(Debug, Error)]
pub enum CheckError {
    #[error(transparent)]
    Parse(#[from] ProofParseError),
}

/// Checks `proof` step by step against the formula `f0`.
pub fn check_proof(f0: &Formula, proof: &str, options: CheckOptions) -> Result<Verdict, CheckError> {
    let steps = parse_proof(proof)?;
    Ok(check_steps(f0, &steps, options))
}

/// Checks already parsed steps, given with their line numbers.
pub fn check_steps(f0: &Formula, steps: &[(usize, ProofStep)], options: CheckOptions) -> Verdict {
    let mut checker = Checker::new(f0, options);
    for (i, (line, step)) in steps.iter().enumerate() {
        if let Err(reason) = checker.apply(step) {
            return Verdict {
                accepted: false,
                refutation: false,
                steps_checked: i,
                failure: Some(Failure { step: i, line: *line, clause: step.clause().to_vec(), reason }),
            };
        }
    }
    Verdict { accepted: true, refutation: checker.has_empty_clause(), steps_checked: steps.len(), failure: None }
}

/// Whether unit propagation on `f` (clauses and units) reaches a conflict.
pub fn propagates_to_conflict(f: &Formula) -> bool {
    let mut c = Checker::new(f, CheckOptions::default());
    c.check_rup(&[])
}
