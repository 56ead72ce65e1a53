use crate::cnf::{Formula, Lit, SimplificationLog, SimplifyEvent};
use crate::fixing::{FixedUnit, FixingResult, Justification};

use super::{parse_proof, write_proof, ProofParseError, ProofStep, Substitution};

/// Steps that turn the original formula's clause database into the
/// simplified one: deletions of tautologies, duplicates and satisfied
/// clauses, and propagation-implied additions of the units and shortened
/// clauses. Ends with the empty clause if simplification found a conflict.
pub fn simplification_steps(original: &Formula, log: &SimplificationLog) -> Vec<ProofStep> {
    // Clause as currently present in the proof's database, by original index.
    let mut db: Vec<Option<Vec<Lit>>> = original.clauses().iter().map(|c| Some(c.lits().to_vec())).collect();
    let mut occurrences: Vec<Vec<usize>> = vec![Vec::new(); 2 * original.num_vars()];
    for (i, c) in original.clauses().iter().enumerate() {
        for l in c.canonical() {
            occurrences[l.code()].push(i);
        }
    }
    let mut steps = Vec::new();
    for event in &log.events {
        match *event {
            SimplifyEvent::DedupLiterals { .. } => {}
            SimplifyEvent::Tautology { clause } | SimplifyEvent::Duplicate { clause, .. } => {
                if let Some(c) = db[clause].take() {
                    steps.push(ProofStep::Delete(c));
                }
            }
            SimplifyEvent::Unit { lit, .. } => {
                steps.push(ProofStep::Rup(vec![lit]));
                for &i in &occurrences[lit.code()] {
                    if let Some(c) = db[i].take() {
                        steps.push(ProofStep::Delete(c));
                    }
                }
                for &i in &occurrences[(!lit).code()] {
                    if let Some(c) = db[i].take() {
                        let shorter: Vec<Lit> = c.iter().copied().filter(|&l| l != !lit).collect();
                        steps.push(ProofStep::Rup(shorter.clone()));
                        steps.push(ProofStep::Delete(c));
                        db[i] = Some(shorter);
                    }
                }
            }
            SimplifyEvent::Conflict { .. } => steps.push(ProofStep::Rup(Vec::new())),
        }
    }
    steps
}

/// One substitution-redundancy step per negative unit with its row-swap
/// witness; the positive unit as a propagation step.
pub fn emit_orbitopal_steps(units: &[FixedUnit]) -> Vec<ProofStep> {
    units.iter().flat_map(unit_steps).collect()
}

/// Per fixed literal `l1` of a clause `(l1 ∨ ... ∨ lk)`: the binaries
/// `(l1 ∨ ¬li)` with witness `σi`, then `(l1)` by propagation. With
/// `delete_binaries`, the binaries are deleted afterwards.
pub fn emit_clausal_steps(units: &[FixedUnit], delete_binaries: bool) -> Vec<ProofStep> {
    let mut steps = Vec::new();
    for u in units {
        steps.extend(unit_steps(u));
        if let (true, Justification::Clausal { witnesses }) = (delete_binaries, &u.justification) {
            steps.extend(witnesses.iter().map(|(l, _)| ProofStep::Delete(vec![u.lit, !*l])));
        }
    }
    steps
}

/// One substitution-redundancy step per unit with its symmetry as witness.
pub fn emit_negation_steps(units: &[FixedUnit]) -> Vec<ProofStep> {
    units.iter().flat_map(unit_steps).collect()
}

fn unit_steps(u: &FixedUnit) -> Vec<ProofStep> {
    match &u.justification {
        Justification::Substitution(w) => vec![ProofStep::Sr { clause: vec![u.lit], witness: w.clone() }],
        Justification::Propagation => vec![ProofStep::Rup(vec![u.lit])],
        Justification::Negation(sigma) => {
            vec![ProofStep::Sr { clause: vec![u.lit], witness: Substitution::from_perm(sigma) }]
        }
        Justification::Clausal { witnesses } => {
            let mut steps: Vec<ProofStep> = witnesses
                .iter()
                .map(|(l, sigma)| ProofStep::Sr { clause: vec![u.lit, !*l], witness: Substitution::from_perm(sigma) })
                .collect();
            steps.push(ProofStep::Rup(vec![u.lit]));
            steps
        }
    }
}

/// Steps for all units of a pipeline run in derivation order, followed by
/// the empty clause if the result propagates to a conflict.
pub fn emit_fixing_steps(result: &FixingResult, delete_binaries: bool) -> Vec<ProofStep> {
    let mut steps = Vec::new();
    for u in &result.units {
        steps.extend(emit_clausal_steps(std::slice::from_ref(u), delete_binaries));
    }
    if result.unsat {
        steps.push(ProofStep::Rup(Vec::new()));
    }
    steps
}

/// Appends a witness-free clausal proof (additions and deletions only) to
/// `sr_proof`. The refutation is parsed first so malformed input, or input
/// with witnesses, is reported with its own line numbers.
pub fn compose_with_refutation(sr_proof: &[ProofStep], refutation: &str) -> Result<String, ProofParseError> {
    for (line, step) in parse_proof(refutation)? {
        if matches!(step, ProofStep::Sr { .. }) {
            return Err(ProofParseError { line, message: "refutation steps must not carry witnesses".into() });
        }
    }
    let mut out = write_proof(sr_proof);
    out.push_str(refutation);
    if !refutation.is_empty() && !refutation.ends_with('\n') {
        out.push('\n');
    }
    Ok(out)
}
