//! The whole preprocessing run: simplify, find symmetries, fix units and
//! build the proof against the input formula.

use std::time::Instant;

use crate::cnf::{find_ulcs, simplify, write_dimacs, Formula, Lit, SimplificationLog, SimplifyOutcome};
use crate::fixing::{run_pipeline, FixingConfig, FixingResult};
use crate::proof::{emit_fixing_steps, simplification_steps, ProofStep};
use crate::structure::{parse_orbitope_hints, StructureError};
use crate::symmetry::{detect_symmetries, validate_symmetry, LitPerm, DEFAULT_NODE_BUDGET};

/// Where the symmetry generators come from.
#[derive(Clone, Debug)]
pub enum Symmetries {
    /// Built-in search on the simplified formula with this node budget.
    Search(usize),
    /// Generators of the input formula, e.g. read from a file.
    Given(Vec<LitPerm>),
}

impl Default for Symmetries {
    fn default() -> Self {
        Symmetries::Search(DEFAULT_NODE_BUDGET)
    }
}

#[derive(Clone, Debug)]
pub struct PreprocessConfig {
    pub fixing: FixingConfig,
    pub symmetries: Symmetries,
    /// Orbitope hint text, read against the simplified formula and used
    /// instead of detecting orbitopes.
    pub orbitope_hints: Option<String>,
    /// Delete the binary clauses of clausal fixing once the unit is derived.
    pub delete_binaries: bool,
}

impl Default for PreprocessConfig {
    fn default() -> Self {
        PreprocessConfig {
            fixing: FixingConfig::all(),
            symmetries: Symmetries::default(),
            orbitope_hints: None,
            delete_binaries: false,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Preprocessed {
    pub num_vars: usize,
    /// The simplified formula; `None` if simplification found a conflict.
    pub simplified: Option<Formula>,
    pub log: SimplificationLog,
    /// Generators used for fixing, all symmetries of the simplified formula.
    pub generators: Vec<LitPerm>,
    /// Given generators that are no symmetry of the simplified formula.
    pub dropped_generators: usize,
    /// False if the symmetry search ran out of budget.
    pub search_complete: bool,
    pub ulcs: usize,
    pub fixing: FixingResult,
    /// Proof from the input formula to the output formula.
    pub proof: Vec<ProofStep>,
    pub simplify_ms: u128,
    pub symmetry_ms: u128,
}

impl Preprocessed {
    /// The formula or its units propagate to a conflict.
    pub fn is_unsat(&self) -> bool {
        self.simplified.is_none() || self.fixing.unsat
    }

    pub fn units(&self) -> Vec<Lit> {
        self.fixing.literals()
    }

    /// The simplified formula followed by the fixed units, as DIMACS.
    pub fn output_dimacs(&self) -> String {
        match &self.simplified {
            Some(f) => write_dimacs(f, &self.units()),
            None => format!("p cnf {} 1\n0\n", self.num_vars),
        }
    }
}

/// Runs the preprocessor on `f`. Fails only on invalid orbitope hints.
pub fn preprocess(f: &Formula, config: &PreprocessConfig) -> Result<Preprocessed, StructureError> {
    let start = Instant::now();
    let (outcome, log) = simplify(f);
    let mut proof = simplification_steps(f, &log);
    let simplify_ms = start.elapsed().as_millis();

    let simplified = match outcome {
        SimplifyOutcome::Simplified(g) => g,
        SimplifyOutcome::Unsat => {
            return Ok(Preprocessed {
                num_vars: f.num_vars(),
                simplified: None,
                log,
                generators: Vec::new(),
                dropped_generators: 0,
                search_complete: true,
                ulcs: 0,
                fixing: FixingResult { unsat: true, ..FixingResult::default() },
                proof,
                simplify_ms,
                symmetry_ms: 0,
            });
        }
    };

    let start = Instant::now();
    let (generators, dropped, complete) = match &config.symmetries {
        Symmetries::Search(budget) => {
            let s = detect_symmetries(&simplified, *budget);
            (s.generators, 0, s.complete)
        }
        Symmetries::Given(gens) => {
            let kept: Vec<LitPerm> = gens.iter().filter(|g| validate_symmetry(&simplified, g)).cloned().collect();
            let dropped = gens.len() - kept.len();
            (kept, dropped, true)
        }
    };
    let symmetry_ms = start.elapsed().as_millis();

    let orbitopes = config.orbitope_hints.as_deref().map(|t| parse_orbitope_hints(t, &simplified)).transpose()?;
    let fixing = run_pipeline(&simplified, generators.clone(), orbitopes, &config.fixing);
    proof.extend(emit_fixing_steps(&fixing, config.delete_binaries));
    Ok(Preprocessed {
        num_vars: f.num_vars(),
        ulcs: find_ulcs(&simplified).len(),
        simplified: Some(simplified),
        log,
        generators,
        dropped_generators: dropped,
        search_complete: complete,
        fixing,
        proof,
        simplify_ms,
        symmetry_ms,
    })
}
