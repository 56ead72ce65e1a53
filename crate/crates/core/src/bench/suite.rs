use std::fmt::Write as _;
use std::io;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use super::{brute_force_sat, exactly_one_of_three, gen_parity, gen_php, FamilyInstance, BRUTE_FORCE_MAX_VARS};
use crate::checker::{check_steps, CheckOptions};
use crate::cnf::parse_dimacs;
use crate::fixing::{FixingConfig, Rule};
use crate::group::StabilizerMode;
use crate::preprocess::{preprocess, PreprocessConfig, Symmetries};

/// Rule selection of one suite column.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Setting {
    Orbitopal,
    Negation,
    Clausal,
    AllUnits,
}

impl Setting {
    pub const ALL: [Setting; 4] = [Setting::Orbitopal, Setting::Negation, Setting::Clausal, Setting::AllUnits];

    pub fn name(self) -> &'static str {
        match self {
            Setting::Orbitopal => "orbitopal",
            Setting::Negation => "negation",
            Setting::Clausal => "clausal",
            Setting::AllUnits => "all-units",
        }
    }

    pub fn fixing_config(self, stabilizer: StabilizerMode) -> FixingConfig {
        let mut c = match self {
            Setting::Orbitopal => FixingConfig::only(Rule::Orbitopal),
            Setting::Negation => FixingConfig::only(Rule::Negation),
            Setting::Clausal => FixingConfig::only(Rule::Clausal),
            Setting::AllUnits => FixingConfig::all(),
        };
        c.stabilizer = stabilizer;
        c
    }
}

#[derive(Clone, Debug)]
pub struct SuiteConfig {
    pub families: Vec<FamilyInstance>,
    pub settings: Vec<Setting>,
    /// Run the built-in symmetry search instead of using the attached
    /// generators.
    pub search: bool,
    pub stabilizer: StabilizerMode,
}

impl SuiteConfig {
    /// PHP ladder with one more pigeon than holes for 2 to 8 holes, parity
    /// constraints on 2 to 6 variables and the three-variable exactly-one
    /// formula, under every setting.
    pub fn standard() -> SuiteConfig {
        let mut families: Vec<FamilyInstance> = (2..=8).map(|n| gen_php(n + 1, n)).collect();
        families.extend((2..=6).map(|n| gen_parity(n, true).expect("small parity")));
        families.push(exactly_one_of_three());
        SuiteConfig { families, settings: Setting::ALL.to_vec(), search: false, stabilizer: StabilizerMode::default() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SuiteRow {
    pub family: String,
    pub params: String,
    pub setting: String,
    pub units_orbitopal: usize,
    pub units_negation: usize,
    pub units_clausal: usize,
    pub proof_ok: bool,
    /// Brute-force comparison of input and output; empty when the formula
    /// is too large.
    pub equisat_ok: Option<bool>,
    pub time_ms: u128,
}

impl SuiteRow {
    pub fn units(&self) -> usize {
        self.units_orbitopal + self.units_negation + self.units_clausal
    }
}

/// Preprocesses every family under every setting, checks the proofs and,
/// for small formulas, equisatisfiability. Rows follow the family order,
/// settings inner.
pub fn run_suite(config: &SuiteConfig) -> Vec<SuiteRow> {
    let jobs: Vec<(&FamilyInstance, Setting)> =
        config.families.iter().flat_map(|f| config.settings.iter().map(move |&s| (f, s))).collect();
    jobs.into_par_iter().map(|(inst, setting)| run_one(inst, setting, config)).collect()
}

fn run_one(inst: &FamilyInstance, setting: Setting, config: &SuiteConfig) -> SuiteRow {
    let start = Instant::now();
    let symmetries = if config.search { Symmetries::default() } else { Symmetries::Given(inst.generators.clone()) };
    let pre = PreprocessConfig {
        fixing: setting.fixing_config(config.stabilizer),
        symmetries,
        ..PreprocessConfig::default()
    };
    let out = preprocess(&inst.formula, &pre).expect("no orbitope hints");
    let time_ms = start.elapsed().as_millis();

    let numbered: Vec<_> = out.proof.iter().cloned().enumerate().map(|(i, s)| (i + 1, s)).collect();
    let proof_ok = check_steps(&inst.formula, &numbered, CheckOptions::default()).accepted;
    let equisat_ok = if inst.formula.num_vars() <= BRUTE_FORCE_MAX_VARS.min(20) {
        let fixed = parse_dimacs(out.output_dimacs().as_bytes()).ok();
        match (brute_force_sat(&inst.formula), fixed.map(|g| brute_force_sat(&g))) {
            (Ok(a), Some(Ok(b))) => Some(a == b),
            _ => None,
        }
    } else {
        None
    };
    let stats = &out.fixing.stats;
    SuiteRow {
        family: inst.family.clone(),
        params: inst.params.clone(),
        setting: setting.name().to_string(),
        units_orbitopal: stats.units_orbitopal,
        units_negation: stats.units_negation,
        units_clausal: stats.units_clausal,
        proof_ok,
        equisat_ok,
        time_ms,
    }
}

pub fn write_csv<W: io::Write>(rows: &[SuiteRow], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

/// Plain-text table of the rows followed by per-setting averages of units
/// and time.
pub fn write_table(rows: &[SuiteRow]) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "{:<12} {:<18} {:<10} {:>5} {:>5} {:>5} {:>6} {:>7} {:>8}",
        "family", "params", "setting", "orb", "neg", "cls", "proof", "equisat", "ms"
    );
    for r in rows {
        let equisat = match r.equisat_ok {
            Some(true) => "yes",
            Some(false) => "NO",
            None => "-",
        };
        let _ = writeln!(
            s,
            "{:<12} {:<18} {:<10} {:>5} {:>5} {:>5} {:>6} {:>7} {:>8}",
            r.family,
            r.params,
            r.setting,
            r.units_orbitopal,
            r.units_negation,
            r.units_clausal,
            if r.proof_ok { "ok" } else { "FAIL" },
            equisat,
            r.time_ms
        );
    }
    let mut settings: Vec<&str> = Vec::new();
    for r in rows {
        if !settings.contains(&r.setting.as_str()) {
            settings.push(&r.setting);
        }
    }
    if !settings.is_empty() {
        let _ = writeln!(s, "\n{:<10} {:>9} {:>9} {:>9}", "setting", "instances", "avg units", "avg ms");
    }
    for name in settings {
        let group: Vec<&SuiteRow> = rows.iter().filter(|r| r.setting == name).collect();
        let k = group.len() as f64;
        let units = group.iter().map(|r| r.units() as f64).sum::<f64>() / k;
        let ms = group.iter().map(|r| r.time_ms as f64).sum::<f64>() / k;
        let _ = writeln!(s, "{:<10} {:>9} {:>9.2} {:>9.2}", name, group.len(), units, ms);
    }
    s
}
