use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use orbifix::bench::{gen_parity, gen_php, run_suite, write_csv, write_table, FamilyInstance, SuiteConfig};
use orbifix::checker::{check_proof, CheckOptions};
use orbifix::cnf::{parse_dimacs_with_limit, Formula, DEFAULT_MAX_INPUT_BYTES};
use orbifix::fixing::FixingConfig;
use orbifix::group::{SchreierSimsLimits, StabilizerMode};
use orbifix::preprocess::{preprocess, PreprocessConfig, Preprocessed, Symmetries};
use orbifix::proof::{compose_with_refutation, parse_proof, write_proof};
use orbifix::symmetry::{parse_generators, write_generators, DEFAULT_NODE_BUDGET};

const EXIT_REJECTED: u8 = 1;
const EXIT_ERROR: u8 = 2;
const EXIT_UNSAT: u8 = 20;

/// Static symmetry breaking for CNF by unit clauses, with checkable proofs.
#[derive(Parser)]
#[command(name = "orbifix", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Add symmetry-breaking units to a formula.
    Fix(FixArgs),
    /// Check a proof against a formula.
    Check(CheckArgs),
    /// Write a generated formula.
    Gen(GenArgs),
    /// Run the built-in evaluation suite.
    Bench(BenchArgs),
}

#[derive(Args)]
struct FixArgs {
    /// Input formula in DIMACS format.
    cnf: PathBuf,
    #[arg(long)]
    orbitopal: bool,
    #[arg(long)]
    negation: bool,
    #[arg(long)]
    clausal: bool,
    /// All three rules.
    #[arg(long)]
    all: bool,
    /// Generators in cycle notation, one per line, instead of the built-in
    /// search.
    #[arg(long, value_name = "FILE")]
    symmetries: Option<PathBuf>,
    /// Orbitope matrices to use instead of detection: one row per line,
    /// blank line between matrices.
    #[arg(long, value_name = "FILE")]
    orbitopes: Option<PathBuf>,
    /// Write the proof here.
    #[arg(long, value_name = "FILE")]
    proof: Option<PathBuf>,
    /// Write the fixed formula here instead of standard output.
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
    /// Print statistics as `c key value` lines.
    #[arg(long)]
    stats: bool,
    #[arg(long, default_value_t = DEFAULT_MAX_INPUT_BYTES)]
    max_input_bytes: usize,
    /// Schreier-Sims budget in transversal entries; 0 keeps only the
    /// generators that fix a literal instead of exact stabilizers.
    #[arg(long, value_name = "N")]
    ss_limit: Option<usize>,
    /// Refinement budget of the symmetry search.
    #[arg(long, default_value_t = DEFAULT_NODE_BUDGET)]
    node_budget: usize,
    /// Delete the binary clauses of clausal fixing from the proof's
    /// database once the unit is derived.
    #[arg(long)]
    delete_binaries: bool,
}

#[derive(Args)]
struct CheckArgs {
    cnf: PathBuf,
    proof: PathBuf,
    /// Propagate for every database clause in substitution steps.
    #[arg(long)]
    strict: bool,
    /// Append this witness-free clausal proof before checking.
    #[arg(long, value_name = "FILE")]
    compose: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_MAX_INPUT_BYTES)]
    max_input_bytes: usize,
}

#[derive(Args)]
struct GenArgs {
    #[command(subcommand)]
    family: Family,
    /// Write the formula here instead of standard output.
    #[arg(long, value_name = "FILE", global = true)]
    out: Option<PathBuf>,
    /// Also write the known symmetry generators.
    #[arg(long, value_name = "FILE", global = true)]
    symmetries: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Family {
    /// Pigeonhole formula.
    Php { pigeons: usize, holes: usize },
    /// Parity constraint x1 xor ... xor xn = charge.
    Parity {
        n: usize,
        #[arg(value_parser = clap::value_parser!(u8).range(0..=1))]
        charge: u8,
    },
}

#[derive(Args)]
struct BenchArgs {
    /// Also write the rows as CSV.
    #[arg(long, value_name = "FILE")]
    csv: Option<PathBuf>,
    /// Use the built-in symmetry search instead of the known generators.
    #[arg(long)]
    search: bool,
    /// Stabilizers by generator filtering instead of Schreier-Sims.
    #[arg(long)]
    filter: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Fix(a) => fix(a),
        Command::Check(a) => check(a),
        Command::Gen(a) => gen(a).map(|()| 0),
        Command::Bench(a) => bench(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_ERROR)
        }
    }
}

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn read_formula(path: &Path, max_bytes: usize) -> Result<Formula> {
    let bytes = fs::read(path).with_context(|| format!("cannot read {}", path.display()))?;
    parse_dimacs_with_limit(&bytes, max_bytes).with_context(|| format!("{}", path.display()))
}

fn write_output(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text).with_context(|| format!("cannot write {}", p.display())),
        None => {
            std::io::stdout().lock().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn fix(a: FixArgs) -> Result<u8> {
    let f = read_formula(&a.cnf, a.max_input_bytes)?;
    let symmetries = match &a.symmetries {
        Some(path) => {
            let gens = parse_generators(&read_text(path)?, &f).with_context(|| format!("{}", path.display()))?;
            Symmetries::Given(gens)
        }
        None => Symmetries::Search(a.node_budget),
    };
    let stabilizer = match a.ss_limit {
        Some(0) => StabilizerMode::Filter,
        Some(n) => StabilizerMode::Exact(SchreierSimsLimits {
            max_transversal_entries: n,
            ..SchreierSimsLimits::default()
        }),
        None => StabilizerMode::default(),
    };
    let fixing = FixingConfig {
        orbitopal: a.orbitopal || a.all,
        negation: a.negation || a.all,
        clausal: a.clausal || a.all,
        stabilizer,
    };
    let orbitope_hints = a.orbitopes.as_deref().map(read_text).transpose()?;
    let config = PreprocessConfig { fixing, symmetries, orbitope_hints, delete_binaries: a.delete_binaries };
    let out = preprocess(&f, &config)?;

    if let Some(path) = &a.proof {
        fs::write(path, write_proof(&out.proof)).with_context(|| format!("cannot write {}", path.display()))?;
    }
    // Stats always go to standard output, ahead of the formula if that
    // goes there too.
    if a.stats {
        write_output(None, &stats_lines(&f, &out))?;
    }
    write_output(a.out.as_deref(), &out.output_dimacs())?;
    Ok(if out.is_unsat() { EXIT_UNSAT } else { 0 })
}

fn stats_lines(f: &Formula, out: &Preprocessed) -> String {
    let s = &out.fixing.stats;
    let fmt_order = |o: Option<String>| o.unwrap_or_else(|| "unknown".into());
    let mut lines = vec![
        ("vars", f.num_vars().to_string()),
        ("clauses", f.num_clauses().to_string()),
        ("propagated_units", out.log.propagated_units().len().to_string()),
        ("removed_tautologies", out.log.removed_tautologies().to_string()),
        ("removed_duplicates", out.log.removed_duplicates().to_string()),
        ("ulcs", out.ulcs.to_string()),
        ("generators", out.generators.len().to_string()),
        ("dropped_generators", out.dropped_generators.to_string()),
        ("search_complete", out.search_complete.to_string()),
        ("group_order", fmt_order(s.group_order_before.as_ref().map(|o| o.to_string()))),
        ("group_order_after", fmt_order(s.group_order_after.as_ref().map(|o| o.to_string()))),
        ("exact_stabilizers", s.exact_stabilizers.to_string()),
        ("orbitopes", s.orbitopes.len().to_string()),
        ("skipped_orbitopes", s.skipped_orbitopes.to_string()),
        ("units_orbitopal", s.units_orbitopal.to_string()),
        ("units_negation", s.units_negation.to_string()),
        ("units_clausal", s.units_clausal.to_string()),
        ("contradictions", s.contradictions.to_string()),
        ("proof_steps", out.proof.len().to_string()),
        ("unsat", out.is_unsat().to_string()),
        ("time_simplify_ms", out.simplify_ms.to_string()),
        ("time_symmetry_ms", out.symmetry_ms.to_string()),
        ("time_fixing_ms", s.time_ms.to_string()),
    ];
    for (i, (rows, cols)) in s.orbitopes.iter().enumerate() {
        lines.push(("orbitope", format!("{} {rows}x{cols}", i + 1)));
    }
    lines.iter().map(|(k, v)| format!("c {k} {v}\n")).collect()
}

fn check(a: CheckArgs) -> Result<u8> {
    let f = read_formula(&a.cnf, a.max_input_bytes)?;
    let mut proof = read_text(&a.proof)?;
    if let Some(path) = &a.compose {
        let steps = parse_proof(&proof).with_context(|| format!("{}", a.proof.display()))?;
        let steps: Vec<_> = steps.into_iter().map(|(_, s)| s).collect();
        proof = compose_with_refutation(&steps, &read_text(path)?).with_context(|| format!("{}", path.display()))?;
    }
    let verdict = check_proof(&f, &proof, CheckOptions { strict: a.strict })
        .with_context(|| format!("{}", a.proof.display()))?;
    match &verdict.failure {
        None => {
            println!("c steps {}", verdict.steps_checked);
            if verdict.refutation {
                println!("c refutation");
            }
            println!("s VERIFIED");
            Ok(0)
        }
        Some(fail) => {
            let clause: Vec<String> = fail.clause.iter().map(|l| l.to_string()).collect();
            println!("c step {} clause [{}]: {}", fail.step + 1, clause.join(" "), fail.reason);
            println!("s REJECTED line {}", fail.line);
            Ok(EXIT_REJECTED)
        }
    }
}

fn gen(a: GenArgs) -> Result<()> {
    let inst: FamilyInstance = match a.family {
        Family::Php { pigeons, holes } => {
            if pigeons == 0 || holes == 0 {
                bail!("need at least one pigeon and one hole");
            }
            gen_php(pigeons, holes)
        }
        Family::Parity { n, charge } => gen_parity(n, charge == 1)?,
    };
    if let Some(path) = &a.symmetries {
        fs::write(path, write_generators(&inst.generators))
            .with_context(|| format!("cannot write {}", path.display()))?;
    }
    let text = format!("c {} {}\n{}", inst.family, inst.params, orbifix::cnf::write_dimacs(&inst.formula, &[]));
    write_output(a.out.as_deref(), &text)
}

fn bench(a: BenchArgs) -> Result<u8> {
    let mut config = SuiteConfig::standard();
    config.search = a.search;
    if a.filter {
        config.stabilizer = StabilizerMode::Filter;
    }
    let rows = run_suite(&config);
    print!("{}", write_table(&rows));
    if let Some(path) = &a.csv {
        let file = fs::File::create(path).with_context(|| format!("cannot write {}", path.display()))?;
        write_csv(&rows, file)?;
    }
    let failed = rows.iter().any(|r| !r.proof_ok || r.equisat_ok == Some(false));
    Ok(if failed { EXIT_REJECTED } else { 0 })
}
