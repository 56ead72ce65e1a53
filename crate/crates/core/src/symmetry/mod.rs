//! Syntactic symmetries of formulas: literal permutations, the model graph,
//! a built-in automorphism search and the generator file format.

mod graph;
mod perm;
mod search;

use std::collections::HashMap;

use thiserror::Error;

use crate::cnf::{canonical_form, Formula, Lit};

pub use graph::{build_model_graph, ColoredGraph};
pub use perm::LitPerm;
pub use search::{find_automorphisms, AutomorphismSearch, DEFAULT_NODE_BUDGET};

/// True iff `sigma` maps the clause multiset of `f` onto itself and the
/// formula's units onto themselves.
///
/// Negation commutation and bijectivity hold by construction of
/// [`LitPerm`].
pub fn validate_symmetry(f: &Formula, sigma: &LitPerm) -> bool {
    let mut remaining = f.canonical_multiset();
    let mut image = Vec::new();
    for c in f.clauses() {
        image.clear();
        image.extend(c.canonical().iter().map(|&l| sigma.apply(l)));
        image.sort_unstable();
        match remaining.get_mut(image.as_slice()) {
            Some(n) if *n > 0 => *n -= 1,
            _ => return false,
        }
    }
    let units = canonical_form(f.units());
    let mut mapped: Vec<Lit> = units.iter().map(|&l| sigma.apply(l)).collect();
    mapped.sort_unstable();
    mapped == units
}

/// Runs the built-in search on the model graph of `f`.
pub fn detect_symmetries(f: &Formula, node_budget: usize) -> AutomorphismSearch {
    let g = build_model_graph(f);
    let search = find_automorphisms(&g, node_budget);
    debug_assert!(search.generators.iter().all(|s| validate_symmetry(f, s)));
    search
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("generator {index} (line {line}): {kind}")]
pub struct GeneratorError {
    /// 1-based position among the generator lines.
    pub index: usize,
    pub line: usize,
    pub kind: GeneratorErrorKind,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GeneratorErrorKind {
    #[error("syntax error: {0}")]
    Syntax(String),
    #[error("variable {0} is not in the formula's range")]
    VariableOutOfRange(u32),
    #[error("mapping is not a bijection on literals")]
    NotBijective,
    #[error("mapping does not commute with negation")]
    NotNegationCompatible,
    #[error("not a symmetry of the formula")]
    NotASymmetry,
}

/// Parses a generator file and validates every generator against `f`.
///
/// One permutation per line in cycle notation over signed variable
/// numbers, e.g. `(1 2 3)(-4 -5)`. Mapping a literal also maps its
/// negation; unlisted literals are fixed. Lines starting with `c` are
/// comments.
pub fn parse_generators(text: &str, f: &Formula) -> Result<Vec<LitPerm>, GeneratorError> {
    let mut out = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('c') {
            continue;
        }
        let index = out.len() + 1;
        let fail = |kind| GeneratorError { index, line: idx + 1, kind };
        let cycles = parse_cycles(line).map_err(|m| fail(GeneratorErrorKind::Syntax(m)))?;
        let sigma = perm_from_cycles(&cycles, f.num_vars()).map_err(fail)?;
        if !validate_symmetry(f, &sigma) {
            return Err(fail(GeneratorErrorKind::NotASymmetry));
        }
        out.push(sigma);
    }
    Ok(out)
}

/// One generator per line, in the format read by [`parse_generators`].
pub fn write_generators(gens: &[LitPerm]) -> String {
    gens.iter().map(|g| format!("{}\n", g)).collect()
}

fn parse_cycles(line: &str) -> Result<Vec<Vec<i32>>, String> {
    let normalized = line.replace('\u{2212}', "-");
    let mut cycles = Vec::new();
    let mut rest = normalized.trim();
    while !rest.is_empty() {
        let body = rest.strip_prefix('(').ok_or_else(|| format!("expected `(` at `{rest}`"))?;
        let close = body.find(')').ok_or("unclosed cycle")?;
        let cycle = body[..close]
            .split(|c: char| c.is_whitespace() || c == ',')
            .filter(|t| !t.is_empty())
            .map(|t| match t.parse::<i32>() {
                Ok(0) => Err("0 is not a literal".to_string()),
                Ok(n) => Ok(n),
                Err(_) => Err(format!("`{t}` is not an integer")),
            })
            .collect::<Result<Vec<_>, _>>()?;
        cycles.push(cycle);
        rest = body[close + 1..].trim_start();
    }
    Ok(cycles)
}

fn perm_from_cycles(cycles: &[Vec<i32>], num_vars: usize) -> Result<LitPerm, GeneratorErrorKind> {
    let mut explicit: HashMap<Lit, Lit> = HashMap::new();
    for cycle in cycles {
        for (i, &a) in cycle.iter().enumerate() {
            let b = cycle[(i + 1) % cycle.len()];
            for n in [a, b] {
                if n.unsigned_abs() as usize > num_vars {
                    return Err(GeneratorErrorKind::VariableOutOfRange(n.unsigned_abs()));
                }
            }
            if explicit.insert(Lit::from_dimacs(a), Lit::from_dimacs(b)).is_some() {
                return Err(GeneratorErrorKind::NotBijective);
            }
        }
    }
    for (&a, &b) in &explicit {
        if let Some(&nb) = explicit.get(&!a) {
            if nb != !b {
                return Err(GeneratorErrorKind::NotNegationCompatible);
            }
        }
    }
    let mut pairs: Vec<(Lit, Lit)> = explicit.into_iter().collect();
    pairs.sort_unstable();
    LitPerm::from_pairs(num_vars, &pairs).ok_or(GeneratorErrorKind::NotBijective)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn example1() -> Formula {
        Formula::from_dimacs_clauses(3, &[&[1, 2, 3], &[-1, -2], &[-1, -3], &[-2, -3]])
    }

    fn xor2() -> Formula {
        Formula::from_dimacs_clauses(2, &[&[1, 2], &[-1, -2]])
    }

    #[test]
    fn example1_rotation() {
        let f = example1();
        let gens = parse_generators("c rotation\n(1 2 3)\n", &f).unwrap();
        assert_eq!(gens.len(), 1);
        let s = &gens[0];
        assert_eq!(s.apply(Lit::from_dimacs(1)), Lit::from_dimacs(2));
        assert_eq!(s.apply(Lit::from_dimacs(2)), Lit::from_dimacs(3));
        assert_eq!(s.apply(Lit::from_dimacs(3)), Lit::from_dimacs(1));
        assert!(validate_symmetry(&f, s));
    }

    #[test]
    fn swaps_and_polarity() {
        assert!(parse_generators("(1 2)\n", &example1()).is_ok());
        let g = parse_generators("(1 \u{2212}1)(2 -2)\n", &xor2()).unwrap();
        assert_eq!(g[0].to_string(), "(1 -1)(2 -2)");
        // A lone polarity swap of x breaks (x ∨ y).
        let e = parse_generators("(1 -1)\n", &xor2()).unwrap_err();
        assert_eq!(e.kind, GeneratorErrorKind::NotASymmetry);
    }

    #[test]
    fn validate_cases() {
        let f = example1();
        assert!(validate_symmetry(&f, &LitPerm::identity(3)));
        let rot = LitPerm::from_pairs(
            3,
            &[
                (Lit::from_dimacs(1), Lit::from_dimacs(2)),
                (Lit::from_dimacs(2), Lit::from_dimacs(3)),
                (Lit::from_dimacs(3), Lit::from_dimacs(1)),
            ],
        )
        .unwrap();
        assert!(validate_symmetry(&f, &rot));
        let flip = LitPerm::from_pairs(3, &[(Lit::from_dimacs(1), Lit::from_dimacs(-1))]).unwrap();
        assert!(!validate_symmetry(&f, &flip));
        // Units must be preserved too.
        let with_unit = f.with_units(&[Lit::from_dimacs(1)]);
        assert!(!validate_symmetry(&with_unit, &rot));
    }

    #[test]
    fn generator_errors_carry_index() {
        let f = example1();
        let e = parse_generators("(1 2)\n(1 2)(1 3)\n", &f).unwrap_err();
        assert_eq!((e.index, e.line, e.kind), (2, 2, GeneratorErrorKind::NotBijective));
        let e = parse_generators("(1 2)(-1 -3)\n", &f).unwrap_err();
        assert_eq!(e.kind, GeneratorErrorKind::NotNegationCompatible);
        let e = parse_generators("(1 4)\n", &f).unwrap_err();
        assert_eq!(e.kind, GeneratorErrorKind::VariableOutOfRange(4));
        assert!(matches!(parse_generators("1 2\n", &f).unwrap_err().kind, GeneratorErrorKind::Syntax(_)));
        // x ↦ y without y ↦ x: not a bijection.
        assert!(matches!(parse_generators("(1 2)(2 2)\n", &f).unwrap_err().kind, GeneratorErrorKind::NotBijective));
    }

    #[test]
    fn write_then_parse() {
        let f = example1();
        let gens = parse_generators("(1 2 3)\n(1 2)\n", &f).unwrap();
        assert_eq!(parse_generators(&write_generators(&gens), &f).unwrap(), gens);
    }
}
