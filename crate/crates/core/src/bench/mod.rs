//! Synthetic symmetric families, brute-force oracles and the evaluation
//! suite.

mod oracle;
mod suite;

use serde::Serialize;
use thiserror::Error;

use crate::cnf::{Formula, Lit, Var};
use crate::symmetry::LitPerm;

pub use oracle::{
    brute_force_model, brute_force_sat, brute_force_sat_with_limit, enumerate_symmetries, rup_refutation,
    BRUTE_FORCE_MAX_VARS,
};
pub use suite::{run_suite, write_csv, write_table, Setting, SuiteConfig, SuiteRow};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Status {
    Sat,
    Unsat,
    Unknown,
}

/// A generated formula with what is known about it.
#[derive(Clone, Debug)]
pub struct FamilyInstance {
    pub family: String,
    pub params: String,
    pub formula: Formula,
    pub status: Status,
    /// Symmetries of `formula`, each validated at generation time in tests.
    pub generators: Vec<LitPerm>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum BenchError {
    #[error("formula has {vars} variables; brute force is limited to {limit}")]
    TooManyVariables { vars: usize, limit: usize },
    #[error("parity constraints over more than 16 variables are not generated (got {0})")]
    ParityTooLarge(usize),
    #[error("invalid family parameters: {0}")]
    InvalidParameters(String),
}

/// Variable of pigeon `pigeon` in hole `hole` (both 1-based) for a formula
/// with `holes` holes: `(pigeon - 1) * holes + hole`.
pub fn php_var(holes: usize, hole: usize, pigeon: usize) -> Var {
    Var::from_dimacs(((pigeon - 1) * holes + hole) as u32)
}

/// Pigeonhole formula with `m` pigeons and `n` holes: one at-least-one
/// clause per pigeon, then the pairwise at-most-one clauses per hole.
///
/// Attached generators: swaps of adjacent holes, then swaps of adjacent
/// pigeons.
pub fn gen_php(m: usize, n: usize) -> FamilyInstance {
    assert!(m >= 1 && n >= 1, "need at least one pigeon and one hole");
    let mut f = Formula::new(m * n);
    for j in 1..=m {
        f.push_clause((1..=n).map(|i| php_var(n, i, j).positive()).collect());
    }
    for i in 1..=n {
        for j in 1..=m {
            for k in j + 1..=m {
                f.push_clause(vec![php_var(n, i, j).negative(), php_var(n, i, k).negative()]);
            }
        }
    }
    let mut generators = Vec::new();
    for i in 1..n {
        let pairs: Vec<(Lit, Lit)> = (1..=m)
            .flat_map(|j| {
                let (a, b) = (php_var(n, i, j).positive(), php_var(n, i + 1, j).positive());
                [(a, b), (b, a)]
            })
            .collect();
        generators.push(LitPerm::from_pairs(m * n, &pairs).expect("hole swap is a bijection"));
    }
    for j in 1..m {
        let pairs: Vec<(Lit, Lit)> = (1..=n)
            .flat_map(|i| {
                let (a, b) = (php_var(n, i, j).positive(), php_var(n, i, j + 1).positive());
                [(a, b), (b, a)]
            })
            .collect();
        generators.push(LitPerm::from_pairs(m * n, &pairs).expect("pigeon swap is a bijection"));
    }
    FamilyInstance {
        family: "php".into(),
        params: format!("m={m};n={n}"),
        formula: f,
        status: if m > n { Status::Unsat } else { Status::Sat },
        generators,
    }
}

/// CNF of `x1 xor ... xor xn = charge`: one clause excluding each
/// assignment of the wrong parity, enumerated with `x1` as the most
/// significant bit.
///
/// Attached generators: the double polarity flips `(x1 -x1)(xi -xi)` for
/// `i` in `2..=n`. Every generator moves `x1`.
pub fn gen_parity(n: usize, charge: bool) -> Result<FamilyInstance, BenchError> {
    if n == 0 {
        return Err(BenchError::InvalidParameters("parity needs at least one variable".into()));
    }
    if n > 16 {
        return Err(BenchError::ParityTooLarge(n));
    }
    let mut f = Formula::new(n);
    for k in 0u32..(1 << n) {
        let bit = |i: usize| (k >> (n - 1 - i)) & 1 == 1;
        if (k.count_ones() % 2 == 1) == charge {
            continue;
        }
        f.push_clause((0..n).map(|i| Var::from_index(i).lit(bit(i))).collect());
    }
    let x1 = Var::from_index(0);
    let generators = (1..n)
        .map(|i| {
            let xi = Var::from_index(i);
            LitPerm::from_pairs(n, &[(x1.positive(), x1.negative()), (xi.positive(), xi.negative())])
                .expect("double flip is a bijection")
        })
        .collect();
    Ok(FamilyInstance {
        family: "parity".into(),
        params: format!("n={n};charge={}", charge as u8),
        formula: f,
        status: Status::Sat,
        generators,
    })
}

/// `(x ∨ y ∨ z) ∧ (¬x ∨ ¬y) ∧ (¬x ∨ ¬z) ∧ (¬y ∨ ¬z)` with the rotation
/// and the swap of `x` and `y`, which generate all six symmetries.
pub fn exactly_one_of_three() -> FamilyInstance {
    let f = Formula::from_dimacs_clauses(3, &[&[1, 2, 3], &[-1, -2], &[-1, -3], &[-2, -3]]);
    let p = |pairs: &[(i32, i32)]| {
        let pairs: Vec<_> = pairs.iter().map(|&(a, b)| (Lit::from_dimacs(a), Lit::from_dimacs(b))).collect();
        LitPerm::from_pairs(3, &pairs).expect("valid permutation")
    };
    FamilyInstance {
        family: "exactly-one".into(),
        params: "n=3".into(),
        formula: f,
        status: Status::Sat,
        generators: vec![p(&[(1, 2), (2, 3), (3, 1)]), p(&[(1, 2), (2, 1)])],
    }
}

/// Small named instances: the three-variable exactly-one formula, a PHP
/// ladder and parity constraints of both charges.
pub fn named_fixtures() -> Vec<FamilyInstance> {
    let mut out = vec![exactly_one_of_three()];
    for (m, n) in [(1, 1), (2, 1), (2, 2), (3, 2), (3, 3), (4, 3), (5, 4)] {
        out.push(gen_php(m, n));
    }
    for n in 1..=6 {
        for charge in [false, true] {
            out.push(gen_parity(n, charge).expect("small parity"));
        }
    }
    out
}
