//! Proof logs: substitution witnesses, proof steps, the text format, and
//! emission of steps for simplification and the fixing rules.

mod emit;

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};

use thiserror::Error;

use crate::cnf::{Lit, Var};
use crate::symmetry::LitPerm;

pub use emit::{
    compose_with_refutation, emit_clausal_steps, emit_fixing_steps, emit_negation_steps, emit_orbitopal_steps,
    simplification_steps,
};

/// Image of a variable under a substitution.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Image {
    True,
    False,
    Lit(Lit),
}

impl Image {
    fn negate(self) -> Image {
        match self {
            Image::True => Image::False,
            Image::False => Image::True,
            Image::Lit(l) => Image::Lit(!l),
        }
    }
}

/// Partial map from variables to literals or truth values; identity on
/// unbound variables. The image of `¬v` is the complement of the image of
/// `v`, so polarity is respected by construction.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Substitution {
    map: BTreeMap<Var, Image>,
}

impl Substitution {
    pub fn identity() -> Substitution {
        Substitution::default()
    }

    /// Binds every variable moved by `sigma` to its image.
    pub fn from_perm(sigma: &LitPerm) -> Substitution {
        let map = sigma.support().map(|v| (v, Image::Lit(sigma.apply(v.positive())))).collect();
        Substitution { map }
    }

    pub fn bind(&mut self, var: Var, image: Image) {
        if image == Image::Lit(var.positive()) {
            self.map.remove(&var);
        } else {
            self.map.insert(var, image);
        }
    }

    /// Makes the substitution send `lit` to `value`.
    pub fn set_literal(&mut self, lit: Lit, value: bool) {
        let image = if value == lit.is_positive() { Image::True } else { Image::False };
        self.bind(lit.var(), image);
    }

    pub fn apply(&self, lit: Lit) -> Image {
        match self.map.get(&lit.var()) {
            None => Image::Lit(lit),
            Some(&img) => {
                if lit.is_negative() {
                    img.negate()
                } else {
                    img
                }
            }
        }
    }

    pub fn bindings(&self) -> impl Iterator<Item = (Var, Image)> + '_ {
        self.map.iter().map(|(&v, &i)| (v, i))
    }

    pub fn is_identity(&self) -> bool {
        self.map.is_empty()
    }

    /// Literals sent to TRUE, by variable.
    pub fn true_literals(&self) -> Vec<Lit> {
        self.bindings()
            .filter_map(|(v, i)| match i {
                Image::True => Some(v.positive()),
                Image::False => Some(v.negative()),
                Image::Lit(_) => None,
            })
            .collect()
    }

    /// Variable-to-literal bindings, by variable.
    pub fn literal_bindings(&self) -> Vec<(Var, Lit)> {
        self.bindings()
            .filter_map(|(v, i)| match i {
                Image::Lit(l) => Some((v, l)),
                _ => None,
            })
            .collect()
    }

    /// Variables bound to something other than themselves.
    pub fn domain(&self) -> impl Iterator<Item = Var> + '_ {
        self.map.keys().copied()
    }
}

impl fmt::Display for Substitution {
    /// The `t ... 0 m ... 0` witness part of an SR line.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "t")?;
        for l in self.true_literals() {
            write!(f, " {l}")?;
        }
        write!(f, " 0 m")?;
        for (v, l) in self.literal_bindings() {
            write!(f, " {v} {l}")?;
        }
        write!(f, " 0")
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ProofStep {
    /// Clause implied by unit propagation.
    Rup(Vec<Lit>),
    /// Substitution-redundant clause with its witness.
    Sr {
        clause: Vec<Lit>,
        witness: Substitution,
    },
    Delete(Vec<Lit>),
}

impl ProofStep {
    pub fn clause(&self) -> &[Lit] {
        match self {
            ProofStep::Rup(c) | ProofStep::Delete(c) | ProofStep::Sr { clause: c, .. } => c,
        }
    }
}

impl fmt::Display for ProofStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let lits = |f: &mut fmt::Formatter<'_>, c: &[Lit]| -> fmt::Result {
            for l in c {
                write!(f, "{l} ")?;
            }
            write!(f, "0")
        };
        match self {
            ProofStep::Rup(c) => lits(f, c),
            ProofStep::Delete(c) => {
                write!(f, "d ")?;
                lits(f, c)
            }
            ProofStep::Sr { clause, witness } => {
                lits(f, clause)?;
                write!(f, " {witness}")
            }
        }
    }
}

/// One step per line.
pub fn write_proof(steps: &[ProofStep]) -> String {
    let mut out = String::new();
    for s in steps {
        let _ = writeln!(out, "{s}");
    }
    out
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("proof line {line}: {message}")]
pub struct ProofParseError {
    pub line: usize,
    pub message: String,
}

/// Parses a proof, returning each step with its 1-based line number.
pub fn parse_proof(text: &str) -> Result<Vec<(usize, ProofStep)>, ProofParseError> {
    let mut out = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('c') {
            continue;
        }
        let step = parse_step(line).map_err(|message| ProofParseError { line: idx + 1, message })?;
        out.push((idx + 1, step));
    }
    Ok(out)
}

fn parse_step(line: &str) -> Result<ProofStep, String> {
    let mut tokens = line.split_whitespace().peekable();
    let delete = tokens.peek() == Some(&"d");
    if delete {
        tokens.next();
    }
    let clause = read_lits(&mut tokens)?;
    match tokens.next() {
        None if delete => Ok(ProofStep::Delete(clause)),
        None => Ok(ProofStep::Rup(clause)),
        Some("t") if !delete => {
            let mut witness = Substitution::identity();
            for l in read_lits(&mut tokens)? {
                if witness.map.contains_key(&l.var()) {
                    return Err(format!("variable {} bound twice", l.var()));
                }
                witness.set_literal(l, true);
            }
            if tokens.next() != Some("m") {
                return Err("expected `m` block".into());
            }
            loop {
                let Some(v) = tokens.next() else {
                    return Err("unterminated `m` block".into());
                };
                let v: i64 = v.parse().map_err(|_| format!("`{v}` is not an integer"))?;
                if v == 0 {
                    break;
                }
                if v < 0 || v > i32::MAX as i64 {
                    return Err(format!("`{v}` is not a variable"));
                }
                let var = Var::from_dimacs(v as u32);
                let img = read_lit(tokens.next().ok_or("binding without image")?)?;
                if witness.map.contains_key(&var) {
                    return Err(format!("variable {var} bound twice"));
                }
                witness.bind(var, Image::Lit(img));
            }
            if let Some(t) = tokens.next() {
                return Err(format!("unexpected `{t}` after witness"));
            }
            Ok(ProofStep::Sr { clause, witness })
        }
        Some(t) => Err(format!("unexpected `{t}` after clause")),
    }
}

fn read_lit(token: &str) -> Result<Lit, String> {
    match token.parse::<i32>() {
        Ok(0) => Err("0 is not a literal".into()),
        Ok(n) if n != i32::MIN => Ok(Lit::from_dimacs(n)),
        _ => Err(format!("`{token}` is not a literal")),
    }
}

/// Literals up to and including the terminating 0.
fn read_lits<'a>(tokens: &mut impl Iterator<Item = &'a str>) -> Result<Vec<Lit>, String> {
    let mut out = Vec::new();
    loop {
        match tokens.next() {
            None => return Err("missing terminating 0".into()),
            Some("0") => return Ok(out),
            Some(t) => out.push(read_lit(t)?),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cnf::lits;

    #[test]
    fn substitution_respects_polarity() {
        let sigma = LitPerm::from_pairs(
            3,
            &[(Lit::from_dimacs(1), Lit::from_dimacs(-2)), (Lit::from_dimacs(2), Lit::from_dimacs(1))],
        )
        .unwrap();
        let mut w = Substitution::from_perm(&sigma);
        assert_eq!(w.apply(Lit::from_dimacs(-1)), Image::Lit(Lit::from_dimacs(2)));
        w.set_literal(Lit::from_dimacs(-3), false);
        assert_eq!(w.apply(Lit::from_dimacs(3)), Image::True);
        assert_eq!(w.apply(Lit::from_dimacs(-3)), Image::False);
        assert_eq!(w.true_literals(), lits(&[3]));
        assert_eq!(w.to_string(), "t 3 0 m 1 -2 2 1 0");
    }

    #[test]
    fn step_round_trip() {
        let mut w = Substitution::identity();
        w.set_literal(Lit::from_dimacs(1), false);
        w.set_literal(Lit::from_dimacs(2), true);
        w.bind(Var::from_dimacs(3), Image::Lit(Lit::from_dimacs(4)));
        w.bind(Var::from_dimacs(4), Image::Lit(Lit::from_dimacs(3)));
        let steps = vec![
            ProofStep::Sr { clause: lits(&[-1]), witness: w },
            ProofStep::Rup(lits(&[4, -2])),
            ProofStep::Delete(lits(&[1, 2])),
            ProofStep::Rup(vec![]),
            ProofStep::Sr { clause: lits(&[5]), witness: Substitution::identity() },
        ];
        let text = write_proof(&steps);
        assert_eq!(text, "-1 0 t -1 2 0 m 3 4 4 3 0\n4 -2 0\nd 1 2 0\n0\n5 0 t 0 m 0\n");
        let parsed: Vec<ProofStep> = parse_proof(&text).unwrap().into_iter().map(|(_, s)| s).collect();
        assert_eq!(parsed, steps);
    }

    #[test]
    fn parse_errors_carry_lines() {
        let e = parse_proof("c ok\n1 2 0\n1 x 0\n").unwrap_err();
        assert_eq!(e.line, 3);
        assert!(parse_proof("1 2\n").is_err());
        assert!(parse_proof("1 0 t 0\n").is_err());
        assert!(parse_proof("1 0 t 0 m 2 0\n").is_err());
        assert!(parse_proof("1 0 t 1 0 m 1 2 0\n").is_err());
        assert!(parse_proof("d 1 0 t 0 m 0\n").is_err());
        assert!(parse_proof("1 0 t 0 m 0 5\n").is_err());
    }
}
