use thiserror::Error;

use super::{Formula, Lit};

/// Inputs above this many bytes are rejected unless a larger limit is given.
pub const DEFAULT_MAX_INPUT_BYTES: usize = 1 << 30;

#[derive(Debug, Error, PartialEq, Eq)]
#[error("line {line}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseErrorKind {
    #[error("input is {size} bytes, above the limit of {limit} bytes")]
    TooLarge { size: usize, limit: usize },
    #[error("missing `p cnf` header")]
    MissingHeader,
    #[error("malformed header `{0}`")]
    MalformedHeader(String),
    #[error("second header line")]
    DuplicateHeader,
    #[error("`{0}` is not an integer")]
    NotAnInteger(String),
    #[error("variable {var} exceeds declared count {declared}")]
    VariableOutOfRange { var: u64, declared: usize },
    #[error("last clause is missing its terminating 0")]
    MissingTerminator,
    #[error("header declares {declared} clauses but {found} were read")]
    ClauseCountMismatch { declared: usize, found: usize },
}

fn err(line: usize, kind: ParseErrorKind) -> ParseError {
    ParseError { line, kind }
}

/// Parses DIMACS CNF with the default size cap.
pub fn parse_dimacs(input: &[u8]) -> Result<Formula, ParseError> {
    parse_dimacs_with_limit(input, DEFAULT_MAX_INPUT_BYTES)
}

/// Parses DIMACS CNF, rejecting inputs longer than `max_bytes`.
///
/// Clauses may span lines. Lines starting with `c` are comments; a line
/// starting with `%` ends the input (SATLIB convention).
pub fn parse_dimacs_with_limit(input: &[u8], max_bytes: usize) -> Result<Formula, ParseError> {
    if input.len() > max_bytes {
        return Err(err(0, ParseErrorKind::TooLarge { size: input.len(), limit: max_bytes }));
    }
    let text = String::from_utf8_lossy(input);
    let mut header: Option<(usize, usize)> = None;
    let mut formula = Formula::new(0);
    let mut current: Vec<Lit> = Vec::new();
    let mut last_line = 0;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        last_line = line_no;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('c') {
            continue;
        }
        if line.starts_with('%') {
            break;
        }
        if line.starts_with('p') {
            if header.is_some() {
                return Err(err(line_no, ParseErrorKind::DuplicateHeader));
            }
            let parts: Vec<&str> = line.split_whitespace().collect();
            let parsed = match parts.as_slice() {
                ["p", "cnf", v, c] => v.parse::<usize>().ok().zip(c.parse::<usize>().ok()),
                _ => None,
            };
            let (v, c) = parsed.ok_or_else(|| err(line_no, ParseErrorKind::MalformedHeader(line.to_string())))?;
            formula = Formula::new(v);
            header = Some((v, c));
            continue;
        }
        let (declared_vars, _) = header.ok_or_else(|| err(line_no, ParseErrorKind::MissingHeader))?;
        for tok in line.split_whitespace() {
            let n: i64 = tok.parse().map_err(|_| err(line_no, ParseErrorKind::NotAnInteger(tok.to_string())))?;
            if n == 0 {
                formula.push_clause(std::mem::take(&mut current));
                continue;
            }
            let var = n.unsigned_abs();
            if var > declared_vars as u64 {
                return Err(err(line_no, ParseErrorKind::VariableOutOfRange { var, declared: declared_vars }));
            }
            current.push(Lit::from_dimacs(n as i32));
        }
    }

    let (_, declared_clauses) = header.ok_or_else(|| err(last_line.max(1), ParseErrorKind::MissingHeader))?;
    if !current.is_empty() {
        return Err(err(last_line, ParseErrorKind::MissingTerminator));
    }
    if formula.num_clauses() != declared_clauses {
        return Err(err(
            last_line,
            ParseErrorKind::ClauseCountMismatch { declared: declared_clauses, found: formula.num_clauses() },
        ));
    }
    Ok(formula)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cnf::{lits, write_dimacs};
    use proptest::prelude::*;

    #[test]
    fn parses_example1() {
        let f = parse_dimacs(b"c example\np cnf 3 4\n1 2 3 0\n-1 -2 0\n-1 -3 0\n-2 -3 0\n").unwrap();
        assert_eq!(f.num_vars(), 3);
        assert_eq!(f.num_clauses(), 4);
        assert_eq!(f.clause(0).lits(), lits(&[1, 2, 3]).as_slice());
        assert_eq!(f.clause(3).lits(), lits(&[-2, -3]).as_slice());
    }

    #[test]
    fn empty_formula() {
        let f = parse_dimacs(b"p cnf 0 0\n").unwrap();
        assert_eq!(f.num_clauses(), 0);
        assert_eq!(f.num_vars(), 0);
    }

    #[test]
    fn variable_out_of_range() {
        let e = parse_dimacs(b"p cnf 2 1\n1 -3 0").unwrap_err();
        assert_eq!(e, err(2, ParseErrorKind::VariableOutOfRange { var: 3, declared: 2 }));
    }

    #[test]
    fn error_paths() {
        assert_eq!(parse_dimacs(b"1 2 0\n").unwrap_err().kind, ParseErrorKind::MissingHeader);
        assert!(matches!(parse_dimacs(b"p cnf x 1\n").unwrap_err().kind, ParseErrorKind::MalformedHeader(_)));
        assert_eq!(parse_dimacs(b"p cnf 2 1\n1 2\n").unwrap_err().kind, ParseErrorKind::MissingTerminator);
        let e = parse_dimacs(b"p cnf 2 1\n1\n2 a 0\n").unwrap_err();
        assert_eq!(e, err(3, ParseErrorKind::NotAnInteger("a".into())));
        assert!(matches!(
            parse_dimacs(b"p cnf 2 2\n1 2 0\n").unwrap_err().kind,
            ParseErrorKind::ClauseCountMismatch { declared: 2, found: 1 }
        ));
        assert!(matches!(
            parse_dimacs_with_limit(b"p cnf 0 0\n", 4).unwrap_err().kind,
            ParseErrorKind::TooLarge { .. }
        ));
    }

    #[test]
    fn clauses_may_span_lines() {
        let f = parse_dimacs(b"p cnf 3 2\n1 2\n3 0 -1\n0\n%\n0\n").unwrap();
        assert_eq!(f.clause(0).lits(), lits(&[1, 2, 3]).as_slice());
        assert_eq!(f.clause(1).lits(), lits(&[-1]).as_slice());
    }

    fn arb_formula() -> impl Strategy<Value = (usize, Vec<Vec<i32>>)> {
        (1usize..8).prop_flat_map(|n| {
            let lit = (1..=n as i32, any::<bool>()).prop_map(|(v, s)| if s { -v } else { v });
            (Just(n), prop::collection::vec(prop::collection::vec(lit, 0..5), 0..10))
        })
    }

    proptest! {
        #[test]
        fn write_then_parse_is_identity((n, clauses) in arb_formula()) {
            let refs: Vec<&[i32]> = clauses.iter().map(|c| c.as_slice()).collect();
            let f = Formula::from_dimacs_clauses(n, &refs);
            let text = write_dimacs(&f, &[]);
            let g = parse_dimacs(text.as_bytes()).unwrap();
            prop_assert_eq!(g, f);
        }
    }
}
