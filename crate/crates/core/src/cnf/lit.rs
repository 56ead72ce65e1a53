use std::fmt;
use std::ops::Not;

/// A propositional variable. Stored 0-based; DIMACS index is `index + 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Var(u32);

impl Var {
    /// Variable from its 0-based index.
    pub const fn from_index(index: usize) -> Var {
        Var(index as u32)
    }

    /// Variable from its DIMACS number (1-based).
    ///
    /// Panics if `n == 0`.
    pub fn from_dimacs(n: u32) -> Var {
        assert!(n > 0, "DIMACS variable numbers start at 1");
        Var(n - 1)
    }

    pub const fn index(self) -> usize {
        self.0 as usize
    }

    pub const fn dimacs(self) -> u32 {
        self.0 + 1
    }

    pub const fn positive(self) -> Lit {
        Lit(self.0 << 1)
    }

    pub const fn negative(self) -> Lit {
        Lit((self.0 << 1) | 1)
    }

    pub const fn lit(self, negated: bool) -> Lit {
        Lit((self.0 << 1) | negated as u32)
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.dimacs())
    }
}

/// A literal, densely encoded as `2 * var + negated`.
///
/// The encoding is internal; everything that leaves the crate goes through
/// [`Lit::to_dimacs`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Lit(u32);

impl Lit {
    /// Literal from a non-zero DIMACS integer.
    ///
    /// Panics on `0`, which DIMACS reserves as the clause terminator.
    pub fn from_dimacs(n: i32) -> Lit {
        assert!(n != 0, "0 is a terminator, not a literal");
        Var::from_dimacs(n.unsigned_abs()).lit(n < 0)
    }

    /// Literal from its dense code (`2 * var + negated`).
    pub const fn from_code(code: usize) -> Lit {
        Lit(code as u32)
    }

    pub const fn code(self) -> usize {
        self.0 as usize
    }

    pub const fn var(self) -> Var {
        Var(self.0 >> 1)
    }

    pub const fn is_negative(self) -> bool {
        self.0 & 1 == 1
    }

    pub const fn is_positive(self) -> bool {
        self.0 & 1 == 0
    }

    pub fn to_dimacs(self) -> i32 {
        let v = self.var().dimacs() as i32;
        if self.is_negative() {
            -v
        } else {
            v
        }
    }
}

impl Not for Lit {
    type Output = Lit;

    fn not(self) -> Lit {
        Lit(self.0 ^ 1)
    }
}

impl fmt::Display for Lit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_dimacs())
    }
}

/// Shorthand used throughout the tests: literals from DIMACS integers.
pub fn lits(ints: &[i32]) -> Vec<Lit> {
    ints.iter().map(|&n| Lit::from_dimacs(n)).collect()
}
