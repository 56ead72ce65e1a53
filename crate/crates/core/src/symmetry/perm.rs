use std::fmt;

use crate::cnf::{Lit, Var};

/// A permutation of literals that commutes with negation.
///
/// Only the images of positive literals are stored; `σ(¬x) = ¬σ(x)` holds
/// by construction. Variables beyond the stored range are fixed.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct LitPerm {
    images: Vec<Lit>,
}

impl LitPerm {
    pub fn identity(num_vars: usize) -> LitPerm {
        LitPerm { images: (0..num_vars).map(|v| Var::from_index(v).positive()).collect() }
    }

    /// Builds a permutation from the images of the positive literals.
    /// Returns `None` unless the images hit every variable exactly once.
    pub fn from_images(images: Vec<Lit>) -> Option<LitPerm> {
        let mut hit = vec![false; images.len()];
        for l in &images {
            let v = l.var().index();
            if v >= hit.len() || hit[v] {
                return None;
            }
            hit[v] = true;
        }
        Some(LitPerm { images })
    }

    /// Builds a permutation from explicit `(literal, image)` pairs; negations
    /// are implied and everything unlisted is fixed. Returns `None` on
    /// inconsistent or non-bijective input.
    pub fn from_pairs(num_vars: usize, pairs: &[(Lit, Lit)]) -> Option<LitPerm> {
        let n =
            pairs.iter().flat_map(|(a, b)| [a.var().index() + 1, b.var().index() + 1]).max().unwrap_or(0).max(num_vars);
        let mut img: Vec<Option<Lit>> = vec![None; n];
        for &(a, b) in pairs {
            let (a, b) = if a.is_positive() { (a, b) } else { (!a, !b) };
            match img[a.var().index()] {
                Some(prev) if prev != b => return None,
                _ => img[a.var().index()] = Some(b),
            }
        }
        let images =
            img.into_iter().enumerate().map(|(v, i)| i.unwrap_or_else(|| Var::from_index(v).positive())).collect();
        LitPerm::from_images(images)
    }

    /// Number of variables in the stored range.
    pub fn degree(&self) -> usize {
        self.images.len()
    }

    #[inline]
    pub fn apply(&self, lit: Lit) -> Lit {
        match self.images.get(lit.var().index()) {
            Some(&img) => {
                if lit.is_negative() {
                    !img
                } else {
                    img
                }
            }
            None => lit,
        }
    }

    /// Image of the point with literal code `code`.
    #[inline]
    pub fn apply_code(&self, code: usize) -> usize {
        self.apply(Lit::from_code(code)).code()
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(v, l)| l.var().index() == v && l.is_positive())
    }

    pub fn fixes(&self, lit: Lit) -> bool {
        self.apply(lit) == lit
    }

    /// Variables whose positive literal is moved.
    pub fn support(&self) -> impl Iterator<Item = Var> + '_ {
        self.images
            .iter()
            .enumerate()
            .filter(|(v, l)| l.var().index() != *v || l.is_negative())
            .map(|(v, _)| Var::from_index(v))
    }

    /// `self` followed by `next`: `x ↦ next(self(x))`.
    pub fn then(&self, next: &LitPerm) -> LitPerm {
        let n = self.degree().max(next.degree());
        let images = (0..n).map(|v| next.apply(self.apply(Var::from_index(v).positive()))).collect();
        LitPerm { images }
    }

    pub fn inverse(&self) -> LitPerm {
        let mut images = (0..self.degree()).map(|v| Var::from_index(v).positive()).collect::<Vec<_>>();
        for (v, &img) in self.images.iter().enumerate() {
            let src = Var::from_index(v).positive();
            // σ(v) = img  ⇒  σ⁻¹(var(img)) = v with the matching polarity.
            images[img.var().index()] = if img.is_negative() { !src } else { src };
        }
        LitPerm { images }
    }

    pub fn is_involution(&self) -> bool {
        self.images.iter().enumerate().all(|(v, _)| {
            let x = Var::from_index(v).positive();
            self.apply(self.apply(x)) == x
        })
    }

    /// Disjoint cycles over literals, each reported once. A cycle and its
    /// negated twin are listed only through the member first reached in
    /// literal order.
    pub fn cycles(&self) -> Vec<Vec<Lit>> {
        let mut seen = vec![false; 2 * self.degree()];
        let mut out = Vec::new();
        for code in 0..2 * self.degree() {
            if seen[code] {
                continue;
            }
            let start = Lit::from_code(code);
            if self.apply(start) == start {
                continue;
            }
            let mut cycle = vec![start];
            let mut cur = self.apply(start);
            while cur != start {
                cycle.push(cur);
                cur = self.apply(cur);
            }
            for &l in &cycle {
                seen[l.code()] = true;
                seen[(!l).code()] = true;
            }
            out.push(cycle);
        }
        out
    }
}

impl fmt::Display for LitPerm {
    /// Cycle notation over signed DIMACS integers; identity prints as `()`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cycles = self.cycles();
        if cycles.is_empty() {
            return write!(f, "()");
        }
        for c in cycles {
            write!(f, "(")?;
            for (i, l) in c.iter().enumerate() {
                if i > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{}", l)?;
            }
            write!(f, ")")?;
        }
        Ok(())
    }
}

impl fmt::Debug for LitPerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LitPerm{}", self)
    }
}
