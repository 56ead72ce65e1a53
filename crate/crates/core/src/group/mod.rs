//! Permutation groups of literals given by generators: orbits with
//! Schreier vectors, Schreier-Sims and pointwise stabilizers.

mod orbits;
mod schreier_sims;

use num_bigint::BigUint;

use crate::cnf::Lit;
use crate::symmetry::LitPerm;

pub use orbits::{orbit_of, witness_mapping, NotInOrbit, Orbit, OrbitTable};
pub use schreier_sims::{Bsgs, BudgetExceeded, SchreierSimsLimits};

/// How stabilizers are computed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StabilizerMode {
    /// Exact stabilizers from a base and strong generating set, falling back
    /// to generator filtering when the limits are exceeded.
    Exact(SchreierSimsLimits),
    /// Keep only the generators that fix the literals. The result generates
    /// a subgroup of the true stabilizer.
    Filter,
}

impl Default for StabilizerMode {
    fn default() -> Self {
        StabilizerMode::Exact(SchreierSimsLimits::default())
    }
}

/// A symmetry group as the fixing rules see it: generators plus, when
/// affordable, a base and strong generating set.
#[derive(Clone, Debug)]
pub struct GroupState {
    generators: Vec<LitPerm>,
    bsgs: Option<Bsgs>,
    mode: StabilizerMode,
    degree: usize,
    fallbacks: usize,
}

impl GroupState {
    pub fn new(generators: Vec<LitPerm>, degree: usize, mode: StabilizerMode) -> GroupState {
        let generators: Vec<LitPerm> = generators.into_iter().filter(|g| !g.is_identity()).collect();
        let degree = generators.iter().map(|g| g.degree()).max().unwrap_or(0).max(degree);
        let (bsgs, fallbacks) = match mode {
            StabilizerMode::Exact(limits) => match Bsgs::build(&generators, degree, &[], limits) {
                Ok(b) => (Some(b), 0),
                Err(BudgetExceeded) => (None, 1),
            },
            StabilizerMode::Filter => (None, 0),
        };
        GroupState { generators, bsgs, mode, degree, fallbacks }
    }

    pub fn generators(&self) -> &[LitPerm] {
        &self.generators
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn bsgs(&self) -> Option<&Bsgs> {
        self.bsgs.as_ref()
    }

    /// True while stabilizers are exact.
    pub fn is_exact(&self) -> bool {
        self.bsgs.is_some()
    }

    /// Number of times the Schreier-Sims limits forced generator filtering.
    pub fn fallbacks(&self) -> usize {
        self.fallbacks
    }

    /// Group order, when a base and strong generating set is available.
    pub fn order(&self) -> Option<BigUint> {
        self.bsgs.as_ref().map(Bsgs::order)
    }

    pub fn is_trivial(&self) -> bool {
        self.generators.is_empty()
    }

    pub fn orbits(&self) -> OrbitTable {
        OrbitTable::new(&self.generators, self.degree)
    }

    /// Replaces the group by the pointwise stabilizer of `fixed`.
    pub fn stabilize(&mut self, fixed: &[Lit]) {
        if fixed.is_empty() {
            return;
        }
        if let (Some(bsgs), StabilizerMode::Exact(limits)) = (&self.bsgs, self.mode) {
            match bsgs.stabilizer_chain(fixed, limits) {
                Ok(chain) => {
                    self.generators = chain.strong_generators().to_vec();
                    self.bsgs = Some(chain);
                    return;
                }
                Err(BudgetExceeded) => {
                    self.fallbacks += 1;
                    self.bsgs = None;
                }
            }
        }
        self.generators = generator_filter_stabilizer(&self.generators, fixed);
    }
}

/// Generators of the pointwise stabilizer of `fixed`: exact when `state`
/// has a base and strong generating set within its limits, otherwise the
/// generator filter.
pub fn pointwise_stabilizer(state: &GroupState, fixed: &[Lit]) -> Vec<LitPerm> {
    let mut s = state.clone();
    s.stabilize(fixed);
    s.generators
}

/// The generators that fix every literal of `fixed`.
pub fn generator_filter_stabilizer(gens: &[LitPerm], fixed: &[Lit]) -> Vec<LitPerm> {
    gens.iter().filter(|g| fixed.iter().all(|&l| g.fixes(l))).cloned().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bench::gen_php;

    fn perm(n: usize, pairs: &[(i32, i32)]) -> LitPerm {
        let p: Vec<_> = pairs.iter().map(|&(a, b)| (Lit::from_dimacs(a), Lit::from_dimacs(b))).collect();
        LitPerm::from_pairs(n, &p).unwrap()
    }

    #[test]
    fn example1_group() {
        let gens = vec![perm(3, &[(1, 2), (2, 3), (3, 1)]), perm(3, &[(1, 2), (2, 1)])];
        let g = GroupState::new(gens, 3, StabilizerMode::default());
        assert_eq!(g.order(), Some(BigUint::from(6u32)));
        let stab = pointwise_stabilizer(&g, &[Lit::from_dimacs(1)]);
        assert!(!stab.is_empty());
        assert!(stab.iter().all(|s| s.fixes(Lit::from_dimacs(1))));
    }

    #[test]
    fn php_group_order() {
        // Hole swaps and pigeon swaps of PHP(3,2): S3 x S2.
        let inst = gen_php(3, 2);
        let g = GroupState::new(inst.generators.clone(), 6, StabilizerMode::default());
        assert_eq!(g.order(), Some(BigUint::from(12u32)));
    }

    #[test]
    fn filter_is_a_subgroup_of_exact() {
        let inst = gen_php(4, 3);
        let exact = GroupState::new(inst.generators.clone(), 12, StabilizerMode::default());
        let fixed = [Lit::from_dimacs(1)];
        let e = pointwise_stabilizer(&exact, &fixed);
        let f = generator_filter_stabilizer(&inst.generators, &fixed);
        let chain = exact.bsgs().unwrap().stabilizer_chain(&fixed, SchreierSimsLimits::default()).unwrap();
        for g in &f {
            assert!(chain.contains(g));
        }
        // Fixing p(1,1) leaves S2 on holes 2..3 times S3 on pigeons 2..4.
        assert_eq!(chain.order(), BigUint::from(12u32));
        assert!(e.iter().all(|g| g.fixes(fixed[0])));
    }

    #[test]
    fn budget_fallback_filters() {
        let gens = vec![perm(3, &[(1, 2), (2, 3), (3, 1)]), perm(3, &[(1, 2), (2, 1)])];
        let tiny = SchreierSimsLimits { max_base_len: 64, max_transversal_entries: 1 };
        let mut g = GroupState::new(gens, 3, StabilizerMode::Exact(tiny));
        assert!(!g.is_exact());
        assert_eq!(g.fallbacks(), 1);
        g.stabilize(&[Lit::from_dimacs(1)]);
        assert!(g.is_trivial());
    }
}
