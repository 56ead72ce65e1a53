//! End-to-end properties on random formulas with planted symmetries.

use proptest::prelude::*;

use orbifix::bench::{brute_force_sat, Setting};
use orbifix::checker::{check_proof, CheckOptions};
use orbifix::cnf::{parse_dimacs, Formula, Lit, Var};
use orbifix::group::{Bsgs, GroupState, SchreierSimsLimits, StabilizerMode};
use orbifix::preprocess::{preprocess, PreprocessConfig, Symmetries};
use orbifix::proof::write_proof;
use orbifix::symmetry::{detect_symmetries, validate_symmetry, LitPerm, DEFAULT_NODE_BUDGET};

/// A signed permutation of `n` variables from a shuffle and sign bits.
fn signed_perm(n: usize, order: &[usize], signs: &[bool]) -> LitPerm {
    let images = (0..n).map(|v| Var::from_index(order[v]).lit(!signs[v])).collect();
    LitPerm::from_images(images).unwrap()
}

/// Closes `seeds` under the cyclic group of `sigma`.
fn close(n: usize, seeds: &[Vec<(usize, bool)>], sigma: &LitPerm) -> Formula {
    let mut f = Formula::new(n);
    let mut seen = std::collections::BTreeSet::new();
    for seed in seeds {
        let mut c: Vec<Lit> = seed.iter().map(|&(v, pos)| Var::from_index(v % n).lit(pos)).collect();
        c.sort_unstable();
        c.dedup_by_key(|l| l.var());
        loop {
            let mut key = c.clone();
            key.sort_unstable();
            if !seen.insert(key) {
                break;
            }
            f.push_clause(c.clone());
            c = c.iter().map(|&l| sigma.apply(l)).collect();
        }
    }
    f
}

fn planted() -> impl Strategy<Value = (Formula, LitPerm)> {
    (2usize..=9).prop_flat_map(|n| {
        (
            Just(n),
            Just((0..n).collect::<Vec<_>>()).prop_shuffle(),
            prop::collection::vec(prop::bool::weighted(0.2), n),
            prop::collection::vec(prop::collection::vec((0..n, any::<bool>()), 1..4), 1..8),
        )
            .prop_map(|(n, order, signs, seeds)| {
                let sigma = signed_perm(n, &order, &signs);
                (close(n, &seeds, &sigma), sigma)
            })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn planted_permutation_is_a_symmetry((f, sigma) in planted()) {
        prop_assert!(validate_symmetry(&f, &sigma));
    }

    #[test]
    fn every_setting_is_sound((f, sigma) in planted(), search in any::<bool>(), filter in any::<bool>()) {
        let sat = brute_force_sat(&f).unwrap();
        let symmetries = if search { Symmetries::Search(DEFAULT_NODE_BUDGET) } else { Symmetries::Given(vec![sigma]) };
        let stabilizer = if filter { StabilizerMode::Filter } else { StabilizerMode::default() };
        for setting in Setting::ALL {
            let config = PreprocessConfig {
                fixing: setting.fixing_config(stabilizer),
                symmetries: symmetries.clone(),
                ..PreprocessConfig::default()
            };
            let out = preprocess(&f, &config).unwrap();
            let fixed = parse_dimacs(out.output_dimacs().as_bytes()).unwrap();
            prop_assert_eq!(brute_force_sat(&fixed).unwrap(), sat);
            let text = write_proof(&out.proof);
            for strict in [false, true] {
                let v = check_proof(&f, &text, CheckOptions { strict }).unwrap();
                prop_assert!(v.accepted, "{} strict={strict}: {:?}\n{text}", setting.name(), v.failure);
                prop_assert_eq!(v.refutation, out.is_unsat());
            }
        }
    }

    #[test]
    fn search_generators_are_symmetries_and_contain_the_planted_one((f, sigma) in planted()) {
        let found = detect_symmetries(&f, DEFAULT_NODE_BUDGET);
        prop_assert!(found.complete);
        for g in &found.generators {
            prop_assert!(validate_symmetry(&f, g));
        }
        // The search leaves variables outside the clauses alone.
        let used = f.variables();
        let images = (0..f.num_vars())
            .map(|v| {
                let x = Var::from_index(v);
                if used.contains(&x) { sigma.apply(x.positive()) } else { x.positive() }
            })
            .collect();
        let restricted = LitPerm::from_images(images).unwrap();
        let bsgs = Bsgs::build(&found.generators, f.num_vars(), &[], SchreierSimsLimits::default()).unwrap();
        prop_assert!(bsgs.contains(&restricted));
    }

    #[test]
    fn stabilizers_fix_their_literals((f, sigma) in planted(), pick in 0usize..18) {
        let found = detect_symmetries(&f, DEFAULT_NODE_BUDGET).generators;
        let lit = Lit::from_code(pick % (2 * f.num_vars()));
        for mode in [StabilizerMode::default(), StabilizerMode::Filter] {
            let mut state = GroupState::new(found.iter().cloned().chain([sigma.clone()]).collect(), f.num_vars(), mode);
            state.stabilize(&[lit]);
            for g in state.generators() {
                prop_assert_eq!(g.apply(lit), lit);
                prop_assert!(validate_symmetry(&f.with_units(&[lit]), g));
            }
        }
    }
}
