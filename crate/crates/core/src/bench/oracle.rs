use std::collections::HashSet;

use crate::cnf::{Formula, Lit, Var};
use crate::symmetry::{validate_symmetry, LitPerm};

use super::BenchError;

/// Default variable limit for exhaustive enumeration.
pub const BRUTE_FORCE_MAX_VARS: usize = 26;

/// Exhaustive satisfiability check over all `2^n` assignments, counting the
/// formula's units as clauses.
pub fn brute_force_sat(f: &Formula) -> Result<bool, BenchError> {
    brute_force_sat_with_limit(f, BRUTE_FORCE_MAX_VARS)
}

pub fn brute_force_sat_with_limit(f: &Formula, max_vars: usize) -> Result<bool, BenchError> {
    Ok(find_model(f, max_vars)?.is_some())
}

/// First model in counting order (variable 1 is the least significant bit).
pub fn brute_force_model(f: &Formula) -> Result<Option<Vec<bool>>, BenchError> {
    let n = f.num_vars();
    Ok(find_model(f, BRUTE_FORCE_MAX_VARS)?.map(|a| (0..n).map(|i| a >> i & 1 == 1).collect()))
}

fn find_model(f: &Formula, max_vars: usize) -> Result<Option<u64>, BenchError> {
    let n = f.num_vars();
    if n > max_vars.min(63) {
        return Err(BenchError::TooManyVariables { vars: n, limit: max_vars.min(63) });
    }
    // Each clause as (positive mask, negative mask).
    let mut masks: Vec<(u64, u64)> = Vec::with_capacity(f.num_clauses() + f.units().len());
    let unit_clauses = f.units().iter().map(std::slice::from_ref);
    for lits in f.clauses().iter().map(|c| c.lits()).chain(unit_clauses) {
        let (mut pos, mut neg) = (0u64, 0u64);
        for l in lits {
            let bit = 1u64 << l.var().index();
            if l.is_negative() {
                neg |= bit;
            } else {
                pos |= bit;
            }
        }
        if pos & neg != 0 {
            continue;
        }
        if pos | neg == 0 {
            return Ok(None);
        }
        masks.push((pos, neg));
    }
    // Short clauses first: they fail most assignments fastest.
    masks.sort_by_key(|(p, q)| (p | q).count_ones());
    let full = if n == 0 { 0 } else { u64::MAX >> (64 - n) };
    let mut a = 0u64;
    loop {
        if masks.iter().all(|&(p, q)| a & p != 0 || !a & q != 0) {
            return Ok(Some(a));
        }
        if a == full {
            return Ok(None);
        }
        a += 1;
    }
}

/// A clausal refutation of `f` in which every clause is implied by unit
/// propagation from `f` and the clauses before it, ending with the empty
/// clause. Returns `None` if `f` is satisfiable.
///
/// Built by DPLL: after both branches below a set of decisions are refuted,
/// the clause negating those decisions is emitted.
pub fn rup_refutation(f: &Formula) -> Option<Vec<Vec<Lit>>> {
    let mut clauses: Vec<Vec<Lit>> = f.clauses().iter().map(|c| c.lits().to_vec()).collect();
    clauses.extend(f.units().iter().map(|&u| vec![u]));
    let mut out = Vec::new();
    let mut decisions = Vec::new();
    if refute(&clauses, f.num_vars(), &mut decisions, &mut out) {
        Some(out)
    } else {
        None
    }
}

fn refute(clauses: &[Vec<Lit>], num_vars: usize, decisions: &mut Vec<Lit>, out: &mut Vec<Vec<Lit>>) -> bool {
    let Some(assign) = propagate(clauses, num_vars, decisions) else {
        out.push(decisions.iter().map(|&d| !d).collect());
        return true;
    };
    let Some(v) = (0..num_vars).find(|&v| assign[v].is_none()) else {
        return false;
    };
    for lit in [Var::from_index(v).positive(), Var::from_index(v).negative()] {
        decisions.push(lit);
        let refuted = refute(clauses, num_vars, decisions, out);
        decisions.pop();
        if !refuted {
            return false;
        }
    }
    out.push(decisions.iter().map(|&d| !d).collect());
    true
}

/// Unit propagation to fixpoint by repeated scans. `None` on conflict.
fn propagate(clauses: &[Vec<Lit>], num_vars: usize, decisions: &[Lit]) -> Option<Vec<Option<bool>>> {
    let mut assign: Vec<Option<bool>> = vec![None; num_vars];
    let value = |assign: &[Option<bool>], l: Lit| assign[l.var().index()].map(|b| b != l.is_negative());
    for &d in decisions {
        match value(&assign, d) {
            Some(false) => return None,
            _ => assign[d.var().index()] = Some(d.is_positive()),
        }
    }
    loop {
        let mut changed = false;
        for c in clauses {
            let mut unassigned = None;
            let mut open = 0;
            let mut satisfied = false;
            for &l in c {
                match value(&assign, l) {
                    Some(true) => {
                        satisfied = true;
                        break;
                    }
                    Some(false) => {}
                    None => {
                        open += 1;
                        unassigned = Some(l);
                    }
                }
            }
            if satisfied {
                continue;
            }
            match (open, unassigned) {
                (0, _) => return None,
                (1, Some(l)) => {
                    assign[l.var().index()] = Some(l.is_positive());
                    changed = true;
                }
                _ => {}
            }
        }
        if !changed {
            return Some(assign);
        }
    }
}

/// Every syntactic symmetry of `f`, by backtracking over signed variable
/// images. Partial maps are pruned by literal occurrence counts and by
/// clauses whose variables are all mapped.
pub fn enumerate_symmetries(f: &Formula, max_vars: usize) -> Result<Vec<LitPerm>, BenchError> {
    let n = f.num_vars();
    if n > max_vars {
        return Err(BenchError::TooManyVariables { vars: n, limit: max_vars });
    }
    let mut units = vec![false; 2 * n];
    for u in f.units() {
        units[u.code()] = true;
    }
    let signature = |l: Lit| (f.occurrences(l), f.occurrences(!l), units[l.code()], units[(!l).code()]);
    let clause_set: HashSet<&[Lit]> = f.clauses().iter().map(|c| c.canonical()).collect();
    // Clauses grouped by their largest variable.
    let mut closing: Vec<Vec<&[Lit]>> = vec![Vec::new(); n];
    for c in f.clauses() {
        if let Some(last) = c.canonical().iter().map(|l| l.var().index()).max() {
            closing[last].push(c.canonical());
        }
    }
    let mut out = Vec::new();
    let mut images: Vec<Lit> = Vec::with_capacity(n);
    let mut used = vec![false; n];
    extend_symmetry(f, &signature, &clause_set, &closing, &mut images, &mut used, &mut out);
    Ok(out)
}

fn extend_symmetry(
    f: &Formula,
    signature: &dyn Fn(Lit) -> (u32, u32, bool, bool),
    clause_set: &HashSet<&[Lit]>,
    closing: &[Vec<&[Lit]>],
    images: &mut Vec<Lit>,
    used: &mut [bool],
    out: &mut Vec<LitPerm>,
) {
    let v = images.len();
    let n = used.len();
    if v == n {
        let sigma = LitPerm::from_images(images.clone()).expect("images are a bijection");
        if validate_symmetry(f, &sigma) {
            out.push(sigma);
        }
        return;
    }
    let src = Var::from_index(v).positive();
    for w in 0..n {
        if used[w] {
            continue;
        }
        for img in [Var::from_index(w).positive(), Var::from_index(w).negative()] {
            if signature(src) != signature(img) {
                continue;
            }
            images.push(img);
            let apply = |l: Lit| {
                let i = images[l.var().index()];
                if l.is_negative() {
                    !i
                } else {
                    i
                }
            };
            let consistent = closing[v].iter().all(|c| {
                let mut mapped: Vec<Lit> = c.iter().map(|&l| apply(l)).collect();
                mapped.sort_unstable();
                clause_set.contains(mapped.as_slice())
            });
            if consistent {
                used[w] = true;
                extend_symmetry(f, signature, clause_set, closing, images, used, out);
                used[w] = false;
            }
            images.pop();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bench::{exactly_one_of_three, gen_php};

    #[test]
    fn small_cases() {
        let f = exactly_one_of_three().formula;
        assert!(brute_force_sat(&f).unwrap());
        let m = brute_force_model(&f).unwrap().unwrap();
        assert_eq!(m, vec![true, false, false]);
        assert!(!brute_force_sat(&gen_php(3, 2).formula).unwrap());
        assert!(brute_force_sat(&Formula::new(0)).unwrap());
        assert!(!brute_force_sat(&Formula::from_dimacs_clauses(1, &[&[]])).unwrap());
        let mut big = Formula::new(30);
        big.push_clause(vec![Lit::from_dimacs(30)]);
        assert_eq!(brute_force_sat(&big).unwrap_err(), BenchError::TooManyVariables { vars: 30, limit: 26 });
    }

    #[test]
    fn units_count_as_clauses() {
        let f = Formula::from_dimacs_clauses(2, &[&[1, 2]]);
        assert!(brute_force_sat(&f.with_units(&[Lit::from_dimacs(-1)])).unwrap());
        assert!(!brute_force_sat(&f.with_units(&[Lit::from_dimacs(-1), Lit::from_dimacs(-2)])).unwrap());
    }

    #[test]
    fn symmetry_enumeration() {
        assert_eq!(enumerate_symmetries(&exactly_one_of_three().formula, 8).unwrap().len(), 6);
        assert_eq!(enumerate_symmetries(&gen_php(3, 2).formula, 8).unwrap().len(), 12);
        // x xor y: swap, double flip and both.
        let xor = Formula::from_dimacs_clauses(2, &[&[1, 2], &[-1, -2]]);
        assert_eq!(enumerate_symmetries(&xor, 8).unwrap().len(), 4);
        assert_eq!(enumerate_symmetries(&Formula::new(0), 8).unwrap().len(), 1);
    }

    #[test]
    fn refutations() {
        let r = rup_refutation(&gen_php(3, 2).formula).unwrap();
        assert_eq!(r.last().unwrap(), &Vec::<Lit>::new());
        assert!(rup_refutation(&exactly_one_of_three().formula).is_none());
        // An immediately conflicting formula refutes with just the empty clause.
        let f = Formula::from_dimacs_clauses(1, &[&[1], &[-1]]);
        assert_eq!(rup_refutation(&f).unwrap(), vec![Vec::<Lit>::new()]);
    }
}
