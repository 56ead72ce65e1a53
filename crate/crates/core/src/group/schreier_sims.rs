use std::collections::VecDeque;

use num_bigint::BigUint;
use thiserror::Error;

use crate::cnf::Lit;
use crate::symmetry::LitPerm;

/// Caps on the size of a base and strong generating set.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SchreierSimsLimits {
    pub max_base_len: usize,
    /// Total number of transversal entries over all levels.
    pub max_transversal_entries: usize,
}

impl Default for SchreierSimsLimits {
    fn default() -> Self {
        SchreierSimsLimits { max_base_len: 64, max_transversal_entries: 1_000_000 }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("Schreier-Sims budget exceeded")]
pub struct BudgetExceeded;

#[derive(Clone, Debug)]
struct Level {
    point: Lit,
    generators: Vec<LitPerm>,
    /// Orbit of `point` under `generators`, in discovery order.
    orbit: Vec<Lit>,
    /// Coset representative per literal code: maps `point` to that literal.
    reps: Vec<Option<LitPerm>>,
}

/// A base and strong generating set of a group of literal permutations.
///
/// Level `i` holds the generators fixing the first `i` base points and the
/// transversal of the `i`-th base point's orbit under them.
#[derive(Clone, Debug)]
pub struct Bsgs {
    degree: usize,
    levels: Vec<Level>,
}

impl Bsgs {
    /// Runs deterministic Schreier-Sims. The base starts with `base_hint`
    /// (duplicates dropped); further points are appended as needed.
    pub fn build(
        gens: &[LitPerm],
        degree: usize,
        base_hint: &[Lit],
        limits: SchreierSimsLimits,
    ) -> Result<Bsgs, BudgetExceeded> {
        let degree = gens.iter().map(|g| g.degree()).max().unwrap_or(0).max(degree);
        let gens: Vec<LitPerm> = gens.iter().filter(|g| !g.is_identity()).cloned().collect();
        let mut base: Vec<Lit> = Vec::new();
        for &b in base_hint {
            if !base.contains(&b) {
                base.push(b);
            }
        }
        for g in &gens {
            if base.iter().all(|&b| g.fixes(b)) {
                base.push(first_moved(g));
            }
        }
        if base.len() > limits.max_base_len {
            return Err(BudgetExceeded);
        }
        let mut bsgs = Bsgs { degree, levels: Vec::new() };
        for (i, &b) in base.iter().enumerate() {
            let prefix = &base[..i];
            let s: Vec<LitPerm> = gens.iter().filter(|g| prefix.iter().all(|&p| g.fixes(p))).cloned().collect();
            bsgs.levels.push(Level { point: b, generators: s, orbit: Vec::new(), reps: Vec::new() });
            bsgs.recompute(i);
        }
        bsgs.check_budget(limits)?;

        let mut i = bsgs.levels.len();
        while i > 0 {
            let level = i - 1;
            match bsgs.find_new_generator(level) {
                None => i -= 1,
                Some((residue, j)) => {
                    if j == bsgs.levels.len() {
                        if bsgs.levels.len() >= limits.max_base_len {
                            return Err(BudgetExceeded);
                        }
                        bsgs.levels.push(Level {
                            point: first_moved(&residue),
                            generators: Vec::new(),
                            orbit: Vec::new(),
                            reps: Vec::new(),
                        });
                    }
                    for l in level + 1..=j {
                        bsgs.levels[l].generators.push(residue.clone());
                        bsgs.recompute(l);
                    }
                    bsgs.check_budget(limits)?;
                    i = j + 1;
                }
            }
        }
        Ok(bsgs)
    }

    /// Sifts the Schreier generators of `level` through the levels below.
    /// Returns the first residue that fails, with the level it stopped at.
    fn find_new_generator(&self, level: usize) -> Option<(LitPerm, usize)> {
        let lv = &self.levels[level];
        for &beta in &lv.orbit {
            let rep = lv.reps[beta.code()].as_ref().expect("orbit point has a representative");
            for s in &lv.generators {
                let image = s.apply(beta);
                let back = lv.reps[image.code()].as_ref().expect("orbit closed under generators");
                let h = rep.then(s).then(&back.inverse());
                if h.is_identity() {
                    continue;
                }
                let (residue, j) = self.strip(h, level + 1);
                if j < self.levels.len() || !residue.is_identity() {
                    return Some((residue, j));
                }
            }
        }
        None
    }

    /// Sifts `g` starting at level `from`. Returns the residue and the first
    /// level whose transversal does not contain the residue's image, or the
    /// number of levels if sifting went through.
    fn strip(&self, mut g: LitPerm, from: usize) -> (LitPerm, usize) {
        for (j, lv) in self.levels.iter().enumerate().skip(from) {
            let beta = g.apply(lv.point);
            match lv.reps.get(beta.code()).and_then(|r| r.as_ref()) {
                Some(rep) => g = g.then(&rep.inverse()),
                None => return (g, j),
            }
        }
        (g, self.levels.len())
    }

    fn recompute(&mut self, level: usize) {
        let n = 2 * self.degree;
        let lv = &mut self.levels[level];
        let mut reps: Vec<Option<LitPerm>> = vec![None; n.max(lv.point.code() + 1)];
        reps[lv.point.code()] = Some(LitPerm::identity(self.degree));
        let mut orbit = vec![lv.point];
        let mut queue = VecDeque::from([lv.point]);
        while let Some(x) = queue.pop_front() {
            let rx = reps[x.code()].clone().expect("queued points have representatives");
            for s in &lv.generators {
                let y = s.apply(x);
                if reps[y.code()].is_none() {
                    reps[y.code()] = Some(rx.then(s));
                    orbit.push(y);
                    queue.push_back(y);
                }
            }
        }
        lv.orbit = orbit;
        lv.reps = reps;
    }

    fn check_budget(&self, limits: SchreierSimsLimits) -> Result<(), BudgetExceeded> {
        let entries: usize = self.levels.iter().map(|l| l.orbit.len()).sum();
        if entries > limits.max_transversal_entries || self.levels.len() > limits.max_base_len {
            Err(BudgetExceeded)
        } else {
            Ok(())
        }
    }

    pub fn base(&self) -> Vec<Lit> {
        self.levels.iter().map(|l| l.point).collect()
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Product of the basic orbit lengths.
    pub fn order(&self) -> BigUint {
        self.levels.iter().fold(BigUint::from(1u32), |acc, l| acc * BigUint::from(l.orbit.len()))
    }

    /// Orbit lengths per level.
    pub fn orbit_lengths(&self) -> Vec<usize> {
        self.levels.iter().map(|l| l.orbit.len()).collect()
    }

    pub fn contains(&self, g: &LitPerm) -> bool {
        let (residue, j) = self.strip(g.clone(), 0);
        j == self.levels.len() && residue.is_identity()
    }

    /// All strong generators (those of level 0).
    pub fn strong_generators(&self) -> &[LitPerm] {
        self.levels.first().map_or(&[], |l| &l.generators)
    }

    /// The chain for the pointwise stabilizer of `fixed`. Each literal moved
    /// by the current group is stabilized in turn by rebuilding with it as
    /// the first base point and dropping that level.
    pub fn stabilizer_chain(&self, fixed: &[Lit], limits: SchreierSimsLimits) -> Result<Bsgs, BudgetExceeded> {
        let mut chain = self.clone();
        for &l in fixed {
            if chain.strong_generators().iter().all(|g| g.fixes(l)) {
                continue;
            }
            let mut hint = vec![l];
            hint.extend(chain.base());
            let full = Bsgs::build(chain.strong_generators(), chain.degree, &hint, limits)?;
            let mut levels: Vec<Level> = full.levels.into_iter().skip(1).collect();
            while levels.last().is_some_and(|lv| lv.orbit.len() == 1) {
                levels.pop();
            }
            chain = Bsgs { degree: self.degree, levels };
        }
        Ok(chain)
    }
}

fn first_moved(g: &LitPerm) -> Lit {
    g.support().next().expect("non-identity permutation moves a variable").positive()
}
