use std::collections::VecDeque;

use thiserror::Error;

use crate::cnf::Lit;
use crate::symmetry::LitPerm;

#[derive(Debug, Error, PartialEq, Eq)]
#[error("literal {target} is not in the orbit of {root}")]
pub struct NotInOrbit {
    pub root: Lit,
    pub target: Lit,
}

/// An orbit with its Schreier vector: every member except the root records
/// the member it was reached from and the generator used.
#[derive(Clone, Debug)]
pub struct Orbit<'g> {
    generators: &'g [LitPerm],
    root: Lit,
    members: Vec<Lit>,
    parent: Vec<Option<(Lit, usize)>>,
    in_orbit: Vec<bool>,
}

/// Breadth-first closure of `start` under `gens`.
pub fn orbit_of(gens: &[LitPerm], start: Lit) -> Orbit<'_> {
    let degree = gens.iter().map(|g| g.degree()).max().unwrap_or(0).max(start.var().index() + 1);
    let mut in_orbit = vec![false; 2 * degree];
    let mut parent = vec![None; 2 * degree];
    let mut members = vec![start];
    in_orbit[start.code()] = true;
    let mut queue = VecDeque::from([start]);
    while let Some(x) = queue.pop_front() {
        for (gi, g) in gens.iter().enumerate() {
            let y = g.apply(x);
            if !in_orbit[y.code()] {
                in_orbit[y.code()] = true;
                parent[y.code()] = Some((x, gi));
                members.push(y);
                queue.push_back(y);
            }
        }
    }
    Orbit { generators: gens, root: start, members, parent, in_orbit }
}

impl Orbit<'_> {
    pub fn root(&self) -> Lit {
        self.root
    }

    /// Members in discovery order, root first.
    pub fn members(&self) -> &[Lit] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, lit: Lit) -> bool {
        self.in_orbit.get(lit.code()).copied().unwrap_or(false)
    }

    /// A product of generators mapping the root to `target`, composed from
    /// the Schreier vector.
    pub fn witness(&self, target: Lit) -> Result<LitPerm, NotInOrbit> {
        witness_mapping(self, target)
    }
}

/// Walks the Schreier vector from `target` back to the root and composes
/// the generators on the path.
pub fn witness_mapping(orbit: &Orbit<'_>, target: Lit) -> Result<LitPerm, NotInOrbit> {
    if !orbit.contains(target) {
        return Err(NotInOrbit { root: orbit.root, target });
    }
    let mut path = Vec::new();
    let mut cur = target;
    while let Some((prev, gi)) = orbit.parent[cur.code()] {
        path.push(gi);
        cur = prev;
    }
    let degree = orbit.in_orbit.len() / 2;
    let sigma = path.iter().rev().fold(LitPerm::identity(degree), |acc, &gi| acc.then(&orbit.generators[gi]));
    debug_assert_eq!(sigma.apply(orbit.root), target);
    Ok(sigma)
}

/// Partition of all literals of the first `num_vars` variables into orbits.
#[derive(Clone, Debug)]
pub struct OrbitTable {
    class: Vec<usize>,
    sizes: Vec<usize>,
}

impl OrbitTable {
    pub fn new(gens: &[LitPerm], num_vars: usize) -> OrbitTable {
        let n = 2 * num_vars;
        let mut class = vec![usize::MAX; n];
        let mut sizes = Vec::new();
        for code in 0..n {
            if class[code] != usize::MAX {
                continue;
            }
            let id = sizes.len();
            let mut size = 0;
            let mut queue = VecDeque::from([code]);
            class[code] = id;
            while let Some(x) = queue.pop_front() {
                size += 1;
                for g in gens {
                    let y = g.apply_code(x);
                    if y < n && class[y] == usize::MAX {
                        class[y] = id;
                        queue.push_back(y);
                    }
                }
            }
            sizes.push(size);
        }
        OrbitTable { class, sizes }
    }

    pub fn same_orbit(&self, a: Lit, b: Lit) -> bool {
        a == b || matches!((self.class.get(a.code()), self.class.get(b.code())), (Some(x), Some(y)) if x == y)
    }

    pub fn orbit_size(&self, lit: Lit) -> usize {
        self.class.get(lit.code()).map_or(1, |&c| self.sizes[c])
    }

    pub fn num_orbits(&self) -> usize {
        self.sizes.len()
    }

    /// Class id per literal code.
    pub fn classes(&self) -> &[usize] {
        &self.class
    }
}
