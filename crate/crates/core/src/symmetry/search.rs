//! Automorphism search by color refinement and individualization.
//!
//! The first path of the search tree is descended greedily to a discrete
//! leaf. Then, deepest level first, every vertex of the level's target cell
//! that is not yet known to be equivalent to the first-path vertex is
//! individualized instead, and its subtree is searched for a leaf
//! equivalent to the first one. Each hit is an automorphism and becomes a
//! generator. With an unlimited budget the generators found this way
//! generate the whole automorphism group.

use super::graph::ColoredGraph;
use super::perm::LitPerm;

/// Default cap on refinement calls.
pub const DEFAULT_NODE_BUDGET: usize = 1_000_000;

#[derive(Clone, Debug)]
pub struct AutomorphismSearch {
    pub generators: Vec<LitPerm>,
    /// False if the node budget ran out; the generators are still valid.
    pub complete: bool,
    pub nodes: usize,
}

struct BudgetExhausted;

struct Level {
    colors: Vec<u32>,
    cell: Vec<u32>,
    chosen: u32,
}

struct Search<'g> {
    g: &'g ColoredGraph,
    budget: usize,
    nodes: usize,
    first_leaf: Vec<u32>,
    /// Cell sizes in color order after each refinement of the first path.
    trace: Vec<Vec<u32>>,
}

/// Searches for generators of the automorphism group of `g`.
pub fn find_automorphisms(g: &ColoredGraph, budget: usize) -> AutomorphismSearch {
    let n = g.num_vertices();
    let mut s = Search { g, budget, nodes: 0, first_leaf: Vec::new(), trace: Vec::new() };
    if n == 0 {
        return AutomorphismSearch { generators: Vec::new(), complete: true, nodes: 0 };
    }

    let mut levels: Vec<Level> = Vec::new();
    let mut colors = g.colors.clone();
    s.refine(&mut colors);
    s.trace.push(cell_sizes(&colors));
    while let Some(cell) = target_cell(&colors) {
        let chosen = cell[0];
        let mut next = individualize(&colors, chosen);
        s.refine(&mut next);
        s.trace.push(cell_sizes(&next));
        levels.push(Level { colors, cell, chosen });
        colors = next;
    }
    s.first_leaf = colors;

    // Generators as vertex permutations, tagged with the level they were found at.
    let mut found: Vec<(usize, Vec<u32>)> = Vec::new();
    let mut complete = true;
    'levels: for depth in (0..levels.len()).rev() {
        let level = &levels[depth];
        let mut orbits = UnionFind::new(n);
        for (_, p) in &found {
            orbits.absorb(p);
        }
        for &w in &level.cell {
            if w == level.chosen || orbits.same(w as usize, level.chosen as usize) {
                continue;
            }
            match s.probe(&level.colors, w, depth) {
                Ok(Some(p)) => {
                    orbits.absorb(&p);
                    found.push((depth, p));
                }
                Ok(None) => {}
                Err(BudgetExhausted) => {
                    complete = false;
                    break 'levels;
                }
            }
        }
    }

    let generators = found.iter().map(|(_, p)| s.to_lit_perm(p)).collect();
    AutomorphismSearch { generators, complete, nodes: s.nodes }
}

impl Search<'_> {
    /// Individualizes `w` in `colors` (taken at first-path `depth`) and
    /// searches the subtree for a leaf equivalent to the first leaf.
    fn probe(&mut self, colors: &[u32], w: u32, depth: usize) -> Result<Option<Vec<u32>>, BudgetExhausted> {
        let mut child = individualize(colors, w);
        self.refine_counted(&mut child)?;
        if cell_sizes(&child) != self.trace[depth + 1] {
            return Ok(None);
        }
        self.descend(child, depth + 1)
    }

    fn descend(&mut self, colors: Vec<u32>, depth: usize) -> Result<Option<Vec<u32>>, BudgetExhausted> {
        let Some(cell) = target_cell(&colors) else {
            return Ok(self.leaf_automorphism(&colors));
        };
        for &u in &cell {
            let mut child = individualize(&colors, u);
            self.refine_counted(&mut child)?;
            if depth + 1 >= self.trace.len() || cell_sizes(&child) != self.trace[depth + 1] {
                continue;
            }
            if let Some(p) = self.descend(child, depth + 1)? {
                return Ok(Some(p));
            }
        }
        Ok(None)
    }

    /// The map sending each first-leaf vertex to the vertex of the same
    /// color in `leaf`, if it is an automorphism.
    fn leaf_automorphism(&self, leaf: &[u32]) -> Option<Vec<u32>> {
        let n = leaf.len();
        let mut by_color = vec![0u32; n];
        for (v, &c) in leaf.iter().enumerate() {
            by_color[c as usize] = v as u32;
        }
        let gamma: Vec<u32> = self.first_leaf.iter().map(|&c| by_color[c as usize]).collect();
        is_automorphism(self.g, &gamma).then_some(gamma)
    }

    fn refine_counted(&mut self, colors: &mut Vec<u32>) -> Result<(), BudgetExhausted> {
        if self.nodes >= self.budget {
            return Err(BudgetExhausted);
        }
        self.refine(colors);
        Ok(())
    }

    /// Equitable refinement: repeatedly split colors by the multiset of
    /// neighbor colors until the number of colors is stable. New colors are
    /// ranks of (old color, neighbor multiset), so the result is invariant
    /// under isomorphism.
    fn refine(&mut self, colors: &mut Vec<u32>) {
        self.nodes += 1;
        let n = colors.len();
        let mut count = distinct(colors);
        let mut sigs: Vec<(u32, Vec<u32>, u32)> = Vec::with_capacity(n);
        loop {
            sigs.clear();
            for v in 0..n {
                let mut nb: Vec<u32> = self.g.adjacency[v].iter().map(|&u| colors[u as usize]).collect();
                nb.sort_unstable();
                sigs.push((colors[v], nb, v as u32));
            }
            sigs.sort_unstable();
            let mut rank = 0u32;
            for i in 0..n {
                if i > 0 && (sigs[i].0 != sigs[i - 1].0 || sigs[i].1 != sigs[i - 1].1) {
                    rank = i as u32;
                }
                colors[sigs[i].2 as usize] = rank;
            }
            let new_count = distinct(colors);
            if new_count == count {
                break;
            }
            count = new_count;
        }
    }

    fn to_lit_perm(&self, gamma: &[u32]) -> LitPerm {
        let mut pairs = Vec::with_capacity(self.g.literals.len() / 2);
        for (v, &l) in self.g.literals.iter().enumerate() {
            if l.is_positive() {
                pairs.push((l, self.g.literals[gamma[v] as usize]));
            }
        }
        LitPerm::from_pairs(self.g.num_vars, &pairs).expect("graph automorphisms permute literal vertices")
    }
}

fn distinct(colors: &[u32]) -> usize {
    let max = colors.iter().copied().max().map_or(0, |m| m as usize + 1);
    let mut seen = vec![false; max];
    colors.iter().filter(|&&c| !std::mem::replace(&mut seen[c as usize], true)).count()
}

fn cell_sizes(colors: &[u32]) -> Vec<u32> {
    let mut sizes = vec![0u32; colors.len()];
    for &c in colors {
        sizes[c as usize] += 1;
    }
    sizes
}

/// Members of the first cell with more than one vertex, ascending.
fn target_cell(colors: &[u32]) -> Option<Vec<u32>> {
    let sizes = cell_sizes(colors);
    let c = sizes.iter().position(|&s| s > 1)? as u32;
    Some((0..colors.len() as u32).filter(|&v| colors[v as usize] == c).collect())
}

/// Splits `v` off its cell, ahead of the remaining members.
fn individualize(colors: &[u32], v: u32) -> Vec<u32> {
    colors.iter().enumerate().map(|(u, &c)| 2 * c + (u as u32 != v) as u32).collect()
}

fn is_automorphism(g: &ColoredGraph, gamma: &[u32]) -> bool {
    let mut mapped = Vec::new();
    for (v, adj) in g.adjacency.iter().enumerate() {
        let w = gamma[v] as usize;
        if g.colors[v] != g.colors[w] || adj.len() != g.adjacency[w].len() {
            return false;
        }
        mapped.clear();
        mapped.extend(adj.iter().map(|&u| gamma[u as usize]));
        mapped.sort_unstable();
        if mapped != g.adjacency[w] {
            return false;
        }
    }
    true
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> UnionFind {
        UnionFind { parent: (0..n).collect() }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn same(&mut self, a: usize, b: usize) -> bool {
        self.find(a) == self.find(b)
    }

    fn absorb(&mut self, perm: &[u32]) {
        for (v, &w) in perm.iter().enumerate() {
            let (a, b) = (self.find(v), self.find(w as usize));
            if a != b {
                self.parent[a] = b;
            }
        }
    }
}
