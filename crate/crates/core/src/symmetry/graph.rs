use crate::cnf::{Formula, Lit};

/// Vertex-colored undirected graph whose automorphisms (restricted to the
/// literal vertices) are the syntactic symmetries of a formula.
///
/// Vertices `0..2k` are the literals of the `k` variables occurring in the
/// formula (`2i` positive, `2i + 1` negative); clause vertices follow.
/// Literal vertices have color 0 and clause vertices are colored by clause
/// length.
#[derive(Clone, Debug)]
pub struct ColoredGraph {
    pub(crate) colors: Vec<u32>,
    pub(crate) adjacency: Vec<Vec<u32>>,
    pub(crate) literals: Vec<Lit>,
    pub(crate) num_vars: usize,
    negation_edges: usize,
    membership_edges: usize,
}

impl ColoredGraph {
    pub fn num_vertices(&self) -> usize {
        self.colors.len()
    }

    pub fn num_literal_vertices(&self) -> usize {
        self.literals.len()
    }

    pub fn num_clause_vertices(&self) -> usize {
        self.colors.len() - self.literals.len()
    }

    pub fn num_negation_edges(&self) -> usize {
        self.negation_edges
    }

    pub fn num_membership_edges(&self) -> usize {
        self.membership_edges
    }

    pub fn num_edges(&self) -> usize {
        self.negation_edges + self.membership_edges
    }

    pub fn color(&self, vertex: usize) -> u32 {
        self.colors[vertex]
    }

    pub fn neighbors(&self, vertex: usize) -> &[u32] {
        &self.adjacency[vertex]
    }

    /// Literal of a literal vertex.
    pub fn literal(&self, vertex: usize) -> Option<Lit> {
        self.literals.get(vertex).copied()
    }
}

/// Builds the literal/clause incidence graph: every clause vertex is joined
/// to its literals, every literal to its negation.
pub fn build_model_graph(f: &Formula) -> ColoredGraph {
    let vars = f.variables();
    let mut vertex_of = vec![u32::MAX; 2 * f.num_vars()];
    let mut literals = Vec::with_capacity(2 * vars.len());
    for v in &vars {
        for l in [v.positive(), v.negative()] {
            vertex_of[l.code()] = literals.len() as u32;
            literals.push(l);
        }
    }
    let n_lits = literals.len();
    let n = n_lits + f.num_clauses();
    let mut colors = vec![0u32; n];
    let mut adjacency: Vec<Vec<u32>> = vec![Vec::new(); n];
    for i in 0..vars.len() {
        let (p, q) = (2 * i, 2 * i + 1);
        adjacency[p].push(q as u32);
        adjacency[q].push(p as u32);
    }
    let mut membership_edges = 0;
    for (ci, c) in f.clauses().iter().enumerate() {
        let cv = n_lits + ci;
        colors[cv] = c.len() as u32;
        for l in c.canonical() {
            let lv = vertex_of[l.code()];
            adjacency[cv].push(lv);
            adjacency[lv as usize].push(cv as u32);
            membership_edges += 1;
        }
    }
    for adj in &mut adjacency {
        adj.sort_unstable();
    }
    ColoredGraph { colors, adjacency, literals, num_vars: f.num_vars(), negation_edges: vars.len(), membership_edges }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn example1_graph_shape() {
        let f = Formula::from_dimacs_clauses(3, &[&[1, 2, 3], &[-1, -2], &[-1, -3], &[-2, -3]]);
        let g = build_model_graph(&f);
        assert_eq!(g.num_literal_vertices(), 6);
        assert_eq!(g.num_clause_vertices(), 4);
        assert_eq!(g.num_negation_edges(), 3);
        assert_eq!(g.num_membership_edges(), 9);
        // Every clause vertex is adjacent to exactly its literals.
        for (ci, c) in f.clauses().iter().enumerate() {
            let adj: Vec<Lit> = g.neighbors(6 + ci).iter().map(|&u| g.literal(u as usize).unwrap()).collect();
            assert_eq!(adj, c.canonical());
        }
    }

    #[test]
    fn empty_and_unit() {
        let g = build_model_graph(&Formula::new(0));
        assert_eq!(g.num_vertices(), 0);
        let g = build_model_graph(&Formula::from_dimacs_clauses(1, &[&[1]]));
        assert_eq!((g.num_literal_vertices(), g.num_clause_vertices()), (2, 1));
        assert_eq!((g.num_negation_edges(), g.num_membership_edges()), (1, 1));
    }
}
