//! Detection of row-symmetric literal matrices (orbitopes) whose columns
//! are unique literal clauses.

use std::collections::{BTreeMap, HashMap, VecDeque};

use thiserror::Error;

use crate::cnf::{canonical_form, find_ulcs, Formula, Lit};
use crate::symmetry::{validate_symmetry, LitPerm};

/// A generator that is an involution made of literal transpositions
/// between distinct variables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RowSwapGenerator {
    pub perm: LitPerm,
    /// Every literal 2-cycle `(a, b)` with `a < b`, twins included.
    pub transpositions: Vec<(Lit, Lit)>,
}

impl RowSwapGenerator {
    /// The two row tuples swapped by the generator.
    pub fn rows(&self) -> (Vec<Lit>, Vec<Lit>) {
        self.transpositions.iter().copied().unzip()
    }
}

/// Keeps the generators that swap pairs of literals of distinct variables
/// and nothing else.
pub fn detect_row_swaps(gens: &[LitPerm]) -> Vec<RowSwapGenerator> {
    gens.iter()
        .filter(|g| !g.is_identity() && g.is_involution())
        .filter_map(|g| {
            let mut transpositions = Vec::new();
            for code in 0..2 * g.degree() {
                let a = Lit::from_code(code);
                let b = g.apply(a);
                if a < b {
                    if a.var() == b.var() {
                        return None;
                    }
                    transpositions.push((a, b));
                }
            }
            Some(RowSwapGenerator { perm: g.clone(), transpositions })
        })
        .collect()
}

/// An `n x m` matrix of literals whose columns are unique literal clauses
/// and whose rows can be permuted arbitrarily by symmetries.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrbitopeMatrix {
    entries: Vec<Vec<Lit>>,
    row_swaps: Vec<LitPerm>,
    columns: Vec<usize>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum StructureError {
    #[error("row index {index} out of range for {rows} rows")]
    RowOutOfRange { index: usize, rows: usize },
    #[error("orbitope hint {matrix}: {reason}")]
    InvalidHint { matrix: usize, reason: String },
}

impl OrbitopeMatrix {
    pub fn num_rows(&self) -> usize {
        self.entries.len()
    }

    pub fn num_cols(&self) -> usize {
        self.columns.len()
    }

    /// Entry in row `i`, column `j` (0-based).
    pub fn entry(&self, i: usize, j: usize) -> Lit {
        self.entries[i][j]
    }

    pub fn rows(&self) -> &[Vec<Lit>] {
        &self.entries
    }

    pub fn column(&self, j: usize) -> Vec<Lit> {
        self.entries.iter().map(|r| r[j]).collect()
    }

    /// Clause indices of the columns, in column order.
    pub fn column_clauses(&self) -> &[usize] {
        &self.columns
    }

    /// The symmetry swapping rows `i` and `i + 1` (0-based).
    pub fn adjacent_row_swap(&self, i: usize) -> Result<&LitPerm, StructureError> {
        self.row_swaps.get(i).ok_or(StructureError::RowOutOfRange { index: i, rows: self.num_rows() })
    }

    pub fn row_swaps(&self) -> &[LitPerm] {
        &self.row_swaps
    }
}

/// Why candidate structures were not turned into orbitopes.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct AssemblyStats {
    pub row_swaps: usize,
    pub components: usize,
    pub dropped_columns: usize,
    pub skipped_components: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum ColumnAction {
    Transposition(Lit, Lit),
    Incompatible,
}

/// Groups row swaps that act on common columns, aligns their columns and
/// keeps the components that form orbitopes over unique literal clauses.
///
/// Matrices are returned in order of their smallest swap; a matrix is
/// skipped if one of its columns was used by an earlier matrix.
pub fn assemble_orbitope(
    swaps: &[RowSwapGenerator],
    f: &Formula,
    ulcs: &[usize],
) -> (Vec<OrbitopeMatrix>, AssemblyStats) {
    let mut stats = AssemblyStats { row_swaps: swaps.len(), ..AssemblyStats::default() };
    let mut ulc_of: HashMap<Lit, usize> = HashMap::new();
    for &c in ulcs {
        for &l in f.clause(c).lits() {
            ulc_of.insert(l, c);
        }
    }

    // How each swap acts on each ULC it touches.
    let actions: Vec<BTreeMap<usize, ColumnAction>> = swaps
        .iter()
        .map(|s| {
            let mut acts: BTreeMap<usize, ColumnAction> = BTreeMap::new();
            for &(a, b) in &s.transpositions {
                for (x, y) in [(a, b), (b, a)] {
                    let Some(&c) = ulc_of.get(&x) else { continue };
                    let act = if ulc_of.get(&y) == Some(&c) {
                        ColumnAction::Transposition(a, b)
                    } else {
                        ColumnAction::Incompatible
                    };
                    acts.entry(c)
                        .and_modify(|prev| {
                            if *prev != act {
                                *prev = ColumnAction::Incompatible;
                            }
                        })
                        .or_insert(act);
                }
            }
            acts
        })
        .collect();

    // Swaps sharing an entry of some column belong to the same component.
    let mut parent: Vec<usize> = (0..swaps.len()).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    let mut owner: HashMap<Lit, usize> = HashMap::new();
    for (si, acts) in actions.iter().enumerate() {
        for act in acts.values() {
            if let ColumnAction::Transposition(a, b) = *act {
                for x in [a, b] {
                    if let Some(&o) = owner.get(&x) {
                        let (r1, r2) = (find(&mut parent, o), find(&mut parent, si));
                        parent[r1] = r2;
                    } else {
                        owner.insert(x, si);
                    }
                }
            }
        }
    }
    let mut components: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for si in 0..swaps.len() {
        if actions[si].values().any(|a| matches!(a, ColumnAction::Transposition(..))) {
            let root = find(&mut parent, si);
            components.entry(root).or_default().push(si);
        }
    }
    let mut components: Vec<Vec<usize>> = components.into_values().collect();
    components.sort_by_key(|k| k[0]);
    stats.components = components.len();

    let mut used_columns: Vec<bool> = vec![false; f.num_clauses()];
    let mut out = Vec::new();
    for comp in components {
        match assemble_component(&comp, swaps, &actions, f) {
            Some((mat, dropped)) => {
                stats.dropped_columns += dropped;
                if mat.columns.iter().any(|&c| used_columns[c]) {
                    stats.skipped_components += 1;
                    continue;
                }
                for &c in &mat.columns {
                    used_columns[c] = true;
                }
                out.push(mat);
            }
            None => stats.skipped_components += 1,
        }
    }
    (out, stats)
}

/// Builds the matrix of one component, or `None` if fewer than two rows or
/// no column survive. Also returns the number of dropped columns.
fn assemble_component(
    comp: &[usize],
    swaps: &[RowSwapGenerator],
    actions: &[BTreeMap<usize, ColumnAction>],
    f: &Formula,
) -> Option<(OrbitopeMatrix, usize)> {
    // Candidate columns: ULCs on which every swap of the component is a single transposition.
    let mut touched: Vec<usize> = comp.iter().flat_map(|&s| actions[s].keys().copied()).collect();
    touched.sort_unstable();
    touched.dedup();
    let candidates: Vec<usize> = touched
        .iter()
        .copied()
        .filter(|c| comp.iter().all(|&s| matches!(actions[s].get(c), Some(ColumnAction::Transposition(..)))))
        .collect();
    let mut dropped = touched.len() - candidates.len();

    let transposition = |s: usize, c: usize| match actions[s][&c] {
        ColumnAction::Transposition(a, b) => (a, b),
        ColumnAction::Incompatible => unreachable!("candidates only hold transpositions"),
    };

    // Rows come from the first candidate column that is covered by the swaps and connected.
    let mut reference = None;
    for &c0 in &candidates {
        let lits = f.clause(c0).lits();
        let mut adj: HashMap<Lit, Vec<(usize, Lit)>> = HashMap::new();
        for &s in comp {
            let (a, b) = transposition(s, c0);
            adj.entry(a).or_default().push((s, b));
            adj.entry(b).or_default().push((s, a));
        }
        if canonical_form(lits).len() != lits.len() || lits.iter().any(|l| !adj.contains_key(l)) {
            dropped += 1;
            continue;
        }
        if !connected(lits, &adj) {
            dropped += 1;
            continue;
        }
        reference = Some((c0, adj));
        break;
    }
    let (c0, adj0) = reference?;
    let rows: Vec<Lit> = f.clause(c0).lits().to_vec();
    let n = rows.len();
    if n < 2 {
        return None;
    }

    let mut columns = vec![c0];
    let mut entries: Vec<Vec<Lit>> = rows.iter().map(|&l| vec![l]).collect();
    for &c in candidates.iter().filter(|&&c| c > c0) {
        let lits = f.clause(c).lits();
        if lits.len() != n || canonical_form(lits).len() != n {
            dropped += 1;
            continue;
        }
        // Try both ends of the first row's first transposition; the stored
        // clause order breaks ties.
        let (s_first, _) = adj0[&rows[0]][0];
        let (x, y) = transposition(s_first, c);
        let mut start = [x, y];
        start.sort_by_key(|l| lits.iter().position(|m| m == l));
        let aligned = start.iter().find_map(|&e| align_column(&rows, &adj0, e, |s| transposition(s, c)));
        match aligned {
            Some(col) if canonical_form(&col) == canonical_form(lits) => {
                for (row, e) in entries.iter_mut().zip(col) {
                    row.push(e);
                }
                columns.push(c);
            }
            _ => dropped += 1,
        }
    }

    // Adjacent row swaps, by conjugating along paths in the reference column's transposition graph.
    let mut row_swaps = Vec::with_capacity(n - 1);
    for i in 0..n - 1 {
        let path = path_swaps(rows[i], rows[i + 1], &adj0)?;
        let (last, init) = path.split_last().expect("distinct rows have a non-empty path");
        let p = init.iter().fold(LitPerm::identity(f.num_vars()), |acc, &s| acc.then(&swaps[s].perm));
        let sigma = p.then(&swaps[*last].perm).then(&p.inverse());
        row_swaps.push(sigma);
    }
    let mat = OrbitopeMatrix { entries, row_swaps, columns };
    if !check_matrix(&mat, f) {
        return None;
    }
    Some((mat, dropped))
}

fn connected(lits: &[Lit], adj: &HashMap<Lit, Vec<(usize, Lit)>>) -> bool {
    let mut seen = vec![lits[0]];
    let mut queue = VecDeque::from([lits[0]]);
    while let Some(x) = queue.pop_front() {
        for &(_, y) in adj.get(&x).map_or(&[][..], |v| v) {
            if !seen.contains(&y) {
                seen.push(y);
                queue.push_back(y);
            }
        }
    }
    lits.iter().all(|l| seen.contains(l))
}

/// Maps the reference rows onto another column: row 0 goes to `start`, and
/// every reference edge labelled `s` must map onto `s`'s transposition in
/// that column.
fn align_column(
    rows: &[Lit],
    adj0: &HashMap<Lit, Vec<(usize, Lit)>>,
    start: Lit,
    trans: impl Fn(usize) -> (Lit, Lit),
) -> Option<Vec<Lit>> {
    let mut image: HashMap<Lit, Lit> = HashMap::from([(rows[0], start)]);
    let mut queue = VecDeque::from([rows[0]]);
    while let Some(r) = queue.pop_front() {
        let e = image[&r];
        for &(s, r2) in &adj0[&r] {
            let (a, b) = trans(s);
            let e2 = if e == a {
                b
            } else if e == b {
                a
            } else {
                return None;
            };
            match image.get(&r2) {
                Some(&prev) if prev != e2 => return None,
                Some(_) => {}
                None => {
                    image.insert(r2, e2);
                    queue.push_back(r2);
                }
            }
        }
    }
    rows.iter().map(|r| image.get(r).copied()).collect()
}

/// Swap indices along a shortest path from `from` to `to`.
fn path_swaps(from: Lit, to: Lit, adj: &HashMap<Lit, Vec<(usize, Lit)>>) -> Option<Vec<usize>> {
    let mut prev: HashMap<Lit, (Lit, usize)> = HashMap::new();
    let mut queue = VecDeque::from([from]);
    while let Some(x) = queue.pop_front() {
        if x == to {
            let mut path = Vec::new();
            let mut cur = to;
            while cur != from {
                let (p, s) = prev[&cur];
                path.push(s);
                cur = p;
            }
            path.reverse();
            return Some(path);
        }
        for &(s, y) in &adj[&x] {
            if y != from && !prev.contains_key(&y) {
                prev.insert(y, (x, s));
                queue.push_back(y);
            }
        }
    }
    None
}

/// Checks that every column is a unique literal clause, entries are
/// distinct, and each stored swap exchanges exactly its two rows and is a
/// symmetry of `f`.
pub fn check_matrix(mat: &OrbitopeMatrix, f: &Formula) -> bool {
    let ulcs = find_ulcs(f);
    let n = mat.num_rows();
    let mut all: Vec<Lit> = mat.entries.iter().flatten().copied().collect();
    all.sort_unstable();
    let total = all.len();
    all.dedup();
    if all.len() != total || mat.row_swaps.len() + 1 != n {
        return false;
    }
    for (j, &c) in mat.columns.iter().enumerate() {
        if !ulcs.contains(&c) || canonical_form(&mat.column(j)) != canonical_form(f.clause(c).lits()) {
            return false;
        }
    }
    for (i, sigma) in mat.row_swaps.iter().enumerate() {
        for (r, row) in mat.entries.iter().enumerate() {
            let target = match r {
                _ if r == i => i + 1,
                _ if r == i + 1 => i,
                _ => r,
            };
            if row.iter().zip(&mat.entries[target]).any(|(&a, &b)| sigma.apply(a) != b) {
                return false;
            }
        }
        if !validate_symmetry(f, sigma) {
            return false;
        }
    }
    true
}

/// Reads orbitope hints: one row per line as signed literals, matrices
/// separated by blank lines, `c` comments. Every hint is re-validated: its
/// columns must be unique literal clauses and the plain swap of adjacent
/// rows must be a symmetry of `f`.
pub fn parse_orbitope_hints(text: &str, f: &Formula) -> Result<Vec<OrbitopeMatrix>, StructureError> {
    let mut blocks: Vec<Vec<Vec<Lit>>> = vec![Vec::new()];
    for line in text.lines() {
        let line = line.trim();
        if line.starts_with('c') {
            continue;
        }
        if line.is_empty() {
            if !blocks.last().expect("non-empty").is_empty() {
                blocks.push(Vec::new());
            }
            continue;
        }
        let m = blocks.len();
        let row = line
            .split_whitespace()
            .map(|t| match t.parse::<i32>() {
                Ok(v) if v != 0 && (v.unsigned_abs() as usize) <= f.num_vars() => Ok(Lit::from_dimacs(v)),
                _ => Err(StructureError::InvalidHint { matrix: m, reason: format!("bad literal `{t}`") }),
            })
            .collect::<Result<Vec<_>, _>>()?;
        blocks.last_mut().expect("non-empty").push(row);
    }
    if blocks.last().is_some_and(|b| b.is_empty()) {
        blocks.pop();
    }

    let ulcs = find_ulcs(f);
    let mut out = Vec::new();
    for (mi, rows) in blocks.into_iter().enumerate() {
        let bad = |reason: &str| StructureError::InvalidHint { matrix: mi + 1, reason: reason.to_string() };
        let m = rows[0].len();
        if rows.len() < 2 || m == 0 || rows.iter().any(|r| r.len() != m) {
            return Err(bad("need at least two rows of equal, non-zero length"));
        }
        let mut columns = Vec::with_capacity(m);
        for j in 0..m {
            let col: Vec<Lit> = canonical_form(&rows.iter().map(|r| r[j]).collect::<Vec<_>>());
            let c = ulcs
                .iter()
                .copied()
                .find(|&c| f.clause(c).canonical() == col.as_slice())
                .ok_or_else(|| bad(&format!("column {} is not a unique literal clause", j + 1)))?;
            columns.push(c);
        }
        let row_swaps = (0..rows.len() - 1)
            .map(|i| {
                let pairs: Vec<(Lit, Lit)> =
                    rows[i].iter().zip(&rows[i + 1]).flat_map(|(&a, &b)| [(a, b), (b, a)]).collect();
                LitPerm::from_pairs(f.num_vars(), &pairs).ok_or_else(|| bad("rows overlap"))
            })
            .collect::<Result<Vec<_>, _>>()?;
        let mat = OrbitopeMatrix { entries: rows, row_swaps, columns };
        if !check_matrix(&mat, f) {
            return Err(bad("adjacent row swaps are not symmetries of the formula"));
        }
        out.push(mat);
    }
    Ok(out)
}

/// Row swaps, assembly and the per-matrix check in one call.
pub fn detect_orbitopes(gens: &[LitPerm], f: &Formula) -> (Vec<OrbitopeMatrix>, AssemblyStats) {
    let swaps = detect_row_swaps(gens);
    assemble_orbitope(&swaps, f, &find_ulcs(f))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bench::{gen_php, php_var};

    fn perm(n: usize, pairs: &[(i32, i32)]) -> LitPerm {
        let p: Vec<_> = pairs.iter().map(|&(a, b)| (Lit::from_dimacs(a), Lit::from_dimacs(b))).collect();
        LitPerm::from_pairs(n, &p).unwrap()
    }

    fn p(holes: usize, i: usize, j: usize) -> Lit {
        php_var(holes, i, j).positive()
    }

    #[test]
    fn row_swap_detection() {
        let inst = gen_php(3, 2);
        let swaps = detect_row_swaps(&inst.generators[..1]);
        assert_eq!(swaps.len(), 1);
        let (a, b) = swaps[0].rows();
        // Three pigeons, both polarities.
        assert_eq!(a.len(), 6);
        assert_eq!(b.len(), 6);
        assert!(detect_row_swaps(&[perm(3, &[(1, 2), (2, 3), (3, 1)])]).is_empty());
        assert!(detect_row_swaps(&[LitPerm::identity(3)]).is_empty());
        assert!(detect_row_swaps(&[perm(2, &[(1, -1), (2, -2)])]).is_empty());
    }

    #[test]
    fn php_5_4_orbitope() {
        let inst = gen_php(5, 4);
        let (mats, _) = detect_orbitopes(&inst.generators, &inst.formula);
        assert_eq!(mats.len(), 1);
        let m = &mats[0];
        assert_eq!((m.num_rows(), m.num_cols()), (4, 5));
        for i in 0..4 {
            for j in 0..5 {
                assert_eq!(m.entry(i, j), p(4, i + 1, j + 1));
            }
        }
        assert_eq!(m.column_clauses(), &[0, 1, 2, 3, 4]);
        assert!(m.adjacent_row_swap(3).is_err());
    }

    #[test]
    fn php_3_2_single_swap() {
        let inst = gen_php(3, 2);
        let (mats, _) = detect_orbitopes(&inst.generators[..1], &inst.formula);
        assert_eq!(mats.len(), 1);
        assert_eq!((mats[0].num_rows(), mats[0].num_cols()), (2, 3));
    }

    #[test]
    fn non_adjacent_swaps_are_conjugated() {
        // Rows connected only through (1 3) and (3 2) swaps of holes.
        let inst = gen_php(4, 3);
        let n = 12;
        let hole_swap = |a: usize, b: usize| {
            let pairs: Vec<(i32, i32)> = (1..=4)
                .flat_map(|j| {
                    let (x, y) = (p(3, a, j).to_dimacs(), p(3, b, j).to_dimacs());
                    [(x, y), (y, x)]
                })
                .collect();
            perm(n, &pairs)
        };
        let gens = vec![hole_swap(1, 3), hole_swap(3, 2)];
        let (mats, _) = detect_orbitopes(&gens, &inst.formula);
        assert_eq!(mats.len(), 1);
        let m = &mats[0];
        assert_eq!(m.num_rows(), 3);
        let s01 = m.adjacent_row_swap(0).unwrap();
        for j in 0..4 {
            assert_eq!(s01.apply(m.entry(0, j)), m.entry(1, j));
            assert_eq!(s01.apply(m.entry(2, j)), m.entry(2, j));
        }
        assert!(check_matrix(m, &inst.formula));
    }

    #[test]
    fn disconnected_row_pairs_give_two_orbitopes() {
        // Two independent exactly-one-of-two blocks: (1 2) and (3 4) with their own ULCs.
        let f = Formula::from_dimacs_clauses(8, &[&[1, 2], &[3, 4], &[5, 6], &[7, 8]]);
        let gens = vec![perm(8, &[(1, 2), (2, 1), (3, 4), (4, 3)]), perm(8, &[(5, 6), (6, 5), (7, 8), (8, 7)])];
        let (mats, stats) = detect_orbitopes(&gens, &f);
        assert_eq!(mats.len(), 2);
        assert_eq!(stats.components, 2);
        assert!(mats.iter().all(|m| m.num_rows() == 2 && m.num_cols() == 2));
    }

    #[test]
    fn columns_that_are_not_ulcs_are_dropped() {
        // Clause [3 4] is not a ULC because 3 occurs twice.
        let f = Formula::from_dimacs_clauses(4, &[&[1, 2], &[3, 4], &[3, 4, -1, -2]]);
        let gens = vec![perm(4, &[(1, 2), (2, 1), (3, 4), (4, 3)])];
        let (mats, _) = detect_orbitopes(&gens, &f);
        assert_eq!(mats.len(), 1);
        assert_eq!(mats[0].column_clauses(), &[0]);
    }

    #[test]
    fn row_swaps_realize_all_row_orders() {
        use std::collections::HashSet;
        let inst = gen_php(5, 4);
        let (mats, _) = detect_orbitopes(&inst.generators, &inst.formula);
        let m = &mats[0];
        let col: Vec<Lit> = m.column(0);
        let mut seen: HashSet<Vec<Lit>> = HashSet::from([col.clone()]);
        let mut queue = VecDeque::from([col]);
        while let Some(c) = queue.pop_front() {
            for s in m.row_swaps() {
                let next: Vec<Lit> = c.iter().map(|&l| s.apply(l)).collect();
                if seen.insert(next.clone()) {
                    queue.push_back(next);
                }
            }
        }
        assert_eq!(seen.len(), 24);
    }

    #[test]
    fn hints_are_revalidated() {
        let inst = gen_php(3, 2);
        let mats = parse_orbitope_hints("c holes\n1 3 5\n2 4 6\n", &inst.formula).unwrap();
        assert_eq!((mats[0].num_rows(), mats[0].num_cols()), (2, 3));
        // Pigeons as rows: columns are not clauses.
        assert!(parse_orbitope_hints("1 2\n3 4\n", &inst.formula).is_err());
        assert!(parse_orbitope_hints("1 3 5\n2 4\n", &inst.formula).is_err());
        assert!(parse_orbitope_hints("1 3 9\n2 4 6\n", &inst.formula).is_err());
    }
}
