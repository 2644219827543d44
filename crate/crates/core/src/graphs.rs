//! Sparsity-graph constructions for tensors: the bipartite graph of a
//! matrix, the symmetrized adjacency graph, the column graph, and the
//! multipartite entry-clique graph of a higher-order tensor.
//!
//! Vertices carry two-level labels (part, index) so downstream code never
//! depends on the flat numbering; the flat numbering (part by part, in
//! order) exists only for file interchange.

use crate::tensor::{Scalar, SparseTensor};
use std::collections::BTreeSet;
use std::fmt::Write as _;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("operation requires an order-2 tensor, got order {0}")]
    WrongOrder(usize),
    #[error("operation requires a square matrix, got {rows}×{cols}")]
    NotSquare { rows: usize, cols: usize },
}

/// The role a vertex part plays. Keeps graphs self-describing so bags and
/// error messages can name vertices meaningfully.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PartKind {
    /// Tensor axis 0 (rows `a_i`).
    Rows,
    /// Tensor axis `l ≥ 1` (columns `x_i` of that axis).
    Columns(usize),
    /// Single-part graphs whose vertices are ambient coordinates.
    Coordinates,
    /// Zonotopes of a system.
    Zonotopes,
    /// Deduplicated segment directions of a zonotope system.
    Directions,
}

/// An undirected simple graph whose vertices are partitioned into labeled
/// parts. No self-loops; adjacency is stored symmetrically.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledGraph {
    parts: Vec<(PartKind, usize)>,
    adj: Vec<BTreeSet<usize>>,
}

impl LabeledGraph {
    /// Creates an edgeless graph with the given parts (kind, size).
    pub fn new(parts: Vec<(PartKind, usize)>) -> LabeledGraph {
        let n = parts.iter().map(|&(_, s)| s).sum();
        LabeledGraph {
            parts,
            adj: vec![BTreeSet::new(); n],
        }
    }

    pub fn parts(&self) -> &[(PartKind, usize)] {
        &self.parts
    }

    pub fn num_vertices(&self) -> usize {
        self.adj.len()
    }

    pub fn num_edges(&self) -> usize {
        self.adj.iter().map(|s| s.len()).sum::<usize>() / 2
    }

    /// First flat vertex id of the given part.
    pub fn part_offset(&self, part: usize) -> usize {
        self.parts[..part].iter().map(|&(_, s)| s).sum()
    }

    /// Flat vertex id of element `index` of part `part`.
    pub fn vertex(&self, part: usize, index: usize) -> usize {
        debug_assert!(index < self.parts[part].1);
        self.part_offset(part) + index
    }

    /// Two-level label (part, index) of a flat vertex id.
    pub fn label(&self, v: usize) -> (usize, usize) {
        let mut rest = v;
        for (p, &(_, size)) in self.parts.iter().enumerate() {
            if rest < size {
                return (p, rest);
            }
            rest -= size;
        }
        panic!("vertex {v} out of range");
    }

    /// Human-readable vertex name using 1-based indices, e.g. `a3` or `x2`.
    pub fn vertex_name(&self, v: usize) -> String {
        let (p, i) = self.label(v);
        let single_column_part = self.parts.len() <= 2;
        match self.parts[p].0 {
            PartKind::Rows => format!("a{}", i + 1),
            PartKind::Columns(l) if single_column_part => {
                let _ = l;
                format!("x{}", i + 1)
            }
            PartKind::Columns(l) => format!("x{}_{}", l, i + 1),
            PartKind::Coordinates => format!("v{}", i + 1),
            PartKind::Zonotopes => format!("z{}", i + 1),
            PartKind::Directions => format!("u{}", i + 1),
        }
    }

    /// Inserts the undirected edge {u, v}; self-loops are ignored.
    pub fn add_edge(&mut self, u: usize, v: usize) {
        if u == v {
            return;
        }
        self.adj[u].insert(v);
        self.adj[v].insert(u);
    }

    /// Inserts all edges of the clique on the given vertices.
    pub fn add_clique(&mut self, vs: &[usize]) {
        for i in 0..vs.len() {
            for j in i + 1..vs.len() {
                self.add_edge(vs[i], vs[j]);
            }
        }
    }

    pub fn neighbors(&self, v: usize) -> &BTreeSet<usize> {
        &self.adj[v]
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u].contains(&v)
    }

    /// All edges as (u, v) pairs with u < v, in sorted order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.num_edges());
        for (u, nbrs) in self.adj.iter().enumerate() {
            for &v in nbrs.range(u + 1..) {
                out.push((u, v));
            }
        }
        out
    }

    /// Serializes the graph in PACE 2017 `.gr` format (1-based flat ids).
    pub fn to_gr(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "p tw {} {}", self.num_vertices(), self.num_edges());
        for (u, v) in self.edges() {
            let _ = writeln!(s, "{} {}", u + 1, v + 1);
        }
        s
    }
}

/// The bipartite graph of a matrix: rows on one side, columns on the
/// other, one edge per nonzero entry.
pub fn bipartite_graph<R: Scalar>(m: &SparseTensor<R>) -> Result<LabeledGraph, GraphError> {
    if m.order() != 2 {
        return Err(GraphError::WrongOrder(m.order()));
    }
    let mut g = LabeledGraph::new(vec![
        (PartKind::Rows, m.lens()[0]),
        (PartKind::Columns(1), m.lens()[1]),
    ]);
    for (key, _) in m.iter() {
        let u = g.vertex(0, key[0]);
        let v = g.vertex(1, key[1]);
        g.add_edge(u, v);
    }
    Ok(g)
}

/// The adjacency graph of M + Mᵀ on a square matrix: one vertex per index,
/// an edge {i, j} (i ≠ j) whenever either of the entries (i, j), (j, i) is
/// nonzero. Diagonal entries produce no edges.
pub fn symmetrized_graph<R: Scalar>(m: &SparseTensor<R>) -> Result<LabeledGraph, GraphError> {
    if m.order() != 2 {
        return Err(GraphError::WrongOrder(m.order()));
    }
    if !m.is_square() {
        return Err(GraphError::NotSquare {
            rows: m.lens()[0],
            cols: m.lens()[1],
        });
    }
    let mut g = LabeledGraph::new(vec![(PartKind::Coordinates, m.lens()[0])]);
    for (key, _) in m.iter() {
        g.add_edge(key[0], key[1]);
    }
    Ok(g)
}

/// The column graph: vertices are the columns, and every row contributes a
/// clique on its support.
pub fn column_graph<R: Scalar>(m: &SparseTensor<R>) -> Result<LabeledGraph, GraphError> {
    if m.order() != 2 {
        return Err(GraphError::WrongOrder(m.order()));
    }
    let mut g = LabeledGraph::new(vec![(PartKind::Coordinates, m.lens()[1])]);
    for a in 0..m.lens()[0] {
        let support: Vec<usize> = m.row_entries(a).map(|(key, _)| key[1]).collect();
        g.add_clique(&support);
    }
    Ok(g)
}

/// The multipartite entry-clique graph of a tensor of any order: one part
/// per axis, and every nonzero entry contributes a clique on its
/// coordinates (one vertex per axis). For matrices this coincides with
/// `bipartite_graph`.
pub fn multipartite_graph<R: Scalar>(t: &SparseTensor<R>) -> LabeledGraph {
    let mut parts = vec![(PartKind::Rows, t.lens()[0])];
    for l in 1..t.order() {
        parts.push((PartKind::Columns(l), t.lens()[l]));
    }
    let mut g = LabeledGraph::new(parts);
    for (key, _) in t.iter() {
        let vs: Vec<usize> = key.iter().enumerate().map(|(p, &i)| g.vertex(p, i)).collect();
        g.add_clique(&vs);
    }
    g
}

#[cfg(test)]
mod tests {
    use super::*;
    use num::BigInt;

    fn int(v: i64) -> BigInt {
        BigInt::from(v)
    }

    fn dense_from(rows: &[&[i64]]) -> SparseTensor<BigInt> {
        let mut t = SparseTensor::new(vec![rows.len(), rows[0].len()]);
        for (i, row) in rows.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                if v != 0 {
                    t.set(vec![i, j], int(v));
                }
            }
        }
        t
    }

    fn diagonal(n: usize) -> SparseTensor<BigInt> {
        let mut t = SparseTensor::new(vec![n, n]);
        for i in 0..n {
            t.set(vec![i, i], int(1));
        }
        t
    }

    /// The 5×5 block-pattern matrix (rows a1,a2 on {x1,x3,x4}, a3 on
    /// {x2,x3,x4}, a4,a5 on {x2,x3,x5}).
    fn block_pattern() -> SparseTensor<BigInt> {
        dense_from(&[
            &[1, 0, 1, 1, 0],
            &[1, 0, 1, 1, 0],
            &[0, 1, 1, 1, 0],
            &[0, 1, 1, 0, 1],
            &[0, 1, 1, 0, 1],
        ])
    }

    #[test]
    fn bipartite_of_diagonal_is_perfect_matching() {
        let g = bipartite_graph(&diagonal(4)).unwrap();
        assert_eq!(g.num_vertices(), 8);
        assert_eq!(g.num_edges(), 4);
        for i in 0..4 {
            assert!(g.has_edge(g.vertex(0, i), g.vertex(1, i)));
            assert_eq!(g.neighbors(g.vertex(0, i)).len(), 1);
        }
    }

    #[test]
    fn bipartite_edge_count_equals_nonzero_count() {
        let t = block_pattern();
        let g = bipartite_graph(&t).unwrap();
        assert_eq!(g.num_edges(), t.num_entries());
        assert_eq!(g.num_edges(), 15);
    }

    #[test]
    fn bipartite_of_zero_matrix_is_edgeless() {
        let t: SparseTensor<BigInt> = SparseTensor::new(vec![3, 3]);
        let g = bipartite_graph(&t).unwrap();
        assert_eq!(g.num_vertices(), 6);
        assert_eq!(g.num_edges(), 0);
    }

    #[test]
    fn bipartite_is_two_colorable_by_part() {
        let g = bipartite_graph(&block_pattern()).unwrap();
        for (u, v) in g.edges() {
            assert_ne!(g.label(u).0, g.label(v).0);
        }
    }

    #[test]
    fn symmetrized_of_diagonal_is_edgeless() {
        let g = symmetrized_graph(&diagonal(5)).unwrap();
        assert_eq!(g.num_vertices(), 5);
        assert_eq!(g.num_edges(), 0);
    }

    #[test]
    fn symmetrized_of_bidiagonal_is_path() {
        let mut t = SparseTensor::new(vec![4, 4]);
        for i in 0..4 {
            t.set(vec![i, i], int(1));
            if i + 1 < 4 {
                t.set(vec![i, i + 1], int(2));
            }
        }
        let g = symmetrized_graph(&t).unwrap();
        assert_eq!(g.edges(), vec![(0, 1), (1, 2), (2, 3)]);
    }

    #[test]
    fn symmetrized_of_grid_matrix_contains_grid_graph() {
        // The 9×9 two-nonzeros-per-row matrix of the 3×3 grid family.
        let t = dense_from(&[
            &[0, 1, 0, 2, 0, 0, 0, 0, 0],
            &[0, 0, 1, 0, 2, 0, 0, 0, 0],
            &[0, 0, 3, 0, 0, 2, 0, 0, 0],
            &[0, 0, 0, 0, 1, 0, 2, 0, 0],
            &[0, 0, 0, 0, 0, 1, 0, 2, 0],
            &[0, 3, 0, 0, 0, 0, 0, 0, 2],
            &[0, 0, 0, 0, 0, 0, 3, 1, 0],
            &[0, 0, 0, 3, 0, 0, 0, 0, 1],
            &[3, 0, 0, 0, 0, 0, 0, 0, 0],
        ]);
        let g = symmetrized_graph(&t).unwrap();
        // Vertex i (0-based) sits at grid position (i / 3, i % 3).
        for i in 0..9 {
            if i % 3 != 2 {
                assert!(g.has_edge(i, i + 1), "missing horizontal edge {i}");
            }
            if i + 3 < 9 {
                assert!(g.has_edge(i, i + 3), "missing vertical edge {i}");
            }
        }
    }

    #[test]
    fn symmetrized_rejects_non_square() {
        let t: SparseTensor<BigInt> = SparseTensor::new(vec![2, 3]);
        assert_eq!(
            symmetrized_graph(&t).unwrap_err(),
            GraphError::NotSquare { rows: 2, cols: 3 }
        );
    }

    #[test]
    fn column_graph_of_diagonal_is_edgeless() {
        let g = column_graph(&diagonal(4)).unwrap();
        assert_eq!(g.num_vertices(), 4);
        assert_eq!(g.num_edges(), 0);
    }

    #[test]
    fn column_graph_of_block_pattern_is_triangle_chain() {
        let g = column_graph(&block_pattern()).unwrap();
        // Cliques on {x1,x3,x4}, {x2,x3,x4}, {x2,x3,x5} (0-based below).
        let expected = vec![(0, 2), (0, 3), (1, 2), (1, 3), (1, 4), (2, 3), (2, 4)];
        assert_eq!(g.edges(), expected);
    }

    #[test]
    fn column_graph_of_full_first_row_is_complete() {
        let mut t = diagonal(5);
        for j in 0..5 {
            t.set(vec![0, j], int(7));
        }
        let g = column_graph(&t).unwrap();
        assert_eq!(g.num_edges(), 5 * 4 / 2);
    }

    #[test]
    fn column_graph_is_projection_of_bipartite_graph() {
        let t = block_pattern();
        let gx = column_graph(&t).unwrap();
        let n = t.lens()[1];
        for x in 0..n {
            for y in x + 1..n {
                let shares_row = (0..t.lens()[0]).any(|a| {
                    t.get(&[a, x]).is_some() && t.get(&[a, y]).is_some()
                });
                assert_eq!(gx.has_edge(x, y), shares_row);
            }
        }
    }

    #[test]
    fn multipartite_of_order_three_diagonal_is_disjoint_triangles() {
        let mut t = SparseTensor::new(vec![3, 3, 3]);
        for i in 0..3 {
            t.set(vec![i, i, i], int(1));
        }
        let g = multipartite_graph(&t);
        assert_eq!(g.num_vertices(), 9);
        assert_eq!(g.num_edges(), 9);
        for i in 0..3 {
            let (a, x1, x2) = (g.vertex(0, i), g.vertex(1, i), g.vertex(2, i));
            assert!(g.has_edge(a, x1) && g.has_edge(a, x2) && g.has_edge(x1, x2));
        }
    }

    #[test]
    fn multipartite_of_matrix_equals_bipartite() {
        let t = block_pattern();
        assert_eq!(multipartite_graph(&t), bipartite_graph(&t).unwrap());
    }

    #[test]
    fn multipartite_single_entry_is_one_triangle() {
        let mut t = SparseTensor::new(vec![3, 3, 3]);
        t.set(vec![0, 1, 2], int(5));
        let g = multipartite_graph(&t);
        assert_eq!(g.num_edges(), 3);
        let isolated = (0..9).filter(|&v| g.neighbors(v).is_empty()).count();
        assert_eq!(isolated, 6);
    }

    #[test]
    fn gr_export_format() {
        let g = bipartite_graph(&diagonal(2)).unwrap();
        assert_eq!(g.to_gr(), "p tw 4 2\n1 3\n2 4\n");
    }

    #[test]
    fn vertex_names_are_part_aware() {
        let g = bipartite_graph(&diagonal(2)).unwrap();
        assert_eq!(g.vertex_name(0), "a1");
        assert_eq!(g.vertex_name(3), "x2");
        let mut t = SparseTensor::new(vec![2, 2, 2]);
        t.set(vec![0, 0, 0], int(1));
        let g3 = multipartite_graph(&t);
        assert_eq!(g3.vertex_name(3), "x1_2");
    }
}
