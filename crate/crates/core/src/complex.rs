//! Clique complexes, boundary matrices, Hodge Laplacians and the Hodge
//! decomposition of chain spaces.
//!
//! Simplices are stored with strictly increasing vertex lists, which fixes the
//! positive orientation of every simplex. Removing the vertex at position `i`
//! of a `k`-simplex contributes a face with sign `(-1)^i`, so `B_{k-1} B_k = 0`
//! holds exactly in integer arithmetic.

use std::collections::HashMap;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{HodgeError, Result};
use crate::linalg::{self, ThinSvd};

/// Simple undirected graph on vertices `0..n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: Vec<(usize, usize)>,
    adjacency: Vec<bool>,
}

impl Graph {
    /// Builds a graph from unordered vertex pairs. Pairs are normalized to
    /// `(min, max)`; self-loops, duplicates and out-of-range ids are rejected.
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut adjacency = vec![false; n * n];
        let mut list = Vec::new();
        for (a, b) in edges {
            if a >= n || b >= n {
                return Err(HodgeError::InvalidGraph(format!(
                    "edge ({a}, {b}) has a vertex outside 0..{n}"
                )));
            }
            if a == b {
                return Err(HodgeError::InvalidGraph(format!("self-loop on vertex {a}")));
            }
            let (u, v) = (a.min(b), a.max(b));
            if adjacency[u * n + v] {
                return Err(HodgeError::InvalidGraph(format!("duplicate edge ({u}, {v})")));
            }
            adjacency[u * n + v] = true;
            adjacency[v * n + u] = true;
            list.push((u, v));
        }
        list.sort_unstable();
        Ok(Graph { n, edges: list, adjacency })
    }

    pub fn complete(n: usize) -> Self {
        let edges = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v)));
        Graph::new(n, edges).expect("complete graph is valid")
    }

    pub fn path(n: usize) -> Self {
        Graph::new(n, (1..n).map(|v| (v - 1, v))).expect("path graph is valid")
    }

    pub fn cycle(n: usize) -> Self {
        assert!(n >= 3, "a cycle needs at least three vertices");
        Graph::new(n, (0..n).map(|v| (v, (v + 1) % n))).expect("cycle graph is valid")
    }

    /// Parses an edge list: one `u v` pair per line, `#` starts a comment.
    /// A line holding a single integer declares the vertex count; otherwise
    /// `n` is one more than the largest vertex id.
    pub fn from_edge_list(text: &str) -> Result<Self> {
        let mut declared_n = None;
        let mut edges = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let parse = |tok: &str| {
                tok.parse::<usize>().map_err(|_| {
                    HodgeError::InvalidGraph(format!("line {}: bad vertex id {tok:?}", lineno + 1))
                })
            };
            let toks: Vec<&str> = line.split_whitespace().collect();
            match toks.as_slice() {
                [count] => declared_n = Some(parse(count)?),
                [u, v] => edges.push((parse(u)?, parse(v)?)),
                _ => {
                    return Err(HodgeError::InvalidGraph(format!(
                        "line {}: expected \"u v\", got {line:?}",
                        lineno + 1
                    )))
                }
            }
        }
        let inferred = edges.iter().map(|&(u, v)| u.max(v) + 1).max().unwrap_or(0);
        let n = declared_n.unwrap_or(inferred);
        if n == 0 {
            return Err(HodgeError::EmptyData);
        }
        Graph::new(n, edges)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.n && v < self.n && self.adjacency[u * self.n + v]
    }

    /// Number of connected components (isolated vertices count).
    pub fn components(&self) -> usize {
        let mut parent: Vec<usize> = (0..self.n).collect();
        fn find(p: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while p[r] != r {
                r = p[r];
            }
            let mut c = x;
            while p[c] != r {
                let next = p[c];
                p[c] = r;
                c = next;
            }
            r
        }
        let mut count = self.n;
        for &(u, v) in &self.edges {
            let (a, b) = (find(&mut parent, u), find(&mut parent, v));
            if a != b {
                parent[a] = b;
                count -= 1;
            }
        }
        count
    }
}

/// Simplex with a strictly increasing vertex list (positive orientation).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct OrientedSimplex(Vec<usize>);

impl OrientedSimplex {
    /// Sorts the vertices; rejects repeated vertices.
    pub fn new(mut vertices: Vec<usize>) -> Result<Self> {
        vertices.sort_unstable();
        if vertices.windows(2).any(|w| w[0] == w[1]) {
            return Err(HodgeError::InvalidGraph(format!("repeated vertex in simplex {vertices:?}")));
        }
        Ok(OrientedSimplex(vertices))
    }

    pub fn vertices(&self) -> &[usize] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len().saturating_sub(1)
    }

    /// Faces obtained by dropping the vertex at each position, paired with the
    /// sign `(-1)^position`.
    pub fn signed_faces(&self) -> impl Iterator<Item = (OrientedSimplex, i8)> + '_ {
        (0..self.0.len()).map(move |pos| {
            let mut face = self.0.clone();
            face.remove(pos);
            (OrientedSimplex(face), if pos % 2 == 0 { 1 } else { -1 })
        })
    }
}

/// Sparse ±1 matrix of the boundary map from `k`-chains to `(k-1)`-chains.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundaryMatrix {
    pub k: usize,
    pub rows: usize,
    pub cols: usize,
    /// `(row, col, ±1)`, ordered by column then row.
    pub entries: Vec<(usize, usize, i8)>,
}

impl BoundaryMatrix {
    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.rows, self.cols);
        for &(r, c, v) in &self.entries {
            m[(r, c)] = v as f64;
        }
        m
    }

    /// Nonzero entries of `self * rhs`, computed in integers.
    pub fn sparse_product(&self, rhs: &BoundaryMatrix) -> Vec<(usize, usize, i64)> {
        assert_eq!(self.cols, rhs.rows, "inner dimensions must agree");
        let mut by_col: Vec<Vec<(usize, i8)>> = vec![Vec::new(); self.cols];
        for &(r, c, v) in &self.entries {
            by_col[c].push((r, v));
        }
        let mut out = Vec::new();
        let mut acc: HashMap<usize, i64> = HashMap::new();
        let mut current = None;
        let flush = |acc: &mut HashMap<usize, i64>, col: usize, out: &mut Vec<(usize, usize, i64)>| {
            let mut nz: Vec<_> = acc.drain().filter(|&(_, v)| v != 0).map(|(r, v)| (r, col, v)).collect();
            nz.sort_unstable();
            out.extend(nz);
        };
        for &(mid, col, w) in &rhs.entries {
            if current != Some(col) {
                if let Some(prev) = current {
                    flush(&mut acc, prev, &mut out);
                }
                current = Some(col);
            }
            for &(r, v) in &by_col[mid] {
                *acc.entry(r).or_insert(0) += (v as i64) * (w as i64);
            }
        }
        if let Some(prev) = current {
            flush(&mut acc, prev, &mut out);
        }
        out
    }

    /// Nonzero count of each column.
    pub fn column_weights(&self) -> Vec<usize> {
        let mut w = vec![0; self.cols];
        for &(_, c, _) in &self.entries {
            w[c] += 1;
        }
        w
    }
}

/// Clique complex of a graph truncated at `max_dim`.
#[derive(Clone, Debug)]
pub struct CliqueComplex {
    graph: Graph,
    max_dim: usize,
    simplices: Vec<Vec<OrientedSimplex>>,
    index: Vec<HashMap<OrientedSimplex, usize>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComplexSummary {
    pub n: usize,
    pub max_dim: usize,
    pub counts: Vec<usize>,
}

/// `L_k = L_k^lower + L_k^upper` with `L^lower = B_kᵀB_k`, `L^upper = B_{k+1}B_{k+1}ᵀ`.
#[derive(Clone, Debug)]
pub struct HodgeLaplacian {
    pub full: DMatrix<f64>,
    pub lower: DMatrix<f64>,
    pub upper: DMatrix<f64>,
}

/// Orthogonal projectors of the Hodge decomposition of the `k`-chain space.
#[derive(Clone, Debug)]
pub struct HodgeProjectors {
    /// onto im(B_kᵀ)
    pub grad: DMatrix<f64>,
    /// onto im(B_{k+1})
    pub curl: DMatrix<f64>,
    /// onto ker(L_k)
    pub harm: DMatrix<f64>,
}

impl CliqueComplex {
    /// Enumerates every clique with at most `max_dim + 1` vertices.
    pub fn build(graph: Graph, max_dim: usize) -> Result<Self> {
        let n = graph.n();
        if n == 0 || max_dim > n - 1 {
            return Err(HodgeError::DimensionOutOfRange {
                k: max_dim,
                min: 0,
                max: n.saturating_sub(1),
            });
        }
        let mut simplices: Vec<Vec<OrientedSimplex>> = vec![Vec::new(); max_dim + 1];
        let mut stack = Vec::with_capacity(max_dim + 1);
        for v in 0..n {
            stack.push(v);
            let candidates: Vec<usize> = (v + 1..n).filter(|&w| graph.has_edge(v, w)).collect();
            extend_cliques(&graph, &mut stack, &candidates, max_dim, &mut simplices);
            stack.pop();
        }
        let index = simplices
            .iter()
            .map(|list| list.iter().cloned().enumerate().map(|(i, s)| (s, i)).collect())
            .collect();
        Ok(CliqueComplex { graph, max_dim, simplices, index })
    }

    /// Builds up to the clique number of the graph (capped at `cap`).
    pub fn build_full(graph: Graph, cap: usize) -> Result<Self> {
        let n = graph.n();
        let full = Self::build(graph, cap.min(n.saturating_sub(1)))?;
        let top = (0..=full.max_dim).rev().find(|&k| full.count(k) > 0).unwrap_or(0);
        if top == full.max_dim {
            return Ok(full);
        }
        Self::build(full.graph, top)
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn n(&self) -> usize {
        self.graph.n()
    }

    pub fn max_dim(&self) -> usize {
        self.max_dim
    }

    /// Number of `k`-simplices; zero above `max_dim`.
    pub fn count(&self, k: usize) -> usize {
        self.simplices.get(k).map_or(0, Vec::len)
    }

    pub fn simplices(&self, k: usize) -> &[OrientedSimplex] {
        self.simplices.get(k).map_or(&[], Vec::as_slice)
    }

    pub fn index_of(&self, simplex: &OrientedSimplex) -> Option<usize> {
        self.index.get(simplex.dim())?.get(simplex).copied()
    }

    pub fn summary(&self) -> ComplexSummary {
        ComplexSummary {
            n: self.n(),
            max_dim: self.max_dim,
            counts: self.simplices.iter().map(Vec::len).collect(),
        }
    }

    fn check_dim(&self, k: usize, min: usize) -> Result<()> {
        if k < min || k > self.max_dim {
            Err(HodgeError::DimensionOutOfRange { k, min, max: self.max_dim })
        } else {
            Ok(())
        }
    }

    /// Boundary matrix `B_k` for `1 <= k <= max_dim`.
    pub fn boundary_matrix(&self, k: usize) -> Result<BoundaryMatrix> {
        self.check_dim(k, 1)?;
        let mut entries = Vec::with_capacity(self.count(k) * (k + 1));
        for (col, simplex) in self.simplices[k].iter().enumerate() {
            let mut column: Vec<(usize, usize, i8)> = simplex
                .signed_faces()
                .map(|(face, sign)| {
                    let row = self.index[k - 1][&face];
                    (row, col, sign)
                })
                .collect();
            column.sort_unstable();
            entries.extend(column);
        }
        Ok(BoundaryMatrix { k, rows: self.count(k - 1), cols: self.count(k), entries })
    }

    /// Dense `B_k`; an empty `0 x n_0` matrix for `k = 0`, and `n_{k-1} x 0`
    /// just above `max_dim`.
    pub fn boundary_dense(&self, k: usize) -> DMatrix<f64> {
        if k == 0 {
            return DMatrix::zeros(0, self.count(0));
        }
        if k > self.max_dim {
            return DMatrix::zeros(self.count(k - 1), 0);
        }
        self.boundary_matrix(k).expect("checked range").to_dense()
    }

    pub fn hodge_laplacian(&self, k: usize) -> Result<HodgeLaplacian> {
        self.check_dim(k, 0)?;
        let b_k = self.boundary_dense(k);
        let b_up = self.boundary_dense(k + 1);
        let lower = b_k.transpose() * &b_k;
        let upper = &b_up * b_up.transpose();
        let full = &lower + &upper;
        Ok(HodgeLaplacian { full, lower, upper })
    }

    pub fn hodge_projectors(&self, k: usize) -> Result<HodgeProjectors> {
        self.check_dim(k, 0)?;
        let grad = ThinSvd::new(&self.boundary_dense(k)).corange_projector();
        let curl = ThinSvd::new(&self.boundary_dense(k + 1)).range_projector();
        let nk = self.count(k);
        let harm = DMatrix::<f64>::identity(nk, nk) - &grad - &curl;
        Ok(HodgeProjectors { grad, curl, harm })
    }

    /// `dim ker(L_k)` from the spectrum of the Hodge Laplacian.
    pub fn betti_number(&self, k: usize) -> Result<usize> {
        let lap = self.hodge_laplacian(k)?;
        Ok(linalg::kernel_dimension(&linalg::symmetric_eigenvalues(&lap.full)))
    }
}

fn extend_cliques(
    graph: &Graph,
    stack: &mut Vec<usize>,
    candidates: &[usize],
    max_dim: usize,
    out: &mut [Vec<OrientedSimplex>],
) {
    out[stack.len() - 1].push(OrientedSimplex(stack.clone()));
    if stack.len() > max_dim {
        return;
    }
    for (i, &w) in candidates.iter().enumerate() {
        stack.push(w);
        let next: Vec<usize> = candidates[i + 1..].iter().copied().filter(|&x| graph.has_edge(w, x)).collect();
        extend_cliques(graph, stack, &next, max_dim, out);
        stack.pop();
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn k3() -> CliqueComplex {
        CliqueComplex::build(Graph::complete(3), 2).unwrap()
    }

    fn hollow_triangle() -> CliqueComplex {
        CliqueComplex::build(Graph::complete(3), 1).unwrap()
    }

    #[test]
    fn counts_of_small_complexes() {
        assert_eq!(k3().summary().counts, vec![3, 3, 1]);
        let path = CliqueComplex::build(Graph::path(3), 2).unwrap();
        assert_eq!(path.count(2), 0);
        let k5 = CliqueComplex::build(Graph::complete(5), 3).unwrap();
        assert_eq!(k5.count(3), 5);
        assert_eq!(k5.count(2), 10);
    }

    #[test]
    fn k5_matches_brute_force() {
        // every 4-subset of K5 is a clique
        let k5 = CliqueComplex::build(Graph::complete(5), 3).unwrap();
        let mut brute = Vec::new();
        for mask in 0u32..32 {
            if mask.count_ones() == 4 {
                brute.push((0..5).filter(|b| mask >> b & 1 == 1).collect::<Vec<usize>>());
            }
        }
        brute.sort();
        let got: Vec<Vec<usize>> = k5.simplices(3).iter().map(|s| s.vertices().to_vec()).collect();
        assert_eq!(got, brute);
    }

    #[test]
    fn max_dim_out_of_range() {
        assert!(matches!(
            CliqueComplex::build(Graph::complete(3), 3),
            Err(HodgeError::DimensionOutOfRange { .. })
        ));
    }

    #[test]
    fn invalid_graphs_rejected() {
        assert!(Graph::new(3, [(0, 0)]).is_err());
        assert!(Graph::new(3, [(0, 1), (1, 0)]).is_err());
        assert!(Graph::new(3, [(0, 3)]).is_err());
    }

    #[test]
    fn triangle_boundary_column() {
        let b2 = k3().boundary_matrix(2).unwrap().to_dense();
        assert_eq!(b2.column(0).iter().cloned().collect::<Vec<_>>(), vec![1.0, -1.0, 1.0]);
    }

    #[test]
    fn edge_boundary() {
        let c = CliqueComplex::build(Graph::complete(2), 1).unwrap();
        let b1 = c.boundary_matrix(1).unwrap().to_dense();
        assert_eq!(b1.as_slice(), &[-1.0, 1.0]);
    }

    #[test]
    fn boundary_rejects_bad_k() {
        assert!(k3().boundary_matrix(0).is_err());
        assert!(k3().boundary_matrix(3).is_err());
    }

    #[test]
    fn boundary_squares_to_zero_on_k3() {
        let c = k3();
        let b1 = c.boundary_matrix(1).unwrap();
        let b2 = c.boundary_matrix(2).unwrap();
        assert!(b1.sparse_product(&b2).is_empty());
    }

    #[test]
    fn graph_laplacian_of_k3() {
        let lap = k3().hodge_laplacian(0).unwrap();
        let b1 = k3().boundary_dense(1);
        let oracle = &b1 * b1.transpose();
        assert_eq!(lap.full, oracle);
        for i in 0..3 {
            for j in 0..3 {
                let expect = if i == j { 2.0 } else { -1.0 };
                assert_eq!(lap.full[(i, j)], expect);
            }
        }
        assert_eq!(lap.lower, DMatrix::zeros(3, 3));
    }

    #[test]
    fn middle_laplacian_sums_both_parts() {
        let c = k3();
        let lap = c.hodge_laplacian(1).unwrap();
        let b1 = c.boundary_dense(1);
        let b2 = c.boundary_dense(2);
        let expect = b1.transpose() * &b1 + &b2 * b2.transpose();
        assert_eq!(lap.full, expect);
        // top dimension has no upper part
        assert_eq!(c.hodge_laplacian(2).unwrap().upper, DMatrix::zeros(1, 1));
    }

    #[test]
    fn curl_direction_on_k3() {
        let p = k3().hodge_projectors(1).unwrap();
        let s = nalgebra::DVector::from_vec(vec![1.0, -1.0, 1.0]);
        assert!((&p.curl * &s - &s).norm() < 1e-12);
        assert!((&p.grad * &s).norm() < 1e-12);
    }

    #[test]
    fn betti_numbers() {
        assert_eq!(k3().betti_number(0).unwrap(), 1);
        assert_eq!(k3().betti_number(1).unwrap(), 0);
        assert_eq!(hollow_triangle().betti_number(1).unwrap(), 1);
        let p = hollow_triangle().hodge_projectors(1).unwrap();
        assert!((p.harm.trace() - 1.0).abs() < 1e-10);
        // two components
        let g = Graph::new(4, [(0, 1), (2, 3)]).unwrap();
        let c = CliqueComplex::build(g, 1).unwrap();
        assert_eq!(c.betti_number(0).unwrap(), 2);
    }

    #[test]
    fn hollow_triangle_nullity_by_eigendecomposition() {
        let lap = hollow_triangle().hodge_laplacian(1).unwrap();
        let eig = linalg::symmetric_eigenvalues(&lap.full);
        assert_eq!(eig.iter().filter(|l| l.abs() < 1e-9).count(), 1);
    }

    #[test]
    fn parses_edge_lists() {
        let g = Graph::from_edge_list("# path\n0 1\n1 2 # tail\n\n").unwrap();
        assert_eq!(g.n(), 3);
        assert_eq!(g.edges(), &[(0, 1), (1, 2)]);
        let g = Graph::from_edge_list("5\n0 1\n").unwrap();
        assert_eq!(g.n(), 5);
        let err = Graph::from_edge_list("0 1\n1 x\n").unwrap_err();
        assert!(err.to_string().contains("line 2"));
        assert!(Graph::from_edge_list("# nothing\n").is_err());
    }

    #[test]
    fn simplices_are_lexicographic() {
        let g = Graph::complete(5);
        let c = CliqueComplex::build(g, 4).unwrap();
        for k in 0..=4 {
            let s = c.simplices(k);
            assert!(s.windows(2).all(|w| w[0] < w[1]));
            for (i, simplex) in s.iter().enumerate() {
                assert_eq!(c.index_of(simplex), Some(i));
            }
        }
    }

    #[test]
    fn build_full_trims_empty_top() {
        let c = CliqueComplex::build_full(Graph::path(4), 3).unwrap();
        assert_eq!(c.max_dim(), 1);
    }
}
