//! Independent oracles shared by the integration tests. Nothing here calls
//! the SVD-based code paths of the library.
#![allow(dead_code)]

use hodgeq_core::{CliqueComplex, Graph};
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;

/// Graph from an upper-triangle bit vector, row by row.
pub fn graph_from_bits(n: usize, bits: &[bool]) -> Graph {
    let mut edges = Vec::new();
    let mut t = 0;
    for u in 0..n {
        for v in u + 1..n {
            if bits[t] {
                edges.push((u, v));
            }
            t += 1;
        }
    }
    Graph::new(n, edges).unwrap()
}

pub fn arb_graph(min_n: usize, max_n: usize) -> impl Strategy<Value = Graph> {
    (min_n..=max_n).prop_flat_map(|n| {
        proptest::collection::vec(proptest::bool::weighted(0.6), n * (n - 1) / 2)
            .prop_map(move |bits| graph_from_bits(n, &bits))
    })
}

/// All cliques with `k + 1` vertices, found by scanning vertex subsets.
pub fn brute_force_simplices(g: &Graph, k: usize) -> Vec<Vec<usize>> {
    let n = g.n();
    let mut out = Vec::new();
    for mask in 0u32..(1 << n) {
        if mask.count_ones() as usize != k + 1 {
            continue;
        }
        let vs: Vec<usize> = (0..n).filter(|&v| mask & (1 << v) != 0).collect();
        let clique = vs.iter().enumerate().all(|(a, &u)| vs[a + 1..].iter().all(|&w| g.has_edge(u, w)));
        if clique {
            out.push(vs);
        }
    }
    out.sort();
    out
}

/// `B_k` from the alternating face formula on brute-force simplex lists.
pub fn brute_force_boundary(g: &Graph, k: usize) -> DMatrix<f64> {
    let rows = brute_force_simplices(g, k - 1);
    let cols = brute_force_simplices(g, k);
    let mut b = DMatrix::zeros(rows.len(), cols.len());
    for (j, s) in cols.iter().enumerate() {
        for pos in 0..s.len() {
            let mut face = s.clone();
            face.remove(pos);
            let i = rows.iter().position(|r| *r == face).unwrap();
            b[(i, j)] = if pos % 2 == 0 { 1.0 } else { -1.0 };
        }
    }
    b
}

/// Orthonormal basis of `{x : a x = 0}` from a row-reduced echelon form.
pub fn null_space(a: &DMatrix<f64>) -> DMatrix<f64> {
    let (rows, cols) = a.shape();
    let mut m = a.clone();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let (p, val) = (r..rows).map(|i| (i, m[(i, c)].abs())).fold((r, 0.0), |a, b| if b.1 > a.1 { b } else { a });
        if val < 1e-9 {
            continue;
        }
        m.swap_rows(r, p);
        let piv = m[(r, c)];
        for j in 0..cols {
            m[(r, j)] /= piv;
        }
        for i in 0..rows {
            if i != r {
                let f = m[(i, c)];
                if f != 0.0 {
                    for j in 0..cols {
                        let v = m[(r, j)];
                        m[(i, j)] -= f * v;
                    }
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    let mut basis: Vec<DVector<f64>> = Vec::new();
    for &f in &free {
        let mut v = DVector::zeros(cols);
        v[f] = 1.0;
        for (row, &pc) in pivots.iter().enumerate() {
            v[pc] = -m[(row, f)];
        }
        // Gram-Schmidt, twice for stability
        for _ in 0..2 {
            for q in &basis {
                let d = q.dot(&v);
                v -= q * d;
            }
        }
        basis.push(v.normalize());
    }
    if basis.is_empty() {
        DMatrix::zeros(cols, 0)
    } else {
        DMatrix::from_columns(&basis)
    }
}

/// Minimum-norm solution of `l x = rhs` for symmetric PSD `l` with `rhs`
/// in its range: LU on `l + Q Qᵀ` where `Q` spans the kernel.
pub fn min_norm_solve(l: &DMatrix<f64>, rhs: &DVector<f64>) -> DVector<f64> {
    let q = null_space(l);
    let shifted = l + &q * q.transpose();
    shifted.lu().solve(rhs).expect("shifted Laplacian is invertible")
}

/// `(B Bᵀ)⁺ B` column by column through [`min_norm_solve`].
pub fn hodgerank_operator_oracle(b: &DMatrix<f64>) -> DMatrix<f64> {
    let l = b * b.transpose();
    let q = null_space(&l);
    let lu = (&l + &q * q.transpose()).lu();
    let mut out = DMatrix::zeros(b.nrows(), b.ncols());
    for j in 0..b.ncols() {
        out.set_column(j, &lu.solve(&b.column(j).into_owned()).unwrap());
    }
    out
}

/// Orthogonal projector onto the column space of `a`, from a kernel basis
/// of `aᵀ`: `I - Q Qᵀ`.
pub fn range_projector_oracle(a: &DMatrix<f64>) -> DMatrix<f64> {
    let q = null_space(&a.transpose());
    DMatrix::identity(a.nrows(), a.nrows()) - &q * q.transpose()
}

pub fn complex_with_triangles(g: Graph) -> CliqueComplex {
    CliqueComplex::build_full(g, 3).unwrap()
}

pub fn max_abs_diff(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    (a - b).abs().max()
}
