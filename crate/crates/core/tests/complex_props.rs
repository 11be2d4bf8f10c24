mod common;

use common::*;
use hodgeq_core::linalg::spectral_norm;
use hodgeq_core::{CliqueComplex, Graph};
use nalgebra::DMatrix;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn simplices_match_brute_force(g in arb_graph(2, 8)) {
        let c = CliqueComplex::build(g.clone(), g.n() - 1).unwrap();
        for k in 0..g.n() {
            let expect = brute_force_simplices(&g, k);
            let got: Vec<Vec<usize>> = c.simplices(k).iter().map(|s| s.vertices().to_vec()).collect();
            prop_assert_eq!(got, expect);
        }
    }

    #[test]
    fn boundaries_match_face_formula(g in arb_graph(2, 8)) {
        let c = CliqueComplex::build_full(g.clone(), 4).unwrap();
        for k in 1..=c.max_dim() {
            prop_assert_eq!(c.boundary_dense(k), brute_force_boundary(&g, k));
        }
    }

    #[test]
    fn boundary_of_boundary_is_zero(g in arb_graph(3, 9)) {
        let c = CliqueComplex::build_full(g, 5).unwrap();
        for k in 2..=c.max_dim() {
            let lower = c.boundary_matrix(k - 1).unwrap();
            let upper = c.boundary_matrix(k).unwrap();
            prop_assert!(lower.sparse_product(&upper).is_empty());
        }
    }

    #[test]
    fn columns_have_k_plus_one_entries(g in arb_graph(2, 9)) {
        let c = CliqueComplex::build_full(g, 5).unwrap();
        for k in 1..=c.max_dim() {
            let b = c.boundary_matrix(k).unwrap();
            prop_assert!(b.column_weights().iter().all(|&w| w == k + 1));
            prop_assert!(b.entries.iter().all(|e| e.2 == 1 || e.2 == -1));
        }
    }

    #[test]
    fn singular_values_bounded_by_sqrt_n(g in arb_graph(2, 10)) {
        let c = CliqueComplex::build_full(g, 4).unwrap();
        let bound = (c.n() as f64).sqrt() + 1e-9;
        for k in 1..=c.max_dim() {
            prop_assert!(spectral_norm(&c.boundary_dense(k)) <= bound);
        }
    }

    #[test]
    fn projectors_are_an_orthogonal_resolution(g in arb_graph(3, 8)) {
        let c = CliqueComplex::build_full(g, 3).unwrap();
        for k in 1..=c.max_dim() {
            if c.count(k) == 0 {
                continue;
            }
            let p = c.hodge_projectors(k).unwrap();
            let id = DMatrix::<f64>::identity(c.count(k), c.count(k));
            for m in [&p.grad, &p.curl, &p.harm] {
                prop_assert!(max_abs_diff(&(m * m), m) < 1e-10);
                prop_assert!(max_abs_diff(m, &m.transpose()) < 1e-12);
            }
            prop_assert!((&p.grad * &p.curl).abs().max() < 1e-10);
            prop_assert!((&p.grad * &p.harm).abs().max() < 1e-10);
            prop_assert!((&p.curl * &p.harm).abs().max() < 1e-10);
            prop_assert!(max_abs_diff(&(&p.grad + &p.curl + &p.harm), &id) < 1e-12);
            // independent construction from RREF kernels
            prop_assert!(max_abs_diff(&p.grad, &range_projector_oracle(&c.boundary_dense(k).transpose())) < 1e-9);
            if k < c.max_dim() {
                prop_assert!(max_abs_diff(&p.curl, &range_projector_oracle(&c.boundary_dense(k + 1))) < 1e-9);
            }
        }
    }

    #[test]
    fn betti_numbers_follow_rank_nullity(g in arb_graph(2, 8)) {
        let c = CliqueComplex::build_full(g, 3).unwrap();
        for k in 0..c.max_dim() {
            let rank = |m: DMatrix<f64>| m.ncols() - null_space(&m).ncols();
            let dim = c.count(k);
            let rank_k = if k == 0 { 0 } else { rank(c.boundary_dense(k)) };
            let rank_up = rank(c.boundary_dense(k + 1));
            prop_assert_eq!(c.betti_number(k).unwrap(), dim - rank_k - rank_up);
        }
    }

    #[test]
    fn laplacian_parts(g in arb_graph(2, 8)) {
        let c = CliqueComplex::build_full(g, 3).unwrap();
        for k in 0..=c.max_dim() {
            let l = c.hodge_laplacian(k).unwrap();
            let down = c.boundary_dense(k);
            let up = c.boundary_dense(k + 1);
            prop_assert_eq!(&l.lower, &(down.transpose() * &down));
            prop_assert_eq!(&l.upper, &(&up * up.transpose()));
            prop_assert_eq!(&l.full, &(&l.lower + &l.upper));
        }
    }
}

#[test]
fn betti_zero_counts_components() {
    let g = Graph::new(7, [(0, 1), (1, 2), (3, 4)]).unwrap();
    let c = CliqueComplex::build(g.clone(), 1).unwrap();
    assert_eq!(c.betti_number(0).unwrap(), g.components());
    assert_eq!(g.components(), 4);
}

#[test]
fn octahedron_has_a_void() {
    // complete tripartite K_{2,2,2}: the boundary of an octahedron
    let mut edges = Vec::new();
    for u in 0..6 {
        for v in u + 1..6 {
            if u / 2 != v / 2 {
                edges.push((u, v));
            }
        }
    }
    let c = CliqueComplex::build_full(Graph::new(6, edges).unwrap(), 3).unwrap();
    assert_eq!(c.summary().counts, vec![6, 12, 8]);
    assert_eq!(c.betti_number(0).unwrap(), 1);
    assert_eq!(c.betti_number(1).unwrap(), 0);
    assert_eq!(c.betti_number(2).unwrap(), 1);
}
