//! Exact classical k-HodgeRank.
//!
//! Scores are the minimum-norm least-squares solution of `B_kᵀ x ≈ s`, i.e.
//! `x = (B_k B_kᵀ)⁺ B_k s`. This is the reference every simulated quantum
//! quantity is checked against.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::complex::{CliqueComplex, Graph};
use crate::error::{HodgeError, Result};
use crate::linalg::{self, ThinSvd};

/// Default multiplier applied to `sqrt(n)/zeta_min` when no kappa is given.
pub const DEFAULT_KAPPA_FACTOR: f64 = 1.1;

/// One comparison: `value > 0` means alternative `j` is preferred over `i`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRecord {
    pub voter: String,
    pub i: usize,
    pub j: usize,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PairwiseData {
    n: usize,
    records: Vec<ComparisonRecord>,
}

impl PairwiseData {
    /// Records with `i > j` are flipped to `(j, i, -value)`. `n` defaults to
    /// one more than the largest alternative id.
    pub fn new(records: Vec<ComparisonRecord>, n: Option<usize>) -> Result<Self> {
        if records.is_empty() {
            return Err(HodgeError::EmptyData);
        }
        let mut normalized = Vec::with_capacity(records.len());
        for r in records {
            if r.i == r.j {
                return Err(HodgeError::InvalidParameter(format!(
                    "voter {} compares alternative {} with itself",
                    r.voter, r.i
                )));
            }
            if !r.value.is_finite() {
                return Err(HodgeError::InvalidParameter(format!("non-finite value from voter {}", r.voter)));
            }
            normalized.push(if r.i < r.j {
                r
            } else {
                ComparisonRecord { voter: r.voter, i: r.j, j: r.i, value: -r.value }
            });
        }
        let needed = normalized.iter().map(|r| r.j + 1).max().unwrap_or(0);
        let n = n.unwrap_or(needed);
        if n < needed {
            return Err(HodgeError::InvalidParameter(format!(
                "alternative id {} outside 0..{n}",
                needed - 1
            )));
        }
        Ok(PairwiseData { n, records: normalized })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn records(&self) -> &[ComparisonRecord] {
        &self.records
    }
}

/// Real values on the `k`-simplices of a complex, in canonical index order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimplicialSignal {
    pub k: usize,
    values: Vec<f64>,
    norm: f64,
}

impl SimplicialSignal {
    pub fn new(k: usize, values: Vec<f64>) -> Self {
        let norm = values.iter().map(|v| v * v).sum::<f64>().sqrt();
        SimplicialSignal { k, values, norm }
    }

    pub fn from_vector(k: usize, v: &DVector<f64>) -> Self {
        Self::new(k, v.iter().cloned().collect())
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn norm(&self) -> f64 {
        self.norm
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn to_vector(&self) -> DVector<f64> {
        DVector::from_column_slice(&self.values)
    }

    /// Checks the signal lives on the `k`-simplices of `complex`.
    pub fn check_against(&self, complex: &CliqueComplex) -> Result<()> {
        let expected = complex.count(self.k);
        if self.values.len() != expected {
            return Err(HodgeError::DimensionMismatch { expected, actual: self.values.len() });
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RankResult {
    pub k: usize,
    pub scores: Vec<f64>,
    pub ranking: Vec<usize>,
    #[serde(rename = "R")]
    pub consistency: f64,
    #[serde(rename = "R_C")]
    pub local_inconsistency: f64,
    #[serde(rename = "R_squared")]
    pub consistency_squared: f64,
    #[serde(rename = "R_C_squared")]
    pub local_inconsistency_squared: f64,
}

impl RankResult {
    /// Recomputes `ranking` from `scores`.
    pub fn rerank(&mut self) {
        self.ranking = rank_descending(&self.scores);
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConsistencyMeasures {
    /// ‖P_grad s‖ / ‖s‖
    pub r: f64,
    /// ‖P_curl s‖ / ‖s‖
    pub r_c: f64,
}

impl ConsistencyMeasures {
    pub fn r_squared(&self) -> f64 {
        self.r * self.r
    }

    pub fn r_c_squared(&self) -> f64 {
        self.r_c * self.r_c
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConditionParams {
    /// smallest nonzero singular value of B_k
    pub zeta_min: f64,
    /// largest singular value of B_k
    pub sigma_max: f64,
    /// `sqrt(n) / zeta_min`; kappa must exceed it
    pub lower_bound: f64,
    pub kappa: f64,
}

/// Builds the comparison graph and the mean edge flow from balanced data.
pub fn assemble_edge_signal(data: &PairwiseData) -> Result<(Graph, SimplicialSignal)> {
    let mut pairs: BTreeMap<(usize, usize), (usize, f64)> = BTreeMap::new();
    for r in data.records() {
        let e = pairs.entry((r.i, r.j)).or_insert((0, 0.0));
        e.0 += 1;
        e.1 += r.value;
    }
    let multiplicities: BTreeMap<usize, Vec<(usize, usize)>> =
        pairs.iter().fold(BTreeMap::new(), |mut acc, (&pair, &(c, _))| {
            acc.entry(c).or_insert_with(Vec::new).push(pair);
            acc
        });
    if multiplicities.len() > 1 {
        let detail: Vec<String> = multiplicities
            .iter()
            .map(|(c, ps)| {
                let shown: Vec<String> = ps.iter().take(5).map(|(i, j)| format!("({i},{j})")).collect();
                let more = if ps.len() > 5 { ", ..." } else { "" };
                format!("{} pair(s) compared {c} time(s): {}{more}", ps.len(), shown.join(", "))
            })
            .collect();
        return Err(HodgeError::Unbalanced(detail.join("; ")));
    }
    let graph = Graph::new(data.n(), pairs.keys().copied())?;
    // graph edges and the BTreeMap share the lexicographic pair order
    let values = pairs.values().map(|&(c, sum)| sum / c as f64).collect();
    Ok((graph, SimplicialSignal::new(1, values)))
}

/// Orders simplex indices by descending score; ties go to the smaller index.
pub fn rank_descending(scores: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..scores.len()).collect();
    idx.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b)));
    idx
}

/// `(B_k B_kᵀ)⁺ B_k`, the dense map from k-signals to (k-1)-scores.
pub fn hodgerank_operator(complex: &CliqueComplex, k: usize) -> Result<DMatrix<f64>> {
    let b = complex.boundary_matrix(k)?.to_dense();
    let upper = &b * b.transpose();
    Ok(linalg::pseudo_inverse(&upper) * b)
}

/// Raw `(B_k B_kᵀ)⁺ B_k s` without the consistency measures.
pub fn hodgerank_scores(complex: &CliqueComplex, k: usize, signal: &SimplicialSignal) -> Result<DVector<f64>> {
    if k == 0 {
        return Err(HodgeError::DimensionOutOfRange { k, min: 1, max: complex.max_dim() });
    }
    signal.check_against(complex)?;
    if complex.count(k) == 0 {
        return Err(HodgeError::NoSimplices { k });
    }
    Ok(hodgerank_operator(complex, k)? * signal.to_vector())
}

pub fn hodgerank_solve(complex: &CliqueComplex, k: usize, signal: &SimplicialSignal) -> Result<RankResult> {
    let scores = hodgerank_scores(complex, k, signal)?;
    let scores: Vec<f64> = scores.iter().cloned().collect();
    let measures = if signal.norm() > 0.0 {
        consistency_measures(complex, k, signal)?
    } else {
        ConsistencyMeasures { r: 0.0, r_c: 0.0 }
    };
    Ok(RankResult {
        k,
        ranking: rank_descending(&scores),
        scores,
        consistency: measures.r,
        local_inconsistency: measures.r_c,
        consistency_squared: measures.r_squared(),
        local_inconsistency_squared: measures.r_c_squared(),
    })
}

pub fn consistency_measures(
    complex: &CliqueComplex,
    k: usize,
    signal: &SimplicialSignal,
) -> Result<ConsistencyMeasures> {
    signal.check_against(complex)?;
    if signal.norm() == 0.0 {
        return Err(HodgeError::ZeroSignal);
    }
    let p = complex.hodge_projectors(k)?;
    let s = signal.to_vector();
    let r = ((&p.grad * &s).norm() / signal.norm()).min(1.0);
    let r_c = ((&p.curl * &s).norm() / signal.norm()).min(1.0);
    Ok(ConsistencyMeasures { r, r_c })
}

/// Smallest nonzero singular value of `B_k` and the effective condition
/// number. `kappa_override` must lie strictly above `sqrt(n)/zeta_min`.
pub fn effective_condition_params(
    complex: &CliqueComplex,
    k: usize,
    kappa_override: Option<f64>,
) -> Result<ConditionParams> {
    let b = complex.boundary_matrix(k)?.to_dense();
    condition_params_of(&b, complex.n(), k, kappa_override)
}

pub(crate) fn condition_params_of(
    b: &DMatrix<f64>,
    n: usize,
    k: usize,
    kappa_override: Option<f64>,
) -> Result<ConditionParams> {
    let svd = ThinSvd::new(b);
    let support = svd.support();
    if support.is_empty() {
        return Err(HodgeError::ZeroBoundary { k });
    }
    let zeta_min = support.iter().map(|&i| svd.singular_values[i]).fold(f64::INFINITY, f64::min);
    let lower_bound = (n as f64).sqrt() / zeta_min;
    let kappa = match kappa_override {
        Some(kappa) if !(kappa > lower_bound) => {
            return Err(HodgeError::KappaTooSmall { kappa, lower: lower_bound })
        }
        Some(kappa) => kappa,
        None => DEFAULT_KAPPA_FACTOR * lower_bound,
    };
    Ok(ConditionParams { zeta_min, sigma_max: svd.sigma_max(), lower_bound, kappa })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(voter: &str, i: usize, j: usize, value: f64) -> ComparisonRecord {
        ComparisonRecord { voter: voter.into(), i, j, value }
    }

    fn k3() -> CliqueComplex {
        CliqueComplex::build(Graph::complete(3), 2).unwrap()
    }

    #[test]
    fn path_records_give_unit_flow() {
        let data = PairwiseData::new(vec![rec("v1", 0, 1, 1.0), rec("v1", 1, 2, 1.0)], None).unwrap();
        let (g, s) = assemble_edge_signal(&data).unwrap();
        assert_eq!(g.edges(), &[(0, 1), (1, 2)]);
        assert_eq!(s.values(), &[1.0, 1.0]);
    }

    #[test]
    fn edge_value_is_voter_mean() {
        let data = PairwiseData::new(vec![rec("v1", 0, 1, 1.0), rec("v2", 0, 1, 3.0)], None).unwrap();
        let (_, s) = assemble_edge_signal(&data).unwrap();
        assert_eq!(s.values(), &[2.0]);
    }

    #[test]
    fn reversed_pairs_are_flipped() {
        let data = PairwiseData::new(vec![rec("v1", 1, 0, 1.0)], None).unwrap();
        let (_, s) = assemble_edge_signal(&data).unwrap();
        assert_eq!(s.values(), &[-1.0]);
    }

    #[test]
    fn unbalanced_rejected() {
        let data = PairwiseData::new(
            vec![
                rec("a", 0, 1, 1.0),
                rec("b", 0, 1, 1.0),
                rec("a", 0, 2, 1.0),
                rec("b", 0, 2, 1.0),
                rec("a", 1, 2, 1.0),
            ],
            None,
        )
        .unwrap();
        let err = assemble_edge_signal(&data).unwrap_err();
        assert!(matches!(err, HodgeError::Unbalanced(_)));
        assert!(err.to_string().contains("unbalanced"));
    }

    #[test]
    fn empty_data_rejected() {
        assert_eq!(PairwiseData::new(vec![], None).unwrap_err(), HodgeError::EmptyData);
    }

    #[test]
    fn path_gradient_scores() {
        let c = CliqueComplex::build(Graph::path(3), 1).unwrap();
        let res = hodgerank_solve(&c, 1, &SimplicialSignal::new(1, vec![1.0, 1.0])).unwrap();
        let expect = [-1.0, 0.0, 1.0];
        for (a, b) in res.scores.iter().zip(expect) {
            assert!((a - b).abs() < 1e-12);
        }
        assert_eq!(res.ranking, vec![2, 1, 0]);
        assert!((res.consistency - 1.0).abs() < 1e-12);
    }

    #[test]
    fn pure_curl_scores_vanish() {
        let res = hodgerank_solve(&k3(), 1, &SimplicialSignal::new(1, vec![1.0, -1.0, 1.0])).unwrap();
        assert!(res.scores.iter().all(|s| s.abs() < 1e-12));
        assert!(res.consistency.abs() < 1e-12);
        assert!((res.local_inconsistency - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rank_ties_break_by_index() {
        assert_eq!(rank_descending(&[1.0, 2.0, 1.0, 2.0]), vec![1, 3, 0, 2]);
    }

    #[test]
    fn zero_signal_has_no_measures() {
        assert_eq!(
            consistency_measures(&k3(), 1, &SimplicialSignal::new(1, vec![0.0; 3])).unwrap_err(),
            HodgeError::ZeroSignal
        );
    }

    #[test]
    fn solve_rejects_empty_dimension() {
        let c = CliqueComplex::build(Graph::path(3), 2).unwrap();
        let err = hodgerank_solve(&c, 2, &SimplicialSignal::new(2, vec![])).unwrap_err();
        assert_eq!(err, HodgeError::NoSimplices { k: 2 });
    }

    #[test]
    fn condition_params_of_single_edge() {
        let c = CliqueComplex::build(Graph::complete(2), 1).unwrap();
        let p = effective_condition_params(&c, 1, None).unwrap();
        assert!((p.zeta_min - 2f64.sqrt()).abs() < 1e-12);
        assert!((p.lower_bound - 1.0).abs() < 1e-12);
        assert!((p.kappa - 1.1).abs() < 1e-12);
    }

    #[test]
    fn condition_params_of_k3() {
        let p = effective_condition_params(&k3(), 1, None).unwrap();
        assert!((p.zeta_min - 3f64.sqrt()).abs() < 1e-12);
        assert!(matches!(
            effective_condition_params(&k3(), 1, Some(0.9)),
            Err(HodgeError::KappaTooSmall { .. })
        ));
        // the interval is open at its lower end
        let lower = effective_condition_params(&k3(), 1, None).unwrap().lower_bound;
        assert!(effective_condition_params(&k3(), 1, Some(lower)).is_err());
        assert_eq!(effective_condition_params(&k3(), 1, Some(5.0)).unwrap().kappa, 5.0);
    }

    #[test]
    fn zero_boundary_rejected() {
        // a graph with vertices only has no B_1 entries
        let c = CliqueComplex::build(Graph::new(2, []).unwrap(), 1).unwrap();
        assert!(c.boundary_matrix(1).unwrap().entries.is_empty());
        assert!(matches!(effective_condition_params(&c, 1, None), Err(HodgeError::ZeroBoundary { .. })));
    }
}
