//! Amplitude-level simulation of the filtering circuit: exact state
//! preparation, the singular-value transform of `B_k/√n`, postselection
//! statistics and the certified bounds of the pseudoinverse pipeline.
//!
//! Everything lives in the `n_k`-dimensional simplex basis; the qubit-level
//! picture is only used by [`crate::dirac`].

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::complex::CliqueComplex;
use crate::error::{HodgeError, Result};
use crate::exec::Exec;
use crate::filters::{self, FilterSpec, InversePolynomial};
use crate::hodgerank::{self, SimplicialSignal};

/// Below this norm the filtered vector is treated as unpostselectable.
pub const POSTSELECTION_FLOOR: f64 = 1e-14;

/// Rankability threshold used when picking epsilon from a target distance.
pub const DEFAULT_GAMMA_G: f64 = 0.1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuantumSignalState {
    pub k: usize,
    pub amplitudes: Vec<f64>,
    pub source_norm: f64,
}

impl QuantumSignalState {
    pub fn to_vector(&self) -> DVector<f64> {
        DVector::from_column_slice(&self.amplitudes)
    }
}

pub fn prepare_signal_state(signal: &SimplicialSignal) -> Result<QuantumSignalState> {
    let norm = signal.norm();
    if !(norm > 0.0) {
        return Err(HodgeError::ZeroSignal);
    }
    Ok(QuantumSignalState {
        k: signal.k,
        amplitudes: signal.values().iter().map(|v| v / norm).collect(),
        source_norm: norm,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OutcomeStatus {
    /// certified bounds hold
    Pass,
    /// certified bounds violated
    Fail,
    /// epsilon >= N_*: the distance bound does not apply
    BoundsInvalid,
    /// the filtered vector vanishes
    PostselectionImpossible,
    /// custom filter, nothing to certify
    Unchecked,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FilterOutcome {
    pub n: usize,
    pub k: usize,
    pub degree: usize,
    /// `κ_k` of the boundary operator (pseudoinverse filters)
    pub kappa: Option<f64>,
    pub epsilon: Option<f64>,
    /// unnormalized `p(B_k/√n)|s⟩`
    pub filtered: Vec<f64>,
    /// `Ñ_* = ‖filtered‖`
    pub n_tilde: f64,
    pub postselect_prob: f64,
    /// `‖⊥‖² = 1 - Ñ_*²`
    pub garbage_norm_sq: f64,
    pub output_state: Option<Vec<f64>>,
    /// `N_* = ‖(B_k B_kᵀ)⁺ B_k |s⟩‖`
    pub n_star: Option<f64>,
    /// `2ε / (N_* - ε)`
    pub distance_bound: Option<f64>,
    /// bounds on `Ñ_*²`
    pub prob_bounds: Option<(f64, f64)>,
    pub bounds_valid: bool,
    pub oracle_state: Option<Vec<f64>>,
    pub achieved_distance: Option<f64>,
    pub status: OutcomeStatus,
}

struct Certified {
    n_star: f64,
    oracle: Option<DVector<f64>>,
}

fn oracle_for(complex: &CliqueComplex, k: usize, state: &QuantumSignalState) -> Result<Certified> {
    let signal = SimplicialSignal::new(k, state.amplitudes.clone());
    let target = hodgerank::hodgerank_scores(complex, k, &signal)?;
    let n_star = target.norm();
    let oracle = (n_star > 0.0).then(|| target / n_star);
    Ok(Certified { n_star, oracle })
}

/// Runs the filter on a prepared state and collects postselection
/// statistics. For pseudoinverse filters the result is compared with the
/// exact HodgeRank state and the certified bounds are evaluated.
pub fn qtsp_apply(
    spec: &FilterSpec,
    complex: &CliqueComplex,
    k: usize,
    state: &QuantumSignalState,
) -> Result<FilterOutcome> {
    if spec.certified_sup > 1.0 + 1e-12 {
        return Err(HodgeError::FilterNotBounded { sup: spec.certified_sup });
    }
    let b_k = complex.boundary_matrix(k)?;
    let b_up = if k < complex.max_dim() { Some(complex.boundary_matrix(k + 1)?) } else { None };
    let n = complex.n();
    let filtered = filters::apply_filter_sv(spec, &b_k, b_up.as_ref(), n, &state.to_vector())?;
    let n_tilde = filtered.norm();
    let prob = n_tilde * n_tilde;
    if n_tilde < POSTSELECTION_FLOOR {
        return Err(HodgeError::PostselectionImpossible { probability: prob });
    }
    let output = &filtered / n_tilde;

    let mut outcome = FilterOutcome {
        n,
        k,
        degree: spec.degree,
        kappa: None,
        epsilon: spec.epsilon(),
        filtered: filtered.iter().cloned().collect(),
        n_tilde,
        postselect_prob: prob,
        garbage_norm_sq: 1.0 - prob,
        output_state: Some(output.iter().cloned().collect()),
        n_star: None,
        distance_bound: None,
        prob_bounds: None,
        bounds_valid: false,
        oracle_state: None,
        achieved_distance: None,
        status: OutcomeStatus::Unchecked,
    };
    if let (Some(scale), Some(eps)) = (spec.inverse_scale(n), spec.epsilon()) {
        let cert = oracle_for(complex, k, state)?;
        fill_bounds(&mut outcome, &cert, scale, eps, Some(&output));
    }
    Ok(outcome)
}

fn fill_bounds(outcome: &mut FilterOutcome, cert: &Certified, scale: f64, eps: f64, output: Option<&DVector<f64>>) {
    outcome.n_star = Some(cert.n_star);
    outcome.oracle_state = cert.oracle.as_ref().map(|o| o.iter().cloned().collect());
    if let (Some(o), Some(out)) = (&cert.oracle, output) {
        outcome.achieved_distance = Some((out - o).norm());
    }
    outcome.bounds_valid = cert.n_star > eps;
    if !outcome.bounds_valid {
        outcome.status = OutcomeStatus::BoundsInvalid;
        return;
    }
    let bound = 2.0 * eps / (cert.n_star - eps);
    let lo = (cert.n_star - eps) / scale;
    let hi = (cert.n_star + eps) / scale;
    outcome.distance_bound = Some(bound);
    outcome.prob_bounds = Some((lo * lo, hi * hi));
    let dist_ok = outcome.achieved_distance.is_some_and(|d| d <= bound);
    let prob_ok = outcome.n_tilde >= lo && outcome.n_tilde <= hi;
    outcome.status = if dist_ok && prob_ok { OutcomeStatus::Pass } else { OutcomeStatus::Fail };
}

/// Polynomial and filter used by the pipeline for a given `κ_k`: the inverse
/// polynomial acts on squared singular values, so its parameter is `κ_k²`.
pub fn pipeline_filter(kappa: f64, epsilon: f64) -> Result<(InversePolynomial, FilterSpec)> {
    let poly = InversePolynomial::build(kappa * kappa, epsilon)?;
    let spec = filters::pseudoinverse_filter(&poly);
    Ok((poly, spec))
}

/// End-to-end quantum HodgeRank on `signal`, checked against the exact
/// classical state. `kappa = None` uses the default effective condition number.
pub fn quantum_hodgerank(
    complex: &CliqueComplex,
    k: usize,
    signal: &SimplicialSignal,
    epsilon: f64,
    kappa: Option<f64>,
) -> Result<FilterOutcome> {
    signal.check_against(complex)?;
    let params = hodgerank::effective_condition_params(complex, k, kappa)?;
    let (_, spec) = pipeline_filter(params.kappa, epsilon)?;
    let state = prepare_signal_state(signal)?;
    match qtsp_apply(&spec, complex, k, &state) {
        Ok(mut outcome) => {
            outcome.kappa = Some(params.kappa);
            Ok(outcome)
        }
        Err(HodgeError::PostselectionImpossible { probability }) => {
            let cert = oracle_for(complex, k, &state)?;
            let n = complex.n();
            let mut outcome = FilterOutcome {
                n,
                k,
                degree: spec.degree,
                kappa: Some(params.kappa),
                epsilon: Some(epsilon),
                filtered: vec![0.0; complex.count(k - 1)],
                n_tilde: probability.sqrt(),
                postselect_prob: probability,
                garbage_norm_sq: 1.0 - probability,
                output_state: None,
                n_star: None,
                distance_bound: None,
                prob_bounds: None,
                bounds_valid: false,
                oracle_state: None,
                achieved_distance: None,
                status: OutcomeStatus::PostselectionImpossible,
            };
            fill_bounds(&mut outcome, &cert, spec.inverse_scale(n).unwrap_or(1.0), epsilon, None);
            if outcome.bounds_valid {
                // N_* > ε yet nothing survives the filter: the bound is violated
                outcome.status = OutcomeStatus::Fail;
            } else {
                outcome.status = OutcomeStatus::PostselectionImpossible;
            }
            Ok(outcome)
        }
        Err(e) => Err(e),
    }
}

/// Filter accuracy that makes the postselected state `target`-close to the
/// exact state whenever the consistency measure is at least `gamma_g`.
pub fn epsilon_for_target(target: f64, gamma_g: f64, n: usize) -> f64 {
    let gamma_star = gamma_g / (n as f64).sqrt();
    target / 4.0 * gamma_star
}

/// Symbolic resource estimate with unit constants in every big-O.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CostReport {
    pub n: usize,
    pub degree: usize,
    pub kappa: f64,
    pub gamma_star: f64,
    /// `degree · n · log2(n)` non-Clifford depth of one filter application
    pub filter_depth: f64,
    /// `ceil(κ² / (√n γ_*))` rounds of amplitude amplification
    pub amplification_rounds: u64,
    pub total_depth: f64,
    pub system_qubits: usize,
    /// `n + 6`
    pub ancilla_qubits: usize,
    pub note: String,
}

pub fn cost_model(n: usize, degree: usize, kappa: f64, gamma_star: f64) -> Result<CostReport> {
    if n == 0 || !(kappa > 0.0) || !(gamma_star > 0.0) {
        return Err(HodgeError::InvalidParameter("cost model needs n, kappa, gamma_* > 0".into()));
    }
    let nf = n as f64;
    let filter_depth = degree as f64 * nf * nf.log2();
    let amplification_rounds = (kappa * kappa / (nf.sqrt() * gamma_star)).ceil() as u64;
    Ok(CostReport {
        n,
        degree,
        kappa,
        gamma_star,
        filter_depth,
        amplification_rounds,
        total_depth: filter_depth * amplification_rounds as f64,
        system_qubits: n,
        ancilla_qubits: n + 6,
        note: "big-O surrogates with unit constants".into(),
    })
}

/// One row of a certified-bound sweep.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub trial: usize,
    pub n: usize,
    pub k: usize,
    pub kappa: f64,
    pub epsilon: f64,
    pub degree: usize,
    pub n_star: f64,
    pub prob: f64,
    pub distance: f64,
    pub bound: f64,
    pub status: OutcomeStatus,
}

/// Input of one sweep trial.
#[derive(Clone, Debug)]
pub struct Trial {
    pub complex: CliqueComplex,
    pub k: usize,
    pub signal: SimplicialSignal,
}

/// Runs every (trial, epsilon) pair; rows come back trial-major regardless
/// of how they were scheduled.
pub fn bound_sweep(trials: &[Trial], epsilons: &[f64], kappa: Option<f64>, exec: Exec) -> Vec<Result<SweepRow>> {
    let jobs = trials.len() * epsilons.len();
    exec.map(jobs, |job| {
        let (t, e) = (job / epsilons.len(), job % epsilons.len());
        let trial = &trials[t];
        let eps = epsilons[e];
        let out = quantum_hodgerank(&trial.complex, trial.k, &trial.signal, eps, kappa)?;
        Ok(SweepRow {
            trial: t,
            n: out.n,
            k: out.k,
            kappa: out.kappa.unwrap_or(f64::NAN),
            epsilon: eps,
            degree: out.degree,
            n_star: out.n_star.unwrap_or(f64::NAN),
            prob: out.postselect_prob,
            distance: out.achieved_distance.unwrap_or(f64::NAN),
            bound: out.distance_bound.unwrap_or(f64::NAN),
            status: out.status,
        })
    })
}
