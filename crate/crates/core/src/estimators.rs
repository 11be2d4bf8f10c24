//! Seeded Monte-Carlo models of the three readout procedures: projector
//! overlaps through a Hadamard test, amplitude estimation of chosen scores,
//! and l-infinity tomography of the whole score vector.
//!
//! Every random draw comes from a ChaCha stream keyed by (seed, task), so a
//! batch gives the same reports whichever [`Exec`] strategy runs it.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};

use crate::complex::CliqueComplex;
use crate::error::{HodgeError, Result};
use crate::exec::Exec;
use crate::filters;
use crate::hodgerank::{self, SimplicialSignal};
use crate::qtsp;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    HadamardSampling,
    AmplitudeEstimationModel,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Subspace {
    /// gradient part, `im B_kᵀ`
    G,
    /// curl part, `im B_{k+1}`
    C,
}

/// How the tomography routine may touch the prepared state.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TomographyAccess {
    /// controlled applications of the preparation unitary
    Controlled,
    /// plain copies; the sign of the vector is lost
    CopiesOnly,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EstimatorKind {
    ConsistencyG,
    ConsistencyC,
    RelativeRanking,
    Tomography,
}

impl EstimatorKind {
    pub fn name(self) -> &'static str {
        match self {
            EstimatorKind::ConsistencyG => "consistency_g",
            EstimatorKind::ConsistencyC => "consistency_c",
            EstimatorKind::RelativeRanking => "relative_ranking",
            EstimatorKind::Tomography => "tomography",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EstimatorConfig {
    pub epsilon: f64,
    pub delta: f64,
    pub seed: u64,
    pub mode: Mode,
}

impl EstimatorConfig {
    pub fn new(epsilon: f64, delta: f64, seed: u64, mode: Mode) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon < 1.0) {
            return Err(HodgeError::InvalidParameter(format!("epsilon must lie in (0, 1), got {epsilon}")));
        }
        if !(delta > 0.0 && delta < 1.0) {
            return Err(HodgeError::InvalidParameter(format!("delta must lie in (0, 1), got {delta}")));
        }
        Ok(EstimatorConfig { epsilon, delta, seed, mode })
    }

    pub fn with_seed(self, seed: u64) -> Self {
        EstimatorConfig { seed, ..self }
    }

    pub fn with_epsilon(self, epsilon: f64) -> Self {
        EstimatorConfig { epsilon, ..self }
    }
}

/// Accuracy parameters chosen for a run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Schedule {
    /// accuracy of the polynomial filter
    pub epsilon_filter: f64,
    /// additive accuracy demanded from the sampling stage
    pub sampling_accuracy: f64,
    /// `beta`, `epsilon_ae` or `epsilon_tomography`
    pub sampling_accuracy_name: String,
    /// failure probability of each sampling task
    pub delta_task: f64,
    pub kappa: f64,
    pub filter_degree: usize,
    pub tasks: usize,
    pub shots_per_task: u64,
    pub formula: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EstimateReport {
    pub estimator: EstimatorKind,
    pub mode: Mode,
    pub epsilon: f64,
    pub delta: f64,
    pub seed: u64,
    pub estimate: Vec<f64>,
    pub exact: Vec<f64>,
    /// simplex indices behind the entries of `estimate` (rankings only)
    pub indices: Vec<usize>,
    /// indices ordered by estimated score, best first
    pub ranking: Vec<usize>,
    pub exact_ranking: Vec<usize>,
    /// adjacent pairs in `ranking` whose estimated gap is below `2 epsilon`
    pub unresolved: Vec<(usize, usize)>,
    /// consistency runs: estimated and exact `‖s_P‖ / ‖s‖`
    pub norm_ratio: Option<(f64, f64)>,
    pub phase_flipped: Option<bool>,
    pub shots_used: u64,
    pub schedule: Schedule,
    pub max_error: f64,
    pub tolerance: f64,
    pub within_tolerance: bool,
}

fn task_rng(seed: u64, task: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(task);
    rng
}

fn sample_hadamard(rng: &mut ChaCha8Rng, overlap: f64, shots: u64) -> f64 {
    let p0 = ((1.0 + overlap) / 2.0).clamp(0.0, 1.0);
    let zeros = Binomial::new(shots, p0).expect("probability clamped to [0, 1]").sample(rng);
    2.0 * zeros as f64 / shots as f64 - 1.0
}

/// `2 · (fraction of 0 outcomes) - 1` over `shots` Hadamard-test shots whose
/// outcome 0 has probability `(1 + true_overlap) / 2`.
pub fn hadamard_test_sample(true_overlap: f64, shots: u64, seed: u64) -> f64 {
    assert!(shots >= 1, "a Hadamard test needs at least one shot");
    sample_hadamard(&mut task_rng(seed, 0), true_overlap, shots)
}

/// Hoeffding count for a mean of `±1` outcomes: `ceil(2 ln(2/δ) / a²)`.
pub fn hadamard_shots(accuracy: f64, delta: f64) -> u64 {
    (2.0 * (2.0 / delta).ln() / (accuracy * accuracy)).ceil() as u64
}

/// Calls charged to amplitude estimation: `ceil(π ln(2/δ) / a)`.
pub fn amplitude_estimation_calls(accuracy: f64, delta: f64) -> u64 {
    (std::f64::consts::PI * (2.0 / delta).ln() / accuracy).ceil() as u64
}

fn shots_for(mode: Mode, accuracy: f64, delta: f64) -> (u64, &'static str) {
    match mode {
        Mode::HadamardSampling => (hadamard_shots(accuracy, delta), "ceil(2 ln(2/delta_task) / a^2)"),
        Mode::AmplitudeEstimationModel => {
            (amplitude_estimation_calls(accuracy, delta), "ceil(pi ln(2/delta_task) / a)")
        }
    }
}

/// One sampled overlap: a binomial Hadamard test, or the AE channel that
/// returns the overlap shifted by exactly `accuracy` with a random sign.
fn sample_overlap(rng: &mut ChaCha8Rng, mode: Mode, overlap: f64, accuracy: f64, shots: u64) -> f64 {
    match mode {
        Mode::HadamardSampling => sample_hadamard(rng, overlap, shots),
        Mode::AmplitudeEstimationModel => {
            if rng.random::<bool>() {
                overlap + accuracy
            } else {
                overlap - accuracy
            }
        }
    }
}

fn unit_signal(complex: &CliqueComplex, k: usize, signal: &SimplicialSignal) -> Result<DVector<f64>> {
    signal.check_against(complex)?;
    let state = qtsp::prepare_signal_state(signal)?;
    debug_assert_eq!(state.k, k);
    Ok(state.to_vector())
}

fn ranking_of(indices: &[usize], scores: &[f64]) -> Vec<usize> {
    hodgerank::rank_descending(scores).into_iter().map(|p| indices[p]).collect()
}

fn max_error(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Estimates `‖s_P‖² / ‖s‖²` for the gradient (`G`) or curl (`C`) part.
///
/// The filter is run at `ε²/2` and the sampled overlap carries the rest of
/// the error budget, `β = (ε - ε²/2) / (2κ_P²)`.
pub fn estimate_consistency(
    complex: &CliqueComplex,
    k: usize,
    signal: &SimplicialSignal,
    which: Subspace,
    config: &EstimatorConfig,
) -> Result<EstimateReport> {
    let s = unit_signal(complex, k, signal)?;
    let n = complex.n();
    let nf = n as f64;
    let (a, kappa_dim, kind) = match which {
        Subspace::G => (complex.boundary_dense(k), k, EstimatorKind::ConsistencyG),
        Subspace::C => {
            if k >= complex.max_dim() || complex.count(k + 1) == 0 {
                return Err(HodgeError::NoSimplices { k: k + 1 });
            }
            (complex.boundary_dense(k + 1).transpose(), k + 1, EstimatorKind::ConsistencyC)
        }
    };
    if k == 0 {
        return Err(HodgeError::DimensionOutOfRange { k, min: 1, max: complex.max_dim() });
    }
    let kappa = hodgerank::effective_condition_params(complex, kappa_dim, None)?.kappa;
    let poly_kappa = kappa * kappa;
    let eps = config.epsilon;
    let eps_projector = eps * eps / 2.0;
    let eps_filter = eps_projector / nf.sqrt();
    let (_, spec) = qtsp::pipeline_filter(kappa, eps_filter)?;

    // Π̃ / (2κ²) = (A/√n)ᵀ p(A/√n)
    let p = filters::odd_filter_matrix(&spec, &a, n);
    let block: DMatrix<f64> = a.transpose() * p / nf.sqrt();
    let overlap = s.dot(&(&block * &s));

    let exact_measures = hodgerank::consistency_measures(complex, k, signal)?;
    let exact = match which {
        Subspace::G => exact_measures.r_squared(),
        Subspace::C => exact_measures.r_c_squared(),
    };

    let beta = (eps - eps_projector) / (2.0 * poly_kappa);
    let (shots, formula) = shots_for(config.mode, beta, config.delta);
    let mut rng = task_rng(config.seed, 0);
    let sampled = sample_overlap(&mut rng, config.mode, overlap, beta, shots);
    let estimate = 2.0 * poly_kappa * sampled;
    let err = (estimate - exact).abs();

    Ok(EstimateReport {
        estimator: kind,
        mode: config.mode,
        epsilon: eps,
        delta: config.delta,
        seed: config.seed,
        estimate: vec![estimate],
        exact: vec![exact],
        indices: Vec::new(),
        ranking: Vec::new(),
        exact_ranking: Vec::new(),
        unresolved: Vec::new(),
        norm_ratio: Some((estimate.clamp(0.0, 1.0).sqrt(), exact.sqrt())),
        phase_flipped: None,
        shots_used: shots,
        schedule: Schedule {
            epsilon_filter: eps_projector,
            sampling_accuracy: beta,
            sampling_accuracy_name: "beta".into(),
            delta_task: config.delta,
            kappa,
            filter_degree: spec.degree,
            tasks: 1,
            shots_per_task: shots,
            formula: formula.into(),
        },
        max_error: err,
        tolerance: eps,
        within_tolerance: err <= eps,
    })
}

fn unresolved_pairs(ranking: &[usize], indices: &[usize], estimate: &[f64], eps: f64) -> Vec<(usize, usize)> {
    let value = |idx: usize| estimate[indices.iter().position(|&i| i == idx).expect("ranked index")];
    ranking
        .windows(2)
        .filter(|w| value(w[0]) - value(w[1]) < 2.0 * eps)
        .map(|w| (w[0], w[1]))
        .collect()
}

/// Scores of the `(k-1)`-simplices in `subset`, each read off the filtered
/// state by its own amplitude estimation. Filter accuracy `ε/2`, sampling
/// accuracy `ε_AE = ε√n / (4κ²)`, failure probability `δ/L` per simplex.
pub fn relative_ranking(
    complex: &CliqueComplex,
    k: usize,
    signal: &SimplicialSignal,
    subset: &[usize],
    config: &EstimatorConfig,
) -> Result<EstimateReport> {
    relative_ranking_with(complex, k, signal, subset, config, Exec::default())
}

pub fn relative_ranking_with(
    complex: &CliqueComplex,
    k: usize,
    signal: &SimplicialSignal,
    subset: &[usize],
    config: &EstimatorConfig,
    exec: Exec,
) -> Result<EstimateReport> {
    if subset.is_empty() {
        return Err(HodgeError::InvalidParameter("subset must not be empty".into()));
    }
    let s = unit_signal(complex, k, signal)?;
    let count = complex.count(k - 1);
    for (pos, &idx) in subset.iter().enumerate() {
        if idx >= count {
            return Err(HodgeError::IndexOutOfRange { index: idx, count });
        }
        if subset[..pos].contains(&idx) {
            return Err(HodgeError::InvalidParameter(format!("subset lists simplex {idx} twice")));
        }
    }
    let n = complex.n();
    let nf = n as f64;
    let eps = config.epsilon;
    let kappa = hodgerank::effective_condition_params(complex, k, None)?.kappa;
    let poly_kappa = kappa * kappa;
    let eps_filter = eps / 2.0;
    let (_, spec) = qtsp::pipeline_filter(kappa, eps_filter)?;
    let scale = 2.0 * poly_kappa / nf.sqrt();
    let amplitudes = filters::odd_filter_matrix(&spec, &complex.boundary_dense(k), n) * &s;
    let oracle = hodgerank::hodgerank_scores(complex, k, &SimplicialSignal::from_vector(k, &s))?;

    let l = subset.len();
    let eps_ae = eps * nf.sqrt() / (4.0 * poly_kappa);
    let delta_task = config.delta / l as f64;
    let (shots, formula) = shots_for(config.mode, eps_ae, delta_task);
    let estimate = exec.map(l, |t| {
        let mut rng = task_rng(config.seed, t as u64);
        scale * sample_overlap(&mut rng, config.mode, amplitudes[subset[t]], eps_ae, shots)
    });
    let exact: Vec<f64> = subset.iter().map(|&i| oracle[i]).collect();
    let ranking = ranking_of(subset, &estimate);
    let unresolved = unresolved_pairs(&ranking, subset, &estimate, eps);
    let err = max_error(&estimate, &exact);

    Ok(EstimateReport {
        estimator: EstimatorKind::RelativeRanking,
        mode: config.mode,
        epsilon: eps,
        delta: config.delta,
        seed: config.seed,
        exact_ranking: ranking_of(subset, &exact),
        estimate,
        exact,
        indices: subset.to_vec(),
        ranking,
        unresolved,
        norm_ratio: None,
        phase_flipped: None,
        shots_used: shots * l as u64,
        schedule: Schedule {
            epsilon_filter: eps_filter,
            sampling_accuracy: eps_ae,
            sampling_accuracy_name: "epsilon_ae".into(),
            delta_task,
            kappa,
            filter_degree: spec.degree,
            tasks: l,
            shots_per_task: shots,
            formula: formula.into(),
        },
        max_error: err,
        tolerance: eps,
        within_tolerance: err <= eps,
    })
}

/// Total dimension seen by tomography: system plus ancilla qubits.
pub fn tomography_dimension_log2(n: usize) -> usize {
    n + (n + 6)
}

/// Full score vector from simulated l-infinity tomography.
///
/// The two halves of the error budget go to the filter and to the
/// tomography stage (each `ε/2`), so every entry ends up within `ε`.
/// Tomography itself is modelled as independent noise, uniform on
/// `[-ε_t, ε_t]` with `ε_t = (ε/2)√n / (2κ²)`, on each amplitude; the shot
/// count follows the controlled or copies-only formula with `δ = 2^-n`.
pub fn tomography_ranking(
    complex: &CliqueComplex,
    k: usize,
    signal: &SimplicialSignal,
    access: TomographyAccess,
    config: &EstimatorConfig,
) -> Result<EstimateReport> {
    let s = unit_signal(complex, k, signal)?;
    let n = complex.n();
    let nf = n as f64;
    let eps = config.epsilon;
    let eps_half = eps / 2.0;
    let kappa = hodgerank::effective_condition_params(complex, k, None)?.kappa;
    let poly_kappa = kappa * kappa;
    let (_, spec) = qtsp::pipeline_filter(kappa, eps_half)?;
    let scale = 2.0 * poly_kappa / nf.sqrt();
    let amplitudes = filters::odd_filter_matrix(&spec, &complex.boundary_dense(k), n) * &s;
    let oracle = hodgerank::hodgerank_scores(complex, k, &SimplicialSignal::from_vector(k, &s))?;

    let eps_t = eps_half * nf.sqrt() / (2.0 * poly_kappa);
    let ln_d = tomography_dimension_log2(n) as f64 * std::f64::consts::LN_2;
    let delta_t = 0.5f64.powi(n as i32);
    let ln_d_delta = ln_d - delta_t.ln();
    let (shots, formula) = match access {
        TomographyAccess::Controlled => ((ln_d_delta / (eps_t * eps_t)).ceil() as u64, "ceil(ln(d/delta_t) / e_t^2)"),
        TomographyAccess::CopiesOnly => {
            ((ln_d * ln_d_delta / (eps_t * eps_t)).ceil() as u64, "ceil(ln d ln(d/delta_t) / e_t^2)")
        }
    };

    let mut rng = task_rng(config.seed, 0);
    let mut estimate: Vec<f64> =
        amplitudes.iter().map(|a| scale * (a + rng.random_range(-eps_t..=eps_t))).collect();
    let exact: Vec<f64> = oracle.iter().cloned().collect();
    let indices: Vec<usize> = (0..exact.len()).collect();

    let mut phase_flipped = None;
    if access == TomographyAccess::CopiesOnly {
        let flipped = rng.random::<bool>();
        if flipped {
            estimate.iter_mut().for_each(|v| *v = -*v);
        }
        // only the order is known: settle its direction on the two extremes
        let order = hodgerank::rank_descending(&estimate);
        if let (Some(&top), Some(&bottom)) = (order.first(), order.last()) {
            if exact[top] < exact[bottom] {
                estimate.iter_mut().for_each(|v| *v = -*v);
            }
        }
        phase_flipped = Some(flipped);
    }

    let ranking = ranking_of(&indices, &estimate);
    let unresolved = unresolved_pairs(&ranking, &indices, &estimate, eps);
    let err = max_error(&estimate, &exact);
    Ok(EstimateReport {
        estimator: EstimatorKind::Tomography,
        mode: config.mode,
        epsilon: eps,
        delta: config.delta,
        seed: config.seed,
        exact_ranking: ranking_of(&indices, &exact),
        estimate,
        exact,
        indices,
        ranking,
        unresolved,
        norm_ratio: None,
        phase_flipped,
        shots_used: shots,
        schedule: Schedule {
            epsilon_filter: eps_half,
            sampling_accuracy: eps_t,
            sampling_accuracy_name: "epsilon_tomography".into(),
            delta_task: delta_t,
            kappa,
            filter_degree: spec.degree,
            tasks: 1,
            shots_per_task: shots,
            formula: formula.into(),
        },
        max_error: err,
        tolerance: eps,
        within_tolerance: err <= eps,
    })
}

/// Which estimator a batch runs.
#[derive(Clone, Debug, PartialEq)]
pub enum EstimatorJob {
    Consistency(Subspace),
    Relative(Vec<usize>),
    Tomography(TomographyAccess),
}

impl EstimatorJob {
    pub fn run(&self, complex: &CliqueComplex, k: usize, signal: &SimplicialSignal, config: &EstimatorConfig) -> Result<EstimateReport> {
        match self {
            EstimatorJob::Consistency(which) => estimate_consistency(complex, k, signal, *which, config),
            EstimatorJob::Relative(subset) => {
                relative_ranking_with(complex, k, signal, subset, config, Exec::Sequential)
            }
            EstimatorJob::Tomography(access) => tomography_ranking(complex, k, signal, *access, config),
        }
    }
}

/// `runs` repetitions; run `r` uses seed `config.seed + r`.
pub fn run_batch(
    job: &EstimatorJob,
    complex: &CliqueComplex,
    k: usize,
    signal: &SimplicialSignal,
    config: &EstimatorConfig,
    runs: usize,
    exec: Exec,
) -> Result<Vec<EstimateReport>> {
    exec.map(runs, |r| job.run(complex, k, signal, &config.with_seed(config.seed.wrapping_add(r as u64))))
        .into_iter()
        .collect()
}

/// Fraction of reports within tolerance.
pub fn coverage(reports: &[EstimateReport]) -> f64 {
    if reports.is_empty() {
        return 0.0;
    }
    reports.iter().filter(|r| r.within_tolerance).count() as f64 / reports.len() as f64
}

/// CSV row of a batch sweep.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BatchRow {
    pub estimator: String,
    pub epsilon: f64,
    pub delta: f64,
    pub shots: u64,
    pub error: f64,
    pub pass: bool,
}

impl From<&EstimateReport> for BatchRow {
    fn from(r: &EstimateReport) -> Self {
        BatchRow {
            estimator: r.estimator.name().into(),
            epsilon: r.epsilon,
            delta: r.delta,
            shots: r.shots_used,
            error: r.max_error,
            pass: r.within_tolerance,
        }
    }
}
