//! The four subcommands. Each returns a process exit code: 0 on success,
//! 1 when a certified bound or property check fails, 2 on bad input.

use std::fmt::Write as _;
use std::path::Path;

use anyhow::{bail, Result};
use hodgeq_core::estimators::BatchRow;
use hodgeq_core::qtsp::{epsilon_for_target, bound_sweep, Trial};
use hodgeq_core::{
    consistency_measures, cost_model, effective_condition_params, hodgerank_solve, quantum_hodgerank,
    ConditionParams, ConsistencyMeasures, CostReport, EstimateReport, EstimatorConfig, EstimatorJob, Exec,
    FilterOutcome, OutcomeStatus, RankResult,
};
use serde::{Deserialize, Serialize};

use crate::config::{EstimatorChoice, Input, RunConfig};
use crate::io::{emit, load_problem, to_csv, to_json, Problem};
use crate::verify;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_ERROR: i32 = 2;

/// HodgeRank output: the scores plus the labels of the ranked simplices.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RankReport {
    pub seed: u64,
    pub n: usize,
    /// vertices of each scored (k-1)-simplex, indexed like `scores`
    pub simplices: Vec<Vec<usize>>,
    #[serde(flatten)]
    pub result: RankResult,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QsimReport {
    pub seed: u64,
    pub n: usize,
    pub k: usize,
    pub epsilon: f64,
    pub gamma_g: f64,
    pub target_distance: Option<f64>,
    pub consistency: ConsistencyMeasures,
    pub condition: ConditionParams,
    pub cost: CostReport,
    pub warnings: Vec<String>,
    pub outcome: FilterOutcome,
}

fn run(f: impl FnOnce() -> Result<i32>) -> i32 {
    match f() {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            EXIT_ERROR
        }
    }
}

/// Human-readable text goes to stdout when the machine output has its own
/// file, and to stderr when the machine output is on stdout.
fn note(out: Option<&Path>, text: &str) {
    if out.is_some() {
        print!("{text}");
    } else {
        eprint!("{text}");
    }
}

fn label(vertices: &[usize]) -> String {
    vertices.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("-")
}

fn rank_table(report: &RankReport) -> String {
    let r = &report.result;
    let mut s = format!("k = {}  R = {:.6}  R_C = {:.6}\n", r.k, r.consistency, r.local_inconsistency);
    let _ = writeln!(s, "{:>4}  {:<12} {:>14}", "rank", "simplex", "score");
    for (pos, &i) in r.ranking.iter().take(10).enumerate() {
        let name = report.simplices.get(i).map_or_else(|| i.to_string(), |v| label(v));
        let _ = writeln!(s, "{:>4}  {:<12} {:>14.6}", pos + 1, name, r.scores[i]);
    }
    s
}

pub fn cmd_rank(cfg: &RunConfig) -> i32 {
    run(|| {
        let report = match &cfg.input {
            Input::RankResult(path) => {
                let text = std::fs::read_to_string(path)?;
                let mut report: RankReport = serde_json::from_str(&text)?;
                if report.result.scores.len() != report.result.ranking.len() {
                    bail!("{}: scores and ranking differ in length", path.display());
                }
                report.result.rerank();
                report
            }
            _ => {
                let Problem { complex, k, signal } = load_problem(cfg)?;
                let result = hodgerank_solve(&complex, k, &signal)?;
                let simplices = complex.simplices(k - 1).iter().map(|s| s.vertices().to_vec()).collect();
                RankReport { seed: cfg.seed, n: complex.n(), simplices, result }
            }
        };
        emit(cfg.out.as_deref(), &to_json(&report)?)?;
        note(cfg.out.as_deref(), &rank_table(&report));
        Ok(EXIT_OK)
    })
}

fn qsim_epsilon(cfg: &RunConfig, n: usize) -> f64 {
    match cfg.target_distance {
        Some(t) => epsilon_for_target(t, cfg.gamma_g, n),
        None => cfg.epsilon,
    }
}

pub fn cmd_qsim(cfg: &RunConfig) -> i32 {
    run(|| {
        let Problem { complex, k, signal } = load_problem(cfg)?;
        let n = complex.n();
        if !cfg.sweep_epsilons.is_empty() {
            let trial = Trial { complex, k, signal };
            let rows = bound_sweep(std::slice::from_ref(&trial), &cfg.sweep_epsilons, cfg.kappa, Exec::default())
                .into_iter()
                .collect::<hodgeq_core::Result<Vec<_>>>()?;
            emit(cfg.out.as_deref(), &to_csv(&rows)?)?;
            let failed = rows.iter().filter(|r| r.status == OutcomeStatus::Fail).count();
            note(cfg.out.as_deref(), &format!("{} sweep points, {failed} failed\n", rows.len()));
            return Ok(if failed > 0 { EXIT_CHECK_FAILED } else { EXIT_OK });
        }

        let epsilon = qsim_epsilon(cfg, n);
        let consistency = consistency_measures(&complex, k, &signal)?;
        let condition = effective_condition_params(&complex, k, cfg.kappa)?;
        let outcome = quantum_hodgerank(&complex, k, &signal, epsilon, cfg.kappa)?;
        let cost = cost_model(n, outcome.degree, condition.kappa, cfg.gamma_g / (n as f64).sqrt())?;
        let mut warnings = Vec::new();
        match outcome.status {
            OutcomeStatus::BoundsInvalid => {
                warnings.push("bounds-invalid: epsilon >= N_*, the certified distance bound does not apply".into())
            }
            OutcomeStatus::PostselectionImpossible => {
                warnings.push("postselection-impossible: the filtered state vanishes".into())
            }
            _ => {}
        }
        if consistency.r < cfg.gamma_g {
            warnings.push(format!("consistency R = {:.6} is below gamma-g = {}", consistency.r, cfg.gamma_g));
        }
        let status = outcome.status;
        let report = QsimReport {
            seed: cfg.seed,
            n,
            k,
            epsilon,
            gamma_g: cfg.gamma_g,
            target_distance: cfg.target_distance,
            consistency,
            condition,
            cost,
            warnings,
            outcome,
        };
        emit(cfg.out.as_deref(), &to_json(&report)?)?;
        let o = &report.outcome;
        let mut summary = format!(
            "status {:?}  degree {}  kappa {:.4}  P(success) {:.6e}",
            status, o.degree, report.condition.kappa, o.postselect_prob
        );
        if let (Some(d), Some(b)) = (o.achieved_distance, o.distance_bound) {
            let _ = write!(summary, "  distance {d:.3e} <= bound {b:.3e}");
        }
        summary.push('\n');
        for w in &report.warnings {
            let _ = writeln!(summary, "warning: {w}");
        }
        note(cfg.out.as_deref(), &summary);
        Ok(if status == OutcomeStatus::Fail { EXIT_CHECK_FAILED } else { EXIT_OK })
    })
}

fn estimator_job(cfg: &RunConfig, problem: &Problem) -> EstimatorJob {
    match cfg.estimator {
        EstimatorChoice::Relative => EstimatorJob::Relative(
            cfg.subset.clone().unwrap_or_else(|| (0..problem.complex.count(problem.k - 1)).collect()),
        ),
        EstimatorChoice::Tomography => EstimatorJob::Tomography(cfg.access),
        choice => EstimatorJob::Consistency(choice.subspace().expect("consistency estimator")),
    }
}

pub fn cmd_estimate(cfg: &RunConfig) -> i32 {
    run(|| {
        let problem = load_problem(cfg)?;
        let job = estimator_job(cfg, &problem);
        let Problem { complex, k, signal } = &problem;
        if cfg.sweep_epsilons.is_empty() {
            let config = EstimatorConfig::new(cfg.epsilon, cfg.delta, cfg.seed, cfg.mode)?;
            let report: EstimateReport = job.run(complex, *k, signal, &config)?;
            emit(cfg.out.as_deref(), &to_json(&report)?)?;
            note(
                cfg.out.as_deref(),
                &format!(
                    "{}: max error {:.4e} (tolerance {}), shots {}\n",
                    report.estimator.name(),
                    report.max_error,
                    report.tolerance,
                    report.shots_used
                ),
            );
            return Ok(EXIT_OK);
        }

        let seeds = if cfg.sweep_seeds.is_empty() { vec![cfg.seed] } else { cfg.sweep_seeds.clone() };
        let grid: Vec<(f64, u64)> =
            cfg.sweep_epsilons.iter().flat_map(|&e| seeds.iter().map(move |&s| (e, s))).collect();
        let rows = Exec::default()
            .map(grid.len(), |i| {
                let (eps, seed) = grid[i];
                let config = EstimatorConfig::new(eps, cfg.delta, seed, cfg.mode)?;
                job.run(complex, *k, signal, &config).map(|r| BatchRow::from(&r))
            })
            .into_iter()
            .collect::<hodgeq_core::Result<Vec<_>>>()?;
        emit(cfg.out.as_deref(), &to_csv(&rows)?)?;
        let pass = rows.iter().filter(|r| r.pass).count();
        note(cfg.out.as_deref(), &format!("{} sweep points, {pass} within tolerance\n", rows.len()));
        Ok(EXIT_OK)
    })
}

pub fn cmd_verify(cfg: &RunConfig) -> i32 {
    run(|| {
        let summary = verify::run_suite(cfg);
        if let Some(out) = cfg.out.as_deref() {
            emit(Some(out), &to_json(&summary)?)?;
        }
        print!("{}", verify::table(&summary));
        Ok(if summary.passed { EXIT_OK } else { EXIT_CHECK_FAILED })
    })
}
