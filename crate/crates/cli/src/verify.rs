//! Property suite behind `hodgeq verify`.

use std::fmt::Write as _;
use std::time::Instant;

use hodgeq_core::dirac::DiracEncoding;
use hodgeq_core::filters::{pseudoinverse_filter, CERTIFICATE_GRID};
use hodgeq_core::qtsp::bound_sweep;
use hodgeq_core::{fixtures, CliqueComplex, Exec, Graph, InversePolynomial, OutcomeStatus, SignConvention, SimplicialSignal};
use serde::{Deserialize, Serialize};

use crate::config::RunConfig;

const DEFAULT_SIZES: [usize; 4] = [6, 8, 10, 12];
const DENSITIES: [f64; 3] = [0.3, 0.5, 0.8];
/// Largest complex handed to the dense projector and pipeline checks.
const DENSE_LIMIT: usize = 10;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub cases: usize,
    pub failures: usize,
    /// largest violation measure seen (check-specific, 0 when exact)
    pub worst: f64,
    pub seconds: f64,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifySummary {
    pub seed: u64,
    pub sizes: Vec<usize>,
    pub complexes: usize,
    pub injected_sign_flip: bool,
    pub checks: Vec<CheckResult>,
    pub passed: bool,
}

fn octahedron() -> Graph {
    let edges = (0..6).flat_map(|u| (u + 1..6).map(move |v| (u, v))).filter(|&(u, v)| v != u + 3 || u >= 3);
    Graph::new(6, edges).expect("octahedron graph is valid")
}

fn suite_complexes(seed: u64, sizes: &[usize]) -> Vec<CliqueComplex> {
    let mut out: Vec<CliqueComplex> = [Graph::path(3), Graph::cycle(5), Graph::complete(4), octahedron(), Graph::complete(6)]
        .into_iter()
        .map(|g| {
            let n = g.n();
            CliqueComplex::build_full(g, n - 1).expect("fixture graphs are valid")
        })
        .collect();
    let mut rng = fixtures::rng(seed);
    for &n in sizes {
        for p in DENSITIES {
            let g = fixtures::erdos_renyi(n, p, &mut rng);
            out.push(CliqueComplex::build_full(g, n - 1).expect("random graphs are valid"));
        }
    }
    out
}

struct Tally {
    name: &'static str,
    start: Instant,
    cases: usize,
    failures: usize,
    worst: f64,
    detail: String,
}

impl Tally {
    fn new(name: &'static str) -> Self {
        Tally { name, start: Instant::now(), cases: 0, failures: 0, worst: 0.0, detail: String::new() }
    }

    fn record(&mut self, ok: bool, measure: f64, what: impl FnOnce() -> String) {
        self.cases += 1;
        self.worst = self.worst.max(measure);
        if !ok {
            self.failures += 1;
            if self.detail.is_empty() {
                self.detail = what();
            }
        }
    }

    fn finish(self) -> CheckResult {
        CheckResult {
            name: self.name.into(),
            cases: self.cases,
            failures: self.failures,
            worst: self.worst,
            seconds: self.start.elapsed().as_secs_f64(),
            passed: self.failures == 0 && self.cases > 0,
            detail: self.detail,
        }
    }
}

fn boundary_squared(complexes: &[CliqueComplex]) -> CheckResult {
    let mut t = Tally::new("boundary_squared_zero");
    for (c_idx, c) in complexes.iter().enumerate() {
        for k in 2..=c.max_dim() {
            let (lo, hi) = (c.boundary_matrix(k - 1), c.boundary_matrix(k));
            let nonzeros = match (lo, hi) {
                (Ok(lo), Ok(hi)) => lo.sparse_product(&hi).len(),
                _ => usize::MAX,
            };
            t.record(nonzeros == 0, nonzeros as f64, || format!("complex {c_idx}, k={k}: {nonzeros} nonzeros"));
        }
    }
    t.finish()
}

fn spectral_bound(complexes: &[CliqueComplex]) -> CheckResult {
    let mut t = Tally::new("spectral_bound");
    for (c_idx, c) in complexes.iter().enumerate().filter(|(_, c)| c.n() <= DENSE_LIMIT) {
        let root_n = (c.n() as f64).sqrt();
        for k in 1..=c.max_dim() {
            let sigma = hodgeq_core::linalg::ThinSvd::new(&c.boundary_dense(k)).sigma_max();
            t.record(sigma <= root_n + 1e-9, (sigma - root_n).max(0.0), || {
                format!("complex {c_idx}, k={k}: sigma_max {sigma} > sqrt(n)")
            });
        }
    }
    t.finish()
}

fn hodge_orthogonality(complexes: &[CliqueComplex], seed: u64) -> CheckResult {
    let mut t = Tally::new("hodge_orthogonality");
    let mut rng = fixtures::rng(seed ^ 0x5eed);
    for (c_idx, c) in complexes.iter().enumerate().filter(|(_, c)| c.n() <= DENSE_LIMIT) {
        for k in 1..=c.max_dim().min(2) {
            let Ok(p) = c.hodge_projectors(k) else {
                t.record(false, f64::INFINITY, || format!("complex {c_idx}, k={k}: projectors failed"));
                continue;
            };
            let s = SimplicialSignal::new(k, fixtures::gaussian_vector(c.count(k), &mut rng)).to_vector();
            let parts = (&p.grad * &s).norm_squared() + (&p.curl * &s).norm_squared() + (&p.harm * &s).norm_squared();
            let rel = (parts - s.norm_squared()).abs() / s.norm_squared();
            t.record(rel <= 1e-10, rel, || format!("complex {c_idx}, k={k}: relative error {rel:e}"));
        }
    }
    t.finish()
}

fn pue_identity(complexes: &[CliqueComplex], convention: SignConvention) -> CheckResult {
    let mut t = Tally::new("pue_identity");
    for (c_idx, c) in complexes.iter().enumerate() {
        let result = DiracEncoding::new(c.n(), convention).and_then(|d| d.verify(c, Exec::default()));
        match result {
            Ok(r) => t.record(true, r.max_error, String::new),
            Err(e) => t.record(false, f64::INFINITY, || format!("complex {c_idx}: {e}")),
        }
    }
    t.finish()
}

fn polynomial_certificates() -> CheckResult {
    let mut t = Tally::new("polynomial_certificates");
    for kappa in [2.0, 4.0, 8.0] {
        for eps in [1e-2, 1e-3] {
            match InversePolynomial::build(kappa, eps) {
                Ok(poly) => {
                    let c = poly.certify(10 * CERTIFICATE_GRID, Exec::default());
                    let sup = pseudoinverse_filter(&poly).sup_norm(10 * CERTIFICATE_GRID, Exec::default());
                    let ok = c.max_inverse_error <= eps && c.max_abs <= 1.0 && c.value_at_zero == 0.0 && sup <= 1.0;
                    t.record(ok, c.max_inverse_error / eps, || {
                        format!("kappa={kappa}, eps={eps}: {c:?}, sup|x g(x^2)|={sup}")
                    });
                }
                Err(e) => t.record(false, f64::INFINITY, || e.to_string()),
            }
        }
    }
    t.finish()
}

fn pipeline_bounds(seed: u64, max_n: usize) -> CheckResult {
    let mut t = Tally::new("pipeline_bounds");
    let trials = fixtures::pipeline_trials(12, max_n.clamp(4, DENSE_LIMIT), 0.1, seed);
    for (i, row) in bound_sweep(&trials, &[1e-2, 1e-3], None, Exec::default()).into_iter().enumerate() {
        match row {
            Ok(r) => {
                let ratio = if r.bound > 0.0 { r.distance / r.bound } else { f64::INFINITY };
                t.record(r.status == OutcomeStatus::Pass, ratio, || format!("trial {}, eps {}: {:?}", r.trial, r.epsilon, r.status));
            }
            Err(e) => t.record(false, f64::INFINITY, || format!("sweep point {i}: {e}")),
        }
    }
    t.finish()
}

pub fn run_suite(cfg: &RunConfig) -> VerifySummary {
    let sizes = if cfg.sweep_n.is_empty() { DEFAULT_SIZES.to_vec() } else { cfg.sweep_n.clone() };
    let seeds = if cfg.sweep_seeds.is_empty() { vec![cfg.seed] } else { cfg.sweep_seeds.clone() };
    let complexes: Vec<CliqueComplex> = seeds.iter().flat_map(|&s| suite_complexes(s, &sizes)).collect();
    let convention = if cfg.inject_dirac_sign_flip { SignConvention::Unsigned } else { SignConvention::Fermionic };
    let max_n = sizes.iter().copied().max().unwrap_or(DENSE_LIMIT);
    let checks = vec![
        boundary_squared(&complexes),
        spectral_bound(&complexes),
        hodge_orthogonality(&complexes, cfg.seed),
        pue_identity(&complexes, convention),
        polynomial_certificates(),
        pipeline_bounds(cfg.seed, max_n),
    ];
    VerifySummary {
        seed: cfg.seed,
        sizes,
        complexes: complexes.len(),
        injected_sign_flip: cfg.inject_dirac_sign_flip,
        passed: checks.iter().all(|c| c.passed),
        checks,
    }
}

pub fn table(summary: &VerifySummary) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "{:<24} {:>6} {:>8} {:>12} {:>9}  result", "check", "cases", "failures", "worst", "seconds");
    for c in &summary.checks {
        let _ = writeln!(
            s,
            "{:<24} {:>6} {:>8} {:>12.3e} {:>9.2}  {}",
            c.name,
            c.cases,
            c.failures,
            c.worst,
            c.seconds,
            if c.passed { "PASS" } else { "FAIL" }
        );
        if !c.detail.is_empty() {
            let _ = writeln!(s, "    {}", c.detail);
        }
    }
    let _ = writeln!(s, "{}", if summary.passed { "all checks passed" } else { "some checks FAILED" });
    s
}
