//! Seeded random inputs shared by tests, benches and the command line.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::complex::{CliqueComplex, Graph};
use crate::hodgerank::{self, ComparisonRecord, PairwiseData, SimplicialSignal};
use crate::qtsp::Trial;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Erdős–Rényi graph `G(n, p)`.
pub fn erdos_renyi<R: Rng>(n: usize, p: f64, rng: &mut R) -> Graph {
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.random::<f64>() < p {
                edges.push((u, v));
            }
        }
    }
    Graph::new(n, edges).expect("generated edges are valid")
}

/// Standard normal entries.
pub fn gaussian_vector<R: Rng>(len: usize, rng: &mut R) -> Vec<f64> {
    (0..len).map(|_| rng.sample(StandardNormal)).collect()
}

/// Gaussian k-signal on `complex`.
pub fn random_signal<R: Rng>(complex: &CliqueComplex, k: usize, rng: &mut R) -> SimplicialSignal {
    SimplicialSignal::new(k, gaussian_vector(complex.count(k), rng))
}

/// One comparison per edge of `graph`, each from its own voter, valued
/// `score[j] - score[i]` plus Gaussian noise of size `noise`.
pub fn comparisons_on<R: Rng>(graph: &Graph, scores: &[f64], noise: f64, rng: &mut R) -> Vec<ComparisonRecord> {
    graph
        .edges()
        .iter()
        .enumerate()
        .map(|(t, &(i, j))| {
            let e: f64 = rng.sample(StandardNormal);
            ComparisonRecord { voter: format!("v{t}"), i, j, value: scores[j] - scores[i] + noise * e }
        })
        .collect()
}

/// Seeded end-to-end inputs on random graphs with at most `max_n`
/// vertices: balanced comparison data for `k = 1`, Gaussian triangle signals
/// for `k = 2`. Only trials with consistency `R >= min_r` are kept.
pub fn pipeline_trials(count: usize, max_n: usize, min_r: f64, seed: u64) -> Vec<Trial> {
    let mut rng = rng(seed);
    let mut out = Vec::with_capacity(count);
    let mut attempt = 0usize;
    while out.len() < count {
        attempt += 1;
        assert!(attempt < 1000 * (count + 1), "trial generator is not producing usable inputs");
        let n = 4 + attempt % (max_n - 3);
        let k = 1 + attempt % 2;
        let p = if k == 1 { 0.6 } else { 0.8 };
        let g = erdos_renyi(n, p, &mut rng);
        let complex = match CliqueComplex::build_full(g.clone(), k + 1) {
            Ok(c) if c.max_dim() >= k && c.count(k) > 0 => c,
            _ => continue,
        };
        let signal = if k == 1 {
            let scores = gaussian_vector(n, &mut rng);
            let data = PairwiseData::new(comparisons_on(&g, &scores, 0.5, &mut rng), Some(n)).expect("edges exist");
            hodgerank::assemble_edge_signal(&data).expect("one voter per edge is balanced").1
        } else {
            random_signal(&complex, k, &mut rng)
        };
        if signal.norm() == 0.0 {
            continue;
        }
        match hodgerank::consistency_measures(&complex, k, &signal) {
            Ok(m) if m.r >= min_r => out.push(Trial { complex, k, signal }),
            _ => {}
        }
    }
    out
}
