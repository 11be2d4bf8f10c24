use hodgeq_core::qtsp::{epsilon_for_target, bound_sweep, DEFAULT_GAMMA_G};
use hodgeq_core::{
    consistency_measures, fixtures, hodgerank_solve, prepare_signal_state, qtsp_apply, quantum_hodgerank, CliqueComplex,
    Exec, FilterSpec, Graph, OutcomeStatus, SimplicialSignal,
};

#[test]
fn certified_state_and_probability_bounds() {
    let trials = fixtures::pipeline_trials(24, 10, 0.1, 11);
    let rows = bound_sweep(&trials, &[1e-2, 1e-3], None, Exec::default());
    let mut checked = 0;
    for row in rows {
        let row = row.unwrap();
        assert_eq!(row.status, OutcomeStatus::Pass, "{row:?}");
        assert!(row.distance <= row.bound, "{row:?}");
        checked += 1;
    }
    assert_eq!(checked, 48);
}

#[test]
fn outcome_fields_are_consistent() {
    for trial in fixtures::pipeline_trials(6, 8, 0.1, 3) {
        let out = quantum_hodgerank(&trial.complex, trial.k, &trial.signal, 1e-2, None).unwrap();
        let (lo, hi) = out.prob_bounds.unwrap();
        assert!(lo <= out.postselect_prob && out.postselect_prob <= hi);
        assert!((0.0..=1.0).contains(&out.postselect_prob));
        assert!((out.postselect_prob + out.garbage_norm_sq - 1.0).abs() < 1e-12);
        let state = out.output_state.as_ref().unwrap();
        assert!((state.iter().map(|x| x * x).sum::<f64>() - 1.0).abs() < 1e-12);
        // the oracle state is the normalized classical solution of the normalized input
        let unit = SimplicialSignal::new(trial.k, prepare_signal_state(&trial.signal).unwrap().amplitudes);
        let classical = hodgerank_solve(&trial.complex, trial.k, &unit).unwrap().scores;
        let norm = classical.iter().map(|x| x * x).sum::<f64>().sqrt();
        assert!((norm - out.n_star.unwrap()).abs() < 1e-10);
        for (a, b) in out.oracle_state.unwrap().iter().zip(&classical) {
            assert!((a - b / norm).abs() < 1e-10);
        }
    }
}

#[test]
fn target_distance_is_met_with_gamma_g() {
    for trial in fixtures::pipeline_trials(6, 8, DEFAULT_GAMMA_G, 17) {
        let r = consistency_measures(&trial.complex, trial.k, &trial.signal).unwrap().r;
        assert!(r >= DEFAULT_GAMMA_G);
        let target = 0.2;
        let eps = epsilon_for_target(target, DEFAULT_GAMMA_G, trial.complex.n());
        let out = quantum_hodgerank(&trial.complex, trial.k, &trial.signal, eps, None).unwrap();
        assert!(out.achieved_distance.unwrap() <= target);
        assert!(out.distance_bound.unwrap() <= target);
    }
}

#[test]
fn identity_filter_reports_encoded_operator() {
    let c = CliqueComplex::build(Graph::cycle(5), 1).unwrap();
    let s = SimplicialSignal::new(1, vec![1.0, -2.0, 0.5, 3.0, 1.0]);
    let state = prepare_signal_state(&s).unwrap();
    let out = qtsp_apply(&FilterSpec::identity(), &c, 1, &state).unwrap();
    let expect = c.boundary_dense(1) * state.to_vector() / 5f64.sqrt();
    assert!((nalgebra::DVector::from_vec(out.filtered) - &expect).amax() < 1e-12);
    assert!((out.postselect_prob - expect.norm_squared()).abs() < 1e-12);
}

#[test]
fn sweep_is_strategy_independent() {
    let trials = fixtures::pipeline_trials(6, 7, 0.1, 99);
    let a: Vec<_> = bound_sweep(&trials, &[1e-2], None, Exec::Sequential).into_iter().map(Result::unwrap).collect();
    let b: Vec<_> = bound_sweep(&trials, &[1e-2], None, Exec::Parallel).into_iter().map(Result::unwrap).collect();
    assert_eq!(a, b);
}
