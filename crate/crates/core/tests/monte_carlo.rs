//! Ensemble error shrinks with the number of trajectories.

use qtraj_core::master::exact_evolve;
use qtraj_core::model::qubit_decay_model;
use qtraj_core::statespace::{projector, trace_distance, StateVector};
use qtraj_core::unravel::{ensemble_mean, Method, TrajectoryConfig};

fn errors(m: &qtraj_core::model::LindbladModel, method: Method, n: usize, seed: u64) -> Vec<f64> {
    let psi0 = StateVector::basis(2, 0).unwrap();
    let cfg = TrajectoryConfig::new(1e-3, 2.0, 400, 0, method).unwrap();
    let mean = ensemble_mean(m, &psi0, &cfg, n, seed).unwrap();
    mean.times
        .iter()
        .zip(&mean.states)
        .skip(1)
        .map(|(t, rho)| trace_distance(rho, &exact_evolve(m, &projector(&psi0), *t).unwrap()).unwrap())
        .collect()
}

#[test]
fn error_at_250_trajectories_exceeds_error_at_1000() {
    for (gamma, rabi) in [(1.0, 0.0), (1.0, 2.0)] {
        let m = qubit_decay_model(gamma, rabi, 0.0).unwrap();
        for method in [Method::Qsd, Method::Homodyne, Method::Jump] {
            let mut small = [0.0; 5];
            let mut large = [0.0; 5];
            for rep in 0..5u64 {
                for (acc, n) in [(&mut small, 250), (&mut large, 1000)] {
                    for (a, e) in acc.iter_mut().zip(errors(&m, method, n, 100 + rep)) {
                        *a += e / 5.0;
                    }
                }
            }
            let wins = small.iter().zip(&large).filter(|(s, l)| s > l).count();
            assert!(wins >= 4, "Ω = {rabi}, {method}: n = 250 {small:?} vs n = 1000 {large:?}");
        }
    }
}
