use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use qtraj_core::analysis::ensemble_mean_projector;
use qtraj_core::master::{exact_evolve, rk4_evolve, MasterEvolutionConfig};
use qtraj_core::model::{apply_transform, RepresentationTransform};
use qtraj_core::statespace::{trace_distance, DensityMatrix};
use qtraj_core::testing::{random_density, random_model, random_shifts, random_state, random_unitary};
use qtraj_core::unravel::{run_ensemble, run_trajectory, Method, TrajectoryConfig};

fn method() -> impl Strategy<Value = Method> {
    prop_oneof![Just(Method::Qsd), Just(Method::Homodyne), Just(Method::Jump)]
}

fn check_density(rho: &DensityMatrix) -> Result<(), TestCaseError> {
    prop_assert!((rho.trace().re - 1.0).abs() <= 1e-9 && rho.trace().im.abs() <= 1e-12);
    prop_assert!(rho.min_eigenvalue() >= -1e-7);
    DensityMatrix::new(rho.entries().clone()).map_err(|e| TestCaseError::fail(e.to_string()))?;
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn trajectories_stay_normalized(seed in any::<u64>(), dim in 2usize..5, k in 1usize..4, method in method()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = random_model(dim, k, 1.5, &mut rng);
        let psi0 = random_state(dim, &mut rng);
        // keeps the jump probability per step under the guard
        let cfg = TrajectoryConfig::new(2e-3, 1.0, 25, seed, method).unwrap();
        let rec = run_trajectory(&m, &psi0, &cfg).unwrap();
        prop_assert_eq!(rec.states.len(), 21);
        for psi in &rec.states {
            prop_assert!((psi.norm() - 1.0).abs() <= 1e-10);
        }
    }

    #[test]
    fn mean_projector_is_a_density_matrix(seed in any::<u64>(), dim in 2usize..4, n in 1usize..12, method in method()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = random_model(dim, 2, 1.0, &mut rng);
        let cfg = TrajectoryConfig::new(1e-2, 0.5, 10, 0, method).unwrap();
        let recs = run_ensemble(&m, &random_state(dim, &mut rng), &cfg, n, seed).unwrap();
        for k in 0..recs[0].times.len() {
            let rho = ensemble_mean_projector(&recs, k).unwrap();
            prop_assert!(rho.min_eigenvalue() >= -1e-12);
            prop_assert!((rho.trace().re - 1.0).abs() <= 1e-12);
        }
    }

    #[test]
    fn master_evolution_keeps_density_invariants(seed in any::<u64>(), dim in 2usize..5, k in 1usize..4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = random_model(dim, k, 3.0, &mut rng);
        let rho0 = random_density(dim, &mut rng);
        let series = rk4_evolve(&m, &rho0, &MasterEvolutionConfig::new(1e-3, 1.0, 100).unwrap()).unwrap();
        for (t, rho) in series.times.iter().zip(&series.states) {
            check_density(rho)?;
            check_density(&exact_evolve(&m, &rho0, *t).unwrap())?;
        }
    }

    #[test]
    fn exact_evolution_is_representation_invariant(seed in any::<u64>(), dim in 2usize..5, k in 1usize..4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = random_model(dim, k, 2.0, &mut rng);
        let t = RepresentationTransform::new(random_unitary(k, &mut rng), random_shifts(k, 1.0, &mut rng)).unwrap();
        let rho0 = random_density(dim, &mut rng);
        let a = exact_evolve(&m, &rho0, 1.3).unwrap();
        let b = exact_evolve(&apply_transform(&m, &t).unwrap(), &rho0, 1.3).unwrap();
        prop_assert!(trace_distance(&a, &b).unwrap() <= 1e-9);
    }
}
