//! Deterministic evolution of the density matrix under the Lindblad master
//! equation
//!
//! ```text
//! dρ/dt = −i[H, ρ] + Σ_k (L_k ρ L_k† − ½{L_k† L_k, ρ})
//! ```
//!
//! Two routes are provided: fixed-step RK4 on the right-hand side, and an
//! exact propagator built from the exponential of the vectorized
//! Liouvillian. Vectorization stacks columns: `vec(ρ)[i + n·j] = ρ_ij`, so
//! that `vec(A ρ B) = (Bᵀ ⊗ A) vec(ρ)`.

use ndarray::{Array1, Array2, ArrayView2};

use crate::error::{Error, Result};
use crate::grid::TimeGrid;
use crate::model::LindbladModel;
use crate::statespace::{check_dim, dagger, expm, normalize_hermitian, solve_linear, trace, DensityMatrix, C64, ONE};

/// Largest trace drift tolerated between snapshots before the integration is
/// declared unreliable.
pub const MAX_TRACE_DRIFT: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MasterEvolutionConfig {
    pub dt: f64,
    pub t_final: f64,
    pub record_every: usize,
}

impl MasterEvolutionConfig {
    pub fn new(dt: f64, t_final: f64, record_every: usize) -> Result<Self> {
        TimeGrid::new(dt, t_final, record_every)?;
        Ok(Self { dt, t_final, record_every })
    }

    pub fn grid(&self) -> Result<TimeGrid> {
        TimeGrid::new(self.dt, self.t_final, self.record_every)
    }
}

/// Recorded density matrices of a deterministic run.
#[derive(Clone, Debug, PartialEq)]
pub struct MasterSeries {
    pub times: Vec<f64>,
    pub states: Vec<DensityMatrix>,
}

impl MasterSeries {
    pub fn last(&self) -> Option<(f64, &DensityMatrix)> {
        Some((*self.times.last()?, self.states.last()?))
    }
}

/// `dρ/dt` for the model at `rho`.
pub fn lindblad_rhs(m: &LindbladModel, rho: &DensityMatrix) -> Result<Array2<C64>> {
    check_dim(m.dim(), rho.dim())?;
    Ok(Generator::new(m).apply(rho.entries().view()))
}

/// Precomputed pieces of the right-hand side: `G = −iH − ½ Σ L†L` so that
/// `dρ/dt = G ρ + ρ G† + Σ L ρ L†`.
struct Generator {
    drift: Array2<C64>,
    drift_dag: Array2<C64>,
    jumps: Vec<(Array2<C64>, Array2<C64>)>,
}

impl Generator {
    fn new(m: &LindbladModel) -> Self {
        let drift = m.effective_generator();
        let drift_dag = dagger(&drift);
        let jumps = m.lindblad_ops().iter().map(|l| (l.entries().clone(), dagger(l.entries()))).collect();
        Self { drift, drift_dag, jumps }
    }

    fn apply(&self, rho: ArrayView2<C64>) -> Array2<C64> {
        let mut out = self.drift.dot(&rho);
        out += &rho.dot(&self.drift_dag);
        for (l, l_dag) in &self.jumps {
            out += &l.dot(&rho).dot(l_dag);
        }
        out
    }
}

/// Classical fourth-order Runge–Kutta with fixed step. Snapshots are
/// re-symmetrized and trace-normalized; the integration itself carries the
/// raw state so that drift stays observable.
pub fn rk4_evolve(m: &LindbladModel, rho0: &DensityMatrix, cfg: &MasterEvolutionConfig) -> Result<MasterSeries> {
    check_dim(m.dim(), rho0.dim())?;
    let grid = cfg.grid()?;
    let generator = Generator::new(m);
    let dt = grid.dt();

    let mut rho = rho0.entries().clone();
    let mut series = MasterSeries {
        times: Vec::with_capacity(grid.snapshot_count()),
        states: Vec::with_capacity(grid.snapshot_count()),
    };
    series.times.push(0.0);
    series.states.push(rho0.clone());
    let mut last_trace = 1.0;

    for step in 1..=grid.steps() {
        let k1 = generator.apply(rho.view());
        let k2 = generator.apply((&rho + &k1.mapv(|z| z * (0.5 * dt))).view());
        let k3 = generator.apply((&rho + &k2.mapv(|z| z * (0.5 * dt))).view());
        let k4 = generator.apply((&rho + &k3.mapv(|z| z * dt)).view());
        let weight = dt / 6.0;
        ndarray::Zip::from(&mut rho)
            .and(&k1)
            .and(&k2)
            .and(&k3)
            .and(&k4)
            .for_each(|r, &a, &b, &c, &d| *r += (a + 2.0 * b + 2.0 * c + d) * weight);

        if grid.is_recorded(step) {
            let time = grid.time(step);
            if rho.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
                return Err(Error::NumericalBlowUp { time });
            }
            let tr = trace(rho.view()).re;
            if (tr - last_trace).abs() > MAX_TRACE_DRIFT {
                return Err(Error::TraceDrift { time, drift: tr - last_trace });
            }
            last_trace = tr;
            series.times.push(time);
            series.states.push(DensityMatrix::from_positive(normalize_hermitian(rho.clone())?));
        }
    }
    Ok(series)
}

/// The Liouvillian superoperator in column-stacking convention:
///
/// ```text
/// ℒ = −i(I⊗H − Hᵀ⊗I) + Σ_k (L̄_k⊗L_k − ½ I⊗L_k†L_k − ½ (L_k†L_k)ᵀ⊗I)
/// ```
pub fn liouvillian_matrix(m: &LindbladModel) -> Array2<C64> {
    let n = m.dim();
    let eye = Array2::<C64>::eye(n);
    let minus_i = C64::new(0.0, -1.0);
    let h = m.hamiltonian().entries();

    let mut sup = (kron(&eye, h) - kron(&h.t().to_owned(), &eye)).mapv(|z| z * minus_i);
    for l in m.lindblad_ops() {
        let l = l.entries();
        let ldl = dagger(l).dot(l);
        sup += &kron(&l.mapv(|z| z.conj()), l);
        sup -= &kron(&eye, &ldl).mapv(|z| z * 0.5);
        sup -= &kron(&ldl.t().to_owned(), &eye).mapv(|z| z * 0.5);
    }
    sup
}

/// `ρ_t` from `vec(ρ_t) = exp(ℒ t) vec(ρ_0)`.
pub fn exact_evolve(m: &LindbladModel, rho0: &DensityMatrix, t: f64) -> Result<DensityMatrix> {
    check_dim(m.dim(), rho0.dim())?;
    if !(t.is_finite() && t >= 0.0) {
        return Err(Error::InvalidParameter { name: "t", reason: format!("{t} is negative or not finite") });
    }
    if t == 0.0 {
        return Ok(rho0.clone());
    }
    let propagator = expm(liouvillian_matrix(m).mapv(|z| z * t).view());
    let out = unvec(&propagator.dot(&vec_columns(rho0.entries())), m.dim());
    DensityMatrix::from_hermitian_part(out)
}

/// The stationary state, found as the null vector of `ℒ` normalized to unit
/// trace. Fails with [`Error::Singular`] when the stationary state is not
/// unique.
pub fn steady_state(m: &LindbladModel) -> Result<DensityMatrix> {
    let n = m.dim();
    let mut sup = liouvillian_matrix(m);
    // replace one equation by tr(ρ) = 1
    for col in 0..n * n {
        sup[[0, col]] = C64::from(0.0);
    }
    for i in 0..n {
        sup[[0, i + n * i]] = ONE;
    }
    let mut rhs = Array1::zeros(n * n);
    rhs[0] = ONE;
    let x = solve_linear(&sup, &rhs)?;
    DensityMatrix::from_hermitian_part(unvec(&x, n))
}

pub(crate) fn vec_columns(rho: &Array2<C64>) -> Array1<C64> {
    let n = rho.nrows();
    Array1::from_shape_fn(n * n, |idx| rho[[idx % n, idx / n]])
}

pub(crate) fn unvec(v: &Array1<C64>, n: usize) -> Array2<C64> {
    Array2::from_shape_fn((n, n), |(i, j)| v[i + n * j])
}

fn kron(a: &Array2<C64>, b: &Array2<C64>) -> Array2<C64> {
    let (ar, ac) = a.dim();
    let (br, bc) = b.dim();
    Array2::from_shape_fn((ar * br, ac * bc), |(i, j)| a[[i / br, j / bc]] * b[[i % br, j % bc]])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{apply_transform, qubit_decay_model, RepresentationTransform};
    use crate::statespace::{
        hermitian_eigenvalues, max_abs_diff, projector, sigma_z, trace_distance, OperatorMatrix, StateVector,
    };
    use crate::testing::{random_density, random_model, random_shifts, random_unitary};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn excited() -> DensityMatrix {
        projector(&StateVector::basis(2, 0).unwrap())
    }

    // L ρ L† − ½{L†L, ρ} − i[H, ρ] written out with explicit index loops.
    fn brute_rhs(m: &LindbladModel, rho: &Array2<C64>) -> Array2<C64> {
        let n = m.dim();
        let mul = |a: &Array2<C64>, b: &Array2<C64>| {
            Array2::from_shape_fn((n, n), |(i, j)| (0..n).map(|k| a[[i, k]] * b[[k, j]]).sum::<C64>())
        };
        let adj = |a: &Array2<C64>| Array2::from_shape_fn((n, n), |(i, j)| a[[j, i]].conj());
        let h = m.hamiltonian().entries();
        let mut out = (mul(h, rho) - mul(rho, h)).mapv(|z| z * C64::new(0.0, -1.0));
        for l in m.lindblad_ops() {
            let l = l.entries();
            let ldl = mul(&adj(l), l);
            out = out + mul(&mul(l, rho), &adj(l)) - (mul(&ldl, rho) + mul(rho, &ldl)).mapv(|z| z * 0.5);
        }
        out
    }

    #[test]
    fn rhs_of_trivial_model_is_zero() {
        let m = LindbladModel::new(OperatorMatrix::zeros(3), vec![OperatorMatrix::zeros(3)]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(20);
        let rhs = lindblad_rhs(&m, &random_density(3, &mut rng)).unwrap();
        assert!(rhs.iter().all(|z| *z == C64::from(0.0)));
    }

    #[test]
    fn rhs_of_decaying_excited_state() {
        let m = qubit_decay_model(1.0, 0.0, 0.0).unwrap();
        let rhs = lindblad_rhs(&m, &excited()).unwrap();
        let oracle = brute_rhs(&m, excited().entries());
        let expected = Array2::from_diag(&ndarray::arr1(&[C64::from(-1.0), C64::from(1.0)]));
        assert!(max_abs_diff(oracle.view(), expected.view()) < 1e-15);
        assert!(max_abs_diff(rhs.view(), expected.view()) < 1e-15);
    }

    #[test]
    fn rhs_is_hermitian_and_traceless() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for dim in 2..=4 {
            let m = random_model(dim, 2, 2.0, &mut rng);
            let rho = random_density(dim, &mut rng);
            let rhs = lindblad_rhs(&m, &rho).unwrap();
            assert!(crate::statespace::hermiticity_error(rhs.view()) < 1e-12);
            assert!(trace(rhs.view()).norm() < 1e-12);
            assert!(max_abs_diff(rhs.view(), brute_rhs(&m, rho.entries()).view()) < 1e-12);
        }
        let m = qubit_decay_model(1.0, 0.0, 0.0).unwrap();
        let rho = random_density(3, &mut rng);
        assert_eq!(lindblad_rhs(&m, &rho), Err(Error::DimensionMismatch { expected: 2, found: 3 }));
    }

    #[test]
    fn steady_state_is_stationary() {
        let m = qubit_decay_model(1.0, 2.0, 0.5).unwrap();
        let ss = steady_state(&m).unwrap();
        let rhs = lindblad_rhs(&m, &ss).unwrap();
        assert!(rhs.iter().all(|z| z.norm() < 1e-10));
        // resonance fluorescence: ρ_ee = (Ω²/4) / (Δ² + γ²/4 + Ω²/2)
        let (g, o, d) = (1.0, 2.0, 0.5);
        let expected = (o * o / 4.0) / (d * d + g * g / 4.0 + o * o / 2.0);
        assert!((ss.entries()[[0, 0]].re - expected).abs() < 1e-12);
    }

    #[test]
    fn liouvillian_matches_rhs() {
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        let zero = LindbladModel::new(OperatorMatrix::zeros(2), vec![OperatorMatrix::zeros(2)]).unwrap();
        assert!(liouvillian_matrix(&zero).iter().all(|z| *z == C64::from(0.0)));

        let decay = qubit_decay_model(1.0, 0.0, 0.0).unwrap();
        let out = liouvillian_matrix(&decay).dot(&vec_columns(excited().entries()));
        let expected = [C64::from(-1.0), C64::from(0.0), C64::from(0.0), C64::from(1.0)];
        assert!(out.iter().zip(expected).all(|(a, b)| (a - b).norm() < 1e-15));

        for dim in 2..=4 {
            let m = random_model(dim, 3, 2.0, &mut rng);
            let sup = liouvillian_matrix(&m);
            for _ in 0..10 {
                let rho = random_density(dim, &mut rng);
                let via_sup = unvec(&sup.dot(&vec_columns(rho.entries())), dim);
                let direct = lindblad_rhs(&m, &rho).unwrap();
                assert!(max_abs_diff(via_sup.view(), direct.view()) < 1e-12);
            }
        }
    }

    #[test]
    fn liouvillian_has_zero_eigenvalue() {
        // vec(I)† ℒ = 0: the trace functional is a left null vector, so 0 is
        // in the spectrum; the matching right null vector is the steady state.
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for dim in 2..=4 {
            let m = random_model(dim, 2, 2.0, &mut rng);
            let sup = liouvillian_matrix(&m);
            let tr_vec = vec_columns(&Array2::eye(dim)).mapv(|z| z.conj());
            let left = tr_vec.dot(&sup);
            assert!(left.iter().all(|z| z.norm() < 1e-10));
            let ss = steady_state(&m).unwrap();
            let resid = sup.dot(&vec_columns(ss.entries()));
            assert!(resid.iter().all(|z| z.norm() < 1e-10));
            // the smallest singular value of ℒ is zero
            let gram = dagger(&sup).dot(&sup);
            let smallest = hermitian_eigenvalues(gram.view())[0];
            assert!(smallest.abs().sqrt() < 1e-6);
        }
    }

    #[test]
    fn exact_decay_closed_form() {
        let m = qubit_decay_model(1.0, 0.0, 0.0).unwrap();
        assert_eq!(exact_evolve(&m, &excited(), 0.0).unwrap(), excited());
        let rho = exact_evolve(&m, &excited(), 1.0).unwrap();
        assert!((rho.entries()[[0, 0]].re - (-1.0f64).exp()).abs() < 1e-10);
        assert!(exact_evolve(&m, &excited(), -1.0).is_err());

        let mut rng = ChaCha8Rng::seed_from_u64(24);
        let m = random_model(3, 2, 3.0, &mut rng);
        let rho = exact_evolve(&m, &random_density(3, &mut rng), 1.0).unwrap();
        assert!((rho.trace() - ONE).norm() < 1e-10);
    }

    #[test]
    fn rk4_unitary_phase_rotation() {
        let omega = 2.0;
        let h = sigma_z().scaled(C64::from(omega / 2.0));
        let m = LindbladModel::new(h, vec![]).unwrap();
        let plus = projector(&StateVector::from_slice(&[ONE, ONE]).unwrap());
        let t = std::f64::consts::PI / omega;
        // t is not a multiple of 1e-3, so pick dt = t / 1571
        let cfg = MasterEvolutionConfig::new(t / 1571.0, t, 1571).unwrap();
        let series = rk4_evolve(&m, &plus, &cfg).unwrap();
        let (_, rho) = series.last().unwrap();
        assert!((rho.entries()[[0, 1]] - C64::from(-0.5)).norm() < 1e-8);
    }

    #[test]
    fn rk4_decay_closed_form() {
        let m = qubit_decay_model(1.0, 0.0, 0.0).unwrap();
        let cfg = MasterEvolutionConfig::new(1e-3, 2.0, 500).unwrap();
        let series = rk4_evolve(&m, &excited(), &cfg).unwrap();
        for (t, rho) in series.times.iter().zip(&series.states) {
            if [0.5, 1.0, 2.0].iter().any(|x| (x - t).abs() < 1e-12) {
                assert!((rho.entries()[[0, 0]].re - (-t).exp()).abs() < 1e-8);
            }
        }
        assert_eq!(series.times.len(), 5);
    }

    #[test]
    fn rk4_single_trivial_step() {
        let m = LindbladModel::new(OperatorMatrix::zeros(2), vec![OperatorMatrix::zeros(2)]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(25);
        let rho0 = random_density(2, &mut rng);
        let cfg = MasterEvolutionConfig::new(0.1, 0.1, 1).unwrap();
        let series = rk4_evolve(&m, &rho0, &cfg).unwrap();
        assert_eq!(series.states.len(), 2);
        assert!(max_abs_diff(series.states[1].entries().view(), rho0.entries().view()) < 1e-15);
    }

    #[test]
    fn rk4_reports_drift_for_oversized_steps() {
        let m = qubit_decay_model(400.0, 10.0, 0.0).unwrap();
        let cfg = MasterEvolutionConfig::new(0.05, 1.0, 1).unwrap();
        let err = rk4_evolve(&m, &excited(), &cfg).unwrap_err();
        assert!(matches!(err, Error::TraceDrift { .. } | Error::NumericalBlowUp { .. }), "{err}");
    }

    #[test]
    fn rk4_preserves_invariants_and_matches_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(26);
        for dim in 2..=4 {
            let m = random_model(dim, 2, 2.0, &mut rng);
            let rho0 = random_density(dim, &mut rng);
            let cfg = MasterEvolutionConfig::new(1e-3, 1.0, 100).unwrap();
            let series = rk4_evolve(&m, &rho0, &cfg).unwrap();
            for rho in &series.states {
                assert!((rho.trace() - ONE).norm() <= 1e-9);
                assert!(rho.min_eigenvalue() >= -1e-7);
                DensityMatrix::new(rho.entries().clone()).unwrap();
            }
            let exact = exact_evolve(&m, &rho0, 1.0).unwrap();
            assert!(trace_distance(series.last().unwrap().1, &exact).unwrap() <= 1e-8);
        }
    }

    #[test]
    fn rk4_is_fourth_order() {
        let m = qubit_decay_model(1.0, 2.0, 0.0).unwrap();
        let rho0 = excited();
        let exact = exact_evolve(&m, &rho0, 2.0).unwrap();
        let err = |dt: f64| {
            let cfg = MasterEvolutionConfig::new(dt, 2.0, 1).unwrap();
            let series = rk4_evolve(&m, &rho0, &cfg).unwrap();
            trace_distance(series.last().unwrap().1, &exact).unwrap()
        };
        let ratio = err(0.1) / err(0.05);
        assert!((8.0..=32.0).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn generator_invariant_under_transform() {
        let mut rng = ChaCha8Rng::seed_from_u64(27);
        for k in 1..=3 {
            let m = random_model(3, k, 2.0, &mut rng);
            let t = RepresentationTransform::new(random_unitary(k, &mut rng), random_shifts(k, 0.5, &mut rng)).unwrap();
            let mt = apply_transform(&m, &t).unwrap();
            let rho0 = random_density(3, &mut rng);
            let a = exact_evolve(&m, &rho0, 1.0).unwrap();
            let b = exact_evolve(&mt, &rho0, 1.0).unwrap();
            assert!(trace_distance(&a, &b).unwrap() <= 1e-9);
        }
    }
}
