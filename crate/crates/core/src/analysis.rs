//! Observables and reductions over trajectory records.

use crate::error::{Error, Result};
use crate::model::DrivePeriod;
use crate::statespace::{
    check_dim, expectation_raw, sigma_x, sigma_y, sigma_z, DensityMatrix, OperatorMatrix, StateVector, C64,
};
use crate::unravel::{ProjectorMean, TrajectoryRecord};

/// Snapshots per drive period required by [`poincare_sample`].
pub const MIN_SAMPLES_PER_PERIOD: usize = 20;

/// `⟨ψ_t|A|ψ_t⟩` at every snapshot.
pub fn expectation_series(rec: &TrajectoryRecord, op: &OperatorMatrix) -> Result<Vec<(f64, C64)>> {
    if let Some(first) = rec.states.first() {
        check_dim(op.dim(), first.dim())?;
    }
    Ok(rec
        .times
        .iter()
        .zip(&rec.states)
        .map(|(&t, psi)| (t, expectation_raw(op.entries().view(), psi.amplitudes().view())))
        .collect())
}

/// Arithmetic mean of `|ψ⟩⟨ψ|` over records at snapshot `t_index`, summed
/// in record order.
pub fn ensemble_mean_projector(records: &[TrajectoryRecord], t_index: usize) -> Result<DensityMatrix> {
    let Some(first) = records.first() else {
        return Err(Error::InvalidParameter { name: "records", reason: "empty ensemble".into() });
    };
    let Some(&t) = first.times.get(t_index) else {
        return Err(Error::InvalidParameter {
            name: "t_index",
            reason: format!("{t_index} out of range ({} snapshots)", first.times.len()),
        });
    };
    let n = first.states[0].dim();
    let mut acc = ProjectorMean::default();
    for rec in records {
        if rec.times.len() != first.times.len() || rec.times[t_index] != t {
            return Err(Error::InvalidParameter { name: "records", reason: "records do not share a time grid".into() });
        }
        check_dim(n, rec.states[t_index].dim())?;
        acc.add(std::slice::from_ref(&rec.states[t_index]));
    }
    Ok(acc.finish().pop().expect("one snapshot"))
}

/// `(⟨σ_x⟩, ⟨σ_y⟩, ⟨σ_z⟩)` of a qubit density matrix.
pub fn bloch_vector(rho: &DensityMatrix) -> Result<[f64; 3]> {
    Ok([rho.expectation(&sigma_x())?.re, rho.expectation(&sigma_y())?.re, rho.expectation(&sigma_z())?.re])
}

/// `(⟨σ_x⟩, ⟨σ_y⟩, ⟨σ_z⟩)` of a qubit pure state.
pub fn bloch_vector_pure(psi: &StateVector) -> Result<[f64; 3]> {
    check_dim(2, psi.dim())?;
    let a = psi.amplitudes();
    let coh = a[0].conj() * a[1];
    Ok([2.0 * coh.re, 2.0 * coh.im, a[0].norm_sqr() - a[1].norm_sqr()])
}

/// Stroboscopic phase-space samples `(⟨x⟩, ⟨p⟩)` at `phase_offset + n·period`.
#[derive(Clone, Debug, PartialEq)]
pub struct PoincareSection {
    pub points: Vec<(f64, f64)>,
    pub sample_times: Vec<f64>,
}

impl PoincareSection {
    pub fn radii(&self) -> Vec<f64> {
        self.points.iter().map(|(x, p)| x.hypot(*p)).collect()
    }
}

/// Samples `(⟨x⟩, ⟨p⟩)` once per drive period. The snapshot spacing must
/// divide the period into a whole number (at least
/// [`MIN_SAMPLES_PER_PERIOD`]) of intervals, and the record must cover two
/// periods.
pub fn poincare_sample(
    rec: &TrajectoryRecord,
    period: &DrivePeriod,
    x_op: &OperatorMatrix,
    p_op: &OperatorMatrix,
) -> Result<PoincareSection> {
    if rec.times.len() < 2 {
        return Err(Error::NonCommensurateGrid("record has fewer than two snapshots".into()));
    }
    check_dim(x_op.dim(), rec.states[0].dim())?;
    check_dim(p_op.dim(), rec.states[0].dim())?;
    let spacing = rec.times[1] - rec.times[0];
    let p = period.period();
    let hint = p / MIN_SAMPLES_PER_PERIOD as f64;
    let per_period = p / spacing;
    if per_period < MIN_SAMPLES_PER_PERIOD as f64 - 1e-9 || (per_period - per_period.round()).abs() > 1e-9 * per_period
    {
        return Err(Error::NonCommensurateGrid(format!(
            "period {p} spans {per_period} snapshot intervals of {spacing}; \
             need a whole number >= {MIN_SAMPLES_PER_PERIOD}, e.g. dt·record_every = {hint}"
        )));
    }
    let offset_steps = period.phase_offset() / spacing;
    if (offset_steps - offset_steps.round()).abs() > 1e-9 * offset_steps.max(1.0) {
        return Err(Error::NonCommensurateGrid(format!(
            "phase offset {} is not on the snapshot grid of spacing {spacing}",
            period.phase_offset()
        )));
    }
    let last = *rec.times.last().expect("checked length");
    if last < 2.0 * p * (1.0 - 1e-12) {
        return Err(Error::InvalidParameter {
            name: "record",
            reason: format!("duration {last} is shorter than two periods ({})", 2.0 * p),
        });
    }

    let per_period = per_period.round() as usize;
    let offset = offset_steps.round() as usize;
    let mut section = PoincareSection { points: Vec::new(), sample_times: Vec::new() };
    for idx in (offset..rec.times.len()).step_by(per_period) {
        let n = section.sample_times.len() as f64;
        let target = period.phase_offset() + n * p;
        if (rec.times[idx] - target).abs() > 1e-9 * p.max(target) {
            break;
        }
        let psi = rec.states[idx].amplitudes().view();
        let x = expectation_raw(x_op.entries().view(), psi).re;
        let q = expectation_raw(p_op.entries().view(), psi).re;
        section.points.push((x, q));
        section.sample_times.push(target);
    }
    Ok(section)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::master::exact_evolve;
    use crate::model::qubit_decay_model;
    use crate::model::{coherent_state, driven_duffing_model, duffing_drive_period, quadratures};
    use crate::statespace::{matrix_exp, projector, trace_distance, ZERO};
    use crate::unravel::{run_ensemble, run_trajectory, Method, TrajectoryConfig};

    fn constant_record(psi: StateVector, times: Vec<f64>) -> TrajectoryRecord {
        TrajectoryRecord { states: vec![psi; times.len()], times, jump_times: vec![], seed: 0 }
    }

    #[test]
    fn expectation_series_examples() {
        let e = StateVector::basis(2, 0).unwrap();
        let rec = constant_record(e, vec![0.0, 0.5, 1.0]);
        let id = expectation_series(&rec, &OperatorMatrix::identity(2)).unwrap();
        assert!(id.iter().all(|(_, v)| *v == C64::from(1.0)));
        let z = expectation_series(&rec, &sigma_z()).unwrap();
        assert_eq!(z.iter().map(|(t, _)| *t).collect::<Vec<_>>(), vec![0.0, 0.5, 1.0]);
        assert!(z.iter().all(|(_, v)| *v == C64::from(1.0)));
        assert!(expectation_series(&rec, &OperatorMatrix::identity(3)).is_err());
    }

    #[test]
    fn mean_projector_examples() {
        let e = StateVector::basis(2, 0).unwrap();
        let g = StateVector::basis(2, 1).unwrap();
        let single = ensemble_mean_projector(&[constant_record(e.clone(), vec![0.0, 1.0])], 1).unwrap();
        assert_eq!(single, projector(&e));

        let pair = [constant_record(e, vec![0.0, 1.0]), constant_record(g, vec![0.0, 1.0])];
        let mixed = ensemble_mean_projector(&pair, 0).unwrap();
        assert_eq!(mixed.entries()[[0, 0]], C64::from(0.5));
        assert_eq!(mixed.entries()[[1, 1]], C64::from(0.5));
        assert_eq!(mixed.entries()[[0, 1]], ZERO);

        assert!(ensemble_mean_projector(&[], 0).is_err());
        assert!(ensemble_mean_projector(&pair, 2).is_err());
    }

    #[test]
    fn mean_projector_is_positive() {
        let m = qubit_decay_model(1.0, 2.0, 0.0).unwrap();
        let cfg = TrajectoryConfig::new(0.01, 1.0, 10, 0, Method::Qsd).unwrap();
        let recs = run_ensemble(&m, &StateVector::basis(2, 0).unwrap(), &cfg, 50, 3).unwrap();
        for k in 0..recs[0].times.len() {
            let rho = ensemble_mean_projector(&recs, k).unwrap();
            assert!(rho.min_eigenvalue() >= -1e-12);
        }
    }

    #[test]
    fn qsd_sigma_z_decay() {
        let m = qubit_decay_model(1.0, 0.0, 0.0).unwrap();
        let e = StateVector::basis(2, 0).unwrap();
        let cfg = TrajectoryConfig::new(1e-3, 1.0, 1000, 0, Method::Qsd).unwrap();
        let recs = run_ensemble(&m, &e, &cfg, 1000, 17).unwrap();
        let mean_z = recs.iter().map(|r| expectation_series(r, &sigma_z()).unwrap().last().unwrap().1.re).sum::<f64>()
            / recs.len() as f64;
        let expected = 2.0 * (-1.0f64).exp() - 1.0;
        assert!((mean_z - expected).abs() <= 0.04, "{mean_z} vs {expected}");
        let rho = ensemble_mean_projector(&recs, 1).unwrap();
        let exact = exact_evolve(&m, &projector(&e), 1.0).unwrap();
        assert!(trace_distance(&rho, &exact).unwrap() <= 0.03);
    }

    #[test]
    fn poincare_constant_state() {
        let psi = coherent_state(10, C64::new(1.0, 0.5)).unwrap();
        let times: Vec<f64> = (0..=100).map(|k| k as f64 * 0.1).collect();
        let rec = constant_record(psi, times);
        let (x, p) = quadratures(10);
        let period = DrivePeriod::new(2.0, 0.0).unwrap();
        let s = poincare_sample(&rec, &period, &x, &p).unwrap();
        assert_eq!(s.points.len(), 6);
        assert!(s.points.windows(2).all(|w| w[0] == w[1]));
        for (k, t) in s.sample_times.iter().enumerate() {
            assert!((t - 2.0 * k as f64).abs() < 1e-12);
        }
    }

    #[test]
    fn poincare_rejects_bad_grids() {
        let psi = StateVector::basis(4, 0).unwrap();
        let (x, p) = quadratures(4);
        let rec = constant_record(psi.clone(), (0..=100).map(|k| k as f64 * 0.1).collect());
        // 15 snapshots per period
        let coarse = DrivePeriod::new(1.5, 0.0).unwrap();
        assert!(matches!(poincare_sample(&rec, &coarse, &x, &p), Err(Error::NonCommensurateGrid(_))));
        // non-integer
        let odd = DrivePeriod::new(2.05, 0.0).unwrap();
        let err = poincare_sample(&rec, &odd, &x, &p).unwrap_err();
        assert!(err.to_string().contains("dt·record_every"), "{err}");
        // too short
        let long = DrivePeriod::new(6.0, 0.0).unwrap();
        assert!(poincare_sample(&rec, &long, &x, &p).is_err());
    }

    #[test]
    fn poincare_of_periodic_evolution_is_fixed() {
        // closed oscillator: exp(−iHT) = I up to a phase for T = 2π/δ
        let m = driven_duffing_model(12, 0.0, 0.0, 0.0, 1.0).unwrap();
        let period = duffing_drive_period(1.0, 0.0).unwrap();
        let spacing = period.period() / 40.0;
        let step = matrix_exp(&m.hamiltonian().scaled(C64::new(0.0, -spacing))).unwrap();
        let mut psi = coherent_state(12, C64::new(1.0, -0.3)).unwrap();
        let mut rec = constant_record(psi.clone(), vec![0.0]);
        for k in 1..=160 {
            psi = StateVector::new(step.apply(&psi).unwrap()).unwrap();
            rec.times.push(k as f64 * spacing);
            rec.states.push(psi.clone());
        }
        let (x, p) = quadratures(12);
        let s = poincare_sample(&rec, &period, &x, &p).unwrap();
        assert_eq!(s.points.len(), 5);
        for pt in &s.points[1..] {
            assert!((pt.0 - s.points[0].0).abs() < 1e-9 && (pt.1 - s.points[0].1).abs() < 1e-9);
        }
    }

    #[test]
    fn damped_oscillator_spirals_in() {
        let kappa = 0.125;
        let m = driven_duffing_model(30, kappa, 0.0, 0.0, 1.0).unwrap();
        let period = duffing_drive_period(1.0, 0.0).unwrap();
        let alpha0 = C64::new(2.0, 0.0);
        let psi0 = coherent_state(30, alpha0).unwrap();
        let dt = period.period() / 400.0;
        let cfg = TrajectoryConfig::new(dt, 8.0 * period.period(), 20, 5, Method::Qsd)
            .unwrap()
            .with_hamiltonian_step(crate::unravel::HamiltonianStep::Exact);
        let rec = run_trajectory(&m, &psi0, &cfg).unwrap();
        let (x, p) = quadratures(30);
        let s = poincare_sample(&rec, &period, &x, &p).unwrap();
        let radii = s.radii();
        assert_eq!(radii.len(), 9);
        assert!(radii.windows(2).all(|w| w[1] < w[0]));
        // ⟨a⟩_t = α₀ e^{−κt/2 − iδt}, so r_n = √2 |α₀| e^{−κ n T / 2}
        for (n, r) in radii.iter().enumerate() {
            let expected = 2f64.sqrt() * alpha0.norm() * (-kappa * n as f64 * period.period() / 2.0).exp();
            assert!((r - expected).abs() < 5e-3 * expected, "{n}: {r} vs {expected}");
        }
    }

    #[test]
    fn bloch_vectors_agree() {
        let psi = StateVector::from_slice(&[C64::new(0.6, 0.0), C64::new(0.0, 0.8)]).unwrap();
        let a = bloch_vector_pure(&psi).unwrap();
        let b = bloch_vector(&projector(&psi)).unwrap();
        for k in 0..3 {
            assert!((a[k] - b[k]).abs() < 1e-15);
        }
        assert!((a[2] - (0.36 - 0.64)).abs() < 1e-15);
    }
}
