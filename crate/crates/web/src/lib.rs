//! WebAssembly bindings for the demo page in `www/`. Every operation runs on
//! the driven-qubit model `H = (Δ/2)σz + (Ω/2)σx`, `L = √γ σ₋`, starting in
//! the excited state, and returns a flat `Float64Array` of rows.

use num_complex::Complex64;
use wasm_bindgen::prelude::*;

use qtraj_core::analysis::{bloch_vector, bloch_vector_pure};
use qtraj_core::master::exact_evolve;
use qtraj_core::model::{qubit_decay_model, LindbladModel, RepresentationTransform};
use qtraj_core::statespace::{projector, trace_distance, StateVector};
use qtraj_core::unravel::{compare_pathwise, ensemble_mean, run_trajectory, Method, TrajectoryConfig};

/// Qubit parameters shared by every operation.
#[derive(Clone, Copy, Debug)]
pub struct Qubit {
    pub gamma: f64,
    pub rabi: f64,
    pub detuning: f64,
}

impl Qubit {
    fn model(&self) -> Result<LindbladModel, String> {
        qubit_decay_model(self.gamma, self.rabi, self.detuning).map_err(|e| e.to_string())
    }
}

fn excited() -> StateVector {
    StateVector::basis(2, 0).expect("qubit basis state")
}

fn config(method: &str, dt: f64, t_final: f64, record_every: usize, seed: u64) -> Result<TrajectoryConfig, String> {
    let method: Method = method.parse().map_err(|e: qtraj_core::Error| e.to_string())?;
    TrajectoryConfig::new(dt, t_final, record_every, seed, method).map_err(|e| e.to_string())
}

/// Rows `t, x, y, z` of the Bloch vector along one trajectory.
pub fn bloch_rows(
    q: Qubit,
    method: &str,
    dt: f64,
    t_final: f64,
    record_every: usize,
    seed: u64,
) -> Result<Vec<f64>, String> {
    let cfg = config(method, dt, t_final, record_every, seed)?;
    let rec = run_trajectory(&q.model()?, &excited(), &cfg).map_err(|e| e.to_string())?;
    let mut out = Vec::with_capacity(4 * rec.times.len());
    for (t, psi) in rec.times.iter().zip(&rec.states) {
        out.push(*t);
        out.extend(bloch_vector_pure(psi).map_err(|e| e.to_string())?);
    }
    Ok(out)
}

/// Rows `t, z_ensemble, z_exact, trace_distance` comparing the ensemble-mean
/// projector with the exact master-equation solution.
pub fn ensemble_rows(
    q: Qubit,
    method: &str,
    n_traj: usize,
    dt: f64,
    t_final: f64,
    record_every: usize,
    seed: u64,
) -> Result<Vec<f64>, String> {
    let m = q.model()?;
    let cfg = config(method, dt, t_final, record_every, 0)?;
    let mean = ensemble_mean(&m, &excited(), &cfg, n_traj, seed).map_err(|e| e.to_string())?;
    let rho0 = projector(&excited());
    let mut out = Vec::with_capacity(4 * mean.times.len());
    for (t, rho) in mean.times.iter().zip(&mean.states) {
        let exact = exact_evolve(&m, &rho0, *t).map_err(|e| e.to_string())?;
        out.push(*t);
        out.push(bloch_vector(rho).map_err(|e| e.to_string())?[2]);
        out.push(bloch_vector(&exact).map_err(|e| e.to_string())?[2]);
        out.push(trace_distance(rho, &exact).map_err(|e| e.to_string())?);
    }
    Ok(out)
}

/// Rows `t, distance` between trajectories of the model and of its
/// representation with `L → e^{iθ}L + c`, driven by equivalent noise.
pub fn invariance_rows(
    q: Qubit,
    method: &str,
    theta: f64,
    shift: Complex64,
    dt: f64,
    t_final: f64,
    seed: u64,
) -> Result<Vec<f64>, String> {
    let cfg = config(method, dt, t_final, 1, seed)?;
    let t = RepresentationTransform::phase(theta);
    let t = RepresentationTransform::new(t.mixing_matrix().clone(), vec![shift]).map_err(|e| e.to_string())?;
    let cmp = compare_pathwise(&q.model()?, &t, &excited(), &cfg).map_err(|e| e.to_string())?;
    Ok(cmp.times.iter().zip(&cmp.distances).flat_map(|(t, d)| [*t, *d]).collect())
}

fn js(r: Result<Vec<f64>, String>) -> Result<Vec<f64>, JsError> {
    r.map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
#[allow(clippy::too_many_arguments)]
pub fn trajectory_bloch(
    method: &str,
    gamma: f64,
    rabi: f64,
    detuning: f64,
    dt: f64,
    t_final: f64,
    record_every: usize,
    seed: u64,
) -> Result<Vec<f64>, JsError> {
    js(bloch_rows(Qubit { gamma, rabi, detuning }, method, dt, t_final, record_every, seed))
}

#[wasm_bindgen]
#[allow(clippy::too_many_arguments)]
pub fn ensemble_vs_master(
    method: &str,
    gamma: f64,
    rabi: f64,
    detuning: f64,
    n_traj: usize,
    dt: f64,
    t_final: f64,
    record_every: usize,
    seed: u64,
) -> Result<Vec<f64>, JsError> {
    js(ensemble_rows(Qubit { gamma, rabi, detuning }, method, n_traj, dt, t_final, record_every, seed))
}

#[wasm_bindgen]
#[allow(clippy::too_many_arguments)]
pub fn invariance_distances(
    method: &str,
    gamma: f64,
    rabi: f64,
    theta: f64,
    shift_re: f64,
    shift_im: f64,
    dt: f64,
    t_final: f64,
    seed: u64,
) -> Result<Vec<f64>, JsError> {
    js(invariance_rows(
        Qubit { gamma, rabi, detuning: 0.0 },
        method,
        theta,
        Complex64::new(shift_re, shift_im),
        dt,
        t_final,
        seed,
    ))
}
