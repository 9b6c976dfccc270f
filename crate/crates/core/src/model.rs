//! Lindblad models, re-expressions of the same generator, and builders for
//! the benchmark systems.

use std::f64::consts::{PI, SQRT_2};

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::statespace::{check_dim, dagger, sigma_minus, sigma_x, sigma_z, OperatorMatrix, C64, ONE, ZERO};

/// Tolerance on `H = H†` and on `u u† = I`.
pub const MODEL_TOL: f64 = 1e-10;

/// A Hamiltonian `H` together with Lindblad operators `L_1 .. L_K`, all of
/// one dimension. `K = 0` is closed unitary evolution.
#[derive(Clone, Debug, PartialEq)]
pub struct LindbladModel {
    hamiltonian: OperatorMatrix,
    lindblad_ops: Vec<OperatorMatrix>,
}

impl LindbladModel {
    pub fn new(hamiltonian: OperatorMatrix, lindblad_ops: Vec<OperatorMatrix>) -> Result<Self> {
        let dim = hamiltonian.dim();
        if !hamiltonian.is_finite() {
            return Err(Error::NonFinite("hamiltonian"));
        }
        // scale-aware so large Hamiltonians survive rounding in transforms
        let scale = hamiltonian.entries().iter().map(|z| z.norm()).fold(1.0, f64::max);
        let deviation = hamiltonian.hermiticity_error();
        if deviation > MODEL_TOL * scale {
            return Err(Error::NotHermitian { deviation });
        }
        for op in &lindblad_ops {
            check_dim(dim, op.dim())?;
            if !op.is_finite() {
                return Err(Error::NonFinite("lindblad operator"));
            }
        }
        Ok(Self { hamiltonian, lindblad_ops })
    }

    pub fn dim(&self) -> usize {
        self.hamiltonian.dim()
    }

    /// Number of Lindblad operators (noise channels).
    pub fn channels(&self) -> usize {
        self.lindblad_ops.len()
    }

    pub fn hamiltonian(&self) -> &OperatorMatrix {
        &self.hamiltonian
    }

    pub fn lindblad_ops(&self) -> &[OperatorMatrix] {
        &self.lindblad_ops
    }

    /// `Σ_k L_k† L_k`
    pub fn decay_operator(&self) -> Array2<C64> {
        let n = self.dim();
        self.lindblad_ops.iter().fold(Array2::zeros((n, n)), |acc, l| acc + dagger(l.entries()).dot(l.entries()))
    }

    /// `−iH − ½ Σ_k L_k† L_k`, the generator of the no-jump evolution
    /// `d|ψ⟩/dt = (−i H_eff)|ψ⟩`.
    pub fn effective_generator(&self) -> Array2<C64> {
        let minus_i = C64::new(0.0, -1.0);
        self.hamiltonian.entries().mapv(|z| z * minus_i) - self.decay_operator().mapv(|z| z * 0.5)
    }

    /// Largest elementwise distance between the two models' operators.
    pub fn max_abs_diff(&self, other: &LindbladModel) -> Option<f64> {
        if self.dim() != other.dim() || self.channels() != other.channels() {
            return None;
        }
        let ops = self.lindblad_ops.iter().zip(&other.lindblad_ops).map(|(a, b)| a.max_abs_diff(b));
        Some(ops.fold(self.hamiltonian.max_abs_diff(&other.hamiltonian), f64::max))
    }
}

/// Re-expresses a master equation: unitary mixing `u` of the Lindblad
/// operators followed by complex shifts `c`, with the compensating
/// Hamiltonian correction. Mixing is applied first, then shifts.
#[derive(Clone, Debug, PartialEq)]
pub struct RepresentationTransform {
    mixing: Array2<C64>,
    shifts: Vec<C64>,
}

impl RepresentationTransform {
    pub fn new(mixing: Array2<C64>, shifts: Vec<C64>) -> Result<Self> {
        let (rows, cols) = mixing.dim();
        if rows != cols {
            return Err(Error::NotSquare { rows, cols });
        }
        check_dim(rows, shifts.len())?;
        if mixing.iter().chain(&shifts).any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite("representation transform"));
        }
        let deviation = unitarity_error(&mixing);
        if deviation > MODEL_TOL {
            return Err(Error::NotUnitary { deviation });
        }
        Ok(Self { mixing, shifts })
    }

    pub fn identity(channels: usize) -> Self {
        Self { mixing: Array2::eye(channels), shifts: vec![ZERO; channels] }
    }

    /// Pure mixing, no shifts.
    pub fn mixing(mixing: Array2<C64>) -> Result<Self> {
        let k = mixing.nrows();
        Self::new(mixing, vec![ZERO; k])
    }

    /// Pure shifts, `u = I`.
    pub fn shifts(shifts: Vec<C64>) -> Result<Self> {
        Self::new(Array2::eye(shifts.len()), shifts)
    }

    /// Single-channel phase rotation `L → e^{iθ} L`.
    pub fn phase(theta: f64) -> Self {
        Self { mixing: Array2::from_elem((1, 1), C64::from_polar(1.0, theta)), shifts: vec![ZERO] }
    }

    pub fn channels(&self) -> usize {
        self.shifts.len()
    }

    pub fn mixing_matrix(&self) -> &Array2<C64> {
        &self.mixing
    }

    pub fn shift_vector(&self) -> &[C64] {
        &self.shifts
    }

    pub fn has_shifts(&self) -> bool {
        self.shifts.iter().any(|c| *c != ZERO)
    }

    /// `self` after `first`: the transform equivalent to applying `first`
    /// and then `self`, valid when neither carries shifts.
    pub fn compose_mixing(&self, first: &RepresentationTransform) -> Result<Self> {
        check_dim(self.channels(), first.channels())?;
        if self.has_shifts() || first.has_shifts() {
            return Err(Error::Unsupported("composition of shifted transforms".into()));
        }
        Self::mixing(self.mixing.dot(&first.mixing))
    }
}

fn unitarity_error(u: &Array2<C64>) -> f64 {
    let k = u.nrows();
    let prod = u.dot(&dagger(u));
    let eye = Array2::<C64>::eye(k);
    prod.iter().zip(eye.iter()).fold(0.0_f64, |acc, (a, b)| acc.max((a - b).norm()))
}

/// Re-expresses `m` through `t`:
///
/// ```text
/// L̃_j = Σ_k u_jk L_k
/// L'_j = L̃_j + c_j
/// H'   = H − (i/2) Σ_j (c_j* L̃_j − c_j L̃_j†)
/// ```
///
/// The result generates the same master equation as `m`.
pub fn apply_transform(m: &LindbladModel, t: &RepresentationTransform) -> Result<LindbladModel> {
    check_dim(m.channels(), t.channels())?;
    let n = m.dim();
    let eye = Array2::<C64>::eye(n);
    let half_i = C64::new(0.0, 0.5);

    let mut hamiltonian = m.hamiltonian.entries().clone();
    let mut ops = Vec::with_capacity(m.channels());
    for (j, &c) in t.shifts.iter().enumerate() {
        let mixed = m
            .lindblad_ops
            .iter()
            .enumerate()
            .fold(Array2::<C64>::zeros((n, n)), |acc, (k, l)| acc + l.entries().mapv(|z| z * t.mixing[[j, k]]));
        if c != ZERO {
            let correction = mixed.mapv(|z| z * c.conj()) - dagger(&mixed).mapv(|z| z * c);
            hamiltonian = hamiltonian - correction.mapv(|z| z * half_i);
        }
        ops.push(OperatorMatrix::new(mixed + eye.mapv(|z| z * c))?);
    }
    // remove rounding-level anti-Hermitian residue
    let hamiltonian = Array2::from_shape_fn((n, n), |(i, j)| 0.5 * (hamiltonian[[i, j]] + hamiltonian[[j, i]].conj()));
    LindbladModel::new(OperatorMatrix::new(hamiltonian)?, ops)
}

/// Stroboscopic sampling period for a time-periodic model.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DrivePeriod {
    period: f64,
    phase_offset: f64,
}

impl DrivePeriod {
    pub fn new(period: f64, phase_offset: f64) -> Result<Self> {
        if !(period.is_finite() && period > 0.0) {
            return Err(Error::InvalidParameter { name: "period", reason: format!("{period} is not positive") });
        }
        if !(0.0..period).contains(&phase_offset) {
            return Err(Error::InvalidParameter {
                name: "phase_offset",
                reason: format!("{phase_offset} is outside [0, {period})"),
            });
        }
        Ok(Self { period, phase_offset })
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn phase_offset(&self) -> f64 {
        self.phase_offset
    }
}

/// Laser-driven two-level atom with spontaneous emission.
///
/// Basis order is (excited, ground). `H = (Δ/2) σ_z + (Ω/2) σ_x`, one
/// Lindblad operator `√γ σ₋`. For `γ = 0` the operator is kept as a zero
/// matrix so the channel count does not depend on the parameters.
pub fn qubit_decay_model(gamma: f64, rabi: f64, detuning: f64) -> Result<LindbladModel> {
    if !(gamma.is_finite() && gamma >= 0.0) {
        return Err(Error::InvalidParameter { name: "gamma", reason: format!("{gamma} is negative or not finite") });
    }
    let h = sigma_z().scaled(C64::from(detuning / 2.0)).entries() + sigma_x().scaled(C64::from(rabi / 2.0)).entries();
    let l = sigma_minus().scaled(C64::from(gamma.sqrt()));
    LindbladModel::new(OperatorMatrix::new(h)?, vec![l])
}

/// Truncated annihilation operator, `a|n⟩ = √n |n−1⟩`.
pub fn annihilation(fock_dim: usize) -> OperatorMatrix {
    let mut a = Array2::zeros((fock_dim, fock_dim));
    for n in 1..fock_dim {
        a[[n - 1, n]] = C64::from((n as f64).sqrt());
    }
    OperatorMatrix::new(a).expect("square")
}

/// `a† a`
pub fn number_operator(fock_dim: usize) -> OperatorMatrix {
    let diag = (0..fock_dim).map(|n| C64::from(n as f64)).collect::<Vec<_>>();
    OperatorMatrix::new(Array2::from_diag(&ndarray::Array1::from(diag))).expect("square")
}

/// Quadratures `x = (a + a†)/√2` and `p = −i(a − a†)/√2`, normalized so that
/// `[x, p] = i` away from the truncation edge.
pub fn quadratures(fock_dim: usize) -> (OperatorMatrix, OperatorMatrix) {
    let a = annihilation(fock_dim);
    let ad = a.dagger();
    let x = (a.entries() + ad.entries()).mapv(|z| z / SQRT_2);
    let p = (a.entries() - ad.entries()).mapv(|z| z * C64::new(0.0, -1.0 / SQRT_2));
    (OperatorMatrix::new(x).expect("square"), OperatorMatrix::new(p).expect("square"))
}

/// Driven damped Kerr (quantum Duffing) oscillator in the frame rotating at
/// the drive frequency:
///
/// ```text
/// H = δ a†a + χ (a†a)² + F (a + a†),   L = √κ a
/// ```
///
/// with `δ` the drive detuning, `χ` the anharmonicity and `F` the drive
/// amplitude.
pub fn driven_duffing_model(
    fock_dim: usize,
    kappa: f64,
    anharmonicity: f64,
    drive_amplitude: f64,
    drive_detuning: f64,
) -> Result<LindbladModel> {
    if fock_dim < 2 {
        return Err(Error::InvalidParameter { name: "fock_dim", reason: format!("{fock_dim} < 2") });
    }
    if !(kappa.is_finite() && kappa >= 0.0) {
        return Err(Error::InvalidParameter { name: "kappa", reason: format!("{kappa} is negative or not finite") });
    }
    let a = annihilation(fock_dim);
    let mut h = Array2::<C64>::zeros((fock_dim, fock_dim));
    for n in 0..fock_dim {
        let nf = n as f64;
        h[[n, n]] = C64::from(drive_detuning * nf + anharmonicity * nf * nf);
    }
    h = h + (a.entries() + a.dagger().entries()).mapv(|z| z * drive_amplitude);
    let l = a.scaled(C64::from(kappa.sqrt()));
    LindbladModel::new(OperatorMatrix::new(h)?, vec![l])
}

/// Stroboscopic period `2π/|δ|` associated with [`driven_duffing_model`].
pub fn duffing_drive_period(drive_detuning: f64, phase_offset: f64) -> Result<DrivePeriod> {
    if drive_detuning == 0.0 || !drive_detuning.is_finite() {
        return Err(Error::InvalidParameter {
            name: "drive_detuning",
            reason: "must be nonzero to define a drive period".into(),
        });
    }
    DrivePeriod::new(2.0 * PI / drive_detuning.abs(), phase_offset)
}

/// Truncated coherent state `e^{-|α|²/2} Σ αⁿ/√n! |n⟩`, renormalized.
pub fn coherent_state(fock_dim: usize, alpha: C64) -> Result<crate::statespace::StateVector> {
    let mut amps = ndarray::Array1::<C64>::zeros(fock_dim);
    let mut term = ONE;
    for n in 0..fock_dim {
        if n > 0 {
            term = term * alpha / (n as f64).sqrt();
        }
        amps[n] = term;
    }
    crate::statespace::StateVector::new(amps)
}
