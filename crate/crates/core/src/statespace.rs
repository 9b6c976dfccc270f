//! Dense complex linear algebra for pure states, operators and density
//! matrices.
//!
//! Everything here is stored densely. Dimensions of interest are small
//! (qubits, truncated oscillators of a few dozen levels), and at that size the
//! plain `ndarray` kernels are both fast and exactly reproducible.

use ndarray::{Array1, Array2, ArrayView1, ArrayView2, Zip};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);
pub(crate) const ONE: C64 = C64::new(1.0, 0.0);

/// Normalization tolerance for state vectors.
pub const NORM_TOL: f64 = 1e-10;
/// Hermiticity and trace tolerance for density matrices.
pub const DENSITY_TOL: f64 = 1e-10;
/// Smallest eigenvalue a density matrix may have.
pub const POSITIVITY_TOL: f64 = -1e-8;

/// A normalized pure state `|ψ⟩`.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    amps: Array1<C64>,
}

impl StateVector {
    /// Builds a state from raw amplitudes, normalizing them.
    pub fn new(amps: Array1<C64>) -> Result<Self> {
        if amps.is_empty() {
            return Err(Error::InvalidState("state must have dimension >= 1".into()));
        }
        if amps.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite("state amplitudes"));
        }
        let norm = amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::InvalidState("zero vector cannot be normalized".into()));
        }
        Ok(Self { amps: amps.mapv(|z| z / norm) })
    }

    pub fn from_slice(amps: &[C64]) -> Result<Self> {
        Self::new(Array1::from(amps.to_vec()))
    }

    /// The computational basis state `|index⟩`.
    pub fn basis(dim: usize, index: usize) -> Result<Self> {
        if index >= dim {
            return Err(Error::InvalidState(format!("basis index {index} out of range for dimension {dim}")));
        }
        let mut amps = Array1::zeros(dim);
        amps[index] = ONE;
        Ok(Self { amps })
    }

    /// Wraps amplitudes that the caller has just normalized.
    pub(crate) fn from_normalized(amps: Array1<C64>) -> Self {
        debug_assert!((norm(amps.view()) - 1.0).abs() < 1e-8);
        Self { amps }
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &Array1<C64> {
        &self.amps
    }

    pub fn into_amplitudes(self) -> Array1<C64> {
        self.amps
    }

    pub fn norm(&self) -> f64 {
        norm(self.amps.view())
    }

    /// `⟨self|other⟩`
    pub fn inner(&self, other: &StateVector) -> Result<C64> {
        check_dim(self.dim(), other.dim())?;
        Ok(inner(self.amps.view(), other.amps.view()))
    }
}

/// A square complex matrix: a Hamiltonian, a Lindblad operator or an
/// observable.
#[derive(Clone, Debug, PartialEq)]
pub struct OperatorMatrix {
    entries: Array2<C64>,
}

impl OperatorMatrix {
    pub fn new(entries: Array2<C64>) -> Result<Self> {
        let (rows, cols) = entries.dim();
        if rows != cols {
            return Err(Error::NotSquare { rows, cols });
        }
        if rows == 0 {
            return Err(Error::InvalidParameter { name: "dim", reason: "operators must have dimension >= 1".into() });
        }
        Ok(Self { entries })
    }

    /// Builds an operator from row-major nested rows.
    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self> {
        let n = rows.len();
        let mut entries = Array2::zeros((n, n));
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::NotSquare { rows: n, cols: row.len() });
            }
            for (j, &z) in row.iter().enumerate() {
                entries[[i, j]] = z;
            }
        }
        Self::new(entries)
    }

    pub fn identity(dim: usize) -> Self {
        Self { entries: Array2::eye(dim) }
    }

    pub fn zeros(dim: usize) -> Self {
        Self { entries: Array2::zeros((dim, dim)) }
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &Array2<C64> {
        &self.entries
    }

    pub fn into_entries(self) -> Array2<C64> {
        self.entries
    }

    pub fn dagger(&self) -> Self {
        Self { entries: dagger(&self.entries) }
    }

    pub fn is_finite(&self) -> bool {
        self.entries.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// Largest elementwise deviation from `A = A†`.
    pub fn hermiticity_error(&self) -> f64 {
        hermiticity_error(self.entries.view())
    }

    pub fn matmul(&self, other: &OperatorMatrix) -> Result<OperatorMatrix> {
        check_dim(self.dim(), other.dim())?;
        Ok(Self { entries: self.entries.dot(&other.entries) })
    }

    pub fn apply(&self, psi: &StateVector) -> Result<Array1<C64>> {
        check_dim(self.dim(), psi.dim())?;
        Ok(self.entries.dot(psi.amplitudes()))
    }

    pub fn scaled(&self, factor: C64) -> Self {
        Self { entries: self.entries.mapv(|z| z * factor) }
    }

    /// Largest singular value.
    pub fn spectral_norm(&self) -> f64 {
        let gram = dagger(&self.entries).dot(&self.entries);
        hermitian_eigenvalues(gram.view()).into_iter().fold(0.0_f64, f64::max).sqrt()
    }

    /// Largest elementwise distance to `other`.
    pub fn max_abs_diff(&self, other: &OperatorMatrix) -> f64 {
        max_abs_diff(self.entries.view(), other.entries.view())
    }
}

/// A Hermitian, unit-trace, positive-semidefinite matrix `ρ`.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    entries: Array2<C64>,
}

impl DensityMatrix {
    /// Validates Hermiticity, unit trace and positivity.
    pub fn new(entries: Array2<C64>) -> Result<Self> {
        let (rows, cols) = entries.dim();
        if rows != cols {
            return Err(Error::NotSquare { rows, cols });
        }
        if rows == 0 {
            return Err(Error::InvalidDensityMatrix("dimension must be >= 1".into()));
        }
        if entries.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite("density matrix"));
        }
        let herm = hermiticity_error(entries.view());
        if herm > DENSITY_TOL {
            return Err(Error::InvalidDensityMatrix(format!("not Hermitian (deviation {herm:e})")));
        }
        let tr = trace(entries.view());
        if (tr - ONE).norm() > DENSITY_TOL {
            return Err(Error::InvalidDensityMatrix(format!("trace is {tr}, expected 1")));
        }
        let min_eig = min_eigenvalue(entries.view());
        if min_eig < POSITIVITY_TOL {
            return Err(Error::InvalidDensityMatrix(format!("minimum eigenvalue {min_eig:e} is negative")));
        }
        Ok(Self { entries })
    }

    /// Replaces `m` by `(m + m†)/2`, rescales to unit trace, then validates.
    pub fn from_hermitian_part(m: Array2<C64>) -> Result<Self> {
        Self::new(normalize_hermitian(m)?)
    }

    /// Skips the eigenvalue check; for matrices that are positive by
    /// construction (projectors, convex mixtures of projectors).
    pub(crate) fn from_positive(entries: Array2<C64>) -> Self {
        Self { entries }
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &Array2<C64> {
        &self.entries
    }

    pub fn into_entries(self) -> Array2<C64> {
        self.entries
    }

    pub fn trace(&self) -> C64 {
        trace(self.entries.view())
    }

    pub fn purity(&self) -> f64 {
        // tr(ρ²) = Σ |ρ_ij|² for Hermitian ρ
        self.entries.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        min_eigenvalue(self.entries.view())
    }

    /// `tr(A ρ)`
    pub fn expectation(&self, op: &OperatorMatrix) -> Result<C64> {
        check_dim(self.dim(), op.dim())?;
        let n = self.dim();
        let mut acc = ZERO;
        for i in 0..n {
            for j in 0..n {
                acc += op.entries[[i, j]] * self.entries[[j, i]];
            }
        }
        Ok(acc)
    }
}

/// `⟨ψ|A|ψ⟩`
pub fn expectation(op: &OperatorMatrix, psi: &StateVector) -> Result<C64> {
    check_dim(op.dim(), psi.dim())?;
    Ok(expectation_raw(op.entries.view(), psi.amps.view()))
}

/// `|ψ⟩⟨ψ|`
pub fn projector(psi: &StateVector) -> DensityMatrix {
    DensityMatrix::from_positive(outer(psi.amps.view()))
}

/// `½ Σ |λ_i(a − b)|`
pub fn trace_distance(a: &DensityMatrix, b: &DensityMatrix) -> Result<f64> {
    check_dim(a.dim(), b.dim())?;
    let diff = &a.entries - &b.entries;
    let sum: f64 = hermitian_eigenvalues(diff.view()).iter().map(|l| l.abs()).sum();
    Ok((0.5 * sum).clamp(0.0, 1.0))
}

/// Trace distance between the projectors of two pure states, computed as the
/// norm of the component of `phi` orthogonal to `psi`. This avoids the
/// cancellation in `sqrt(1 - |⟨ψ|φ⟩|²)` when the states nearly coincide.
pub fn pure_trace_distance(psi: &StateVector, phi: &StateVector) -> Result<f64> {
    check_dim(psi.dim(), phi.dim())?;
    let overlap = inner(psi.amps.view(), phi.amps.view());
    let residual = Zip::from(&phi.amps).and(&psi.amps).fold(0.0, |acc, &f, &p| acc + (f - overlap * p).norm_sqr());
    Ok(residual.sqrt().min(1.0))
}

/// Matrix exponential by scaling and squaring of a truncated Taylor series.
pub fn matrix_exp(a: &OperatorMatrix) -> Result<OperatorMatrix> {
    if !a.is_finite() {
        return Err(Error::NonFinite("matrix_exp argument"));
    }
    Ok(OperatorMatrix { entries: expm(a.entries.view()) })
}

pub(crate) fn expm(a: ArrayView2<C64>) -> Array2<C64> {
    let n = a.nrows();
    let norm1 = (0..n).map(|j| a.column(j).iter().map(|z| z.norm()).sum::<f64>()).fold(0.0_f64, f64::max);
    let squarings = if norm1 > 0.5 { (norm1 / 0.5).log2().ceil() as u32 } else { 0 };
    let scaled = a.mapv(|z| z / 2f64.powi(squarings as i32));

    let mut result = Array2::<C64>::eye(n);
    let mut term = Array2::<C64>::eye(n);
    for k in 1..=40 {
        term = term.dot(&scaled).mapv(|z| z / k as f64);
        result += &term;
        let term_norm = term.iter().map(|z| z.norm()).fold(0.0, f64::max);
        if term_norm <= 1e-20 {
            break;
        }
    }
    for _ in 0..squarings {
        result = result.dot(&result);
    }
    result
}

/// Eigenvalues of a Hermitian matrix by cyclic complex Jacobi rotations,
/// in ascending order. Only the Hermitian part of `a` is used.
pub fn hermitian_eigenvalues(a: ArrayView2<C64>) -> Vec<f64> {
    let n = a.nrows();
    assert_eq!(n, a.ncols(), "eigenvalues need a square matrix");
    let mut m = Array2::from_shape_fn((n, n), |(i, j)| 0.5 * (a[[i, j]] + a[[j, i]].conj()));
    let scale = m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if scale == 0.0 {
        return vec![0.0; n];
    }

    for _sweep in 0..64 {
        let mut off = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                off += m[[p, q]].norm_sqr();
            }
        }
        if off.sqrt() <= 1e-15 * scale {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[[p, q]];
                let mag = apq.norm();
                if mag <= f64::MIN_POSITIVE {
                    continue;
                }
                let phase = apq / mag;
                let tau = (m[[q, q]].re - m[[p, p]].re) / (2.0 * mag);
                let t = tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                // A ← U† A U with U = diag(1, e^{-iφ}) · G(c, s) on the (p, q) plane
                let cs = phase.conj() * s;
                let cc = phase.conj() * c;
                for k in 0..n {
                    let kp = m[[k, p]];
                    let kq = m[[k, q]];
                    m[[k, p]] = kp * c - kq * cs;
                    m[[k, q]] = kp * s + kq * cc;
                }
                let rs = phase * s;
                let rc = phase * c;
                for k in 0..n {
                    let pk = m[[p, k]];
                    let qk = m[[q, k]];
                    m[[p, k]] = pk * c - qk * rs;
                    m[[q, k]] = pk * s + qk * rc;
                }
                m[[p, q]] = ZERO;
                m[[q, p]] = ZERO;
            }
        }
    }
    let mut eig: Vec<f64> = (0..n).map(|i| m[[i, i]].re).collect();
    eig.sort_by(f64::total_cmp);
    eig
}

pub(crate) fn min_eigenvalue(a: ArrayView2<C64>) -> f64 {
    hermitian_eigenvalues(a).first().copied().unwrap_or(0.0)
}

/// Solves `a x = b` by Gaussian elimination with partial pivoting.
pub fn solve_linear(a: &Array2<C64>, b: &Array1<C64>) -> Result<Array1<C64>> {
    let n = a.nrows();
    if a.ncols() != n {
        return Err(Error::NotSquare { rows: n, cols: a.ncols() });
    }
    check_dim(n, b.len())?;
    let mut m = a.clone();
    let mut x = b.clone();
    let scale = m.iter().map(|z| z.norm()).fold(0.0, f64::max);
    for col in 0..n {
        let pivot =
            (col..n).max_by(|&i, &j| m[[i, col]].norm().total_cmp(&m[[j, col]].norm())).expect("non-empty pivot range");
        if m[[pivot, col]].norm() <= 1e-14 * scale {
            return Err(Error::Singular);
        }
        if pivot != col {
            for k in 0..n {
                m.swap([pivot, k], [col, k]);
            }
            x.swap(pivot, col);
        }
        let diag = m[[col, col]];
        for row in (col + 1)..n {
            let factor = m[[row, col]] / diag;
            if factor == ZERO {
                continue;
            }
            for k in col..n {
                let v = m[[col, k]];
                m[[row, k]] -= factor * v;
            }
            let v = x[col];
            x[row] -= factor * v;
        }
    }
    for row in (0..n).rev() {
        let mut acc = x[row];
        for k in (row + 1)..n {
            acc -= m[[row, k]] * x[k];
        }
        x[row] = acc / m[[row, row]];
    }
    Ok(x)
}

pub fn sigma_x() -> OperatorMatrix {
    op2([[ZERO, ONE], [ONE, ZERO]])
}

pub fn sigma_y() -> OperatorMatrix {
    let i = C64::i();
    op2([[ZERO, -i], [i, ZERO]])
}

/// `diag(+1, −1)` in the (excited, ground) ordering.
pub fn sigma_z() -> OperatorMatrix {
    op2([[ONE, ZERO], [ZERO, -ONE]])
}

/// Lowering operator `|g⟩⟨e|`, with `|e⟩ = (1, 0)` and `|g⟩ = (0, 1)`.
pub fn sigma_minus() -> OperatorMatrix {
    op2([[ZERO, ZERO], [ONE, ZERO]])
}

fn op2(rows: [[C64; 2]; 2]) -> OperatorMatrix {
    OperatorMatrix { entries: Array2::from_shape_fn((2, 2), |(i, j)| rows[i][j]) }
}

pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}

pub(crate) fn dagger(a: &Array2<C64>) -> Array2<C64> {
    a.t().mapv(|z| z.conj())
}

pub(crate) fn trace(a: ArrayView2<C64>) -> C64 {
    a.diag().iter().copied().sum()
}

pub(crate) fn norm(v: ArrayView1<C64>) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// `⟨a|b⟩`
pub(crate) fn inner(a: ArrayView1<C64>, b: ArrayView1<C64>) -> C64 {
    Zip::from(&a).and(&b).fold(ZERO, |acc, &x, &y| acc + x.conj() * y)
}

pub(crate) fn expectation_raw(op: ArrayView2<C64>, psi: ArrayView1<C64>) -> C64 {
    inner(psi, op.dot(&psi).view())
}

pub(crate) fn outer(psi: ArrayView1<C64>) -> Array2<C64> {
    let n = psi.len();
    Array2::from_shape_fn((n, n), |(i, j)| psi[i] * psi[j].conj())
}

pub(crate) fn hermiticity_error(a: ArrayView2<C64>) -> f64 {
    let n = a.nrows();
    let mut worst = 0.0_f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((a[[i, j]] - a[[j, i]].conj()).norm());
        }
    }
    worst
}

pub(crate) fn max_abs_diff(a: ArrayView2<C64>, b: ArrayView2<C64>) -> f64 {
    Zip::from(&a).and(&b).fold(0.0_f64, |acc, &x, &y| acc.max((x - y).norm()))
}

/// `(m + m†)/2` rescaled to unit trace.
pub(crate) fn normalize_hermitian(m: Array2<C64>) -> Result<Array2<C64>> {
    let n = m.nrows();
    let mut h = Array2::from_shape_fn((n, n), |(i, j)| 0.5 * (m[[i, j]] + m[[j, i]].conj()));
    let tr = trace(h.view()).re;
    if !tr.is_finite() || tr <= 0.0 {
        return Err(Error::InvalidDensityMatrix(format!("trace {tr} cannot be normalized")));
    }
    h.mapv_inplace(|z| z / tr);
    Ok(h)
}
