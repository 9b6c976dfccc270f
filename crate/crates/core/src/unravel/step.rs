use ndarray::linalg::general_mat_vec_mul;
use ndarray::{Array1, Array2, Zip};

use crate::model::LindbladModel;
use crate::statespace::{expm, inner, C64, ONE, ZERO};

/// Largest total jump probability allowed in one step.
pub const MAX_JUMP_PROBABILITY: f64 = 0.1;

/// How the Hamiltonian part of each step is integrated.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum HamiltonianStep {
    /// `−iH` is part of the Euler–Maruyama drift.
    #[default]
    Euler,
    /// `|ψ⟩ ← exp(−iH dt)|ψ⟩` first, then the Euler–Maruyama step of the
    /// dissipative and stochastic terms. Needed when `‖H‖ dt` is not small,
    /// e.g. for truncated oscillators with large top-level energies.
    Exact,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum StepError {
    BlowUp,
    TooLarge(f64),
}

/// Preallocated single-trajectory integrator. Its dynamical memory is the
/// state plus `K + 2` vectors of the same length; the operators are shared,
/// read-only data.
pub(crate) struct Propagator {
    drift: Array2<C64>,
    unitary: Option<Array2<C64>>,
    ops: Vec<Array2<C64>>,
    l_psi: Vec<Array1<C64>>,
    expect: Vec<C64>,
    work: Array1<C64>,
}

impl Propagator {
    pub(crate) fn new(m: &LindbladModel, hamiltonian_step: HamiltonianStep, dt: f64) -> Self {
        let n = m.dim();
        let (drift, unitary) = match hamiltonian_step {
            HamiltonianStep::Euler => (m.effective_generator(), None),
            HamiltonianStep::Exact => {
                let u = expm(m.hamiltonian().entries().mapv(|z| z * C64::new(0.0, -dt)).view());
                (m.decay_operator().mapv(|z| z * -0.5), Some(u))
            }
        };
        let ops: Vec<_> = m.lindblad_ops().iter().map(|l| l.entries().clone()).collect();
        Self {
            drift,
            unitary,
            l_psi: vec![Array1::zeros(n); ops.len()],
            expect: vec![ZERO; ops.len()],
            ops,
            work: Array1::zeros(n),
        }
    }

    /// Number of complex scalars of per-step scratch, excluding the state.
    pub(crate) fn scratch_len(&self) -> usize {
        self.l_psi.iter().map(|v| v.len()).sum::<usize>() + self.work.len()
    }

    fn apply_unitary(&mut self, psi: &mut Array1<C64>) {
        if let Some(u) = &self.unitary {
            general_mat_vec_mul(ONE, u, &*psi, ZERO, &mut self.work);
            std::mem::swap(psi, &mut self.work);
        }
    }

    /// `L_k|ψ⟩` and `⟨L_k⟩` for every channel.
    fn apply_ops(&mut self, psi: &Array1<C64>) {
        for ((l, out), ev) in self.ops.iter().zip(&mut self.l_psi).zip(&mut self.expect) {
            general_mat_vec_mul(ONE, l, psi, ZERO, out);
            *ev = inner(psi.view(), out.view());
        }
    }

    /// `work ← ψ + dt · drift ψ`
    fn drift_step(&mut self, psi: &Array1<C64>, dt: f64) {
        self.work.assign(psi);
        general_mat_vec_mul(C64::from(dt), &self.drift, psi, ONE, &mut self.work);
    }

    fn finish(&mut self, psi: &mut Array1<C64>) -> Result<(), StepError> {
        let norm = self.work.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if !norm.is_finite() || norm == 0.0 {
            return Err(StepError::BlowUp);
        }
        let inv = 1.0 / norm;
        Zip::from(&mut *psi).and(&self.work).for_each(|p, &w| *p = w * inv);
        Ok(())
    }

    /// Itô Euler–Maruyama step of
    ///
    /// ```text
    /// |dψ⟩ = [−iH + Σ_k (⟨L_k†⟩L_k − ½L_k†L_k − ½⟨L_k†⟩⟨L_k⟩)]|ψ⟩dt
    ///        + Σ_k (L_k − ⟨L_k⟩)|ψ⟩ dξ_k
    /// ```
    ///
    /// followed by renormalization.
    pub(crate) fn qsd(&mut self, psi: &mut Array1<C64>, dxi: &[C64], dt: f64) -> Result<(), StepError> {
        self.apply_unitary(psi);
        self.apply_ops(psi);
        self.drift_step(psi, dt);
        for ((l_psi, &ev), &dx) in self.l_psi.iter().zip(&self.expect).zip(dxi) {
            let l_coef = ev.conj() * dt + dx;
            let psi_coef = -(0.5 * ev.norm_sqr() * dt) - ev * dx;
            Zip::from(&mut self.work).and(l_psi).and(&*psi).for_each(|w, &l, &p| *w += l * l_coef + p * psi_coef);
        }
        self.finish(psi)
    }

    /// Itô Euler–Maruyama step of the homodyne equation, `x_k = L_k + L_k†`:
    ///
    /// ```text
    /// |dψ⟩ = [−iH + Σ_k (½⟨x_k⟩L_k − ½L_k†L_k − ⅛⟨x_k⟩²)]|ψ⟩dt
    ///        + Σ_k (L_k − ½⟨x_k⟩)|ψ⟩ dW_k
    /// ```
    ///
    /// followed by renormalization.
    pub(crate) fn homodyne(&mut self, psi: &mut Array1<C64>, dw: &[f64], dt: f64) -> Result<(), StepError> {
        self.apply_unitary(psi);
        self.apply_ops(psi);
        self.drift_step(psi, dt);
        for ((l_psi, &ev), &dw) in self.l_psi.iter().zip(&self.expect).zip(dw) {
            let x = 2.0 * ev.re;
            let l_coef = C64::from(0.5 * x * dt + dw);
            let psi_coef = C64::from(-0.125 * x * x * dt - 0.5 * x * dw);
            Zip::from(&mut self.work).and(l_psi).and(&*psi).for_each(|w, &l, &p| *w += l * l_coef + p * psi_coef);
        }
        self.finish(psi)
    }

    /// First-order quantum-jump step: channel `k` fires with probability
    /// `‖L_k ψ‖² dt`, selected by the uniform variate `u`; otherwise the
    /// state follows the normalized no-jump evolution.
    pub(crate) fn jump(&mut self, psi: &mut Array1<C64>, u: f64, dt: f64) -> Result<Option<usize>, StepError> {
        self.apply_ops(psi);
        let probs: Vec<f64> = self.l_psi.iter().map(|v| v.iter().map(|z| z.norm_sqr()).sum::<f64>() * dt).collect();
        let total: f64 = probs.iter().sum();
        if total > MAX_JUMP_PROBABILITY {
            return Err(StepError::TooLarge(total));
        }
        if u < total {
            let mut acc = 0.0;
            for (k, &p) in probs.iter().enumerate() {
                acc += p;
                if u < acc {
                    assert!(p > 0.0, "selected a jump channel with zero probability");
                    self.work.assign(&self.l_psi[k]);
                    self.finish(psi)?;
                    return Ok(Some(k));
                }
            }
            // rounding in the cumulative sum: fall through to the last
            // channel with nonzero probability
            let k = probs.iter().rposition(|&p| p > 0.0).expect("total > 0");
            self.work.assign(&self.l_psi[k]);
            self.finish(psi)?;
            return Ok(Some(k));
        }
        self.apply_unitary(psi);
        self.drift_step(psi, dt);
        self.finish(psi)?;
        Ok(None)
    }
}
