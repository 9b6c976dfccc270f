use crate::error::{Error, Result};

/// Fixed-step time grid `t_k = k·dt`, `k = 0..=steps`, with snapshots every
/// `record_every` steps plus the final step.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TimeGrid {
    dt: f64,
    steps: usize,
    record_every: usize,
}

impl TimeGrid {
    pub fn new(dt: f64, t_final: f64, record_every: usize) -> Result<Self> {
        if !(dt.is_finite() && dt > 0.0) {
            return Err(Error::InvalidParameter { name: "dt", reason: format!("{dt} is not positive") });
        }
        if !(t_final.is_finite() && t_final > 0.0) {
            return Err(Error::InvalidParameter { name: "t_final", reason: format!("{t_final} is not positive") });
        }
        if dt > t_final * (1.0 + 1e-12) {
            return Err(Error::InvalidParameter {
                name: "dt",
                reason: format!("dt = {dt} exceeds t_final = {t_final}"),
            });
        }
        if record_every == 0 {
            return Err(Error::InvalidParameter { name: "record_every", reason: "must be >= 1".into() });
        }
        let ratio = t_final / dt;
        let steps = ratio.round();
        if (ratio - steps).abs() > 1e-6 * ratio.max(1.0) {
            return Err(Error::InvalidParameter {
                name: "t_final",
                reason: format!("t_final = {t_final} is not a whole number of steps dt = {dt}"),
            });
        }
        Ok(Self { dt, steps: steps as usize, record_every })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn record_every(&self) -> usize {
        self.record_every
    }

    pub fn time(&self, step: usize) -> f64 {
        step as f64 * self.dt
    }

    pub fn is_recorded(&self, step: usize) -> bool {
        step.is_multiple_of(self.record_every) || step == self.steps
    }

    /// Step indices at which snapshots are taken, starting with 0.
    pub fn recorded_steps(&self) -> impl Iterator<Item = usize> + '_ {
        (0..=self.steps).filter(move |&k| self.is_recorded(k))
    }

    pub fn snapshot_count(&self) -> usize {
        self.steps / self.record_every + 1 + usize::from(!self.steps.is_multiple_of(self.record_every))
    }

    /// Same span with `dt` divided by `factor`, snapshots at the same times.
    pub fn refined(&self, factor: usize) -> Self {
        Self { dt: self.dt / factor as f64, steps: self.steps * factor, record_every: self.record_every * factor }
    }
}
