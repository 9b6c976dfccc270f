use ndarray::Array2;

use crate::error::{Error, Result};
use crate::model::LindbladModel;
use crate::rng::split;
use crate::statespace::{outer, DensityMatrix, StateVector, C64};

use super::{run_trajectory, TrajectoryConfig, TrajectoryRecord};

/// Trajectories evaluated together before their projectors are folded into
/// the running sum.
const CHUNK: usize = 64;

/// Seed of trajectory `index` in an ensemble.
pub fn trajectory_seed(master_seed: u64, index: usize) -> u64 {
    split(master_seed, index as u64)
}

/// Runs `n_traj` independent trajectories; trajectory `i` uses
/// `trajectory_seed(master_seed, i)` and `cfg.seed` is ignored.
pub fn run_ensemble(
    m: &LindbladModel,
    psi0: &StateVector,
    cfg: &TrajectoryConfig,
    n_traj: usize,
    master_seed: u64,
) -> Result<Vec<TrajectoryRecord>> {
    check_count(n_traj)?;
    map_indices(0..n_traj, |i| run_trajectory(m, psi0, &cfg.with_seed(trajectory_seed(master_seed, i))))
        .into_iter()
        .collect()
}

/// Mean projector `M[|ψ_t⟩⟨ψ_t|]` on the recording grid.
#[derive(Clone, Debug, PartialEq)]
pub struct EnsembleMean {
    pub times: Vec<f64>,
    pub states: Vec<DensityMatrix>,
    pub n_traj: usize,
}

/// Streams an ensemble into its mean projector without keeping the records.
/// Projectors are summed in trajectory-index order, so the result is
/// bit-identical for any number of worker threads.
pub fn ensemble_mean(
    m: &LindbladModel,
    psi0: &StateVector,
    cfg: &TrajectoryConfig,
    n_traj: usize,
    master_seed: u64,
) -> Result<EnsembleMean> {
    check_count(n_traj)?;
    let grid = cfg.grid()?;
    let mut acc = ProjectorMean::default();
    let mut times = Vec::new();

    for start in (0..n_traj).step_by(CHUNK) {
        let end = (start + CHUNK).min(n_traj);
        let records =
            map_indices(start..end, |i| run_trajectory(m, psi0, &cfg.with_seed(trajectory_seed(master_seed, i))));
        for record in records {
            let record = record?;
            if times.is_empty() {
                times = record.times.clone();
                debug_assert_eq!(times.len(), grid.snapshot_count());
            }
            acc.add(&record.states);
        }
    }
    let states = acc.finish();
    Ok(EnsembleMean { times, states, n_traj })
}

/// Running mean of projectors at several snapshot times. Deviations from the
/// first trajectory's projector are summed, so an ensemble that agrees at
/// some time (e.g. `t = 0`) reproduces that projector exactly.
#[derive(Default)]
pub(crate) struct ProjectorMean {
    reference: Vec<Array2<C64>>,
    deviation: Vec<Array2<C64>>,
    count: usize,
}

impl ProjectorMean {
    pub(crate) fn add(&mut self, states: &[StateVector]) {
        if self.count == 0 {
            self.reference = states.iter().map(|s| outer(s.amplitudes().view())).collect();
            self.deviation = self.reference.iter().map(|r| Array2::zeros(r.raw_dim())).collect();
        } else {
            for ((dev, reference), psi) in self.deviation.iter_mut().zip(&self.reference).zip(states) {
                let a = psi.amplitudes();
                let n = a.len();
                for i in 0..n {
                    for j in 0..n {
                        dev[[i, j]] += a[i] * a[j].conj() - reference[[i, j]];
                    }
                }
            }
        }
        self.count += 1;
    }

    pub(crate) fn finish(self) -> Vec<DensityMatrix> {
        let scale = 1.0 / self.count as f64;
        self.reference
            .into_iter()
            .zip(self.deviation)
            .map(|(r, d)| DensityMatrix::from_positive(r + d.mapv(|z| z * scale)))
            .collect()
    }
}

fn check_count(n_traj: usize) -> Result<()> {
    if n_traj == 0 {
        return Err(Error::InvalidParameter { name: "n_traj", reason: "must be >= 1".into() });
    }
    Ok(())
}

#[cfg(feature = "parallel")]
fn map_indices<T: Send>(range: std::ops::Range<usize>, f: impl Fn(usize) -> T + Sync + Send) -> Vec<T> {
    use rayon::prelude::*;
    range.into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
fn map_indices<T>(range: std::ops::Range<usize>, f: impl Fn(usize) -> T) -> Vec<T> {
    range.map(f).collect()
}
