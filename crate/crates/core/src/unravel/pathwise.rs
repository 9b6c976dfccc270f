use crate::error::{Error, Result};
use crate::model::{apply_transform, LindbladModel, RepresentationTransform};
use crate::statespace::{pure_trace_distance, StateVector};

use super::{make_noise, run_with_noise, transform_noise, Method, NoisePath, TrajectoryConfig};

/// Per-step trace distance between a trajectory of `m` and the trajectory of
/// the re-expressed model driven by the corresponding noise.
#[derive(Clone, Debug, PartialEq)]
pub struct PathwiseComparison {
    pub times: Vec<f64>,
    pub distances: Vec<f64>,
}

impl PathwiseComparison {
    pub fn max_distance(&self) -> f64 {
        self.distances.iter().copied().fold(0.0, f64::max)
    }
}

/// Runs `cfg.method` on `m` and on `apply_transform(m, t)` with shared
/// randomness, and reports the projector trace distance at every step.
///
/// For QSD the second run sees `transform_noise(t, ξ)`; homodyne noise is
/// real and cannot be mixed, so both runs see the same `dW`.
pub fn compare_pathwise(
    m: &LindbladModel,
    t: &RepresentationTransform,
    psi0: &StateVector,
    cfg: &TrajectoryConfig,
) -> Result<PathwiseComparison> {
    check_method(cfg.method)?;
    let grid = cfg.grid()?;
    let noise = make_noise(cfg.method.noise_kind(), grid.steps(), m.channels(), grid.dt(), cfg.seed)?;
    compare_pathwise_with_noise(m, t, psi0, cfg, &noise)
}

/// [`compare_pathwise`] with an explicit noise path, e.g. a coarsened
/// version of a finer path.
pub fn compare_pathwise_with_noise(
    m: &LindbladModel,
    t: &RepresentationTransform,
    psi0: &StateVector,
    cfg: &TrajectoryConfig,
    noise: &NoisePath,
) -> Result<PathwiseComparison> {
    check_method(cfg.method)?;
    let transformed = apply_transform(m, t)?;
    let other_noise = match cfg.method {
        Method::Qsd => transform_noise(t, noise)?,
        _ => noise.clone(),
    };
    let per_step = TrajectoryConfig { record_every: 1, ..*cfg };
    let a = run_with_noise(m, psi0, &per_step, noise)?;
    let b = run_with_noise(&transformed, psi0, &per_step, &other_noise)?;
    let distances =
        a.states.iter().zip(&b.states).map(|(x, y)| pure_trace_distance(x, y)).collect::<Result<Vec<_>>>()?;
    Ok(PathwiseComparison { times: a.times, distances })
}

fn check_method(method: Method) -> Result<()> {
    match method {
        Method::Qsd | Method::Homodyne => Ok(()),
        Method::Jump => Err(Error::Unsupported("pathwise comparison of jump trajectories".into())),
    }
}
