//! Pure-state unravelings of a Lindblad master equation.
//!
//! Three stochastic processes are implemented, all in the Itô convention
//! with a fixed step and explicit renormalization after every step:
//!
//! * quantum state diffusion, one complex Wiener increment per Lindblad
//!   operator. Conditioning on a heterodyne record gives exactly the same
//!   equation, so [`Method::Qsd`] is also the heterodyne unraveling;
//! * homodyne diffusion, one real Wiener increment per operator;
//! * quantum jumps, a first-order Monte Carlo wave-function scheme.
//!
//! The mean of `|ψ_t⟩⟨ψ_t|` over realizations of any of them solves the
//! master equation when the ensemble starts from `ρ_0 = |ψ_0⟩⟨ψ_0|`.

mod ensemble;
mod noise;
mod pathwise;
mod step;

use std::fmt;
use std::str::FromStr;

use ndarray::Array1;

pub(crate) use ensemble::ProjectorMean;
pub use ensemble::{ensemble_mean, run_ensemble, trajectory_seed, EnsembleMean};
pub use noise::{make_noise, transform_noise, Increments, NoiseKind, NoisePath, BLOCK_STEPS};
pub use pathwise::{compare_pathwise, compare_pathwise_with_noise, PathwiseComparison};
pub use step::{HamiltonianStep, MAX_JUMP_PROBABILITY};

use crate::error::{Error, Result};
use crate::grid::TimeGrid;
use crate::model::LindbladModel;
use crate::statespace::{check_dim, StateVector, C64, ZERO};
use noise::NoiseStream;
use step::{Propagator, StepError};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Method {
    /// Quantum state diffusion, identical to heterodyne detection.
    Qsd,
    Homodyne,
    Jump,
}

impl Method {
    pub const HETERODYNE: Method = Method::Qsd;

    pub fn noise_kind(self) -> NoiseKind {
        match self {
            Method::Qsd => NoiseKind::ComplexWiener,
            Method::Homodyne => NoiseKind::RealWiener,
            Method::Jump => NoiseKind::UniformJump,
        }
    }

    /// Noise channels needed for a model with `lindblad_ops` operators.
    pub fn noise_channels(self, lindblad_ops: usize) -> usize {
        match self {
            Method::Qsd | Method::Homodyne => lindblad_ops,
            Method::Jump => 1,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Method::Qsd => "qsd",
            Method::Homodyne => "homodyne",
            Method::Jump => "jump",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "qsd" | "heterodyne" => Ok(Method::Qsd),
            "homodyne" => Ok(Method::Homodyne),
            "jump" => Ok(Method::Jump),
            other => Err(Error::InvalidParameter { name: "method", reason: format!("unknown method `{other}`") }),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrajectoryConfig {
    pub dt: f64,
    pub t_final: f64,
    pub record_every: usize,
    pub seed: u64,
    pub method: Method,
    pub hamiltonian_step: HamiltonianStep,
}

impl TrajectoryConfig {
    pub fn new(dt: f64, t_final: f64, record_every: usize, seed: u64, method: Method) -> Result<Self> {
        TimeGrid::new(dt, t_final, record_every)?;
        Ok(Self { dt, t_final, record_every, seed, method, hamiltonian_step: HamiltonianStep::Euler })
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_method(mut self, method: Method) -> Self {
        self.method = method;
        self
    }

    pub fn with_hamiltonian_step(mut self, hamiltonian_step: HamiltonianStep) -> Self {
        self.hamiltonian_step = hamiltonian_step;
        self
    }

    pub fn grid(&self) -> Result<TimeGrid> {
        TimeGrid::new(self.dt, self.t_final, self.record_every)
    }
}

/// One realization: snapshots on the recording grid, plus the jumps that
/// occurred (`(time, channel)`; empty for diffusive methods).
#[derive(Clone, Debug, PartialEq)]
pub struct TrajectoryRecord {
    pub times: Vec<f64>,
    pub states: Vec<StateVector>,
    pub jump_times: Vec<(f64, usize)>,
    pub seed: u64,
}

impl TrajectoryRecord {
    pub fn final_state(&self) -> &StateVector {
        self.states.last().expect("records hold at least the initial state")
    }
}

fn blow_up(err: StepError, time: f64) -> Error {
    match err {
        StepError::BlowUp => Error::NumericalBlowUp { time },
        StepError::TooLarge(probability) => Error::StepTooLarge { time, probability },
    }
}

fn check_increments(m: &LindbladModel, psi: &StateVector, channels: usize) -> Result<()> {
    check_dim(m.dim(), psi.dim())?;
    check_dim(m.channels(), channels)
}

/// One quantum-state-diffusion step with increments `dxi` (one per Lindblad
/// operator).
pub fn qsd_step(m: &LindbladModel, psi: &StateVector, dxi: &[C64], dt: f64) -> Result<StateVector> {
    check_increments(m, psi, dxi.len())?;
    let mut amps = psi.amplitudes().clone();
    Propagator::new(m, HamiltonianStep::Euler, dt).qsd(&mut amps, dxi, dt).map_err(|e| blow_up(e, dt))?;
    Ok(StateVector::from_normalized(amps))
}

/// One homodyne step with real increments `dw` (one per Lindblad operator).
pub fn homodyne_step(m: &LindbladModel, psi: &StateVector, dw: &[f64], dt: f64) -> Result<StateVector> {
    check_increments(m, psi, dw.len())?;
    let mut amps = psi.amplitudes().clone();
    Propagator::new(m, HamiltonianStep::Euler, dt).homodyne(&mut amps, dw, dt).map_err(|e| blow_up(e, dt))?;
    Ok(StateVector::from_normalized(amps))
}

/// Quantum-jump trajectory: normalized evolution under
/// `H_eff = H − (i/2) Σ L†L` interrupted by jumps `ψ → L_k ψ / ‖L_k ψ‖`.
pub fn jump_trajectory(m: &LindbladModel, psi0: &StateVector, cfg: &TrajectoryConfig) -> Result<TrajectoryRecord> {
    run_trajectory(m, psi0, &cfg.with_method(Method::Jump))
}

/// Runs `cfg.method` with noise drawn from `cfg.seed`.
pub fn run_trajectory(m: &LindbladModel, psi0: &StateVector, cfg: &TrajectoryConfig) -> Result<TrajectoryRecord> {
    let channels = cfg.method.noise_channels(m.channels());
    let stream = NoiseStream::new(cfg.method.noise_kind(), channels, cfg.dt, cfg.seed);
    drive(m, psi0, cfg, Source::Stream(Box::new(stream)))
}

/// Runs `cfg.method` driven by a pregenerated noise path. With the path from
/// `make_noise(kind, steps, channels, dt, cfg.seed)` this reproduces
/// [`run_trajectory`] exactly.
pub fn run_with_noise(
    m: &LindbladModel,
    psi0: &StateVector,
    cfg: &TrajectoryConfig,
    noise: &NoisePath,
) -> Result<TrajectoryRecord> {
    let grid = cfg.grid()?;
    if noise.kind() != cfg.method.noise_kind() {
        return Err(Error::Unsupported(format!("{:?} noise cannot drive {} trajectories", noise.kind(), cfg.method)));
    }
    check_dim(cfg.method.noise_channels(m.channels()), noise.channels())?;
    if noise.steps() < grid.steps() {
        return Err(Error::InvalidParameter {
            name: "noise",
            reason: format!("path has {} steps, {} needed", noise.steps(), grid.steps()),
        });
    }
    if (noise.dt() - cfg.dt).abs() > 1e-12 * cfg.dt {
        return Err(Error::InvalidParameter {
            name: "noise",
            reason: format!("path step {} differs from dt = {}", noise.dt(), cfg.dt),
        });
    }
    drive(m, psi0, cfg, Source::Path(noise))
}

enum Source<'a> {
    Stream(Box<NoiseStream>),
    Path(&'a NoisePath),
}

impl Source<'_> {
    fn complex(&mut self, step: usize, out: &mut [C64]) {
        match self {
            Source::Stream(s) => s.next_complex(out),
            Source::Path(p) => {
                let a = p.complex().expect("kind checked");
                out.iter_mut().zip(a.row(step)).for_each(|(o, v)| *o = *v);
            }
        }
    }

    fn real(&mut self, step: usize, out: &mut [f64]) {
        match self {
            Source::Stream(s) => s.next_real(out),
            Source::Path(p) => {
                let a = p.real().expect("kind checked");
                out.iter_mut().zip(a.row(step)).for_each(|(o, v)| *o = *v);
            }
        }
    }
}

fn drive(
    m: &LindbladModel,
    psi0: &StateVector,
    cfg: &TrajectoryConfig,
    mut source: Source<'_>,
) -> Result<TrajectoryRecord> {
    check_dim(m.dim(), psi0.dim())?;
    let grid = cfg.grid()?;
    let dt = grid.dt();
    let channels = cfg.method.noise_channels(m.channels());
    let mut prop = Propagator::new(m, cfg.hamiltonian_step, dt);

    let mut psi: Array1<C64> = psi0.amplitudes().clone();
    let mut record = TrajectoryRecord {
        times: Vec::with_capacity(grid.snapshot_count()),
        states: Vec::with_capacity(grid.snapshot_count()),
        jump_times: Vec::new(),
        seed: cfg.seed,
    };
    record.times.push(0.0);
    record.states.push(psi0.clone());

    let mut complex = vec![ZERO; channels];
    let mut real = vec![0.0; channels];
    for step in 1..=grid.steps() {
        let time = grid.time(step);
        let outcome = match cfg.method {
            Method::Qsd => {
                source.complex(step - 1, &mut complex);
                prop.qsd(&mut psi, &complex, dt)
            }
            Method::Homodyne => {
                source.real(step - 1, &mut real);
                prop.homodyne(&mut psi, &real, dt)
            }
            Method::Jump => {
                source.real(step - 1, &mut real);
                prop.jump(&mut psi, real[0], dt).map(|jumped| {
                    if let Some(k) = jumped {
                        record.jump_times.push((time, k));
                    }
                })
            }
        };
        outcome.map_err(|e| blow_up(e, time))?;
        if grid.is_recorded(step) {
            record.times.push(time);
            record.states.push(StateVector::from_normalized(psi.clone()));
        }
    }
    Ok(record)
}

/// Complex scalars of per-step scratch a trajectory of `m` allocates,
/// beyond the state vector itself.
pub fn trajectory_scratch_len(m: &LindbladModel, hamiltonian_step: HamiltonianStep) -> usize {
    Propagator::new(m, hamiltonian_step, 1e-3).scratch_len()
}
