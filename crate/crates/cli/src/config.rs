//! Run configuration: a strict JSON document, validated as a whole before any
//! work starts.
//!
//! ```json
//! {
//!   "model": { "builder": "qubit_decay", "gamma": 1.0, "rabi": 2.0 },
//!   "method": "qsd",
//!   "dt": 0.001,
//!   "t_final": 2.0,
//!   "record_every": 100,
//!   "n_traj": 1000,
//!   "master_seed": 7,
//!   "out_path": "out"
//! }
//! ```
//!
//! Complex numbers are `[re, im]` pairs and matrices are arrays of rows.
//! Unknown fields are rejected everywhere.

use serde::{Deserialize, Serialize};

use qtraj_core::analysis::MIN_SAMPLES_PER_PERIOD;
use qtraj_core::grid::TimeGrid;
use qtraj_core::model::{
    annihilation, apply_transform, coherent_state, driven_duffing_model, duffing_drive_period, number_operator,
    quadratures, qubit_decay_model, DrivePeriod, LindbladModel, RepresentationTransform,
};
use qtraj_core::statespace::{sigma_x, sigma_y, sigma_z, OperatorMatrix, StateVector, C64};
use qtraj_core::unravel::{HamiltonianStep, Method, TrajectoryConfig};

use crate::error::{CliError, Result};

pub type Complex = [f64; 2];
pub type Matrix = Vec<Vec<Complex>>;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub model: ModelSpec,
    pub method: MethodName,
    pub dt: f64,
    pub t_final: f64,
    #[serde(default = "one")]
    pub record_every: usize,
    #[serde(default = "one")]
    pub n_traj: usize,
    #[serde(default)]
    pub master_seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial_state: Option<InitialState>,
    #[serde(default)]
    pub hamiltonian_step: StepName,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub transform: Option<TransformSpec>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub outputs: Vec<OutputSpec>,
    /// `C` in the shifted-QSD invariance bound `C·dt`.
    #[serde(default = "default_shift_bound")]
    pub shift_bound_constant: f64,
    #[serde(default = "default_out_path")]
    pub out_path: String,
}

fn one() -> usize {
    1
}

fn default_shift_bound() -> f64 {
    10.0
}

fn default_out_path() -> String {
    "out".into()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "builder", rename_all = "snake_case", deny_unknown_fields)]
pub enum ModelSpec {
    QubitDecay {
        gamma: f64,
        #[serde(default)]
        rabi: f64,
        #[serde(default)]
        detuning: f64,
    },
    DrivenDuffing {
        fock_dim: usize,
        kappa: f64,
        anharmonicity: f64,
        drive_amplitude: f64,
        drive_detuning: f64,
    },
    Explicit {
        hamiltonian: Matrix,
        lindblad_ops: Vec<Matrix>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MethodName {
    Master,
    Qsd,
    Heterodyne,
    Homodyne,
    Jump,
}

impl MethodName {
    /// The trajectory method, or `None` for `master`.
    pub fn unraveling(self) -> Option<Method> {
        match self {
            MethodName::Master => None,
            MethodName::Qsd | MethodName::Heterodyne => Some(Method::Qsd),
            MethodName::Homodyne => Some(Method::Homodyne),
            MethodName::Jump => Some(Method::Jump),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StepName {
    #[default]
    Euler,
    Exact,
}

impl From<StepName> for HamiltonianStep {
    fn from(s: StepName) -> Self {
        match s {
            StepName::Euler => HamiltonianStep::Euler,
            StepName::Exact => HamiltonianStep::Exact,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialState {
    Basis(usize),
    Amplitudes(Vec<Complex>),
    /// Coherent state `|α⟩` of a Fock-space model.
    Coherent(Complex),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransformSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mixing: Option<Matrix>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shifts: Option<Vec<Complex>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum OutputSpec {
    States,
    Observable(ObservableSpec),
    Poincare(PoincareSpec),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObservableSpec {
    /// Column label. A built-in operator when `matrix` is absent: `sigma_x`,
    /// `sigma_y`, `sigma_z`, `number`, `x`, `p` or `a`.
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<Matrix>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PoincareSpec {
    pub period: f64,
    #[serde(default)]
    pub phase_offset: f64,
}

/// Parses and fully validates a configuration document.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let cfg: RunConfig = serde_json::from_str(text).map_err(CliError::Syntax)?;
    prepare(&cfg)?;
    Ok(cfg)
}

/// Canonical form; `parse_config(&render(cfg))` returns `cfg`.
pub fn render(cfg: &RunConfig) -> String {
    serde_json::to_string_pretty(cfg).expect("config serializes")
}

/// A validated configuration with its model and states built.
#[derive(Clone, Debug)]
pub struct Prepared {
    /// The model as configured, before any transform.
    pub base_model: LindbladModel,
    pub transform: Option<RepresentationTransform>,
    /// The model runs use: `base_model` with `transform` applied.
    pub model: LindbladModel,
    pub psi0: StateVector,
    pub grid: TimeGrid,
    pub observables: Vec<(String, OperatorMatrix)>,
    pub poincare: Option<DrivePeriod>,
}

impl Prepared {
    pub fn trajectory_config(&self, cfg: &RunConfig) -> Result<TrajectoryConfig> {
        let method =
            cfg.method.unraveling().ok_or_else(|| CliError::field("method", "a trajectory method is required"))?;
        Ok(TrajectoryConfig::new(cfg.dt, cfg.t_final, cfg.record_every, cfg.master_seed, method)?
            .with_hamiltonian_step(cfg.hamiltonian_step.into()))
    }
}

pub fn prepare(cfg: &RunConfig) -> Result<Prepared> {
    for (name, v) in [("dt", cfg.dt), ("t_final", cfg.t_final), ("shift_bound_constant", cfg.shift_bound_constant)] {
        if !(v.is_finite() && v > 0.0) {
            return Err(CliError::field(name, format!("must be positive and finite, got {v}")));
        }
    }
    if cfg.dt > cfg.t_final {
        return Err(CliError::field("dt", format!("dt ({}) exceeds t_final ({})", cfg.dt, cfg.t_final)));
    }
    if cfg.record_every == 0 {
        return Err(CliError::field("record_every", "must be >= 1"));
    }
    if cfg.n_traj == 0 {
        return Err(CliError::field("n_traj", "must be >= 1"));
    }
    let grid =
        TimeGrid::new(cfg.dt, cfg.t_final, cfg.record_every).map_err(|e| CliError::field("t_final", e.to_string()))?;

    let base_model = build_model(&cfg.model)?;
    let transform = cfg.transform.as_ref().map(|t| build_transform(t, base_model.channels())).transpose()?;
    let model = match &transform {
        Some(t) => apply_transform(&base_model, t).map_err(|e| CliError::field("transform", e.to_string()))?,
        None => base_model.clone(),
    };
    let psi0 = build_initial_state(cfg.initial_state.as_ref(), model.dim())?;

    let mut observables = Vec::new();
    let mut poincare = None;
    for out in &cfg.outputs {
        match out {
            OutputSpec::States => {}
            OutputSpec::Observable(spec) => observables.push((spec.name.clone(), build_observable(spec, model.dim())?)),
            OutputSpec::Poincare(spec) => {
                if poincare.is_some() {
                    return Err(CliError::field("outputs", "at most one poincare output"));
                }
                let period = DrivePeriod::new(spec.period, spec.phase_offset)
                    .map_err(|e| CliError::field("outputs.poincare", e.to_string()))?;
                let spacing = cfg.dt * cfg.record_every as f64;
                let per_period = period.period() / spacing;
                if per_period < MIN_SAMPLES_PER_PERIOD as f64 - 1e-9
                    || (per_period - per_period.round()).abs() > 1e-9 * per_period
                {
                    return Err(CliError::field(
                        "outputs.poincare",
                        format!(
                            "period {} is not a whole multiple (>= {MIN_SAMPLES_PER_PERIOD}) of dt·record_every = {spacing}; \
                             try dt·record_every = {}",
                            period.period(),
                            period.period() / MIN_SAMPLES_PER_PERIOD as f64
                        ),
                    ));
                }
                poincare = Some(period);
            }
        }
    }
    Ok(Prepared { base_model, transform, model, psi0, grid, observables, poincare })
}

fn complex(c: &Complex) -> C64 {
    C64::new(c[0], c[1])
}

fn matrix(field: &'static str, rows: &Matrix) -> Result<OperatorMatrix> {
    let rows: Vec<Vec<C64>> = rows.iter().map(|r| r.iter().map(complex).collect()).collect();
    OperatorMatrix::from_rows(&rows).map_err(|e| CliError::field(field, e.to_string()))
}

fn build_model(spec: &ModelSpec) -> Result<LindbladModel> {
    let model = match spec {
        ModelSpec::QubitDecay { gamma, rabi, detuning } => qubit_decay_model(*gamma, *rabi, *detuning),
        ModelSpec::DrivenDuffing { fock_dim, kappa, anharmonicity, drive_amplitude, drive_detuning } => {
            driven_duffing_model(*fock_dim, *kappa, *anharmonicity, *drive_amplitude, *drive_detuning)
        }
        ModelSpec::Explicit { hamiltonian, lindblad_ops } => {
            let h = matrix("model.hamiltonian", hamiltonian)?;
            let ops = lindblad_ops.iter().map(|l| matrix("model.lindblad_ops", l)).collect::<Result<Vec<_>>>()?;
            LindbladModel::new(h, ops)
        }
    };
    model.map_err(|e| CliError::field("model", e.to_string()))
}

fn build_transform(spec: &TransformSpec, channels: usize) -> Result<RepresentationTransform> {
    let mixing = match &spec.mixing {
        Some(rows) => {
            if rows.len() != channels || rows.iter().any(|r| r.len() != channels) {
                return Err(CliError::field(
                    "transform.mixing",
                    format!("must be {channels}×{channels} for a model with {channels} Lindblad operators"),
                ));
            }
            matrix("transform.mixing", rows)?.into_entries()
        }
        None => RepresentationTransform::identity(channels).mixing_matrix().clone(),
    };
    let shifts = match &spec.shifts {
        Some(s) if s.len() != channels => {
            return Err(CliError::field(
                "transform.shifts",
                format!("has {} entries for a model with {channels} Lindblad operators", s.len()),
            ))
        }
        Some(s) => s.iter().map(complex).collect(),
        None => vec![C64::new(0.0, 0.0); channels],
    };
    RepresentationTransform::new(mixing, shifts).map_err(|e| CliError::field("transform", e.to_string()))
}

fn build_initial_state(spec: Option<&InitialState>, dim: usize) -> Result<StateVector> {
    let psi = match spec {
        None => StateVector::basis(dim, 0),
        Some(InitialState::Basis(k)) => StateVector::basis(dim, *k),
        Some(InitialState::Amplitudes(a)) => {
            if a.len() != dim {
                return Err(CliError::field(
                    "initial_state",
                    format!("has {} amplitudes, model dimension is {dim}", a.len()),
                ));
            }
            StateVector::from_slice(&a.iter().map(complex).collect::<Vec<_>>())
        }
        Some(InitialState::Coherent(alpha)) => coherent_state(dim, complex(alpha)),
    };
    psi.map_err(|e| CliError::field("initial_state", e.to_string()))
}

fn build_observable(spec: &ObservableSpec, dim: usize) -> Result<OperatorMatrix> {
    let op = match &spec.matrix {
        Some(rows) => matrix("outputs.observable.matrix", rows)?,
        None => match spec.name.as_str() {
            "sigma_x" => sigma_x(),
            "sigma_y" => sigma_y(),
            "sigma_z" => sigma_z(),
            "number" => number_operator(dim),
            "x" => quadratures(dim).0,
            "p" => quadratures(dim).1,
            "a" => annihilation(dim),
            other => {
                return Err(CliError::field(
                    "outputs.observable",
                    format!("unknown observable `{other}` and no matrix given"),
                ))
            }
        },
    };
    if op.dim() != dim {
        return Err(CliError::field(
            "outputs.observable",
            format!("`{}` is {}×{}, model dimension is {dim}", spec.name, op.dim(), op.dim()),
        ));
    }
    Ok(op)
}

/// Drive period of a Duffing model, when the configuration names one.
pub fn model_drive_period(spec: &ModelSpec) -> Option<DrivePeriod> {
    match spec {
        ModelSpec::DrivenDuffing { drive_detuning, .. } => duffing_drive_period(*drive_detuning, 0.0).ok(),
        _ => None,
    }
}
