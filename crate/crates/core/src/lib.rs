//! Markovian open quantum systems evolved four ways: the Lindblad master
//! equation for the density matrix, and three stochastic pure-state
//! unravelings of it (quantum state diffusion / heterodyne, homodyne, and
//! quantum jumps).
//!
//! ```
//! use qtraj_core::master::exact_evolve;
//! use qtraj_core::model::qubit_decay_model;
//! use qtraj_core::statespace::{projector, trace_distance, StateVector};
//! use qtraj_core::unravel::{ensemble_mean, Method, TrajectoryConfig};
//!
//! let model = qubit_decay_model(1.0, 2.0, 0.0).unwrap();
//! let excited = StateVector::basis(2, 0).unwrap();
//! let cfg = TrajectoryConfig::new(1e-2, 1.0, 100, 0, Method::Qsd).unwrap();
//! let mean = ensemble_mean(&model, &excited, &cfg, 200, 7).unwrap();
//! let exact = exact_evolve(&model, &projector(&excited), 1.0).unwrap();
//! assert!(trace_distance(mean.states.last().unwrap(), &exact).unwrap() < 0.1);
//! ```

pub mod analysis;
pub mod error;
pub mod grid;
pub mod master;
pub mod model;
pub mod rng;
pub mod statespace;
pub mod stats;
pub mod testing;
pub mod unravel;

pub use error::{Error, Result};
