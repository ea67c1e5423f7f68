//! Variational channel coding over noisy qubit channels.
//!
//! Parameterized encoder/decoder circuits are trained on an exact
//! density-matrix simulator in three communication settings (classical,
//! entanglement-assisted classical and quantum) and the learned codes are
//! scored against closed-form or numerically computed capacity references.
//!
//! Layout:
//! - [`qmath`]: complex matrices, density matrices, Jacobi eigensolver, entropies.
//! - [`circuit`]: gates, parameterized circuits, Kraus channels, measurement.
//! - [`channels`]: bit-flip, phase-flip, depolarizing and amplitude-damping families.
//! - [`tasks`]: the three communication models and their forward evaluation.
//! - [`optim`]: losses, gradients, Adam and the training loop.
//! - [`metrics`]: mutual/coherent information and reference capacities.
//! - [`cli`]: experiment configs, sweep runner, CSV/curve/checkpoint files.

pub mod channels;
pub mod circuit;
pub mod cli;
pub mod metrics;
pub mod optim;
pub mod qmath;
pub mod tasks;

mod error;

pub use error::{Error, Result, Violation};
