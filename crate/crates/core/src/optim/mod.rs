//! Losses, gradients, Adam and the training loop.

mod adam;
mod gradient;
mod loss;
mod train;

pub use adam::{adam_step, Adam, AdamState};
pub use gradient::{gradient, gradient_with_rules, loss_gradient, GradientMethod, ShiftRule, DEFAULT_FD_STEP};
pub use loss::{
    cross_entropy_loss, infidelity_loss, model_loss, trace_distance_loss, LossKind, PROB_FLOOR,
};
pub use train::{evaluate_metric, initial_params, train, TrainConfig, TrainReport, WARMUP_FRACTION};
