use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::metrics::{self, Reference};
use crate::tasks::{conditional_distribution, Model, ModelParameters, Setting};
use crate::{Error, Result, Violation};

use super::adam::{Adam, AdamState};
use super::gradient::{loss_gradient, GradientMethod, DEFAULT_FD_STEP};
use super::loss::{check_compatible, model_loss, LossKind};

/// Fraction of steps covered by the learning-rate ramp when warmup is on.
pub const WARMUP_FRACTION: f64 = 0.05;

#[derive(Clone, Debug, PartialEq)]
pub struct TrainConfig {
    pub steps: usize,
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
    pub gradient_method: GradientMethod,
    pub fd_step: f64,
    /// `None` picks the setting's default loss.
    pub loss: Option<LossKind>,
    pub seed: u64,
    pub init_scale: f64,
    pub warmup: bool,
}

impl Default for TrainConfig {
    fn default() -> Self {
        let adam = Adam::default();
        Self {
            steps: 500,
            learning_rate: adam.learning_rate,
            beta1: adam.beta1,
            beta2: adam.beta2,
            epsilon: adam.epsilon,
            gradient_method: GradientMethod::CentralDifference,
            fd_step: DEFAULT_FD_STEP,
            loss: None,
            seed: 0,
            init_scale: 0.1,
            warmup: false,
        }
    }
}

impl TrainConfig {
    pub fn adam(&self) -> Adam {
        Adam {
            learning_rate: self.learning_rate,
            beta1: self.beta1,
            beta2: self.beta2,
            epsilon: self.epsilon,
        }
    }

    pub fn loss_for(&self, setting: Setting) -> LossKind {
        self.loss.unwrap_or_else(|| LossKind::default_for(setting))
    }

    /// Every violated invariant; `setting` enables the loss compatibility
    /// checks.
    pub fn validate(&self, setting: Option<Setting>) -> Vec<Violation> {
        let mut errs = Vec::new();
        let mut err = |field: &'static str, msg: String| errs.push(Violation::new(field, msg));
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            err("learning_rate", format!("must be positive (got {})", self.learning_rate));
        }
        for (name, b) in [("beta1", self.beta1), ("beta2", self.beta2)] {
            if !(b > 0.0 && b < 1.0) {
                err(name, format!("must lie strictly between 0 and 1 (got {b})"));
            }
        }
        if self.epsilon.is_nan() || self.epsilon <= 0.0 {
            err("epsilon", format!("must be positive (got {})", self.epsilon));
        }
        if !(self.fd_step > 0.0 && self.fd_step.is_finite()) {
            err("fd_step", format!("must be positive (got {})", self.fd_step));
        }
        if !(self.init_scale >= 0.0 && self.init_scale.is_finite()) {
            err("init_scale", format!("must be non-negative (got {})", self.init_scale));
        }
        if let Some(setting) = setting {
            let loss = self.loss_for(setting);
            if !loss.supports(setting) {
                err("loss", format!("loss '{loss}' is not available for {setting} tasks"));
            } else if self.gradient_method == GradientMethod::ParameterShift
                && matches!(loss, LossKind::TraceDistance | LossKind::NegCoherentInfo)
            {
                err("gradient_method", format!(
                    "parameter_shift does not apply to the nonlinear loss '{loss}'; use central_difference"
                ));
            }
        }
        errs
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrainReport {
    pub loss_history: Vec<f64>,
    pub final_params: ModelParameters,
    /// Mutual information (classical settings) or coherent information
    /// (quantum) of the final code, in bits per block.
    pub evaluated_metric: f64,
    /// `evaluated_metric` per channel use.
    pub learned_rate: f64,
    pub reference: Reference,
    pub wall_time: f64,
}

impl TrainReport {
    pub fn final_loss(&self) -> Option<f64> {
        self.loss_history.last().copied()
    }
}

/// Uniform draws in [−scale, scale] from a seeded stream.
pub fn initial_params(n: usize, seed: u64, scale: f64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| scale * rng.gen_range(-1.0..=1.0)).collect()
}

/// Mutual information under a uniform prior, or coherent information of the
/// transmitted wires.
pub fn evaluate_metric(model: &Model, params: &[f64]) -> Result<f64> {
    let value = match model.setting() {
        Setting::Classical | Setting::EaClassical => {
            let cond = conditional_distribution(model, params)?;
            metrics::mutual_information(&cond, &metrics::uniform_prior(cond.len()))?
        }
        Setting::Quantum => {
            metrics::coherent_information(&model.quantum_output(params)?, model.transmitted_wires())?
        }
    };
    if !value.is_finite() {
        return Err(Error::Numerical(format!("metric evaluated to {value}")));
    }
    Ok(value)
}

pub fn train(model: &Model, config: &TrainConfig) -> Result<TrainReport> {
    let errs = config.validate(Some(model.setting()));
    if !errs.is_empty() {
        let msgs: Vec<String> = errs.iter().map(|v| v.to_string()).collect();
        return Err(Error::InvalidArgument(msgs.join("; ")));
    }
    let loss = config.loss_for(model.setting());
    check_compatible(loss, model.setting())?;

    let start = Instant::now();
    let adam = config.adam();
    let mut params = initial_params(model.n_params(), config.seed, config.init_scale);
    let mut state = AdamState::new(params.len());
    let mut history = Vec::with_capacity(config.steps);
    let ramp = (WARMUP_FRACTION * config.steps as f64).ceil().max(1.0);

    for step in 0..config.steps {
        history.push(model_loss(model, loss, &params)?);
        let grad = loss_gradient(model, loss, &params, config.gradient_method, config.fd_step)?;
        if let Some(bad) = grad.iter().find(|g| !g.is_finite()) {
            return Err(Error::Numerical(format!("non-finite gradient component {bad} at step {step}")));
        }
        let scale = if config.warmup { ((step + 1) as f64 / ramp).min(1.0) } else { 1.0 };
        adam.step(&mut state, &mut params, &grad, scale);
    }

    let evaluated_metric = evaluate_metric(model, &params)?;
    let learned_rate = metrics::regularized_rate(evaluated_metric, model.rate_divisor())?;
    Ok(TrainReport {
        loss_history: history,
        final_params: ModelParameters::from_flat(model.layout(), &params)?,
        evaluated_metric,
        learned_rate,
        reference: metrics::reference_capacity(model.setting(), &model.spec().channel),
        wall_time: start.elapsed().as_secs_f64(),
    })
}
