use std::f64::consts::{FRAC_PI_2, LN_2, SQRT_2};
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::circuit::GateKind;
use crate::tasks::Model;
use crate::{Error, Result};

use super::loss::{check_compatible, model_loss, LossKind, PROB_FLOOR};

pub const DEFAULT_FD_STEP: f64 = 1e-4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GradientMethod {
    ParameterShift,
    CentralDifference,
}

impl GradientMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            GradientMethod::ParameterShift => "parameter_shift",
            GradientMethod::CentralDifference => "central_difference",
        }
    }
}

impl fmt::Display for GradientMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for GradientMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "parameter_shift" => Ok(GradientMethod::ParameterShift),
            "central_difference" => Ok(GradientMethod::CentralDifference),
            _ => Err(Error::InvalidArgument(format!(
                "unknown gradient method '{s}' (expected parameter_shift or central_difference)"
            ))),
        }
    }
}

/// Exact shift rule for one parameter slot.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ShiftRule {
    /// Single-frequency generator: [f(θ+π/2) − f(θ−π/2)]/2.
    TwoTerm,
    /// Controlled rotation with frequencies ½ and 1.
    FourTerm,
    /// Slot read by no gate.
    Zero,
}

impl ShiftRule {
    pub fn for_gate(kind: Option<GateKind>) -> Self {
        match kind {
            None => ShiftRule::Zero,
            Some(GateKind::ControlledRot3) => ShiftRule::FourTerm,
            Some(_) => ShiftRule::TwoTerm,
        }
    }

    pub fn for_model(model: &Model) -> Vec<Self> {
        model.slot_kinds().into_iter().map(Self::for_gate).collect()
    }
}

const D1: f64 = (SQRT_2 + 1.0) / (4.0 * SQRT_2);
const D2: f64 = (SQRT_2 - 1.0) / (4.0 * SQRT_2);

fn shifted(params: &[f64], j: usize, delta: f64) -> Vec<f64> {
    let mut p = params.to_vec();
    p[j] += delta;
    p
}

fn difference<F>(f: &F, params: &[f64], j: usize, delta: f64) -> Result<Vec<f64>>
where
    F: Fn(&[f64]) -> Result<Vec<f64>>,
{
    let plus = f(&shifted(params, j, delta))?;
    let minus = f(&shifted(params, j, -delta))?;
    Ok(plus.iter().zip(&minus).map(|(a, b)| a - b).collect())
}

/// d f / d θⱼ for a vector-valued `f`.
fn column<F>(f: &F, params: &[f64], j: usize, rule: ShiftRule, method: GradientMethod, h: f64) -> Result<Vec<f64>>
where
    F: Fn(&[f64]) -> Result<Vec<f64>>,
{
    match (method, rule) {
        (GradientMethod::CentralDifference, _) => {
            Ok(difference(f, params, j, h)?.into_iter().map(|d| d / (2.0 * h)).collect())
        }
        (GradientMethod::ParameterShift, ShiftRule::Zero) => Ok(f(params)?.iter().map(|_| 0.0).collect()),
        (GradientMethod::ParameterShift, ShiftRule::TwoTerm) => {
            Ok(difference(f, params, j, FRAC_PI_2)?.into_iter().map(|d| d / 2.0).collect())
        }
        (GradientMethod::ParameterShift, ShiftRule::FourTerm) => {
            let near = difference(f, params, j, FRAC_PI_2)?;
            let far = difference(f, params, j, 3.0 * FRAC_PI_2)?;
            Ok(near.iter().zip(&far).map(|(a, b)| D1 * a - D2 * b).collect())
        }
    }
}

/// Jacobian columns, one per parameter, evaluated concurrently.
fn jacobian<F>(f: &F, params: &[f64], rules: &[ShiftRule], method: GradientMethod, h: f64) -> Result<Vec<Vec<f64>>>
where
    F: Fn(&[f64]) -> Result<Vec<f64>> + Sync,
{
    if rules.len() != params.len() {
        return Err(Error::ParameterCount { expected: params.len(), got: rules.len() });
    }
    (0..params.len())
        .into_par_iter()
        .map(|j| column(f, params, j, rules[j], method, h))
        .collect()
}

/// Gradient of a scalar function, treating every parameter as a
/// single-frequency rotation angle under `ParameterShift`.
pub fn gradient<F>(loss_at: F, params: &[f64], method: GradientMethod, fd_step: f64) -> Vec<f64>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    gradient_with_rules(loss_at, params, &vec![ShiftRule::TwoTerm; params.len()], method, fd_step)
}

pub fn gradient_with_rules<F>(
    loss_at: F,
    params: &[f64],
    rules: &[ShiftRule],
    method: GradientMethod,
    fd_step: f64,
) -> Vec<f64>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    assert_eq!(rules.len(), params.len(), "one shift rule per parameter");
    let wrapped = |p: &[f64]| -> Result<Vec<f64>> { Ok(vec![loss_at(p)]) };
    jacobian(&wrapped, params, rules, method, fd_step)
        .expect("infallible scalar function")
        .into_iter()
        .map(|c| c[0])
        .collect()
}

/// Gradient of a model loss.
///
/// Under `ParameterShift`, cross-entropy is differentiated through the
/// shift-rule Jacobian of the target probabilities; trace distance and
/// negative coherent information are rejected since neither is linear in the
/// state.
pub fn loss_gradient(
    model: &Model,
    loss: LossKind,
    params: &[f64],
    method: GradientMethod,
    fd_step: f64,
) -> Result<Vec<f64>> {
    check_compatible(loss, model.setting())?;
    if params.len() != model.n_params() {
        return Err(Error::ParameterCount { expected: model.n_params(), got: params.len() });
    }
    let rules = match method {
        GradientMethod::CentralDifference => vec![ShiftRule::TwoTerm; params.len()],
        GradientMethod::ParameterShift => ShiftRule::for_model(model),
    };
    match (method, loss) {
        (GradientMethod::CentralDifference, _) | (GradientMethod::ParameterShift, LossKind::Infidelity) => {
            let f = |p: &[f64]| -> Result<Vec<f64>> { Ok(vec![model_loss(model, loss, p)?]) };
            Ok(jacobian(&f, params, &rules, method, fd_step)?.into_iter().map(|c| c[0]).collect())
        }
        (GradientMethod::ParameterShift, LossKind::CrossEntropy) => {
            let probs = model.target_probabilities(params)?;
            let f = |p: &[f64]| model.target_probabilities(p);
            let cols = jacobian(&f, params, &rules, method, fd_step)?;
            let k = probs.len() as f64;
            Ok(cols
                .iter()
                .map(|dp| {
                    -dp.iter()
                        .zip(&probs)
                        .filter(|(_, &p)| p > PROB_FLOOR)
                        .map(|(d, &p)| d / (p * LN_2))
                        .sum::<f64>()
                        / k
                })
                .collect())
        }
        (GradientMethod::ParameterShift, _) => Err(Error::InvalidArgument(format!(
            "parameter_shift does not apply to the nonlinear loss '{loss}'; use central_difference"
        ))),
    }
}
