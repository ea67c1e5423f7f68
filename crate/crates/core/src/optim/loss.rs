use std::fmt;
use std::str::FromStr;

use crate::qmath::{fidelity_with_pure, trace_distance, DensityMatrix};
use crate::tasks::{conditional_distribution, Model, Setting};
use crate::{metrics, Error, Result};

/// Probabilities are floored here before taking the log.
pub const PROB_FLOOR: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum LossKind {
    CrossEntropy,
    TraceDistance,
    Infidelity,
    NegCoherentInfo,
}

impl LossKind {
    pub const ALL: [LossKind; 4] = [
        LossKind::CrossEntropy,
        LossKind::TraceDistance,
        LossKind::Infidelity,
        LossKind::NegCoherentInfo,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            LossKind::CrossEntropy => "cross_entropy",
            LossKind::TraceDistance => "trace_distance",
            LossKind::Infidelity => "infidelity",
            LossKind::NegCoherentInfo => "neg_coherent_info",
        }
    }

    pub fn default_for(setting: Setting) -> Self {
        match setting {
            Setting::Classical | Setting::EaClassical => LossKind::CrossEntropy,
            Setting::Quantum => LossKind::TraceDistance,
        }
    }

    pub fn supports(self, setting: Setting) -> bool {
        (self == LossKind::CrossEntropy) == (setting != Setting::Quantum)
    }

    /// Whether the loss is linear in the output state, so shift rules apply
    /// directly.
    pub fn is_linear(self) -> bool {
        self == LossKind::Infidelity
    }
}

impl fmt::Display for LossKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for LossKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        LossKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| {
                Error::InvalidArgument(format!(
                    "unknown loss '{s}' (expected cross_entropy, trace_distance, infidelity or neg_coherent_info)"
                ))
            })
    }
}

/// −(1/k) Σᵢ log₂ max(p(ŝ = tᵢ | sᵢ), 1e-12).
pub fn cross_entropy_loss(cond: &[Vec<f64>], targets: &[usize]) -> Result<f64> {
    if cond.is_empty() {
        return Err(Error::InvalidArgument("empty message batch".into()));
    }
    if cond.len() != targets.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} rows for {} targets",
            cond.len(),
            targets.len()
        )));
    }
    let mut total = 0.0;
    for (row, &t) in cond.iter().zip(targets) {
        let p = *row.get(t).ok_or_else(|| {
            Error::DimensionMismatch(format!("target {t} outside a row of {}", row.len()))
        })?;
        total -= p.max(PROB_FLOOR).log2();
    }
    Ok(total / cond.len() as f64)
}

pub fn trace_distance_loss(rho_out: &DensityMatrix, rho_ref: &DensityMatrix) -> Result<f64> {
    trace_distance(rho_out, rho_ref)
}

/// 1 − ⟨ψ|ρ|ψ⟩
pub fn infidelity_loss(rho_out: &DensityMatrix, psi: &[crate::qmath::Complex64]) -> Result<f64> {
    Ok(1.0 - fidelity_with_pure(rho_out, psi)?)
}

pub(crate) fn check_compatible(loss: LossKind, setting: Setting) -> Result<()> {
    if !loss.supports(setting) {
        return Err(Error::InvalidArgument(format!(
            "loss '{loss}' is not available for {setting} tasks"
        )));
    }
    Ok(())
}

/// Loss of a model at a flat parameter vector.
pub fn model_loss(model: &Model, loss: LossKind, params: &[f64]) -> Result<f64> {
    check_compatible(loss, model.setting())?;
    let value = match loss {
        LossKind::CrossEntropy => {
            cross_entropy_loss(&conditional_distribution(model, params)?, model.targets())?
        }
        LossKind::TraceDistance => {
            let ideal = model.ideal_state().expect("quantum model");
            trace_distance_loss(&model.quantum_output(params)?, ideal)?
        }
        LossKind::Infidelity => {
            let psi = model.ideal_vector().expect("quantum model");
            infidelity_loss(&model.quantum_output(params)?, psi)?
        }
        LossKind::NegCoherentInfo => -metrics::coherent_information(
            &model.quantum_output(params)?,
            model.transmitted_wires(),
        )?,
    };
    if !value.is_finite() {
        return Err(Error::Numerical(format!("{loss} evaluated to {value}")));
    }
    Ok(value)
}
