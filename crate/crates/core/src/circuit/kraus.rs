use std::fmt;

use crate::qmath::ComplexMatrix;
use crate::{Error, Result};

/// Completeness tolerance required before a channel may be applied.
pub const COMPLETENESS_TOL: f64 = 1e-12;

/// Single-qubit channel ρ ↦ Σ Kᵢ ρ Kᵢ†.
#[derive(Clone, PartialEq)]
pub struct KrausChannel {
    label: String,
    params: Vec<(&'static str, f64)>,
    ops: Vec<ComplexMatrix>,
    residual: f64,
}

impl KrausChannel {
    /// Accepts any non-empty list of 2x2 operators; completeness is measured
    /// here and enforced when the channel is applied.
    pub fn new(label: impl Into<String>, ops: Vec<ComplexMatrix>) -> Result<Self> {
        Self::with_params(label, Vec::new(), ops)
    }

    pub fn with_params(
        label: impl Into<String>,
        params: Vec<(&'static str, f64)>,
        ops: Vec<ComplexMatrix>,
    ) -> Result<Self> {
        let label = label.into();
        if ops.is_empty() {
            return Err(Error::InvalidArgument(format!("channel '{label}' has no Kraus operators")));
        }
        if let Some(bad) = ops.iter().find(|k| k.rows() != 2 || k.cols() != 2) {
            return Err(Error::DimensionMismatch(format!(
                "Kraus operator of '{label}' is {}x{}, expected 2x2",
                bad.rows(),
                bad.cols()
            )));
        }
        let residual = completeness_residual(&ops);
        Ok(Self { label, params, ops, residual })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn params(&self) -> &[(&'static str, f64)] {
        &self.params
    }

    pub fn kraus_ops(&self) -> &[ComplexMatrix] {
        &self.ops
    }

    /// ‖Σ Kᵢ†Kᵢ − I‖_max
    pub fn residual(&self) -> f64 {
        self.residual
    }

    pub(crate) fn ensure_trace_preserving(&self) -> Result<()> {
        if self.residual > COMPLETENESS_TOL {
            return Err(Error::NotTracePreserving {
                label: self.label.clone(),
                residual: self.residual,
            });
        }
        Ok(())
    }
}

fn completeness_residual(ops: &[ComplexMatrix]) -> f64 {
    let mut sum = ComplexMatrix::zeros(2, 2);
    for k in ops {
        sum = &sum + &(&k.adjoint() * k);
    }
    sum.max_abs_diff(&ComplexMatrix::identity(2))
}

impl fmt::Debug for KrausChannel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("KrausChannel")
            .field("label", &self.label)
            .field("params", &self.params)
            .field("n_ops", &self.ops.len())
            .field("residual", &self.residual)
            .finish()
    }
}
