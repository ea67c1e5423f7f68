//! The four single-qubit channel families and a CPTP check.

use std::fmt;
use std::str::FromStr;

use crate::circuit::{pauli_x, pauli_y, pauli_z, KrausChannel};
use crate::qmath::ComplexMatrix;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ChannelKind {
    BitFlip,
    PhaseFlip,
    Depolarizing,
    AmplitudeDamping,
}

impl ChannelKind {
    pub const ALL: [ChannelKind; 4] = [
        ChannelKind::BitFlip,
        ChannelKind::PhaseFlip,
        ChannelKind::Depolarizing,
        ChannelKind::AmplitudeDamping,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ChannelKind::BitFlip => "bit_flip",
            ChannelKind::PhaseFlip => "phase_flip",
            ChannelKind::Depolarizing => "depolarizing",
            ChannelKind::AmplitudeDamping => "amplitude_damping",
        }
    }
}

impl fmt::Display for ChannelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ChannelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ChannelKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| {
                Error::InvalidArgument(format!(
                    "unknown channel '{s}' (expected bit_flip, phase_flip, depolarizing or amplitude_damping)"
                ))
            })
    }
}

/// Declarative channel choice; `gamma` is only read for amplitude damping.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChannelSpec {
    pub kind: ChannelKind,
    pub p: f64,
    pub gamma: f64,
}

impl ChannelSpec {
    pub fn new(kind: ChannelKind, p: f64) -> Self {
        Self { kind, p, gamma: 0.0 }
    }

    pub fn amplitude_damping(p: f64, gamma: f64) -> Self {
        Self { kind: ChannelKind::AmplitudeDamping, p, gamma }
    }

    pub fn validate(&self) -> Result<()> {
        check_probability("p", self.p)?;
        if self.kind == ChannelKind::AmplitudeDamping {
            check_probability("gamma", self.gamma)?;
        }
        Ok(())
    }

    pub fn build(&self) -> Result<KrausChannel> {
        match self.kind {
            ChannelKind::BitFlip => bit_flip(self.p),
            ChannelKind::PhaseFlip => phase_flip(self.p),
            ChannelKind::Depolarizing => depolarizing(self.p),
            ChannelKind::AmplitudeDamping => amplitude_damping(self.p, self.gamma),
        }
    }
}

fn check_probability(name: &'static str, value: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&value) {
        return Err(Error::ProbabilityOutOfRange { name, value });
    }
    Ok(())
}

/// K₀ = √(1−p)·I, K₁ = √p·X
pub fn bit_flip(p: f64) -> Result<KrausChannel> {
    check_probability("p", p)?;
    KrausChannel::with_params(
        "bit_flip",
        vec![("p", p)],
        vec![
            ComplexMatrix::identity(2).scale_real((1.0 - p).sqrt()),
            pauli_x().scale_real(p.sqrt()),
        ],
    )
}

/// K₀ = √(1−p)·I, K₁ = √p·Z
pub fn phase_flip(p: f64) -> Result<KrausChannel> {
    check_probability("p", p)?;
    KrausChannel::with_params(
        "phase_flip",
        vec![("p", p)],
        vec![
            ComplexMatrix::identity(2).scale_real((1.0 - p).sqrt()),
            pauli_z().scale_real(p.sqrt()),
        ],
    )
}

/// K₀ = √(1−p)·I and √(p/3)·{Z, X, Y}.
pub fn depolarizing(p: f64) -> Result<KrausChannel> {
    check_probability("p", p)?;
    let w = (p / 3.0).sqrt();
    KrausChannel::with_params(
        "depolarizing",
        vec![("p", p)],
        vec![
            ComplexMatrix::identity(2).scale_real((1.0 - p).sqrt()),
            pauli_z().scale_real(w),
            pauli_x().scale_real(w),
            pauli_y().scale_real(w),
        ],
    )
}

/// Generalized amplitude damping: with weight 1−p the excited state decays
/// to |0⟩, with weight p the ground state decays to |1⟩. `p = 0` is the
/// standard damping channel.
pub fn amplitude_damping(p: f64, gamma: f64) -> Result<KrausChannel> {
    check_probability("p", p)?;
    check_probability("gamma", gamma)?;
    let a = (1.0 - p).sqrt();
    let b = p.sqrt();
    let keep = (1.0 - gamma).sqrt();
    let m = |e: [f64; 4]| ComplexMatrix::from_real(2, 2, &e).expect("2x2 literal");
    KrausChannel::with_params(
        "amplitude_damping",
        vec![("p", p), ("gamma", gamma)],
        vec![
            m([a, 0.0, 0.0, a * keep]),
            m([0.0, (gamma * (1.0 - p)).sqrt(), 0.0, 0.0]),
            m([b * keep, 0.0, 0.0, b]),
            m([0.0, 0.0, (gamma * p).sqrt(), 0.0]),
        ],
    )
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CptpCheck {
    pub passed: bool,
    /// ‖Σ K†K − I‖_max
    pub residual: f64,
}

pub fn validate_cptp(channel: &KrausChannel, tol: f64) -> CptpCheck {
    let residual = channel.residual();
    CptpCheck { passed: residual <= tol, residual }
}
