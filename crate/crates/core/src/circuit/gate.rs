use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;

use num_complex::Complex64;

use crate::qmath::ComplexMatrix;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GateKind {
    /// RZ(γ)·RY(β)·RZ(α) on one qubit.
    Rot3,
    PauliX,
    PauliY,
    PauliZ,
    Hadamard,
    Cnot,
    /// Rot3 on the target conditioned on the control being |1⟩.
    ControlledRot3,
}

impl GateKind {
    /// Number of parameter slots the gate consumes.
    pub fn arity(self) -> usize {
        match self {
            GateKind::Rot3 | GateKind::ControlledRot3 => 3,
            _ => 0,
        }
    }

    pub fn is_controlled(self) -> bool {
        matches!(self, GateKind::Cnot | GateKind::ControlledRot3)
    }
}

impl fmt::Display for GateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            GateKind::Rot3 => "rot3",
            GateKind::PauliX => "x",
            GateKind::PauliY => "y",
            GateKind::PauliZ => "z",
            GateKind::Hadamard => "h",
            GateKind::Cnot => "cnot",
            GateKind::ControlledRot3 => "crot3",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Gate {
    kind: GateKind,
    target: usize,
    control: Option<usize>,
    param_slots: Vec<usize>,
}

impl Gate {
    pub fn new(
        kind: GateKind,
        target: usize,
        control: Option<usize>,
        param_slots: Vec<usize>,
    ) -> Result<Self> {
        if kind.is_controlled() != control.is_some() {
            return Err(Error::InvalidCircuit(format!(
                "{kind} gate {} a control wire",
                if kind.is_controlled() { "requires" } else { "takes no" }
            )));
        }
        if control == Some(target) {
            return Err(Error::InvalidCircuit(format!(
                "{kind} control and target are both wire {target}"
            )));
        }
        if param_slots.len() != kind.arity() {
            return Err(Error::InvalidCircuit(format!(
                "{kind} takes {} parameters, got {}",
                kind.arity(),
                param_slots.len()
            )));
        }
        Ok(Self { kind, target, control, param_slots })
    }

    /// Rot3 on `target` reading slots `first_slot..first_slot + 3`.
    pub fn rot3(target: usize, first_slot: usize) -> Self {
        Self {
            kind: GateKind::Rot3,
            target,
            control: None,
            param_slots: (first_slot..first_slot + 3).collect(),
        }
    }

    /// Panics if `control == target`.
    pub fn controlled_rot3(control: usize, target: usize, first_slot: usize) -> Self {
        assert_ne!(control, target);
        Self {
            kind: GateKind::ControlledRot3,
            target,
            control: Some(control),
            param_slots: (first_slot..first_slot + 3).collect(),
        }
    }

    /// Panics if `control == target`.
    pub fn cnot(control: usize, target: usize) -> Self {
        assert_ne!(control, target);
        Self { kind: GateKind::Cnot, target, control: Some(control), param_slots: Vec::new() }
    }

    pub fn fixed(kind: GateKind, target: usize) -> Result<Self> {
        Self::new(kind, target, None, Vec::new())
    }

    pub fn hadamard(target: usize) -> Self {
        Self { kind: GateKind::Hadamard, target, control: None, param_slots: Vec::new() }
    }

    pub fn x(target: usize) -> Self {
        Self { kind: GateKind::PauliX, target, control: None, param_slots: Vec::new() }
    }

    pub fn kind(&self) -> GateKind {
        self.kind
    }

    pub fn target(&self) -> usize {
        self.target
    }

    pub fn control(&self) -> Option<usize> {
        self.control
    }

    pub fn param_slots(&self) -> &[usize] {
        &self.param_slots
    }

    /// Wires in local-matrix order: control first for controlled kinds.
    pub fn wires(&self) -> Vec<usize> {
        match self.control {
            Some(c) => vec![c, self.target],
            None => vec![self.target],
        }
    }

    pub(crate) fn remapped(&self, wire_map: &[usize], slot_offset: usize) -> Self {
        Self {
            kind: self.kind,
            target: wire_map[self.target],
            control: self.control.map(|c| wire_map[c]),
            param_slots: self.param_slots.iter().map(|s| s + slot_offset).collect(),
        }
    }

    /// Local unitary (2x2, or 4x4 with the control as the high bit).
    pub fn matrix(&self, params: &[f64]) -> ComplexMatrix {
        let angles = || {
            let s = &self.param_slots;
            (params[s[0]], params[s[1]], params[s[2]])
        };
        match self.kind {
            GateKind::Rot3 => {
                let (a, b, g) = angles();
                rot3_matrix(a, b, g)
            }
            GateKind::PauliX => pauli_x(),
            GateKind::PauliY => pauli_y(),
            GateKind::PauliZ => pauli_z(),
            GateKind::Hadamard => hadamard(),
            GateKind::Cnot => controlled(&pauli_x()),
            GateKind::ControlledRot3 => {
                let (a, b, g) = angles();
                controlled(&rot3_matrix(a, b, g))
            }
        }
    }
}

fn real2(entries: [f64; 4]) -> ComplexMatrix {
    ComplexMatrix::from_real(2, 2, &entries).expect("2x2 literal")
}

pub fn pauli_x() -> ComplexMatrix {
    real2([0.0, 1.0, 1.0, 0.0])
}

pub fn pauli_y() -> ComplexMatrix {
    let i = Complex64::new(0.0, 1.0);
    let z = Complex64::new(0.0, 0.0);
    ComplexMatrix::from_vec(2, 2, vec![z, -i, i, z]).expect("2x2 literal")
}

pub fn pauli_z() -> ComplexMatrix {
    real2([1.0, 0.0, 0.0, -1.0])
}

pub fn hadamard() -> ComplexMatrix {
    real2([FRAC_1_SQRT_2, FRAC_1_SQRT_2, FRAC_1_SQRT_2, -FRAC_1_SQRT_2])
}

/// |0⟩⟨0| ⊗ I + |1⟩⟨1| ⊗ u
fn controlled(u: &ComplexMatrix) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(4, 4);
    m[(0, 0)] = Complex64::new(1.0, 0.0);
    m[(1, 1)] = Complex64::new(1.0, 0.0);
    for i in 0..2 {
        for j in 0..2 {
            m[(2 + i, 2 + j)] = u[(i, j)];
        }
    }
    m
}

/// RZ(gamma)·RY(beta)·RZ(alpha), with RZ(t) = diag(e^{−it/2}, e^{it/2}) and
/// RY(t) = [[cos t/2, −sin t/2], [sin t/2, cos t/2]].
pub fn rot3_matrix(alpha: f64, beta: f64, gamma: f64) -> ComplexMatrix {
    let (s, c) = (0.5 * beta).sin_cos();
    // phases of the RZ factors on either side
    let e = |t: f64| Complex64::from_polar(1.0, t);
    let sum = 0.5 * (alpha + gamma);
    let diff = 0.5 * (alpha - gamma);
    let m = vec![
        e(-sum) * c,
        -e(diff) * s,
        e(-diff) * s,
        e(sum) * c,
    ];
    ComplexMatrix::from_vec(2, 2, m).expect("finite angles")
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn rz(t: f64) -> ComplexMatrix {
        let mut m = ComplexMatrix::zeros(2, 2);
        m[(0, 0)] = Complex64::from_polar(1.0, -t / 2.0);
        m[(1, 1)] = Complex64::from_polar(1.0, t / 2.0);
        m
    }

    fn ry(t: f64) -> ComplexMatrix {
        let (s, c) = (t / 2.0).sin_cos();
        real2([c, -s, s, c])
    }

    #[test]
    fn rot3_matches_explicit_product() {
        for &(a, b, g) in &[(0.3, -1.2, 2.5), (PI / 2.0, PI / 2.0, PI / 2.0), (-3.0, 0.1, 0.0)] {
            let explicit = &(&rz(g) * &ry(b)) * &rz(a);
            assert!(rot3_matrix(a, b, g).max_abs_diff(&explicit) < 1e-15);
        }
    }

    #[test]
    fn rot3_special_cases() {
        assert!(rot3_matrix(0.0, 0.0, 0.0).max_abs_diff(&ComplexMatrix::identity(2)) < 1e-15);
        let expect = real2([0.0, -1.0, 1.0, 0.0]);
        assert!(rot3_matrix(0.0, PI, 0.0).max_abs_diff(&expect) < 1e-15);
        let u = rot3_matrix(PI / 2.0, PI / 2.0, PI / 2.0);
        assert!(u.unitarity_residual() < 1e-12);
    }

    #[test]
    fn gate_validation() {
        assert!(Gate::new(GateKind::Rot3, 0, None, vec![0, 1]).is_err());
        assert!(Gate::new(GateKind::Cnot, 0, None, vec![]).is_err());
        assert!(Gate::new(GateKind::Cnot, 1, Some(1), vec![]).is_err());
        assert!(Gate::new(GateKind::Hadamard, 0, Some(1), vec![]).is_err());
        assert!(Gate::new(GateKind::ControlledRot3, 0, Some(1), vec![3, 4, 5]).is_ok());
    }

    #[test]
    fn controlled_rot3_is_identity_on_control_zero() {
        let g = Gate::controlled_rot3(0, 1, 0);
        let m = g.matrix(&[0.4, 1.1, -0.7]);
        for i in 0..2 {
            for j in 0..4 {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert_eq!(m[(i, j)], Complex64::new(expect, 0.0));
            }
        }
        assert!(m.unitarity_residual() < 1e-14);
    }
}
