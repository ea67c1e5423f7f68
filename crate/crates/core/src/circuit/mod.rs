//! Parameterized circuits acting on density matrices.
//!
//! Circuits are gate lists whose parameterized gates read angles from slots
//! of a shared parameter vector. Noise is not part of the gate list: it is
//! supplied per run as [`NoiseInsertion`]s keyed by gate position, so one
//! circuit skeleton serves both noisy and noiseless evaluation.

mod gate;
mod kraus;
mod local;

pub use gate::{hadamard, pauli_x, pauli_y, pauli_z, rot3_matrix, Gate, GateKind};
pub use kraus::{KrausChannel, COMPLETENESS_TOL};

use crate::qmath::{bit_shift, check_wires, DensityMatrix};
use crate::{Error, Result};
use local::{conjugate, kraus_sum, LocalLayout};

#[derive(Clone, Debug, PartialEq)]
pub struct ParameterizedCircuit {
    n_qubits: usize,
    gates: Vec<Gate>,
    n_params: usize,
    slot_used: Vec<bool>,
}

impl ParameterizedCircuit {
    pub fn new(n_qubits: usize, n_params: usize) -> Self {
        Self {
            n_qubits,
            gates: Vec::new(),
            n_params,
            slot_used: vec![false; n_params],
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn n_params(&self) -> usize {
        self.n_params
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn push(&mut self, gate: Gate) -> Result<()> {
        check_wires(self.n_qubits, &gate.wires())?;
        for &s in gate.param_slots() {
            if s >= self.n_params {
                return Err(Error::InvalidCircuit(format!(
                    "parameter slot {s} out of range ({} slots)",
                    self.n_params
                )));
            }
            if self.slot_used[s] {
                return Err(Error::InvalidCircuit(format!("parameter slot {s} bound twice")));
            }
        }
        for &s in gate.param_slots() {
            self.slot_used[s] = true;
        }
        self.gates.push(gate);
        Ok(())
    }

    /// Appends `other` with its wire `i` placed on `wire_map[i]` and its
    /// slots shifted by `slot_offset`.
    pub fn append(&mut self, other: &Self, wire_map: &[usize], slot_offset: usize) -> Result<()> {
        if wire_map.len() != other.n_qubits {
            return Err(Error::InvalidCircuit(format!(
                "wire map of length {} for a {}-qubit circuit",
                wire_map.len(),
                other.n_qubits
            )));
        }
        check_wires(self.n_qubits, wire_map)?;
        for g in &other.gates {
            self.push(g.remapped(wire_map, slot_offset))?;
        }
        Ok(())
    }

    /// Kind of the gate reading each slot, `None` for unbound slots.
    pub fn slot_kinds(&self) -> Vec<Option<GateKind>> {
        let mut kinds = vec![None; self.n_params];
        for g in &self.gates {
            for &s in g.param_slots() {
                kinds[s] = Some(g.kind());
            }
        }
        kinds
    }
}

/// Hardware-efficient ansatz: each layer is a Rot3 on every qubit followed by
/// a CNOT ring `i → i+1 mod n` (no CNOTs for a single qubit).
pub fn layered_ansatz(n_qubits: usize, n_layers: usize) -> Result<ParameterizedCircuit> {
    if n_qubits == 0 || n_layers == 0 {
        return Err(Error::InvalidCircuit(format!(
            "layered ansatz needs at least one qubit and one layer (got {n_qubits}, {n_layers})"
        )));
    }
    let mut circ = ParameterizedCircuit::new(n_qubits, 3 * n_qubits * n_layers);
    let mut slot = 0;
    for _ in 0..n_layers {
        for q in 0..n_qubits {
            circ.push(Gate::rot3(q, slot))?;
            slot += 3;
        }
        if n_qubits > 1 {
            for q in 0..n_qubits {
                circ.push(Gate::cnot(q, (q + 1) % n_qubits))?;
            }
        }
    }
    Ok(circ)
}

/// Channel applied to one wire just before the gate at `position`
/// (`position == circuit.len()` means after the last gate).
#[derive(Clone, Debug, PartialEq)]
pub struct NoiseInsertion {
    pub position: usize,
    pub channel: KrausChannel,
    pub wire: usize,
}

impl NoiseInsertion {
    pub fn new(position: usize, channel: KrausChannel, wire: usize) -> Self {
        Self { position, channel, wire }
    }
}

/// U ρ U† for a single gate.
pub fn apply_unitary_gate(rho: &DensityMatrix, gate: &Gate, params: &[f64]) -> Result<DensityMatrix> {
    let wires = gate.wires();
    check_wires(rho.n_qubits(), &wires)?;
    if let Some(&max) = gate.param_slots().iter().max() {
        if max >= params.len() {
            return Err(Error::ParameterCount { expected: max + 1, got: params.len() });
        }
    }
    let mut out = rho.clone();
    let layout = LocalLayout::new(rho.n_qubits(), &wires);
    conjugate(out.matrix_mut(), &gate.matrix(params), &layout);
    Ok(out)
}

/// Σᵢ K̃ᵢ ρ K̃ᵢ† with the channel's operators embedded at `wire`.
pub fn apply_channel(rho: &DensityMatrix, channel: &KrausChannel, wire: usize) -> Result<DensityMatrix> {
    check_wires(rho.n_qubits(), &[wire])?;
    channel.ensure_trace_preserving()?;
    let layout = LocalLayout::new(rho.n_qubits(), &[wire]);
    let mat = kraus_sum(rho.matrix(), channel.kraus_ops(), &layout);
    Ok(DensityMatrix::from_evolved(rho.n_qubits(), mat))
}

/// Exact evolution of `rho0` through `circuit` with noise interleaved.
pub fn run_circuit(
    rho0: &DensityMatrix,
    circuit: &ParameterizedCircuit,
    params: &[f64],
    noise: &[NoiseInsertion],
) -> Result<DensityMatrix> {
    if params.len() != circuit.n_params() {
        return Err(Error::ParameterCount { expected: circuit.n_params(), got: params.len() });
    }
    if rho0.n_qubits() != circuit.n_qubits() {
        return Err(Error::DimensionMismatch(format!(
            "{}-qubit state into a {}-qubit circuit",
            rho0.n_qubits(),
            circuit.n_qubits()
        )));
    }
    for ins in noise {
        if ins.position > circuit.len() {
            return Err(Error::InvalidCircuit(format!(
                "noise position {} past the end of a {}-gate circuit",
                ins.position,
                circuit.len()
            )));
        }
        check_wires(circuit.n_qubits(), &[ins.wire])?;
        ins.channel.ensure_trace_preserving()?;
    }

    let n = circuit.n_qubits();
    let mut rho = rho0.clone();
    let apply_noise_at = |rho: &mut DensityMatrix, pos: usize| {
        for ins in noise.iter().filter(|ins| ins.position == pos) {
            let layout = LocalLayout::new(n, &[ins.wire]);
            let mat = kraus_sum(rho.matrix(), ins.channel.kraus_ops(), &layout);
            *rho.matrix_mut() = mat;
        }
    };
    for (pos, gate) in circuit.gates().iter().enumerate() {
        apply_noise_at(&mut rho, pos);
        let layout = LocalLayout::new(n, &gate.wires());
        conjugate(rho.matrix_mut(), &gate.matrix(params), &layout);
    }
    apply_noise_at(&mut rho, circuit.len());
    Ok(rho)
}

/// Computational-basis outcome distribution on `wires`; outcome `k` reads the
/// wires as a bit string, first wire most significant.
pub fn measurement_probabilities(rho: &DensityMatrix, wires: &[usize]) -> Result<Vec<f64>> {
    let n = rho.n_qubits();
    if wires.is_empty() {
        return Err(Error::InvalidArgument("no wires to measure".into()));
    }
    check_wires(n, wires)?;
    let k = wires.len();
    let mut probs = vec![0.0; 1 << k];
    let m = rho.matrix();
    for i in 0..rho.dim() {
        let outcome = wires
            .iter()
            .fold(0usize, |acc, &w| (acc << 1) | ((i >> bit_shift(n, w)) & 1));
        probs[outcome] += m[(i, i)].re;
    }
    for p in probs.iter_mut() {
        if *p < 0.0 {
            *p = 0.0;
        }
    }
    Ok(probs)
}

/// |b₀ … b_{k−1} 0 … 0⟩⟨…| over `width` qubits.
pub fn basis_embed(bits: &[bool], width: usize) -> Result<DensityMatrix> {
    if bits.len() > width {
        return Err(Error::InvalidArgument(format!(
            "{} bits do not fit in {width} qubits",
            bits.len()
        )));
    }
    let index = bits
        .iter()
        .chain(std::iter::repeat_n(&false, width - bits.len()))
        .fold(0usize, |acc, &b| (acc << 1) | b as usize);
    DensityMatrix::basis_state(width, index)
}
