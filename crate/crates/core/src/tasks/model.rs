use std::f64::consts::FRAC_1_SQRT_2;
use std::ops::Range;

use crate::channels::depolarizing;
use crate::circuit::{
    basis_embed, layered_ansatz, measurement_probabilities, run_circuit, Gate, GateKind,
    NoiseInsertion, ParameterizedCircuit,
};
use crate::qmath::{Complex64, DensityMatrix};
use crate::{Error, Result};

use super::spec::{Message, Setting, TaskSpec};

/// Where each parameter block lives in the flat parameter vector.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParamLayout {
    pub theta: Range<usize>,
    pub phi: Range<usize>,
    pub lambda: Range<usize>,
    pub pi: Range<usize>,
}

impl ParamLayout {
    fn new(theta: usize, phi: usize, lambda: usize, pi: usize) -> Self {
        Self {
            theta: 0..theta,
            phi: theta..theta + phi,
            lambda: theta + phi..theta + phi + lambda,
            pi: theta + phi + lambda..theta + phi + lambda + pi,
        }
    }

    pub fn total(&self) -> usize {
        self.pi.end
    }
}

/// Encoder (θ), decoder (φ), entangler (λ) and pooling (π) parameters.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ModelParameters {
    pub theta: Vec<f64>,
    pub phi: Vec<f64>,
    pub lambda: Vec<f64>,
    pub pi: Vec<f64>,
}

impl ModelParameters {
    pub fn from_flat(layout: &ParamLayout, flat: &[f64]) -> Result<Self> {
        if flat.len() != layout.total() {
            return Err(Error::ParameterCount { expected: layout.total(), got: flat.len() });
        }
        Ok(Self {
            theta: flat[layout.theta.clone()].to_vec(),
            phi: flat[layout.phi.clone()].to_vec(),
            lambda: flat[layout.lambda.clone()].to_vec(),
            pi: flat[layout.pi.clone()].to_vec(),
        })
    }

    pub fn to_flat(&self, layout: &ParamLayout) -> Result<Vec<f64>> {
        let blocks = [
            (&self.theta, &layout.theta, "theta"),
            (&self.phi, &layout.phi, "phi"),
            (&self.lambda, &layout.lambda, "lambda"),
            (&self.pi, &layout.pi, "pi"),
        ];
        let mut flat = Vec::with_capacity(layout.total());
        for (v, r, name) in blocks {
            if v.len() != r.len() {
                return Err(Error::InvalidArgument(format!(
                    "{name} has {} entries, the model expects {}",
                    v.len(),
                    r.len()
                )));
            }
            flat.extend_from_slice(v);
        }
        Ok(flat)
    }
}

/// One forward pass: initial state, gates over the full parameter vector,
/// and noise keyed by gate position.
#[derive(Clone, Debug)]
pub struct Program {
    pub initial: DensityMatrix,
    pub circuit: ParameterizedCircuit,
    pub noise: Vec<NoiseInsertion>,
}

impl Program {
    pub fn run(&self, params: &[f64]) -> Result<DensityMatrix> {
        run_circuit(&self.initial, &self.circuit, params, &self.noise)
    }
}

/// An assembled communication model.
#[derive(Clone, Debug)]
pub struct Model {
    spec: TaskSpec,
    layout: ParamLayout,
    /// One per message for classical settings, a single one for quantum.
    programs: Vec<Program>,
    readout: Vec<usize>,
    targets: Vec<usize>,
    transmitted: Vec<usize>,
    ideal: Option<(DensityMatrix, Vec<Complex64>)>,
}

impl Model {
    pub fn spec(&self) -> &TaskSpec {
        &self.spec
    }

    pub fn setting(&self) -> Setting {
        self.spec.setting
    }

    pub fn layout(&self) -> &ParamLayout {
        &self.layout
    }

    pub fn n_params(&self) -> usize {
        self.layout.total()
    }

    pub fn n_qubits(&self) -> usize {
        self.spec.n_qubits()
    }

    pub fn programs(&self) -> &[Program] {
        &self.programs
    }

    /// Measured wires (empty in the quantum setting).
    pub fn readout_wires(&self) -> &[usize] {
        &self.readout
    }

    /// Outcome index that counts as correct decoding, per message.
    pub fn targets(&self) -> &[usize] {
        &self.targets
    }

    /// Wires that pass through the channel.
    pub fn transmitted_wires(&self) -> &[usize] {
        &self.transmitted
    }

    /// Number of channel (not idler) insertions in each program.
    pub fn channel_insertions(&self) -> usize {
        let idler = self.spec.idler_noise_p > 0.0;
        self.programs[0]
            .noise
            .iter()
            .filter(|ins| !(idler && ins.channel.label() == "idler_depolarizing"))
            .count()
    }

    /// Ideal maximally entangled input of the quantum setting.
    pub fn ideal_state(&self) -> Option<&DensityMatrix> {
        self.ideal.as_ref().map(|(rho, _)| rho)
    }

    pub fn ideal_vector(&self) -> Option<&[Complex64]> {
        self.ideal.as_ref().map(|(_, v)| v.as_slice())
    }

    /// Channel uses that a learned total rate is divided by. Pooled codes
    /// report the single output bit without regularization.
    pub fn rate_divisor(&self) -> usize {
        match self.spec.setting {
            Setting::Classical if self.spec.pooling => 1,
            _ => self.spec.n_channel_uses.max(1),
        }
    }

    /// Gate kind reading each parameter slot, merged across programs.
    pub fn slot_kinds(&self) -> Vec<Option<GateKind>> {
        let mut kinds = vec![None; self.n_params()];
        for prog in &self.programs {
            for (k, s) in kinds.iter_mut().zip(prog.circuit.slot_kinds()) {
                if k.is_none() {
                    *k = s;
                }
            }
        }
        kinds
    }

    pub fn output_state(&self, program: usize, params: &[f64]) -> Result<DensityMatrix> {
        let prog = self.programs.get(program).ok_or_else(|| {
            Error::InvalidArgument(format!("program {program} of {}", self.programs.len()))
        })?;
        prog.run(params)
    }

    /// Joint reference + receiver state of the quantum setting.
    pub fn quantum_output(&self, params: &[f64]) -> Result<DensityMatrix> {
        if self.spec.setting != Setting::Quantum {
            return Err(Error::InvalidTask("quantum_output on a classical model".into()));
        }
        self.output_state(0, params)
    }

    /// p(ŝ = target(s) | s) for every message s.
    pub fn target_probabilities(&self, params: &[f64]) -> Result<Vec<f64>> {
        let rows = conditional_distribution(self, params)?;
        Ok(rows.iter().zip(&self.targets).map(|(row, &t)| row[t]).collect())
    }
}

/// Row-stochastic matrix p(ŝ | s), one exact forward pass per message.
pub fn conditional_distribution(model: &Model, params: &[f64]) -> Result<Vec<Vec<f64>>> {
    if model.spec.setting == Setting::Quantum {
        return Err(Error::InvalidTask(
            "the quantum setting has no classical conditional distribution".into(),
        ));
    }
    model
        .programs
        .iter()
        .map(|prog| measurement_probabilities(&prog.run(params)?, &model.readout))
        .collect()
}

pub fn build_model(spec: &TaskSpec) -> Result<Model> {
    match spec.setting {
        Setting::Classical => build_classical_model(spec),
        Setting::EaClassical => build_ea_model(spec),
        Setting::Quantum => build_quantum_model(spec),
    }
}

fn ensure_setting(spec: &TaskSpec, setting: Setting) -> Result<()> {
    if spec.setting != setting {
        return Err(Error::InvalidTask(format!(
            "expected a {setting} task, got {}",
            spec.setting
        )));
    }
    spec.ensure_valid()
}

/// Per discarded wire `d`: Rot3 on `d`, then a ControlledRot3 from `d` onto
/// `kept_wire`. Discarded wires are simply not read out afterwards.
pub fn build_pooling_layer(n_in: usize, kept_wire: usize) -> Result<ParameterizedCircuit> {
    if n_in < 2 {
        return Err(Error::InvalidCircuit(format!("pooling needs ≥ 2 inputs, got {n_in}")));
    }
    if kept_wire >= n_in {
        return Err(Error::WireOutOfRange { wire: kept_wire, n_qubits: n_in });
    }
    let mut circ = ParameterizedCircuit::new(n_in, 6 * (n_in - 1));
    let mut slot = 0;
    for d in (0..n_in).filter(|&d| d != kept_wire) {
        circ.push(Gate::rot3(d, slot))?;
        circ.push(Gate::controlled_rot3(d, kept_wire, slot + 3))?;
        slot += 6;
    }
    Ok(circ)
}

fn ansatz_or_empty(n_qubits: usize, layers: usize) -> Result<ParameterizedCircuit> {
    if layers == 0 {
        Ok(ParameterizedCircuit::new(n_qubits, 0))
    } else {
        layered_ansatz(n_qubits, layers)
    }
}

fn noise_on(
    position: usize,
    channel: &crate::circuit::KrausChannel,
    wires: &[usize],
) -> Vec<NoiseInsertion> {
    wires
        .iter()
        .map(|&w| NoiseInsertion::new(position, channel.clone(), w))
        .collect()
}

fn idler_channel(p: f64) -> Result<crate::circuit::KrausChannel> {
    let dep = depolarizing(p)?;
    crate::circuit::KrausChannel::with_params(
        "idler_depolarizing",
        dep.params().to_vec(),
        dep.kraus_ops().to_vec(),
    )
}

/// Basis-embedded message → [encoder] → channel on every wire → [decoder]
/// → [pooling onto the last wire] → readout.
pub fn build_classical_model(spec: &TaskSpec) -> Result<Model> {
    ensure_setting(spec, Setting::Classical)?;
    let n = spec.n_channel_uses;
    let wires: Vec<usize> = (0..n).collect();
    let channel = spec.channel.build()?;

    let encoder = if spec.use_encoder {
        Some(layered_ansatz(n, spec.encoder_layers)?)
    } else {
        None
    };
    let decoder = ansatz_or_empty(n, spec.decoder_layers)?;
    let kept = n - 1;
    let pooling = if spec.pooling { Some(build_pooling_layer(n, kept)?) } else { None };

    let layout = ParamLayout::new(
        encoder.as_ref().map_or(0, |c| c.n_params()),
        decoder.n_params(),
        0,
        pooling.as_ref().map_or(0, |c| c.n_params()),
    );

    let mut circuit = ParameterizedCircuit::new(n, layout.total());
    if let Some(enc) = &encoder {
        circuit.append(enc, &wires, layout.theta.start)?;
    }
    let noise = noise_on(circuit.len(), &channel, &wires);
    circuit.append(&decoder, &wires, layout.phi.start)?;
    if let Some(pool) = &pooling {
        circuit.append(pool, &wires, layout.pi.start)?;
    }

    let mut programs = Vec::with_capacity(spec.n_messages());
    let mut targets = Vec::with_capacity(spec.n_messages());
    for s in 0..spec.n_messages() {
        let msg = Message::from_index(s, spec.n_message_bits);
        // repetition codes copy the bit onto every transmitted wire
        let embedded: Vec<bool> = if spec.pooling {
            vec![msg.bits()[0]; n]
        } else {
            msg.bits().to_vec()
        };
        let initial = basis_embed(&embedded, n)?;
        let target = if spec.pooling {
            msg.bits()[0] as usize
        } else {
            s << (n - spec.n_message_bits)
        };
        programs.push(Program { initial, circuit: circuit.clone(), noise: noise.clone() });
        targets.push(target);
    }

    let readout = if spec.pooling { vec![kept] } else { wires.clone() };
    Ok(Model {
        spec: spec.clone(),
        layout,
        programs,
        readout,
        targets,
        transmitted: wires,
        ideal: None,
    })
}

/// Entangler on each (sender, receiver) pair → message-selected rotations on
/// the senders → channel on senders, idler noise on receivers → joint
/// decoder → readout of every wire.
///
/// Wires `0..P` are senders and `P..2P` receivers; message bits `2k` and
/// `2k+1` act on sender `k`. Each bit owns an always-applied Rot3 followed by
/// a Rot3 applied only when the bit is 1.
pub fn build_ea_model(spec: &TaskSpec) -> Result<Model> {
    ensure_setting(spec, Setting::EaClassical)?;
    let pairs = spec.n_channel_uses;
    let n = 2 * pairs;
    let senders: Vec<usize> = (0..pairs).collect();
    let receivers: Vec<usize> = (pairs..n).collect();
    let all: Vec<usize> = (0..n).collect();
    let channel = spec.channel.build()?;

    let entangler = layered_ansatz(2, spec.entangler_layers)?;
    let decoder = ansatz_or_empty(n, spec.decoder_layers)?;
    let layout = ParamLayout::new(
        6 * spec.n_message_bits,
        decoder.n_params(),
        pairs * entangler.n_params(),
        0,
    );

    let mut programs = Vec::with_capacity(spec.n_messages());
    for s in 0..spec.n_messages() {
        let msg = Message::from_index(s, spec.n_message_bits);
        let mut circuit = ParameterizedCircuit::new(n, layout.total());
        for k in 0..pairs {
            circuit.append(
                &entangler,
                &[senders[k], receivers[k]],
                layout.lambda.start + k * entangler.n_params(),
            )?;
        }
        for (j, &bit) in msg.bits().iter().enumerate() {
            let wire = senders[j / 2];
            let base = layout.theta.start + 6 * j;
            circuit.push(Gate::rot3(wire, base))?;
            if bit {
                circuit.push(Gate::rot3(wire, base + 3))?;
            }
        }
        let pos = circuit.len();
        let mut noise = noise_on(pos, &channel, &senders);
        if spec.idler_noise_p > 0.0 {
            noise.extend(noise_on(pos, &idler_channel(spec.idler_noise_p)?, &receivers));
        }
        circuit.append(&decoder, &all, layout.phi.start)?;
        programs.push(Program {
            initial: DensityMatrix::basis_state(n, 0)?,
            circuit,
            noise,
        });
    }

    Ok(Model {
        spec: spec.clone(),
        layout,
        programs,
        readout: all,
        targets: (0..spec.n_messages()).collect(),
        transmitted: senders,
        ideal: None,
    })
}

/// GHZ (Bell for two qubits) input with wire 0 kept as the reference →
/// encoder on the transmitted wires → channel on each, idler noise on the
/// reference → decoder on the transmitted wires. No measurement.
pub fn build_quantum_model(spec: &TaskSpec) -> Result<Model> {
    ensure_setting(spec, Setting::Quantum)?;
    let n = spec.ghz_size;
    let transmitted: Vec<usize> = (1..n).collect();
    let channel = spec.channel.build()?;

    let encoder = if spec.use_encoder {
        Some(layered_ansatz(n - 1, spec.encoder_layers)?)
    } else {
        None
    };
    let decoder = ansatz_or_empty(n - 1, spec.decoder_layers)?;
    let layout = ParamLayout::new(
        encoder.as_ref().map_or(0, |c| c.n_params()),
        decoder.n_params(),
        0,
        0,
    );

    let mut circuit = ParameterizedCircuit::new(n, layout.total());
    if let Some(enc) = &encoder {
        circuit.append(enc, &transmitted, layout.theta.start)?;
    }
    let pos = circuit.len();
    let mut noise = noise_on(pos, &channel, &transmitted);
    if spec.idler_noise_p > 0.0 {
        noise.extend(noise_on(pos, &idler_channel(spec.idler_noise_p)?, &[0]));
    }
    circuit.append(&decoder, &transmitted, layout.phi.start)?;

    let psi = ghz_vector(n)?;
    let initial = DensityMatrix::pure(&psi)?;
    Ok(Model {
        spec: spec.clone(),
        layout,
        programs: vec![Program { initial: initial.clone(), circuit, noise }],
        readout: Vec::new(),
        targets: Vec::new(),
        transmitted,
        ideal: Some((initial, psi)),
    })
}

/// (|0…0⟩ + |1…1⟩)/√2 as a state vector.
pub fn ghz_vector(n: usize) -> Result<Vec<Complex64>> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!("GHZ state needs ≥ 2 qubits, got {n}")));
    }
    if n > crate::qmath::MAX_QUBITS {
        return Err(Error::InvalidArgument(format!("{n} qubits exceeds the simulator limit")));
    }
    let dim = 1usize << n;
    let mut psi = vec![Complex64::new(0.0, 0.0); dim];
    psi[0] = Complex64::new(FRAC_1_SQRT_2, 0.0);
    psi[dim - 1] = Complex64::new(FRAC_1_SQRT_2, 0.0);
    Ok(psi)
}

pub fn ghz_state(n: usize) -> Result<DensityMatrix> {
    DensityMatrix::pure(&ghz_vector(n)?)
}
