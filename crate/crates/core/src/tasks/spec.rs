use std::fmt;
use std::str::FromStr;

use crate::channels::{ChannelKind, ChannelSpec};
use crate::qmath::MAX_QUBITS;
use crate::{Error, Result, Violation};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Setting {
    Classical,
    EaClassical,
    Quantum,
}

impl Setting {
    pub fn as_str(self) -> &'static str {
        match self {
            Setting::Classical => "classical",
            Setting::EaClassical => "ea_classical",
            Setting::Quantum => "quantum",
        }
    }
}

impl fmt::Display for Setting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Setting {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "classical" => Ok(Setting::Classical),
            "ea_classical" | "ea" => Ok(Setting::EaClassical),
            "quantum" => Ok(Setting::Quantum),
            _ => Err(Error::InvalidArgument(format!(
                "unknown setting '{s}' (expected classical, ea_classical or quantum)"
            ))),
        }
    }
}

/// A classical message, most significant bit first.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Message {
    bits: Vec<bool>,
}

impl Message {
    pub fn new(bits: Vec<bool>) -> Self {
        Self { bits }
    }

    pub fn from_index(index: usize, n_bits: usize) -> Self {
        Self {
            bits: (0..n_bits).map(|j| (index >> (n_bits - 1 - j)) & 1 == 1).collect(),
        }
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn index(&self) -> usize {
        self.bits.iter().fold(0, |acc, &b| (acc << 1) | b as usize)
    }
}

/// Declarative description of one communication experiment.
#[derive(Clone, Debug, PartialEq)]
pub struct TaskSpec {
    pub setting: Setting,
    pub channel: ChannelSpec,
    pub n_message_bits: usize,
    pub n_channel_uses: usize,
    pub encoder_layers: usize,
    /// Zero means no decoder circuit.
    pub decoder_layers: usize,
    pub entangler_layers: usize,
    pub pooling: bool,
    pub ghz_size: usize,
    pub idler_noise_p: f64,
    pub use_encoder: bool,
}

pub const DEFAULT_LAYERS: usize = 3;
pub const DEFAULT_ENTANGLER_LAYERS: usize = 2;

impl TaskSpec {
    pub fn classical(channel: ChannelSpec, n_message_bits: usize, n_channel_uses: usize) -> Self {
        Self {
            setting: Setting::Classical,
            channel,
            n_message_bits,
            n_channel_uses,
            encoder_layers: DEFAULT_LAYERS,
            decoder_layers: DEFAULT_LAYERS,
            entangler_layers: DEFAULT_ENTANGLER_LAYERS,
            pooling: false,
            ghz_size: 2,
            idler_noise_p: 0.0,
            use_encoder: true,
        }
    }

    /// Super-dense regime: two message bits per entangled pair.
    pub fn ea_classical(channel: ChannelSpec, n_pairs: usize) -> Self {
        Self {
            setting: Setting::EaClassical,
            n_message_bits: 2 * n_pairs,
            n_channel_uses: n_pairs,
            ..Self::classical(channel, 2 * n_pairs, n_pairs)
        }
    }

    pub fn quantum(channel: ChannelSpec, ghz_size: usize) -> Self {
        Self {
            setting: Setting::Quantum,
            n_message_bits: 0,
            n_channel_uses: ghz_size.saturating_sub(1),
            ghz_size,
            ..Self::classical(channel, 0, 0)
        }
    }

    pub fn n_messages(&self) -> usize {
        match self.setting {
            Setting::Quantum => 0,
            _ => 1 << self.n_message_bits,
        }
    }

    pub fn n_qubits(&self) -> usize {
        match self.setting {
            Setting::Classical => self.n_channel_uses,
            Setting::EaClassical => 2 * self.n_channel_uses,
            Setting::Quantum => self.ghz_size,
        }
    }

    /// Every violated invariant.
    pub fn validate(&self) -> Vec<Violation> {
        let mut errs = Vec::new();
        let mut err = |field: &'static str, msg: String| errs.push(Violation::new(field, msg));
        let unit = 0.0..=1.0;
        if !unit.contains(&self.channel.p) {
            err("channel.p", format!("p = {} is outside [0, 1]", self.channel.p));
        }
        if self.channel.kind == ChannelKind::AmplitudeDamping && !unit.contains(&self.channel.gamma) {
            err("channel.gamma", format!("gamma = {} is outside [0, 1]", self.channel.gamma));
        }
        if !unit.contains(&self.idler_noise_p) {
            err("idler_noise_p", format!("idler_noise_p = {} is outside [0, 1]", self.idler_noise_p));
        }
        if self.use_encoder && self.encoder_layers == 0 {
            err("encoder_layers", "must be ≥ 1 when the encoder is enabled".into());
        }
        match self.setting {
            Setting::Classical => {
                if self.n_message_bits == 0 {
                    err("message_bits", "classical tasks need at least one message bit".into());
                }
                if self.n_channel_uses == 0 {
                    err("channel_uses", "classical tasks need at least one channel use".into());
                }
                if self.pooling {
                    if self.n_channel_uses < 2 {
                        err("pooling", "pooling requires more than one channel use".into());
                    }
                    if self.n_message_bits != 1 {
                        err("pooling", "pooling yields a single output bit, so message_bits must be 1".into());
                    }
                } else if self.n_channel_uses < self.n_message_bits {
                    err(
                        "channel_uses",
                        format!(
                            "channel_uses ({}) must be ≥ message_bits ({}) without pooling",
                            self.n_channel_uses, self.n_message_bits
                        ),
                    );
                }
                if self.idler_noise_p != 0.0 {
                    err("idler_noise_p", "idler noise applies only to ea_classical and quantum tasks".into());
                }
            }
            Setting::EaClassical => {
                if self.n_message_bits == 0 || !self.n_message_bits.is_multiple_of(2) {
                    err(
                        "message_bits",
                        format!(
                            "ea_classical needs an even, nonzero number of message bits (got {})",
                            self.n_message_bits
                        ),
                    );
                } else if self.n_channel_uses != self.n_message_bits / 2 {
                    err(
                        "channel_uses",
                        format!(
                            "ea_classical sends one qubit per pair: channel_uses must be {} for {} message bits",
                            self.n_message_bits / 2,
                            self.n_message_bits
                        ),
                    );
                }
                if self.pooling {
                    err("pooling", "pooling is only available in the classical setting".into());
                }
                if !self.use_encoder {
                    err("use_encoder", "ea_classical encodes messages through the encoder; it must be true".into());
                }
                if self.entangler_layers == 0 {
                    err("entangler_layers", "must be ≥ 1".into());
                }
            }
            Setting::Quantum => {
                if self.ghz_size < 2 {
                    err("ghz_size", format!("must be ≥ 2 (got {})", self.ghz_size));
                } else if self.n_channel_uses != self.ghz_size - 1 {
                    err(
                        "channel_uses",
                        format!(
                            "quantum tasks send ghz_size − 1 = {} qubits, got {}",
                            self.ghz_size - 1,
                            self.n_channel_uses
                        ),
                    );
                }
                if self.pooling {
                    err("pooling", "pooling is only available in the classical setting".into());
                }
            }
        }
        if self.n_qubits() > MAX_QUBITS {
            err(
                "channel_uses",
                format!("task needs {} qubits; at most {MAX_QUBITS} are supported", self.n_qubits()),
            );
        }
        errs
    }

    pub fn ensure_valid(&self) -> Result<()> {
        let errs = self.validate();
        if errs.is_empty() {
            Ok(())
        } else {
            let msgs: Vec<String> = errs.iter().map(|v| v.to_string()).collect();
            Err(Error::InvalidTask(msgs.join("; ")))
        }
    }
}
