#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use qcap::channels::{ChannelKind, ChannelSpec};
use qcap::optim::{loss_gradient, GradientMethod, LossKind, DEFAULT_FD_STEP};
use qcap::tasks::{build_model, Model, Setting, TaskSpec};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_channel(rng: &mut ChaCha8Rng) -> ChannelSpec {
    let kind = ChannelKind::ALL[rng.gen_range(0..ChannelKind::ALL.len())];
    ChannelSpec { kind, p: rng.gen_range(0.0..=1.0), gamma: rng.gen_range(0.0..=1.0) }
}

/// A small random model of the given setting, exercising pooling,
/// idler noise and the GHZ family along the way.
pub fn random_task(setting: Setting, rng: &mut ChaCha8Rng) -> TaskSpec {
    let channel = random_channel(rng);
    let mut t = match setting {
        Setting::Classical => {
            let uses = rng.gen_range(1..=3);
            let mut t = TaskSpec::classical(channel, 1, uses);
            t.pooling = uses > 1 && rng.gen_bool(0.5);
            t.use_encoder = rng.gen_bool(0.8);
            t
        }
        Setting::EaClassical => {
            let mut t = TaskSpec::ea_classical(channel, 1);
            t.entangler_layers = rng.gen_range(1..=2);
            if rng.gen_bool(0.5) {
                t.idler_noise_p = rng.gen_range(0.0..0.3);
            }
            t
        }
        Setting::Quantum => TaskSpec::quantum(channel, rng.gen_range(2..=3)),
    };
    t.encoder_layers = rng.gen_range(1..=2);
    t.decoder_layers = rng.gen_range(1..=2);
    t
}

pub fn random_model(setting: Setting, rng: &mut ChaCha8Rng) -> (Model, Vec<f64>) {
    let model = build_model(&random_task(setting, rng)).unwrap();
    let params = (0..model.n_params()).map(|_| rng.gen_range(-3.2..3.2)).collect();
    (model, params)
}

/// Shift-rule loss for the setting: cross-entropy, or infidelity for quantum runs.
pub fn linear_loss(setting: Setting) -> LossKind {
    match setting {
        Setting::Quantum => LossKind::Infidelity,
        _ => LossKind::CrossEntropy,
    }
}

/// Largest |shift − difference| over every parameter.
pub fn shift_vs_difference(model: &Model, loss: LossKind, params: &[f64]) -> f64 {
    let ps = loss_gradient(model, loss, params, GradientMethod::ParameterShift, DEFAULT_FD_STEP).unwrap();
    let cd = loss_gradient(model, loss, params, GradientMethod::CentralDifference, DEFAULT_FD_STEP).unwrap();
    ps.iter().zip(&cd).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
}
