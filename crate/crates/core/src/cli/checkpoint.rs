use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::optim::evaluate_metric;
use crate::tasks::{build_model, ModelParameters, TaskSpec};

use super::config::{parse_f64, parse_list, read_task, Diagnostic, KeyValues};
use super::CliError;

const CHECKPOINT_KEYS: &[&str] = &[
    "task.setting",
    "task.channel.kind",
    "task.channel.p",
    "task.channel.gamma",
    "task.message_bits",
    "task.channel_uses",
    "task.encoder_layers",
    "task.decoder_layers",
    "task.entangler_layers",
    "task.pooling",
    "task.ghz_size",
    "task.idler_noise_p",
    "task.use_encoder",
    "theta",
    "phi",
    "lambda",
    "pi",
];

fn join(values: &[f64]) -> String {
    values.iter().map(|v| format!("{v:?}")).collect::<Vec<_>>().join(", ")
}

/// Config-style text: the full TaskSpec followed by the four parameter
/// arrays. Reals are written in shortest round-trip form.
pub fn format_checkpoint(task: &TaskSpec, params: &ModelParameters) -> String {
    let mut s = String::from("# qcap checkpoint\n");
    let c = &task.channel;
    let _ = writeln!(s, "task.setting = {}", task.setting);
    let _ = writeln!(s, "task.channel.kind = {}", c.kind);
    let _ = writeln!(s, "task.channel.p = {:?}", c.p);
    let _ = writeln!(s, "task.channel.gamma = {:?}", c.gamma);
    let _ = writeln!(s, "task.message_bits = {}", task.n_message_bits);
    let _ = writeln!(s, "task.channel_uses = {}", task.n_channel_uses);
    let _ = writeln!(s, "task.encoder_layers = {}", task.encoder_layers);
    let _ = writeln!(s, "task.decoder_layers = {}", task.decoder_layers);
    let _ = writeln!(s, "task.entangler_layers = {}", task.entangler_layers);
    let _ = writeln!(s, "task.pooling = {}", task.pooling);
    let _ = writeln!(s, "task.ghz_size = {}", task.ghz_size);
    let _ = writeln!(s, "task.idler_noise_p = {:?}", task.idler_noise_p);
    let _ = writeln!(s, "task.use_encoder = {}", task.use_encoder);
    let _ = writeln!(s, "theta = {}", join(&params.theta));
    let _ = writeln!(s, "phi = {}", join(&params.phi));
    let _ = writeln!(s, "lambda = {}", join(&params.lambda));
    let _ = writeln!(s, "pi = {}", join(&params.pi));
    s
}

pub fn parse_checkpoint(text: &str) -> Result<(TaskSpec, ModelParameters), Vec<Diagnostic>> {
    let mut kv = KeyValues::parse(text, CHECKPOINT_KEYS);
    let task = read_task(&mut kv);
    let mut block = |key: &str| kv.require(key, |s| parse_list(s, parse_f64));
    let (theta, phi, lambda, pi) = (block("theta"), block("phi"), block("lambda"), block("pi"));
    let mut diags = kv.diags;
    match (task, theta, phi, lambda, pi) {
        (Some((task, _, _)), Some(theta), Some(phi), Some(lambda), Some(pi)) if diags.is_empty() => {
            let errs = task.validate();
            if errs.is_empty() {
                Ok((task, ModelParameters { theta, phi, lambda, pi }))
            } else {
                diags.extend(errs.iter().map(|v| Diagnostic::general(v.to_string())));
                Err(diags)
            }
        }
        _ => Err(diags),
    }
}

pub fn write_checkpoint(path: &Path, task: &TaskSpec, params: &ModelParameters) -> Result<(), CliError> {
    fs::write(path, format_checkpoint(task, params)).map_err(|e| CliError::io(path, e))
}

pub fn load_checkpoint(path: &Path) -> Result<(TaskSpec, ModelParameters), CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    parse_checkpoint(&text).map_err(CliError::Config)
}

/// Rebuilds the model and scores the stored parameters without retraining.
pub fn evaluate_checkpoint(task: &TaskSpec, params: &ModelParameters) -> Result<f64, CliError> {
    let model = build_model(task).map_err(|e| CliError::Config(vec![Diagnostic::general(e.to_string())]))?;
    let flat = params
        .to_flat(model.layout())
        .map_err(|e| CliError::Config(vec![Diagnostic::general(e.to_string())]))?;
    evaluate_metric(&model, &flat).map_err(|e| CliError::Numerical(e.to_string()))
}
