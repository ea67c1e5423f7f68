use std::collections::HashMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use crate::channels::{ChannelKind, ChannelSpec};
use crate::optim::{GradientMethod, LossKind, TrainConfig};
use crate::tasks::{Setting, TaskSpec};
use crate::Violation;

/// A config problem, tied to a source line when there is one.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagnostic {
    pub line: Option<usize>,
    pub message: String,
}

impl Diagnostic {
    pub fn at(line: usize, message: impl Into<String>) -> Self {
        Self { line: Some(line), message: message.into() }
    }

    pub fn general(message: impl Into<String>) -> Self {
        Self { line: None, message: message.into() }
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(l) => write!(f, "line {l}: {}", self.message),
            None => f.write_str(&self.message),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SweepParameter {
    P,
    Gamma,
    IdlerP,
}

impl SweepParameter {
    pub fn as_str(self) -> &'static str {
        match self {
            SweepParameter::P => "p",
            SweepParameter::Gamma => "gamma",
            SweepParameter::IdlerP => "p_i",
        }
    }

    pub fn apply(self, task: &mut TaskSpec, value: f64) {
        match self {
            SweepParameter::P => task.channel.p = value,
            SweepParameter::Gamma => task.channel.gamma = value,
            SweepParameter::IdlerP => task.idler_noise_p = value,
        }
    }

    pub fn read(self, task: &TaskSpec) -> f64 {
        match self {
            SweepParameter::P => task.channel.p,
            SweepParameter::Gamma => task.channel.gamma,
            SweepParameter::IdlerP => task.idler_noise_p,
        }
    }
}

impl fmt::Display for SweepParameter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SweepParameter {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "p" => Ok(SweepParameter::P),
            "gamma" => Ok(SweepParameter::Gamma),
            "p_i" => Ok(SweepParameter::IdlerP),
            _ => Err(format!("unknown sweep parameter '{s}' (expected p, gamma or p_i)")),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Sweep {
    pub parameter: SweepParameter,
    /// Empty means a single run at the task's own value.
    pub values: Vec<f64>,
}

/// A parsed experiment: task template, training settings, sweep grid.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub task: TaskSpec,
    /// Quantum GHZ family; one entry per size, each producing its own results file.
    pub ghz_sizes: Vec<usize>,
    pub train: TrainConfig,
    pub sweep: Option<Sweep>,
    pub restarts: usize,
    pub output_dir: PathBuf,
    lines: HashMap<String, usize>,
    explicit_uses: bool,
}

pub const DEFAULT_RESTARTS: usize = 3;

/// One training job of an experiment.
#[derive(Clone, Debug, PartialEq)]
pub struct RunPlan {
    pub ghz_size: Option<usize>,
    pub sweep_value: f64,
    pub restart: usize,
    pub seed: u64,
    pub task: TaskSpec,
}

impl ExperimentConfig {
    pub fn new(task: TaskSpec, train: TrainConfig) -> Self {
        Self {
            ghz_sizes: vec![task.ghz_size],
            task,
            train,
            sweep: None,
            restarts: DEFAULT_RESTARTS,
            output_dir: PathBuf::from("results"),
            lines: HashMap::new(),
            explicit_uses: false,
        }
    }

    fn line_of(&self, key: &str) -> Option<usize> {
        self.lines.get(key).copied()
    }

    fn located(&self, key: &str, message: String) -> Diagnostic {
        Diagnostic { line: self.line_of(key), message: format!("{key}: {message}") }
    }

    pub fn sweep_parameter(&self) -> SweepParameter {
        self.sweep.as_ref().map_or(SweepParameter::P, |s| s.parameter)
    }

    /// Sweep values, or the single fixed value of the swept parameter.
    pub fn sweep_values(&self) -> Vec<f64> {
        match &self.sweep {
            Some(s) if !s.values.is_empty() => s.values.clone(),
            _ => vec![self.sweep_parameter().read(&self.task)],
        }
    }

    /// Task template for one GHZ size.
    pub fn task_for(&self, ghz_size: Option<usize>) -> TaskSpec {
        let mut t = self.task.clone();
        if let Some(n) = ghz_size {
            t.ghz_size = n;
            if !self.explicit_uses {
                t.n_channel_uses = n.saturating_sub(1);
            }
        }
        t
    }

    pub fn is_ghz_family(&self) -> bool {
        self.task.setting == Setting::Quantum && self.ghz_sizes.len() > 1
    }

    pub fn groups(&self) -> Vec<Option<usize>> {
        if self.task.setting == Setting::Quantum {
            self.ghz_sizes.iter().map(|&n| Some(n)).collect()
        } else {
            vec![None]
        }
    }

    /// Every job in deterministic (group, sweep value, restart) order.
    pub fn plans(&self) -> Vec<RunPlan> {
        let mut out = Vec::new();
        for group in self.groups() {
            for value in self.sweep_values() {
                let mut task = self.task_for(group);
                self.sweep_parameter().apply(&mut task, value);
                for r in 0..self.restarts {
                    out.push(RunPlan {
                        ghz_size: group,
                        sweep_value: value,
                        restart: r,
                        seed: self.train.seed.wrapping_add(r as u64),
                        task: task.clone(),
                    });
                }
            }
        }
        out
    }

    /// All invariant violations, without running anything.
    pub fn validate(&self) -> Vec<Diagnostic> {
        let mut diags = Vec::new();
        if self.restarts == 0 {
            diags.push(self.located("restarts", "must be ≥ 1".into()));
        }
        if self.ghz_sizes.is_empty() {
            diags.push(self.located("task.ghz_size", "needs at least one size".into()));
        }
        let param = self.sweep_parameter();
        if let Some(sweep) = &self.sweep {
            for &v in &sweep.values {
                if !(0.0..=1.0).contains(&v) {
                    diags.push(self.located("sweep.values", format!("{v} is outside [0, 1]")));
                }
            }
            if param == SweepParameter::Gamma && self.task.channel.kind != ChannelKind::AmplitudeDamping {
                diags.push(self.located(
                    "sweep.parameter",
                    format!("gamma only exists for amplitude_damping, not {}", self.task.channel.kind),
                ));
            }
            if param == SweepParameter::IdlerP && self.task.setting == Setting::Classical {
                diags.push(self.located(
                    "sweep.parameter",
                    "p_i (idler noise) is not available for classical tasks".into(),
                ));
            }
        }

        let mut push_violation = |v: &Violation, seen: &mut Vec<String>| {
            let key = if ["learning_rate", "beta1", "beta2", "epsilon", "fd_step", "init_scale", "loss", "gradient_method"]
                .contains(&v.field)
            {
                format!("train.{}", v.field)
            } else {
                format!("task.{}", v.field)
            };
            let d = self.located(&key, v.message.clone());
            let text = d.to_string();
            if !seen.contains(&text) {
                seen.push(text);
                diags.push(d);
            }
        };
        let mut seen = Vec::new();
        // out-of-range sweep values are reported above; check the task at
        // every remaining value so no invalid combination slips through
        let values: Vec<Option<f64>> = match &self.sweep {
            Some(s) if !s.values.is_empty() => {
                s.values.iter().filter(|v| (0.0..=1.0).contains(*v)).map(|&v| Some(v)).collect()
            }
            _ => vec![None],
        };
        for group in self.groups() {
            for value in &values {
                let mut task = self.task_for(group);
                if let Some(v) = value {
                    param.apply(&mut task, *v);
                }
                for v in task.validate() {
                    push_violation(&v, &mut seen);
                }
            }
            for v in self.train.validate(Some(self.task.setting)) {
                push_violation(&v, &mut seen);
            }
        }
        diags
    }
}

struct Entry {
    line: usize,
    value: String,
}

const KNOWN_KEYS: &[&str] = &[
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
    "train.steps",
    "train.learning_rate",
    "train.beta1",
    "train.beta2",
    "train.epsilon",
    "train.seed",
    "train.loss",
    "train.gradient_method",
    "train.fd_step",
    "train.init_scale",
    "train.warmup",
    "sweep.parameter",
    "sweep.values",
    "restarts",
    "output_dir",
];

/// `key = value` lines; `#` starts a comment.
pub(crate) struct KeyValues {
    entries: HashMap<String, Entry>,
    pub(crate) diags: Vec<Diagnostic>,
}

impl KeyValues {
    pub(crate) fn parse(text: &str, known: &[&str]) -> Self {
        let mut entries: HashMap<String, Entry> = HashMap::new();
        let mut diags = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let Some((key, value)) = content.split_once('=') else {
                diags.push(Diagnostic::at(line, format!("expected 'key = value', found '{content}'")));
                continue;
            };
            let key = key.trim();
            if !known.contains(&key) {
                diags.push(Diagnostic::at(line, format!("unknown key '{key}'")));
                continue;
            }
            if let Some(prev) = entries.get(key) {
                diags.push(Diagnostic::at(line, format!("duplicate key '{key}' (first set on line {})", prev.line)));
                continue;
            }
            entries.insert(key.to_string(), Entry { line, value: value.trim().to_string() });
        }
        Self { entries, diags }
    }

    pub(crate) fn lines(&self) -> HashMap<String, usize> {
        self.entries.iter().map(|(k, e)| (k.clone(), e.line)).collect()
    }

    pub(crate) fn has(&self, key: &str) -> bool {
        self.entries.contains_key(key)
    }

    /// Typed value of `key`, recording a diagnostic on a parse failure.
    pub(crate) fn get<T>(&mut self, key: &str, parse: impl Fn(&str) -> Result<T, String>) -> Option<T> {
        let entry = self.entries.get(key)?;
        match parse(&entry.value) {
            Ok(v) => Some(v),
            Err(e) => {
                self.diags.push(Diagnostic::at(entry.line, format!("{key}: {e}")));
                None
            }
        }
    }

    pub(crate) fn require<T>(&mut self, key: &str, parse: impl Fn(&str) -> Result<T, String>) -> Option<T> {
        if !self.has(key) {
            self.diags.push(Diagnostic::general(format!("missing required key '{key}'")));
            return None;
        }
        self.get(key, parse)
    }
}

pub(crate) fn parse_f64(s: &str) -> Result<f64, String> {
    s.parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| format!("'{s}' is not a finite number"))
}

pub(crate) fn parse_usize(s: &str) -> Result<usize, String> {
    s.parse().map_err(|_| format!("'{s}' is not a non-negative integer"))
}

pub(crate) fn parse_u64(s: &str) -> Result<u64, String> {
    s.parse().map_err(|_| format!("'{s}' is not a non-negative integer"))
}

pub(crate) fn parse_bool(s: &str) -> Result<bool, String> {
    match s {
        "true" | "yes" | "on" | "1" => Ok(true),
        "false" | "no" | "off" | "0" => Ok(false),
        _ => Err(format!("'{s}' is not a boolean")),
    }
}

pub(crate) fn parse_list<T>(s: &str, item: impl Fn(&str) -> Result<T, String>) -> Result<Vec<T>, String> {
    let inner = s.trim().trim_start_matches('[').trim_end_matches(']').trim();
    if inner.is_empty() {
        return Ok(Vec::new());
    }
    inner.split(',').map(|x| item(x.trim())).collect()
}

pub(crate) fn parse_enum<T: FromStr>(s: &str) -> Result<T, String>
where
    T::Err: fmt::Display,
{
    s.parse::<T>().map_err(|e| e.to_string())
}

/// Reads the `task.*` keys into a TaskSpec; `None` if a required key is
/// missing or malformed (diagnostics are recorded in `kv`).
pub(crate) fn read_task(kv: &mut KeyValues) -> Option<(TaskSpec, Vec<usize>, bool)> {
    let setting = kv.require("task.setting", parse_enum::<Setting>);
    let kind = kv.require("task.channel.kind", parse_enum::<ChannelKind>);
    let p = kv.get("task.channel.p", parse_f64).unwrap_or(0.0);
    let gamma = kv.get("task.channel.gamma", parse_f64).unwrap_or(0.0);
    let bits = kv.get("task.message_bits", parse_usize);
    let uses = kv.get("task.channel_uses", parse_usize);
    let ghz = kv.get("task.ghz_size", |s| parse_list(s, parse_usize));
    let encoder = kv.get("task.encoder_layers", parse_usize);
    let decoder = kv.get("task.decoder_layers", parse_usize);
    let entangler = kv.get("task.entangler_layers", parse_usize);
    let pooling = kv.get("task.pooling", parse_bool);
    let idler = kv.get("task.idler_noise_p", parse_f64);
    let use_encoder = kv.get("task.use_encoder", parse_bool);

    let (setting, kind) = (setting?, kind?);
    let channel = ChannelSpec { kind, p, gamma };
    let ghz_sizes = ghz.unwrap_or_else(|| vec![2]);
    let mut task = match setting {
        Setting::Classical => {
            let b = bits.unwrap_or(1);
            TaskSpec::classical(channel, b, uses.unwrap_or(b))
        }
        Setting::EaClassical => {
            let pairs = uses.or(bits.map(|b| b / 2)).unwrap_or(1);
            let mut t = TaskSpec::ea_classical(channel, pairs);
            if let Some(b) = bits {
                t.n_message_bits = b;
            }
            t
        }
        Setting::Quantum => {
            let mut t = TaskSpec::quantum(channel, ghz_sizes.first().copied().unwrap_or(2));
            if let Some(u) = uses {
                t.n_channel_uses = u;
            }
            t
        }
    };
    if let Some(v) = encoder {
        task.encoder_layers = v;
    }
    if let Some(v) = decoder {
        task.decoder_layers = v;
    }
    if let Some(v) = entangler {
        task.entangler_layers = v;
    }
    if let Some(v) = pooling {
        task.pooling = v;
    }
    if let Some(v) = idler {
        task.idler_noise_p = v;
    }
    if let Some(v) = use_encoder {
        task.use_encoder = v;
    }
    Some((task, ghz_sizes, uses.is_some()))
}

/// Parses and validates an experiment config, reporting every problem.
pub fn parse_config(text: &str) -> Result<ExperimentConfig, Vec<Diagnostic>> {
    let mut kv = KeyValues::parse(text, KNOWN_KEYS);
    let task = read_task(&mut kv);

    let defaults = TrainConfig::default();
    let mut train = defaults.clone();
    train.steps = kv.get("train.steps", parse_usize).unwrap_or(defaults.steps);
    train.learning_rate = kv.get("train.learning_rate", parse_f64).unwrap_or(defaults.learning_rate);
    train.beta1 = kv.get("train.beta1", parse_f64).unwrap_or(defaults.beta1);
    train.beta2 = kv.get("train.beta2", parse_f64).unwrap_or(defaults.beta2);
    train.epsilon = kv.get("train.epsilon", parse_f64).unwrap_or(defaults.epsilon);
    train.seed = kv.get("train.seed", parse_u64).unwrap_or(defaults.seed);
    train.loss = kv.get("train.loss", parse_enum::<LossKind>).or(defaults.loss);
    train.gradient_method = kv
        .get("train.gradient_method", parse_enum::<GradientMethod>)
        .unwrap_or(defaults.gradient_method);
    train.fd_step = kv.get("train.fd_step", parse_f64).unwrap_or(defaults.fd_step);
    train.init_scale = kv.get("train.init_scale", parse_f64).unwrap_or(defaults.init_scale);
    train.warmup = kv.get("train.warmup", parse_bool).unwrap_or(defaults.warmup);

    let sweep_param = kv.get("sweep.parameter", |s| s.parse::<SweepParameter>());
    let sweep_values = kv.get("sweep.values", |s| parse_list(s, parse_f64));
    let sweep = match (sweep_param, sweep_values) {
        (Some(parameter), values) => Some(Sweep { parameter, values: values.unwrap_or_default() }),
        (None, Some(values)) if !kv.has("sweep.parameter") => Some(Sweep { parameter: SweepParameter::P, values }),
        _ => None,
    };
    let restarts = kv.get("restarts", parse_usize).unwrap_or(DEFAULT_RESTARTS);
    let output_dir = kv.get("output_dir", |s| Ok(PathBuf::from(s))).unwrap_or_else(|| PathBuf::from("results"));

    let Some((task, ghz_sizes, explicit_uses)) = task else {
        return Err(kv.diags);
    };
    let config = ExperimentConfig {
        task,
        ghz_sizes,
        train,
        sweep,
        restarts,
        output_dir,
        lines: kv.lines(),
        explicit_uses,
    };
    let mut diags = kv.diags;
    diags.extend(config.validate());
    if diags.is_empty() {
        Ok(config)
    } else {
        Err(diags)
    }
}

/// Every diagnostic for a config text; empty when it is valid.
pub fn validate_config(text: &str) -> Vec<Diagnostic> {
    parse_config(text).err().unwrap_or_default()
}
