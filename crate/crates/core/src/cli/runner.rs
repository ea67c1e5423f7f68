use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use crate::metrics::ReferenceKind;
use crate::optim::{train, TrainReport};
use crate::tasks::{build_model, Setting};

use super::checkpoint::write_checkpoint;
use super::config::{Diagnostic, ExperimentConfig, RunPlan};
use super::CliError;

pub const CSV_HEADER: [&str; 12] = [
    "setting",
    "channel_kind",
    "sweep_parameter",
    "sweep_value",
    "restart_seed",
    "steps",
    "final_loss",
    "learned_rate_bits",
    "reference_rate_bits",
    "reference_kind",
    "best_flag",
    "wall_time_s",
];

/// One CSV row.
#[derive(Clone, Debug, PartialEq)]
pub struct RunRow {
    pub setting: Setting,
    pub channel_kind: String,
    pub sweep_parameter: String,
    pub sweep_value: f64,
    pub restart_seed: u64,
    pub steps: usize,
    pub final_loss: Option<f64>,
    pub learned_rate: f64,
    pub reference_rate: Option<f64>,
    pub reference_kind: ReferenceKind,
    pub best: bool,
    pub wall_time: f64,
}

impl RunRow {
    fn fields(&self) -> [String; 12] {
        let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        [
            self.setting.to_string(),
            self.channel_kind.clone(),
            self.sweep_parameter.clone(),
            self.sweep_value.to_string(),
            self.restart_seed.to_string(),
            self.steps.to_string(),
            opt(self.final_loss),
            self.learned_rate.to_string(),
            opt(self.reference_rate),
            self.reference_kind.to_string(),
            self.best.to_string(),
            format!("{:.3}", self.wall_time),
        ]
    }
}

/// Results of one output group (a GHZ size, or the whole experiment).
#[derive(Clone, Debug)]
pub struct GroupResult {
    pub ghz_size: Option<usize>,
    pub csv_path: PathBuf,
    pub rows: Vec<RunRow>,
    pub checkpoints: Vec<PathBuf>,
}

#[derive(Clone, Debug)]
pub struct RunSummary {
    pub groups: Vec<GroupResult>,
}

/// Worker count: explicit flag, then QCAP_WORKERS, then rayon's default.
pub fn resolve_workers(flag: Option<usize>) -> Result<Option<usize>, CliError> {
    let n = match flag {
        Some(n) => Some(n),
        None => match std::env::var("QCAP_WORKERS") {
            Ok(s) if !s.trim().is_empty() => Some(s.trim().parse::<usize>().map_err(|_| {
                CliError::Config(vec![Diagnostic::general(format!("QCAP_WORKERS='{s}' is not a worker count"))])
            })?),
            _ => None,
        },
    };
    if n == Some(0) {
        return Err(CliError::Config(vec![Diagnostic::general("worker count must be ≥ 1")]));
    }
    Ok(n)
}

fn run_one(plan: &RunPlan, config: &ExperimentConfig) -> Result<TrainReport, CliError> {
    let model = build_model(&plan.task).map_err(|e| {
        CliError::Config(vec![Diagnostic::general(format!(
            "{}/{}: {e}",
            plan.task.setting, plan.task.channel.kind
        ))])
    })?;
    let mut train_cfg = config.train.clone();
    train_cfg.seed = plan.seed;
    train(&model, &train_cfg).map_err(|e| {
        CliError::Numerical(format!(
            "{} = {} (seed {}): {e}",
            config.sweep_parameter(),
            plan.sweep_value,
            plan.seed
        ))
    })
}

fn file_stem(ghz: Option<usize>, family: bool) -> String {
    match ghz {
        Some(n) if family => format!("_ghz{n}"),
        _ => String::new(),
    }
}

fn value_tag(v: f64) -> String {
    format!("{v}").replace('-', "m")
}

/// Trains every (group, sweep value, restart) job on a bounded pool and
/// writes CSVs and best-restart checkpoints in deterministic order.
pub fn run_experiment(config: &ExperimentConfig, workers: Option<usize>) -> Result<RunSummary, CliError> {
    let diags = config.validate();
    if !diags.is_empty() {
        return Err(CliError::Config(diags));
    }
    let plans = config.plans();
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = workers {
        builder = builder.num_threads(n);
    }
    let pool = builder
        .build()
        .map_err(|e| CliError::Numerical(format!("cannot start worker pool: {e}")))?;
    let reports: Vec<Result<TrainReport, CliError>> =
        pool.install(|| plans.par_iter().map(|p| run_one(p, config)).collect());

    fs::create_dir_all(&config.output_dir).map_err(|e| CliError::io(&config.output_dir, e))?;
    let family = config.is_ghz_family();
    let mut groups = Vec::new();
    let mut results = plans.iter().zip(reports);
    for ghz in config.groups() {
        let stem = file_stem(ghz, family);
        let mut rows = Vec::new();
        let mut checkpoints = Vec::new();
        for value in config.sweep_values() {
            let mut batch = Vec::with_capacity(config.restarts);
            for _ in 0..config.restarts {
                let (plan, report) = results.next().expect("one report per plan");
                debug_assert!(plan.ghz_size == ghz && plan.sweep_value == value);
                batch.push((plan, report?));
            }
            // first restart wins ties
            let best = batch
                .iter()
                .enumerate()
                .fold(0, |b, (i, (_, r))| if r.learned_rate > batch[b].1.learned_rate { i } else { b });
            for (i, (plan, report)) in batch.iter().enumerate() {
                rows.push(RunRow {
                    setting: plan.task.setting,
                    channel_kind: plan.task.channel.kind.to_string(),
                    sweep_parameter: match &config.sweep {
                        Some(s) if !s.values.is_empty() => s.parameter.to_string(),
                        _ => "none".to_string(),
                    },
                    sweep_value: value,
                    restart_seed: plan.seed,
                    steps: config.train.steps,
                    final_loss: report.final_loss(),
                    learned_rate: report.learned_rate,
                    reference_rate: report.reference.value,
                    reference_kind: report.reference.kind,
                    best: i == best,
                    wall_time: report.wall_time,
                });
            }
            let (plan, report) = &batch[best];
            let path = config.output_dir.join(format!(
                "checkpoint{stem}_{}{}.txt",
                config.sweep_parameter(),
                value_tag(value)
            ));
            write_checkpoint(&path, &plan.task, &report.final_params)?;
            checkpoints.push(path);
        }
        let csv_path = config.output_dir.join(format!("results{stem}.csv"));
        write_rows(&csv_path, &rows)?;
        groups.push(GroupResult { ghz_size: ghz, csv_path, rows, checkpoints });
    }
    Ok(RunSummary { groups })
}

pub fn write_rows(path: &Path, rows: &[RunRow]) -> Result<(), CliError> {
    let mut w = csv::Writer::from_path(path).map_err(|e| CliError::io(path, e))?;
    w.write_record(CSV_HEADER).map_err(|e| CliError::io(path, e))?;
    for row in rows {
        w.write_record(row.fields()).map_err(|e| CliError::io(path, e))?;
    }
    w.flush().map_err(|e| CliError::io(path, e))
}
