use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use qcap::cli::{self, CliError};

#[derive(Parser)]
#[command(name = "qcap", version, about = "Train and evaluate variational channel codes")]
struct Args {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train every sweep point and restart, write CSV results and checkpoints.
    Run {
        config: PathBuf,
        #[arg(long)]
        output_dir: Option<PathBuf>,
        /// Worker threads (falls back to QCAP_WORKERS).
        #[arg(long)]
        workers: Option<usize>,
    },
    /// Report every config problem without running.
    Validate { config: PathBuf },
    /// Turn a results CSV into x, learned, reference columns.
    Curve {
        csv: PathBuf,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

fn execute(cmd: Command) -> Result<(), CliError> {
    match cmd {
        Command::Run { config, output_dir, workers } => {
            let mut cfg = cli::load_config(&config)?;
            if let Some(dir) = output_dir {
                cfg.output_dir = dir;
            }
            let workers = cli::resolve_workers(workers)?;
            let summary = cli::run_experiment(&cfg, workers)?;
            for g in &summary.groups {
                let best: Vec<_> = g.rows.iter().filter(|r| r.best).collect();
                println!("{}: {} runs, {} sweep points", g.csv_path.display(), g.rows.len(), best.len());
                for r in best {
                    let reference = r.reference_rate.map_or("-".to_string(), |v| format!("{v:.4}"));
                    println!("  {} = {}  learned {:.4}  reference {}", r.sweep_parameter, r.sweep_value, r.learned_rate, reference);
                }
            }
            Ok(())
        }
        Command::Validate { config } => {
            cli::load_config(&config)?;
            println!("{}: ok", config.display());
            Ok(())
        }
        Command::Curve { csv, output } => {
            let out = cli::emit_curve(&csv, output.as_deref())?;
            println!("{}", out.display());
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let args = Args::parse();
    match execute(args.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
