//! Command-line front end for threshold-dynamics experiments.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use threshold_dynamics::harness::{
    emit_report, load_config, load_kernel_info_config, output_dir, preset, run, scale_note, to_toml, ExperimentConfig,
    ExperimentReport, HarnessError, RunConfig, PRESETS,
};
use threshold_dynamics::par::Execution;

#[derive(Parser)]
#[command(name = "tdyn", version, about = "Threshold dynamics for anisotropic curvature flow")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run any configuration file.
    Simulate {
        config: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Run a bundled experiment; lists them when no name is given.
    Preset {
        name: Option<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Run a configuration whose run is a convergence study.
    Converge {
        config: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Tabulate the induced surface tension and mobility of a configuration's kernel.
    KernelInfo {
        config: PathBuf,
        /// Number of directions in the table.
        #[arg(long, default_value_t = 32)]
        directions: usize,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args)]
struct Common {
    /// Override a configuration key, e.g. `--set grid.n=512`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    /// Output directory root; defaults to $TDYN_OUTPUT_ROOT or `runs`.
    #[arg(long)]
    output_root: Option<PathBuf>,
    /// Run on the calling thread only.
    #[arg(long)]
    sequential: bool,
}

impl Common {
    fn execution(&self) -> Execution {
        if self.sequential {
            Execution::Sequential
        } else {
            Execution::default()
        }
    }
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn dispatch(cli: Cli) -> Result<(), HarnessError> {
    match cli.command {
        Command::Simulate { config, common } => {
            let c = load_config(&config, &common.overrides)?;
            execute(&c, &common, Vec::new())
        }
        Command::Preset { name: None, .. } => {
            for p in PRESETS {
                println!("{:<24}{}", p.name, p.summary);
            }
            Ok(())
        }
        Command::Preset { name: Some(name), common } => {
            let c = preset(&name)?.config(&common.overrides)?;
            let note = scale_note(&c);
            execute(&c, &common, vec![note])
        }
        Command::Converge { config, common } => {
            let c = load_config(&config, &common.overrides)?;
            if !matches!(c.run, RunConfig::Convergence { .. }) {
                return Err(HarnessError::Validation {
                    field: "run.algorithm".into(),
                    message: format!("converge needs a convergence run, found `{}`", c.run.label()),
                });
            }
            execute(&c, &common, Vec::new())
        }
        Command::KernelInfo { config, directions, common } => {
            let c = load_kernel_info_config(&config, &common.overrides, directions)?;
            execute(&c, &common, Vec::new())
        }
    }
}

fn execute(config: &ExperimentConfig, common: &Common, notes: Vec<String>) -> Result<(), HarnessError> {
    let mut report = run(config, common.execution())?;
    report.notes.extend(notes);
    let dir = output_dir(config, common.output_root.as_deref());
    let written = emit_report(&report, &dir)?;
    let cfg_path = dir.join("config.toml");
    std::fs::write(&cfg_path, to_toml(config)?).map_err(|e| HarnessError::Io { path: cfg_path, source: e })?;
    print_summary(&report, &dir, written.len() + 1);
    Ok(())
}

fn print_summary(report: &ExperimentReport, dir: &Path, files: usize) {
    println!("{} ({})", report.name, report.algorithm);
    for (q, v) in &report.summary {
        println!("  {q:<32}{v}");
    }
    for note in &report.notes {
        println!("  note: {note}");
    }
    println!("wrote {files} files to {}", dir.display());
}
