//! Bundled experiments.
//!
//! Each preset is a complete configuration file compiled into the binary and
//! run at desk scale. The reference experiments used grids of 2¹³ to 2¹⁴
//! points per side; every report carries a note with its own resolution.

use super::{config::parse_config, run, ExperimentConfig, ExperimentReport, HarnessError};
use crate::par::Execution;

#[derive(Debug, Clone, Copy)]
pub struct Preset {
    pub name: &'static str,
    pub summary: &'static str,
    pub toml: &'static str,
}

pub const PRESETS: &[Preset] = &[
    Preset {
        name: "ellipse-convergence",
        summary: "error tables of the shrinking ellipse for BBC and EJZ kernels",
        toml: include_str!("../../presets/ellipse-convergence.toml"),
    },
    Preset {
        name: "crystalline-square",
        summary: "circle relaxing to a square Wulff shape at fixed area",
        toml: include_str!("../../presets/crystalline-square.toml"),
    },
    Preset {
        name: "s-shape",
        summary: "non-convex S-shaped start under four-fold anisotropy",
        toml: include_str!("../../presets/s-shape.toml"),
    },
    Preset {
        name: "particle-on-substrate",
        summary: "square relaxing to its equilibrium shape on a flat substrate",
        toml: include_str!("../../presets/particle-on-substrate.toml"),
    },
    Preset {
        name: "tilted-contact",
        summary: "tilted anisotropy settled with time-step halving",
        toml: include_str!("../../presets/tilted-contact.toml"),
    },
    Preset {
        name: "split",
        summary: "thin film splitting on a patterned substrate",
        toml: include_str!("../../presets/split.toml"),
    },
    Preset {
        name: "merge",
        summary: "two particles merging on a patterned substrate",
        toml: include_str!("../../presets/merge.toml"),
    },
    Preset {
        name: "kernel-info",
        summary: "induced surface tension and mobility of the Gaussian kernel",
        toml: include_str!("../../presets/kernel-info.toml"),
    },
];

pub fn preset(name: &str) -> Result<&'static Preset, HarnessError> {
    PRESETS.iter().find(|p| p.name == name).ok_or_else(|| HarnessError::UnknownPreset(name.to_string()))
}

impl Preset {
    pub fn config(&self, overrides: &[String]) -> Result<ExperimentConfig, HarnessError> {
        parse_config(self.toml, overrides)
    }
}

/// Runs a preset with optional `key=value` overrides.
pub fn run_preset(name: &str, overrides: &[String], exec: Execution) -> Result<ExperimentReport, HarnessError> {
    let config = preset(name)?.config(overrides)?;
    let mut report = run(&config, exec)?;
    report.notes.push(scale_note(&config));
    Ok(report)
}

pub fn scale_note(config: &ExperimentConfig) -> String {
    let n = config.grid.n;
    let side = config.grid.bounds[1] - config.grid.bounds[0];
    format!(
        "desk-scale run: {n} points per side (dx = {}); the reference experiments used 8192 to 16384 points per side",
        side / n as f64
    )
}
