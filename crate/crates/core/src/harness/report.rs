//! Run results and the files they are written to.
//!
//! Everything except `timings.csv` depends only on the configuration, so two
//! runs of the same configuration produce byte-identical files.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use super::HarnessError;
use crate::grid::io::{write_pgm, write_points_csv};
use crate::grid::{subgrid_extract, ScalarField};
use crate::obstacle::{ContactAngles, TopologyEvent};
use crate::twophase::ConvergenceRow;

/// One row of the energy series.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SeriesRow {
    pub step: usize,
    pub dt: f64,
    pub count: usize,
    pub energy: f64,
}

/// Particle indicator at one step.
#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub step: usize,
    pub particle: ScalarField,
}

/// Induced and designed kernel quantities per direction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DirectionRow {
    pub theta: f64,
    pub design_gamma: f64,
    pub induced_gamma: f64,
    pub design_mobility: f64,
    pub induced_mobility: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct KernelInfo {
    pub family: String,
    /// Time scale at which the physical samples were taken.
    pub probe_scale: f64,
    pub directions: Vec<DirectionRow>,
    /// `(frequency, multiplier)` along the `ξ_x` axis at unit time.
    pub spectral_slice: Vec<[f64; 2]>,
    /// `(x, K)` along the `x` axis at the probe scale.
    pub physical_slice: Vec<[f64; 2]>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ExperimentReport {
    pub name: String,
    pub algorithm: String,
    /// Ordered `quantity,value` rows of `report.csv`.
    pub summary: Vec<(String, String)>,
    pub convergence: Vec<ConvergenceRow>,
    pub contact_angles: Option<ContactAngles>,
    pub young_angles: Option<ContactAngles>,
    /// Symmetric difference from the equilibrium shape, relative to the area.
    pub shape_error: Option<f64>,
    pub series: Vec<SeriesRow>,
    pub events: Vec<TopologyEvent>,
    pub snapshots: Vec<Snapshot>,
    pub kernel_info: Option<KernelInfo>,
    /// Wall-clock seconds per labelled phase.
    pub timings: Vec<(String, f64)>,
    pub notes: Vec<String>,
}

impl ExperimentReport {
    pub fn new(name: &str, algorithm: &str) -> Self {
        ExperimentReport { name: name.to_string(), algorithm: algorithm.to_string(), ..Default::default() }
    }

    pub fn push(&mut self, quantity: impl Into<String>, value: impl ToString) {
        self.summary.push((quantity.into(), value.to_string()));
    }

    /// Value of a summary row.
    pub fn get(&self, quantity: &str) -> Option<&str> {
        self.summary.iter().find(|(q, _)| q == quantity).map(|(_, v)| v.as_str())
    }
}

/// Writes every artifact of `report` into `dir`, creating it if needed.
/// Returns the written paths in order.
pub fn emit_report(report: &ExperimentReport, dir: &Path) -> Result<Vec<PathBuf>, HarnessError> {
    let mut written = Vec::new();
    let snap_dir = dir.join("snapshots");
    let iface_dir = dir.join("interfaces");
    for d in [dir, &snap_dir, &iface_dir] {
        fs::create_dir_all(d).map_err(|e| HarnessError::io(d, e))?;
    }
    let mut put = |name: &str, text: String| -> Result<(), HarnessError> {
        let path = dir.join(name);
        fs::write(&path, text).map_err(|e| HarnessError::io(&path, e))?;
        written.push(path);
        Ok(())
    };
    put("report.csv", report_csv(report))?;
    put("energy.csv", energy_csv(report))?;
    put("events.jsonl", events_jsonl(report)?)?;
    if !report.convergence.is_empty() {
        put("convergence.csv", convergence_csv(&report.convergence))?;
    }
    if let Some(info) = &report.kernel_info {
        put("kernel_directions.csv", directions_csv(info))?;
        put("kernel_spectral.csv", pairs_csv("frequency,multiplier", &info.spectral_slice))?;
        put("kernel_physical.csv", pairs_csv("x,value", &info.physical_slice))?;
    }
    put("timings.csv", timings_csv(report))?;
    put("notes.txt", report.notes.iter().map(|n| format!("{n}\n")).collect())?;
    for snap in &report.snapshots {
        let pgm = snap_dir.join(format!("step_{:06}.pgm", snap.step));
        write_pgm(&snap.particle, 0.0, 1.0, &pgm).map_err(|e| HarnessError::io(&pgm, e))?;
        written.push(pgm);
        let csv = iface_dir.join(format!("step_{:06}.csv", snap.step));
        let crossings = subgrid_extract(&snap.particle, 0.5).crossings;
        write_points_csv(&crossings, &csv).map_err(|e| HarnessError::io(&csv, e))?;
        written.push(csv);
    }
    Ok(written)
}

fn report_csv(r: &ExperimentReport) -> String {
    let mut s = String::from("quantity,value\n");
    for (q, v) in &r.summary {
        writeln!(s, "{},{}", csv_field(q), csv_field(v)).expect("string write");
    }
    s
}

fn energy_csv(r: &ExperimentReport) -> String {
    let mut s = String::from("step,dt,count,energy\n");
    for row in &r.series {
        writeln!(s, "{},{},{},{}", row.step, row.dt, row.count, row.energy).expect("string write");
    }
    s
}

fn events_jsonl(r: &ExperimentReport) -> Result<String, HarnessError> {
    let mut s = String::new();
    for e in &r.events {
        s.push_str(&serde_json::to_string(e).map_err(|e| HarnessError::Parse(e.to_string()))?);
        s.push('\n');
    }
    Ok(s)
}

fn convergence_csv(rows: &[ConvergenceRow]) -> String {
    let mut s = String::from("kernel,n,dx,dt,steps,error,order,extinct_at\n");
    for r in rows {
        let order = r.order.map(|o| o.to_string()).unwrap_or_default();
        let extinct = r.extinct_at.map(|e| e.to_string()).unwrap_or_default();
        writeln!(s, "{},{},{},{},{},{},{},{}", r.kernel, r.n, r.dx, r.dt, r.steps, r.error, order, extinct)
            .expect("string write");
    }
    s
}

fn directions_csv(info: &KernelInfo) -> String {
    let mut s = String::from("theta,design_gamma,induced_gamma,design_mobility,induced_mobility\n");
    for d in &info.directions {
        writeln!(s, "{},{},{},{},{}", d.theta, d.design_gamma, d.induced_gamma, d.design_mobility, d.induced_mobility)
            .expect("string write");
    }
    s
}

fn pairs_csv(header: &str, rows: &[[f64; 2]]) -> String {
    let mut s = format!("{header}\n");
    for p in rows {
        writeln!(s, "{},{}", p[0], p[1]).expect("string write");
    }
    s
}

fn timings_csv(r: &ExperimentReport) -> String {
    let mut s = String::from("phase,seconds\n");
    for (label, secs) in &r.timings {
        writeln!(s, "{},{secs:.3}", csv_field(label)).expect("string write");
    }
    for row in &r.convergence {
        writeln!(s, "{} n={} dt={},{:.3}", row.kernel, row.n, row.dt, row.wall_seconds).expect("string write");
    }
    s
}

fn csv_field(v: &str) -> String {
    if v.contains([',', '"', '\n']) {
        format!("\"{}\"", v.replace('"', "\"\""))
    } else {
        v.to_string()
    }
}
