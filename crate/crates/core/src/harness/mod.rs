//! Experiment configuration, preset experiments and report files.
//!
//! A run goes configuration → [`run`] → [`ExperimentReport`] →
//! [`emit_report`]. Presets are bundled configurations of the standard
//! experiments at desk scale.

pub mod config;
pub mod presets;
pub mod report;

use std::f64::consts::TAU;
use std::fmt::Display;
use std::path::{Path, PathBuf};
use std::time::Instant;

use thiserror::Error;

pub use config::{load_config, load_kernel_info_config, parse_config, to_toml, ExperimentConfig, RunConfig};
pub use presets::{preset, run_preset, scale_note, Preset, PRESETS};
pub use report::{emit_report, ExperimentReport, KernelInfo, SeriesRow, Snapshot};

use crate::anisotropy::{normal, Anisotropy, AnisotropyError};
use crate::grid::{GridError, Polygon, ScalarField, Shape};
use crate::kernels::{KernelError, KernelProbe, SampledKernel};
use crate::obstacle::{
    measure_contact_angles, run_algorithm2, run_algorithm3, run_steps, symmetric_difference, ContactAngles, FitBand,
    ObstacleError, ObstacleState, StationarityConfig, Tensions, TimeScalingConfig, TopologyEvent, TopologyKind,
    Trajectory,
};
use crate::par::Execution;
use crate::twophase::{
    optimal_rows, run_convergence, step_algorithm1, step_area_preserving, ConvergenceSpec, TwoPhaseError, TwoPhaseState,
};

/// Environment variable naming the directory that holds run outputs.
pub const OUTPUT_ROOT_ENV: &str = "TDYN_OUTPUT_ROOT";

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("cannot parse configuration: {0}")]
    Parse(String),
    #[error("invalid `{field}`: {message}")]
    Validation { field: String, message: String },
    #[error("unknown preset `{0}`")]
    UnknownPreset(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error(transparent)]
    TwoPhase(#[from] TwoPhaseError),
    #[error(transparent)]
    Obstacle(#[from] ObstacleError),
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error(transparent)]
    Anisotropy(#[from] AnisotropyError),
}

impl HarnessError {
    pub(crate) fn validation(field: &str, message: impl Display) -> Self {
        HarnessError::Validation { field: field.to_string(), message: message.to_string() }
    }

    pub(crate) fn io(path: &Path, source: std::io::Error) -> Self {
        HarnessError::Io { path: path.to_path_buf(), source }
    }
}

/// Directory a configuration writes to.
///
/// Absolute `output.directory` values are used as given. Relative ones, and
/// the run name when no directory is set, are placed under `root`, else under
/// `$TDYN_OUTPUT_ROOT`, else under `runs/`.
pub fn output_dir(config: &ExperimentConfig, root: Option<&Path>) -> PathBuf {
    let base = root
        .map(Path::to_path_buf)
        .or_else(|| std::env::var_os(OUTPUT_ROOT_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("runs"));
    match &config.output.directory {
        Some(d) if d.is_absolute() => d.clone(),
        Some(d) => base.join(d),
        None => base.join(&config.name),
    }
}

/// Runs a validated configuration.
pub fn run(config: &ExperimentConfig, exec: Execution) -> Result<ExperimentReport, HarnessError> {
    config.validate()?;
    let mut report = ExperimentReport::new(&config.name, config.run.label());
    let start = Instant::now();
    match &config.run {
        RunConfig::Convergence { families, sizes, time_steps, final_time } => {
            run_convergence_table(&mut report, families, sizes, time_steps, *final_time, exec)?
        }
        RunConfig::KernelInfo { directions } => kernel_info(config, &mut report, *directions, exec)?,
        _ => run_evolution(config, &mut report, exec)?,
    }
    report.timings.push(("total".into(), start.elapsed().as_secs_f64()));
    Ok(report)
}

/// Keeps every `interval`-th state and the final one.
struct Dumper {
    interval: usize,
    snapshots: Vec<Snapshot>,
}

impl Dumper {
    fn new(interval: usize) -> Self {
        Dumper { interval, snapshots: Vec::new() }
    }

    fn offer(&mut self, step: usize, particle: &ScalarField) {
        if step.is_multiple_of(self.interval) {
            self.snapshots.push(Snapshot { step, particle: particle.clone() });
        }
    }

    fn finish(mut self, step: usize, particle: &ScalarField) -> Vec<Snapshot> {
        if self.snapshots.last().is_none_or(|s| s.step != step) {
            self.snapshots.push(Snapshot { step, particle: particle.clone() });
        }
        self.snapshots
    }
}

fn run_evolution(
    config: &ExperimentConfig,
    report: &mut ExperimentReport,
    exec: Execution,
) -> Result<(), HarnessError> {
    let grid = config.grid.grid()?;
    let gamma = config.anisotropy.as_ref().expect("validated").build("anisotropy")?;
    let spec = config.kernel.as_ref().expect("validated").spec(gamma.clone())?;
    let t = Instant::now();
    let kernel = SampledKernel::build_with(spec, grid, exec)?;
    report.timings.push(("kernel".into(), t.elapsed().as_secs_f64()));
    let shape = config.shape.as_ref().expect("validated").shape()?;
    let particle = shape.rasterize(&grid);
    report.push("kernel", kernel.spec().family.name());
    report.push("n", grid.n());
    report.push("dx", grid.dx());
    report.push("initial_count", particle.count_at_least(0.5));
    let dumper = Dumper::new(config.output.dump_interval);
    let t = Instant::now();
    match &config.run {
        RunConfig::Threshold { dt, steps } => {
            free_run(report, particle, kernel, *dt, FreeRule::Plain { steps: *steps }, dumper)?
        }
        RunConfig::AreaPreserving { dt, max_steps, unchanged_steps } => {
            let rule = FreeRule::AreaPreserving { max_steps: *max_steps, unchanged_steps: *unchanged_steps };
            free_run(report, particle, kernel, *dt, rule, dumper)?;
            wulff_error(report, &gamma)?;
        }
        RunConfig::Obstacle { dt, steps, max_steps, unchanged_steps } => {
            let tensions = config.substrate.clone().expect("validated");
            let state = ObstacleState::new(particle, kernel, tensions, *dt)?;
            let cfg = StationarityConfig { unchanged_steps: *unchanged_steps, max_steps: *max_steps };
            let tr = observe_obstacle(report, dumper, |obs| match steps {
                Some(n) => run_steps(&state, *n, obs),
                None => run_algorithm2(&state, &cfg, obs),
            })?;
            summarize_obstacle(report, &tr, &gamma, config.output.fit_band)?;
        }
        RunConfig::TimeScaling { dt0, tau, max_steps } => {
            let tensions = config.substrate.clone().expect("validated");
            let state = ObstacleState::new(particle, kernel, tensions, *dt0)?;
            let cfg = TimeScalingConfig { dt0: *dt0, tau: *tau, max_steps: *max_steps };
            report.push("tau", cfg.tau_for(state.area()));
            let tr = observe_obstacle(report, dumper, |obs| run_algorithm3(&state, &cfg, obs))?;
            summarize_obstacle(report, &tr, &gamma, config.output.fit_band)?;
        }
        RunConfig::Convergence { .. } | RunConfig::KernelInfo { .. } => unreachable!("dispatched by run"),
    }
    report.timings.push(("evolution".into(), t.elapsed().as_secs_f64()));
    Ok(())
}

enum FreeRule {
    Plain { steps: usize },
    AreaPreserving { max_steps: usize, unchanged_steps: usize },
}

fn free_run(
    report: &mut ExperimentReport,
    particle: ScalarField,
    kernel: SampledKernel,
    dt: f64,
    rule: FreeRule,
    mut dumper: Dumper,
) -> Result<(), HarnessError> {
    let mut state = TwoPhaseState::new(particle, kernel, dt)?;
    let target = state.count();
    let record = |report: &mut ExperimentReport, s: &TwoPhaseState| {
        report.series.push(SeriesRow { step: s.step_index(), dt, count: s.count(), energy: s.energy() });
    };
    record(report, &state);
    dumper.offer(0, state.indicator());
    let (max_steps, unchanged_needed) = match rule {
        FreeRule::Plain { steps } => (steps, usize::MAX),
        FreeRule::AreaPreserving { max_steps, unchanged_steps } => (max_steps, unchanged_steps),
    };
    let area_preserving = unchanged_needed != usize::MAX;
    let mut unchanged = 0;
    while state.step_index() < max_steps {
        let next = if area_preserving { step_area_preserving(&state, target) } else { step_algorithm1(&state) };
        let next = match next {
            Ok(n) => n,
            Err(TwoPhaseError::Extinct { step }) => {
                report.push("extinct_at", step);
                report.notes.push(format!("the particle vanished at step {step}"));
                break;
            }
            Err(e) => return Err(e.into()),
        };
        unchanged = if next.indicator() == state.indicator() { unchanged + 1 } else { 0 };
        state = next;
        record(report, &state);
        dumper.offer(state.step_index(), state.indicator());
        if unchanged >= unchanged_needed {
            break;
        }
    }
    report.push("steps", state.step_index());
    if area_preserving {
        report.push("stationary", unchanged >= unchanged_needed);
    }
    report.push("final_count", state.count());
    report.push("final_area", state.area());
    report.snapshots = dumper.finish(state.step_index(), state.indicator());
    Ok(())
}

/// Relative symmetric difference of the final free particle from the Wulff
/// shape of equal area centred on the particle.
fn wulff_error(report: &mut ExperimentReport, gamma: &Anisotropy) -> Result<(), HarnessError> {
    let particle = &report.snapshots.last().expect("final state kept").particle;
    let grid = *particle.grid();
    let area = particle.count_at_least(0.5) as f64 * grid.cell_area();
    const POINTS: usize = 2048;
    let wulff = Polygon::new((0..POINTS).map(|k| gamma.wulff_point(TAU * k as f64 / POINTS as f64)).collect());
    let wulff = wulff.scaled((area / wulff.area()).sqrt());
    let [px, py] = field_centroid(particle);
    let [wx, wy] = wulff.centroid();
    let placed = wulff.translated(px - wx, py - wy);
    let oracle = Shape::Polygons { polygons: vec![placed.points().to_vec()] }.rasterize(&grid);
    let err = symmetric_difference(particle, &oracle)? / area;
    report.shape_error = Some(err);
    report.push("wulff_shape_error", err);
    Ok(())
}

fn field_centroid(f: &ScalarField) -> [f64; 2] {
    let g = f.grid();
    let n = g.n();
    let (mut sx, mut sy, mut c) = (0.0, 0.0, 0.0);
    for (k, &v) in f.values().iter().enumerate() {
        if v >= 0.5 {
            sx += g.x(k % n);
            sy += g.y(k / n);
            c += 1.0;
        }
    }
    [sx / c, sy / c]
}

/// Runs an obstacle driver while collecting time steps and snapshots.
fn observe_obstacle(
    report: &mut ExperimentReport,
    mut dumper: Dumper,
    drive: impl FnOnce(&mut dyn crate::obstacle::Observer) -> Result<Trajectory, ObstacleError>,
) -> Result<Trajectory, HarnessError> {
    let mut dts = Vec::new();
    let tr = {
        let mut obs = |s: &ObstacleState, _: Option<&TopologyEvent>| {
            dts.push(s.dt());
            dumper.offer(s.step_index(), s.particle());
        };
        drive(&mut obs)?
    };
    for (k, ((&dt, &count), &energy)) in dts.iter().zip(&tr.counts).zip(&tr.energies).enumerate() {
        report.series.push(SeriesRow { step: k, dt, count, energy });
    }
    report.snapshots = dumper.finish(tr.final_state.step_index(), tr.final_state.particle());
    report.events = tr.events.clone();
    Ok(tr)
}

fn summarize_obstacle(
    report: &mut ExperimentReport,
    tr: &Trajectory,
    gamma: &Anisotropy,
    band: FitBand,
) -> Result<(), HarnessError> {
    let fin = &tr.final_state;
    report.push("steps", tr.steps);
    report.push("stationary", tr.stationary);
    report.push("final_dt", fin.dt());
    let halvings: Vec<String> = tr.halvings.iter().map(|(s, dt)| format!("{s}:{dt}")).collect();
    report.push("halvings", halvings.join(" "));
    report.push("final_count", fin.count());
    report.push("count_conserved", tr.counts.iter().all(|&c| c == tr.counts[0]));
    let splits = tr.events.iter().filter(|e| e.kind == TopologyKind::Split).count();
    report.push("split_events", splits);
    report.push("merge_events", tr.events.len() - splits);
    report.push("final_energy", tr.energies.last().copied().unwrap_or(f64::NAN));
    match measure_contact_angles(fin, band) {
        Ok(a) => {
            report.push("contact_left_deg", a.left);
            report.push("contact_right_deg", a.right);
            report.contact_angles = Some(a);
        }
        Err(ObstacleError::NoContact) => report.notes.push("no contact line in the fit band".into()),
        Err(e) => return Err(e.into()),
    }
    let Tensions::Uniform { gamma_sp, gamma_sv } = *fin.tensions() else {
        return Ok(());
    };
    let young = gamma.solve_young(gamma_sp, gamma_sv)?;
    let young = ContactAngles { left: young.left_angle.to_degrees(), right: young.right_angle.to_degrees() };
    report.push("young_left_deg", young.left);
    report.push("young_right_deg", young.right);
    report.young_angles = Some(young);
    match gamma.winterbottom_shape(gamma_sp, gamma_sv, fin.area()) {
        Ok(poly) => {
            // the substrate is translation invariant, so only the horizontal
            // position of the oracle is free
            let dx = field_centroid(fin.particle())[0] - poly.centroid()[0];
            let placed = poly.translated(dx, 0.0);
            let oracle = Shape::Polygons { polygons: vec![placed.points().to_vec()] }.rasterize(fin.grid());
            let err = symmetric_difference(fin.particle(), &oracle)? / fin.area();
            report.push("winterbottom_shape_error", err);
            report.shape_error = Some(err);
        }
        Err(e) => report.notes.push(format!("no equilibrium shape to compare with: {e}")),
    }
    Ok(())
}

fn run_convergence_table(
    report: &mut ExperimentReport,
    families: &[config::FamilyName],
    sizes: &[usize],
    time_steps: &[f64],
    final_time: f64,
    exec: Execution,
) -> Result<(), HarnessError> {
    for family in families {
        let kc = config::KernelConfig {
            family: *family,
            epsilon: None,
            directions: None,
            mobility: None,
            mobility_scale: None,
        };
        let spec =
            ConvergenceSpec { family: kc.family(), sizes: sizes.to_vec(), time_steps: time_steps.to_vec(), final_time };
        let rows = run_convergence(&spec, exec)?;
        for r in optimal_rows(&rows) {
            let key = format!("optimum.{}.n{}", r.kernel, r.n);
            report.push(format!("{key}.dt"), r.dt);
            report.push(format!("{key}.error"), r.error);
            report.push(format!("{key}.order"), r.order.map(|o| o.to_string()).unwrap_or_default());
        }
        report.convergence.extend(rows);
    }
    Ok(())
}

fn kernel_info(
    config: &ExperimentConfig,
    report: &mut ExperimentReport,
    directions: usize,
    exec: Execution,
) -> Result<(), HarnessError> {
    let grid = config.grid.grid()?;
    let gamma = config.anisotropy.as_ref().expect("validated").build("anisotropy")?;
    let spec = config.kernel.as_ref().expect("validated").spec(gamma)?;
    let kernel = SampledKernel::build_with(spec, grid, exec)?;
    let probe = KernelProbe::new(&kernel)?;
    let mut rows = Vec::with_capacity(directions);
    let (mut worst_gamma, mut worst_mobility) = (0.0f64, 0.0f64);
    for k in 0..directions {
        let theta = TAU * k as f64 / directions as f64;
        let n = normal(theta);
        let row = report::DirectionRow {
            theta,
            design_gamma: kernel.design_surface_tension(theta),
            induced_gamma: probe.surface_tension(n),
            design_mobility: kernel.design_mobility(theta),
            induced_mobility: probe.mobility(n)?,
        };
        worst_gamma = worst_gamma.max((row.induced_gamma / row.design_gamma - 1.0).abs());
        worst_mobility = worst_mobility.max((row.induced_mobility / row.design_mobility - 1.0).abs());
        rows.push(row);
    }
    let j0 = grid.first_row_at_or_above(0.0);
    let physical = kernel.physical_field(probe.scale())?;
    let info = KernelInfo {
        family: kernel.spec().family.name().to_string(),
        probe_scale: probe.scale(),
        directions: rows,
        spectral_slice: (0..=grid.n() / 2).map(|k| [grid.frequency(k), kernel.spectral_at(k, 0)]).collect(),
        physical_slice: (0..grid.n()).map(|i| [grid.x(i), physical.get(i, j0)]).collect(),
    };
    report.push("kernel", &info.family);
    report.push("n", grid.n());
    report.push("mass", kernel.mass());
    report.push("probe_scale", info.probe_scale);
    report.push("max_gamma_relative_error", worst_gamma);
    report.push("max_mobility_relative_error", worst_mobility);
    report.kernel_info = Some(info);
    Ok(())
}
