//! Experiment configuration.
//!
//! Configurations are TOML documents. Every table rejects unknown keys, and
//! `key.path=value` overrides are applied to the document before it is
//! decoded, so they take precedence over the file. The grammar is documented
//! in the README; the shipped presets are complete examples.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use super::HarnessError;
use crate::anisotropy::{Anisotropy, AnisotropyKind, CosineTerm, DEFAULT_CRYSTALLINE_EPSILON};
use crate::grid::{io::parse_points, Grid, Shape};
use crate::kernels::{ee, KernelFamily, KernelSpec};
use crate::obstacle::{FitBand, Tensions};

/// Polygon used when an S-shape does not name its own file.
const S_SHAPE_DATA: &str = include_str!("../../data/s_shape.csv");

/// Free space required between the initial shape and the domain boundary.
pub const SHAPE_MARGIN: f64 = 1.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub name: String,
    pub grid: GridConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub anisotropy: Option<AnisotropyConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kernel: Option<KernelConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shape: Option<ShapeConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub substrate: Option<Tensions>,
    pub run: RunConfig,
    #[serde(default)]
    pub output: OutputConfig,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub n: usize,
    /// `[x_min, x_max, y_min, y_max]`.
    #[serde(default = "standard_bounds")]
    pub bounds: [f64; 4],
}

fn standard_bounds() -> [f64; 4] {
    [-5.0, 5.0, -5.0, 5.0]
}

impl GridConfig {
    pub fn grid(&self) -> Result<Grid, HarnessError> {
        let [x0, x1, y0, y1] = self.bounds;
        Grid::new(x0, x1, y0, y1, self.n).map_err(|e| HarnessError::validation("grid", e))
    }
}

/// Anisotropy `γ(θ)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum AnisotropyConfig {
    Constant {
        value: f64,
    },
    /// `1 + amplitude · cos(mode θ + phase)`.
    SingleMode {
        amplitude: f64,
        mode: f64,
        #[serde(default)]
        phase: f64,
    },
    CosineSeries {
        terms: Vec<CosineTerm>,
    },
    Elliptic {
        a: f64,
        b: f64,
    },
    Crystalline {
        #[serde(default = "default_crystalline_epsilon")]
        epsilon: f64,
    },
}

fn default_crystalline_epsilon() -> f64 {
    DEFAULT_CRYSTALLINE_EPSILON
}

impl AnisotropyConfig {
    pub fn kind(&self) -> AnisotropyKind {
        match self {
            AnisotropyConfig::Constant { value } => AnisotropyKind::Constant(*value),
            AnisotropyConfig::SingleMode { amplitude, mode, phase } => {
                AnisotropyKind::CosineSeries(vec![CosineTerm { amplitude: *amplitude, mode: *mode, phase: *phase }])
            }
            AnisotropyConfig::CosineSeries { terms } => AnisotropyKind::CosineSeries(terms.clone()),
            AnisotropyConfig::Elliptic { a, b } => AnisotropyKind::Elliptic { a: *a, b: *b },
            AnisotropyConfig::Crystalline { epsilon } => AnisotropyKind::RegularizedCrystalline { epsilon: *epsilon },
        }
    }

    /// Builds `γ` and rejects strong anisotropies.
    pub fn build(&self, field: &str) -> Result<Anisotropy, HarnessError> {
        let gamma = Anisotropy::new(self.kind()).map_err(|e| HarnessError::validation(field, e))?;
        let class = gamma.classify(3600);
        if !class.is_admissible() {
            return Err(HarnessError::validation(
                field,
                format!("strong anisotropy (min γ + γ'' = {:.4}) makes the flow ill-posed", class.margin),
            ));
        }
        Ok(gamma)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FamilyName {
    Gaussian,
    Bbc,
    Ee,
    EjzPhysical,
    EjzFourier,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KernelConfig {
    pub family: FamilyName,
    /// Smoothing width, EE only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    /// Direction count, EE only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub directions: Option<usize>,
    /// Target mobility, EJZ only; defaults to `γ`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mobility: Option<AnisotropyConfig>,
    /// Factor on the target mobility, EJZ only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mobility_scale: Option<f64>,
}

impl KernelConfig {
    pub fn family(&self) -> KernelFamily {
        match self.family {
            FamilyName::Gaussian => KernelFamily::Gaussian,
            FamilyName::Bbc => KernelFamily::Bbc,
            FamilyName::Ee => KernelFamily::Ee {
                epsilon: self.epsilon.unwrap_or(0.1),
                directions: self.directions.unwrap_or(ee::DEFAULT_DIRECTIONS),
            },
            FamilyName::EjzPhysical => KernelFamily::EjzPhysical,
            FamilyName::EjzFourier => KernelFamily::EjzFourier,
        }
    }

    fn validate(&self) -> Result<(), HarnessError> {
        let is_ee = self.family == FamilyName::Ee;
        let is_ejz = matches!(self.family, FamilyName::EjzPhysical | FamilyName::EjzFourier);
        if !is_ee && (self.epsilon.is_some() || self.directions.is_some()) {
            return Err(HarnessError::validation("kernel", "`epsilon` and `directions` apply to the ee family only"));
        }
        if !is_ejz && (self.mobility.is_some() || self.mobility_scale.is_some()) {
            return Err(HarnessError::validation(
                "kernel",
                "`mobility` and `mobility_scale` apply to ejz families only",
            ));
        }
        if let Some(e) = self.epsilon {
            if !(e > 0.0) {
                return Err(HarnessError::validation("kernel.epsilon", format!("must be positive, got {e}")));
            }
        }
        if self.directions == Some(0) {
            return Err(HarnessError::validation("kernel.directions", "must be positive"));
        }
        if let Some(s) = self.mobility_scale {
            if !(s > 0.0) {
                return Err(HarnessError::validation("kernel.mobility_scale", format!("must be positive, got {s}")));
            }
        }
        Ok(())
    }

    pub fn spec(&self, gamma: Anisotropy) -> Result<KernelSpec, HarnessError> {
        let mobility = match &self.mobility {
            Some(m) => m.build("kernel.mobility")?,
            None => gamma.clone(),
        };
        let spec = match self.family() {
            KernelFamily::Gaussian => KernelSpec::gaussian(),
            KernelFamily::Bbc => KernelSpec::bbc(gamma),
            KernelFamily::Ee { epsilon, directions } => KernelSpec::ee(gamma, epsilon, directions),
            KernelFamily::EjzPhysical => KernelSpec::ejz_physical(gamma, mobility),
            KernelFamily::EjzFourier => KernelSpec::ejz_fourier(gamma, mobility),
        };
        Ok(match self.mobility_scale {
            Some(s) => spec.with_mobility_scale(s),
            None => spec,
        })
    }
}

/// Initial particle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ShapeConfig {
    Ellipse {
        center: [f64; 2],
        a: f64,
        b: f64,
    },
    Circle {
        center: [f64; 2],
        radius: f64,
    },
    Rectangle {
        x0: f64,
        x1: f64,
        y0: f64,
        y1: f64,
    },
    Polygons {
        polygons: Vec<Vec<[f64; 2]>>,
    },
    TrianglePair {
        gap: f64,
        base: f64,
        height: f64,
        #[serde(default)]
        y0: f64,
    },
    /// Approximate S-shaped polygon, from `path` or the bundled data file.
    SShape {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        path: Option<PathBuf>,
        #[serde(default = "unit")]
        scale: f64,
        #[serde(default)]
        center: [f64; 2],
    },
}

fn unit() -> f64 {
    1.0
}

impl ShapeConfig {
    pub fn shape(&self) -> Result<Shape, HarnessError> {
        let shape = match self.clone() {
            ShapeConfig::Ellipse { center, a, b } => Shape::Ellipse { center, a, b },
            ShapeConfig::Circle { center, radius } => Shape::Circle { center, radius },
            ShapeConfig::Rectangle { x0, x1, y0, y1 } => Shape::Rectangle { x0, x1, y0, y1 },
            ShapeConfig::Polygons { polygons } => Shape::Polygons { polygons },
            ShapeConfig::TrianglePair { gap, base, height, y0 } => Shape::TrianglePair { gap, base, height, y0 },
            ShapeConfig::SShape { path, scale, center } => {
                let points = match &path {
                    Some(p) => {
                        let text = std::fs::read_to_string(p).map_err(|e| HarnessError::io(p, e))?;
                        parse_points(text.as_bytes())
                    }
                    None => parse_points(S_SHAPE_DATA.as_bytes()),
                }
                .map_err(|e| HarnessError::validation("shape.path", e))?;
                let pts = points.iter().map(|p| [center[0] + scale * p[0], center[1] + scale * p[1]]).collect();
                Shape::Polygons { polygons: vec![pts] }
            }
        };
        if !shape.is_valid() {
            return Err(HarnessError::validation("shape", "degenerate geometry"));
        }
        Ok(shape)
    }
}

/// What to run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "algorithm", rename_all = "kebab-case", deny_unknown_fields)]
pub enum RunConfig {
    /// Free particle, plain thresholding for a fixed number of steps.
    Threshold { dt: f64, steps: usize },
    /// Free particle with fixed area until it stops changing.
    AreaPreserving {
        dt: f64,
        #[serde(default = "default_max_steps")]
        max_steps: usize,
        #[serde(default = "default_unchanged")]
        unchanged_steps: usize,
    },
    /// Particle on the substrate at a fixed time step; runs `steps` steps if
    /// given, otherwise until stationary.
    Obstacle {
        dt: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        steps: Option<usize>,
        #[serde(default = "default_max_steps")]
        max_steps: usize,
        #[serde(default = "default_unchanged")]
        unchanged_steps: usize,
    },
    /// Particle on the substrate with time-step halving.
    TimeScaling {
        dt0: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        tau: Option<f64>,
        #[serde(default = "default_max_steps")]
        max_steps: usize,
    },
    /// Shrinking-ellipse convergence table over grid sizes and time steps.
    Convergence {
        families: Vec<FamilyName>,
        sizes: Vec<usize>,
        time_steps: Vec<f64>,
        #[serde(default = "default_final_time")]
        final_time: f64,
    },
    /// Induced surface tension and mobility tables of the configured kernel.
    KernelInfo {
        #[serde(default = "default_info_directions")]
        directions: usize,
    },
}

fn default_max_steps() -> usize {
    5000
}

fn default_unchanged() -> usize {
    3
}

fn default_final_time() -> f64 {
    0.25
}

fn default_info_directions() -> usize {
    32
}

impl RunConfig {
    pub fn label(&self) -> &'static str {
        match self {
            RunConfig::Threshold { .. } => "threshold",
            RunConfig::AreaPreserving { .. } => "area-preserving",
            RunConfig::Obstacle { .. } => "obstacle",
            RunConfig::TimeScaling { .. } => "time-scaling",
            RunConfig::Convergence { .. } => "convergence",
            RunConfig::KernelInfo { .. } => "kernel-info",
        }
    }

    fn on_substrate(&self) -> bool {
        matches!(self, RunConfig::Obstacle { .. } | RunConfig::TimeScaling { .. })
    }

    fn needs_shape(&self) -> bool {
        !matches!(self, RunConfig::Convergence { .. } | RunConfig::KernelInfo { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    /// Output directory; relative paths are resolved against the output root.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub directory: Option<PathBuf>,
    /// Steps between snapshots; the final state is always written.
    #[serde(default = "default_dump_interval")]
    pub dump_interval: usize,
    #[serde(default)]
    pub fit_band: FitBand,
}

fn default_dump_interval() -> usize {
    50
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig { directory: None, dump_interval: default_dump_interval(), fit_band: FitBand::default() }
    }
}

/// Parses and validates a configuration, applying `key.path=value` overrides.
pub fn parse_config(text: &str, overrides: &[String]) -> Result<ExperimentConfig, HarnessError> {
    decode(overridden_table(text, overrides)?)
}

/// Reads a configuration file.
pub fn load_config(path: &std::path::Path, overrides: &[String]) -> Result<ExperimentConfig, HarnessError> {
    parse_config(&read(path)?, overrides)
}

/// Reads a configuration file for a kernel table only: its run section is
/// replaced by a kernel-info run and its shape and substrate are dropped.
pub fn load_kernel_info_config(
    path: &std::path::Path,
    overrides: &[String],
    directions: usize,
) -> Result<ExperimentConfig, HarnessError> {
    let mut table = overridden_table(&read(path)?, overrides)?;
    table.remove("shape");
    table.remove("substrate");
    let mut run = toml::Table::new();
    run.insert("algorithm".into(), "kernel-info".into());
    run.insert("directions".into(), toml::Value::Integer(directions.try_into().unwrap_or(i64::MAX)));
    table.insert("run".into(), toml::Value::Table(run));
    decode(table)
}

fn read(path: &std::path::Path) -> Result<String, HarnessError> {
    std::fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))
}

fn overridden_table(text: &str, overrides: &[String]) -> Result<toml::Table, HarnessError> {
    let mut table: toml::Table = text.parse().map_err(|e: toml::de::Error| HarnessError::Parse(e.to_string()))?;
    for o in overrides {
        apply_override(&mut table, o)?;
    }
    Ok(table)
}

fn decode(table: toml::Table) -> Result<ExperimentConfig, HarnessError> {
    let config: ExperimentConfig =
        toml::Value::Table(table).try_into().map_err(|e: toml::de::Error| HarnessError::Parse(e.to_string()))?;
    config.validate()?;
    Ok(config)
}

/// Canonical TOML text of a configuration.
pub fn to_toml(config: &ExperimentConfig) -> Result<String, HarnessError> {
    toml::to_string(config).map_err(|e| HarnessError::Parse(e.to_string()))
}

fn apply_override(table: &mut toml::Table, spec: &str) -> Result<(), HarnessError> {
    let (path, raw) = spec
        .split_once('=')
        .ok_or_else(|| HarnessError::Parse(format!("override `{spec}` is not of the form key=value")))?;
    let keys: Vec<&str> = path.trim().split('.').collect();
    if keys.iter().any(|k| k.is_empty()) {
        return Err(HarnessError::Parse(format!("override `{spec}` has an empty key")));
    }
    // values that are not valid TOML are taken as bare strings
    let value = match format!("v = {}", raw.trim()).parse::<toml::Table>() {
        Ok(mut t) => t.remove("v").expect("key just parsed"),
        Err(_) => toml::Value::String(raw.trim().to_string()),
    };
    let (last, parents) = keys.split_last().expect("non-empty path");
    let mut cur = table;
    for k in parents {
        let entry = cur.entry(k.to_string()).or_insert_with(|| toml::Value::Table(toml::Table::new()));
        cur = entry
            .as_table_mut()
            .ok_or_else(|| HarnessError::Parse(format!("override `{spec}`: `{k}` is not a table")))?;
    }
    cur.insert(last.to_string(), value);
    Ok(())
}

impl ExperimentConfig {
    /// Checks everything that can be checked without running.
    pub fn validate(&self) -> Result<(), HarnessError> {
        if self.name.trim().is_empty() {
            return Err(HarnessError::validation("name", "must not be empty"));
        }
        let grid = self.grid.grid()?;
        if self.output.dump_interval == 0 {
            return Err(HarnessError::validation("output.dump_interval", "must be positive"));
        }
        let band = self.output.fit_band;
        if band.upper <= band.lower {
            return Err(HarnessError::validation("output.fit_band", "upper must exceed lower"));
        }
        if let RunConfig::Convergence { families, sizes, time_steps, final_time } = &self.run {
            // the study always evolves the same ellipse on the standard domain
            for (field, set) in [
                ("anisotropy", self.anisotropy.is_some()),
                ("kernel", self.kernel.is_some()),
                ("shape", self.shape.is_some()),
                ("substrate", self.substrate.is_some()),
            ] {
                if set {
                    return Err(HarnessError::validation(field, "not used by convergence runs"));
                }
            }
            return validate_convergence(families, sizes, time_steps, *final_time);
        }
        let gamma = self
            .anisotropy
            .as_ref()
            .ok_or_else(|| HarnessError::validation("anisotropy", "required for this run"))?
            .build("anisotropy")?;
        let kernel = self.kernel.as_ref().ok_or_else(|| HarnessError::validation("kernel", "required for this run"))?;
        kernel.validate()?;
        kernel.spec(gamma)?;
        self.validate_run(&grid)?;
        if self.run.needs_shape() {
            let shape =
                self.shape.as_ref().ok_or_else(|| HarnessError::validation("shape", "required for this run"))?;
            self.validate_shape(&shape.shape()?, &grid)?;
        } else if self.shape.is_some() {
            return Err(HarnessError::validation("shape", format!("not used by {} runs", self.run.label())));
        }
        match (&self.substrate, self.run.on_substrate()) {
            (None, true) => Err(HarnessError::validation("substrate", "required for runs on a substrate")),
            (Some(_), false) => {
                Err(HarnessError::validation("substrate", format!("not used by {} runs", self.run.label())))
            }
            (Some(Tensions::Patterned { pattern }), true) => {
                pattern.validate().map_err(|e| HarnessError::validation("substrate.pattern", e))
            }
            _ => Ok(()),
        }
    }

    fn validate_run(&self, grid: &Grid) -> Result<(), HarnessError> {
        let positive = |field: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(HarnessError::validation(field, format!("must be positive, got {v}")))
            }
        };
        let nonzero = |field: &str, v: usize| {
            if v > 0 {
                Ok(())
            } else {
                Err(HarnessError::validation(field, "must be positive"))
            }
        };
        match &self.run {
            RunConfig::Threshold { dt, steps } => {
                positive("run.dt", *dt)?;
                nonzero("run.steps", *steps)
            }
            RunConfig::AreaPreserving { dt, max_steps, unchanged_steps } => {
                positive("run.dt", *dt)?;
                nonzero("run.max_steps", *max_steps)?;
                nonzero("run.unchanged_steps", *unchanged_steps)
            }
            RunConfig::Obstacle { dt, steps, max_steps, unchanged_steps } => {
                positive("run.dt", *dt)?;
                if let Some(s) = steps {
                    nonzero("run.steps", *s)?;
                }
                nonzero("run.max_steps", *max_steps)?;
                nonzero("run.unchanged_steps", *unchanged_steps)?;
                self.check_substrate_inside(grid)
            }
            RunConfig::TimeScaling { dt0, tau, max_steps } => {
                positive("run.dt0", *dt0)?;
                if let Some(t) = tau {
                    positive("run.tau", *t)?;
                }
                nonzero("run.max_steps", *max_steps)?;
                self.check_substrate_inside(grid)
            }
            RunConfig::KernelInfo { directions } => nonzero("run.directions", *directions),
            RunConfig::Convergence { .. } => unreachable!("handled before"),
        }
    }

    fn check_substrate_inside(&self, grid: &Grid) -> Result<(), HarnessError> {
        let [_, _, y0, y1] = grid.bounds();
        if !(y0 + SHAPE_MARGIN <= 0.0 && 0.0 < y1) {
            return Err(HarnessError::validation("grid.bounds", "the substrate line y = 0 must lie inside the domain"));
        }
        Ok(())
    }

    fn validate_shape(&self, shape: &Shape, grid: &Grid) -> Result<(), HarnessError> {
        let [bx0, bx1, by0, by1] = shape.bounding_box();
        let [x0, x1, y0, y1] = grid.bounds();
        let m = SHAPE_MARGIN;
        let lower_ok = if self.run.on_substrate() { by0 >= 0.0 } else { by0 >= y0 + m };
        if !(bx0 >= x0 + m && bx1 <= x1 - m && lower_ok && by1 <= y1 - m) {
            return Err(HarnessError::validation(
                "shape",
                format!(
                    "bounding box [{bx0}, {bx1}] x [{by0}, {by1}] must stay {m} inside the domain [{x0}, {x1}] x [{y0}, {y1}]{}",
                    if self.run.on_substrate() { " and above the substrate" } else { "" }
                ),
            ));
        }
        if shape.rasterize(grid).count_at_least(0.5) == 0 {
            return Err(HarnessError::validation("shape", "covers no grid point"));
        }
        Ok(())
    }
}

fn validate_convergence(
    families: &[FamilyName],
    sizes: &[usize],
    time_steps: &[f64],
    final_time: f64,
) -> Result<(), HarnessError> {
    if families.is_empty() {
        return Err(HarnessError::validation("run.families", "must not be empty"));
    }
    if let Some(f) = families.iter().find(|f| matches!(f, FamilyName::Gaussian | FamilyName::Ee)) {
        return Err(HarnessError::validation(
            "run.families",
            format!("{f:?} kernels have no exact shrinking-ellipse solution; use bbc, ejz-physical or ejz-fourier"),
        ));
    }
    if sizes.is_empty() || sizes.iter().any(|&n| Grid::standard(n).is_err()) {
        return Err(HarnessError::validation("run.sizes", "needs powers of two of at least 4"));
    }
    if time_steps.is_empty() || time_steps.iter().any(|&d| !(d > 0.0 && d <= final_time)) {
        return Err(HarnessError::validation("run.time_steps", "needs positive steps no larger than final_time"));
    }
    if !(final_time > 0.0 && final_time < 0.5) {
        return Err(HarnessError::validation("run.final_time", "must lie in (0, 1/2), before the ellipse vanishes"));
    }
    Ok(())
}
