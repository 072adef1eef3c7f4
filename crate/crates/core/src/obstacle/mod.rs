//! A particle resting on a flat substrate at `y = 0`.
//!
//! Each step minimizes the linearization of the three-phase energy at fixed
//! particle area: the new particle is made of the `M` points of the upper
//! half-domain with the smallest
//! `φ = δt^{-1/2} (K_δt * (𝟙_up - 2u) + Σ_i γ_i G_δt * 𝟙_{S_i})`.
//! Under `K̂ ≥ 0` the energy never increases.

pub mod contact;
pub mod topology;

use std::cmp::Ordering;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::anisotropy::AnisotropyError;
use crate::grid::{Grid, GridError, ScalarField};
use crate::kernels::{KernelError, KernelSpec, SampledKernel, ScaledKernel};

pub use contact::{ContactAngles, FitBand};
pub use topology::{TopologyEvent, TopologyKind};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ObstacleError {
    #[error("{requested} particle points requested but the region holds only {available}")]
    InsufficientDomain { requested: usize, available: usize },
    #[error("particle does not touch the substrate")]
    NoContact,
    #[error("no termination within {steps} steps")]
    MaxSteps { steps: usize },
    #[error("particle overlaps the substrate at index {index}")]
    InSubstrate { index: usize },
    #[error("indicator value {value} at index {index} is not 0 or 1")]
    NotIndicator { index: usize, value: f64 },
    #[error("invalid substrate setting: {0}")]
    InvalidParameter(String),
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error(transparent)]
    Anisotropy(#[from] AnisotropyError),
}

/// Half-open interval `[x0, x1)` of the substrate line with its own tension
/// difference `γ_SP - γ_SV`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Segment {
    pub x0: f64,
    pub x1: f64,
    pub value: f64,
}

/// Piecewise-constant tension difference along the substrate.
///
/// The listed intervals override `background`; together they partition the
/// line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SubstratePattern {
    pub background: f64,
    #[serde(default)]
    pub intervals: Vec<Segment>,
}

impl SubstratePattern {
    pub fn new(background: f64, intervals: Vec<Segment>) -> Result<Self, ObstacleError> {
        let p = SubstratePattern { background, intervals };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), ObstacleError> {
        if !self.background.is_finite() {
            return Err(ObstacleError::InvalidParameter("background tension must be finite".into()));
        }
        let mut prev = f64::NEG_INFINITY;
        for s in &self.intervals {
            if !(s.x0 < s.x1) || !s.value.is_finite() {
                return Err(ObstacleError::InvalidParameter(format!("bad interval [{}, {})", s.x0, s.x1)));
            }
            if s.x0 < prev {
                return Err(ObstacleError::InvalidParameter("intervals must be sorted and disjoint".into()));
            }
            prev = s.x1;
        }
        Ok(())
    }

    /// Segments covering the whole line, background pieces included.
    pub fn segments(&self) -> Vec<Segment> {
        let mut out = Vec::new();
        let mut x = f64::NEG_INFINITY;
        for s in &self.intervals {
            if s.x0 > x {
                out.push(Segment { x0: x, x1: s.x0, value: self.background });
            }
            out.push(*s);
            x = s.x1;
        }
        out.push(Segment { x0: x, x1: f64::INFINITY, value: self.background });
        out
    }

    pub fn value_at(&self, x: f64) -> f64 {
        self.intervals.iter().find(|s| x >= s.x0 && x < s.x1).map_or(self.background, |s| s.value)
    }
}

/// Substrate tensions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Tensions {
    Uniform {
        gamma_sp: f64,
        gamma_sv: f64,
    },
    /// Only differences are given, so energies are measured with `γ_SV = 0`.
    Patterned {
        pattern: SubstratePattern,
    },
}

impl Tensions {
    pub fn uniform(gamma_sp: f64, gamma_sv: f64) -> Self {
        Tensions::Uniform { gamma_sp, gamma_sv }
    }

    /// `(γ_SP(x), γ_SV(x))`.
    pub fn at(&self, x: f64) -> (f64, f64) {
        match self {
            Tensions::Uniform { gamma_sp, gamma_sv } => (*gamma_sp, *gamma_sv),
            Tensions::Patterned { pattern } => (pattern.value_at(x), 0.0),
        }
    }

    pub fn scaled(&self, factor: f64) -> Self {
        match self {
            Tensions::Uniform { gamma_sp, gamma_sv } => Tensions::uniform(factor * gamma_sp, factor * gamma_sv),
            Tensions::Patterned { pattern } => Tensions::Patterned {
                pattern: SubstratePattern {
                    background: factor * pattern.background,
                    intervals: pattern.intervals.iter().map(|s| Segment { value: factor * s.value, ..*s }).collect(),
                },
            },
        }
    }
}

/// Fields that depend only on the geometry, tensions and `δt`.
#[derive(Debug)]
struct StepCache {
    dt: f64,
    kernel: ScaledKernel,
    /// `K_δt * 𝟙_up + G_δt * ((γ_SP - γ_SV) 𝟙_S)`.
    phi_base: Vec<f64>,
    /// `G_δt * (γ_SP 𝟙_S)`.
    g_sp: Vec<f64>,
    /// `G_δt * (γ_SV 𝟙_S)`.
    g_sv: Vec<f64>,
}

/// Particle on the substrate, with everything needed to advance it.
#[derive(Debug, Clone)]
pub struct ObstacleState {
    particle: ScalarField,
    substrate: ScalarField,
    up: ScalarField,
    kernel: SampledKernel,
    gaussian: SampledKernel,
    tensions: Tensions,
    cache: Arc<StepCache>,
    target_count: usize,
    per_component_targets: Option<Vec<usize>>,
    step_index: usize,
}

impl ObstacleState {
    /// Substrate `S = {y < 0}`; the row `y = 0` belongs to the upper region.
    pub fn new(
        particle: ScalarField,
        kernel: SampledKernel,
        tensions: Tensions,
        dt: f64,
    ) -> Result<Self, ObstacleError> {
        let grid = *particle.grid();
        grid.check_same(kernel.grid())?;
        if let Tensions::Patterned { pattern } = &tensions {
            pattern.validate()?;
        }
        if let Some(index) = particle.values().iter().position(|&v| v != 0.0 && v != 1.0) {
            return Err(ObstacleError::NotIndicator { index, value: particle.values()[index] });
        }
        let substrate = ScalarField::indicator(grid, |_, y| y < 0.0);
        let up = substrate.map(|s| 1.0 - s);
        if let Some(index) = particle.values().iter().zip(up.values()).position(|(&p, &u)| p > u) {
            return Err(ObstacleError::InSubstrate { index });
        }
        let gaussian = SampledKernel::build_with(KernelSpec::gaussian(), grid, kernel.execution())?;
        let cache = Arc::new(build_cache(&kernel, &gaussian, &tensions, &substrate, &up, dt)?);
        let target_count = particle.count_at_least(0.5);
        let mut s = ObstacleState {
            particle,
            substrate,
            up,
            kernel,
            gaussian,
            tensions,
            cache,
            target_count,
            per_component_targets: None,
            step_index: 0,
        };
        s.per_component_targets = component_targets(&s.particle);
        Ok(s)
    }

    /// Same particle with a new time step.
    pub fn with_dt(&self, dt: f64) -> Result<Self, ObstacleError> {
        let mut s = self.clone();
        s.cache = Arc::new(build_cache(&self.kernel, &self.gaussian, &self.tensions, &self.substrate, &self.up, dt)?);
        Ok(s)
    }

    /// Same state with another particle of possibly different area.
    pub fn with_particle(&self, particle: ScalarField) -> Result<Self, ObstacleError> {
        self.particle.grid().check_same(particle.grid())?;
        if let Some(index) =
            particle.values().iter().zip(self.up.values()).position(|(&p, &u)| p > u || (p != 0.0 && p != 1.0))
        {
            return Err(ObstacleError::InSubstrate { index });
        }
        let mut s = self.clone();
        s.target_count = particle.count_at_least(0.5);
        s.per_component_targets = component_targets(&particle);
        s.particle = particle;
        Ok(s)
    }

    pub fn particle(&self) -> &ScalarField {
        &self.particle
    }

    pub fn substrate_mask(&self) -> &ScalarField {
        &self.substrate
    }

    pub fn up_mask(&self) -> &ScalarField {
        &self.up
    }

    pub fn kernel(&self) -> &SampledKernel {
        &self.kernel
    }

    pub fn gaussian(&self) -> &SampledKernel {
        &self.gaussian
    }

    pub fn tensions(&self) -> &Tensions {
        &self.tensions
    }

    pub fn dt(&self) -> f64 {
        self.cache.dt
    }

    pub fn grid(&self) -> &Grid {
        self.particle.grid()
    }

    pub fn target_count(&self) -> usize {
        self.target_count
    }

    pub fn per_component_targets(&self) -> Option<&[usize]> {
        self.per_component_targets.as_deref()
    }

    pub fn step_index(&self) -> usize {
        self.step_index
    }

    pub fn count(&self) -> usize {
        self.particle.count_at_least(0.5)
    }

    pub fn area(&self) -> f64 {
        self.count() as f64 * self.grid().cell_area()
    }

    pub fn phi(&self) -> ScalarField {
        compute_phi(self)
    }

    pub fn energy(&self) -> f64 {
        three_phase_energy(self)
    }

    pub fn step(&self) -> Result<Self, ObstacleError> {
        step_algorithm2(self)
    }
}

fn build_cache(
    kernel: &SampledKernel,
    gaussian: &SampledKernel,
    tensions: &Tensions,
    substrate: &ScalarField,
    up: &ScalarField,
    dt: f64,
) -> Result<StepCache, ObstacleError> {
    let grid = *substrate.grid();
    let k = kernel.at_scale(dt)?;
    let g = gaussian.at_scale(dt)?;
    let weighted = |pick: fn((f64, f64)) -> f64| {
        let n = grid.n();
        let mut v = substrate.values().to_vec();
        for (idx, s) in v.iter_mut().enumerate() {
            *s *= pick(tensions.at(grid.x(idx % n)));
        }
        ScalarField::from_vec_unchecked(grid, v)
    };
    let g_sp = g.apply(&weighted(|t| t.0)).into_values();
    let g_sv = g.apply(&weighted(|t| t.1)).into_values();
    let k_up = k.apply(up);
    let phi_base = k_up.values().iter().zip(&g_sp).zip(&g_sv).map(|((a, b), c)| a + b - c).collect();
    Ok(StepCache { dt, kernel: k, phi_base, g_sp, g_sv })
}

fn component_targets(particle: &ScalarField) -> Option<Vec<usize>> {
    let c = topology::particle_components(particle);
    (c.count > 1).then_some(c.counts)
}

/// `φ = δt^{-1/2} (K_δt * (𝟙_up - 2u) + Σ_i γ_i G_δt * 𝟙_{S_i})`.
pub fn compute_phi(s: &ObstacleState) -> ScalarField {
    let ku = s.cache.kernel.apply(&s.particle);
    let inv = 1.0 / s.dt().sqrt();
    let v = s.cache.phi_base.iter().zip(ku.values()).map(|(b, k)| (b - 2.0 * k) * inv).collect();
    ScalarField::from_vec_unchecked(*s.grid(), v)
}

/// The `M` points of the upper region with the smallest `φ`, selected per
/// particle when several particles carry their own targets.
pub fn threshold_area_preserving(phi: &ScalarField, s: &ObstacleState) -> Result<ScalarField, ObstacleError> {
    let up: Vec<bool> = s.up.values().iter().map(|&u| u == 1.0).collect();
    match &s.per_component_targets {
        Some(targets) if targets.len() > 1 => {
            let comps = topology::particle_components(&s.particle);
            if comps.count != targets.len() {
                return select_smallest(phi, &up, s.target_count);
            }
            let regions = topology::nearest_component_regions(&comps, s.grid().n());
            let mut out = vec![0.0; phi.values().len()];
            for (k, &m) in targets.iter().enumerate() {
                let label = k as u32 + 1;
                let allowed: Vec<bool> = up.iter().zip(&regions).map(|(&u, &r)| u && r == label).collect();
                let part = select_smallest(phi, &allowed, m)?;
                for (o, &p) in out.iter_mut().zip(part.values()) {
                    *o += p;
                }
            }
            Ok(ScalarField::from_vec_unchecked(*s.grid(), out))
        }
        _ => select_smallest(phi, &up, s.target_count),
    }
}

/// Indicator of the `m` allowed points with the smallest values; equal values
/// go to the lower row-major index first.
pub fn select_smallest(phi: &ScalarField, allowed: &[bool], m: usize) -> Result<ScalarField, ObstacleError> {
    let v = phi.values();
    let mut idx: Vec<usize> = (0..v.len()).filter(|&i| allowed[i]).collect();
    if m > idx.len() {
        return Err(ObstacleError::InsufficientDomain { requested: m, available: idx.len() });
    }
    let mut out = vec![0.0; v.len()];
    if m > 0 {
        let cmp = |a: &usize, b: &usize| -> Ordering { v[*a].total_cmp(&v[*b]).then(a.cmp(b)) };
        if m < idx.len() {
            idx.select_nth_unstable_by(m - 1, cmp);
        }
        for &i in &idx[..m] {
            out[i] = 1.0;
        }
    }
    Ok(ScalarField::from_vec_unchecked(*phi.grid(), out))
}

/// One thresholding step at fixed area.
pub fn step_algorithm2(s: &ObstacleState) -> Result<ObstacleState, ObstacleError> {
    let phi = compute_phi(s);
    let particle = threshold_area_preserving(&phi, s)?;
    let mut next = s.clone();
    next.per_component_targets = component_targets(&particle);
    next.particle = particle;
    next.step_index += 1;
    Ok(next)
}

/// `δt^{-1/2} ∫ (𝟙_P K_δt * 𝟙_V + γ_SP 𝟙_P G_δt * 𝟙_S + γ_SV 𝟙_S G_δt * 𝟙_V)`
/// by grid quadrature.
pub fn three_phase_energy(s: &ObstacleState) -> f64 {
    let ku = s.cache.kernel.apply(&s.particle);
    let k_up = s.cache.phi_base.iter().zip(&s.cache.g_sp).zip(&s.cache.g_sv).map(|((b, p), v)| b - p + v);
    let mut acc = 0.0;
    for ((((&u, &up), ku), kup), (gsp, gsv)) in s
        .particle
        .values()
        .iter()
        .zip(s.up.values())
        .zip(ku.values())
        .zip(k_up)
        .zip(s.cache.g_sp.iter().zip(&s.cache.g_sv))
    {
        // 𝟙_P K*(𝟙_up - u) + u G*(γ_SP 𝟙_S) + (𝟙_up - u) G*(γ_SV 𝟙_S), using that G is even
        let v = up - u;
        acc += u * (kup - ku) + u * gsp + v * gsv;
    }
    acc * s.grid().cell_area() / s.dt().sqrt()
}

/// Symmetric difference of two particles in area units.
pub fn symmetric_difference(a: &ScalarField, b: &ScalarField) -> Result<f64, ObstacleError> {
    Ok(a.symmetric_difference_area(b)?)
}

/// Stopping rule for runs at a fixed time step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StationarityConfig {
    /// Consecutive unchanged steps that count as stationary.
    pub unchanged_steps: usize,
    pub max_steps: usize,
}

impl Default for StationarityConfig {
    fn default() -> Self {
        StationarityConfig { unchanged_steps: 3, max_steps: 5000 }
    }
}

/// Record of a run.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub final_state: ObstacleState,
    pub steps: usize,
    pub energies: Vec<f64>,
    pub counts: Vec<usize>,
    pub events: Vec<TopologyEvent>,
    /// `(step, new δt)` for every halving.
    pub halvings: Vec<(usize, f64)>,
    pub stationary: bool,
}

/// Hook called with every state, starting with the initial one.
pub trait Observer {
    fn observe(&mut self, state: &ObstacleState, event: Option<&TopologyEvent>);
}

impl<F: FnMut(&ObstacleState, Option<&TopologyEvent>)> Observer for F {
    fn observe(&mut self, state: &ObstacleState, event: Option<&TopologyEvent>) {
        self(state, event)
    }
}

struct Recorder<'a> {
    energies: Vec<f64>,
    counts: Vec<usize>,
    events: Vec<TopologyEvent>,
    components: crate::grid::Components,
    observer: &'a mut dyn Observer,
    record_energy: bool,
}

impl<'a> Recorder<'a> {
    fn new(s: &ObstacleState, observer: &'a mut dyn Observer, record_energy: bool) -> Self {
        observer.observe(s, None);
        Recorder {
            energies: if record_energy { vec![s.energy()] } else { Vec::new() },
            counts: vec![s.count()],
            events: Vec::new(),
            components: topology::particle_components(s.particle()),
            observer,
            record_energy,
        }
    }

    fn push(&mut self, s: &ObstacleState) {
        let comps = topology::particle_components(s.particle());
        let event = topology::classify_change(s.step_index(), &self.components, &comps);
        self.components = comps;
        if self.record_energy {
            self.energies.push(s.energy());
        }
        self.counts.push(s.count());
        self.observer.observe(s, event.as_ref());
        if let Some(e) = event {
            self.events.push(e);
        }
    }
}

/// Reports a topology change between two consecutive states.
pub fn track_topology(prev: &ObstacleState, next: &ObstacleState) -> Option<TopologyEvent> {
    topology::classify_change(
        next.step_index(),
        &topology::particle_components(prev.particle()),
        &topology::particle_components(next.particle()),
    )
}

/// Steps at fixed `δt` until the particle stops changing.
pub fn run_algorithm2(
    s: &ObstacleState,
    cfg: &StationarityConfig,
    observer: &mut dyn Observer,
) -> Result<Trajectory, ObstacleError> {
    let mut rec = Recorder::new(s, observer, true);
    let mut state = s.clone();
    let mut unchanged = 0;
    let mut steps = 0;
    while steps < cfg.max_steps {
        let next = step_algorithm2(&state)?;
        steps += 1;
        rec.push(&next);
        let same = next.particle == state.particle;
        state = next;
        unchanged = if same { unchanged + 1 } else { 0 };
        if unchanged >= cfg.unchanged_steps {
            break;
        }
    }
    let stationary = unchanged >= cfg.unchanged_steps;
    Ok(Trajectory {
        final_state: state,
        steps,
        energies: rec.energies,
        counts: rec.counts,
        events: rec.events,
        halvings: Vec::new(),
        stationary,
    })
}

/// Steps for a fixed number of iterations regardless of stationarity.
pub fn run_steps(s: &ObstacleState, steps: usize, observer: &mut dyn Observer) -> Result<Trajectory, ObstacleError> {
    let mut rec = Recorder::new(s, observer, true);
    let mut state = s.clone();
    for _ in 0..steps {
        state = step_algorithm2(&state)?;
        rec.push(&state);
    }
    Ok(Trajectory {
        final_state: state,
        steps,
        energies: rec.energies,
        counts: rec.counts,
        events: rec.events,
        halvings: Vec::new(),
        stationary: false,
    })
}

/// Time-step halving driven by the area of symmetric differences.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeScalingConfig {
    pub dt0: f64,
    /// Area threshold; `None` means `10⁻⁴` of the particle area.
    #[serde(default)]
    pub tau: Option<f64>,
    #[serde(default = "default_max_steps")]
    pub max_steps: usize,
}

fn default_max_steps() -> usize {
    5000
}

impl TimeScalingConfig {
    pub fn new(dt0: f64) -> Self {
        TimeScalingConfig { dt0, tau: None, max_steps: default_max_steps() }
    }

    pub fn tau_for(&self, area: f64) -> f64 {
        self.tau.unwrap_or(1e-4 * area)
    }
}

/// Continues while the particle moves by more than `τ`; once it settles,
/// halves `δt` unless it settled within `τ` of the previous settled state, in
/// which case it stops.
pub fn run_algorithm3(
    s: &ObstacleState,
    cfg: &TimeScalingConfig,
    observer: &mut dyn Observer,
) -> Result<Trajectory, ObstacleError> {
    if !(cfg.dt0 > 0.0) {
        return Err(ObstacleError::InvalidParameter(format!("initial time step {}", cfg.dt0)));
    }
    let tau = cfg.tau_for(s.area());
    if !(tau > 0.0) {
        return Err(ObstacleError::InvalidParameter(format!("threshold τ = {tau}")));
    }
    let mut state = s.with_dt(cfg.dt0)?;
    let mut rec = Recorder::new(&state, observer, true);
    let mut reference = state.particle.clone();
    let mut halvings = Vec::new();
    let mut steps = 0;
    loop {
        if steps >= cfg.max_steps {
            return Err(ObstacleError::MaxSteps { steps });
        }
        let next = step_algorithm2(&state)?;
        steps += 1;
        rec.push(&next);
        let moved = symmetric_difference(&state.particle, &next.particle)?;
        if moved > tau {
            state = next;
            continue;
        }
        let drift = symmetric_difference(&reference, &next.particle)?;
        if drift >= tau {
            let dt = next.dt() * 0.5;
            reference = next.particle.clone();
            state = next.with_dt(dt)?;
            halvings.push((steps, dt));
        } else {
            state = next;
            break;
        }
    }
    Ok(Trajectory {
        final_state: state,
        steps,
        energies: rec.energies,
        counts: rec.counts,
        events: rec.events,
        halvings,
        stationary: true,
    })
}

/// Contact angles of the particle boundary, from a line fit through the
/// linearly interpolated crossings of `{φ = δ}` with the rows in `band`.
pub fn measure_contact_angles(s: &ObstacleState, band: FitBand) -> Result<ContactAngles, ObstacleError> {
    let grid = *s.grid();
    let n = grid.n();
    let j0 = grid.first_row_at_or_above(0.0);
    if j0 >= n || (0..n).all(|i| s.particle.values()[j0 * n + i] == 0.0) {
        return Err(ObstacleError::NoContact);
    }
    let phi = compute_phi(s);
    let level = selection_level(&phi, s);
    let neg = phi.map(|v| -v);
    let mut left = Vec::new();
    let mut right = Vec::new();
    for j in (j0 + band.lower)..=(j0 + band.upper).min(n - 1) {
        let row = &neg.values()[j * n..(j + 1) * n];
        let y = grid.y(j);
        let crossings = row_crossings(row, -level);
        if crossings.is_empty() {
            return Err(ObstacleError::NoContact);
        }
        let x_at = |t: f64| grid.x(0) + t * grid.dx();
        left.push([x_at(crossings[0]), y]);
        right.push([x_at(*crossings.last().expect("non-empty")), y]);
    }
    let (_, bl) = contact::fit_line(&left).ok_or(ObstacleError::NoContact)?;
    let (_, br) = contact::fit_line(&right).ok_or(ObstacleError::NoContact)?;
    Ok(ContactAngles { left: contact::left_angle_from_slope(bl), right: contact::right_angle_from_slope(br) })
}

/// Fractional column positions where `row` crosses `level`, left to right.
fn row_crossings(row: &[f64], level: f64) -> Vec<f64> {
    let mut out = Vec::new();
    for i in 0..row.len() - 1 {
        let (a, b) = (row[i] - level, row[i + 1] - level);
        if (a < 0.0) != (b < 0.0) {
            out.push(i as f64 + a / (a - b));
        }
    }
    out
}

/// Midpoint between the largest selected and the smallest rejected `φ` in
/// the upper region.
fn selection_level(phi: &ScalarField, s: &ObstacleState) -> f64 {
    let mut inside = f64::NEG_INFINITY;
    let mut outside = f64::INFINITY;
    for ((&p, &u), &up) in phi.values().iter().zip(s.particle.values()).zip(s.up.values()) {
        if up == 0.0 {
            continue;
        }
        if u == 1.0 {
            inside = inside.max(p);
        } else {
            outside = outside.min(p);
        }
    }
    if inside.is_finite() && outside.is_finite() {
        0.5 * (inside + outside)
    } else if inside.is_finite() {
        inside
    } else {
        outside
    }
}
