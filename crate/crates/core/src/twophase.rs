//! Free-particle evolution by convolution and thresholding.
//!
//! One step convolves the particle indicator with `K_δt` and keeps the points
//! where the result reaches half the kernel mass. The scheme decreases the
//! energy `δt^{-1/2} ∫_{Ω∖P} K_δt * 𝟙_P` whenever `K̂ ≥ 0`.

use std::cmp::Ordering;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::anisotropy::{Anisotropy, AnisotropyError};
use crate::grid::{l1_difference, subgrid_extract_with, Grid, GridError, ScalarField, SubgridInterface};
use crate::kernels::{KernelError, KernelFamily, KernelSpec, SampledKernel, ScaledKernel};
use crate::par::{self, Execution};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TwoPhaseError {
    #[error("particle vanished at step {step}")]
    Extinct { step: usize },
    #[error("self-similar solution is only defined up to t = 1/2, got t = {t}")]
    PastExtinction { t: f64 },
    #[error("indicator value {value} at index {index} is not 0 or 1")]
    NotIndicator { index: usize, value: f64 },
    #[error("area count {requested} exceeds the {available} grid points")]
    CountTooLarge { requested: usize, available: usize },
    #[error("unsupported setting: {0}")]
    Unsupported(String),
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error(transparent)]
    Anisotropy(#[from] AnisotropyError),
}

/// Particle indicator together with the kernel and time step that move it.
#[derive(Debug, Clone)]
pub struct TwoPhaseState {
    indicator: ScalarField,
    kernel: SampledKernel,
    scaled: ScaledKernel,
    dt: f64,
    step_index: usize,
    subgrid: Option<SubgridInterface>,
}

impl TwoPhaseState {
    pub fn new(indicator: ScalarField, kernel: SampledKernel, dt: f64) -> Result<Self, TwoPhaseError> {
        indicator.grid().check_same(kernel.grid())?;
        check_indicator(&indicator)?;
        let scaled = kernel.at_scale(dt)?;
        Ok(TwoPhaseState { indicator, kernel, scaled, dt, step_index: 0, subgrid: None })
    }

    pub fn indicator(&self) -> &ScalarField {
        &self.indicator
    }

    pub fn kernel(&self) -> &SampledKernel {
        &self.kernel
    }

    pub fn scaled_kernel(&self) -> &ScaledKernel {
        &self.scaled
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn step_index(&self) -> usize {
        self.step_index
    }

    /// Sub-cell reconstruction from the last step, if any.
    pub fn subgrid(&self) -> Option<&SubgridInterface> {
        self.subgrid.as_ref()
    }

    pub fn grid(&self) -> &Grid {
        self.indicator.grid()
    }

    /// Number of grid points inside the particle.
    pub fn count(&self) -> usize {
        self.indicator.count_at_least(0.5)
    }

    /// Grid-point area `count · dx²`.
    pub fn area(&self) -> f64 {
        self.count() as f64 * self.grid().cell_area()
    }

    /// `U = K_δt * 𝟙_P`.
    pub fn convolution(&self) -> ScalarField {
        self.scaled.apply(&self.indicator)
    }

    /// Advances by one thresholding step.
    pub fn step(&self) -> Result<Self, TwoPhaseError> {
        step_algorithm1(self)
    }

    pub fn energy(&self) -> f64 {
        lyapunov_energy(self)
    }

    fn successor(&self, indicator: ScalarField, subgrid: Option<SubgridInterface>) -> Self {
        TwoPhaseState {
            indicator,
            kernel: self.kernel.clone(),
            scaled: self.scaled.clone(),
            dt: self.dt,
            step_index: self.step_index + 1,
            subgrid,
        }
    }
}

fn check_indicator(f: &ScalarField) -> Result<(), TwoPhaseError> {
    match f.values().iter().position(|&v| v != 0.0 && v != 1.0) {
        Some(index) => Err(TwoPhaseError::NotIndicator { index, value: f.values()[index] }),
        None => Ok(()),
    }
}

/// `P ← {U ≥ ½ mass}`; subgrid weights of the same level set are kept for
/// measurement.
pub fn step_algorithm1(s: &TwoPhaseState) -> Result<TwoPhaseState, TwoPhaseError> {
    let u = s.convolution();
    let level = 0.5 * s.scaled.mass();
    let next = u.map(|v| if v >= level { 1.0 } else { 0.0 });
    if next.count_at_least(0.5) == 0 {
        return Err(TwoPhaseError::Extinct { step: s.step_index + 1 });
    }
    let sub = subgrid_extract_with(&u, level, s.kernel.execution());
    Ok(s.successor(next, Some(sub)))
}

/// Keeps the `count` points with the largest `U`, so the grid-point area is
/// exactly `count · dx²`.
pub fn step_area_preserving(s: &TwoPhaseState, count: usize) -> Result<TwoPhaseState, TwoPhaseError> {
    let u = s.convolution();
    let next = select_largest(&u, count)?;
    Ok(s.successor(next, None))
}

/// Indicator of the `count` largest values; equal values go to the lower
/// row-major index first.
pub fn select_largest(u: &ScalarField, count: usize) -> Result<ScalarField, TwoPhaseError> {
    let v = u.values();
    if count > v.len() {
        return Err(TwoPhaseError::CountTooLarge { requested: count, available: v.len() });
    }
    let mut out = vec![0.0; v.len()];
    if count > 0 {
        let mut idx: Vec<usize> = (0..v.len()).collect();
        let cmp = |a: &usize, b: &usize| -> Ordering { v[*b].total_cmp(&v[*a]).then(a.cmp(b)) };
        if count < idx.len() {
            idx.select_nth_unstable_by(count - 1, cmp);
        }
        for &i in &idx[..count] {
            out[i] = 1.0;
        }
    }
    Ok(ScalarField::new(*u.grid(), out)?)
}

/// `dx² / √δt · Σ_{x ∉ P} (K_δt * 𝟙_P)(x)`.
pub fn lyapunov_energy(s: &TwoPhaseState) -> f64 {
    let u = s.convolution();
    let outside: f64 = u.values().iter().zip(s.indicator.values()).filter(|(_, &c)| c == 0.0).map(|(&x, _)| x).sum();
    outside * s.grid().cell_area() / s.dt.sqrt()
}

/// Point with normal angle `θ` on the Wulff shape of `Elliptic(a, b)` at
/// time `t` of the self-similar shrinking solution, scaled by `√(1 - 2t)`.
pub fn selfsimilar_oracle(a: f64, b: f64, t: f64, theta: f64) -> Result<[f64; 2], TwoPhaseError> {
    let factor = selfsimilar_factor(t)?;
    let p = Anisotropy::elliptic(a, b)?.wulff_point(theta);
    Ok([factor * p[0], factor * p[1]])
}

/// `√(1 - 2t)`.
pub fn selfsimilar_factor(t: f64) -> Result<f64, TwoPhaseError> {
    if t > 0.5 || t.is_nan() {
        return Err(TwoPhaseError::PastExtinction { t });
    }
    Ok((1.0 - 2.0 * t).max(0.0).sqrt())
}

/// Sub-cell indicator of the ellipse `(x/a)² + (y/b)² ≤ (1 - 2t)`.
pub fn ellipse_oracle(grid: &Grid, a: f64, b: f64, t: f64, exec: Execution) -> Result<SubgridInterface, TwoPhaseError> {
    let eta = selfsimilar_factor(t)?;
    let g = ScalarField::from_fn(*grid, |x, y| eta - ((x / a).powi(2) + (y / b).powi(2)).sqrt());
    Ok(subgrid_extract_with(&g, 0.0, exec))
}

/// A convergence study of the shrinking ellipse.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceSpec {
    pub family: KernelFamily,
    /// Grid sizes on the standard domain.
    pub sizes: Vec<usize>,
    pub time_steps: Vec<f64>,
    /// Comparison time; the ellipse vanishes at `t = 1/2`.
    pub final_time: f64,
}

impl ConvergenceSpec {
    pub fn new(family: KernelFamily, sizes: Vec<usize>, time_steps: Vec<f64>) -> Self {
        ConvergenceSpec { family, sizes, time_steps, final_time: 0.25 }
    }
}

/// One `(dx, δt)` cell of a convergence table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub kernel: String,
    pub n: usize,
    pub dx: f64,
    pub dt: f64,
    pub steps: usize,
    /// Largest `L¹` distance to the exact solution over all steps.
    pub error: f64,
    /// `log₂(e(2δt) / e(δt))` against the next larger step at the same `n`.
    pub order: Option<f64>,
    pub extinct_at: Option<usize>,
    pub wall_seconds: f64,
}

/// Anisotropy whose Wulff shape is `x² + (y/2)² = 1`.
pub fn convergence_anisotropy() -> Anisotropy {
    Anisotropy::elliptic(1.0, 2.0).expect("valid axes")
}

/// Kernel for the study, with mobility `μ = γ` in the dynamic sense so that
/// the Wulff shape shrinks self-similarly.
pub fn convergence_kernel(family: &KernelFamily, grid: Grid, exec: Execution) -> Result<SampledKernel, TwoPhaseError> {
    let gamma = convergence_anisotropy();
    let spec = match family {
        KernelFamily::Bbc => KernelSpec::bbc(gamma),
        KernelFamily::EjzPhysical => KernelSpec::ejz_physical(gamma.clone(), gamma).with_mobility_scale(2.0),
        KernelFamily::EjzFourier => KernelSpec::ejz_fourier(gamma.clone(), gamma).with_mobility_scale(2.0),
        other => {
            return Err(TwoPhaseError::Unsupported(format!(
                "no exact comparison solution for the {} kernel",
                other.name()
            )))
        }
    };
    Ok(SampledKernel::build_with(spec, grid, exec)?)
}

/// Evolves the ellipse for every `(n, δt)` pair and records the worst
/// `L¹` error against the exact solution up to the final time.
pub fn run_convergence(spec: &ConvergenceSpec, exec: Execution) -> Result<Vec<ConvergenceRow>, TwoPhaseError> {
    let mut cells = Vec::new();
    for &n in &spec.sizes {
        let grid = Grid::standard(n)?;
        let kernel = convergence_kernel(&spec.family, grid, exec)?;
        for &dt in &spec.time_steps {
            cells.push((kernel.clone(), dt));
        }
    }
    let results = par::map_slice(exec, &cells, |(kernel, dt)| convergence_cell(kernel, *dt, spec.final_time, exec));
    let mut rows = results.into_iter().collect::<Result<Vec<_>, _>>()?;
    for i in 0..rows.len() {
        let coarser = rows
            .iter()
            .filter(|r| r.n == rows[i].n && (r.dt - 2.0 * rows[i].dt).abs() <= 1e-12 * r.dt)
            .map(|r| r.error)
            .next();
        rows[i].order = coarser.map(|e| (e / rows[i].error).log2());
    }
    Ok(rows)
}

fn convergence_cell(
    kernel: &SampledKernel,
    dt: f64,
    final_time: f64,
    exec: Execution,
) -> Result<ConvergenceRow, TwoPhaseError> {
    let start = Instant::now();
    let grid = *kernel.grid();
    let (a, b) = (1.0, 2.0);
    let steps = (final_time / dt).round() as usize;
    let initial = ScalarField::indicator(grid, |x, y| (x / a).powi(2) + (y / b).powi(2) <= 1.0);
    let mut state = TwoPhaseState::new(initial, kernel.clone(), dt)?;
    let mut error: f64 = 0.0;
    let mut extinct_at = None;
    for k in 1..=steps {
        let exact = ellipse_oracle(&grid, a, b, k as f64 * dt, exec)?;
        let e = if extinct_at.is_some() {
            exact.area()
        } else {
            match step_algorithm1(&state) {
                Ok(next) => {
                    state = next;
                    l1_difference(state.subgrid().expect("set by the step"), &exact)?
                }
                Err(TwoPhaseError::Extinct { step }) => {
                    extinct_at = Some(step);
                    exact.area()
                }
                Err(e) => return Err(e),
            }
        };
        error = error.max(e);
    }
    Ok(ConvergenceRow {
        kernel: kernel.spec().family.name().to_string(),
        n: grid.n(),
        dx: grid.dx(),
        dt,
        steps,
        error,
        order: None,
        extinct_at,
        wall_seconds: start.elapsed().as_secs_f64(),
    })
}

/// The time step with the smallest error at each grid size.
pub fn optimal_rows(rows: &[ConvergenceRow]) -> Vec<&ConvergenceRow> {
    let mut sizes: Vec<usize> = rows.iter().map(|r| r.n).collect();
    sizes.sort_unstable();
    sizes.dedup();
    sizes
        .into_iter()
        .filter_map(|n| rows.iter().filter(|r| r.n == n).min_by(|a, b| a.error.total_cmp(&b.error)))
        .collect()
}
