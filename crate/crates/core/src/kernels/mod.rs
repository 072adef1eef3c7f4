//! Convolution kernels for threshold dynamics.
//!
//! A kernel is stored through its unit-time form `K`; the time-`δt` kernel is
//! `K_δt(x) = δt⁻¹ K(x / √δt)` with transform `K̂(√δt ξ)`. Families known in
//! closed Fourier form are sampled in frequency space; the others are sampled
//! in physical space at the requested scale and transformed.
//!
//! Mobilities follow the line-integral convention `μ_K(n) = (∫_{n⊥} K)⁻¹`.
//! With `γ_K(n) = ½ ∫ |n·y| K(y) dy` the interface moves with normal velocity
//! `½ μ_K (γ_K + γ_K'') κ`, so the Gaussian (`γ_K = 1/√π`, `μ_K = 2√π`)
//! gives `V = κ`.

pub mod ee;
pub mod ejz;
mod validate;

pub use validate::{induced_mobility, induced_surface_tension, KernelProbe};

use std::f64::consts::PI;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::anisotropy::{normal_angle, Anisotropy, AnisotropyError, AnisotropyTag};
use crate::grid::{real_fft_plan, Grid, RealFft2, ScalarField};
use crate::par::{self, Execution};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum KernelError {
    #[error("kernel families built from γ need a weak anisotropy (min γ+γ'' = {margin:.4})")]
    StrongAnisotropy { margin: f64 },
    #[error("inverse cosine transform is negative ({weight:.3e}) at θ = {theta:.4}; γ is not a zonoid")]
    NegativeWeight { theta: f64, weight: f64 },
    #[error("σ = μ(γ+γ'') is not positive ({value:.3e}) at θ = {theta:.4}")]
    NonpositiveSigma { theta: f64, value: f64 },
    #[error("{0} must satisfy γ(θ + π) = γ(θ) for an even kernel")]
    NotCentrallySymmetric(&'static str),
    #[error("invalid kernel parameter: {0}")]
    InvalidParameter(String),
    #[error("kernel check failed: {0}")]
    Invariant(String),
    #[error("line integral of the kernel vanishes in direction ({0:.4}, {1:.4})")]
    ZeroLineMass(f64, f64),
    #[error(transparent)]
    Anisotropy(#[from] AnisotropyError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case", deny_unknown_fields)]
pub enum KernelFamily {
    Gaussian,
    Bbc,
    Ee {
        #[serde(default = "default_epsilon")]
        epsilon: f64,
        #[serde(default = "default_directions")]
        directions: usize,
    },
    EjzPhysical,
    EjzFourier,
}

fn default_epsilon() -> f64 {
    0.1
}

fn default_directions() -> usize {
    ee::DEFAULT_DIRECTIONS
}

impl KernelFamily {
    pub fn name(&self) -> &'static str {
        match self {
            KernelFamily::Gaussian => "gaussian",
            KernelFamily::Bbc => "bbc",
            KernelFamily::Ee { .. } => "ee",
            KernelFamily::EjzPhysical => "ejz-physical",
            KernelFamily::EjzFourier => "ejz-fourier",
        }
    }

    /// True when the transform is nonnegative by construction.
    pub fn has_nonnegative_symbol(&self) -> bool {
        matches!(self, KernelFamily::Gaussian | KernelFamily::Bbc | KernelFamily::EjzFourier)
    }
}

/// What a kernel should realize.
///
/// The target mobility is `mobility_scale · mobility(θ)` in the line-integral
/// convention. Families with a fixed mobility ignore it.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelSpec {
    pub family: KernelFamily,
    pub anisotropy: Anisotropy,
    pub mobility: Anisotropy,
    pub mobility_scale: f64,
}

impl KernelSpec {
    pub fn gaussian() -> Self {
        let one = Anisotropy::constant(1.0).expect("positive constant");
        KernelSpec { family: KernelFamily::Gaussian, anisotropy: one.clone(), mobility: one, mobility_scale: 1.0 }
    }

    pub fn bbc(gamma: Anisotropy) -> Self {
        KernelSpec { family: KernelFamily::Bbc, mobility: gamma.clone(), anisotropy: gamma, mobility_scale: 1.0 }
    }

    pub fn ee(gamma: Anisotropy, epsilon: f64, directions: usize) -> Self {
        KernelSpec {
            family: KernelFamily::Ee { epsilon, directions },
            mobility: gamma.clone(),
            anisotropy: gamma,
            mobility_scale: 1.0,
        }
    }

    pub fn ejz_physical(gamma: Anisotropy, mobility: Anisotropy) -> Self {
        KernelSpec { family: KernelFamily::EjzPhysical, anisotropy: gamma, mobility, mobility_scale: 1.0 }
    }

    pub fn ejz_fourier(gamma: Anisotropy, mobility: Anisotropy) -> Self {
        KernelSpec { family: KernelFamily::EjzFourier, anisotropy: gamma, mobility, mobility_scale: 1.0 }
    }

    pub fn with_mobility_scale(mut self, scale: f64) -> Self {
        self.mobility_scale = scale;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PhysicalOrigin {
    AnalyticFourier,
    SampledPhysical,
}

#[derive(Debug, Clone)]
enum Profile {
    Gaussian,
    Bbc { gamma: Anisotropy },
    EjzFourier { gamma: Anisotropy, mobility: Anisotropy, scale: f64, c: f64 },
    Ee { dirs: Vec<ee::Direction>, epsilon: f64 },
    EjzPhysical { gamma: Anisotropy, mobility: Anisotropy, scale: f64 },
}

impl Profile {
    fn symbol(&self, xi: [f64; 2]) -> f64 {
        let four_pi2 = 4.0 * PI * PI;
        match self {
            Profile::Gaussian => (-four_pi2 * (xi[0] * xi[0] + xi[1] * xi[1])).exp(),
            Profile::Bbc { gamma } => {
                let g = gamma.homogeneous(xi);
                (-four_pi2 * g * g).exp()
            }
            Profile::EjzFourier { gamma, mobility, scale, c } => {
                let r = xi[0].hypot(xi[1]);
                if r == 0.0 {
                    return 1.0;
                }
                let co = ejz::fourier_coefficients(gamma, mobility, *scale, *c, normal_angle(xi[0], xi[1]));
                ejz::fourier_symbol(r, co)
            }
            Profile::Ee { .. } | Profile::EjzPhysical { .. } => unreachable!("physical profiles have no symbol"),
        }
    }

    fn value(&self, x: [f64; 2]) -> f64 {
        match self {
            Profile::Ee { dirs, epsilon } => ee::value(dirs, *epsilon, x),
            Profile::EjzPhysical { gamma, mobility, scale } => {
                let r = x[0].hypot(x[1]);
                if r == 0.0 {
                    return 0.0;
                }
                let co = ejz::physical_coefficients(gamma, mobility, *scale, normal_angle(x[0], x[1]));
                co.alpha * ejz::bump(r * co.beta)
            }
            _ => unreachable!("analytic profiles are sampled in frequency space"),
        }
    }

    fn origin(&self) -> PhysicalOrigin {
        match self {
            Profile::Ee { .. } | Profile::EjzPhysical { .. } => PhysicalOrigin::SampledPhysical,
            _ => PhysicalOrigin::AnalyticFourier,
        }
    }
}

/// A kernel realized on a grid.
#[derive(Debug, Clone)]
pub struct SampledKernel {
    spec: KernelSpec,
    grid: Grid,
    exec: Execution,
    profile: Profile,
    /// Unit-time multiplier in the half-spectrum layout of [`RealFft2`].
    spectral: Vec<f64>,
    amplitude: f64,
    solvability_c: Option<f64>,
}

/// A kernel rescaled to one time step, ready to convolve.
#[derive(Debug, Clone)]
pub struct ScaledKernel {
    grid: Grid,
    dt: f64,
    multiplier: Arc<Vec<f64>>,
    plan: Arc<RealFft2>,
}

impl ScaledKernel {
    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    /// Discrete mass `Σ K_δt dx²`, the zero-frequency multiplier.
    pub fn mass(&self) -> f64 {
        self.multiplier[0]
    }

    pub fn multiplier(&self) -> &[f64] {
        &self.multiplier
    }

    /// Smallest multiplier value; nonnegative multipliers make the scheme
    /// energy-stable.
    pub fn min_multiplier(&self) -> f64 {
        self.multiplier.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// `K_δt * f`.
    pub fn apply(&self, f: &ScalarField) -> ScalarField {
        assert_eq!(f.grid(), &self.grid, "field and kernel grids differ");
        let out = self.plan.convolve(f.values(), &self.multiplier);
        ScalarField::from_vec_unchecked(self.grid, out)
    }

    /// Physical samples of `K_δt` with the origin at index 0.
    pub fn physical_samples(&self) -> Vec<f64> {
        let spec = self.multiplier.iter().map(|&m| realfft::num_complex::Complex64::new(m, 0.0)).collect();
        let inv_dx2 = 1.0 / self.grid.cell_area();
        self.plan.inverse(spec).into_iter().map(|v| v * inv_dx2).collect()
    }
}

fn check_weak(gamma: &Anisotropy) -> Result<(), KernelError> {
    let class = gamma.classify(3600);
    if class.tag == AnisotropyTag::Strong {
        return Err(KernelError::StrongAnisotropy { margin: class.margin });
    }
    Ok(())
}

impl SampledKernel {
    pub fn build(spec: KernelSpec, grid: Grid) -> Result<Self, KernelError> {
        Self::build_with(spec, grid, Execution::default())
    }

    pub fn build_with(spec: KernelSpec, grid: Grid, exec: Execution) -> Result<Self, KernelError> {
        if !(spec.mobility_scale > 0.0 && spec.mobility_scale.is_finite()) {
            return Err(KernelError::InvalidParameter(format!("mobility scale {}", spec.mobility_scale)));
        }
        let profile = match &spec.family {
            KernelFamily::Gaussian => Profile::Gaussian,
            KernelFamily::Bbc => {
                check_weak(&spec.anisotropy)?;
                if !spec.anisotropy.is_centrally_symmetric() {
                    return Err(KernelError::NotCentrallySymmetric("anisotropy"));
                }
                Profile::Bbc { gamma: spec.anisotropy.clone() }
            }
            KernelFamily::Ee { epsilon, directions } => {
                ee::check_epsilon(*epsilon)?;
                if !spec.anisotropy.is_centrally_symmetric() {
                    return Err(KernelError::NotCentrallySymmetric("anisotropy"));
                }
                Profile::Ee { dirs: ee::directions(&spec.anisotropy, *directions)?, epsilon: *epsilon }
            }
            KernelFamily::EjzPhysical | KernelFamily::EjzFourier => {
                check_weak(&spec.anisotropy)?;
                if !spec.anisotropy.is_centrally_symmetric() {
                    return Err(KernelError::NotCentrallySymmetric("anisotropy"));
                }
                if !spec.mobility.is_centrally_symmetric() {
                    return Err(KernelError::NotCentrallySymmetric("mobility"));
                }
                for k in 0..3600 {
                    let theta = std::f64::consts::TAU * k as f64 / 3600.0;
                    let value = ejz::sigma(&spec.anisotropy, &spec.mobility, spec.mobility_scale, theta);
                    if !(value > 0.0) {
                        return Err(KernelError::NonpositiveSigma { theta, value });
                    }
                }
                let (gamma, mobility, scale) = (spec.anisotropy.clone(), spec.mobility.clone(), spec.mobility_scale);
                if spec.family == KernelFamily::EjzPhysical {
                    Profile::EjzPhysical { gamma, mobility, scale }
                } else {
                    let c = ejz::solvability_constant(&gamma, &mobility, scale, 3600);
                    Profile::EjzFourier { gamma, mobility, scale, c }
                }
            }
        };
        let solvability_c = match &profile {
            Profile::EjzFourier { c, .. } => Some(*c),
            _ => None,
        };
        let mut kernel =
            SampledKernel { spec, grid, exec, profile, spectral: Vec::new(), amplitude: 1.0, solvability_c };
        kernel.spectral = kernel.multiplier_at(1.0);
        kernel.check_invariants()?;
        Ok(kernel)
    }

    fn check_invariants(&self) -> Result<(), KernelError> {
        let n = self.grid.n();
        if let Some(k) = self.spectral.iter().position(|v| !v.is_finite()) {
            return Err(KernelError::Invariant(format!("non-finite spectral sample at {k}")));
        }
        if !(self.mass() > 0.0) {
            return Err(KernelError::Invariant(format!("mass {} is not positive", self.mass())));
        }
        // the kx = 0 and kx = n/2 columns hold both ±ky
        for kx in [0, n / 2] {
            let col = &self.spectral[kx * n..(kx + 1) * n];
            for ky in 1..n {
                let (a, b) = (col[ky], col[n - ky]);
                if (a - b).abs() > 1e-12 * self.mass().max(1.0) {
                    return Err(KernelError::Invariant(format!("K̂ not even at ({kx}, {ky})")));
                }
            }
        }
        if self.spec.family.has_nonnegative_symbol() {
            if let Some(k) = self.spectral.iter().position(|&v| v < 0.0) {
                return Err(KernelError::Invariant(format!("negative spectral sample {}", self.spectral[k])));
            }
        }
        if self.origin() == PhysicalOrigin::SampledPhysical {
            let samples = self.sample_physical(1.0);
            if samples.iter().any(|&v| v < 0.0) {
                return Err(KernelError::Invariant("negative physical sample".into()));
            }
        }
        Ok(())
    }

    pub fn spec(&self) -> &KernelSpec {
        &self.spec
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn execution(&self) -> Execution {
        self.exec
    }

    pub fn origin(&self) -> PhysicalOrigin {
        self.profile.origin()
    }

    /// Unit-time multiplier in the half-spectrum layout.
    pub fn spectral(&self) -> &[f64] {
        &self.spectral
    }

    /// Unit-time multiplier at DFT bin `(kx, ky)` of the full lattice.
    pub fn spectral_at(&self, kx: usize, ky: usize) -> f64 {
        let n = self.grid.n();
        let (kx, ky) = if kx <= n / 2 { (kx, ky) } else { (n - kx, (n - ky) % n) };
        self.spectral[kx * n + ky]
    }

    /// `K̂(0)` at unit time.
    pub fn mass(&self) -> f64 {
        self.spectral[0]
    }

    /// Solvability constant of the Fourier design; its realized mobility is
    /// the target divided by `c²`.
    pub fn solvability_constant(&self) -> Option<f64> {
        self.solvability_c
    }

    /// Mobility the kernel is designed to realize in direction `θ`, in the
    /// line-integral convention.
    pub fn design_mobility(&self, theta: f64) -> f64 {
        let spec = &self.spec;
        let g = spec.anisotropy.value(theta);
        let sqrt_pi = PI.sqrt();
        match &self.profile {
            Profile::Gaussian => 2.0 * sqrt_pi / self.amplitude,
            Profile::Bbc { .. } => 2.0 * sqrt_pi * g / self.amplitude,
            Profile::Ee { dirs, epsilon } => {
                ee::mobility_from(dirs, *epsilon, crate::anisotropy::normal(theta)) / self.amplitude
            }
            Profile::EjzPhysical { mobility, scale, .. } => scale * mobility.value(theta) / self.amplitude,
            Profile::EjzFourier { mobility, scale, c, .. } => scale * mobility.value(theta) / (c * c * self.amplitude),
        }
    }

    /// Surface tension the kernel is designed to realize in direction `θ`.
    pub fn design_surface_tension(&self, theta: f64) -> f64 {
        let spec = &self.spec;
        let g = spec.anisotropy.value(theta);
        let base = match &self.profile {
            Profile::Gaussian => 1.0 / PI.sqrt(),
            Profile::Bbc { .. } => g / PI.sqrt(),
            Profile::Ee { dirs, epsilon } => {
                let n = crate::anisotropy::normal(theta);
                let e2 = epsilon * epsilon;
                dirs.iter()
                    .map(|d| {
                        let c = d.nu[0] * n[0] + d.nu[1] * n[1];
                        d.weight * ((1.0 - e2) * c * c + e2).sqrt()
                    })
                    .sum()
            }
            Profile::EjzPhysical { .. } | Profile::EjzFourier { .. } => g,
        };
        base * self.amplitude
    }

    /// The same kernel multiplied by `factor`.
    ///
    /// Scaling the kernel scales its surface tension by `factor` and divides
    /// its mobility by it.
    pub fn with_amplitude(&self, factor: f64) -> Result<Self, KernelError> {
        if !(factor > 0.0 && factor.is_finite()) {
            return Err(KernelError::InvalidParameter(format!("amplitude {factor}")));
        }
        let mut k = self.clone();
        k.amplitude *= factor;
        for v in &mut k.spectral {
            *v *= factor;
        }
        Ok(k)
    }

    /// Multiplier for `K_δt`.
    pub fn at_scale(&self, dt: f64) -> Result<ScaledKernel, KernelError> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(KernelError::InvalidParameter(format!("time step {dt}")));
        }
        let multiplier = if dt == 1.0 { self.spectral.clone() } else { self.multiplier_at(dt) };
        Ok(ScaledKernel {
            grid: self.grid,
            dt,
            multiplier: Arc::new(multiplier),
            plan: real_fft_plan(self.grid.n(), self.exec),
        })
    }

    fn multiplier_at(&self, dt: f64) -> Vec<f64> {
        let plan = real_fft_plan(self.grid.n(), self.exec);
        let s = dt.sqrt();
        let amp = self.amplitude;
        match self.profile.origin() {
            PhysicalOrigin::AnalyticFourier => {
                plan.multiplier(&self.grid, |fx, fy| amp * self.profile.symbol([s * fx, s * fy]))
            }
            PhysicalOrigin::SampledPhysical => {
                let samples = self.sample_physical(dt);
                let dx2 = self.grid.cell_area();
                plan.forward(&samples).iter().map(|c| c.re * dx2).collect()
            }
        }
    }

    /// Direct samples of `K_δt` for physical-space families, origin at index 0.
    fn sample_physical(&self, dt: f64) -> Vec<f64> {
        let n = self.grid.n();
        let s = dt.sqrt();
        let scale = self.amplitude / dt;
        let mut out = vec![0.0; n * n];
        let grid = self.grid;
        par::chunks_mut(self.exec, &mut out, n, |j, row| {
            let y = grid.wrapped_offset(j) / s;
            for (i, v) in row.iter_mut().enumerate() {
                let x = grid.wrapped_offset(i) / s;
                *v = scale * self.profile.value([x, y]);
            }
        });
        out
    }

    /// Physical samples of `K_δt` on the grid, origin at index 0.
    pub fn physical_samples(&self, dt: f64) -> Result<Vec<f64>, KernelError> {
        match self.origin() {
            PhysicalOrigin::SampledPhysical => Ok(self.sample_physical(dt)),
            PhysicalOrigin::AnalyticFourier => Ok(self.at_scale(dt)?.physical_samples()),
        }
    }

    /// Physical samples recentred so that the origin sits at the grid point
    /// nearest `(0, 0)`.
    pub fn physical_field(&self, dt: f64) -> Result<ScalarField, KernelError> {
        let samples = self.physical_samples(dt)?;
        let n = self.grid.n();
        let i0 = ((0.0 - self.grid.bounds()[0]) / self.grid.dx()).round() as usize % n;
        let j0 = ((0.0 - self.grid.bounds()[2]) / self.grid.dx()).round() as usize % n;
        let mut v = vec![0.0; n * n];
        for j in 0..n {
            for i in 0..n {
                v[((j + j0) % n) * n + (i + i0) % n] = samples[j * n + i];
            }
        }
        Ok(ScalarField::from_vec_unchecked(self.grid, v))
    }
}

/// Shorthand for [`SampledKernel::build`] with the Gaussian.
pub fn build_gaussian(grid: Grid) -> SampledKernel {
    SampledKernel::build(KernelSpec::gaussian(), grid).expect("Gaussian kernel is always admissible")
}

pub fn build_bbc(gamma: Anisotropy, grid: Grid) -> Result<SampledKernel, KernelError> {
    SampledKernel::build(KernelSpec::bbc(gamma), grid)
}

pub fn build_ee(gamma: Anisotropy, epsilon: f64, n_dirs: usize, grid: Grid) -> Result<SampledKernel, KernelError> {
    SampledKernel::build(KernelSpec::ee(gamma, epsilon, n_dirs), grid)
}

pub fn build_ejz_physical(gamma: Anisotropy, mobility: Anisotropy, grid: Grid) -> Result<SampledKernel, KernelError> {
    SampledKernel::build(KernelSpec::ejz_physical(gamma, mobility), grid)
}

pub fn build_ejz_fourier(gamma: Anisotropy, mobility: Anisotropy, grid: Grid) -> Result<SampledKernel, KernelError> {
    SampledKernel::build(KernelSpec::ejz_fourier(gamma, mobility), grid)
}
