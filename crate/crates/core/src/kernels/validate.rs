//! Recovers the surface tension and mobility a sampled kernel induces, by
//! quadrature of its physical samples.
//!
//! Both quantities scale like `√δt` under `K ↦ K_δt`, so the kernel may be
//! probed at any scale `s` and the result divided by `√s`. Large scales let
//! the periodic images overlap; small scales push spectral content past the
//! Nyquist band. The probe takes the largest scale at which the kernel has
//! left the box, and otherwise the scale that best balances the two errors.

use super::{KernelError, SampledKernel};
use crate::grid::Grid;

/// Scales `2^-k` tried, largest first.
const MAX_HALVINGS: i32 = 14;
/// Allowed fraction of `Σ|K|` in the outer band of the box.
const TAIL_FRACTION: f64 = 1e-9;
/// Inner edge of the outer band, as a fraction of the side length or of the
/// Nyquist frequency.
const BAND: f64 = 0.4;

/// Physical samples of a kernel at a fixed scale, reusable across directions.
#[derive(Debug, Clone)]
pub struct KernelProbe {
    grid: Grid,
    scale: f64,
    samples: Vec<f64>,
}

impl KernelProbe {
    /// Probes at the largest scale whose samples decay inside the box.
    ///
    /// If no scale qualifies, picks the one minimizing the larger of the
    /// physical tail fraction and the spectral tail fraction.
    pub fn new(kernel: &SampledKernel) -> Result<Self, KernelError> {
        let mut best: Option<(f64, f64)> = None;
        for k in 0..=MAX_HALVINGS {
            let s = 0.5f64.powi(k);
            let probe = Self::at_scale(kernel, s)?;
            let tail = probe.tail_fraction();
            if tail <= TAIL_FRACTION {
                return Ok(probe);
            }
            let worst = tail.max(spectral_tail_fraction(kernel, s)?);
            if best.is_none_or(|(w, _)| worst < w) {
                best = Some((worst, s));
            }
        }
        let (_, s) = best.expect("at least one scale");
        Self::at_scale(kernel, s)
    }

    pub fn at_scale(kernel: &SampledKernel, scale: f64) -> Result<Self, KernelError> {
        Ok(KernelProbe { grid: *kernel.grid(), scale, samples: kernel.physical_samples(scale)? })
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// Share of `Σ|K|` with `max(|x|, |y|) ≥ 0.4 L`.
    pub fn tail_fraction(&self) -> f64 {
        let n = self.grid.n();
        let edge = BAND * self.grid.side();
        let (mut tail, mut total) = (0.0, 0.0);
        for j in 0..n {
            let y = self.grid.wrapped_offset(j).abs();
            for i in 0..n {
                let v = self.samples[j * n + i].abs();
                total += v;
                if y >= edge || self.grid.wrapped_offset(i).abs() >= edge {
                    tail += v;
                }
            }
        }
        if total > 0.0 {
            tail / total
        } else {
            0.0
        }
    }

    /// `γ_K(n) = ½ ∫ |n·y| K(y) dy`.
    pub fn surface_tension(&self, n: [f64; 2]) -> f64 {
        let g = &self.grid;
        let nn = g.n();
        let mut acc = 0.0;
        for j in 0..nn {
            let y = g.wrapped_offset(j);
            let row = &self.samples[j * nn..(j + 1) * nn];
            for (i, &v) in row.iter().enumerate() {
                acc += (n[0] * g.wrapped_offset(i) + n[1] * y).abs() * v;
            }
        }
        0.5 * acc * g.cell_area() / self.scale.sqrt()
    }

    /// `μ_K(n) = (∫_{n⊥} K)⁻¹` by bilinear interpolation along the line.
    pub fn mobility(&self, n: [f64; 2]) -> Result<f64, KernelError> {
        let g = &self.grid;
        let dx = g.dx();
        let tau = [-n[1], n[0]];
        let half = (g.n() / 2) as i64;
        let mut acc = 0.0;
        for k in -half..=half {
            let t = k as f64 * dx;
            acc += self.interpolate(t * tau[0], t * tau[1]);
        }
        let line = acc * dx * self.scale.sqrt();
        if !(line > 0.0) || !line.is_finite() {
            return Err(KernelError::ZeroLineMass(n[0], n[1]));
        }
        Ok(1.0 / line)
    }

    /// Periodic bilinear interpolation, origin at index 0.
    fn interpolate(&self, x: f64, y: f64) -> f64 {
        let n = self.grid.n();
        let dx = self.grid.dx();
        let (u, v) = (x / dx, y / dx);
        let (i0, j0) = (u.floor(), v.floor());
        let (fu, fv) = (u - i0, v - j0);
        let wrap = |k: f64| (k as i64).rem_euclid(n as i64) as usize;
        let (i0, j0) = (wrap(i0), wrap(j0));
        let (i1, j1) = ((i0 + 1) % n, (j0 + 1) % n);
        let s = &self.samples;
        (1.0 - fu) * (1.0 - fv) * s[j0 * n + i0]
            + fu * (1.0 - fv) * s[j0 * n + i1]
            + (1.0 - fu) * fv * s[j1 * n + i0]
            + fu * fv * s[j1 * n + i1]
    }
}

/// Share of `Σ|K̂|` at scale `s` with `max(|kx|, |ky|) ≥ 0.4 · n/2`.
pub fn spectral_tail_fraction(kernel: &SampledKernel, scale: f64) -> Result<f64, KernelError> {
    let scaled = kernel.at_scale(scale)?;
    let m = scaled.multiplier();
    let n = kernel.grid().n();
    let edge = BAND * (n / 2) as f64;
    let (mut tail, mut total) = (0.0, 0.0);
    for (kx, row) in m.chunks(n).enumerate() {
        for (ky, v) in row.iter().enumerate() {
            let ky = ky.min(n - ky);
            let v = v.abs();
            total += v;
            if kx as f64 >= edge || ky as f64 >= edge {
                tail += v;
            }
        }
    }
    Ok(if total > 0.0 { tail / total } else { 0.0 })
}

/// One-off surface tension query; see [`KernelProbe`] for repeated queries.
pub fn induced_surface_tension(kernel: &SampledKernel, n: [f64; 2]) -> Result<f64, KernelError> {
    Ok(KernelProbe::new(kernel)?.surface_tension(n))
}

/// One-off mobility query; see [`KernelProbe`] for repeated queries.
pub fn induced_mobility(kernel: &SampledKernel, n: [f64; 2]) -> Result<f64, KernelError> {
    KernelProbe::new(kernel)?.mobility(n)
}
