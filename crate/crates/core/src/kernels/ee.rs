//! Superposition of thin directional Gaussians weighted by the inverse cosine
//! transform of `γ`.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use super::KernelError;
use crate::anisotropy::{normal, Anisotropy};

/// Default number of quadrature directions.
pub const DEFAULT_DIRECTIONS: usize = 256;

/// One quadrature direction `ν` with its weight already multiplied by `Δθ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Direction {
    pub nu: [f64; 2],
    pub weight: f64,
}

/// Inverse cosine transform `¼ (γ + γ'')(θ + π/2)` in two dimensions.
pub fn inverse_cosine_transform(gamma: &Anisotropy, theta: f64) -> f64 {
    0.25 * gamma.evaluate(theta + FRAC_PI_2).stiffness()
}

/// Uniform trapezoid directions with their weights.
pub fn directions(gamma: &Anisotropy, n_dirs: usize) -> Result<Vec<Direction>, KernelError> {
    if n_dirs < 64 {
        return Err(KernelError::InvalidParameter(format!("EE needs at least 64 directions, got {n_dirs}")));
    }
    let step = TAU / n_dirs as f64;
    (0..n_dirs)
        .map(|k| {
            let theta = k as f64 * step;
            let w = inverse_cosine_transform(gamma, theta);
            if w < 0.0 {
                return Err(KernelError::NegativeWeight { theta, weight: w });
            }
            Ok(Direction { nu: normal(theta), weight: w * step })
        })
        .collect()
}

pub(crate) fn check_epsilon(epsilon: f64) -> Result<(), KernelError> {
    if epsilon > 0.0 && epsilon < 1.0 {
        Ok(())
    } else {
        Err(KernelError::InvalidParameter(format!("EE width ε must lie in (0, 1), got {epsilon}")))
    }
}

/// Unit-time kernel value at `x`.
///
/// `K(x) = √π Σ w_ν g_ν(x)` with the anisotropic Gaussian
/// `g_ν(x) = (4π ε)⁻¹ exp(-(x·ν)²/4 - (x·ν⊥)²/(4ε²))`, which has unit mass.
pub fn value(dirs: &[Direction], epsilon: f64, x: [f64; 2]) -> f64 {
    let inv_e2 = 1.0 / (epsilon * epsilon);
    let mut acc = 0.0;
    for d in dirs {
        let a = x[0] * d.nu[0] + x[1] * d.nu[1];
        let b = -x[0] * d.nu[1] + x[1] * d.nu[0];
        let e = 0.25 * (a * a + b * b * inv_e2);
        if e < 700.0 {
            acc += d.weight * (-e).exp();
        }
    }
    PI.sqrt() * acc / (4.0 * PI * epsilon)
}

/// Mobility realized by the kernel in direction `n`:
/// `2 (Σ w ((1-ε²)(ν·n)² + ε²)^{-1/2})⁻¹`.
pub fn ee_mobility(gamma: &Anisotropy, epsilon: f64, n_dirs: usize, n: [f64; 2]) -> Result<f64, KernelError> {
    check_epsilon(epsilon)?;
    let dirs = directions(gamma, n_dirs)?;
    Ok(mobility_from(&dirs, epsilon, n))
}

pub(crate) fn mobility_from(dirs: &[Direction], epsilon: f64, n: [f64; 2]) -> f64 {
    let e2 = epsilon * epsilon;
    let s: f64 = dirs
        .iter()
        .map(|d| {
            let c = d.nu[0] * n[0] + d.nu[1] * n[1];
            d.weight / ((1.0 - e2) * c * c + e2).sqrt()
        })
        .sum();
    2.0 / s
}

/// Surface tension realized by the kernel: `Σ w sqrt((1-ε²)(ν·n)² + ε²)`.
pub fn ee_surface_tension(gamma: &Anisotropy, epsilon: f64, n_dirs: usize, n: [f64; 2]) -> Result<f64, KernelError> {
    check_epsilon(epsilon)?;
    let e2 = epsilon * epsilon;
    Ok(directions(gamma, n_dirs)?
        .iter()
        .map(|d| {
            let c = d.nu[0] * n[0] + d.nu[1] * n[1];
            d.weight * ((1.0 - e2) * c * c + e2).sqrt()
        })
        .sum())
}
