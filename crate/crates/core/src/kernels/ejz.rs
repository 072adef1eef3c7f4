//! Kernels designed to hit a prescribed surface tension and mobility.

use std::sync::OnceLock;

use quadrature::double_exponential::integrate;

use crate::anisotropy::Anisotropy;

const QUAD_TOL: f64 = 1e-12;

/// Smooth bump `exp(-1 / (x² (x - 2)²))` on `(0, 2)`, zero elsewhere.
#[inline]
pub fn bump(x: f64) -> f64 {
    if x <= 0.0 || x >= 2.0 {
        0.0
    } else {
        let q = x * (x - 2.0);
        (-1.0 / (q * q)).exp()
    }
}

/// Moments `(m₀, m₂)` of the bump on `(0, 2)`.
pub fn bump_moments() -> (f64, f64) {
    static M: OnceLock<(f64, f64)> = OnceLock::new();
    *M.get_or_init(|| {
        let m0 = integrate(bump, 0.0, 2.0, QUAD_TOL).integral;
        let m2 = integrate(|x| x * x * bump(x), 0.0, 2.0, QUAD_TOL).integral;
        (m0, m2)
    })
}

/// Radial profile coefficients of the physical-space design.
///
/// For a direction of polar angle `φ`, `K(r, φ) = α η(r β)`; both depend on
/// the stiffness and mobility at the normal angle `φ - π/2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialCoefficients {
    pub alpha: f64,
    pub beta: f64,
}

/// `σ = M (γ + γ'')` at `θ`.
pub fn sigma(gamma: &Anisotropy, mobility: &Anisotropy, mobility_scale: f64, theta: f64) -> f64 {
    mobility_scale * mobility.value(theta) * gamma.evaluate(theta).stiffness()
}

/// Coefficients realizing `γ_K = γ` and `μ_K = M` with `M = scale · μ`.
///
/// Solving the two moment conditions for the bump profile gives
/// `β² = m₂ / (m₀ σ)` and `α² = m₂ / (4 m₀³ M² σ)`.
pub fn physical_coefficients(
    gamma: &Anisotropy,
    mobility: &Anisotropy,
    mobility_scale: f64,
    polar_angle: f64,
) -> RadialCoefficients {
    let (m0, m2) = bump_moments();
    let theta = polar_angle - std::f64::consts::FRAC_PI_2;
    let m = mobility_scale * mobility.value(theta);
    let s = m * gamma.evaluate(theta).stiffness();
    RadialCoefficients { alpha: (m2 / (4.0 * m0.powi(3) * m * m * s)).sqrt(), beta: (m2 / (m0 * s)).sqrt() }
}

/// Quintic smoothstep `6t⁵ - 15t⁴ + 10t³`.
#[inline]
fn smoothstep(t: f64) -> f64 {
    t * t * t * (t * (6.0 * t - 15.0) + 10.0)
}

/// Radial exponent: 0 on `|x| ≤ 1`, `x²` on `|x| ≥ 2`, blended in between.
#[inline]
pub fn zeta(x: f64) -> f64 {
    let a = x.abs();
    if a <= 1.0 {
        0.0
    } else if a >= 2.0 {
        a * a
    } else {
        a * a * smoothstep(a - 1.0)
    }
}

/// `(s₀, s₂)` with `s₀ = (1/4π)∫ e^{-ζ}` and `s₂ = (1/4π)∫ (1 - e^{-ζ}) / x²` over ℝ.
pub fn zeta_moments() -> (f64, f64) {
    static S: OnceLock<(f64, f64)> = OnceLock::new();
    *S.get_or_init(|| {
        let four_pi = 4.0 * std::f64::consts::PI;
        let e = |x: f64| (-zeta(x)).exp();
        let half0 = 1.0 + integrate(e, 1.0, 2.0, QUAD_TOL).integral + integrate(e, 2.0, 12.0, QUAD_TOL).integral;
        let g = |x: f64| (1.0 - (-zeta(x)).exp()) / (x * x);
        const CUT: f64 = 40.0;
        // beyond CUT the integrand is 1/x² to machine precision
        let half2 = integrate(g, 1.0, 2.0, QUAD_TOL).integral + integrate(g, 2.0, CUT, QUAD_TOL).integral + 1.0 / CUT;
        (2.0 * half0 / four_pi, 2.0 * half2 / four_pi)
    })
}

/// Per-direction radii of the two-term Fourier design.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FourierCoefficients {
    pub a: f64,
    pub b: f64,
}

/// `q² - r` at normal angle `θ` for solvability constant `c`.
pub fn fourier_discriminant(gamma: &Anisotropy, mobility: &Anisotropy, mobility_scale: f64, c: f64, theta: f64) -> f64 {
    let (s0, s2) = zeta_moments();
    let g = gamma.value(theta);
    let q = c * g;
    let r = 4.0 * s0 * s2 * mobility_scale * mobility.value(theta) * g;
    q * q - r
}

/// Smallest `c ≥ 1` making the design solvable at every sampled direction.
///
/// The discriminant is `c²γ² - r`, so the bound is explicit:
/// `c = max(1, max_θ sqrt(r / γ²))`.
pub fn solvability_constant(gamma: &Anisotropy, mobility: &Anisotropy, mobility_scale: f64, samples: usize) -> f64 {
    let (s0, s2) = zeta_moments();
    let mut c: f64 = 1.0;
    for k in 0..samples {
        let theta = std::f64::consts::TAU * k as f64 / samples as f64;
        let g = gamma.value(theta);
        let r = 4.0 * s0 * s2 * mobility_scale * mobility.value(theta) * g;
        c = c.max((r / (g * g)).sqrt());
    }
    c
}

/// Radii `a, b = π/(s₂ c) (q ± sqrt(q² - r))` at normal angle `θ`.
///
/// The resulting kernel has `γ_K = γ` and `μ_K = M / c²`.
pub fn fourier_coefficients(
    gamma: &Anisotropy,
    mobility: &Anisotropy,
    mobility_scale: f64,
    c: f64,
    theta: f64,
) -> FourierCoefficients {
    let (s0, s2) = zeta_moments();
    let g = gamma.value(theta);
    let q = c * g;
    let r = 4.0 * s0 * s2 * mobility_scale * mobility.value(theta) * g;
    let root = (q * q - r).max(0.0).sqrt();
    let k = std::f64::consts::PI / (s2 * c);
    FourierCoefficients { a: k * (q + root), b: k * (q - root) }
}

/// `½ e^{-ζ(|ξ| a)} + ½ e^{-ζ(|ξ| b)}`.
#[inline]
pub fn fourier_symbol(radius: f64, coeffs: FourierCoefficients) -> f64 {
    0.5 * (-zeta(radius * coeffs.a)).exp() + 0.5 * (-zeta(radius * coeffs.b)).exp()
}
