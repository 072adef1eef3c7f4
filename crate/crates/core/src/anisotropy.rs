//! Anisotropic surface tension as a function of the normal angle.
//!
//! Every anisotropy is evaluated in one angle convention: `θ` parametrizes the
//! outer unit normal as `n(θ) = (-sin θ, cos θ)`, so `θ = 0` is the upward
//! normal and `θ` grows counterclockwise. This is the convention in which the
//! Wulff envelope is `x = -γ sin θ - γ' cos θ`, `y = γ cos θ - γ' sin θ` and
//! the contact condition reads `γ cos θ - γ' sin θ + γ_SP - γ_SV = 0`.
//!
//! Contact angles are reported as signed normal angles: the left triple point
//! gets a positive angle, the right one a negative angle. For an isotropic
//! drop with `γ_SP - γ_SV = 0.5` that gives `(+120°, -120°)`.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::grid::Polygon;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AnisotropyError {
    #[error("surface tension must be positive, got {value} at θ = {theta}")]
    NonPositive { theta: f64, value: f64 },
    #[error("invalid anisotropy parameter: {0}")]
    InvalidParameter(String),
    #[error("Young's equation has no root for γ_SP = {gamma_sp}, γ_SV = {gamma_sv} (complete wetting or dewetting)")]
    NoRoot { gamma_sp: f64, gamma_sv: f64 },
    #[error("anisotropy is strongly anisotropic (min γ+γ'' = {margin:.4}); Winterbottom construction needs a weak anisotropy")]
    NotWeak { margin: f64 },
    #[error("truncation height {height} does not cut the Wulff shape")]
    NoIntersection { height: f64 },
}

/// One term `β cos(m θ + φ)` of a cosine series.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CosineTerm {
    pub amplitude: f64,
    pub mode: f64,
    pub phase: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum AnisotropyKind {
    Constant(f64),
    /// `γ(θ) = 1 + Σ β_j cos(m_j θ + φ_j)`.
    CosineSeries(Vec<CosineTerm>),
    /// `γ(x, y) = sqrt((a x)² + (b y)²)` on the Cartesian normal.
    Elliptic {
        a: f64,
        b: f64,
    },
    /// `γ(x, y) = sqrt(ε² + x²) + sqrt(ε² + y²)`, a smoothed `|x| + |y|`.
    RegularizedCrystalline {
        epsilon: f64,
    },
}

/// Value and first two derivatives of `γ` with respect to `θ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Derivatives {
    pub value: f64,
    pub first: f64,
    pub second: f64,
}

impl Derivatives {
    /// `γ + γ''`, the surface stiffness.
    pub fn stiffness(&self) -> f64 {
        self.value + self.second
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum AnisotropyTag {
    Isotropic,
    Weak,
    Strong,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnisotropyClass {
    pub tag: AnisotropyTag,
    /// Minimum of `γ + γ''` over the sampled angles.
    pub margin: f64,
}

impl AnisotropyClass {
    pub fn is_admissible(&self) -> bool {
        self.tag != AnisotropyTag::Strong
    }
}

/// Roots of the anisotropic Young equation.
#[derive(Debug, Clone, PartialEq)]
pub struct ContactSolution {
    /// Normal angle at the left triple point (radians).
    pub left_angle: f64,
    /// Normal angle at the right triple point (radians, negative by convention).
    pub right_angle: f64,
    /// Every root in `[-π, π)`, ascending.
    pub all_roots: Vec<f64>,
}

/// Root brackets for the contact-angle search.
pub const YOUNG_SAMPLES: usize = 4096;
const YOUNG_TOL: f64 = 1e-10;
const POSITIVITY_SAMPLES: usize = 2048;
/// Default regularization of the crystalline anisotropy.
pub const DEFAULT_CRYSTALLINE_EPSILON: f64 = 0.01;

/// Outer unit normal for the normal angle `θ`.
#[inline]
pub fn normal(theta: f64) -> [f64; 2] {
    [-theta.sin(), theta.cos()]
}

/// Normal angle of a (non-zero) vector, in `(-π, π]`.
#[inline]
pub fn normal_angle(x: f64, y: f64) -> f64 {
    (-x).atan2(y)
}

/// Wraps an angle into `[-π, π)`.
pub fn wrap_angle(theta: f64) -> f64 {
    let t = (theta + PI).rem_euclid(TAU) - PI;
    if t >= PI {
        t - TAU
    } else {
        t
    }
}

/// An immutable, validated anisotropy function `γ(θ)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "AnisotropyKind", into = "AnisotropyKind")]
pub struct Anisotropy {
    kind: AnisotropyKind,
}

impl TryFrom<AnisotropyKind> for Anisotropy {
    type Error = AnisotropyError;

    fn try_from(kind: AnisotropyKind) -> Result<Self, Self::Error> {
        Anisotropy::new(kind)
    }
}

impl From<Anisotropy> for AnisotropyKind {
    fn from(a: Anisotropy) -> Self {
        a.kind
    }
}

impl Anisotropy {
    pub fn new(kind: AnisotropyKind) -> Result<Self, AnisotropyError> {
        match &kind {
            AnisotropyKind::Constant(c) if !c.is_finite() => {
                return Err(AnisotropyError::InvalidParameter(format!("constant {c}")))
            }
            AnisotropyKind::CosineSeries(terms) => {
                for t in terms {
                    if !(t.amplitude.is_finite() && t.mode.is_finite() && t.phase.is_finite()) {
                        return Err(AnisotropyError::InvalidParameter(format!("{t:?}")));
                    }
                }
            }
            AnisotropyKind::Elliptic { a, b } if !(*a > 0.0 && *b > 0.0) => {
                return Err(AnisotropyError::InvalidParameter(format!(
                    "elliptic axes must be positive, got a = {a}, b = {b}"
                )))
            }
            AnisotropyKind::RegularizedCrystalline { epsilon } if !(*epsilon > 0.0) => {
                return Err(AnisotropyError::InvalidParameter(format!(
                    "crystalline regularization must be positive, got {epsilon}"
                )))
            }
            _ => {}
        }
        let gamma = Anisotropy { kind };
        for k in 0..POSITIVITY_SAMPLES {
            let theta = -PI + TAU * k as f64 / POSITIVITY_SAMPLES as f64;
            let value = gamma.value(theta);
            if !(value > 0.0) {
                return Err(AnisotropyError::NonPositive { theta, value });
            }
        }
        Ok(gamma)
    }

    pub fn constant(c: f64) -> Result<Self, AnisotropyError> {
        Self::new(AnisotropyKind::Constant(c))
    }

    /// `1 + β cos(m θ + φ)`.
    pub fn single_mode(amplitude: f64, mode: f64, phase: f64) -> Result<Self, AnisotropyError> {
        Self::new(AnisotropyKind::CosineSeries(vec![CosineTerm { amplitude, mode, phase }]))
    }

    pub fn cosine_series(terms: Vec<CosineTerm>) -> Result<Self, AnisotropyError> {
        Self::new(AnisotropyKind::CosineSeries(terms))
    }

    pub fn elliptic(a: f64, b: f64) -> Result<Self, AnisotropyError> {
        Self::new(AnisotropyKind::Elliptic { a, b })
    }

    pub fn regularized_crystalline(epsilon: f64) -> Result<Self, AnisotropyError> {
        Self::new(AnisotropyKind::RegularizedCrystalline { epsilon })
    }

    pub fn kind(&self) -> &AnisotropyKind {
        &self.kind
    }

    #[inline]
    pub fn value(&self, theta: f64) -> f64 {
        self.evaluate(theta).value
    }

    /// Exact `γ`, `γ'`, `γ''` at `θ`.
    pub fn evaluate(&self, theta: f64) -> Derivatives {
        match &self.kind {
            AnisotropyKind::Constant(c) => Derivatives { value: *c, first: 0.0, second: 0.0 },
            AnisotropyKind::CosineSeries(terms) => {
                let mut d = Derivatives { value: 1.0, first: 0.0, second: 0.0 };
                for t in terms {
                    let arg = t.mode * theta + t.phase;
                    let (s, c) = arg.sin_cos();
                    d.value += t.amplitude * c;
                    d.first -= t.amplitude * t.mode * s;
                    d.second -= t.amplitude * t.mode * t.mode * c;
                }
                d
            }
            AnisotropyKind::Elliptic { a, b } => {
                // g = a² sin²θ + b² cos²θ, γ = √g
                let (s2, c2) = (2.0 * theta).sin_cos();
                let (sin, cos) = theta.sin_cos();
                let diff = a * a - b * b;
                let g = a * a * sin * sin + b * b * cos * cos;
                let g1 = diff * s2;
                let g2 = 2.0 * diff * c2;
                sqrt_chain(g, g1, g2)
            }
            AnisotropyKind::RegularizedCrystalline { epsilon } => {
                let e2 = epsilon * epsilon;
                let (sin, cos) = theta.sin_cos();
                let (s2, c2) = (2.0 * theta).sin_cos();
                let x = sqrt_chain(e2 + sin * sin, s2, 2.0 * c2);
                let y = sqrt_chain(e2 + cos * cos, -s2, -2.0 * c2);
                Derivatives { value: x.value + y.value, first: x.first + y.first, second: x.second + y.second }
            }
        }
    }

    /// Positively 1-homogeneous extension `γ(ξ) = |ξ| γ(ξ/|ξ|)`.
    pub fn homogeneous(&self, xi: [f64; 2]) -> f64 {
        let r = xi[0].hypot(xi[1]);
        if r == 0.0 {
            return 0.0;
        }
        match &self.kind {
            AnisotropyKind::Constant(c) => c * r,
            AnisotropyKind::Elliptic { a, b } => (a * xi[0]).hypot(b * xi[1]),
            _ => r * self.value(normal_angle(xi[0], xi[1])),
        }
    }

    /// Samples `γ + γ''` on `n_samples` uniform angles (at least 360).
    pub fn classify(&self, n_samples: usize) -> AnisotropyClass {
        let n = n_samples.max(360);
        let mut margin = f64::INFINITY;
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for k in 0..n {
            let d = self.evaluate(TAU * k as f64 / n as f64);
            margin = margin.min(d.stiffness());
            lo = lo.min(d.value);
            hi = hi.max(d.value);
        }
        let constant = matches!(self.kind, AnisotropyKind::Constant(_)) || hi - lo <= 1e-13 * hi.abs();
        let tag = if constant {
            AnisotropyTag::Isotropic
        } else if margin > 0.0 {
            AnisotropyTag::Weak
        } else {
            AnisotropyTag::Strong
        };
        AnisotropyClass { tag, margin }
    }

    /// True when `γ(θ + π) = γ(θ)` on sampled angles.
    pub fn is_centrally_symmetric(&self) -> bool {
        (0..720).all(|k| {
            let t = TAU * k as f64 / 720.0;
            let (a, b) = (self.value(t), self.value(t + PI));
            (a - b).abs() <= 1e-12 * a.abs().max(1.0)
        })
    }

    /// Point of the Wulff envelope with outer normal angle `θ`.
    pub fn wulff_point(&self, theta: f64) -> [f64; 2] {
        let d = self.evaluate(theta);
        let (s, c) = theta.sin_cos();
        [-d.value * s - d.first * c, d.value * c - d.first * s]
    }

    /// Residual of the anisotropic Young equation at `θ`.
    pub fn young_residual(&self, theta: f64, gamma_sp: f64, gamma_sv: f64) -> f64 {
        self.wulff_point(theta)[1] + gamma_sp - gamma_sv
    }

    /// All contact angles compatible with the substrate tensions.
    ///
    /// Roots are bracketed on [`YOUNG_SAMPLES`] uniform angles and refined by
    /// bisection. The left angle is the root whose envelope point lies
    /// furthest left on the truncation line, the right one furthest right.
    pub fn solve_young(&self, gamma_sp: f64, gamma_sv: f64) -> Result<ContactSolution, AnisotropyError> {
        let f = |t: f64| self.young_residual(t, gamma_sp, gamma_sv);
        let n = YOUNG_SAMPLES;
        let step = TAU / n as f64;
        let samples: Vec<(f64, f64)> = (0..=n)
            .map(|k| {
                let t = -PI + step * k as f64;
                (t, f(t))
            })
            .collect();
        let mut roots = Vec::new();
        for w in samples.windows(2) {
            let (t0, f0) = w[0];
            let (t1, f1) = w[1];
            if f0 == 0.0 {
                roots.push(t0);
            } else if f0.signum() != f1.signum() && f1 != 0.0 {
                roots.push(bisect(&f, t0, t1, f0));
            }
        }
        let mut roots: Vec<f64> = roots.into_iter().map(wrap_angle).collect();
        roots.sort_by(f64::total_cmp);
        roots.dedup_by(|a, b| (*a - *b).abs() < 1e-9);
        if roots.is_empty() {
            return Err(AnisotropyError::NoRoot { gamma_sp, gamma_sv });
        }
        let x_of = |t: f64| self.wulff_point(t)[0];
        let pick = |leftmost: bool| {
            let mut best = roots[0];
            for &r in &roots[1..] {
                let (xr, xb) = (x_of(r), x_of(best));
                let better = if leftmost { xr < xb } else { xr > xb };
                let tie = (xr - xb).abs() <= 1e-12 && r.abs() < best.abs();
                if better || tie {
                    best = r;
                }
            }
            best
        };
        Ok(ContactSolution { left_angle: pick(true), right_angle: pick(false), all_roots: roots })
    }

    /// Equilibrium shape on a flat substrate at `y = 0` with area `area`.
    ///
    /// The Wulff envelope is cut at `y = γ_SV - γ_SP`, closed along the cut,
    /// shifted so that the cut is the substrate line and scaled to `area`.
    pub fn winterbottom_shape(&self, gamma_sp: f64, gamma_sv: f64, area: f64) -> Result<Polygon, AnisotropyError> {
        if !(area > 0.0) {
            return Err(AnisotropyError::InvalidParameter(format!("area must be positive, got {area}")));
        }
        let class = self.classify(3600);
        if class.tag == AnisotropyTag::Strong {
            return Err(AnisotropyError::NotWeak { margin: class.margin });
        }
        let height = gamma_sv - gamma_sp;
        let contact = self.solve_young(gamma_sp, gamma_sv).map_err(|_| AnisotropyError::NoIntersection { height })?;
        if contact.all_roots.len() < 2 {
            return Err(AnisotropyError::NoIntersection { height });
        }
        let start = contact.right_angle;
        let mut end = contact.left_angle;
        if end <= start {
            end += TAU;
        }
        if self.wulff_point(0.5 * (start + end))[1] < height {
            return Err(AnisotropyError::NoIntersection { height });
        }
        const ARC_POINTS: usize = 4096;
        let mut points: Vec<[f64; 2]> = (0..=ARC_POINTS)
            .map(|k| {
                let t = start + (end - start) * k as f64 / ARC_POINTS as f64;
                let p = self.wulff_point(t);
                [p[0], p[1] - height]
            })
            .collect();
        // the arc ends exactly on the cut line
        points[0][1] = 0.0;
        points[ARC_POINTS][1] = 0.0;
        let raw = Polygon::new(points);
        let scale = (area / raw.area()).sqrt();
        Ok(raw.scaled(scale))
    }
}

/// Derivatives of `√g` from those of `g`.
#[inline]
fn sqrt_chain(g: f64, g1: f64, g2: f64) -> Derivatives {
    let value = g.sqrt();
    Derivatives { value, first: g1 / (2.0 * value), second: g2 / (2.0 * value) - g1 * g1 / (4.0 * g * value) }
}

fn bisect(f: &impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, mut f_lo: f64) -> f64 {
    while hi - lo > YOUNG_TOL {
        let mid = 0.5 * (lo + hi);
        let fm = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if fm.signum() == f_lo.signum() {
            lo = mid;
            f_lo = fm;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn all_variants() -> Vec<Anisotropy> {
        vec![
            Anisotropy::constant(1.3).unwrap(),
            Anisotropy::single_mode(0.05, 4.0, 0.0).unwrap(),
            Anisotropy::single_mode(0.05, 4.0, 8.0).unwrap(),
            Anisotropy::single_mode(0.3, 2.0, PI).unwrap(),
            Anisotropy::elliptic(2.0, 1.0).unwrap(),
            Anisotropy::regularized_crystalline(0.1).unwrap(),
            Anisotropy::regularized_crystalline(DEFAULT_CRYSTALLINE_EPSILON).unwrap(),
        ]
    }

    #[test]
    fn evaluate_examples() {
        let d = Anisotropy::constant(1.0).unwrap().evaluate(0.7);
        assert_eq!((d.value, d.first, d.second), (1.0, 0.0, 0.0));

        let d = Anisotropy::single_mode(0.05, 4.0, 0.0).unwrap().evaluate(0.0);
        assert_relative_eq!(d.value, 1.05, epsilon = 1e-15);
        assert_relative_eq!(d.first, 0.0, epsilon = 1e-15);
        assert_relative_eq!(d.second, -0.8, epsilon = 1e-14);

        let d = Anisotropy::elliptic(2.0, 1.0).unwrap().evaluate(0.0);
        assert_relative_eq!(d.value, 1.0, epsilon = 1e-15);
        assert_relative_eq!(d.first, 0.0, epsilon = 1e-15);
        assert_relative_eq!(d.second, 3.0, epsilon = 1e-14);
    }

    #[test]
    fn analytic_derivatives_match_finite_differences() {
        let h = 1e-5;
        for gamma in all_variants() {
            for k in 0..200 {
                let t = -PI + TAU * (k as f64 + 0.37) / 200.0;
                let d = gamma.evaluate(t);
                let (p, m) = (gamma.evaluate(t + h), gamma.evaluate(t - h));
                let fd1 = (p.value - m.value) / (2.0 * h);
                let fd2 = (p.value - 2.0 * d.value + m.value) / (h * h);
                // second differences lose ~8 digits; compare the first derivative
                // of γ' instead, which has the same exactness
                let fd2b = (p.first - m.first) / (2.0 * h);
                let scale = d.value.abs().max(1.0);
                assert!((fd1 - d.first).abs() <= 1e-6 * scale.max(d.first.abs()), "{gamma:?} γ' at {t}");
                assert!((fd2b - d.second).abs() <= 1e-6 * scale.max(d.second.abs()), "{gamma:?} γ'' at {t}");
                assert!((fd2 - d.second).abs() <= 1e-3 * scale.max(d.second.abs()));
            }
        }
    }

    #[test]
    fn homogeneous_extension() {
        let iso = Anisotropy::constant(1.0).unwrap();
        assert_relative_eq!(iso.homogeneous([3.0, 4.0]), 5.0, epsilon = 1e-14);
        let ell = Anisotropy::elliptic(2.0, 1.0).unwrap();
        let t = normal_angle(1.0, 0.0);
        assert_relative_eq!(ell.homogeneous([1.0, 0.0]), ell.value(t), epsilon = 1e-14);
        for gamma in all_variants() {
            assert_eq!(gamma.homogeneous([0.0, 0.0]), 0.0);
            let v = gamma.homogeneous([0.3, -0.7]);
            assert_relative_eq!(gamma.homogeneous([0.9, -2.1]), 3.0 * v, max_relative = 1e-13);
            let generic = 0.3f64.hypot(0.7) * gamma.value(normal_angle(0.3, -0.7));
            assert_relative_eq!(v, generic, max_relative = 1e-13);
        }
    }

    #[test]
    fn classification() {
        let weak = Anisotropy::single_mode(0.05, 4.0, 0.0).unwrap().classify(360);
        assert_eq!(weak.tag, AnisotropyTag::Weak);
        assert_relative_eq!(weak.margin, 0.25, epsilon = 1e-12);
        let strong = Anisotropy::single_mode(0.25, 4.0, 0.0).unwrap().classify(360);
        assert_eq!(strong.tag, AnisotropyTag::Strong);
        assert_eq!(Anisotropy::constant(2.0).unwrap().classify(360).tag, AnisotropyTag::Isotropic);
        assert_eq!(Anisotropy::elliptic(1.5, 1.5).unwrap().classify(360).tag, AnisotropyTag::Isotropic);
        assert_eq!(Anisotropy::regularized_crystalline(0.01).unwrap().classify(3600).tag, AnisotropyTag::Weak);
        assert_eq!(Anisotropy::single_mode(0.3, 2.0, PI).unwrap().classify(360).tag, AnisotropyTag::Weak);
    }

    #[test]
    fn envelope_of_constant_is_circle() {
        for c in [0.5, 1.0, 2.5] {
            let g = Anisotropy::constant(c).unwrap();
            for k in 0..100 {
                let t = -PI + TAU * k as f64 / 100.0;
                let p = g.wulff_point(t);
                assert!((p[0].hypot(p[1]) - c).abs() < 1e-12);
                if c == 1.0 {
                    assert_relative_eq!(p[0], -t.sin(), epsilon = 1e-15);
                    assert_relative_eq!(p[1], t.cos(), epsilon = 1e-15);
                }
            }
        }
        let p = Anisotropy::single_mode(0.05, 4.0, 0.0).unwrap().wulff_point(0.0);
        assert_relative_eq!(p[0], 0.0, epsilon = 1e-15);
        assert_relative_eq!(p[1], 1.05, epsilon = 1e-15);
    }

    #[test]
    fn elliptic_envelope_is_an_ellipse() {
        // Elliptic(a, b) has Wulff shape (x/a)² + (y/b)² = 1
        for (a, b) in [(2.0, 1.0), (1.0, 2.0)] {
            let g = Anisotropy::elliptic(a, b).unwrap();
            for k in 0..360 {
                let p = g.wulff_point(TAU * k as f64 / 360.0);
                let r = (p[0] / a).powi(2) + (p[1] / b).powi(2);
                assert!((r - 1.0).abs() < 1e-12, "{a} {b} {r}");
            }
        }
    }

    #[test]
    fn young_isotropic() {
        let iso = Anisotropy::constant(1.0).unwrap();
        let sol = iso.solve_young(1.5, 1.0).unwrap();
        assert_relative_eq!(sol.left_angle, (-0.5f64).acos(), epsilon = 1e-8);
        assert_relative_eq!(sol.right_angle, -(-0.5f64).acos(), epsilon = 1e-8);
        assert_eq!(sol.all_roots.len(), 2);

        let sol = iso.solve_young(1.0, 1.0).unwrap();
        assert_relative_eq!(sol.left_angle, PI / 2.0, epsilon = 1e-9);
        assert_relative_eq!(sol.right_angle, -PI / 2.0, epsilon = 1e-9);
    }

    #[test]
    fn young_tilted() {
        let g = Anisotropy::single_mode(0.05, 4.0, 8.0).unwrap();
        let sol = g.solve_young(1.0, 1.1).unwrap();
        assert!((sol.left_angle.to_degrees() - 94.58).abs() < 0.05, "{}", sol.left_angle.to_degrees());
        assert!((sol.right_angle.to_degrees() + 77.67).abs() < 0.05, "{}", sol.right_angle.to_degrees());
        for r in &sol.all_roots {
            assert!(g.young_residual(*r, 1.0, 1.1).abs() < 1e-9);
        }
    }

    #[test]
    fn young_without_root() {
        let iso = Anisotropy::constant(1.0).unwrap();
        assert!(matches!(iso.solve_young(3.0, 1.0), Err(AnisotropyError::NoRoot { .. })));
    }

    #[test]
    fn winterbottom_half_disc() {
        let iso = Anisotropy::constant(1.0).unwrap();
        let shape = iso.winterbottom_shape(1.0, 1.0, PI / 2.0).unwrap();
        assert_relative_eq!(shape.area(), PI / 2.0, max_relative = 1e-12);
        for p in shape.points() {
            assert!(p[1] >= -1e-12);
            assert!((p[0].hypot(p[1]) - 1.0).abs() < 1e-6);
        }
    }

    #[test]
    fn winterbottom_four_fold() {
        let g = Anisotropy::single_mode(0.05, 4.0, 0.0).unwrap();
        let shape = g.winterbottom_shape(1.5, 1.0, 6.25).unwrap();
        assert!((shape.area() - 6.25).abs() < 1e-8);
        let sol = g.solve_young(1.5, 1.0).unwrap();
        let pts = shape.points();
        // tangent at the right contact (arc start) and left contact (arc end)
        let (p0, p1) = (pts[0], pts[1]);
        let right = -(p1[1] - p0[1]).atan2(-(p1[0] - p0[0]));
        let n = pts.len();
        let (q0, q1) = (pts[n - 1], pts[n - 2]);
        let left = (q1[1] - q0[1]).atan2(q1[0] - q0[0]);
        assert!(
            (left - sol.left_angle).abs().to_degrees() < 0.1,
            "{} {}",
            left.to_degrees(),
            sol.left_angle.to_degrees()
        );
        assert!(
            (right - sol.right_angle).abs().to_degrees() < 0.1,
            "{} {}",
            right.to_degrees(),
            sol.right_angle.to_degrees()
        );
    }

    #[test]
    fn winterbottom_nearly_full_disc() {
        let iso = Anisotropy::constant(1.0).unwrap();
        let shape = iso.winterbottom_shape(1.0 - 1e-9, 0.0, PI).unwrap();
        // radius ≈ 1, tangent to the substrate, centered at height ≈ 1
        let top = shape.points().iter().map(|p| p[1]).fold(f64::MIN, f64::max);
        assert!((top - 2.0).abs() < 1e-3);
        let width = shape.points().iter().map(|p| p[0]).fold(f64::MIN, f64::max);
        assert!((width - 1.0).abs() < 1e-3);
    }

    #[test]
    fn winterbottom_rejects_strong_and_misses() {
        let strong = Anisotropy::single_mode(0.25, 4.0, 0.0).unwrap();
        assert!(matches!(strong.winterbottom_shape(1.5, 1.0, 1.0), Err(AnisotropyError::NotWeak { .. })));
        let iso = Anisotropy::constant(1.0).unwrap();
        assert!(matches!(iso.winterbottom_shape(0.0, 3.0, 1.0), Err(AnisotropyError::NoIntersection { .. })));
    }

    #[test]
    fn rejects_non_positive() {
        assert!(Anisotropy::single_mode(1.5, 4.0, 0.0).is_err());
        assert!(Anisotropy::constant(-1.0).is_err());
        assert!(Anisotropy::elliptic(0.0, 1.0).is_err());
    }

    #[test]
    fn angle_helpers() {
        for k in 0..64 {
            let t = -PI + TAU * k as f64 / 64.0;
            let n = normal(t);
            assert_relative_eq!(wrap_angle(normal_angle(n[0], n[1])), t, epsilon = 1e-12);
        }
        assert_relative_eq!(wrap_angle(3.0 * PI), -PI, epsilon = 1e-12);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn single_mode_weak_iff(beta in 0.005f64..0.5, m in 2u32..8) {
                let m = m as f64;
                let crit = beta * (m * m - 1.0);
                prop_assume!((crit - 1.0).abs() > 1e-6);
                prop_assume!(beta < 1.0);
                let g = Anisotropy::single_mode(beta, m, 0.0).unwrap();
                let tag = g.classify(360).tag;
                prop_assert_eq!(tag == AnisotropyTag::Weak, crit < 1.0);
            }

            #[test]
            fn young_roots_satisfy_equation(beta in 0.0f64..0.06, phase in -3.0f64..3.0, diff in -0.8f64..0.8) {
                let g = Anisotropy::single_mode(beta, 4.0, phase).unwrap();
                let sol = g.solve_young(1.0 + diff, 1.0).unwrap();
                for r in sol.all_roots {
                    prop_assert!(g.young_residual(r, 1.0 + diff, 1.0).abs() < 1e-8);
                }
            }

            #[test]
            fn winterbottom_area(area in 0.1f64..20.0, diff in -0.7f64..0.7) {
                let g = Anisotropy::single_mode(0.05, 4.0, 0.0).unwrap();
                let shape = g.winterbottom_shape(1.0 + diff, 1.0, area).unwrap();
                prop_assert!((shape.area() - area).abs() <= 1e-6 * area);
            }
        }
    }
}
