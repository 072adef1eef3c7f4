//! Contact angles measured from a line fit near the substrate.
//!
//! Angles use the normal-angle convention of [`crate::anisotropy`]: the
//! outer normal of the particle at the contact point is `(-sin θ, cos θ)`.
//! A left contact line `x = a + b y` therefore has `θ = atan2(1, b)` and a
//! right one `θ = -atan2(1, -b)`.

use serde::{Deserialize, Serialize};

/// Rows used for the fit, in multiples of `dx` above the substrate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FitBand {
    pub lower: usize,
    pub upper: usize,
}

impl Default for FitBand {
    fn default() -> Self {
        FitBand { lower: 3, upper: 20 }
    }
}

/// Measured contact angles in degrees.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContactAngles {
    pub left: f64,
    pub right: f64,
}

/// Least-squares slope and intercept of `x = a + b y`.
pub fn fit_line(points: &[[f64; 2]]) -> Option<(f64, f64)> {
    let n = points.len() as f64;
    if points.len() < 2 {
        return None;
    }
    let (sx, sy) = points.iter().fold((0.0, 0.0), |(a, b), p| (a + p[0], b + p[1]));
    let (mx, my) = (sx / n, sy / n);
    let (mut syy, mut sxy) = (0.0, 0.0);
    for p in points {
        syy += (p[1] - my).powi(2);
        sxy += (p[1] - my) * (p[0] - mx);
    }
    if syy == 0.0 {
        return None;
    }
    let b = sxy / syy;
    Some((mx - b * my, b))
}

pub fn left_angle_from_slope(b: f64) -> f64 {
    1f64.atan2(b).to_degrees()
}

pub fn right_angle_from_slope(b: f64) -> f64 {
    -(1f64.atan2(-b)).to_degrees()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn vertical_walls_are_right_angles() {
        assert_relative_eq!(left_angle_from_slope(0.0), 90.0);
        assert_relative_eq!(right_angle_from_slope(0.0), -90.0);
    }

    #[test]
    fn obtuse_contact() {
        // a left wall leaning outwards over the substrate: x decreases with y
        let b = -(30f64.to_radians().tan());
        assert_relative_eq!(left_angle_from_slope(b), 120.0, epsilon = 1e-12);
        assert_relative_eq!(right_angle_from_slope(-b), -120.0, epsilon = 1e-12);
    }

    #[test]
    fn line_fit_is_exact_on_lines() {
        let pts: Vec<[f64; 2]> = (0..10).map(|k| [1.0 - 0.5 * k as f64, k as f64]).collect();
        let (a, b) = fit_line(&pts).unwrap();
        assert_relative_eq!(a, 1.0, epsilon = 1e-12);
        assert_relative_eq!(b, -0.5, epsilon = 1e-12);
        assert!(fit_line(&pts[..1]).is_none());
    }
}
