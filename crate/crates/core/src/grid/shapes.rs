use serde::{Deserialize, Serialize};

use super::{Grid, GridError, ScalarField};

/// Closed polygon; the last vertex connects back to the first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Polygon {
    points: Vec<[f64; 2]>,
}

impl Polygon {
    pub fn new(points: Vec<[f64; 2]>) -> Self {
        Polygon { points }
    }

    pub fn try_new(points: Vec<[f64; 2]>) -> Result<Self, GridError> {
        if points.len() < 3 || points.iter().flatten().any(|v| !v.is_finite()) {
            return Err(GridError::DegeneratePolygon);
        }
        Ok(Polygon { points })
    }

    pub fn points(&self) -> &[[f64; 2]] {
        &self.points
    }

    /// Shoelace area, positive for counterclockwise vertex order.
    pub fn signed_area(&self) -> f64 {
        let n = self.points.len();
        let mut acc = 0.0;
        for k in 0..n {
            let [x0, y0] = self.points[k];
            let [x1, y1] = self.points[(k + 1) % n];
            acc += x0 * y1 - x1 * y0;
        }
        0.5 * acc
    }

    pub fn area(&self) -> f64 {
        self.signed_area().abs()
    }

    /// Area centroid.
    pub fn centroid(&self) -> [f64; 2] {
        let n = self.points.len();
        let (mut cx, mut cy) = (0.0, 0.0);
        for k in 0..n {
            let [x0, y0] = self.points[k];
            let [x1, y1] = self.points[(k + 1) % n];
            let c = x0 * y1 - x1 * y0;
            cx += (x0 + x1) * c;
            cy += (y0 + y1) * c;
        }
        let a6 = 6.0 * self.signed_area();
        [cx / a6, cy / a6]
    }

    /// Uniform scaling about the origin.
    pub fn scaled(&self, s: f64) -> Self {
        Polygon { points: self.points.iter().map(|p| [p[0] * s, p[1] * s]).collect() }
    }

    pub fn translated(&self, dx: f64, dy: f64) -> Self {
        Polygon { points: self.points.iter().map(|p| [p[0] + dx, p[1] + dy]).collect() }
    }

    /// `[x_min, x_max, y_min, y_max]`.
    pub fn bounding_box(&self) -> [f64; 4] {
        let mut b = [f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY];
        for p in &self.points {
            b[0] = b[0].min(p[0]);
            b[1] = b[1].max(p[0]);
            b[2] = b[2].min(p[1]);
            b[3] = b[3].max(p[1]);
        }
        b
    }

    /// Even-odd point-in-polygon test; points on a bottom edge count as inside.
    pub fn contains(&self, x: f64, y: f64) -> bool {
        let n = self.points.len();
        let mut inside = false;
        let mut j = n - 1;
        for i in 0..n {
            let [xi, yi] = self.points[i];
            let [xj, yj] = self.points[j];
            if (yi > y) != (yj > y) {
                let xc = xi + (y - yi) * (xj - xi) / (yj - yi);
                if x < xc {
                    inside = !inside;
                }
            }
            j = i;
        }
        inside
    }
}

/// Initial particle geometry.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Shape {
    /// `((x - cx) / a)² + ((y - cy) / b)² ≤ 1`.
    Ellipse {
        center: [f64; 2],
        a: f64,
        b: f64,
    },
    Circle {
        center: [f64; 2],
        radius: f64,
    },
    /// Axis-aligned `[x0, x1] × [y0, y1]`.
    Rectangle {
        x0: f64,
        x1: f64,
        y0: f64,
        y1: f64,
    },
    /// Union of polygons.
    Polygons {
        polygons: Vec<Vec<[f64; 2]>>,
    },
    /// Two right triangles on `y = y0` whose vertical legs face each other
    /// across a gap of width `gap` centered at `x = 0`.
    TrianglePair {
        gap: f64,
        base: f64,
        height: f64,
        y0: f64,
    },
}

impl Shape {
    pub fn polygons(&self) -> Vec<Polygon> {
        match self {
            Shape::Polygons { polygons } => polygons.iter().map(|p| Polygon::new(p.clone())).collect(),
            Shape::TrianglePair { gap, base, height, y0 } => {
                let h = 0.5 * gap;
                vec![
                    Polygon::new(vec![[-h - base, *y0], [-h, *y0], [-h, y0 + height]]),
                    Polygon::new(vec![[h, *y0], [h + base, *y0], [h, y0 + height]]),
                ]
            }
            _ => Vec::new(),
        }
    }

    pub fn contains(&self, x: f64, y: f64) -> bool {
        match self {
            Shape::Ellipse { center, a, b } => ((x - center[0]) / a).powi(2) + ((y - center[1]) / b).powi(2) <= 1.0,
            Shape::Circle { center, radius } => (x - center[0]).hypot(y - center[1]) <= *radius,
            Shape::Rectangle { x0, x1, y0, y1 } => x >= *x0 && x <= *x1 && y >= *y0 && y <= *y1,
            Shape::Polygons { .. } | Shape::TrianglePair { .. } => self.polygons().iter().any(|p| p.contains(x, y)),
        }
    }

    pub fn bounding_box(&self) -> [f64; 4] {
        match self {
            Shape::Ellipse { center, a, b } => [center[0] - a, center[0] + a, center[1] - b, center[1] + b],
            Shape::Circle { center, radius } => {
                [center[0] - radius, center[0] + radius, center[1] - radius, center[1] + radius]
            }
            Shape::Rectangle { x0, x1, y0, y1 } => [*x0, *x1, *y0, *y1],
            Shape::Polygons { .. } | Shape::TrianglePair { .. } => self
                .polygons()
                .iter()
                .map(Polygon::bounding_box)
                .fold([f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY], |a, b| {
                    [a[0].min(b[0]), a[1].max(b[1]), a[2].min(b[2]), a[3].max(b[3])]
                }),
        }
    }

    pub fn is_valid(&self) -> bool {
        match self {
            Shape::Ellipse { a, b, .. } => *a > 0.0 && *b > 0.0,
            Shape::Circle { radius, .. } => *radius > 0.0,
            Shape::Rectangle { x0, x1, y0, y1 } => x1 > x0 && y1 > y0,
            Shape::Polygons { polygons } => !polygons.is_empty() && polygons.iter().all(|p| p.len() >= 3),
            Shape::TrianglePair { gap, base, height, .. } => *gap > 0.0 && *base > 0.0 && *height > 0.0,
        }
    }

    /// Binary indicator of the shape sampled at grid points.
    pub fn rasterize(&self, grid: &Grid) -> ScalarField {
        match self {
            Shape::Polygons { .. } | Shape::TrianglePair { .. } => {
                let polys = self.polygons();
                ScalarField::indicator(*grid, |x, y| polys.iter().any(|p| p.contains(x, y)))
            }
            _ => ScalarField::indicator(*grid, |x, y| self.contains(x, y)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_area_and_containment() {
        let sq = Polygon::new(vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]);
        assert_eq!(sq.signed_area(), 1.0);
        assert!(sq.contains(0.5, 0.5));
        assert!(!sq.contains(1.5, 0.5));
        assert_eq!(sq.scaled(2.0).area(), 4.0);
        assert_eq!(sq.bounding_box(), [0.0, 1.0, 0.0, 1.0]);
        assert!(Polygon::try_new(vec![[0.0, 0.0], [1.0, 0.0]]).is_err());
    }

    #[test]
    fn centroid_of_triangle_is_vertex_mean() {
        let t = Polygon::new(vec![[0.0, 0.0], [3.0, 0.0], [0.0, 6.0]]);
        let c = t.centroid();
        assert!((c[0] - 1.0).abs() < 1e-12 && (c[1] - 2.0).abs() < 1e-12);
        let r = Polygon::new(t.points().iter().rev().copied().collect());
        assert_eq!(r.centroid(), c);
    }

    #[test]
    fn rasterized_disc_area() {
        let g = Grid::standard(512).unwrap();
        let disc = Shape::Circle { center: [0.0, 0.0], radius: 1.0 };
        let a = disc.rasterize(&g).integral();
        assert!((a - std::f64::consts::PI).abs() < 2.0 * std::f64::consts::PI * g.dx());
    }

    #[test]
    fn triangle_pair_geometry() {
        let s = Shape::TrianglePair { gap: 0.4, base: 1.0, height: 1.0, y0: 0.0 };
        assert!(s.contains(-0.3, 0.5));
        assert!(s.contains(0.3, 0.5));
        assert!(!s.contains(0.0, 0.5));
        assert!(!s.contains(-1.0, 0.5));
        let polys = s.polygons();
        assert!((polys[0].area() - 0.5).abs() < 1e-15);
        assert_eq!(s.bounding_box(), [-1.2, 1.2, 0.0, 1.0]);
    }
}
