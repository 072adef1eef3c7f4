//! Uniform periodic grid, scalar fields and the operations defined on them.

mod components;
mod field;
pub mod io;
mod shapes;
mod spectral;
mod subgrid;

pub use components::{connected_components, Components};
pub use field::ScalarField;
pub use shapes::{Polygon, Shape};
pub use spectral::{
    convolve, forward_transform, inverse_transform, real_fft_plan, HalfSpectrum, RealFft2, SpectralField,
};
pub use subgrid::{l1_difference, subgrid_extract, subgrid_extract_with, Indicator, SubgridInterface};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GridError {
    #[error("grid size {0} must be a power of two and at least 4")]
    BadSize(usize),
    #[error("domain [{x_min}, {x_max}] x [{y_min}, {y_max}] must be non-empty with square cells")]
    BadDomain { x_min: f64, x_max: f64, y_min: f64, y_max: f64 },
    #[error("fields live on different grids")]
    GridMismatch,
    #[error("kernel was sampled on a different grid")]
    KernelGridMismatch,
    #[error("field has {got} values, grid needs {expected}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("non-finite value at index {0}")]
    NonFinite(usize),
    #[error("polygon needs at least three vertices")]
    DegeneratePolygon,
}

/// Square-celled uniform grid on a periodic rectangle.
///
/// Point `(i, j)` sits at `(x_min + i dx, y_min + j dx)` and is stored at
/// index `j * n + i`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    x_min: f64,
    x_max: f64,
    y_min: f64,
    y_max: f64,
    n: usize,
}

impl Grid {
    pub fn new(x_min: f64, x_max: f64, y_min: f64, y_max: f64, n: usize) -> Result<Self, GridError> {
        if n < 4 || !n.is_power_of_two() {
            return Err(GridError::BadSize(n));
        }
        let (wx, wy) = (x_max - x_min, y_max - y_min);
        let finite = [x_min, x_max, y_min, y_max].iter().all(|v| v.is_finite());
        if !finite || !(wx > 0.0) || (wx - wy).abs() > 1e-12 * wx {
            return Err(GridError::BadDomain { x_min, x_max, y_min, y_max });
        }
        Ok(Grid { x_min, x_max, y_min, y_max, n })
    }

    /// `[-5, 5]²` with `n` points per axis.
    pub fn standard(n: usize) -> Result<Self, GridError> {
        Self::new(-5.0, 5.0, -5.0, 5.0, n)
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.n * self.n
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    pub fn dx(&self) -> f64 {
        (self.x_max - self.x_min) / self.n as f64
    }

    #[inline]
    pub fn cell_area(&self) -> f64 {
        self.dx() * self.dx()
    }

    /// Side length `L` of the periodic box.
    #[inline]
    pub fn side(&self) -> f64 {
        self.x_max - self.x_min
    }

    pub fn bounds(&self) -> [f64; 4] {
        [self.x_min, self.x_max, self.y_min, self.y_max]
    }

    #[inline]
    pub fn x(&self, i: usize) -> f64 {
        self.x_min + i as f64 * self.dx()
    }

    #[inline]
    pub fn y(&self, j: usize) -> f64 {
        self.y_min + j as f64 * self.dx()
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize) -> usize {
        j * self.n + i
    }

    /// Signed integer frequency of DFT bin `k`, in `[-n/2, n/2)`.
    #[inline]
    pub fn signed_bin(&self, k: usize) -> i64 {
        let n = self.n as i64;
        let k = k as i64;
        if k >= n / 2 {
            k - n
        } else {
            k
        }
    }

    /// Physical frequency `k / L` of DFT bin `k`.
    #[inline]
    pub fn frequency(&self, k: usize) -> f64 {
        self.signed_bin(k) as f64 / self.side()
    }

    /// Offset of grid index `k` from the origin index 0, wrapped to `[-L/2, L/2)`.
    #[inline]
    pub fn wrapped_offset(&self, k: usize) -> f64 {
        self.signed_bin(k) as f64 * self.dx()
    }

    /// Row index of the first grid row with `y >= value`.
    pub fn first_row_at_or_above(&self, value: f64) -> usize {
        let t = ((value - self.y_min) / self.dx() - 1e-9).ceil();
        t.clamp(0.0, self.n as f64) as usize
    }

    pub(crate) fn check_same(&self, other: &Grid) -> Result<(), GridError> {
        if self == other {
            Ok(())
        } else {
            Err(GridError::GridMismatch)
        }
    }
}
