use super::{Grid, GridError};

/// Real values on every point of a [`Grid`], row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    grid: Grid,
    values: Vec<f64>,
}

impl ScalarField {
    pub fn new(grid: Grid, values: Vec<f64>) -> Result<Self, GridError> {
        if values.len() != grid.len() {
            return Err(GridError::LengthMismatch { expected: grid.len(), got: values.len() });
        }
        if let Some(k) = values.iter().position(|v| !v.is_finite()) {
            return Err(GridError::NonFinite(k));
        }
        Ok(ScalarField { grid, values })
    }

    /// Skips the finiteness scan; callers guarantee finite values.
    pub(crate) fn from_vec_unchecked(grid: Grid, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), grid.len());
        ScalarField { grid, values }
    }

    pub fn constant(grid: Grid, c: f64) -> Self {
        ScalarField { grid, values: vec![c; grid.len()] }
    }

    pub fn zeros(grid: Grid) -> Self {
        Self::constant(grid, 0.0)
    }

    /// Samples `f(x, y)` at every grid point.
    pub fn from_fn(grid: Grid, f: impl Fn(f64, f64) -> f64) -> Self {
        let n = grid.n();
        let mut values = Vec::with_capacity(grid.len());
        for j in 0..n {
            let y = grid.y(j);
            for i in 0..n {
                values.push(f(grid.x(i), y));
            }
        }
        ScalarField { grid, values }
    }

    /// `1` where `inside(x, y)` holds, else `0`.
    pub fn indicator(grid: Grid, inside: impl Fn(f64, f64) -> bool) -> Self {
        Self::from_fn(grid, |x, y| if inside(x, y) { 1.0 } else { 0.0 })
    }

    #[inline]
    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    #[inline]
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    #[inline]
    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[self.grid.index(i, j)]
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        ScalarField { grid: self.grid, values: self.values.iter().map(|&v| f(v)).collect() }
    }

    pub fn zip_map(&self, other: &ScalarField, f: impl Fn(f64, f64) -> f64) -> Result<Self, GridError> {
        self.grid.check_same(&other.grid)?;
        let values = self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect();
        Ok(ScalarField { grid: self.grid, values })
    }

    pub fn sum(&self) -> f64 {
        self.values.iter().sum()
    }

    /// Riemann sum `Σ f dx²`.
    pub fn integral(&self) -> f64 {
        self.sum() * self.grid.cell_area()
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Number of points with value `>= threshold`.
    pub fn count_at_least(&self, threshold: f64) -> usize {
        self.values.iter().filter(|&&v| v >= threshold).count()
    }

    /// Number of points where the two fields fall on different sides of 0.5.
    pub fn mismatch_count(&self, other: &ScalarField) -> Result<usize, GridError> {
        self.grid.check_same(&other.grid)?;
        Ok(self.values.iter().zip(&other.values).filter(|(&a, &b)| (a >= 0.5) != (b >= 0.5)).count())
    }

    /// Symmetric difference of two indicators in area units.
    pub fn symmetric_difference_area(&self, other: &ScalarField) -> Result<f64, GridError> {
        Ok(self.mismatch_count(other)? as f64 * self.grid.cell_area())
    }

    /// Mirror image under `x -> -x` about the domain center.
    ///
    /// Point `i` maps to `n - i` (mod n), which is exact when the domain is
    /// symmetric about `x = 0`.
    pub fn mirrored_x(&self) -> Self {
        let n = self.grid.n();
        let mut values = vec![0.0; self.values.len()];
        for j in 0..n {
            for i in 0..n {
                values[j * n + (n - i) % n] = self.values[j * n + i];
            }
        }
        ScalarField { grid: self.grid, values }
    }
}
