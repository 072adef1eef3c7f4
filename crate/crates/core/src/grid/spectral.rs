//! Discrete Fourier transforms scaled as samples of the continuous transform.
//!
//! With `K̂(ξ) = ∫ K(x) e^{-2πi x·ξ} dx`, the DFT of a sampled field times `dx²`
//! approximates `K̂` at `ξ = (j / L, k / L)`. Convolution with a kernel known
//! only through `K̂` is then `IDFT(K̂ · DFT(f))`.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use realfft::num_complex::Complex64;
use realfft::{ComplexToReal, RealFftPlanner, RealToComplex};
use rustfft::{Fft, FftPlanner};

use super::{Grid, GridError, ScalarField};
use crate::kernels::SampledKernel;
use crate::par::{self, Execution};

/// Complex coefficients on the full `n × n` frequency lattice.
///
/// Entry `(j, k)` (stored at `k * n + j`) is the transform at
/// `ξ = (frequency(j), frequency(k))`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField {
    grid: Grid,
    coefficients: Vec<Complex64>,
}

impl SpectralField {
    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn coefficients(&self) -> &[Complex64] {
        &self.coefficients
    }

    pub fn get(&self, j: usize, k: usize) -> Complex64 {
        self.coefficients[k * self.grid.n() + j]
    }

    /// `Σ |F|²` scaled so that it equals `∫ |f|²` (Parseval).
    pub fn energy(&self) -> f64 {
        let l2 = self.grid.side() * self.grid.side();
        self.coefficients.iter().map(|c| c.norm_sqr()).sum::<f64>() / l2
    }
}

/// Half-plane spectrum produced by [`RealFft2`].
///
/// Layout is column-major in `kx`: entry `(kx, ky)` with `kx ∈ [0, n/2]`,
/// `ky ∈ [0, n)` lives at `kx * n + ky`. Negative `kx` follow from Hermitian
/// symmetry.
pub type HalfSpectrum = Vec<Complex64>;

/// Full complex 2D FFT of a real field, scaled by `dx²`.
pub fn forward_transform(f: &ScalarField) -> SpectralField {
    let grid = *f.grid();
    let n = grid.n();
    let mut data: Vec<Complex64> = f.values().iter().map(|&v| Complex64::new(v, 0.0)).collect();
    let fft = FftPlanner::new().plan_fft_forward(n);
    fft2_in_place(&mut data, n, &fft);
    let scale = grid.cell_area();
    for c in &mut data {
        *c *= scale;
    }
    SpectralField { grid, coefficients: data }
}

/// Inverse of [`forward_transform`]; the imaginary part is dropped.
pub fn inverse_transform(spectrum: &SpectralField) -> ScalarField {
    let grid = spectrum.grid;
    let n = grid.n();
    let mut data = spectrum.coefficients.clone();
    let fft = FftPlanner::new().plan_fft_inverse(n);
    fft2_in_place(&mut data, n, &fft);
    let scale = 1.0 / (grid.cell_area() * (n * n) as f64);
    ScalarField::from_vec_unchecked(grid, data.iter().map(|c| c.re * scale).collect())
}

fn fft2_in_place(data: &mut [Complex64], n: usize, fft: &Arc<dyn Fft<f64>>) {
    let mut scratch = vec![Complex64::default(); fft.get_inplace_scratch_len()];
    for row in data.chunks_exact_mut(n) {
        fft.process_with_scratch(row, &mut scratch);
    }
    let mut t = vec![Complex64::default(); data.len()];
    transpose(data, &mut t, n, n);
    for col in t.chunks_exact_mut(n) {
        fft.process_with_scratch(col, &mut scratch);
    }
    transpose(&t, data, n, n);
}

/// Blocked transpose of a `rows × cols` row-major matrix.
fn transpose<T: Copy>(src: &[T], dst: &mut [T], rows: usize, cols: usize) {
    const B: usize = 32;
    for r0 in (0..rows).step_by(B) {
        for c0 in (0..cols).step_by(B) {
            for r in r0..(r0 + B).min(rows) {
                for c in c0..(c0 + B).min(cols) {
                    dst[c * rows + r] = src[r * cols + c];
                }
            }
        }
    }
}

/// Real-to-complex 2D FFT plan for one grid size.
pub struct RealFft2 {
    n: usize,
    exec: Execution,
    r2c: Arc<dyn RealToComplex<f64>>,
    c2r: Arc<dyn ComplexToReal<f64>>,
    col_forward: Arc<dyn Fft<f64>>,
    col_inverse: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for RealFft2 {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("RealFft2").field("n", &self.n).field("exec", &self.exec).finish()
    }
}

type PlanCache = Mutex<HashMap<(usize, Execution), Arc<RealFft2>>>;

/// Cached plan for size `n`.
pub fn real_fft_plan(n: usize, exec: Execution) -> Arc<RealFft2> {
    static CACHE: OnceLock<PlanCache> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut map = cache.lock().unwrap_or_else(|e| e.into_inner());
    map.entry((n, exec)).or_insert_with(|| Arc::new(RealFft2::new(n, exec))).clone()
}

impl RealFft2 {
    pub fn new(n: usize, exec: Execution) -> Self {
        let mut real = RealFftPlanner::<f64>::new();
        let mut complex = FftPlanner::<f64>::new();
        RealFft2 {
            n,
            exec,
            r2c: real.plan_fft_forward(n),
            c2r: real.plan_fft_inverse(n),
            col_forward: complex.plan_fft_forward(n),
            col_inverse: complex.plan_fft_inverse(n),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn execution(&self) -> Execution {
        self.exec
    }

    /// Number of entries in a [`HalfSpectrum`].
    pub fn half_len(&self) -> usize {
        (self.n / 2 + 1) * self.n
    }

    /// Unscaled DFT of `n × n` real data into the half layout.
    pub fn forward(&self, input: &[f64]) -> HalfSpectrum {
        let n = self.n;
        let h = n / 2 + 1;
        assert_eq!(input.len(), n * n);
        let mut rows = vec![Complex64::default(); n * h];
        let r2c = &self.r2c;
        par::chunks_mut_with(
            self.exec,
            &mut rows,
            h,
            || (r2c.make_input_vec(), r2c.make_scratch_vec()),
            |(buf, scratch), j, out| {
                buf.copy_from_slice(&input[j * n..(j + 1) * n]);
                r2c.process_with_scratch(buf, out, scratch).expect("row length matches plan");
            },
        );
        let mut cols = vec![Complex64::default(); n * h];
        transpose(&rows, &mut cols, n, h);
        drop(rows);
        let fft = &self.col_forward;
        par::chunks_mut_with(
            self.exec,
            &mut cols,
            n,
            || vec![Complex64::default(); fft.get_inplace_scratch_len()],
            |scratch, _, col| fft.process_with_scratch(col, scratch),
        );
        cols
    }

    /// Inverse DFT from the half layout, normalized by `1 / n²`.
    pub fn inverse(&self, mut spectrum: HalfSpectrum) -> Vec<f64> {
        let n = self.n;
        let h = n / 2 + 1;
        assert_eq!(spectrum.len(), n * h);
        let fft = &self.col_inverse;
        par::chunks_mut_with(
            self.exec,
            &mut spectrum,
            n,
            || vec![Complex64::default(); fft.get_inplace_scratch_len()],
            |scratch, _, col| fft.process_with_scratch(col, scratch),
        );
        let mut rows = vec![Complex64::default(); n * h];
        transpose(&spectrum, &mut rows, h, n);
        drop(spectrum);
        let mut out = vec![0.0; n * n];
        let c2r = &self.c2r;
        let norm = 1.0 / (n * n) as f64;
        par::chunks_mut_with(
            self.exec,
            &mut out,
            n,
            || (c2r.make_input_vec(), c2r.make_scratch_vec()),
            |(buf, scratch), j, dst| {
                buf.copy_from_slice(&rows[j * h..(j + 1) * h]);
                // DC and Nyquist of a Hermitian row are real up to rounding
                buf[0].im = 0.0;
                buf[h - 1].im = 0.0;
                c2r.process_with_scratch(buf, dst, scratch).expect("row length matches plan");
                for v in dst.iter_mut() {
                    *v *= norm;
                }
            },
        );
        out
    }

    /// `IDFT(m · DFT(f))` for a real multiplier in the half layout.
    pub fn convolve(&self, input: &[f64], multiplier: &[f64]) -> Vec<f64> {
        assert_eq!(multiplier.len(), self.half_len());
        let mut spectrum = self.forward(input);
        par::chunks_mut(self.exec, &mut spectrum, self.n, |kx, col| {
            let m = &multiplier[kx * self.n..(kx + 1) * self.n];
            for (c, &w) in col.iter_mut().zip(m) {
                *c *= w;
            }
        });
        self.inverse(spectrum)
    }

    /// Evaluates an even symbol `m(ξx, ξy)` on the half lattice of `grid`.
    ///
    /// The Nyquist row and column alias `±n/2`; both aliases are averaged so
    /// that the implied full multiplier stays real and even.
    pub fn multiplier(&self, grid: &Grid, symbol: impl Fn(f64, f64) -> f64 + Sync) -> Vec<f64> {
        let n = self.n;
        assert_eq!(grid.n(), n);
        let nyq = (n / 2) as f64 / grid.side();
        let mut out = vec![0.0; self.half_len()];
        par::chunks_mut(self.exec, &mut out, n, |kx, col| {
            let fx = grid.frequency(kx);
            for (ky, v) in col.iter_mut().enumerate() {
                let fy = grid.frequency(ky);
                let xs: &[f64] = if kx == n / 2 { &[-nyq, nyq] } else { &[fx] };
                let ys: &[f64] = if ky == n / 2 { &[-nyq, nyq] } else { &[fy] };
                let mut acc = 0.0;
                for &a in xs {
                    for &b in ys {
                        acc += symbol(a, b);
                    }
                }
                *v = acc / (xs.len() * ys.len()) as f64;
            }
        });
        out
    }
}

/// Convolution of `f` with the kernel rescaled to time `dt`.
pub fn convolve(f: &ScalarField, kernel: &SampledKernel, dt: f64) -> Result<ScalarField, GridError> {
    if kernel.grid() != f.grid() {
        return Err(GridError::KernelGridMismatch);
    }
    let scaled = kernel.at_scale(dt).map_err(|_| GridError::KernelGridMismatch)?;
    Ok(scaled.apply(f))
}
