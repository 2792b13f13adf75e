use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

/// Default fraction of the resolved band kept after a nonlinear product.
pub const TWO_THIRDS: f64 = 2.0 / 3.0;

/// Uniform periodic grid on `[0, L)^2` together with its FFT plans and
/// wavenumber tables.
///
/// Samples are stored row-major: index `iy * n + ix` holds the value at
/// `(ix * h, iy * h)`. Spectra use the same layout with the standard FFT
/// ordering of integer modes `m ∈ [-n/2, n/2)`.
pub struct Grid {
    n: usize,
    length: f64,
    dealias_fraction: f64,
    mode_cut: i64,
    modes: Vec<i64>,
    wavenumbers: Vec<f64>,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

pub type GridRef = Arc<Grid>;

impl fmt::Debug for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Grid")
            .field("n", &self.n)
            .field("length", &self.length)
            .field("dealias_fraction", &self.dealias_fraction)
            .finish()
    }
}

impl PartialEq for Grid {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n
            && self.length.to_bits() == other.length.to_bits()
            && self.dealias_fraction.to_bits() == other.dealias_fraction.to_bits()
    }
}

impl Grid {
    pub fn new(n: usize, length: f64) -> Result<GridRef> {
        Self::with_dealias(n, length, TWO_THIRDS)
    }

    /// `dealias_fraction` is the retained fraction of the Nyquist index; `1.0`
    /// disables dealiasing apart from the Nyquist row and column.
    pub fn with_dealias(n: usize, length: f64, dealias_fraction: f64) -> Result<GridRef> {
        if n < 16 || !n.is_power_of_two() {
            return Err(Error::InvalidGrid(format!(
                "n must be a power of two >= 16, got {n}"
            )));
        }
        if !(length.is_finite() && length > 0.0) {
            return Err(Error::InvalidGrid(format!("box length must be > 0, got {length}")));
        }
        if !(dealias_fraction > 0.0 && dealias_fraction <= 1.0) {
            return Err(Error::InvalidGrid(format!(
                "dealias fraction must lie in (0, 1], got {dealias_fraction}"
            )));
        }
        let half = (n / 2) as i64;
        let modes: Vec<i64> = (0..n as i64)
            .map(|i| if i < half { i } else { i - n as i64 })
            .collect();
        let k0 = 2.0 * PI / length;
        let wavenumbers = modes.iter().map(|&m| k0 * m as f64).collect();
        // Nyquist index is always dropped.
        let mode_cut = ((dealias_fraction * half as f64 + 1e-9).floor() as i64).min(half - 1);
        let mut planner = FftPlanner::new();
        Ok(Arc::new(Grid {
            n,
            length,
            dealias_fraction,
            mode_cut,
            modes,
            wavenumbers,
            forward: planner.plan_fft_forward(n),
            inverse: planner.plan_fft_inverse(n),
        }))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.n * self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn spacing(&self) -> f64 {
        self.length / self.n as f64
    }

    /// Quadrature weight of one cell.
    pub fn cell_area(&self) -> f64 {
        let h = self.spacing();
        h * h
    }

    pub fn dealias_fraction(&self) -> f64 {
        self.dealias_fraction
    }

    /// Largest retained integer mode per axis.
    pub fn mode_cut(&self) -> i64 {
        self.mode_cut
    }

    /// Integer mode of FFT index `i`.
    pub fn mode(&self, i: usize) -> i64 {
        self.modes[i]
    }

    /// Physical wavenumber `(2π/L)·m` of FFT index `i`.
    pub fn wavenumber(&self, i: usize) -> f64 {
        self.wavenumbers[i]
    }

    /// Wavenumber vector `(k1, k2)` of flat spectral index `idx`.
    pub fn k_vec(&self, idx: usize) -> (f64, f64) {
        (self.wavenumbers[idx % self.n], self.wavenumbers[idx / self.n])
    }

    pub fn k_squared(&self, idx: usize) -> f64 {
        let (kx, ky) = self.k_vec(idx);
        kx * kx + ky * ky
    }

    /// Physical coordinates of grid point `idx`.
    pub fn point(&self, idx: usize) -> (f64, f64) {
        let h = self.spacing();
        ((idx % self.n) as f64 * h, (idx / self.n) as f64 * h)
    }

    pub fn is_nyquist(&self, i: usize) -> bool {
        i == self.n / 2
    }

    /// Whether flat spectral index `idx` survives the dealiasing mask.
    pub fn retained(&self, idx: usize) -> bool {
        let mx = self.modes[idx % self.n].abs();
        let my = self.modes[idx / self.n].abs();
        mx <= self.mode_cut && my <= self.mode_cut
    }

    /// Largest `|k|` among retained modes (a corner of the retained square).
    pub fn max_retained_wavenumber(&self) -> f64 {
        2.0 * PI / self.length * self.mode_cut as f64 * 2f64.sqrt()
    }

    /// In-place unnormalised forward 2-D DFT.
    pub fn fft(&self, data: &mut [Complex64]) {
        self.transform(data, &self.forward);
    }

    /// In-place inverse 2-D DFT including the `1/n²` factor.
    pub fn ifft(&self, data: &mut [Complex64]) {
        self.transform(data, &self.inverse);
        let scale = 1.0 / (self.n * self.n) as f64;
        data.iter_mut().for_each(|c| *c *= scale);
    }

    pub fn forward_real(&self, values: &[f64]) -> Vec<Complex64> {
        let mut data: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.fft(&mut data);
        data
    }

    pub fn inverse_real(&self, spectrum: &[Complex64]) -> Vec<f64> {
        let mut data = spectrum.to_vec();
        self.ifft(&mut data);
        data.into_iter().map(|c| c.re).collect()
    }

    fn transform(&self, data: &mut [Complex64], plan: &Arc<dyn Fft<f64>>) {
        let n = self.n;
        assert_eq!(data.len(), n * n, "buffer does not match grid");
        fft_rows(data, n, plan);
        let mut t = vec![Complex64::new(0.0, 0.0); n * n];
        transpose(data, &mut t, n);
        fft_rows(&mut t, n, plan);
        transpose(&t, data, n);
    }
}

fn fft_rows(data: &mut [Complex64], n: usize, plan: &Arc<dyn Fft<f64>>) {
    let scratch_len = plan.get_inplace_scratch_len();
    data.par_chunks_mut(n * 8).for_each_init(
        || vec![Complex64::new(0.0, 0.0); scratch_len],
        |scratch, rows| plan.process_with_scratch(rows, scratch),
    );
}

fn transpose(src: &[Complex64], dst: &mut [Complex64], n: usize) {
    const B: usize = 32;
    for bi in (0..n).step_by(B) {
        for bj in (0..n).step_by(B) {
            for i in bi..(bi + B).min(n) {
                for j in bj..(bj + B).min(n) {
                    dst[j * n + i] = src[i * n + j];
                }
            }
        }
    }
}
