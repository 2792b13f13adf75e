//! Seeded random trigonometric polynomials for the probe ensembles.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::spectral::{GridRef, ScalarField, VectorField2};

/// Gaussian coefficients with amplitude `|k|^{-alpha}` for integer modes
/// `0 < max(|m₁|, |m₂|) <= kmax`, drawn in a fixed order from stream `stream`
/// of `seed`. The coefficient set does not depend on the grid, so a finer grid
/// samples the same function (truncated to its retained band).
#[derive(Debug, Clone)]
pub struct RandomSpectrum {
    kmax: i64,
    coeffs: Vec<Complex64>,
}

impl RandomSpectrum {
    pub fn new(seed: u64, stream: u64, alpha: f64, kmax: i64, length: f64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        let side = (2 * kmax + 1) as usize;
        let k0 = 2.0 * std::f64::consts::PI / length;
        let mut coeffs = Vec::with_capacity(side * side);
        let mut total = 0.0;
        for my in -kmax..=kmax {
            for mx in -kmax..=kmax {
                let a: f64 = rng.sample(StandardNormal);
                let b: f64 = rng.sample(StandardNormal);
                let c = if mx == 0 && my == 0 {
                    Complex64::new(0.0, 0.0)
                } else {
                    let k = k0 * ((mx * mx + my * my) as f64).sqrt();
                    Complex64::new(a, b) * k.powf(-alpha)
                };
                total += c.norm_sqr();
                coeffs.push(c);
            }
        }
        let scale = if total > 0.0 { 1.0 / total.sqrt() } else { 0.0 };
        coeffs.iter_mut().for_each(|c| *c *= scale);
        Self { kmax, coeffs }
    }

    fn coeff(&self, mx: i64, my: i64) -> Complex64 {
        let side = 2 * self.kmax + 1;
        self.coeffs[((my + self.kmax) * side + mx + self.kmax) as usize]
    }

    /// Real part of `Σ c_m e^{i k·x}` restricted to retained modes of `grid`.
    pub fn sample(&self, grid: &GridRef) -> ScalarField {
        let n = grid.n();
        let nn = (n * n) as f64;
        let mut spec = vec![Complex64::new(0.0, 0.0); n * n];
        for (idx, s) in spec.iter_mut().enumerate() {
            if !grid.retained(idx) {
                continue;
            }
            let (mx, my) = (grid.mode(idx % n), grid.mode(idx / n));
            if mx.abs() > self.kmax || my.abs() > self.kmax {
                continue;
            }
            // Hermitian part so that the inverse transform is real.
            let c = self.coeff(mx, my) + self.coeff(-mx, -my).conj();
            *s = c * (0.5 * nn);
        }
        ScalarField::from_spectrum_trusted(grid, spec)
    }
}

pub fn random_field(grid: &GridRef, seed: u64, stream: u64, alpha: f64, kmax: i64) -> ScalarField {
    RandomSpectrum::new(seed, stream, alpha, kmax, grid.length()).sample(grid)
}

/// Two independent components.
pub fn random_vector_field(grid: &GridRef, seed: u64, stream: u64, alpha: f64, kmax: i64) -> VectorField2 {
    VectorField2 {
        x: random_field(grid, seed, stream, alpha, kmax),
        y: random_field(grid, seed, stream + 1, alpha, kmax),
    }
}

/// `∇^⊥ψ` for a random stream function with envelope `|k|^{-alpha-1}`.
pub fn random_solenoidal_field(grid: &GridRef, seed: u64, stream: u64, alpha: f64, kmax: i64) -> VectorField2 {
    let psi = random_field(grid, seed, stream, alpha + 1.0, kmax);
    let g = crate::spectral::gradient(&psi);
    VectorField2 {
        x: g.y.scaled(-1.0),
        y: g.x,
    }
}
