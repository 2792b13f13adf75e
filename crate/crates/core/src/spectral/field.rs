use std::sync::{Arc, OnceLock};

use num_complex::Complex64;

use super::grid::GridRef;
use crate::error::{Error, Result};

/// Real scalar field sampled on a periodic grid, with a lazily computed and
/// cached Fourier representation.
#[derive(Debug)]
pub struct ScalarField {
    grid: GridRef,
    values: Vec<f64>,
    spectrum: OnceLock<Vec<Complex64>>,
}

impl Clone for ScalarField {
    fn clone(&self) -> Self {
        let spectrum = OnceLock::new();
        if let Some(s) = self.spectrum.get() {
            let _ = spectrum.set(s.clone());
        }
        Self {
            grid: self.grid.clone(),
            values: self.values.clone(),
            spectrum,
        }
    }
}

impl ScalarField {
    pub fn zeros(grid: &GridRef) -> Self {
        Self::from_parts(grid, vec![0.0; grid.len()], None)
    }

    pub fn constant(grid: &GridRef, c: f64) -> Self {
        Self::from_parts(grid, vec![c; grid.len()], None)
    }

    /// Wraps grid samples; rejects wrong lengths and non-finite samples.
    pub fn from_values(grid: &GridRef, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::Argument(format!(
                "expected {} samples, got {}",
                grid.len(),
                values.len()
            )));
        }
        check_finite(&values, "scalar field")?;
        Ok(Self::from_parts(grid, values, None))
    }

    pub fn from_fn(grid: &GridRef, f: impl Fn(f64, f64) -> f64) -> Self {
        let values = (0..grid.len())
            .map(|i| {
                let (x, y) = grid.point(i);
                f(x, y)
            })
            .collect();
        Self::from_parts(grid, values, None)
    }

    /// Builds a field from Fourier coefficients; the real part of the inverse
    /// transform becomes the sample values and the given spectrum is cached.
    pub fn from_spectrum(grid: &GridRef, spectrum: Vec<Complex64>) -> Result<Self> {
        if spectrum.len() != grid.len() {
            return Err(Error::Argument("spectrum length does not match grid".into()));
        }
        let values = grid.inverse_real(&spectrum);
        check_finite(&values, "spectral field")?;
        Ok(Self::from_parts(grid, values, Some(spectrum)))
    }

    /// For spectra produced internally from finite inputs.
    pub(crate) fn from_spectrum_trusted(grid: &GridRef, spectrum: Vec<Complex64>) -> Self {
        let values = grid.inverse_real(&spectrum);
        Self::from_parts(grid, values, Some(spectrum))
    }

    pub(crate) fn from_values_trusted(grid: &GridRef, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), grid.len());
        Self::from_parts(grid, values, None)
    }

    fn from_parts(grid: &GridRef, values: Vec<f64>, spectrum: Option<Vec<Complex64>>) -> Self {
        let cell = OnceLock::new();
        if let Some(s) = spectrum {
            let _ = cell.set(s);
        }
        Self {
            grid: grid.clone(),
            values,
            spectrum: cell,
        }
    }

    pub fn grid(&self) -> &GridRef {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn spectrum(&self) -> &[Complex64] {
        self.spectrum.get_or_init(|| self.grid.forward_real(&self.values))
    }

    /// Copy of the field without its cached spectrum, so that later spectral
    /// work starts from the stored samples only.
    pub fn detached(&self) -> Self {
        Self::from_parts(&self.grid, self.values.clone(), None)
    }

    pub fn same_grid(&self, other: &ScalarField) -> bool {
        Arc::ptr_eq(&self.grid, &other.grid) || *self.grid == *other.grid
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// True when every sample carries the same bit pattern.
    pub fn is_uniform(&self) -> bool {
        let first = self.values[0].to_bits();
        self.values.iter().all(|v| v.to_bits() == first)
    }

    /// Rectangle-rule integral over the box.
    pub fn integral(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.grid.cell_area()
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    /// `L^p` norm by equal-weight quadrature; `p = ∞` gives the grid maximum.
    pub fn lp_norm(&self, p: f64) -> f64 {
        lp_norm(&self.values, p, self.grid.cell_area())
    }

    /// `∫ self · other dx` by quadrature.
    pub fn inner(&self, other: &ScalarField) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a * b)
            .sum::<f64>()
            * self.grid.cell_area()
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self::from_parts(&self.grid, self.values.iter().map(|&v| f(v)).collect(), None)
    }

    pub fn scaled(&self, a: f64) -> Self {
        let spectrum = self
            .spectrum
            .get()
            .map(|s| s.iter().map(|c| c * a).collect());
        Self::from_parts(&self.grid, self.values.iter().map(|v| v * a).collect(), spectrum)
    }

    pub fn add(&self, other: &ScalarField) -> Self {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &ScalarField) -> Self {
        self.zip_with(other, |a, b| a - b)
    }

    /// Pointwise product without dealiasing.
    pub fn mul_pointwise(&self, other: &ScalarField) -> Self {
        self.zip_with(other, |a, b| a * b)
    }

    pub fn zip_with(&self, other: &ScalarField, f: impl Fn(f64, f64) -> f64) -> Self {
        assert!(self.same_grid(other), "fields live on different grids");
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(&a, &b)| f(a, b))
            .collect();
        Self::from_parts(&self.grid, values, None)
    }

    pub fn max_abs_diff(&self, other: &ScalarField) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }

    pub fn at(&self, ix: usize, iy: usize) -> f64 {
        self.values[iy * self.grid.n() + ix]
    }
}

/// Pair of scalar components sharing one grid.
#[derive(Debug, Clone)]
pub struct VectorField2 {
    pub x: ScalarField,
    pub y: ScalarField,
}

impl VectorField2 {
    pub fn new(x: ScalarField, y: ScalarField) -> Result<Self> {
        if !x.same_grid(&y) {
            return Err(Error::GridMismatch);
        }
        Ok(Self { x, y })
    }

    pub fn zeros(grid: &GridRef) -> Self {
        Self {
            x: ScalarField::zeros(grid),
            y: ScalarField::zeros(grid),
        }
    }

    pub fn constant(grid: &GridRef, c: [f64; 2]) -> Self {
        Self {
            x: ScalarField::constant(grid, c[0]),
            y: ScalarField::constant(grid, c[1]),
        }
    }

    pub fn from_fn(grid: &GridRef, f: impl Fn(f64, f64) -> [f64; 2]) -> Self {
        let n = grid.len();
        let mut a = Vec::with_capacity(n);
        let mut b = Vec::with_capacity(n);
        for i in 0..n {
            let (x, y) = grid.point(i);
            let v = f(x, y);
            a.push(v[0]);
            b.push(v[1]);
        }
        Self {
            x: ScalarField::from_values_trusted(grid, a),
            y: ScalarField::from_values_trusted(grid, b),
        }
    }

    pub fn grid(&self) -> &GridRef {
        self.x.grid()
    }

    pub fn components(&self) -> [&ScalarField; 2] {
        [&self.x, &self.y]
    }

    /// Largest pointwise Euclidean length.
    pub fn max_norm(&self) -> f64 {
        self.x
            .values()
            .iter()
            .zip(self.y.values())
            .fold(0.0, |m, (a, b)| m.max(a.hypot(*b)))
    }

    pub fn l2_norm_squared(&self) -> f64 {
        self.x.inner(&self.x) + self.y.inner(&self.y)
    }

    pub fn scaled(&self, a: f64) -> Self {
        Self {
            x: self.x.scaled(a),
            y: self.y.scaled(a),
        }
    }

    pub fn add(&self, other: &VectorField2) -> Self {
        Self {
            x: self.x.add(&other.x),
            y: self.y.add(&other.y),
        }
    }

    pub fn sub(&self, other: &VectorField2) -> Self {
        Self {
            x: self.x.sub(&other.x),
            y: self.y.sub(&other.y),
        }
    }

    pub fn detached(&self) -> Self {
        Self {
            x: self.x.detached(),
            y: self.y.detached(),
        }
    }

    pub fn max_abs_diff(&self, other: &VectorField2) -> f64 {
        self.x.max_abs_diff(&other.x).max(self.y.max_abs_diff(&other.y))
    }
}

pub(crate) fn check_finite(values: &[f64], what: &str) -> Result<()> {
    if values.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite(what.to_string()))
    }
}

pub(crate) fn lp_norm(values: &[f64], p: f64, weight: f64) -> f64 {
    if p.is_infinite() {
        values.iter().fold(0.0, |m, v| m.max(v.abs()))
    } else if p == 1.0 {
        values.iter().map(|v| v.abs()).sum::<f64>() * weight
    } else if p == 2.0 {
        (values.iter().map(|v| v * v).sum::<f64>() * weight).sqrt()
    } else {
        (values.iter().map(|v| v.abs().powf(p)).sum::<f64>() * weight).powf(1.0 / p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::Grid;
    use std::f64::consts::PI;

    #[test]
    fn rejects_non_finite() {
        let g = Grid::new(16, 1.0).unwrap();
        let mut v = vec![0.0; g.len()];
        v[5] = f64::NAN;
        assert!(matches!(
            ScalarField::from_values(&g, v),
            Err(Error::NonFinite(_))
        ));
        assert!(ScalarField::from_values(&g, vec![0.0; 3]).is_err());
    }

    #[test]
    fn quadrature_of_trig_polynomial_is_exact() {
        let g = Grid::new(32, 2.0 * PI).unwrap();
        let f = ScalarField::from_fn(&g, |x, y| 1.0 + x.sin() * (2.0 * y).cos());
        assert!((f.integral() - 4.0 * PI * PI).abs() < 1e-12);
        let l2 = f.lp_norm(2.0);
        let exact = (4.0 * PI * PI + PI * PI).sqrt();
        assert!((l2 - exact).abs() < 1e-12);
    }

    #[test]
    fn clone_keeps_spectrum_cache() {
        let g = Grid::new(16, 1.0).unwrap();
        let f = ScalarField::from_fn(&g, |x, _| x);
        let _ = f.spectrum();
        let c = f.clone();
        assert!(c.spectrum.get().is_some());
        assert!(f.detached().spectrum.get().is_none());
    }
}
