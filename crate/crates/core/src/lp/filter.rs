use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{argument, Error, Result};
use crate::spectral::{Grid, GridRef, ScalarField};

/// Inner radius of the dyadic annulus.
pub const ANNULUS_INNER: f64 = 0.75;
/// Outer radius of the low-pass symbol.
pub const LOW_PASS_OUTER: f64 = 4.0 / 3.0;
pub const DEFAULT_N0: i32 = 4;

fn h(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else {
        (-1.0 / t).exp()
    }
}

/// C^∞ step rising from 0 at `t ≤ 0` to 1 at `t ≥ 1`.
pub fn smooth_step(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else if t >= 1.0 {
        1.0
    } else {
        let a = h(t);
        a / (a + h(1.0 - t))
    }
}

/// Radial cutoff: 1 on `|ξ| ≤ 3/4`, 0 on `|ξ| ≥ 4/3`.
pub fn chi0(r: f64) -> f64 {
    1.0 - smooth_step((r - ANNULUS_INNER) / (LOW_PASS_OUTER - ANNULUS_INNER))
}

/// Annular symbol `φ(ξ) = χ₀(ξ/2) − χ₀(ξ)`, supported in `3/4 ≤ |ξ| ≤ 8/3`.
pub fn phi(r: f64) -> f64 {
    chi0(0.5 * r) - chi0(r)
}

/// Littlewood–Paley symbols sampled on a grid's retained wavenumbers.
///
/// Block `j = -1` is the low-pass `χ`, defined as `1 − Σ_{j≥0} φ(2^{-j}ξ)` on
/// retained modes so that the partition of unity holds to roundoff. All
/// symbols vanish outside the dealiasing mask.
#[derive(Debug)]
pub struct DyadicFilterBank {
    grid: GridRef,
    j_max: i32,
    n0: i32,
    symbols: Vec<Vec<f64>>,
    oversample: usize,
    fine: Option<GridRef>,
}

impl DyadicFilterBank {
    pub fn new(grid: &GridRef) -> Arc<Self> {
        Self::with_options(grid, DEFAULT_N0, 1).expect("default options are valid")
    }

    /// `oversample > 1` evaluates `L^∞` block norms on a zero-padded grid that
    /// many times finer.
    pub fn with_options(grid: &GridRef, n0: i32, oversample: usize) -> Result<Arc<Self>> {
        if n0 < 2 {
            return argument(format!("paraproduct lag N0 must be >= 2, got {n0}"));
        }
        if oversample == 0 || !oversample.is_power_of_two() {
            return argument(format!("oversampling factor must be a power of two, got {oversample}"));
        }
        let kmax = grid.max_retained_wavenumber();
        let mut j_max = -1;
        while ANNULUS_INNER * 2f64.powi(j_max + 1) < kmax {
            j_max += 1;
        }
        let mut symbols = vec![vec![0.0; grid.len()]; (j_max + 2) as usize];
        for idx in 0..grid.len() {
            if !grid.retained(idx) {
                continue;
            }
            let r = grid.k_squared(idx).sqrt();
            let mut total = 0.0;
            for j in 0..=j_max {
                let v = phi(r * 2f64.powi(-j));
                symbols[(j + 1) as usize][idx] = v;
                total += v;
            }
            symbols[0][idx] = 1.0 - total;
        }
        let fine = if oversample > 1 {
            Some(Grid::with_dealias(
                grid.n() * oversample,
                grid.length(),
                grid.dealias_fraction(),
            )?)
        } else {
            None
        };
        Ok(Arc::new(Self {
            grid: grid.clone(),
            j_max,
            n0,
            symbols,
            oversample,
            fine,
        }))
    }

    pub fn grid(&self) -> &GridRef {
        &self.grid
    }

    pub fn j_min(&self) -> i32 {
        -1
    }

    pub fn j_max(&self) -> i32 {
        self.j_max
    }

    pub fn n0(&self) -> i32 {
        self.n0
    }

    pub fn oversample(&self) -> usize {
        self.oversample
    }

    pub fn block_count(&self) -> usize {
        self.symbols.len()
    }

    /// Symbol table of block `j` in flat spectral layout.
    pub fn symbol(&self, j: i32) -> Result<&[f64]> {
        self.check_index(j)?;
        Ok(&self.symbols[(j + 1) as usize])
    }

    /// Largest deviation from one of `χ + Σφ_j` over retained modes.
    pub fn partition_defect(&self) -> f64 {
        (0..self.grid.len())
            .filter(|&idx| self.grid.retained(idx))
            .map(|idx| {
                let s: f64 = self.symbols.iter().map(|t| t[idx]).sum();
                (s - 1.0).abs()
            })
            .fold(0.0, f64::max)
    }

    fn check_index(&self, j: i32) -> Result<()> {
        if j < -1 || j > self.j_max {
            return argument(format!("block index {j} outside [-1, {}]", self.j_max));
        }
        Ok(())
    }

    fn check_grid(&self, f: &ScalarField) -> Result<()> {
        if **f.grid() == *self.grid {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }

    fn block_spectrum(&self, spec: &[Complex64], j: i32) -> Vec<Complex64> {
        spec.iter()
            .zip(&self.symbols[(j + 1) as usize])
            .map(|(c, s)| c * s)
            .collect()
    }

    /// `Δ_j f`.
    pub fn block(&self, f: &ScalarField, j: i32) -> Result<ScalarField> {
        self.check_index(j)?;
        self.check_grid(f)?;
        let spec = self.block_spectrum(f.spectrum(), j);
        ScalarField::from_spectrum(f.grid(), spec)
    }

    /// All blocks of `f`, computed in parallel.
    pub fn decompose(&self, f: &ScalarField) -> Result<DyadicDecomposition> {
        self.check_grid(f)?;
        let spec = f.spectrum();
        let blocks = (-1..=self.j_max)
            .into_par_iter()
            .map(|j| ScalarField::from_spectrum_trusted(f.grid(), self.block_spectrum(spec, j)))
            .collect();
        Ok(DyadicDecomposition {
            j_max: self.j_max,
            blocks,
        })
    }

    /// `‖Δ_j f‖_{L^p}` for every block, in order `j = -1, 0, …, j_max`.
    pub fn block_norms(&self, f: &ScalarField, p: f64) -> Result<Vec<f64>> {
        self.check_grid(f)?;
        let spec = f.spectrum();
        let cell = self.grid.cell_area();
        Ok((-1..=self.j_max)
            .into_par_iter()
            .map(|j| {
                let bs = self.block_spectrum(spec, j);
                match (&self.fine, p.is_infinite()) {
                    (Some(fine), true) => {
                        let vals = self.padded_values(fine, &bs);
                        crate::spectral::lp_norm(&vals, p, cell)
                    }
                    _ => crate::spectral::lp_norm(&self.grid.inverse_real(&bs), p, cell),
                }
            })
            .collect())
    }

    fn padded_values(&self, fine: &GridRef, spec: &[Complex64]) -> Vec<f64> {
        let n = self.grid.n();
        let m = fine.n();
        let scale = (self.oversample * self.oversample) as f64;
        let mut big = vec![Complex64::new(0.0, 0.0); m * m];
        for (idx, c) in spec.iter().enumerate() {
            if *c == Complex64::new(0.0, 0.0) {
                continue;
            }
            let mx = self.grid.mode(idx % n);
            let my = self.grid.mode(idx / n);
            let ix = mx.rem_euclid(m as i64) as usize;
            let iy = my.rem_euclid(m as i64) as usize;
            big[iy * m + ix] = c * scale;
        }
        fine.inverse_real(&big)
    }
}

/// The family `{Δ_j f}` for `j = -1, …, j_max`.
#[derive(Debug, Clone)]
pub struct DyadicDecomposition {
    j_max: i32,
    blocks: Vec<ScalarField>,
}

impl DyadicDecomposition {
    pub fn j_max(&self) -> i32 {
        self.j_max
    }

    /// `Δ_j f`; blocks outside the resolved range are zero and yield `None`.
    pub fn get(&self, j: i32) -> Option<&ScalarField> {
        if j < -1 || j > self.j_max {
            None
        } else {
            Some(&self.blocks[(j + 1) as usize])
        }
    }

    pub fn blocks(&self) -> &[ScalarField] {
        &self.blocks
    }

    /// Samples of `Σ_j Δ_j f`.
    pub fn sum(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.blocks[0].values().len()];
        for b in &self.blocks {
            for (o, v) in out.iter_mut().zip(b.values()) {
                *o += v;
            }
        }
        out
    }

    /// Partial sums `S_j = Σ_{k ≤ j-1} Δ_k` for `j = -1, …, j_max + 1`; entry
    /// `i` holds `S_{i-1}`.
    pub(crate) fn low_sums(&self) -> Vec<Vec<f64>> {
        let len = self.blocks[0].values().len();
        let mut out = Vec::with_capacity(self.blocks.len() + 1);
        let mut acc = vec![0.0; len];
        out.push(acc.clone());
        for b in &self.blocks {
            for (a, v) in acc.iter_mut().zip(b.values()) {
                *a += v;
            }
            out.push(acc.clone());
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn symbol_supports() {
        assert_eq!(chi0(0.75), 1.0);
        assert_eq!(chi0(4.0 / 3.0), 0.0);
        assert_eq!(phi(0.74), 0.0);
        assert_eq!(phi(8.0 / 3.0 + 1e-9), 0.0);
        assert!(phi(1.0) > 0.0 && phi(2.5) > 0.0);
        for i in 0..200 {
            let r = 0.01 * i as f64;
            let s = chi0(r) + (0..10).map(|j| phi(r / 2f64.powi(j))).sum::<f64>();
            assert!((s - 1.0).abs() < 1e-14, "r={r}");
        }
    }

    #[test]
    fn block_range_at_256() {
        let g = Grid::new(256, 2.0 * PI).unwrap();
        let bank = DyadicFilterBank::new(&g);
        assert_eq!(bank.j_max(), 7);
        assert_eq!(bank.block_count(), 9);
        assert!(bank.partition_defect() <= 1e-12);
        assert!(bank.symbol(8).is_err());
        assert!(bank.symbol(-2).is_err());
    }

    #[test]
    fn low_pass_respects_support() {
        let g = Grid::new(64, 2.0 * PI).unwrap();
        let bank = DyadicFilterBank::new(&g);
        let chi = bank.symbol(-1).unwrap();
        for idx in 0..g.len() {
            if g.k_squared(idx).sqrt() > LOW_PASS_OUTER {
                assert!(chi[idx].abs() < 1e-15);
            }
        }
    }

    #[test]
    fn constant_is_low_pass() {
        let g = Grid::new(32, 2.0 * PI).unwrap();
        let bank = DyadicFilterBank::new(&g);
        let f = ScalarField::constant(&g, 2.5);
        let d = bank.decompose(&f).unwrap();
        assert!(d.get(-1).unwrap().max_abs_diff(&f) < 1e-14);
        for j in 0..=bank.j_max() {
            assert!(d.get(j).unwrap().max_abs() < 1e-14);
        }
    }

    #[test]
    fn unit_mode_lives_in_two_blocks() {
        let g = Grid::new(64, 2.0 * PI).unwrap();
        let bank = DyadicFilterBank::new(&g);
        let f = ScalarField::from_fn(&g, |x, _| x.cos());
        let d = bank.decompose(&f).unwrap();
        let lo = d.get(-1).unwrap();
        let b0 = d.get(0).unwrap();
        // χ(1) and φ(1) from the closed-form step.
        let c = 1.0 - smooth_step((1.0 - 0.75) / (4.0 / 3.0 - 0.75));
        assert!(lo.max_abs_diff(&f.scaled(c)) < 1e-13);
        assert!(b0.max_abs_diff(&f.scaled(1.0 - c)) < 1e-13);
        for j in 1..=bank.j_max() {
            assert!(d.get(j).unwrap().max_abs() < 1e-14);
        }
        let sum = ScalarField::from_values(&g, d.sum()).unwrap();
        assert!(sum.max_abs_diff(&f) < 1e-12);
    }

    #[test]
    fn disjoint_annuli_annihilate() {
        let g = Grid::new(64, 2.0 * PI).unwrap();
        let bank = DyadicFilterBank::new(&g);
        let a = bank.symbol(1).unwrap();
        let b = bank.symbol(3).unwrap();
        assert!(a.iter().zip(b).all(|(x, y)| x * y == 0.0));
    }

    #[test]
    fn rejects_small_lag() {
        let g = Grid::new(32, 1.0).unwrap();
        assert!(DyadicFilterBank::with_options(&g, 1, 1).is_err());
        assert!(DyadicFilterBank::with_options(&g, 4, 3).is_err());
    }

    #[test]
    fn oversampled_sup_is_at_least_grid_sup() {
        let g = Grid::new(32, 2.0 * PI).unwrap();
        let plain = DyadicFilterBank::new(&g);
        let fine = DyadicFilterBank::with_options(&g, 4, 4).unwrap();
        let f = ScalarField::from_fn(&g, |x, y| (3.0 * x + 0.3).sin() * (5.0 * y).cos());
        let a = plain.block_norms(&f, f64::INFINITY).unwrap();
        let b = fine.block_norms(&f, f64::INFINITY).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert!(y + 1e-13 >= *x);
        }
        let a2 = plain.block_norms(&f, 2.0).unwrap();
        let b2 = fine.block_norms(&f, 2.0).unwrap();
        assert_eq!(a2, b2);
    }
}
