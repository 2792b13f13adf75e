//! Spectral differentiation, dealiasing, Poisson inversion and the
//! Biot–Savart law on the periodic box.

use num_complex::Complex64;

use super::field::{ScalarField, VectorField2};
use super::grid::GridRef;
use crate::error::{argument, Error, Result};

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Relative size of the vorticity mean above which the Biot–Savart inversion
/// reports that it had to discard it.
pub const MEAN_WARNING_RATIO: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
}

fn ensure_same(a: &ScalarField, b: &ScalarField) -> Result<()> {
    if a.same_grid(b) {
        Ok(())
    } else {
        Err(Error::GridMismatch)
    }
}

/// Applies the dealiasing mask in spectral space.
pub fn dealias_spectrum(grid: &GridRef, spec: &mut [Complex64]) {
    for (idx, c) in spec.iter_mut().enumerate() {
        if !grid.retained(idx) {
            *c = ZERO;
        }
    }
}

pub fn dealias(f: &ScalarField) -> ScalarField {
    let mut spec = f.spectrum().to_vec();
    dealias_spectrum(f.grid(), &mut spec);
    ScalarField::from_spectrum_trusted(f.grid(), spec)
}

/// Dealiased pointwise product.
pub fn product(a: &ScalarField, b: &ScalarField) -> ScalarField {
    dealias(&a.mul_pointwise(b))
}

/// `∂_axis f` with the dealiasing mask applied.
pub fn partial(f: &ScalarField, axis: Axis) -> ScalarField {
    let grid = f.grid();
    let spec = f.spectrum();
    let out = (0..spec.len())
        .map(|idx| {
            if !grid.retained(idx) {
                return ZERO;
            }
            let (kx, ky) = grid.k_vec(idx);
            let k = if axis == Axis::X { kx } else { ky };
            I * k * spec[idx]
        })
        .collect();
    ScalarField::from_spectrum_trusted(grid, out)
}

pub fn gradient(f: &ScalarField) -> VectorField2 {
    VectorField2 {
        x: partial(f, Axis::X),
        y: partial(f, Axis::Y),
    }
}

pub fn divergence(v: &VectorField2) -> ScalarField {
    spectral_combine(&v.x, &v.y, |kx, ky, a, b| I * (kx * a + ky * b))
}

/// Scalar curl `∂₁v² − ∂₂v¹`.
pub fn curl(v: &VectorField2) -> ScalarField {
    spectral_combine(&v.x, &v.y, |kx, ky, a, b| I * (kx * b - ky * a))
}

pub fn laplacian(f: &ScalarField) -> ScalarField {
    multiplier(f, |k2| -k2)
}

/// Masked two-input spectral combination.
fn spectral_combine(
    a: &ScalarField,
    b: &ScalarField,
    op: impl Fn(f64, f64, Complex64, Complex64) -> Complex64,
) -> ScalarField {
    let grid = a.grid();
    let (sa, sb) = (a.spectrum(), b.spectrum());
    let out = (0..sa.len())
        .map(|idx| {
            if !grid.retained(idx) {
                return ZERO;
            }
            let (kx, ky) = grid.k_vec(idx);
            op(kx, ky, sa[idx], sb[idx])
        })
        .collect();
    ScalarField::from_spectrum_trusted(grid, out)
}

/// Radial Fourier multiplier `m(|k|²)` without masking.
pub fn multiplier(f: &ScalarField, m: impl Fn(f64) -> f64) -> ScalarField {
    let grid = f.grid();
    let out = f
        .spectrum()
        .iter()
        .enumerate()
        .map(|(idx, c)| c * m(grid.k_squared(idx)))
        .collect();
    ScalarField::from_spectrum_trusted(grid, out)
}

/// Exact heat semigroup `exp(ν Δ dt)`.
pub fn heat_multiplier(f: &ScalarField, nu: f64, dt: f64) -> Result<ScalarField> {
    if !(nu >= 0.0 && nu.is_finite()) {
        return argument(format!("diffusivity must be >= 0, got {nu}"));
    }
    if !(dt >= 0.0 && dt.is_finite()) {
        return argument(format!("time must be >= 0, got {dt}"));
    }
    if nu == 0.0 || dt == 0.0 {
        return Ok(f.clone());
    }
    Ok(multiplier(f, |k2| (-nu * k2 * dt).exp()))
}

/// Gaussian mollifier of standard deviation `width`.
pub fn mollify(f: &ScalarField, width: f64) -> ScalarField {
    if width <= 0.0 {
        return f.clone();
    }
    let s2 = 0.5 * width * width;
    multiplier(f, |k2| (-k2 * s2).exp())
}

/// Stream function `ψ` with `Δψ = ω` and zero mean.
pub fn stream_function(omega: &ScalarField) -> ScalarField {
    let grid = omega.grid();
    let out = omega
        .spectrum()
        .iter()
        .enumerate()
        .map(|(idx, c)| {
            let k2 = grid.k_squared(idx);
            if idx == 0 {
                ZERO
            } else {
                -c / k2
            }
        })
        .collect();
    ScalarField::from_spectrum_trusted(grid, out)
}

/// Velocity `u = ∇⊥ψ = (−∂₂ψ, ∂₁ψ)` with `Δψ = ω`, so that `curl u = ω` and
/// `div u = 0`. The mean of `ω` is discarded.
pub fn biot_savart(omega: &ScalarField) -> VectorField2 {
    biot_savart_with_report(omega).0
}

/// As [`biot_savart`], also returning the discarded mean when it exceeded
/// [`MEAN_WARNING_RATIO`] relative to `max|ω|`.
pub fn biot_savart_with_report(omega: &ScalarField) -> (VectorField2, Option<f64>) {
    let grid = omega.grid();
    let n = grid.n();
    let spec = omega.spectrum();
    let mean = spec[0].re / grid.len() as f64;
    let scale = omega.max_abs();
    let warning = if mean.abs() > MEAN_WARNING_RATIO * scale && scale > 0.0 {
        log::warn!("vorticity mean {mean:e} removed before Biot-Savart inversion");
        Some(mean)
    } else {
        None
    };
    let mut ux = vec![ZERO; spec.len()];
    let mut uy = vec![ZERO; spec.len()];
    for idx in 1..spec.len() {
        let (kx, ky) = grid.k_vec(idx);
        let psi = -spec[idx] / (kx * kx + ky * ky);
        if !grid.is_nyquist(idx / n) {
            ux[idx] = -I * ky * psi;
        }
        if !grid.is_nyquist(idx % n) {
            uy[idx] = I * kx * psi;
        }
    }
    (
        VectorField2 {
            x: ScalarField::from_spectrum_trusted(grid, ux),
            y: ScalarField::from_spectrum_trusted(grid, uy),
        },
        warning,
    )
}

/// Full velocity gradient `g[i][j] = ∂_j u^i` of a velocity, masked.
pub fn velocity_gradient(u: &VectorField2) -> [[ScalarField; 2]; 2] {
    [
        [partial(&u.x, Axis::X), partial(&u.x, Axis::Y)],
        [partial(&u.y, Axis::X), partial(&u.y, Axis::Y)],
    ]
}

/// Leray projection onto divergence-free fields.
pub fn leray_project(v: &VectorField2) -> VectorField2 {
    let grid = v.grid();
    let (sa, sb) = (v.x.spectrum(), v.y.spectrum());
    let mut px = vec![ZERO; sa.len()];
    let mut py = vec![ZERO; sa.len()];
    for idx in 0..sa.len() {
        let (kx, ky) = grid.k_vec(idx);
        let k2 = kx * kx + ky * ky;
        if idx == 0 {
            px[idx] = sa[idx];
            py[idx] = sb[idx];
            continue;
        }
        let kdot = (kx * sa[idx] + ky * sb[idx]) / k2;
        px[idx] = sa[idx] - kx * kdot;
        py[idx] = sb[idx] - ky * kdot;
    }
    VectorField2 {
        x: ScalarField::from_spectrum_trusted(grid, px),
        y: ScalarField::from_spectrum_trusted(grid, py),
    }
}

/// `u·∇f` with both the gradient and the product dealiased.
pub fn advective_derivative(u: &VectorField2, f: &ScalarField) -> ScalarField {
    let g = gradient(f);
    let prod = u
        .x
        .mul_pointwise(&g.x)
        .add(&u.y.mul_pointwise(&g.y));
    dealias(&prod)
}

/// Pressure `Π` with zero mean solving `ΔΠ = div(θe₂ − u·∇u)`.
pub fn recover_pressure(u: &VectorField2, theta: &ScalarField) -> Result<ScalarField> {
    ensure_same(&u.x, theta)?;
    let adv = VectorField2 {
        x: advective_derivative(u, &u.x),
        y: advective_derivative(u, &u.y),
    };
    let force = VectorField2 {
        x: adv.x.scaled(-1.0),
        y: dealias(theta).sub(&adv.y),
    };
    let rhs = divergence(&force);
    let grid = u.grid();
    let out = rhs
        .spectrum()
        .iter()
        .enumerate()
        .map(|(idx, c)| if idx == 0 { ZERO } else { -c / grid.k_squared(idx) })
        .collect();
    Ok(ScalarField::from_spectrum_trusted(grid, out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::Grid;
    use std::f64::consts::PI;

    fn grid(n: usize) -> GridRef {
        Grid::new(n, 2.0 * PI).unwrap()
    }

    #[test]
    fn gradient_of_constant_is_zero() {
        let g = grid(32);
        let f = ScalarField::constant(&g, 3.7);
        let d = gradient(&f);
        assert!(d.x.max_abs() < 1e-14 && d.y.max_abs() < 1e-14);
    }

    #[test]
    fn gradient_of_sine() {
        let g = grid(32);
        let f = ScalarField::from_fn(&g, |x, _| x.sin());
        let d = gradient(&f);
        let exact = ScalarField::from_fn(&g, |x, _| x.cos());
        assert!(d.x.max_abs_diff(&exact) <= 1e-12);
        assert!(d.y.max_abs() <= 1e-12);
    }

    #[test]
    fn biot_savart_single_mode() {
        let g = grid(64);
        let w = ScalarField::from_fn(&g, |x, y| x.sin() * y.sin());
        let u = biot_savart(&w);
        let ex = ScalarField::from_fn(&g, |x, y| 0.5 * x.sin() * y.cos());
        let ey = ScalarField::from_fn(&g, |x, y| -0.5 * x.cos() * y.sin());
        assert!(u.x.max_abs_diff(&ex) <= 1e-12);
        assert!(u.y.max_abs_diff(&ey) <= 1e-12);
    }

    #[test]
    fn biot_savart_zero() {
        let g = grid(16);
        let u = biot_savart(&ScalarField::zeros(&g));
        assert_eq!(u.max_norm(), 0.0);
    }

    #[test]
    fn biot_savart_reports_mean() {
        let g = grid(16);
        let w = ScalarField::from_fn(&g, |x, _| 1.0 + x.cos());
        let (u, warn) = biot_savart_with_report(&w);
        assert!((warn.unwrap() - 1.0).abs() < 1e-12);
        assert!(curl(&u).max_abs_diff(&ScalarField::from_fn(&g, |x, _| x.cos())) < 1e-12);
    }

    #[test]
    fn heat_multiplier_cases() {
        let g = grid(16);
        let f = ScalarField::from_fn(&g, |x, _| x.cos());
        assert_eq!(heat_multiplier(&f, 1.0, 0.0).unwrap().values(), f.values());
        let h = heat_multiplier(&f, 1.0, 0.5).unwrap();
        assert!(h.max_abs_diff(&f.scaled((-0.5f64).exp())) <= 1e-14);
        assert!(heat_multiplier(&f, -1.0, 0.1).is_err());
        assert!(heat_multiplier(&f, 1.0, -0.1).is_err());
    }

    #[test]
    fn heat_semigroup_composes() {
        let g = grid(32);
        let f = ScalarField::from_fn(&g, |x, y| (x + 2.0 * y).sin() + (3.0 * x).cos());
        let a = heat_multiplier(&heat_multiplier(&f, 0.3, 0.2).unwrap(), 0.3, 0.45).unwrap();
        let b = heat_multiplier(&f, 0.3, 0.65).unwrap();
        assert!(a.max_abs_diff(&b) <= 1e-13);
    }

    #[test]
    fn hydrostatic_pressure() {
        let g = grid(32);
        let u = VectorField2::zeros(&g);
        let theta = ScalarField::from_fn(&g, |_, y| y.sin());
        let p = recover_pressure(&u, &theta).unwrap();
        let exact = ScalarField::from_fn(&g, |_, y| -y.cos());
        assert!(p.max_abs_diff(&exact) <= 1e-12);
        let zero = recover_pressure(&u, &ScalarField::zeros(&g)).unwrap();
        assert_eq!(zero.max_abs(), 0.0);
    }

    #[test]
    fn dealias_is_idempotent() {
        let g = grid(32);
        let f = ScalarField::from_fn(&g, |x, y| (x * 15.0).sin() * (y * 3.0).cos() + x.cos());
        let once = dealias(&f);
        let twice = dealias(&once);
        assert!(once.max_abs_diff(&twice) < 1e-15);
    }
}
