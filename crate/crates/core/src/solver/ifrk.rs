//! Integrating-factor Runge–Kutta on spectral coefficient vectors.
//!
//! Each component `c` obeys `∂_t ŷ_c = -ν_c|k|² ŷ_c + N_c(y, t)`. The linear
//! part is integrated exactly through `E(τ) = exp(-ν|k|²τ)`; only forward
//! (decaying) factors are ever formed.

use num_complex::Complex64;

use crate::error::Result;
use crate::spectral::GridRef;

pub type Spectra = Vec<Vec<Complex64>>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    Ifrk2,
    Ifrk3,
}

impl Scheme {
    pub fn order(self) -> u32 {
        match self {
            Scheme::Ifrk2 => 2,
            Scheme::Ifrk3 => 3,
        }
    }
}

fn decay(grid: &GridRef, nu: f64, tau: f64) -> Option<Vec<f64>> {
    if nu == 0.0 || tau == 0.0 {
        return None;
    }
    Some((0..grid.len()).map(|i| (-nu * grid.k_squared(i) * tau).exp()).collect())
}

struct Factors {
    full: Vec<Option<Vec<f64>>>,
    half: Vec<Option<Vec<f64>>>,
}

fn apply(f: &[Option<Vec<f64>>], y: &mut Spectra) {
    for (c, e) in y.iter_mut().zip(f) {
        if let Some(e) = e {
            c.iter_mut().zip(e).for_each(|(v, m)| *v *= m);
        }
    }
}

/// `Σ a_i · y_i` componentwise.
fn lincomb(terms: &[(f64, &Spectra)]) -> Spectra {
    let (a0, y0) = terms[0];
    let mut out: Spectra = y0.iter().map(|c| c.iter().map(|v| v * a0).collect()).collect();
    for (a, y) in &terms[1..] {
        for (o, c) in out.iter_mut().zip(y.iter()) {
            o.iter_mut().zip(c).for_each(|(p, v)| *p += v * a);
        }
    }
    out
}

/// One step from `(y, t)` to `t + dt`.
pub fn ifrk_step(
    grid: &GridRef,
    nus: &[f64],
    scheme: Scheme,
    y: &Spectra,
    t: f64,
    dt: f64,
    rhs: &mut dyn FnMut(&Spectra, f64) -> Result<Spectra>,
) -> Result<Spectra> {
    let f = Factors {
        full: nus.iter().map(|&nu| decay(grid, nu, dt)).collect(),
        half: nus.iter().map(|&nu| decay(grid, nu, 0.5 * dt)).collect(),
    };
    match scheme {
        Scheme::Ifrk2 => {
            let a = rhs(y, t)?;
            let mut ystar = lincomb(&[(1.0, y), (dt, &a)]);
            apply(&f.full, &mut ystar);
            let b = rhs(&ystar, t + dt)?;
            let mut out = lincomb(&[(1.0, y), (0.5 * dt, &a)]);
            apply(&f.full, &mut out);
            Ok(lincomb(&[(1.0, &out), (0.5 * dt, &b)]))
        }
        Scheme::Ifrk3 => {
            let n1 = rhs(y, t)?;
            let mut ya = lincomb(&[(1.0, y), (0.5 * dt, &n1)]);
            apply(&f.half, &mut ya);
            let n2 = rhs(&ya, t + 0.5 * dt)?;
            let mut e_n2 = n2.clone();
            apply(&f.half, &mut e_n2);
            let mut yb = lincomb(&[(1.0, y), (-dt, &n1)]);
            apply(&f.full, &mut yb);
            let yb = lincomb(&[(1.0, &yb), (2.0 * dt, &e_n2)]);
            let n3 = rhs(&yb, t + dt)?;
            let mut base = lincomb(&[(1.0, y), (dt / 6.0, &n1)]);
            apply(&f.full, &mut base);
            Ok(lincomb(&[(1.0, &base), (4.0 * dt / 6.0, &e_n2), (dt / 6.0, &n3)]))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::Grid;

    /// Scalar ODE y' = -λy + cos t on a single mode with |k|² = 1.
    fn error(scheme: Scheme, steps: usize) -> f64 {
        let g = Grid::new(16, 2.0 * std::f64::consts::PI).unwrap();
        let idx = 1; // mode (1, 0)
        let lam = 0.7;
        let mut y: Spectra = vec![vec![Complex64::new(0.0, 0.0); g.len()]];
        y[0][idx] = Complex64::new(1.0, 0.0);
        let dt = 1.0 / steps as f64;
        let mut rhs = |_: &Spectra, t: f64| {
            let mut out = vec![vec![Complex64::new(0.0, 0.0); 256]];
            out[0][idx] = Complex64::new(t.cos(), 0.0);
            Ok(out)
        };
        for s in 0..steps {
            y = ifrk_step(&g, &[lam], scheme, &y, s as f64 * dt, dt, &mut rhs).unwrap();
        }
        // y = e^{-λt} + (λ cos t + sin t - λ e^{-λt})/(1+λ²)
        let t = 1.0f64;
        let exact = (-lam * t).exp() + (lam * t.cos() + t.sin() - lam * (-lam * t).exp()) / (1.0 + lam * lam);
        (y[0][idx].re - exact).abs()
    }

    #[test]
    fn convergence_orders() {
        for (scheme, min_ratio) in [(Scheme::Ifrk2, 3.5), (Scheme::Ifrk3, 7.0)] {
            let e: Vec<f64> = [10, 20, 40, 80].iter().map(|&s| error(scheme, s)).collect();
            for w in e.windows(2) {
                assert!(w[0] / w[1] >= min_ratio, "{scheme:?}: {e:?}");
            }
        }
    }

    #[test]
    fn pure_decay_is_exact() {
        let g = Grid::new(16, 2.0 * std::f64::consts::PI).unwrap();
        let mut y: Spectra = vec![vec![Complex64::new(0.0, 0.0); g.len()]];
        y[0][3] = Complex64::new(2.0, 0.0);
        let mut zero = |_: &Spectra, _: f64| Ok(vec![vec![Complex64::new(0.0, 0.0); 256]]);
        for scheme in [Scheme::Ifrk2, Scheme::Ifrk3] {
            let out = ifrk_step(&g, &[0.5], scheme, &y, 0.0, 0.3, &mut zero).unwrap();
            let exact = 2.0 * (-0.5 * 9.0 * 0.3f64).exp();
            assert!((out[0][3].re - exact).abs() < 1e-15);
        }
    }
}
