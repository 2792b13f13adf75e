//! Linear transport-diffusion `∂_t f + div(f v) - ν Δf = g` in conservative
//! form, on the same integrating-factor machinery as the Boussinesq stepper.

use num_complex::Complex64;

use super::ifrk::{ifrk_step, Scheme};
use crate::error::{argument, Error, Result};
use crate::spectral::{dealias, divergence, gradient, ScalarField, VectorField2};

pub type VelocityFn<'a> = &'a (dyn Fn(f64) -> VectorField2 + Sync);
pub type SourceFn<'a> = &'a (dyn Fn(f64) -> ScalarField + Sync);

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TdOptions {
    pub dt: f64,
    pub scheme: Scheme,
    /// Allowed `max|div v|` relative to `max|∇v|` (absolute when `v` is constant).
    pub div_tolerance: f64,
}

impl Default for TdOptions {
    fn default() -> Self {
        Self {
            dt: 1e-3,
            scheme: Scheme::Ifrk2,
            div_tolerance: 1e-8,
        }
    }
}

fn check_divergence(v: &VectorField2, tol: f64, t: f64) -> Result<()> {
    let d = divergence(v).max_abs();
    let gx = gradient(&v.x);
    let gy = gradient(&v.y);
    let scale = gx.max_norm().max(gy.max_norm()).max(1.0);
    if d > tol * scale {
        return argument(format!("velocity is not divergence free at t={t}: max|div v| = {d:e}"));
    }
    Ok(())
}

/// Integrates from `t = 0` to `t_final`, landing exactly on every time in
/// `outputs` (sorted, within `[0, t_final]`). `observe` sees the initial
/// field and every accepted step.
pub fn solve_transport_diffusion_observed(
    f0: &ScalarField,
    v: Option<VelocityFn>,
    g: Option<SourceFn>,
    nu: f64,
    t_final: f64,
    opts: &TdOptions,
    outputs: &[f64],
    observe: &mut dyn FnMut(f64, &ScalarField),
) -> Result<Vec<ScalarField>> {
    if !(nu >= 0.0 && nu.is_finite()) {
        return argument(format!("viscosity must be >= 0, got {nu}"));
    }
    if !(t_final >= 0.0 && opts.dt > 0.0) {
        return argument("need t_final >= 0 and dt > 0");
    }
    if outputs.windows(2).any(|w| w[0] > w[1]) || outputs.iter().any(|&t| t < 0.0 || t > t_final) {
        return argument("output times must be sorted and lie in [0, t_final]");
    }
    let grid = f0.grid().clone();
    let mut f = f0.clone();
    let mut t = 0.0;
    let mut out = Vec::with_capacity(outputs.len());
    let mut next_out = 0;
    observe(t, &f);
    let eps = 1e-12 * t_final.max(1.0);
    loop {
        while next_out < outputs.len() && outputs[next_out] <= t + eps {
            out.push(f.clone());
            next_out += 1;
        }
        if t >= t_final - eps {
            break;
        }
        let target = outputs.get(next_out).copied().unwrap_or(t_final).min(t_final);
        let dt = opts.dt.min(target - t);
        if let Some(v) = v {
            check_divergence(&v(t), opts.div_tolerance, t)?;
        }
        let zero = Complex64::new(0.0, 0.0);
        let mut rhs = |y: &Vec<Vec<Complex64>>, ts: f64| -> Result<Vec<Vec<Complex64>>> {
            let fs = dealias(&ScalarField::from_spectrum_trusted(&grid, y[0].clone()));
            let mut n = match v {
                Some(v) => {
                    let vel = v(ts);
                    let flux = VectorField2 {
                        x: fs.mul_pointwise(&vel.x),
                        y: fs.mul_pointwise(&vel.y),
                    };
                    divergence(&flux).scaled(-1.0).spectrum().to_vec()
                }
                None => vec![zero; grid.len()],
            };
            if let Some(g) = g {
                let src = dealias(&g(ts));
                n.iter_mut().zip(src.spectrum()).for_each(|(a, b)| *a += b);
            }
            Ok(vec![n])
        };
        let mut y = ifrk_step(&grid, &[nu], opts.scheme, &vec![f.spectrum().to_vec()], t, dt, &mut rhs)?;
        f = ScalarField::from_spectrum(&grid, y.pop().expect("one component")).map_err(|e| match e {
            Error::NonFinite(_) => Error::StepFailure {
                t,
                dt,
                max_velocity: v.map_or(0.0, |v| v(t).max_norm()),
                reason: "non-finite transport-diffusion solution".into(),
            },
            e => e,
        })?;
        t = if target - (t + dt) <= eps { target } else { t + dt };
        observe(t, &f);
    }
    Ok(out)
}

/// Trajectory of `f` at the requested output times.
pub fn solve_transport_diffusion(
    f0: &ScalarField,
    v: Option<VelocityFn>,
    g: Option<SourceFn>,
    nu: f64,
    t_final: f64,
    opts: &TdOptions,
    outputs: &[f64],
) -> Result<Vec<ScalarField>> {
    solve_transport_diffusion_observed(f0, v, g, nu, t_final, opts, outputs, &mut |_, _| {})
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{heat_multiplier, stream_function, Grid};
    use std::f64::consts::PI;

    #[test]
    fn pure_diffusion_matches_heat_semigroup() {
        let g = Grid::new(32, 2.0 * PI).unwrap();
        let f0 = ScalarField::from_fn(&g, |x, y| (x + 2.0 * y).cos() + 0.3 * (3.0 * x).sin());
        let out = solve_transport_diffusion(&f0, None, None, 0.5, 0.4, &TdOptions::default(), &[0.2, 0.4]).unwrap();
        for (f, t) in out.iter().zip([0.2, 0.4]) {
            let exact = heat_multiplier(&f0, 0.5, t).unwrap();
            assert!(f.max_abs_diff(&exact) <= 1e-10);
        }
    }

    #[test]
    fn manufactured_source() {
        let g = Grid::new(32, 2.0 * PI).unwrap();
        let nu = 0.3;
        let f0 = ScalarField::from_fn(&g, |x, _| x.sin());
        // f = e^{-t} sin x needs g = (ν - 1) e^{-t} sin x.
        let grid = g.clone();
        let src = move |t: f64| ScalarField::from_fn(&grid, |x, _| (nu - 1.0) * (-t).exp() * x.sin());
        let opts = TdOptions { dt: 1e-3, scheme: Scheme::Ifrk3, ..Default::default() };
        let out = solve_transport_diffusion(&f0, None, Some(&src), nu, 1.0, &opts, &[1.0]).unwrap();
        let exact = ScalarField::from_fn(&g, |x, _| (-1.0f64).exp() * x.sin());
        assert!(out[0].max_abs_diff(&exact) <= 1e-8, "{}", out[0].max_abs_diff(&exact));
    }

    #[test]
    fn inviscid_vortex_keeps_l2_norm() {
        // Localized differential rotation: ψ = exp(-r²), angular speed 2 at the center.
        let g = Grid::new(128, 2.0 * PI).unwrap();
        let c = PI;
        let psi = ScalarField::from_fn(&g, |x, y| (-((x - c).powi(2) + (y - c).powi(2))).exp());
        let gp = gradient(&psi);
        let v = VectorField2 {
            x: gp.y.scaled(-1.0),
            y: gp.x.clone(),
        };
        let _ = stream_function;
        let vel = move |_t: f64| v.clone();
        let f0 = ScalarField::from_fn(&g, |x, y| (-4.0 * ((x - c - 0.5).powi(2) + (y - c).powi(2))).exp());
        let period = PI;
        let opts = TdOptions { dt: 2e-3, ..Default::default() };
        let out = solve_transport_diffusion(&f0, Some(&vel), None, 0.0, period, &opts, &[period]).unwrap();
        let l0 = f0.lp_norm(2.0);
        let rel = (out[0].lp_norm(2.0) - l0).abs() / l0;
        assert!(rel <= 1e-6, "{rel}");
    }

    #[test]
    fn rejects_compressible_velocity() {
        let g = Grid::new(16, 2.0 * PI).unwrap();
        let v = VectorField2::from_fn(&g, |x, _| [x.sin(), 0.0]);
        let vel = move |_t: f64| v.clone();
        let f0 = ScalarField::zeros(&g);
        assert!(solve_transport_diffusion(&f0, Some(&vel), None, 1.0, 0.1, &TdOptions::default(), &[]).is_err());
    }

    #[test]
    fn observer_sees_every_step() {
        let g = Grid::new(16, 2.0 * PI).unwrap();
        let f0 = ScalarField::from_fn(&g, |x, _| x.cos());
        let mut times = Vec::new();
        let opts = TdOptions { dt: 0.1, ..Default::default() };
        solve_transport_diffusion_observed(&f0, None, None, 1.0, 0.35, &opts, &[0.35], &mut |t, _| times.push(t)).unwrap();
        assert_eq!(times.len(), 5);
        assert_eq!(*times.last().unwrap(), 0.35);
    }
}
