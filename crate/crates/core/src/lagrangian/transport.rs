//! Semi-Lagrangian transport of gridded fields.

use rayon::prelude::*;

use super::flow::{mat_mul, FlowSampler, Mat2, IDENTITY};
use crate::error::{Error, Result};
use crate::interp::{cubic, monotone_cubic};
use crate::spectral::{GridRef, ScalarField, VectorField2};

/// Departure points of the grid nodes over one step, by the backward
/// midpoint rule with a velocity frozen at the half step.
pub fn departure_points(grid: &GridRef, u_half: &VectorField2, dt: f64) -> Vec<[f64; 2]> {
    let (n, h) = (grid.n(), grid.spacing());
    let (ux, uy) = (u_half.x.values(), u_half.y.values());
    (0..grid.len())
        .into_par_iter()
        .map(|idx| {
            let (x, y) = grid.point(idx);
            let mid = [x - 0.5 * dt * ux[idx], y - 0.5 * dt * uy[idx]];
            [x - dt * cubic(ux, n, h, mid), y - dt * cubic(uy, n, h, mid)]
        })
        .collect()
}

/// Same rule with velocities taken from a sampler at `t + dt/2`.
pub fn departure_points_flow(grid: &GridRef, flow: &dyn FlowSampler, t: f64, dt: f64) -> Vec<[f64; 2]> {
    let th = t + 0.5 * dt;
    (0..grid.len())
        .into_par_iter()
        .map(|idx| {
            let (x, y) = grid.point(idx);
            let v = flow.velocity([x, y], th);
            let mid = [x - 0.5 * dt * v[0], y - 0.5 * dt * v[1]];
            let w = flow.velocity(mid, th);
            [x - dt * w[0], y - dt * w[1]]
        })
        .collect()
}

/// Monotone cubic resampling at departure points; the result stays within
/// the range of `f`.
pub fn advect_monotone(f: &ScalarField, departures: &[[f64; 2]]) -> ScalarField {
    let g = f.grid();
    let (n, h) = (g.n(), g.spacing());
    let v = f.values();
    let out = departures.par_iter().map(|&p| monotone_cubic(v, n, h, p)).collect();
    ScalarField::from_values_trusted(g, out)
}

/// Cubic Lagrange resampling at departure points.
pub fn advect_cubic(f: &ScalarField, departures: &[[f64; 2]]) -> ScalarField {
    let g = f.grid();
    let (n, h) = (g.n(), g.spacing());
    let v = f.values();
    let out = departures.par_iter().map(|&p| cubic(v, n, h, p)).collect();
    ScalarField::from_values_trusted(g, out)
}

fn inverse(m: &Mat2) -> Mat2 {
    let d = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    [[m[1][1] / d, -m[0][1] / d], [-m[1][0] / d, m[0][0] / d]]
}

/// Advances `X` by `∂_t X + u·∇X = ∂_X u` over `[t, t+dt]`.
///
/// Each grid node is traced back with RK4 together with the backward
/// Jacobian `K = ∂y/∂x`; then `X(t+dt, x) = K⁻¹ X(t, y)` with `X(t, ·)`
/// interpolated by cubic Lagrange at the foot `y`.
pub fn evolve_x_eulerian(x: &VectorField2, flow: &dyn FlowSampler, t: f64, dt: f64) -> Result<VectorField2> {
    let g = x.grid();
    let (n, h) = (g.n(), g.spacing());
    let t1 = t + dt;
    let back = |p: [f64; 2], k: &Mat2, s: f64| -> ([f64; 2], Mat2) {
        let v = flow.velocity(p, t1 - s);
        let gr = flow.gradient(p, t1 - s);
        let gk = mat_mul(&gr, k);
        (
            [-v[0], -v[1]],
            [[-gk[0][0], -gk[0][1]], [-gk[1][0], -gk[1][1]]],
        )
    };
    let add = |p: [f64; 2], k: &Mat2, a: f64, d: &([f64; 2], Mat2)| -> ([f64; 2], Mat2) {
        (
            [p[0] + a * d.0[0], p[1] + a * d.0[1]],
            [
                [k[0][0] + a * d.1[0][0], k[0][1] + a * d.1[0][1]],
                [k[1][0] + a * d.1[1][0], k[1][1] + a * d.1[1][1]],
            ],
        )
    };
    let (xv, yv) = (x.x.values(), x.y.values());
    let out: Vec<[f64; 2]> = (0..g.len())
        .into_par_iter()
        .map(|idx| {
            let (px, py) = g.point(idx);
            let p = [px, py];
            let k = IDENTITY;
            let d1 = back(p, &k, 0.0);
            let (p2, k2) = add(p, &k, 0.5 * dt, &d1);
            let d2 = back(p2, &k2, 0.5 * dt);
            let (p3, k3) = add(p, &k, 0.5 * dt, &d2);
            let d3 = back(p3, &k3, 0.5 * dt);
            let (p4, k4) = add(p, &k, dt, &d3);
            let d4 = back(p4, &k4, dt);
            let mut foot = p;
            let mut kk = k;
            for (w, d) in [(1.0, &d1), (2.0, &d2), (2.0, &d3), (1.0, &d4)] {
                let r = add(foot, &kk, w * dt / 6.0, d);
                foot = r.0;
                kk = r.1;
            }
            let xf = [cubic(xv, n, h, foot), cubic(yv, n, h, foot)];
            let m = inverse(&kk);
            [m[0][0] * xf[0] + m[0][1] * xf[1], m[1][0] * xf[0] + m[1][1] * xf[1]]
        })
        .collect();
    if out.iter().flatten().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("transported vector field".into()));
    }
    let (a, b): (Vec<f64>, Vec<f64>) = out.into_iter().map(|v| (v[0], v[1])).unzip();
    Ok(VectorField2 {
        x: ScalarField::from_values_trusted(g, a),
        y: ScalarField::from_values_trusted(g, b),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lagrangian::flow::{rigid_rotation, still};
    use crate::spectral::Grid;
    use std::f64::consts::PI;

    #[test]
    fn still_flow_is_identity() {
        let g = Grid::new(32, 2.0 * PI).unwrap();
        let x = VectorField2::from_fn(&g, |x, y| [x.sin(), y.cos()]);
        let y = evolve_x_eulerian(&x, &still(), 0.0, 0.1).unwrap();
        assert_eq!(y.max_abs_diff(&x), 0.0);
        let f = ScalarField::from_fn(&g, |x, _| x.cos());
        let d = departure_points(&g, &VectorField2::zeros(&g), 0.3);
        assert_eq!(advect_monotone(&f, &d).max_abs_diff(&f), 0.0);
    }

    #[test]
    fn constant_field_rotates_with_flow() {
        let g = Grid::new(16, 2.0 * PI).unwrap();
        let flow = rigid_rotation([PI, PI]);
        let mut x = VectorField2::constant(&g, [1.0, 0.0]);
        let dt = 0.01;
        for k in 0..100 {
            x = evolve_x_eulerian(&x, &flow, k as f64 * dt, dt).unwrap();
        }
        let exact = VectorField2::constant(&g, [1f64.cos(), 1f64.sin()]);
        assert!(x.max_abs_diff(&exact) <= 1e-8);
    }

    #[test]
    fn monotone_advection_keeps_bounds() {
        let g = Grid::new(64, 2.0 * PI).unwrap();
        let f = ScalarField::from_fn(&g, |x, y| if (x - PI).hypot(y - PI) < 1.0 { 1.0 } else { 0.0 });
        let u = VectorField2::from_fn(&g, |x, y| [y.sin(), x.cos()]);
        let mut th = f.clone();
        for _ in 0..20 {
            th = advect_monotone(&th, &departure_points(&g, &u, 0.05));
        }
        assert!(th.min() >= 0.0 && th.max() <= 1.0);
        assert!(th.max() >= 1.0 - 1e-12);
    }
}
