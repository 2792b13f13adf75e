//! Periodic interpolation of gridded samples at arbitrary points.

use crate::spectral::{ScalarField, GridRef};

/// Cell index and fractional offset of coordinate `x` on a periodic axis.
#[inline]
fn locate(x: f64, h: f64) -> (i64, f64) {
    let s = x / h;
    let r = s.round();
    // Points that sit on a node up to roundoff reproduce the node value.
    if (s - r).abs() <= 1e-12 * r.abs().max(1.0) {
        return (r as i64, 0.0);
    }
    let i = s.floor();
    (i as i64, s - i)
}

#[inline]
fn wrap(i: i64, n: usize) -> usize {
    i.rem_euclid(n as i64) as usize
}

/// Lagrange weights for nodes `-1, 0, 1, 2` at offset `t ∈ [0, 1)`.
#[inline]
pub fn lagrange_weights(t: f64) -> [f64; 4] {
    [
        -t * (t - 1.0) * (t - 2.0) / 6.0,
        (t + 1.0) * (t - 1.0) * (t - 2.0) / 2.0,
        -(t + 1.0) * t * (t - 2.0) / 2.0,
        (t + 1.0) * t * (t - 1.0) / 6.0,
    ]
}

/// Fritsch–Carlson limited cubic Hermite on the middle interval of four
/// equally spaced samples. The result lies between `f[1]` and `f[2]`.
#[inline]
pub fn monotone_cubic_1d(f: [f64; 4], t: f64) -> f64 {
    let delta = f[2] - f[1];
    if delta == 0.0 {
        return f[1];
    }
    let limit = |d: f64| if d * delta <= 0.0 { 0.0 } else { d };
    let mut d1 = limit(0.5 * (f[2] - f[0]));
    let mut d2 = limit(0.5 * (f[3] - f[1]));
    let a = d1 / delta;
    let b = d2 / delta;
    let s = a * a + b * b;
    if s > 9.0 {
        let tau = 3.0 / s.sqrt();
        d1 *= tau;
        d2 *= tau;
    }
    let t2 = t * t;
    let t3 = t2 * t;
    let v = (2.0 * t3 - 3.0 * t2 + 1.0) * f[1]
        + (t3 - 2.0 * t2 + t) * d1
        + (-2.0 * t3 + 3.0 * t2) * f[2]
        + (t3 - t2) * d2;
    // Guard against roundoff stepping past the bracketing samples.
    let (lo, hi) = if f[1] < f[2] { (f[1], f[2]) } else { (f[2], f[1]) };
    v.clamp(lo, hi)
}

fn stencil(values: &[f64], n: usize, ix: i64, iy: i64) -> [[f64; 4]; 4] {
    let mut s = [[0.0; 4]; 4];
    for (b, row) in s.iter_mut().enumerate() {
        let y = wrap(iy + b as i64 - 1, n);
        for (a, v) in row.iter_mut().enumerate() {
            *v = values[y * n + wrap(ix + a as i64 - 1, n)];
        }
    }
    s
}

/// Tensor-product cubic Lagrange interpolation.
pub fn cubic(values: &[f64], n: usize, h: f64, p: [f64; 2]) -> f64 {
    let (ix, tx) = locate(p[0], h);
    let (iy, ty) = locate(p[1], h);
    let wx = lagrange_weights(tx);
    let wy = lagrange_weights(ty);
    let s = stencil(values, n, ix, iy);
    let mut acc = 0.0;
    for b in 0..4 {
        let row = s[b][0] * wx[0] + s[b][1] * wx[1] + s[b][2] * wx[2] + s[b][3] * wx[3];
        acc += wy[b] * row;
    }
    acc
}

/// Tensor-product monotone cubic interpolation; never leaves the range of
/// the surrounding 2×2 samples.
pub fn monotone_cubic(values: &[f64], n: usize, h: f64, p: [f64; 2]) -> f64 {
    let (ix, tx) = locate(p[0], h);
    let (iy, ty) = locate(p[1], h);
    let s = stencil(values, n, ix, iy);
    let rows = [
        monotone_cubic_1d(s[0], tx),
        monotone_cubic_1d(s[1], tx),
        monotone_cubic_1d(s[2], tx),
        monotone_cubic_1d(s[3], tx),
    ];
    monotone_cubic_1d(rows, ty)
}

pub fn cubic_field(f: &ScalarField, p: [f64; 2]) -> f64 {
    let g = f.grid();
    cubic(f.values(), g.n(), g.spacing(), p)
}

/// Bicubic Hermite surface through nodal values and first and mixed
/// derivatives, evaluated with its exact partial derivatives.
#[derive(Debug, Clone)]
pub struct HermiteSurface {
    n: usize,
    h: f64,
    f: Vec<f64>,
    fx: Vec<f64>,
    fy: Vec<f64>,
    fxy: Vec<f64>,
}

#[inline]
fn hermite_basis(t: f64, h: f64) -> ([f64; 4], [f64; 4]) {
    let t2 = t * t;
    let t3 = t2 * t;
    // value basis: v0, v1, slope basis: s0, s1 (slopes scaled by h)
    let b = [
        2.0 * t3 - 3.0 * t2 + 1.0,
        -2.0 * t3 + 3.0 * t2,
        h * (t3 - 2.0 * t2 + t),
        h * (t3 - t2),
    ];
    let d = [
        (6.0 * t2 - 6.0 * t) / h,
        (-6.0 * t2 + 6.0 * t) / h,
        3.0 * t2 - 4.0 * t + 1.0,
        3.0 * t2 - 2.0 * t,
    ];
    (b, d)
}

impl HermiteSurface {
    pub fn new(grid: &GridRef, f: Vec<f64>, fx: Vec<f64>, fy: Vec<f64>, fxy: Vec<f64>) -> Self {
        Self {
            n: grid.n(),
            h: grid.spacing(),
            f,
            fx,
            fy,
            fxy,
        }
    }

    /// `(f, ∂₁f, ∂₂f)` at `p`.
    pub fn eval(&self, p: [f64; 2]) -> [f64; 3] {
        let n = self.n;
        let (ix, tx) = locate(p[0], self.h);
        let (iy, ty) = locate(p[1], self.h);
        let (bx, dx) = hermite_basis(tx, self.h);
        let (by, dy) = hermite_basis(ty, self.h);
        let mut out = [0.0; 3];
        for cy in 0..2 {
            let y = wrap(iy + cy as i64, n);
            for cx in 0..2 {
                let idx = y * n + wrap(ix + cx as i64, n);
                let (f, fx, fy, fxy) = (self.f[idx], self.fx[idx], self.fy[idx], self.fxy[idx]);
                let (vx, sx, dvx, dsx) = (bx[cx], bx[cx + 2], dx[cx], dx[cx + 2]);
                let (vy, sy, dvy, dsy) = (by[cy], by[cy + 2], dy[cy], dy[cy + 2]);
                out[0] += vx * vy * f + sx * vy * fx + vx * sy * fy + sx * sy * fxy;
                out[1] += dvx * vy * f + dsx * vy * fx + dvx * sy * fy + dsx * sy * fxy;
                out[2] += vx * dvy * f + sx * dvy * fx + vx * dsy * fy + sx * dsy * fxy;
            }
        }
        out
    }
}
