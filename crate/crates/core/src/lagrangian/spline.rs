//! Closed-curve utilities: periodic cubic splines and spectral derivatives
//! in the curve parameter.

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{argument, Result};

/// Solves a cyclic tridiagonal system with constant structure
/// `a[i] x[i-1] + b[i] x[i] + c[i] x[i+1] = d[i]` (indices mod n).
fn solve_cyclic(a: &[f64], b: &[f64], c: &[f64], d: &[f64]) -> Vec<f64> {
    let n = d.len();
    // Sherman–Morrison on top of the Thomas algorithm.
    let gamma = -b[0];
    let mut bb = b.to_vec();
    bb[0] -= gamma;
    bb[n - 1] -= c[n - 1] * a[0] / gamma;
    let thomas = |rhs: &[f64]| {
        let mut cp = vec![0.0; n];
        let mut dp = vec![0.0; n];
        cp[0] = c[0] / bb[0];
        dp[0] = rhs[0] / bb[0];
        for i in 1..n {
            let m = bb[i] - a[i] * cp[i - 1];
            cp[i] = c[i] / m;
            dp[i] = (rhs[i] - a[i] * dp[i - 1]) / m;
        }
        let mut x = vec![0.0; n];
        x[n - 1] = dp[n - 1];
        for i in (0..n - 1).rev() {
            x[i] = dp[i] - cp[i] * x[i + 1];
        }
        x
    };
    let x = thomas(d);
    let mut u = vec![0.0; n];
    u[0] = gamma;
    u[n - 1] = c[n - 1];
    let z = thomas(&u);
    let factor = (x[0] + a[0] * x[n - 1] / gamma) / (1.0 + z[0] + a[0] * z[n - 1] / gamma);
    x.iter().zip(&z).map(|(xi, zi)| xi - factor * zi).collect()
}

/// Interpolating periodic cubic spline through closed-curve points.
#[derive(Debug, Clone)]
pub struct PeriodicSpline {
    knots: Vec<f64>,
    period: f64,
    points: Vec<[f64; 2]>,
    second: Vec<[f64; 2]>,
}

impl PeriodicSpline {
    /// Knots are the cumulative chord lengths.
    pub fn through(points: &[[f64; 2]]) -> Result<Self> {
        let n = points.len();
        if n < 4 {
            return argument("spline needs at least 4 points");
        }
        let mut knots = Vec::with_capacity(n);
        let mut acc = 0.0;
        for i in 0..n {
            knots.push(acc);
            let q = points[(i + 1) % n];
            acc += (q[0] - points[i][0]).hypot(q[1] - points[i][1]);
        }
        let period = acc;
        let hs: Vec<f64> = (0..n)
            .map(|i| if i + 1 < n { knots[i + 1] - knots[i] } else { period - knots[i] })
            .collect();
        if hs.iter().any(|&h| !(h > 0.0)) {
            return argument("coincident spline points");
        }
        let mut second = vec![[0.0; 2]; n];
        for c in 0..2 {
            let mut a = vec![0.0; n];
            let mut b = vec![0.0; n];
            let mut cc = vec![0.0; n];
            let mut d = vec![0.0; n];
            for i in 0..n {
                let hp = hs[(i + n - 1) % n];
                let hi = hs[i];
                a[i] = hp;
                b[i] = 2.0 * (hp + hi);
                cc[i] = hi;
                let y0 = points[(i + n - 1) % n][c];
                let y1 = points[i][c];
                let y2 = points[(i + 1) % n][c];
                d[i] = 6.0 * ((y2 - y1) / hi - (y1 - y0) / hp);
            }
            for (s, m) in second.iter_mut().zip(solve_cyclic(&a, &b, &cc, &d)) {
                s[c] = m;
            }
        }
        Ok(Self {
            knots,
            period,
            points: points.to_vec(),
            second,
        })
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    fn segment(&self, s: f64) -> (usize, f64, f64) {
        let s = s.rem_euclid(self.period);
        let i = match self.knots.binary_search_by(|k| k.partial_cmp(&s).unwrap()) {
            Ok(i) => i,
            Err(i) => i - 1,
        };
        let end = if i + 1 < self.knots.len() { self.knots[i + 1] } else { self.period };
        (i, s - self.knots[i], end - self.knots[i])
    }

    pub fn eval(&self, s: f64) -> [f64; 2] {
        let (i, t, h) = self.segment(s);
        let j = (i + 1) % self.points.len();
        let a = (h - t) / h;
        let b = t / h;
        let mut out = [0.0; 2];
        for c in 0..2 {
            out[c] = a * self.points[i][c]
                + b * self.points[j][c]
                + ((a * a * a - a) * self.second[i][c] + (b * b * b - b) * self.second[j][c]) * h * h / 6.0;
        }
        out
    }

    /// Points at equal arc length, starting from knot 0. Arc length is
    /// measured on a fine polyline of the spline.
    pub fn resample_equal_arc(&self, count: usize) -> Vec<[f64; 2]> {
        const SUB: usize = 32;
        let n = self.points.len();
        let mut params = Vec::with_capacity(n * SUB + 1);
        let mut arcs = Vec::with_capacity(n * SUB + 1);
        let mut prev = self.eval(0.0);
        let mut acc = 0.0;
        params.push(0.0);
        arcs.push(0.0);
        for k in 1..=n * SUB {
            let s = self.period * k as f64 / (n * SUB) as f64;
            let p = self.eval(s);
            acc += (p[0] - prev[0]).hypot(p[1] - prev[1]);
            params.push(s);
            arcs.push(acc);
            prev = p;
        }
        let total = acc;
        let mut out = Vec::with_capacity(count);
        let mut seg = 0;
        for i in 0..count {
            let target = total * i as f64 / count as f64;
            while arcs[seg + 1] < target {
                seg += 1;
            }
            let w = (target - arcs[seg]) / (arcs[seg + 1] - arcs[seg]);
            out.push(self.eval(params[seg] + w * (params[seg + 1] - params[seg])));
        }
        out
    }
}

/// Derivative of uniformly sampled periodic data on `[0, 2π)`.
pub fn spectral_derivative(values: &[f64]) -> Vec<f64> {
    let n = values.len();
    let mut planner = FftPlanner::new();
    let mut buf: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    planner.plan_fft_forward(n).process(&mut buf);
    for (i, c) in buf.iter_mut().enumerate() {
        let m = if i < n / 2 {
            i as f64
        } else if i == n / 2 && n % 2 == 0 {
            0.0
        } else {
            i as f64 - n as f64
        };
        *c *= Complex64::new(0.0, m / n as f64);
    }
    planner.plan_fft_inverse(n).process(&mut buf);
    buf.into_iter().map(|c| c.re).collect()
}

/// Tangent `∂_σγ` of a closed curve sampled uniformly in `σ ∈ [0, 2π)`.
pub fn curve_tangents(points: &[[f64; 2]]) -> Vec<[f64; 2]> {
    let xs: Vec<f64> = points.iter().map(|p| p[0]).collect();
    let ys: Vec<f64> = points.iter().map(|p| p[1]).collect();
    spectral_derivative(&xs)
        .into_iter()
        .zip(spectral_derivative(&ys))
        .map(|(a, b)| [a, b])
        .collect()
}
