use rayon::prelude::*;

use super::flow::{mat_mul, mat_vec, det, FlowSampler, Mat2, IDENTITY};
use super::spline::{curve_tangents, PeriodicSpline};
use crate::error::{Error, Result};
use crate::interp::cubic_field;
use crate::spectral::VectorField2;

/// Adjacent-spacing ratio above which markers are redistributed.
pub const SPACING_RATIO_LIMIT: f64 = 3.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MarkerScheme {
    Rk2,
    Rk3,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RedistributionEvent {
    pub t: f64,
    pub ratio_before: f64,
    pub markers: usize,
}

/// Boundary markers of a patch with their flow-map Jacobians.
///
/// `jacobians[i]` is `Dψ` from the reference time (seeding or the last
/// redistribution) to now, evaluated along the trajectory of marker `i`.
/// `tangent_ref` and `x_ref` hold `∂_σγ` and `X` at the reference time.
#[derive(Debug, Clone)]
pub struct PatchState {
    pub t: f64,
    pub markers: Vec<[f64; 2]>,
    pub jacobians: Vec<Mat2>,
    pub tangent_ref: Vec<[f64; 2]>,
    pub x_ref: Vec<[f64; 2]>,
    pub events: Vec<RedistributionEvent>,
    safe: [f64; 2],
}

impl PatchState {
    /// `box_length` sets the safe region `[L/16, 15L/16]²`.
    pub fn new(markers: Vec<[f64; 2]>, tangents: Vec<[f64; 2]>, x_ref: Vec<[f64; 2]>, box_length: f64) -> Result<Self> {
        let n = markers.len();
        if tangents.len() != n || x_ref.len() != n {
            return Err(Error::Argument("marker, tangent and X lists differ in length".into()));
        }
        if n < 4 {
            return Err(Error::Argument("a patch needs at least 4 markers".into()));
        }
        let m = box_length / 16.0;
        Ok(Self {
            t: 0.0,
            jacobians: vec![IDENTITY; n],
            markers,
            tangent_ref: tangents,
            x_ref,
            events: Vec::new(),
            safe: [m, box_length - m],
        })
    }

    pub fn len(&self) -> usize {
        self.markers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.markers.is_empty()
    }

    /// Current `∂_σγ = Dψ·∂_σγ_ref`.
    pub fn tangents(&self) -> Vec<[f64; 2]> {
        self.jacobians
            .iter()
            .zip(&self.tangent_ref)
            .map(|(j, t)| mat_vec(j, *t))
            .collect()
    }

    /// Lagrangian representation `Dψ·X_ref` at each marker.
    pub fn x_from_jacobian(&self) -> Vec<[f64; 2]> {
        self.jacobians
            .iter()
            .zip(&self.x_ref)
            .map(|(j, x)| mat_vec(j, *x))
            .collect()
    }

    /// Signed shoelace area (positive for counter-clockwise order).
    pub fn area(&self) -> f64 {
        polygon_area(&self.markers)
    }

    pub fn max_det_deviation(&self) -> f64 {
        self.jacobians.iter().fold(0.0, |m, j| m.max((det(j) - 1.0).abs()))
    }

    pub fn spacing_ratio(&self) -> f64 {
        let n = self.markers.len();
        let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
        for i in 0..n {
            let a = self.markers[i];
            let b = self.markers[(i + 1) % n];
            let d = (b[0] - a[0]).hypot(b[1] - a[1]);
            lo = lo.min(d);
            hi = hi.max(d);
        }
        hi / lo
    }

    fn check_safe(&self) -> Result<()> {
        for (i, p) in self.markers.iter().enumerate() {
            if p.iter().any(|&c| !(c >= self.safe[0] && c <= self.safe[1])) {
                return Err(Error::DomainTruncation { index: i, x: p[0], y: p[1] });
            }
        }
        Ok(())
    }

    /// Resamples at equal arc length. Jacobians restart from the identity;
    /// the reference `X` comes from `x_now` when given, otherwise from the
    /// Lagrangian values carried by the old markers.
    pub fn redistribute(&mut self, x_now: Option<&VectorField2>) -> Result<()> {
        let ratio = self.spacing_ratio();
        let count = self.markers.len();
        let spline = PeriodicSpline::through(&self.markers)?;
        let fresh = spline.resample_equal_arc(count);
        let x_ref = match x_now {
            Some(x) => fresh.iter().map(|&p| [cubic_field(&x.x, p), cubic_field(&x.y, p)]).collect(),
            None => {
                let carried = self.x_from_jacobian();
                fresh
                    .iter()
                    .map(|&p| {
                        let (i, w) = nearest_segment(&self.markers, p);
                        let a = carried[i];
                        let b = carried[(i + 1) % count];
                        [a[0] + w * (b[0] - a[0]), a[1] + w * (b[1] - a[1])]
                    })
                    .collect()
            }
        };
        self.tangent_ref = curve_tangents(&fresh);
        self.markers = fresh;
        self.jacobians = vec![IDENTITY; count];
        self.x_ref = x_ref;
        log::info!("redistributed {count} markers at t={} (spacing ratio {ratio:.3})", self.t);
        self.events.push(RedistributionEvent {
            t: self.t,
            ratio_before: ratio,
            markers: count,
        });
        Ok(())
    }
}

pub fn polygon_area(p: &[[f64; 2]]) -> f64 {
    let n = p.len();
    let mut s = 0.0;
    for i in 0..n {
        let a = p[i];
        let b = p[(i + 1) % n];
        s += a[0] * b[1] - a[1] * b[0];
    }
    0.5 * s
}

fn nearest_segment(poly: &[[f64; 2]], p: [f64; 2]) -> (usize, f64) {
    let n = poly.len();
    let mut best = (0, 0.0, f64::INFINITY);
    for i in 0..n {
        let (w, d) = segment_distance(poly[i], poly[(i + 1) % n], p);
        if d < best.2 {
            best = (i, w, d);
        }
    }
    (best.0, best.1)
}

/// Parameter of the closest point on segment `ab` and the distance to it.
pub fn segment_distance(a: [f64; 2], b: [f64; 2], p: [f64; 2]) -> (f64, f64) {
    let e = [b[0] - a[0], b[1] - a[1]];
    let l2 = e[0] * e[0] + e[1] * e[1];
    let w = if l2 > 0.0 {
        (((p[0] - a[0]) * e[0] + (p[1] - a[1]) * e[1]) / l2).clamp(0.0, 1.0)
    } else {
        0.0
    };
    let q = [a[0] + w * e[0], a[1] + w * e[1]];
    (w, (p[0] - q[0]).hypot(p[1] - q[1]))
}

type Stage = ([f64; 2], Mat2);

fn rhs(flow: &dyn FlowSampler, x: [f64; 2], j: &Mat2, t: f64) -> Stage {
    (flow.velocity(x, t), mat_mul(&flow.gradient(x, t), j))
}

fn axpy(x: [f64; 2], j: &Mat2, a: f64, k: &Stage) -> ([f64; 2], Mat2) {
    (
        [x[0] + a * k.0[0], x[1] + a * k.0[1]],
        [
            [j[0][0] + a * k.1[0][0], j[0][1] + a * k.1[0][1]],
            [j[1][0] + a * k.1[1][0], j[1][1] + a * k.1[1][1]],
        ],
    )
}

fn combine(x: [f64; 2], j: &Mat2, terms: &[(f64, &Stage)]) -> ([f64; 2], Mat2) {
    let mut out = (x, *j);
    for (a, k) in terms {
        out = axpy(out.0, &out.1, *a, k);
    }
    out
}

fn step_one(flow: &dyn FlowSampler, x: [f64; 2], j: &Mat2, t: f64, dt: f64, scheme: MarkerScheme) -> ([f64; 2], Mat2) {
    match scheme {
        MarkerScheme::Rk2 => {
            let k1 = rhs(flow, x, j, t);
            let (x1, j1) = axpy(x, j, dt, &k1);
            let k2 = rhs(flow, x1, &j1, t + dt);
            combine(x, j, &[(0.5 * dt, &k1), (0.5 * dt, &k2)])
        }
        MarkerScheme::Rk3 => {
            let k1 = rhs(flow, x, j, t);
            let (xa, ja) = axpy(x, j, 0.5 * dt, &k1);
            let k2 = rhs(flow, xa, &ja, t + 0.5 * dt);
            let (xb, jb) = combine(x, j, &[(-dt, &k1), (2.0 * dt, &k2)]);
            let k3 = rhs(flow, xb, &jb, t + dt);
            combine(x, j, &[(dt / 6.0, &k1), (4.0 * dt / 6.0, &k2), (dt / 6.0, &k3)])
        }
    }
}

/// Moves markers and their Jacobians from `patch.t` to `patch.t + dt`, then
/// redistributes when the spacing ratio exceeds [`SPACING_RATIO_LIMIT`].
/// Returns whether a redistribution happened.
pub fn advect_markers(
    patch: &mut PatchState,
    flow: &dyn FlowSampler,
    dt: f64,
    scheme: MarkerScheme,
    x_now: Option<&VectorField2>,
) -> Result<bool> {
    let t = patch.t;
    let next: Vec<([f64; 2], Mat2)> = patch
        .markers
        .par_iter()
        .zip(patch.jacobians.par_iter())
        .map(|(x, j)| step_one(flow, *x, j, t, dt, scheme))
        .collect();
    for (i, (x, j)) in next.into_iter().enumerate() {
        patch.markers[i] = x;
        patch.jacobians[i] = j;
    }
    patch.t = t + dt;
    if patch.markers.iter().flatten().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("marker positions".into()));
    }
    patch.check_safe()?;
    if patch.spacing_ratio() > SPACING_RATIO_LIMIT {
        patch.redistribute(x_now)?;
        return Ok(true);
    }
    Ok(false)
}

/// Seeds markers on the closed orbit of `∂_σγ = X₀(γ)` through `start`.
///
/// The orbit is traced with RK4 at step `ds` until it returns, then
/// reparametrised to period `2π` and sampled at `count` equally spaced
/// parameters. Returns the markers and `∂_σγ` at each.
pub fn seed_markers(
    x0: &(dyn Fn([f64; 2]) -> [f64; 2] + Sync),
    start: [f64; 2],
    count: usize,
    ds: f64,
    max_steps: usize,
) -> Result<(Vec<[f64; 2]>, Vec<[f64; 2]>)> {
    let tau0 = x0(start);
    if tau0[0].hypot(tau0[1]) < 1e-12 {
        return Err(Error::Degenerate("seed vector field vanishes at the start point".into()));
    }
    let along = |p: [f64; 2]| (p[0] - start[0]) * tau0[0] + (p[1] - start[1]) * tau0[1];
    let rk4 = |p: [f64; 2]| {
        let k1 = x0(p);
        let k2 = x0([p[0] + 0.5 * ds * k1[0], p[1] + 0.5 * ds * k1[1]]);
        let k3 = x0([p[0] + 0.5 * ds * k2[0], p[1] + 0.5 * ds * k2[1]]);
        let k4 = x0([p[0] + ds * k3[0], p[1] + ds * k3[1]]);
        [
            p[0] + ds / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
            p[1] + ds / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]),
        ]
    };
    let mut orbit = vec![start];
    let mut far = false;
    let speed = tau0[0].hypot(tau0[1]);
    let period;
    loop {
        if orbit.len() > max_steps {
            return Err(Error::Degenerate("seed orbit did not close".into()));
        }
        let p = *orbit.last().unwrap();
        let q = rk4(p);
        let dist = (q[0] - start[0]).hypot(q[1] - start[1]);
        if dist > 20.0 * ds * speed {
            far = true;
        }
        if far && along(p) < 0.0 && along(q) >= 0.0 && dist < 20.0 * ds * speed {
            let w = -along(p) / (along(q) - along(p));
            period = ds * ((orbit.len() - 1) as f64 + w);
            orbit.push(q);
            break;
        }
        orbit.push(q);
    }
    // Cubic Hermite between dense orbit points.
    let sample = |sigma: f64| {
        let s = sigma / ds;
        let k = (s.floor() as usize).min(orbit.len() - 2);
        let t = s - k as f64;
        let (p0, p1) = (orbit[k], orbit[k + 1]);
        let (m0, m1) = (x0(p0), x0(p1));
        let t2 = t * t;
        let t3 = t2 * t;
        let mut out = [0.0; 2];
        for c in 0..2 {
            out[c] = (2.0 * t3 - 3.0 * t2 + 1.0) * p0[c]
                + (t3 - 2.0 * t2 + t) * ds * m0[c]
                + (-2.0 * t3 + 3.0 * t2) * p1[c]
                + (t3 - t2) * ds * m1[c];
        }
        out
    };
    let scale = period / (2.0 * std::f64::consts::PI);
    let markers: Vec<[f64; 2]> = (0..count).map(|i| sample(period * i as f64 / count as f64)).collect();
    let tangents = markers
        .iter()
        .map(|&p| {
            let v = x0(p);
            [scale * v[0], scale * v[1]]
        })
        .collect();
    Ok((markers, tangents))
}
