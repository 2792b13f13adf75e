use std::sync::Arc;

use crate::interp::{cubic, HermiteSurface};
use crate::spectral::{curl, partial, stream_function, Axis, GridRef, ScalarField, VectorField2};

/// `g[i][j] = ∂_j u^i`.
pub type Mat2 = [[f64; 2]; 2];

/// Velocity and velocity gradient available at arbitrary points and times.
pub trait FlowSampler: Sync {
    fn velocity(&self, p: [f64; 2], t: f64) -> [f64; 2];
    fn gradient(&self, p: [f64; 2], t: f64) -> Mat2;
}

/// Steady gridded velocity.
///
/// The velocity is the exact perpendicular gradient of a bicubic Hermite
/// interpolant of the stream function, so the sampled field is itself
/// divergence free. The gradient uses cubic Lagrange interpolation of the
/// spectrally computed `∇u` with `∂₂u² = -∂₁u¹` imposed.
#[derive(Debug, Clone)]
pub struct GriddedFlow {
    grid: GridRef,
    mean: [f64; 2],
    psi: HermiteSurface,
    d11: Vec<f64>,
    d12: Vec<f64>,
    d21: Vec<f64>,
}

impl GriddedFlow {
    /// From a vorticity field; its mean is ignored.
    pub fn from_vorticity(omega: &ScalarField) -> Self {
        Self::build(omega.grid(), [0.0, 0.0], &stream_function(omega))
    }

    /// From a velocity field, keeping its mean as a uniform drift.
    pub fn from_velocity(u: &VectorField2) -> Self {
        let psi = stream_function(&curl(u));
        Self::build(u.grid(), [u.x.mean(), u.y.mean()], &psi)
    }

    fn build(grid: &GridRef, mean: [f64; 2], psi: &ScalarField) -> Self {
        let px = partial(psi, Axis::X);
        let py = partial(psi, Axis::Y);
        let pxy = partial(&px, Axis::Y);
        let pxx = partial(&px, Axis::X);
        let pyy = partial(&py, Axis::Y);
        // u = (−ψ_y, ψ_x)
        let d11 = pxy.values().iter().map(|v| -v).collect();
        let d12 = pyy.values().iter().map(|v| -v).collect();
        let d21 = pxx.into_values();
        let surface = HermiteSurface::new(
            grid,
            psi.values().to_vec(),
            px.into_values(),
            py.into_values(),
            pxy.into_values(),
        );
        Self {
            grid: grid.clone(),
            mean,
            psi: surface,
            d11,
            d12,
            d21,
        }
    }

    pub fn grid(&self) -> &GridRef {
        &self.grid
    }

    pub fn sample_velocity(&self, p: [f64; 2]) -> [f64; 2] {
        let v = self.psi.eval(p);
        [self.mean[0] - v[2], self.mean[1] + v[1]]
    }

    pub fn sample_gradient(&self, p: [f64; 2]) -> Mat2 {
        let (n, h) = (self.grid.n(), self.grid.spacing());
        let a = cubic(&self.d11, n, h, p);
        [
            [a, cubic(&self.d12, n, h, p)],
            [cubic(&self.d21, n, h, p), -a],
        ]
    }
}

impl FlowSampler for GriddedFlow {
    fn velocity(&self, p: [f64; 2], _t: f64) -> [f64; 2] {
        self.sample_velocity(p)
    }

    fn gradient(&self, p: [f64; 2], _t: f64) -> Mat2 {
        self.sample_gradient(p)
    }
}

/// Linear interpolation in time between two gridded flows; extrapolates
/// outside `[t0, t1]`.
#[derive(Debug, Clone)]
pub struct TimeLinearFlow {
    pub t0: f64,
    pub t1: f64,
    pub a: Arc<GriddedFlow>,
    pub b: Arc<GriddedFlow>,
}

impl TimeLinearFlow {
    fn lambda(&self, t: f64) -> f64 {
        if self.t1 == self.t0 {
            0.0
        } else {
            (t - self.t0) / (self.t1 - self.t0)
        }
    }
}

impl FlowSampler for TimeLinearFlow {
    fn velocity(&self, p: [f64; 2], t: f64) -> [f64; 2] {
        let l = self.lambda(t);
        if l == 0.0 {
            return self.a.sample_velocity(p);
        }
        if l == 1.0 {
            return self.b.sample_velocity(p);
        }
        let va = self.a.sample_velocity(p);
        let vb = self.b.sample_velocity(p);
        [va[0] + l * (vb[0] - va[0]), va[1] + l * (vb[1] - va[1])]
    }

    fn gradient(&self, p: [f64; 2], t: f64) -> Mat2 {
        let l = self.lambda(t);
        if l == 0.0 {
            return self.a.sample_gradient(p);
        }
        if l == 1.0 {
            return self.b.sample_gradient(p);
        }
        let ga = self.a.sample_gradient(p);
        let gb = self.b.sample_gradient(p);
        let m = |i: usize, j: usize| ga[i][j] + l * (gb[i][j] - ga[i][j]);
        let d = m(0, 0);
        [[d, m(0, 1)], [m(1, 0), -d]]
    }
}

/// Closed-form velocity and gradient.
pub struct AnalyticFlow<V, G> {
    pub velocity: V,
    pub gradient: G,
}

impl<V, G> FlowSampler for AnalyticFlow<V, G>
where
    V: Fn([f64; 2], f64) -> [f64; 2] + Sync,
    G: Fn([f64; 2], f64) -> Mat2 + Sync,
{
    fn velocity(&self, p: [f64; 2], t: f64) -> [f64; 2] {
        (self.velocity)(p, t)
    }

    fn gradient(&self, p: [f64; 2], t: f64) -> Mat2 {
        (self.gradient)(p, t)
    }
}

/// Rigid rotation with unit angular speed about `center`.
pub fn rigid_rotation(center: [f64; 2]) -> impl FlowSampler {
    AnalyticFlow {
        velocity: move |p: [f64; 2], _t: f64| [-(p[1] - center[1]), p[0] - center[0]],
        gradient: |_p: [f64; 2], _t: f64| [[0.0, -1.0], [1.0, 0.0]],
    }
}

/// Zero velocity.
pub fn still() -> impl FlowSampler {
    AnalyticFlow {
        velocity: |_p: [f64; 2], _t: f64| [0.0, 0.0],
        gradient: |_p: [f64; 2], _t: f64| [[0.0; 2]; 2],
    }
}

pub fn mat_vec(m: &Mat2, v: [f64; 2]) -> [f64; 2] {
    [m[0][0] * v[0] + m[0][1] * v[1], m[1][0] * v[0] + m[1][1] * v[1]]
}

pub fn mat_mul(a: &Mat2, b: &Mat2) -> Mat2 {
    [
        [
            a[0][0] * b[0][0] + a[0][1] * b[1][0],
            a[0][0] * b[0][1] + a[0][1] * b[1][1],
        ],
        [
            a[1][0] * b[0][0] + a[1][1] * b[1][0],
            a[1][0] * b[0][1] + a[1][1] * b[1][1],
        ],
    ]
}

pub fn det(m: &Mat2) -> f64 {
    m[0][0] * m[1][1] - m[0][1] * m[1][0]
}

pub const IDENTITY: Mat2 = [[1.0, 0.0], [0.0, 1.0]];

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{biot_savart, Grid};
    use std::f64::consts::PI;

    #[test]
    fn gridded_flow_matches_biot_savart() {
        let g = Grid::new(64, 2.0 * PI).unwrap();
        let w = ScalarField::from_fn(&g, |x, y| x.sin() * y.sin());
        let flow = GriddedFlow::from_vorticity(&w);
        let p = [1.1, 2.7];
        let v = flow.sample_velocity(p);
        assert!((v[0] - 0.5 * p[0].sin() * p[1].cos()).abs() < 1e-5);
        assert!((v[1] + 0.5 * p[0].cos() * p[1].sin()).abs() < 1e-5);
        let gr = flow.sample_gradient(p);
        assert!((gr[0][0] - 0.5 * p[0].cos() * p[1].cos()).abs() < 1e-5);
        assert_eq!(gr[0][0] + gr[1][1], 0.0);
        let from_u = GriddedFlow::from_velocity(&biot_savart(&w));
        let v2 = from_u.sample_velocity(p);
        assert!((v[0] - v2[0]).abs() < 1e-12 && (v[1] - v2[1]).abs() < 1e-12);
    }

    #[test]
    fn time_interpolation_is_linear() {
        let g = Grid::new(32, 2.0 * PI).unwrap();
        let a = Arc::new(GriddedFlow::from_vorticity(&ScalarField::from_fn(&g, |x, _| x.cos())));
        let b = Arc::new(GriddedFlow::from_vorticity(&ScalarField::from_fn(&g, |x, _| 3.0 * x.cos())));
        let f = TimeLinearFlow { t0: 1.0, t1: 2.0, a: a.clone(), b };
        let p = [0.7, 0.2];
        let v0 = a.sample_velocity(p);
        let vm = f.velocity(p, 1.5);
        assert!((vm[1] - 2.0 * v0[1]).abs() < 1e-12);
    }
}
