//! Initial data for the temperature-patch runs.

use std::f64::consts::PI;

use bqp_core::lagrangian::{seed_markers, LevelSet, PatchState};
use bqp_core::solver::SimState;
use bqp_core::spectral::{gradient, Grid};
use bqp_core::{ScalarField, VectorField2};

use crate::config::Config;
use crate::error::CliError;

/// Initial state plus the bookkeeping numbers of its construction.
pub struct Scenario {
    pub state: SimState,
    pub patch: PatchState,
    /// `|D₀|` from Green's formula on the seeded boundary.
    pub disc_area: f64,
    /// Quadrature mass of the sampled indicator, `h²·#{nodes in D₀}`.
    pub indicator_area: f64,
    /// Quadrature integral of the compensating vorticity.
    pub bump_integral: f64,
    /// Quadrature integral of `ω₀` before the solver pins its mean.
    pub omega_integral: f64,
}

/// `C^∞` bump on the annulus `a < r < b` with peak value 1.
pub fn annulus_bump(r: f64, a: f64, b: f64) -> f64 {
    let s = (2.0 * r - a - b) / (b - a);
    if s.abs() >= 1.0 {
        0.0
    } else {
        (1.0 - 1.0 / (1.0 - s * s)).exp()
    }
}

/// Level-set function `w·tanh((|x-c|² - r₀²)/(2r₀w))`: negative inside the
/// disc, unit gradient on the circle, saturating to `±w` away from it.
pub fn levelset_value(p: [f64; 2], c: [f64; 2], r0: f64, w: f64) -> f64 {
    let d2 = (p[0] - c[0]).powi(2) + (p[1] - c[1]).powi(2);
    w * ((d2 - r0 * r0) / (2.0 * r0 * w)).tanh()
}

/// `∇⊥f₀ = (-∂₂f₀, ∂₁f₀)` for [`levelset_value`].
pub fn levelset_perp_gradient(p: [f64; 2], c: [f64; 2], r0: f64, w: f64) -> [f64; 2] {
    let (dx, dy) = (p[0] - c[0], p[1] - c[1]);
    let g = (dx * dx + dy * dy - r0 * r0) / (2.0 * r0 * w);
    let sech2 = 1.0 / g.cosh().powi(2);
    [-sech2 * dy / r0, sech2 * dx / r0]
}

/// Area enclosed by a closed curve sampled uniformly in `σ ∈ [0, 2π)`,
/// `½∮(x y' - y x') dσ` by the periodic trapezoid rule.
pub fn green_area(points: &[[f64; 2]], tangents: &[[f64; 2]]) -> f64 {
    let ds = 2.0 * PI / points.len() as f64;
    0.5 * ds
        * points
            .iter()
            .zip(tangents)
            .map(|(p, t)| p[0] * t[1] - p[1] * t[0])
            .sum::<f64>()
}

pub fn build_scenario(cfg: &Config) -> Result<Scenario, CliError> {
    cfg.validate_run()?;
    let eff = cfg.effective();
    let grid = Grid::new(cfg.grid.n, cfg.grid.length).map_err(|e| CliError::Config(e.to_string()))?;
    let sc = &cfg.scenario;
    let (c, r0, w) = (sc.center, sc.radius, sc.levelset_width);
    let [a, b] = sc.annulus;
    let cell = grid.cell_area();

    let inside = |x: f64, y: f64| (x - c[0]).powi(2) + (y - c[1]).powi(2) < r0 * r0;
    let indicator = ScalarField::from_fn(&grid, |x, y| if inside(x, y) { 1.0 } else { 0.0 });
    let indicator_area = indicator.integral();
    let theta = indicator.scaled(eff.m1);

    let bump = ScalarField::from_fn(&grid, |x, y| annulus_bump((x - c[0]).hypot(y - c[1]), a, b));
    let bump_mass = bump.integral();
    // Scaled so that the total vorticity vanishes on the grid.
    let bump = bump.scaled(eff.m2 * indicator_area / bump_mass);
    let bump_integral = bump.integral();
    let omega = indicator.scaled(eff.m2).sub(&bump);
    let omega_integral = omega.values().iter().sum::<f64>() * cell;

    let f0 = ScalarField::from_fn(&grid, |x, y| levelset_value([x, y], c, r0, w));
    let gf = gradient(&f0);
    let x0 = VectorField2::new(gf.y.scaled(-1.0), gf.x).map_err(CliError::runtime)?;
    let levelset = LevelSet::new(f0, 6.0 * grid.spacing());

    let field = move |p: [f64; 2]| levelset_perp_gradient(p, c, r0, w);
    let (markers, tangents) = seed_markers(&field, [c[0] + r0, c[1]], sc.markers, 1e-3, 10_000_000)?;
    let disc_area = green_area(&markers, &tangents);
    let x_ref = markers.iter().map(|&p| field(p)).collect();
    let patch = PatchState::new(markers, tangents, x_ref, cfg.grid.length)?;

    let state = SimState::new(eff.nu, theta, omega, x0, Some(levelset))?;
    Ok(Scenario {
        state,
        patch,
        disc_area,
        indicator_area,
        bump_integral,
        omega_integral,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> Config {
        let mut c = Config::default();
        c.grid.n = 64;
        c.scenario.annulus = [1.0, 1.5];
        c.scenario.markers = 128;
        c
    }

    #[test]
    fn zero_amplitudes_give_zero_data() {
        let mut c = small();
        c.physics.m1 = 0.0;
        c.physics.m2 = 0.0;
        let s = build_scenario(&c).unwrap();
        assert_eq!(s.state.theta.max_abs(), 0.0);
        assert_eq!(s.state.omega.max_abs(), 0.0);
    }

    #[test]
    fn vorticity_is_mean_free() {
        let s = build_scenario(&small()).unwrap();
        assert!(s.omega_integral.abs() <= 1e-10, "{}", s.omega_integral);
        assert!((s.bump_integral - s.indicator_area).abs() <= 1e-10);
        assert_eq!(s.state.theta.max_abs(), 1.0);
    }

    #[test]
    fn seeded_boundary_is_the_circle() {
        let c = small();
        let s = build_scenario(&c).unwrap();
        let r0 = c.scenario.radius;
        for p in &s.patch.markers {
            let r = (p[0] - PI).hypot(p[1] - PI);
            assert!((r - r0).abs() < 1e-8, "{r}");
        }
        assert!((s.disc_area - PI * r0 * r0).abs() < 1e-6 * PI * r0 * r0);
    }

    #[test]
    fn x0_is_tangent_and_solenoidal() {
        let s = build_scenario(&small()).unwrap();
        let x = &s.state.x;
        let div = bqp_core::spectral::divergence(x);
        assert!(div.max_abs() < 1e-12 * x.max_norm().max(1.0));
        let c = [PI, PI];
        let v = levelset_perp_gradient([PI + 0.5, PI], c, 0.5, 0.15);
        assert_eq!(v[0], 0.0);
        assert!((v[1] - 1.0).abs() < 1e-15);
    }
}
