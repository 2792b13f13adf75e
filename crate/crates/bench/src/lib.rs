//! Shared fixtures for the criterion benches.

use bqp_core::diagnostics::random_field;
use bqp_core::solver::{SimState, Simulation, StepperConfig};
use bqp_core::{Grid, GridRef, ScalarField, VectorField2};

pub fn grid(n: usize) -> GridRef {
    Grid::new(n, 2.0 * std::f64::consts::PI).expect("valid grid")
}

/// Mean-free random field with `|k|^{-2}` decay over the full dealiased band.
pub fn rough_field(g: &GridRef, stream: u64) -> ScalarField {
    let kmax = (g.n() / 3) as i64;
    let f = random_field(g, 3, stream, 2.0, kmax);
    f.sub(&ScalarField::constant(g, f.mean()))
}

/// Buoyancy-driven run from random vorticity and a disc of hot fluid.
pub fn simulation(n: usize) -> Simulation {
    let g = grid(n);
    let c = std::f64::consts::PI;
    let theta = ScalarField::from_fn(&g, |x, y| if (x - c).hypot(y - c) < 0.5 { 1.0 } else { 0.0 });
    let state = SimState::new(1.0, theta, rough_field(&g, 0), VectorField2::zeros(&g), None).expect("state");
    Simulation::new(state, None, StepperConfig::default()).expect("simulation")
}
