//! A small temperature-patch run through the public API only.

use std::f64::consts::PI;

use bqp_core::diagnostics::{write_csv_header, write_csv_row, EnergySample, MarkerSample, Recorder, StriatedParams};
use bqp_core::lagrangian::{seed_markers, PatchState};
use bqp_core::lp::DyadicFilterBank;
use bqp_core::solver::{SimState, Simulation, StepperConfig};
use bqp_core::spectral::{gradient, Snapshot};
use bqp_core::{Grid, ScalarField, VectorField2};

const C: [f64; 2] = [PI, PI];
const R0: f64 = 0.6;

fn perp_grad(p: [f64; 2]) -> [f64; 2] {
    // f = (|x-c|² - r0²)/(2r0): unit gradient on the circle
    [-(p[1] - C[1]) / R0, (p[0] - C[0]) / R0]
}

fn setup(n: usize) -> (Simulation, Recorder) {
    let g = Grid::new(n, 2.0 * PI).unwrap();
    let theta = ScalarField::from_fn(&g, |x, y| if (x - C[0]).hypot(y - C[1]) < R0 { 1.0 } else { 0.0 });
    let omega = ScalarField::from_fn(&g, |x, y| 0.5 * (x.sin() * y.cos()));
    // Periodic stand-in for the level set: smooth, radial near the disc.
    let f = ScalarField::from_fn(&g, |x, y| {
        let d2 = (x - C[0]).powi(2) + (y - C[1]).powi(2);
        0.3 * ((d2 - R0 * R0) / (0.6 * R0)).tanh()
    });
    let gf = gradient(&f);
    let x0 = VectorField2::new(gf.y.scaled(-1.0), gf.x).unwrap();
    let (markers, tangents) = seed_markers(&perp_grad, [C[0] + R0, C[1]], 128, 1e-3, 1_000_000).unwrap();
    let x_ref = markers.iter().map(|&p| perp_grad(p)).collect();
    let patch = PatchState::new(markers, tangents, x_ref, 2.0 * PI).unwrap();
    let state = SimState::new(1.0, theta, omega, x0, None).unwrap();
    let cfg = StepperConfig { dt: 0.01, ..Default::default() };
    let bank = DyadicFilterBank::new(&g);
    let rec = Recorder::new(bank, StriatedParams::new(0.5, 1.3).unwrap(), 1.0);
    (Simulation::new(state, Some(patch), cfg).unwrap(), rec)
}

fn sample(sim: &Simulation) -> EnergySample {
    let s = &sim.state;
    EnergySample::new(s.t, &s.u, &s.omega, &sim.buoyancy_theta(&s.theta))
}

#[test]
fn short_run_keeps_geometry_and_writes_stable_rows() {
    let (mut sim, mut rec) = setup(64);
    let mut energy = vec![sample(&sim)];
    let mut rows = Vec::new();
    write_csv_header(&mut rows).unwrap();
    for target in [0.0, 0.1, 0.2] {
        while sim.state.t < target - 1e-12 {
            sim.advance(target).unwrap();
            energy.push(sample(&sim));
        }
        let m = MarkerSample::from_patch(sim.patch.as_ref().unwrap());
        let s = &sim.state;
        let r = rec.record(s.t, &s.theta, &s.omega, &s.x, Some(&m), &energy).unwrap();
        let p = r.patch.unwrap();
        assert!(p.area_drift < 1e-4, "{}", p.area_drift);
        assert!(p.det_deviation < 1e-6, "{}", p.det_deviation);
        assert!(r.values().iter().flatten().all(|v| v.is_finite()));
        write_csv_row(&mut rows, "abc", &r).unwrap();
    }
    let text = String::from_utf8(rows).unwrap();
    assert_eq!(text.lines().count(), 4);
    assert!(text.lines().skip(1).all(|l| l.starts_with("abc,")));
    // θ is carried by a monotone scheme: no new extrema.
    assert!(sim.state.theta.max() <= 1.0 && sim.state.theta.min() >= 0.0);
}

#[test]
fn snapshots_round_trip_the_state() {
    let (mut sim, _) = setup(32);
    sim.advance(1.0).unwrap();
    let s = &sim.state;
    let snap = Snapshot::from_fields(s.t, &[&s.theta, &s.omega, &s.x.x, &s.x.y]).unwrap();
    let mut bytes = Vec::new();
    snap.write_to(&mut bytes).unwrap();
    let back = Snapshot::decode(&bytes).unwrap();
    assert_eq!(back.t, s.t);
    let g = s.omega.grid();
    assert_eq!(back.field(g, 1).unwrap().values(), s.omega.values());
    assert_eq!(back.field(g, 3).unwrap().values(), s.x.y.values());
}
