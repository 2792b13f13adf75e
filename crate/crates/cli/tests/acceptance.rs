//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any criterion fails.
//!
//! Runs the bundled disc configuration at n = 256 twice and the full probe
//! ensemble, so expect roughly ten minutes on one core.

use std::f64::consts::PI;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;
use std::time::Instant;

use bqp_cli::config::{Config, SnapshotField};
use bqp_cli::run::{field_index, list_snapshots, read_markers, read_snapshot};
use bqp_cli::{cmd_probe, cmd_run, RunSummary};
use bqp_core::diagnostics::{energy_equality_residual, random_field, step_dissipation, DiagnosticsRecord, EnergySample};
use bqp_core::interp::cubic_field;
use bqp_core::lagrangian::{hausdorff, LevelSet};
use bqp_core::lp::{paraproduct_pair, DyadicFilterBank};
use bqp_core::solver::{Scheme, SimState, Simulation, StepperConfig};
use bqp_core::spectral::{biot_savart, curl, gradient, heat_multiplier, laplacian, product};
use bqp_core::{Grid, GridRef, ScalarField, VectorField2};

struct Outcome {
    failed: usize,
}

impl Outcome {
    fn check(&mut self, label: &str, ok: bool, detail: String) {
        println!("{} {label}: {detail}", if ok { "PASS" } else { "FAIL" });
        if !ok {
            self.failed += 1;
        }
    }

    fn report(&self, label: &str, detail: String) {
        println!("INFO {label}: {detail}");
    }
}

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn grid(n: usize) -> GridRef {
    Grid::new(n, 2.0 * PI).unwrap()
}

fn partition_of_unity(out: &mut Outcome) {
    let t = Instant::now();
    let bank = DyadicFilterBank::new(&grid(256));
    let d = bank.partition_defect();
    let secs = t.elapsed().as_secs_f64();
    out.check("1 partition of unity (n=256)", d <= 1e-12 && secs < 1.0, format!("defect={d:e} tol=1e-12 time={secs:.2}s"));
}

fn bony(out: &mut Outcome) {
    let t = Instant::now();
    let g = grid(256);
    let bank = DyadicFilterBank::new(&g);
    let mut worst: f64 = 0.0;
    for i in 0..32 {
        let u = random_field(&g, 11, 2 * i, 1.5, 85);
        let v = random_field(&g, 11, 2 * i + 1, 1.5, 85);
        let (tuv, tvu, r) = paraproduct_pair(&bank, &u, &v).unwrap();
        let err = product(&u, &v).sub(&tuv).sub(&tvu).sub(&r).max_abs();
        worst = worst.max(err / (u.max_abs() * v.max_abs()));
    }
    let secs = t.elapsed().as_secs_f64();
    out.check(
        "2 Bony identity (32 pairs, n=256)",
        worst <= 1e-11 && secs < 10.0,
        format!("max relative defect={worst:e} tol=1e-11 time={secs:.1}s"),
    );
}

fn biot_savart_exactness(out: &mut Outcome) {
    let g = grid(64);
    let w = ScalarField::from_fn(&g, |x, y| x.sin() * y.sin());
    let u = biot_savart(&w);
    // ψ = ½ sin x sin y solves -Δψ = ω, u = (∂₂ψ, -∂₁ψ).
    let ex = ScalarField::from_fn(&g, |x, y| 0.5 * x.sin() * y.cos());
    let ey = ScalarField::from_fn(&g, |x, y| -0.5 * x.cos() * y.sin());
    let single = u.x.max_abs_diff(&ex).max(u.y.max_abs_diff(&ey));

    let g = grid(128);
    let w = random_field(&g, 5, 0, 1.5, 42);
    let w = w.sub(&ScalarField::constant(&g, w.mean()));
    let round = curl(&biot_savart(&w)).max_abs_diff(&w) / w.max_abs();
    out.check(
        "3 Biot-Savart exactness",
        single <= 1e-12 && round <= 1e-10,
        format!("single mode err={single:e} (tol 1e-12) curl∘BS rel err={round:e} (tol 1e-10)"),
    );
}

fn unforced(omega: ScalarField, theta: ScalarField, nu: f64, cfg: StepperConfig) -> Simulation {
    let g = omega.grid().clone();
    let st = SimState::new(nu, theta, omega, VectorField2::zeros(&g), None).unwrap();
    Simulation::new(st, None, cfg).unwrap()
}

fn advance_to(sim: &mut Simulation, t_end: f64) {
    while sim.state.t < t_end - 1e-12 {
        sim.advance(t_end).unwrap();
    }
}

fn heat_and_duhamel(out: &mut Outcome) {
    let g = grid(32);
    let w0 = ScalarField::from_fn(&g, |x, y| (2.0 * x + y).sin() + 0.5 * (x - 3.0 * y).cos());
    let cfg = StepperConfig { linearized: true, dt: 0.01, ..Default::default() };
    let mut s = unforced(w0.clone(), ScalarField::zeros(&g), 1.0, cfg);
    advance_to(&mut s, 0.5);
    let heat = s.state.omega.max_abs_diff(&heat_multiplier(&w0, 1.0, s.state.t).unwrap());

    let eps = 0.1;
    let theta = ScalarField::from_fn(&g, |x, _| eps * x.sin());
    let cfg = StepperConfig {
        linearized: true,
        mollifier_width: 0.0,
        scheme: Scheme::Ifrk3,
        dt: 0.005,
        ..Default::default()
    };
    let mut s = unforced(ScalarField::zeros(&g), theta, 1.0, cfg);
    advance_to(&mut s, 1.0);
    // ω̂ = ik₁θ̂₀ (1 - e^{-ν|k|²t})/(ν|k|²), |k| = 1
    let t = s.state.t;
    let exact = ScalarField::from_fn(&g, |x, _| eps * x.cos() * (1.0 - (-t).exp()));
    let duhamel = s.state.omega.max_abs_diff(&exact);
    out.check(
        "4 heat semigroup and Duhamel oracles",
        heat <= 1e-10 && duhamel <= 1e-8,
        format!("heat err={heat:e} (tol 1e-10) duhamel err={duhamel:e} (tol 1e-8)"),
    );
}

/// Exact vorticity `a(t)·sin x + b(t)·cos(x + 2y)` and its time derivative.
fn manufactured(g: &GridRef, t: f64) -> (ScalarField, ScalarField) {
    let (a, da) = (0.4 * (1.0 + 0.5 * t.sin()), 0.2 * t.cos());
    let (b, db) = (0.3 * (-0.5 * t).exp(), -0.15 * (-0.5 * t).exp());
    let w = ScalarField::from_fn(g, |x, y| a * x.sin() + b * (x + 2.0 * y).cos());
    let dw = ScalarField::from_fn(g, |x, y| da * x.sin() + db * (x + 2.0 * y).cos());
    (w, dw)
}

fn manufactured_error(dt: f64, nu: f64) -> (f64, bool) {
    let g = grid(128);
    let cfg = StepperConfig { dt, ..Default::default() };
    let mut s = unforced(manufactured(&g, 0.0).0, ScalarField::zeros(&g), nu, cfg);
    let gf = g.clone();
    s.forcing = Some(Arc::new(move |t| {
        let (w, dw) = manufactured(&gf, t);
        let u = biot_savart(&w);
        let gw = gradient(&w);
        let adv = product(&u.x, &gw.x).add(&product(&u.y, &gw.y));
        dw.add(&adv).sub(&laplacian(&w).scaled(nu))
    }));
    let mut unbound = true;
    while s.state.t < 1.0 - 1e-12 {
        let info = s.advance(1.0).unwrap();
        unbound &= info.halvings == 0 && (info.dt == dt || s.state.t >= 1.0 - 1e-12);
    }
    (s.state.omega.max_abs_diff(&manufactured(&g, 1.0).0), unbound)
}

fn energy_residual(dt: f64, nu: f64) -> (f64, bool) {
    let g = grid(128);
    let w0 = ScalarField::from_fn(&g, |x, y| 0.5 * (x.sin() + (x + 2.0 * y).cos() + 0.3 * (3.0 * x - y).sin()));
    let cfg = StepperConfig { dt, ..Default::default() };
    let zero = ScalarField::zeros(&g);
    let mut s = unforced(w0, zero.clone(), nu, cfg);
    let mut hist = vec![EnergySample::new(0.0, &s.state.u, &s.state.omega, &zero)];
    let mut unbound = true;
    while s.state.t < 1.0 - 1e-12 {
        let before = s.state.omega.clone();
        let info = s.advance(1.0).unwrap();
        unbound &= info.halvings == 0 && (info.dt == dt || s.state.t >= 1.0 - 1e-12);
        hist.push(
            EnergySample::new(s.state.t, &s.state.u, &s.state.omega, &zero)
                .with_step_dissipation(step_dissipation(&before, &s.state.omega, info.dt)),
        );
    }
    let r = energy_equality_residual(&hist, nu).unwrap();
    (r.abs() / hist[0].kinetic, unbound)
}

fn sci(v: &[f64]) -> String {
    v.iter().map(|x| format!("{x:.3e}")).collect::<Vec<_>>().join(" ")
}

fn fixed(v: &[f64]) -> String {
    v.iter().map(|x| format!("{x:.2}")).collect::<Vec<_>>().join(" ")
}

fn ratios(e: &[f64]) -> Vec<f64> {
    e.windows(2).map(|w| w[0] / w[1]).collect()
}

fn scheme_order(out: &mut Outcome) {
    let dts = [0.02, 0.01, 0.005, 0.0025];
    let (m, mb): (Vec<f64>, Vec<bool>) = dts.iter().map(|&dt| manufactured_error(dt, 0.1)).unzip();
    let (e, eb): (Vec<f64>, Vec<bool>) = dts.iter().map(|&dt| energy_residual(dt, 0.1)).unzip();
    let (rm, re) = (ratios(&m), ratios(&e));
    let unbound = mb.iter().chain(&eb).all(|&b| b);
    let ok = unbound && rm.iter().chain(&re).all(|&r| r >= 3.5);
    out.check(
        "5 IFRK2 order (n=128, dt 0.02..0.0025)",
        ok,
        format!("manufactured errs={} ratios={}; energy residuals={} ratios={}; cfl unbound={unbound}", sci(&m), fixed(&rm), sci(&e), fixed(&re)),
    );
}

fn col(recs: &[DiagnosticsRecord], name: &str) -> Vec<f64> {
    recs.iter().map(|r| r.get(name).unwrap_or(f64::NAN)).collect()
}

fn max_of(v: &[f64]) -> f64 {
    v.iter().copied().fold(f64::NEG_INFINITY, f64::max)
}

fn geometry(out: &mut Outcome, cfg: &Config, run: &RunSummary, secs: f64) {
    let r = &run.records;
    let drift = max_of(&col(r, "area_drift"));
    let det = max_of(&col(r, "det_deviation"));
    let theta = max_of(&col(r, "theta_linf").iter().map(|v| (v - cfg.physics.m1).abs()).collect::<Vec<_>>());
    let div = max_of(
        &r.iter()
            .map(|x| x.get("div_x_linf").unwrap() / x.get("grad_x_linf").unwrap())
            .collect::<Vec<_>>(),
    );
    let done = r.len() == 21 && (r.last().unwrap().t - 1.0).abs() < 1e-12;
    out.check(
        "6 geometry invariants (disc, n=256, T=1)",
        done && drift <= 1e-4 && det <= 1e-6 && theta <= 1e-6 && div <= 1e-6,
        format!(
            "records={} area drift={drift:e} (1e-4) det dev={det:e} (1e-6) |θ|∞-M1={theta:e} (1e-6) divX/∇X={div:e} (1e-6) runtime={secs:.0}s",
            r.len()
        ),
    );
    let res = max_of(&col(r, "energy_residual_rel").iter().map(|v| v.abs()).collect::<Vec<_>>());
    out.check("6a energy residual (disc, n=256)", res <= 1e-3, format!("max |R|/|u0|^2 = {res:e} tol=1e-3"));
}

/// Largest sine of the angle between the Eulerian `X` and the boundary tangent,
/// and largest Hausdorff distance between the level-set zero contour and the
/// marker polygon, over every record.
fn boundary_consistency(out: &mut Outcome, cfg: &Config, dir: &Path) {
    let g = grid(cfg.grid.n);
    let h = g.spacing();
    let markers = read_markers(dir).unwrap();
    let (ix, iy, il) = (
        field_index(cfg, SnapshotField::X1),
        field_index(cfg, SnapshotField::X2),
        field_index(cfg, SnapshotField::Levelset),
    );
    let mut sine: f64 = 0.0;
    let mut dist: f64 = 0.0;
    for (k, path) in list_snapshots(dir).unwrap().iter().enumerate() {
        let snap = read_snapshot(path).unwrap();
        let x1 = snap.field(&g, ix).unwrap();
        let x2 = snap.field(&g, iy).unwrap();
        let ms = &markers[&k];
        for m in ms {
            let x = [cubic_field(&x1, m.p), cubic_field(&x2, m.p)];
            let cross = (x[0] * m.tangent[1] - x[1] * m.tangent[0]).abs();
            sine = sine.max(cross / (x[0].hypot(x[1]) * m.tangent[0].hypot(m.tangent[1])));
        }
        let ls = LevelSet::new(snap.field(&g, il).unwrap(), 6.0 * h);
        let poly: Vec<[f64; 2]> = ms.iter().map(|m| m.p).collect();
        dist = dist.max(hausdorff(&ls.zero_contour(), &poly));
    }
    out.check("6b tangency persistence", sine <= 0.05, format!("max sin(X, tangent)={sine:e} tol=0.05"));
    out.check("6c level set vs markers", dist <= 2.0 * h, format!("max Hausdorff={dist:e} tol=2h={:e}", 2.0 * h));
}

fn cross_representation(out: &mut Outcome, levels: &[(usize, f64, &RunSummary)]) {
    let mut devs = Vec::new();
    for &(n, dt, run) in levels {
        let h = 2.0 * PI / n as f64;
        let markers = read_markers(&run.dir).unwrap();
        let mut dev: f64 = 0.0;
        for (k, rec) in run.records.iter().enumerate() {
            let scale = markers[&k].iter().map(|m| m.x_lagr[0].hypot(m.x_lagr[1])).fold(0.0, f64::max);
            dev = dev.max(rec.get("x_marker_dev").unwrap() / scale);
        }
        out.report(
            "7 cross-representation level",
            format!("n={n} dt={dt} max rel dev={dev:e} C=dev/(h+dt)={:e}", dev / (h + dt)),
        );
        devs.push(dev);
    }
    let r = ratios(&devs);
    out.check(
        "7 cross-representation of X under (h, dt) halving",
        r.iter().all(|&x| x >= 2.0),
        format!("devs={} reduction per halving={} (need >= 2)", sci(&devs), fixed(&r)),
    );
}

fn striated(out: &mut Outcome, run: &RunSummary) {
    let r = &run.records;
    let names = ["z", "dx_theta", "div_x_omega_m1", "boundary_norm"];
    let finite = names.iter().all(|n| col(r, n).iter().all(|v| v.is_finite()));
    let b = col(r, "boundary_norm");
    let growth = b.last().unwrap() / b[0];
    out.check(
        "9 striated regularity series (eps=0.5, q=1.3)",
        finite && growth <= 10.0,
        format!("all finite={finite} boundary norm {:e} -> {:e} (x{growth:.3}, limit 10)", b[0], b.last().unwrap()),
    );
}

fn tangency_residual(out: &mut Outcome, levels: &[(usize, f64, &RunSummary)]) {
    let v: Vec<f64> = levels.iter().map(|l| l.2.records[0].get("dx_theta").unwrap()).collect();
    let decreasing = v.windows(2).all(|w| w[1] < w[0]);
    out.check("9a tangency residual at t=0 shrinks under refinement", decreasing, format!("n=64,128,256: {}", sci(&v)));
}

fn probes(out: &mut Outcome, tmp: &Path) {
    let cfg = Config::load(&configs().join("probe_ensemble.toml")).unwrap();
    let t = Instant::now();
    let res = cmd_probe(&cfg, "all", &tmp.join("probes"), None, None).unwrap();
    let mut ok = res.len() == 6;
    for p in &res {
        let lines = fs::read_to_string(&p.path).unwrap().lines().count();
        let good = p.all_finite && p.growth <= 1.1 && lines == 1 + 64 + 1;
        ok &= good;
        out.report("8 probe", format!("{} rows={} {}", if good { "ok" } else { "bad" }, lines - 2, p.summary_line()));
    }
    out.check(
        "8 inequality probes (64 samples, n=128/256)",
        ok,
        format!("{} probes, all finite with growth <= 1.1: {ok} ({:.0}s)", res.len(), t.elapsed().as_secs_f64()),
    );
}

fn sweep(out: &mut Outcome, tmp: &Path) {
    let cfg = Config::load(&configs().join("transdiff_sweep.toml")).unwrap();
    let res = cmd_probe(&cfg, "transdiff", &tmp.join("sweep"), None, None).unwrap();
    let p = &res[0];
    out.check("10 transport-diffusion sweep", p.all_finite && p.growth <= 1.1, p.summary_line());
}

fn main() -> ExitCode {
    let tmp = tempfile::tempdir().unwrap();
    let mut out = Outcome { failed: 0 };

    partition_of_unity(&mut out);
    bony(&mut out);
    biot_savart_exactness(&mut out);
    heat_and_duhamel(&mut out);
    scheme_order(&mut out);

    let disc = Config::load(&configs().join("disc.toml")).unwrap();
    let t = Instant::now();
    let fine = cmd_run(&disc, &tmp.path().join("disc")).unwrap();
    let secs = t.elapsed().as_secs_f64();
    geometry(&mut out, &disc, &fine, secs);
    boundary_consistency(&mut out, &disc, &fine.dir);

    let coarser = |n: usize, dt: f64| {
        let mut c = disc.clone();
        c.grid.n = n;
        c.stepper.dt = dt;
        cmd_run(&c, &tmp.path().join(format!("disc_{n}"))).unwrap()
    };
    let r64 = coarser(64, 0.01);
    let r128 = coarser(128, 0.005);
    let levels = [(64, 0.01, &r64), (128, 0.005, &r128), (256, disc.stepper.dt, &fine)];
    cross_representation(&mut out, &levels);

    probes(&mut out, tmp.path());
    striated(&mut out, &fine);
    tangency_residual(&mut out, &levels);
    sweep(&mut out, tmp.path());

    let again = cmd_run(&disc, &tmp.path().join("disc_again")).unwrap();
    let same = fs::read(fine.dir.join("diagnostics.csv")).unwrap() == fs::read(again.dir.join("diagnostics.csv")).unwrap();
    out.check("11 determinism of bundled disc config", same, format!("diagnostics.csv byte-identical={same}"));

    if out.failed == 0 {
        println!("acceptance: all criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {} criteria failed", out.failed);
        ExitCode::FAILURE
    }
}
