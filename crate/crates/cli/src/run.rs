//! `run` and `analyze`.
//!
//! A run directory holds
//!
//! - `config.toml`: the canonical configuration,
//! - `manifest.txt`: `key=value` lines (hash, grid, scheme, version, cadence),
//! - `diagnostics.csv`: one row per record time,
//! - `steps.csv`: energy samples at every accepted step,
//! - `markers.csv`: boundary markers at every record time,
//! - `snapshots/snap_NNNNN.bqp`: the fields listed in `outputs.fields`.

use std::collections::BTreeMap;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use bqp_core::diagnostics::{
    format_float, step_dissipation, write_csv_header, write_csv_row, DiagnosticsRecord, EnergySample, MarkerSample,
    Recorder,
};
use bqp_core::lp::DyadicFilterBank;
use bqp_core::solver::{Simulation, StepInfo};
use bqp_core::spectral::{Grid, Snapshot};
use bqp_core::{GridRef, ScalarField, VectorField2};

use crate::config::{Config, SnapshotField};
use crate::error::CliError;
use crate::scenario::build_scenario;

pub const CONFIG_FILE: &str = "config.toml";
pub const MANIFEST_FILE: &str = "manifest.txt";
pub const DIAGNOSTICS_FILE: &str = "diagnostics.csv";
pub const STEPS_FILE: &str = "steps.csv";
pub const MARKERS_FILE: &str = "markers.csv";
pub const SNAPSHOT_DIR: &str = "snapshots";

const STEPS_HEADER: &str = "config_hash,step,t,dt,halvings,redistributed,kinetic,dissipation,work,step_dissipation";
const MARKERS_HEADER: &str = "config_hash,record,t,index,x,y,tangent_x,tangent_y,x_lagr_1,x_lagr_2,det";

pub struct RunSummary {
    pub dir: PathBuf,
    pub records: Vec<DiagnosticsRecord>,
    pub steps: usize,
    pub snapshots: Vec<PathBuf>,
}

pub fn snapshot_path(dir: &Path, k: usize) -> PathBuf {
    dir.join(SNAPSHOT_DIR).join(format!("snap_{k:05}.bqp"))
}

fn manifest(cfg: &Config, status: &str, steps: usize, records: usize) -> String {
    let eff = cfg.effective();
    let p = &cfg.physics;
    let s = &cfg.stepper;
    let fields: Vec<&str> = cfg.outputs.fields.iter().map(|f| f.name()).collect();
    let mut m = BTreeMap::new();
    m.insert("config_hash", cfg.hash());
    m.insert("version", env!("CARGO_PKG_VERSION").to_string());
    m.insert("grid_n", cfg.grid.n.to_string());
    m.insert("grid_length", format_float(cfg.grid.length));
    m.insert("dealias", "two_thirds".into());
    m.insert("scheme", format!("{:?}", s.scheme).to_lowercase());
    m.insert("theta_advection", format!("{:?}", s.theta_advection));
    m.insert("x_advection", format!("{:?}", s.x_advection));
    m.insert("marker_scheme", format!("{:?}", s.marker_scheme).to_lowercase());
    m.insert("scenario", cfg.scenario.name.clone());
    m.insert("nu", format_float(p.nu));
    m.insert("m1", format_float(p.m1));
    m.insert("m2", format_float(p.m2));
    m.insert("t_final", format_float(s.t_final));
    m.insert("rescaled", p.rescale.to_string());
    m.insert("solver_nu", format_float(eff.nu));
    m.insert("solver_m1", format_float(eff.m1));
    m.insert("solver_m2", format_float(eff.m2));
    m.insert("solver_t_final", format_float(eff.t_final));
    m.insert("solver_dt", format_float(eff.dt));
    m.insert("record_every", format_float(eff.record_every));
    m.insert("integral_cadence", "record".into());
    m.insert("snapshot_fields", fields.join(","));
    m.insert("status", status.into());
    m.insert("steps", steps.to_string());
    m.insert("records", records.to_string());
    m.into_iter().map(|(k, v)| format!("{k}={v}\n")).collect()
}

fn snapshot_fields<'a>(cfg: &Config, sim: &'a Simulation, u: &'a VectorField2) -> Vec<&'a ScalarField> {
    let s = &sim.state;
    cfg.outputs
        .fields
        .iter()
        .map(|f| match f {
            SnapshotField::Theta => &s.theta,
            SnapshotField::Omega => &s.omega,
            SnapshotField::X1 => &s.x.x,
            SnapshotField::X2 => &s.x.y,
            SnapshotField::U1 => &u.x,
            SnapshotField::U2 => &u.y,
            SnapshotField::Levelset => &s.levelset.as_ref().expect("disc runs carry a level set").f,
        })
        .collect()
}

fn write_snapshot(path: &Path, t: f64, fields: &[&ScalarField]) -> Result<(), CliError> {
    let snap = Snapshot::from_fields(t, fields)?;
    let mut w = BufWriter::new(File::create(path)?);
    snap.write_to(&mut w)?;
    w.flush()?;
    Ok(())
}

fn energy_sample(sim: &Simulation) -> EnergySample {
    let s = &sim.state;
    EnergySample::new(s.t, &s.u, &s.omega, &sim.buoyancy_theta(&s.theta))
}

fn write_step_row(w: &mut impl Write, hash: &str, e: &EnergySample, info: Option<&StepInfo>) -> Result<(), CliError> {
    let (step, dt, halv, red) = match info {
        Some(i) => (i.step.to_string(), format_float(i.dt), i.halvings.to_string(), i.redistributed.to_string()),
        None => ("0".into(), String::new(), String::new(), String::new()),
    };
    writeln!(
        w,
        "{hash},{step},{},{dt},{halv},{red},{},{},{},{}",
        format_float(e.t),
        format_float(e.kinetic),
        format_float(e.dissipation),
        format_float(e.work),
        e.step_dissipation.map(format_float).unwrap_or_default()
    )?;
    Ok(())
}

fn write_marker_rows(w: &mut impl Write, hash: &str, k: usize, t: f64, m: &[MarkerSample]) -> Result<(), CliError> {
    let f = format_float;
    for (i, s) in m.iter().enumerate() {
        writeln!(
            w,
            "{hash},{k},{},{i},{},{},{},{},{},{},{}",
            f(t),
            f(s.p[0]),
            f(s.p[1]),
            f(s.tangent[0]),
            f(s.tangent[1]),
            f(s.x_lagr[0]),
            f(s.x_lagr[1]),
            f(s.det)
        )?;
    }
    Ok(())
}

fn bank_for(cfg: &Config, grid: &GridRef) -> Result<Arc<DyadicFilterBank>, CliError> {
    DyadicFilterBank::with_options(grid, cfg.grid.n0, cfg.grid.oversample).map_err(|e| CliError::Config(e.to_string()))
}

/// Record times `0, Δ, 2Δ, …` up to and including `T`.
fn record_times(t_final: f64, every: f64) -> Vec<f64> {
    let mut out = vec![0.0];
    let mut k = 1u64;
    loop {
        let t = k as f64 * every;
        if t >= t_final * (1.0 - 1e-12) {
            break;
        }
        out.push(t);
        k += 1;
    }
    if t_final > 0.0 {
        out.push(t_final);
    }
    out
}

/// Executes the configured run, writing all artifacts into `dir`.
pub fn cmd_run(cfg: &Config, dir: &Path) -> Result<RunSummary, CliError> {
    let scenario = build_scenario(cfg)?;
    let eff = cfg.effective();
    let hash = cfg.hash();
    fs::create_dir_all(dir.join(SNAPSHOT_DIR))?;
    fs::write(dir.join(CONFIG_FILE), cfg.to_toml())?;
    fs::write(dir.join(MANIFEST_FILE), manifest(cfg, "running", 0, 0))?;

    let grid = scenario.state.grid().clone();
    let bank = bank_for(cfg, &grid)?;
    let mut recorder = Recorder::new(bank, cfg.striated_params()?, eff.nu);
    let mut sim = Simulation::new(scenario.state, Some(scenario.patch), cfg.stepper_config(eff.dt))?;

    let mut diag = BufWriter::new(File::create(dir.join(DIAGNOSTICS_FILE))?);
    let mut steps_w = BufWriter::new(File::create(dir.join(STEPS_FILE))?);
    let mut markers_w = BufWriter::new(File::create(dir.join(MARKERS_FILE))?);
    write_csv_header(&mut diag)?;
    writeln!(steps_w, "{STEPS_HEADER}")?;
    writeln!(markers_w, "{MARKERS_HEADER}")?;

    let mut energy = vec![energy_sample(&sim)];
    write_step_row(&mut steps_w, &hash, &energy[0], None)?;
    let mut records = Vec::new();
    let mut snapshots: Vec<PathBuf> = Vec::new();

    let times = record_times(eff.t_final, eff.record_every);
    for (k, &target) in times.iter().enumerate() {
        let eps = 1e-12 * target.abs().max(1.0);
        while sim.state.t < target - eps {
            let before = sim.state.omega.clone();
            let info = match sim.advance(target) {
                Ok(i) => i,
                Err(e) => return Err(fail(cfg, dir, &sim, &snapshots, sim.steps(), records.len(), e)),
            };
            if target - sim.state.t <= eps {
                sim.state.t = target;
            }
            let e = energy_sample(&sim).with_step_dissipation(step_dissipation(&before, &sim.state.omega, info.dt));
            write_step_row(&mut steps_w, &hash, &e, Some(&info))?;
            energy.push(e);
        }
        let markers = MarkerSample::from_patch(sim.patch.as_ref().expect("disc runs carry markers"));
        let s = &sim.state;
        let rec = recorder
            .record(s.t, &s.theta, &s.omega, &s.x, Some(&markers), &energy)
            .map_err(|e| fail(cfg, dir, &sim, &snapshots, sim.steps(), records.len(), e))?;
        write_csv_row(&mut diag, &hash, &rec)?;
        write_marker_rows(&mut markers_w, &hash, k, s.t, &markers)?;
        let path = snapshot_path(dir, k);
        write_snapshot(&path, s.t, &snapshot_fields(cfg, &sim, &s.u))?;
        snapshots.push(path);
        diag.flush()?;
        steps_w.flush()?;
        markers_w.flush()?;
        log::info!("record {k} at t={} after {} steps", s.t, sim.steps());
        records.push(rec);
    }
    fs::write(dir.join(MANIFEST_FILE), manifest(cfg, "complete", sim.steps(), records.len()))?;
    Ok(RunSummary {
        dir: dir.to_path_buf(),
        records,
        steps: sim.steps(),
        snapshots,
    })
}

/// Persists the last valid state and builds the runtime error.
fn fail(
    cfg: &Config,
    dir: &Path,
    sim: &Simulation,
    snapshots: &[PathBuf],
    steps: usize,
    records: usize,
    e: impl std::fmt::Display,
) -> CliError {
    let path = dir.join(SNAPSHOT_DIR).join("last_valid.bqp");
    let saved = write_snapshot(&path, sim.state.t, &snapshot_fields(cfg, sim, &sim.state.u)).is_ok();
    let _ = fs::write(dir.join(MANIFEST_FILE), manifest(cfg, "failed", steps, records));
    CliError::Runtime {
        message: e.to_string(),
        last_snapshot: if saved { Some(path) } else { snapshots.last().cloned() },
    }
}

fn parse_f64(s: &str, what: &str) -> Result<f64, CliError> {
    s.parse::<f64>()
        .map_err(|_| CliError::runtime(format!("malformed number '{s}' in {what}")))
}

fn read_csv(path: &Path) -> Result<Vec<Vec<String>>, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::runtime(format!("{}: {e}", path.display())))?;
    Ok(text
        .lines()
        .skip(1)
        .filter(|l| !l.is_empty())
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect())
}

pub fn read_energy(dir: &Path) -> Result<Vec<EnergySample>, CliError> {
    read_csv(&dir.join(STEPS_FILE))?
        .iter()
        .map(|r| {
            if r.len() != 10 {
                return Err(CliError::runtime("steps.csv row has the wrong number of columns"));
            }
            Ok(EnergySample {
                t: parse_f64(&r[2], STEPS_FILE)?,
                kinetic: parse_f64(&r[6], STEPS_FILE)?,
                dissipation: parse_f64(&r[7], STEPS_FILE)?,
                work: parse_f64(&r[8], STEPS_FILE)?,
                step_dissipation: match r[9].as_str() {
                    "" => None,
                    v => Some(parse_f64(v, STEPS_FILE)?),
                },
            })
        })
        .collect()
}

/// Marker samples grouped by record index.
pub fn read_markers(dir: &Path) -> Result<BTreeMap<usize, Vec<MarkerSample>>, CliError> {
    let mut out: BTreeMap<usize, Vec<MarkerSample>> = BTreeMap::new();
    for r in read_csv(&dir.join(MARKERS_FILE))? {
        if r.len() != 11 {
            return Err(CliError::runtime("markers.csv row has the wrong number of columns"));
        }
        let k: usize = r[1].parse().map_err(|_| CliError::runtime("bad record index in markers.csv"))?;
        let v: Vec<f64> = r[4..].iter().map(|s| parse_f64(s, MARKERS_FILE)).collect::<Result<_, _>>()?;
        out.entry(k).or_default().push(MarkerSample {
            p: [v[0], v[1]],
            tangent: [v[2], v[3]],
            x_lagr: [v[4], v[5]],
            det: v[6],
        });
    }
    Ok(out)
}

/// Snapshot files of a run in record order.
pub fn list_snapshots(dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    let mut v: Vec<PathBuf> = fs::read_dir(dir.join(SNAPSHOT_DIR))
        .map_err(|e| CliError::Config(format!("{} is not a run directory: {e}", dir.display())))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| {
            p.file_name()
                .and_then(|n| n.to_str())
                .is_some_and(|n| n.starts_with("snap_") && n.ends_with(".bqp"))
        })
        .collect();
    v.sort();
    Ok(v)
}

pub fn load_run_config(dir: &Path) -> Result<Config, CliError> {
    let cfg = Config::load(&dir.join(CONFIG_FILE))?;
    cfg.validate_run()?;
    Ok(cfg)
}

pub fn read_snapshot(path: &Path) -> Result<Snapshot, CliError> {
    let bytes = fs::read(path).map_err(|e| CliError::runtime(format!("{}: {e}", path.display())))?;
    Ok(Snapshot::decode(&bytes)?)
}

pub fn field_index(cfg: &Config, f: SnapshotField) -> usize {
    cfg.outputs.fields.iter().position(|g| *g == f).expect("validated field list")
}

/// Recomputes `diagnostics.csv` of the run in `run_dir` from its stored
/// snapshots, steps and markers, writing it to `out_dir`.
pub fn cmd_analyze(run_dir: &Path, out_dir: &Path) -> Result<PathBuf, CliError> {
    let cfg = load_run_config(run_dir)?;
    let hash = cfg.hash();
    let eff = cfg.effective();
    let grid = Grid::new(cfg.grid.n, cfg.grid.length).map_err(|e| CliError::Config(e.to_string()))?;
    let bank = bank_for(&cfg, &grid)?;
    let mut recorder = Recorder::new(bank, cfg.striated_params()?, eff.nu);
    let energy = read_energy(run_dir)?;
    let markers = read_markers(run_dir)?;
    let snaps = list_snapshots(run_dir)?;
    if snaps.is_empty() {
        return Err(CliError::runtime("run directory has no snapshots"));
    }
    fs::create_dir_all(out_dir)?;
    let path = out_dir.join(DIAGNOSTICS_FILE);
    let mut w = BufWriter::new(File::create(&path)?);
    write_csv_header(&mut w)?;
    for (k, sp) in snaps.iter().enumerate() {
        let snap = read_snapshot(sp)?;
        let field = |f| snap.field(&grid, field_index(&cfg, f));
        let theta = field(SnapshotField::Theta)?;
        let omega = field(SnapshotField::Omega)?;
        let x = VectorField2::new(field(SnapshotField::X1)?, field(SnapshotField::X2)?)?;
        let upto = energy.iter().take_while(|e| e.t <= snap.t).count();
        if upto == 0 || energy[upto - 1].t != snap.t {
            return Err(CliError::runtime(format!("no energy sample at snapshot time {}", snap.t)));
        }
        let m = markers.get(&k).map(Vec::as_slice);
        let rec = recorder.record(snap.t, &theta, &omega, &x, m, &energy[..upto])?;
        write_csv_row(&mut w, &hash, &rec)?;
    }
    w.flush()?;
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn record_times_end_on_horizon() {
        assert_eq!(record_times(0.0, 0.1), vec![0.0]);
        let t = record_times(1.0, 0.25);
        assert_eq!(t, vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        let t = record_times(1.0, 0.3);
        assert_eq!(t.len(), 5);
        assert_eq!(*t.last().unwrap(), 1.0);
        let t = record_times(1.0, 0.1);
        assert_eq!(t.len(), 11);
    }
}
