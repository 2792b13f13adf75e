//! Run configuration.
//!
//! Files are TOML: `key = value` lines under `[section]` headers. Every
//! section is optional and falls back to the defaults below; unknown keys are
//! rejected.

use std::f64::consts::PI;
use std::path::Path;

use bqp_core::diagnostics::{EnsembleConfig, ProbeParams, StriatedParams, TdSweepConfig, VelocityFamily};
use bqp_core::lagrangian::MarkerScheme;
use bqp_core::solver::{Scheme, StepperConfig, ThetaAdvection, XAdvection};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Config {
    pub grid: GridSection,
    pub physics: PhysicsSection,
    pub scenario: ScenarioSection,
    pub stepper: StepperSection,
    pub outputs: OutputSection,
    pub seeds: SeedSection,
    pub probe: ProbeSection,
    pub transdiff: TransdiffSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridSection {
    pub n: usize,
    pub length: f64,
    /// Paraproduct lag `N0`.
    pub n0: i32,
    /// Oversampling of `L^∞` block norms.
    pub oversample: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PhysicsSection {
    pub nu: f64,
    pub m1: f64,
    pub m2: f64,
    pub eps: f64,
    pub q: f64,
    /// Run the equivalent problem with `ν = 1`.
    pub rescale: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScenarioSection {
    pub name: String,
    pub center: [f64; 2],
    pub radius: f64,
    /// Inner and outer radius of the annulus carrying the compensating vorticity.
    pub annulus: [f64; 2],
    pub markers: usize,
    /// Width of the saturation in the level-set function.
    pub levelset_width: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SchemeName {
    Ifrk2,
    Ifrk3,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ThetaMode {
    SemiLagrangian,
    Spectral,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum XMode {
    Spectral,
    SemiLagrangian,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MarkerMode {
    Rk2,
    Rk3,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct StepperSection {
    pub scheme: SchemeName,
    pub dt: f64,
    pub cfl: f64,
    pub t_final: f64,
    pub theta_advection: ThetaMode,
    pub x_advection: XMode,
    pub marker_scheme: MarkerMode,
    /// Buoyancy mollifier width in grid cells.
    pub mollifier_width: f64,
    pub conservative: bool,
    pub max_halvings: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SnapshotField {
    Theta,
    Omega,
    X1,
    X2,
    U1,
    U2,
    Levelset,
}

impl SnapshotField {
    pub fn name(self) -> &'static str {
        match self {
            SnapshotField::Theta => "theta",
            SnapshotField::Omega => "omega",
            SnapshotField::X1 => "x1",
            SnapshotField::X2 => "x2",
            SnapshotField::U1 => "u1",
            SnapshotField::U2 => "u2",
            SnapshotField::Levelset => "levelset",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSection {
    /// Time between records; diagnostics, markers and snapshots share it.
    pub record_every: f64,
    pub dir: String,
    pub fields: Vec<SnapshotField>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SeedSection {
    pub ensemble: u64,
    pub transdiff: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ProbeSection {
    pub n: usize,
    pub length: f64,
    pub size: usize,
    pub alpha: f64,
    pub kmax: i64,
    pub oversample: usize,
    /// Probes run by `probe --lemma all`.
    pub lemmas: Vec<String>,
    pub eps: Option<f64>,
    pub s: Option<f64>,
    pub p: Option<f64>,
    pub r: Option<f64>,
    pub p1: Option<f64>,
    pub p2: Option<f64>,
    pub q: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TransdiffSection {
    pub n: usize,
    pub length: f64,
    pub t_final: f64,
    pub dt: f64,
    pub amplitude: f64,
    pub p1: f64,
    pub nus: Vec<f64>,
    pub families: Vec<String>,
    pub s: Vec<f64>,
    pub p: Vec<f64>,
    pub r: Vec<f64>,
    pub rho: Vec<f64>,
    pub alpha: f64,
    pub kmax: i64,
}

impl Default for GridSection {
    fn default() -> Self {
        Self {
            n: 256,
            length: 2.0 * PI,
            n0: bqp_core::lp::DEFAULT_N0,
            oversample: 2,
        }
    }
}

impl Default for PhysicsSection {
    fn default() -> Self {
        Self {
            nu: 1.0,
            m1: 1.0,
            m2: 1.0,
            eps: 0.5,
            q: 1.3,
            rescale: false,
        }
    }
}

impl Default for ScenarioSection {
    fn default() -> Self {
        Self {
            name: "disc".into(),
            center: [PI, PI],
            radius: 0.5,
            annulus: [0.9, 1.4],
            markers: 512,
            levelset_width: 0.15,
        }
    }
}

impl Default for StepperSection {
    fn default() -> Self {
        let d = StepperConfig::default();
        Self {
            scheme: SchemeName::Ifrk2,
            dt: d.dt,
            cfl: d.cfl,
            t_final: 1.0,
            theta_advection: ThetaMode::SemiLagrangian,
            x_advection: XMode::Spectral,
            marker_scheme: MarkerMode::Rk3,
            mollifier_width: d.mollifier_width,
            conservative: false,
            max_halvings: d.max_halvings,
        }
    }
}

impl Default for OutputSection {
    fn default() -> Self {
        Self {
            record_every: 0.05,
            dir: "out".into(),
            fields: vec![SnapshotField::Theta, SnapshotField::Omega, SnapshotField::X1, SnapshotField::X2],
        }
    }
}

impl Default for SeedSection {
    fn default() -> Self {
        Self {
            ensemble: EnsembleConfig::default().seed,
            transdiff: TdSweepConfig::default().seed,
        }
    }
}

impl Default for ProbeSection {
    fn default() -> Self {
        let e = EnsembleConfig::default();
        Self {
            n: e.n,
            length: e.length,
            size: e.size,
            alpha: e.alpha,
            kmax: e.kmax,
            oversample: e.oversample,
            lemmas: ["lemma_A1", "lemma_A3", "prop_A5", "eq_1_5", "compat_omega", "compat_theta"]
                .map(String::from)
                .to_vec(),
            eps: None,
            s: None,
            p: None,
            r: None,
            p1: None,
            p2: None,
            q: None,
        }
    }
}

impl Default for TransdiffSection {
    fn default() -> Self {
        let d = TdSweepConfig::default();
        Self {
            n: d.n,
            length: d.length,
            t_final: d.t_final,
            dt: d.dt,
            amplitude: d.amplitude,
            p1: d.p1,
            nus: d.nus,
            families: d.families.iter().map(|f| f.name().to_string()).collect(),
            s: d.s,
            p: d.p,
            r: d.r,
            rho: d.rho,
            alpha: d.alpha,
            kmax: d.kmax,
        }
    }
}

impl Default for Config {
    fn default() -> Self {
        Self {
            grid: GridSection::default(),
            physics: PhysicsSection::default(),
            scenario: ScenarioSection::default(),
            stepper: StepperSection::default(),
            outputs: OutputSection::default(),
            seeds: SeedSection::default(),
            probe: ProbeSection::default(),
            transdiff: TransdiffSection::default(),
        }
    }
}

/// Physical parameters actually handed to the solver.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Effective {
    pub nu: f64,
    pub m1: f64,
    pub m2: f64,
    pub t_final: f64,
    pub dt: f64,
    pub record_every: f64,
}

impl Config {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let cfg: Config = toml::from_str(text).map_err(|e| CliError::Config(one_line(&e.to_string())))?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serialises")
    }

    /// First 16 hex digits of the SHA-256 of the canonical serialisation.
    pub fn hash(&self) -> String {
        let digest = Sha256::digest(self.to_toml().as_bytes());
        digest.iter().take(8).map(|b| format!("{b:02x}")).collect()
    }

    pub fn spacing(&self) -> f64 {
        self.grid.length / self.grid.n as f64
    }

    /// Checks the invariants needed by `run`.
    pub fn validate_run(&self) -> Result<(), CliError> {
        let bad = |m: String| Err(CliError::Config(m));
        let g = &self.grid;
        if g.n < 16 || !g.n.is_power_of_two() {
            return bad(format!("grid.n must be a power of two >= 16, got {}", g.n));
        }
        if !(g.length.is_finite() && g.length > 0.0) {
            return bad(format!("grid.length must be positive, got {}", g.length));
        }
        if g.n0 < 2 {
            return bad(format!("grid.n0 must be >= 2, got {}", g.n0));
        }
        if g.oversample < 1 {
            return bad("grid.oversample must be >= 1".into());
        }
        let ph = &self.physics;
        if !(ph.nu.is_finite() && ph.nu > 0.0) {
            return bad(format!("physics.nu must be positive, got {}", ph.nu));
        }
        if !(ph.m1.is_finite() && ph.m2.is_finite()) {
            return bad("physics.m1 and physics.m2 must be finite".into());
        }
        StriatedParams::new(ph.eps, ph.q).map_err(|e| CliError::Config(format!("physics: {e}")))?;
        let st = &self.stepper;
        if !(st.t_final.is_finite() && st.t_final >= 0.0) {
            return bad(format!("stepper.t_final must be >= 0, got {}", st.t_final));
        }
        if !(st.mollifier_width.is_finite() && st.mollifier_width >= 0.0) {
            return bad("stepper.mollifier_width must be >= 0".into());
        }
        self.stepper_config(1.0).validate().map_err(|e| CliError::Config(format!("stepper: {e}")))?;
        let o = &self.outputs;
        if !(o.record_every.is_finite() && o.record_every > 0.0) {
            return bad(format!("outputs.record_every must be positive, got {}", o.record_every));
        }
        for f in [SnapshotField::Theta, SnapshotField::Omega, SnapshotField::X1, SnapshotField::X2] {
            if !o.fields.contains(&f) {
                return bad(format!("outputs.fields must include {}", f.name()));
            }
        }
        for (i, f) in o.fields.iter().enumerate() {
            if o.fields[..i].contains(f) {
                return bad(format!("outputs.fields lists {} twice", f.name()));
            }
        }
        self.validate_geometry()
    }

    fn validate_geometry(&self) -> Result<(), CliError> {
        let bad = |m: String| Err(CliError::Config(m));
        let sc = &self.scenario;
        if sc.name != "disc" {
            return bad(format!("scenario.name '{}' is not supported (expected \"disc\")", sc.name));
        }
        let h = self.spacing();
        let l = self.grid.length;
        let [a, b] = sc.annulus;
        if !(sc.radius > 0.0 && a > 0.0 && b > a) {
            return bad("scenario needs radius > 0 and 0 < annulus[0] < annulus[1]".into());
        }
        if a - sc.radius < 4.0 * h {
            return bad(format!(
                "scenario: disc and annulus must be at least 4h = {} apart, gap is {}",
                4.0 * h,
                a - sc.radius
            ));
        }
        // Everything must sit inside the safe region [L/16, 15L/16]².
        let reach = b.max(sc.radius + 6.0 * sc.levelset_width);
        let (lo, hi) = (l / 16.0, 15.0 * l / 16.0);
        if sc.center.iter().any(|&c| c - reach < lo || c + reach > hi) {
            return bad(format!("scenario: geometry reaching radius {reach} does not fit inside [{lo}, {hi}]^2"));
        }
        if sc.markers < bqp_core::lagrangian::MIN_MARKERS {
            return bad(format!(
                "scenario.markers must be >= {}, got {}",
                bqp_core::lagrangian::MIN_MARKERS,
                sc.markers
            ));
        }
        if !(sc.levelset_width > 0.0) {
            return bad("scenario.levelset_width must be positive".into());
        }
        Ok(())
    }

    /// Parameters after the optional reduction to `ν = 1`:
    /// `θ̃(t) = ν⁻²θ(t/ν)`, `ũ(t) = ν⁻¹u(t/ν)`, so times scale by `ν`.
    pub fn effective(&self) -> Effective {
        let p = &self.physics;
        let s = &self.stepper;
        if p.rescale {
            let nu = p.nu;
            Effective {
                nu: 1.0,
                m1: p.m1 / (nu * nu),
                m2: p.m2 / nu,
                t_final: s.t_final * nu,
                dt: s.dt * nu,
                record_every: self.outputs.record_every * nu,
            }
        } else {
            Effective {
                nu: p.nu,
                m1: p.m1,
                m2: p.m2,
                t_final: s.t_final,
                dt: s.dt,
                record_every: self.outputs.record_every,
            }
        }
    }

    pub fn stepper_config(&self, dt: f64) -> StepperConfig {
        let s = &self.stepper;
        StepperConfig {
            dt,
            cfl: s.cfl,
            scheme: match s.scheme {
                SchemeName::Ifrk2 => Scheme::Ifrk2,
                SchemeName::Ifrk3 => Scheme::Ifrk3,
            },
            theta_advection: match s.theta_advection {
                ThetaMode::SemiLagrangian => ThetaAdvection::SemiLagrangian,
                ThetaMode::Spectral => ThetaAdvection::Spectral,
            },
            x_advection: match s.x_advection {
                XMode::Spectral => XAdvection::Spectral,
                XMode::SemiLagrangian => XAdvection::SemiLagrangian,
            },
            marker_scheme: match s.marker_scheme {
                MarkerMode::Rk2 => MarkerScheme::Rk2,
                MarkerMode::Rk3 => MarkerScheme::Rk3,
            },
            mollifier_width: s.mollifier_width,
            conservative: s.conservative,
            linearized: false,
            max_halvings: s.max_halvings,
        }
    }

    pub fn striated_params(&self) -> Result<StriatedParams, CliError> {
        StriatedParams::new(self.physics.eps, self.physics.q).map_err(|e| CliError::Config(format!("physics: {e}")))
    }

    /// Ensemble for probe `id`; `size` and `seed` override the file.
    pub fn ensemble(&self, id: bqp_core::diagnostics::ProbeId, size: Option<usize>, seed: Option<u64>) -> Result<EnsembleConfig, CliError> {
        let p = &self.probe;
        let mut pp = ProbeParams::defaults(id);
        let over = |slot: &mut f64, v: Option<f64>| {
            if let Some(v) = v {
                *slot = v;
            }
        };
        over(&mut pp.eps, p.eps);
        over(&mut pp.s, p.s);
        over(&mut pp.p, p.p);
        over(&mut pp.r, p.r);
        over(&mut pp.p1, p.p1);
        over(&mut pp.p2, p.p2);
        over(&mut pp.q, p.q);
        pp.validate(id).map_err(|e| CliError::Config(format!("probe {id}: {e}")))?;
        let cfg = EnsembleConfig {
            seed: seed.unwrap_or(self.seeds.ensemble),
            size: size.unwrap_or(p.size),
            n: p.n,
            length: p.length,
            alpha: p.alpha,
            kmax: p.kmax,
            oversample: p.oversample,
            params: Some(pp),
        };
        if cfg.size < bqp_core::diagnostics::MIN_ENSEMBLE {
            return Err(CliError::Config(format!(
                "probe ensemble size must be >= {}, got {}",
                bqp_core::diagnostics::MIN_ENSEMBLE,
                cfg.size
            )));
        }
        Ok(cfg)
    }

    pub fn sweep(&self, seed: Option<u64>) -> Result<TdSweepConfig, CliError> {
        let t = &self.transdiff;
        let families = t
            .families
            .iter()
            .map(|f| f.parse::<VelocityFamily>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| CliError::Config(format!("transdiff.families: {e}")))?;
        Ok(TdSweepConfig {
            n: t.n,
            length: t.length,
            t_final: t.t_final,
            dt: t.dt,
            amplitude: t.amplitude,
            p1: t.p1,
            nus: t.nus.clone(),
            families,
            s: t.s.clone(),
            p: t.p.clone(),
            r: t.r.clone(),
            rho: t.rho.clone(),
            seed: seed.unwrap_or(self.seeds.transdiff),
            alpha: t.alpha,
            kmax: t.kmax,
        })
    }
}

fn one_line(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_round_trip() {
        let c = Config::default();
        let back = Config::parse(&c.to_toml()).unwrap();
        assert_eq!(c, back);
        assert_eq!(c.hash(), back.hash());
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let e = Config::parse("[grid]\nn = 64\nbogus = 1\n").unwrap_err();
        assert!(matches!(e, CliError::Config(_)));
        assert!(!e.to_string().contains('\n'));
        assert!(Config::parse("[nonsense]\n").is_err());
    }

    #[test]
    fn partial_file_uses_defaults() {
        let c = Config::parse("[grid]\nn = 64\n[physics]\nnu = 0.5\n").unwrap();
        assert_eq!(c.grid.n, 64);
        assert_eq!(c.physics.nu, 0.5);
        assert_eq!(c.scenario, ScenarioSection::default());
    }

    #[test]
    fn infinite_exponents_survive() {
        let mut c = Config::default();
        c.probe.p1 = Some(f64::INFINITY);
        let back = Config::parse(&c.to_toml()).unwrap();
        assert_eq!(back.probe.p1, Some(f64::INFINITY));
        assert_eq!(back.transdiff.p, c.transdiff.p);
    }

    #[test]
    fn disjointness_is_enforced() {
        let mut c = Config::default();
        c.validate_run().unwrap();
        let h = c.spacing();
        c.scenario.annulus[0] = c.scenario.radius + 3.0 * h;
        let e = c.validate_run().unwrap_err();
        assert!(e.to_string().contains("4h"), "{e}");
    }

    #[test]
    fn striated_condition_is_enforced() {
        let mut c = Config::default();
        c.physics.q = 2.0;
        assert!(c.validate_run().unwrap_err().to_string().contains("eps/2 + 1/q > 1"));
    }

    #[test]
    fn rescaling_maps_to_unit_viscosity() {
        let mut c = Config::default();
        c.physics.nu = 0.5;
        c.physics.rescale = true;
        let e = c.effective();
        assert_eq!((e.nu, e.m1, e.m2, e.t_final), (1.0, 4.0, 2.0, 0.5));
    }
}
