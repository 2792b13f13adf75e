//! Bound ratios for the transport-diffusion estimates, swept over exponents
//! and prescribed velocity families.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use super::ensemble::random_field;
use crate::error::{argument, Error, Result};
use crate::lp::{besov_norm, BesovSpec, DyadicFilterBank, TimeNormAccumulator, DEFAULT_N0};
use crate::solver::{solve_transport_diffusion_observed, Scheme, TdOptions};
use crate::spectral::{gradient, Grid, GridRef, ScalarField, VectorField2};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum VelocityFamily {
    Still,
    /// Localized differential rotation `∇^⊥(Aσ² e^{-|x-c|²/2σ²})`, `σ = L/8`.
    Vortex,
    /// Steady shear `(A e^{2(cos(2πy/L) - 1)}, 0)`.
    Shear,
    /// Alternating sine shears with period one in time.
    Mixer,
}

impl VelocityFamily {
    pub fn name(self) -> &'static str {
        match self {
            VelocityFamily::Still => "still",
            VelocityFamily::Vortex => "vortex",
            VelocityFamily::Shear => "shear",
            VelocityFamily::Mixer => "mixer",
        }
    }

    pub fn is_steady(self) -> bool {
        !matches!(self, VelocityFamily::Mixer)
    }

    /// Velocity sampler on `grid` with amplitude `a`.
    pub fn velocity(self, grid: &GridRef, a: f64) -> Arc<dyn Fn(f64) -> VectorField2 + Send + Sync> {
        let l = grid.length();
        let k = 2.0 * std::f64::consts::PI / l;
        match self {
            VelocityFamily::Still => {
                let z = VectorField2::zeros(grid);
                Arc::new(move |_| z.clone())
            }
            VelocityFamily::Vortex => {
                let c = 0.5 * l;
                let sig = l / 8.0;
                let psi = ScalarField::from_fn(grid, |x, y| {
                    a * sig * sig * (-((x - c).powi(2) + (y - c).powi(2)) / (2.0 * sig * sig)).exp()
                });
                let g = gradient(&psi);
                let v = VectorField2 { x: g.y.scaled(-1.0), y: g.x };
                Arc::new(move |_| v.clone())
            }
            VelocityFamily::Shear => {
                let v = VectorField2::from_fn(grid, |_, y| [a * (2.0 * ((k * y).cos() - 1.0)).exp(), 0.0]);
                Arc::new(move |_| v.clone())
            }
            VelocityFamily::Mixer => {
                let h = VectorField2::from_fn(grid, |_, y| [(k * y).sin(), 0.0]);
                let w = VectorField2::from_fn(grid, |x, _| [0.0, (k * x).sin()]);
                Arc::new(move |t: f64| {
                    let c = (std::f64::consts::PI * t).cos().powi(2);
                    h.scaled(a * c).add(&w.scaled(a * (1.0 - c)))
                })
            }
        }
    }
}

impl fmt::Display for VelocityFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for VelocityFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        [VelocityFamily::Still, VelocityFamily::Vortex, VelocityFamily::Shear, VelocityFamily::Mixer]
            .into_iter()
            .find(|v| v.name() == s)
            .ok_or_else(|| Error::Argument(format!("unknown velocity family '{s}'")))
    }
}

/// Which estimate a row evaluates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TdBound {
    /// `ν^{1/ρ}‖f‖_{L̃^ρ_t(B^{s+2/ρ}_{p,r})}` against
    /// `e^{(1+νt)^{1/ρ}V_{p₁}(t)}(1+νt)^{1/ρ}‖f₀‖_{B^s_{p,r}}`.
    Smoothing,
    /// `‖f‖_{L̃^∞_t(B⁰_{p,r})}` against `‖f₀‖_{B⁰_{p,r}}(1 + ∫‖∇v‖_{L^∞})`.
    Transport,
}

/// Checks `-1 - min(2/p₁, 2/p') < s < 1 + min(2/p, 2/p₁)` and `ρ₁ ≤ ρ`.
pub fn check_admissible(s: f64, p: f64, p1: f64, rho: f64, rho1: f64) -> Result<()> {
    for (name, v) in [("p", p), ("p1", p1), ("rho", rho), ("rho1", rho1)] {
        if !(v >= 1.0) {
            return argument(format!("exponent {name} must lie in [1, inf], got {v}"));
        }
    }
    let p_conj = if p == 1.0 { f64::INFINITY } else if p.is_infinite() { 1.0 } else { p / (p - 1.0) };
    let lo = -1.0 - (2.0 / p1).min(2.0 / p_conj);
    let hi = 1.0 + (2.0 / p).min(2.0 / p1);
    if !(s > lo && s < hi) {
        return argument(format!("inadmissible exponents: need {lo} < s < {hi}, got s = {s}"));
    }
    if !(rho1 <= rho) {
        return argument(format!("inadmissible exponents: need rho1 <= rho, got {rho1} > {rho}"));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct TdSweepConfig {
    pub n: usize,
    pub length: f64,
    pub t_final: f64,
    pub dt: f64,
    pub amplitude: f64,
    pub p1: f64,
    pub nus: Vec<f64>,
    pub families: Vec<VelocityFamily>,
    pub s: Vec<f64>,
    pub p: Vec<f64>,
    pub r: Vec<f64>,
    pub rho: Vec<f64>,
    pub seed: u64,
    /// Envelope of the random initial datum and its largest mode.
    pub alpha: f64,
    pub kmax: i64,
}

impl Default for TdSweepConfig {
    fn default() -> Self {
        Self {
            n: 64,
            length: 2.0 * std::f64::consts::PI,
            t_final: 1.0,
            dt: 5e-3,
            amplitude: 1.0,
            p1: f64::INFINITY,
            nus: vec![0.0, 0.1, 1.0],
            families: vec![VelocityFamily::Vortex, VelocityFamily::Shear, VelocityFamily::Mixer],
            s: vec![-0.5, 0.0, 0.5],
            p: vec![2.0, f64::INFINITY],
            r: vec![1.0, 2.0, f64::INFINITY],
            rho: vec![1.0, 2.0, f64::INFINITY],
            seed: 7,
            alpha: 3.0,
            kmax: 8,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TdRow {
    pub family: VelocityFamily,
    pub nu: f64,
    pub bound: TdBound,
    pub s: f64,
    pub p: f64,
    pub r: f64,
    pub rho: f64,
    /// Sides at `n` and `2n`.
    pub lhs: [f64; 2],
    pub rhs: [f64; 2],
}

impl TdRow {
    pub fn ratio(&self, level: usize) -> f64 {
        self.lhs[level] / self.rhs[level]
    }

    pub fn growth(&self) -> f64 {
        self.ratio(1) / self.ratio(0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TdReport {
    pub resolutions: [usize; 2],
    pub rows: Vec<TdRow>,
    pub max_ratio: [f64; 2],
    /// Largest per-row growth of the ratio under resolution doubling.
    pub growth: f64,
}

struct Target {
    bound: TdBound,
    s: f64,
    p: f64,
    r: f64,
    rho: f64,
}

/// Exponent rows for one viscosity.
fn targets(cfg: &TdSweepConfig, nu: f64) -> Result<Vec<Target>> {
    let mut out = Vec::new();
    if nu == 0.0 {
        for &p in &cfg.p {
            for &r in &cfg.r {
                check_admissible(0.0, p, cfg.p1, f64::INFINITY, 1.0)?;
                out.push(Target { bound: TdBound::Transport, s: 0.0, p, r, rho: f64::INFINITY });
            }
        }
        return Ok(out);
    }
    for &s in &cfg.s {
        for &p in &cfg.p {
            for &r in &cfg.r {
                for &rho in &cfg.rho {
                    check_admissible(s, p, cfg.p1, rho, 1.0)?;
                    out.push(Target { bound: TdBound::Smoothing, s, p, r, rho });
                }
            }
        }
    }
    Ok(out)
}

fn grad_entries(v: &VectorField2) -> [ScalarField; 4] {
    let a = gradient(&v.x);
    let b = gradient(&v.y);
    [a.x, a.y, b.x, b.y]
}

/// `(‖∇v‖_{B^{2/p₁}_{p₁,∞}} + ‖∇v‖_{L^∞}, ‖∇v‖_{L^∞})`, largest entry each.
fn velocity_norms(bank: &DyadicFilterBank, v: &VectorField2, p1: f64) -> Result<(f64, f64)> {
    let mut b: f64 = 0.0;
    let mut inf: f64 = 0.0;
    for g in grad_entries(v) {
        b = b.max(besov_norm(bank, &g, BesovSpec::new(2.0 / p1, p1, f64::INFINITY)?)?);
        inf = inf.max(g.max_abs());
    }
    Ok((b + inf, inf))
}

/// Both sides for each target at one resolution.
fn run_one(
    grid: &GridRef,
    cfg: &TdSweepConfig,
    family: VelocityFamily,
    nu: f64,
    targets: &[Target],
) -> Result<Vec<(f64, f64)>> {
    let bank = DyadicFilterBank::with_options(grid, DEFAULT_N0, 1)?;
    let f0 = random_field(grid, cfg.seed, 0, cfg.alpha, cfg.kmax);
    let vel = family.velocity(grid, cfg.amplitude);
    let mut accs: Vec<TimeNormAccumulator> = targets
        .iter()
        .map(|t| {
            let shift = if t.rho.is_infinite() { 0.0 } else { 2.0 / t.rho };
            TimeNormAccumulator::new(BesovSpec::new(t.s + shift, t.p, t.r)?, t.rho)
        })
        .collect::<Result<_>>()?;
    let mut ps: Vec<f64> = targets.iter().map(|t| t.p).collect();
    ps.sort_by(f64::total_cmp);
    ps.dedup();

    let steady = if family.is_steady() { Some(velocity_norms(&bank, &vel(0.0), cfg.p1)?) } else { None };
    let mut v_int = (0.0, 0.0);
    let mut last_v: Option<(f64, (f64, f64))> = None;
    let mut err: Option<Error> = None;
    let mut observe = |t: f64, f: &ScalarField| {
        if err.is_some() {
            return;
        }
        let mut step = || -> Result<()> {
            let blocks: Vec<Vec<f64>> = ps.iter().map(|&p| bank.block_norms(f, p)).collect::<Result<_>>()?;
            for (acc, tg) in accs.iter_mut().zip(targets) {
                let i = ps.iter().position(|&p| p == tg.p).expect("listed");
                acc.push(t, &blocks[i])?;
            }
            let vn = match steady {
                Some(v) => v,
                None => velocity_norms(&bank, &vel(t), cfg.p1)?,
            };
            if let Some((t0, v0)) = last_v {
                let h = 0.5 * (t - t0);
                v_int.0 += h * (v0.0 + vn.0);
                v_int.1 += h * (v0.1 + vn.1);
            }
            last_v = Some((t, vn));
            Ok(())
        };
        if let Err(e) = step() {
            err = Some(e);
        }
    };
    let opts = TdOptions { dt: cfg.dt, scheme: Scheme::Ifrk3, div_tolerance: 1e-8 };
    let v_ref: &(dyn Fn(f64) -> VectorField2 + Sync) = &*vel;
    let v_opt = (family != VelocityFamily::Still).then_some(v_ref);
    solve_transport_diffusion_observed(&f0, v_opt, None, nu, cfg.t_final, &opts, &[], &mut observe)?;
    if let Some(e) = err {
        return Err(e);
    }
    let t = cfg.t_final;
    targets
        .iter()
        .zip(&accs)
        .map(|(tg, acc)| {
            let f0_norm = besov_norm(&bank, &f0, BesovSpec::new(tg.s, tg.p, tg.r)?)?;
            Ok(match tg.bound {
                TdBound::Smoothing => {
                    let inv = if tg.rho.is_infinite() { 0.0 } else { 1.0 / tg.rho };
                    let growth = (1.0 + nu * t).powf(inv);
                    (nu.powf(inv) * acc.tilde(), (growth * v_int.0).exp() * growth * f0_norm)
                }
                TdBound::Transport => (acc.tilde(), f0_norm * (1.0 + v_int.1)),
            })
        })
        .collect()
}

/// Runs the sweep at `cfg.n` and `2·cfg.n`.
pub fn trans_diff_bound_probe(cfg: &TdSweepConfig) -> Result<TdReport> {
    if cfg.nus.iter().any(|&nu| !(nu >= 0.0 && nu.is_finite())) {
        return argument("viscosities must be finite and >= 0");
    }
    let resolutions = [cfg.n, 2 * cfg.n];
    let grids = [Grid::new(resolutions[0], cfg.length)?, Grid::new(resolutions[1], cfg.length)?];
    let mut rows = Vec::new();
    for &family in &cfg.families {
        for &nu in &cfg.nus {
            let tg = targets(cfg, nu)?;
            let a = run_one(&grids[0], cfg, family, nu, &tg)?;
            let b = run_one(&grids[1], cfg, family, nu, &tg)?;
            for ((t, x), y) in tg.iter().zip(a).zip(b) {
                rows.push(TdRow {
                    family,
                    nu,
                    bound: t.bound,
                    s: t.s,
                    p: t.p,
                    r: t.r,
                    rho: t.rho,
                    lhs: [x.0, y.0],
                    rhs: [x.1, y.1],
                });
            }
        }
    }
    let max_ratio = [0, 1].map(|l| rows.iter().map(|r| r.ratio(l)).fold(0.0, f64::max));
    let growth = rows.iter().map(TdRow::growth).fold(0.0, f64::max);
    Ok(TdReport { resolutions, rows, max_ratio, growth })
}

pub fn write_td_csv(mut w: impl std::io::Write, config_hash: &str, rep: &TdReport) -> Result<()> {
    use super::record::format_float as f;
    writeln!(w, "config_hash,family,nu,bound,s,p,r,rho,lhs,rhs,ratio,lhs_2n,rhs_2n,ratio_2n,growth")?;
    for r in &rep.rows {
        let bound = match r.bound {
            TdBound::Smoothing => "smoothing",
            TdBound::Transport => "transport",
        };
        writeln!(
            w,
            "{config_hash},{},{},{bound},{},{},{},{},{},{},{},{},{},{},{}",
            r.family,
            f(r.nu),
            f(r.s),
            f(r.p),
            f(r.r),
            f(r.rho),
            f(r.lhs[0]),
            f(r.rhs[0]),
            f(r.ratio(0)),
            f(r.lhs[1]),
            f(r.rhs[1]),
            f(r.ratio(1)),
            f(r.growth())
        )?;
    }
    writeln!(
        w,
        "{config_hash},summary,,,,,,,,,{},,,{},{}",
        f(rep.max_ratio[0]),
        f(rep.max_ratio[1]),
        f(rep.growth)
    )?;
    Ok(())
}
