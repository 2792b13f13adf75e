//! Fixed-seed ensemble probes of commutator and product estimates.
//!
//! Each probe draws random fields, evaluates both sides of an inequality with
//! constant one and records their ratio. The same ensemble is then evaluated on
//! a grid twice as fine; the growth of the largest ratio measures whether the
//! implicit constant depends on the cutoff.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use super::ensemble::{random_field, random_solenoidal_field, random_vector_field};
use super::striated::{directional_derivative_vec, directional_derivative_weak, div_product};
use crate::error::{argument, Error, Result};
use crate::lp::{besov_norm, besov_norm_vec, para_vector_field, paraproduct, BesovSpec, DyadicFilterBank, DEFAULT_N0};
use crate::spectral::{
    biot_savart, divergence, gradient, multiplier, product, Grid, GridRef, ScalarField, VectorField2,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ProbeId {
    /// `‖[T_g, |D|]u‖_{B^{s-1+ε}_{p,r}} ≤ C‖∇g‖_{B^{ε-1}_{p₁,∞}}‖u‖_{B^s_{p₂,r}}`
    Commutator,
    /// `‖𝒯_X f - ∂_X f‖_{𝒞^{s+ε-2/p-1}} ≤ C‖X‖_{𝒞^ε}‖∇f‖_{B^{s-1}_{p,r}}`
    ParaVector,
    /// `‖[𝒯_X, ∂_t + v·∇]v‖_{𝒞^{ε-2}}` against its three-term bound, with
    /// `∂_t X = ∂_X v - v·∇X`.
    TransportCommutator,
    /// `‖∂_X u‖_{𝒞^ε} ≤ C(‖∇u‖_{L^∞}‖X‖_{𝒞^ε} + ‖div(Xω)‖_{𝒞^{ε-1}})`
    StriatedVelocity,
    /// `‖div(Xω)‖_{𝒞^{-3}} ≤ C‖X‖_{𝒞^ε}‖ω‖_{B^{2/q-2}_{q,1}}`
    CompatVorticity,
    /// `‖∂_Xθ‖_{𝒞^{-2}} ≤ C‖X‖_{𝒞^ε}‖θ‖_{B^{2/q-1}_{q,1}}`
    CompatTemperature,
}

impl ProbeId {
    pub const ALL: [ProbeId; 6] = [
        ProbeId::Commutator,
        ProbeId::ParaVector,
        ProbeId::TransportCommutator,
        ProbeId::StriatedVelocity,
        ProbeId::CompatVorticity,
        ProbeId::CompatTemperature,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ProbeId::Commutator => "commutator",
            ProbeId::ParaVector => "para_vector",
            ProbeId::TransportCommutator => "transport_commutator",
            ProbeId::StriatedVelocity => "striated_velocity",
            ProbeId::CompatVorticity => "compat_vorticity",
            ProbeId::CompatTemperature => "compat_temperature",
        }
    }

    fn aliases(self) -> &'static [&'static str] {
        match self {
            ProbeId::Commutator => &["lemma_A1", "A1"],
            ProbeId::ParaVector => &["lemma_A3", "A3"],
            ProbeId::TransportCommutator => &["prop_A5", "lemma_A5", "A5"],
            ProbeId::StriatedVelocity => &["eq_1_5", "1.5"],
            ProbeId::CompatVorticity => &["compat_omega"],
            ProbeId::CompatTemperature => &["compat_theta"],
        }
    }
}

impl fmt::Display for ProbeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ProbeId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ProbeId::ALL
            .into_iter()
            .find(|id| id.name().eq_ignore_ascii_case(s) || id.aliases().iter().any(|a| a.eq_ignore_ascii_case(s)))
            .ok_or_else(|| Error::Argument(format!("unknown probe id '{s}'")))
    }
}

/// Exponents of a probe; unused entries are ignored by the probe.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbeParams {
    pub eps: f64,
    pub s: f64,
    pub p: f64,
    pub r: f64,
    pub p1: f64,
    pub p2: f64,
    pub q: f64,
}

impl ProbeParams {
    pub fn defaults(id: ProbeId) -> Self {
        let base = Self {
            eps: 0.5,
            s: 0.5,
            p: 2.0,
            r: 2.0,
            p1: f64::INFINITY,
            p2: 2.0,
            q: 1.3,
        };
        match id {
            ProbeId::ParaVector => Self { s: 1.0, ..base },
            _ => base,
        }
    }

    /// Checks the hypotheses of the estimate behind `id`.
    pub fn validate(&self, id: ProbeId) -> Result<()> {
        let &Self { eps, s, p, r, p1, p2, q } = self;
        if !(eps > 0.0 && eps < 1.0) {
            return argument(format!("{id}: condition 0 < eps < 1 violated (eps = {eps})"));
        }
        for (name, v) in [("p", p), ("r", r), ("p1", p1), ("p2", p2)] {
            if !(v >= 1.0) {
                return argument(format!("{id}: condition {name} in [1, inf] violated ({name} = {v})"));
            }
        }
        match id {
            ProbeId::Commutator => {
                if ((1.0 / p) - (1.0 / p1 + 1.0 / p2)).abs() > 1e-12 {
                    return argument(format!("{id}: condition 1/p = 1/p1 + 1/p2 violated"));
                }
            }
            ProbeId::ParaVector => {
                if !(s < 1.0 + 2.0 / p) {
                    return argument(format!("{id}: condition s < 1 + 2/p violated (s = {s})"));
                }
                if !(s + eps > 1.0 || (s + eps == 1.0 && r == 1.0)) {
                    return argument(format!("{id}: condition s + eps > 1 (or = 1 with r = 1) violated"));
                }
            }
            ProbeId::TransportCommutator => {
                if !(2.0 / p + eps >= 1.0) {
                    return argument(format!("{id}: condition 2/p + eps >= 1 violated"));
                }
            }
            ProbeId::StriatedVelocity => {}
            ProbeId::CompatVorticity | ProbeId::CompatTemperature => {
                super::striated::StriatedParams::new(eps, q).map_err(|e| Error::Argument(format!("{id}: {e}")))?;
            }
        }
        Ok(())
    }
}

/// Ensemble definition shared by all probes.
#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleConfig {
    pub seed: u64,
    pub size: usize,
    /// Base resolution; the probe also runs at `2n`.
    pub n: usize,
    pub length: f64,
    /// Decay exponent of the coefficient envelope `|k|^{-alpha}`.
    pub alpha: f64,
    /// Largest integer mode of the random fields.
    pub kmax: i64,
    pub oversample: usize,
    pub params: Option<ProbeParams>,
}

impl Default for EnsembleConfig {
    fn default() -> Self {
        Self {
            seed: 20240601,
            size: 64,
            n: 128,
            length: 2.0 * std::f64::consts::PI,
            alpha: 2.5,
            kmax: 84,
            oversample: 2,
            params: None,
        }
    }
}

pub const MIN_ENSEMBLE: usize = 32;

/// One side-by-side evaluation of an inequality.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Evaluation {
    pub lhs: f64,
    pub rhs: f64,
}

impl Evaluation {
    pub fn ratio(&self) -> Option<f64> {
        (self.rhs > 0.0).then(|| self.lhs / self.rhs)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProbeRow {
    pub index: usize,
    /// Evaluations at `n` and `2n`.
    pub eval: [Evaluation; 2],
    pub note: Option<String>,
}

impl ProbeRow {
    pub fn ratio(&self, level: usize) -> Option<f64> {
        if self.note.is_some() {
            None
        } else {
            self.eval[level].ratio()
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProbeReport {
    pub id: ProbeId,
    pub ensemble_size: usize,
    pub resolutions: [usize; 2],
    pub rows: Vec<ProbeRow>,
    pub max_ratio: [f64; 2],
    /// `(percentile, ratio)` at the base resolution.
    pub percentiles: Vec<(f64, f64)>,
    /// `max_ratio[1] / max_ratio[0]`
    pub growth: f64,
}

impl ProbeReport {
    pub fn degenerate(&self) -> usize {
        self.rows.iter().filter(|r| r.note.is_some()).count()
    }

    pub fn all_finite(&self) -> bool {
        self.rows
            .iter()
            .all(|r| r.note.is_some() || (0..2).all(|l| r.ratio(l).is_some_and(f64::is_finite)))
            && self.max_ratio.iter().all(|m| m.is_finite())
    }
}

/// Nearest-rank percentile of sorted data.
pub fn percentile(sorted: &[f64], pct: f64) -> f64 {
    if sorted.is_empty() {
        return f64::NAN;
    }
    let rank = ((pct / 100.0) * sorted.len() as f64).ceil().max(1.0) as usize;
    sorted[rank.min(sorted.len()) - 1]
}

fn vec_besov(bank: &DyadicFilterBank, fields: &[&ScalarField], spec: BesovSpec) -> Result<f64> {
    let mut m: f64 = 0.0;
    for f in fields {
        m = m.max(besov_norm(bank, f, spec)?);
    }
    Ok(m)
}

/// `[T_g, |D|]u = T_g(|D|u) - |D|(T_g u)`.
pub fn commutator_sample(bank: &DyadicFilterBank, pp: &ProbeParams, g: &ScalarField, u: &ScalarField) -> Result<(Evaluation, Option<String>)> {
    let abs_d = |f: &ScalarField| multiplier(f, f64::sqrt);
    let c = paraproduct(bank, g, &abs_d(u))?.sub(&abs_d(&paraproduct(bank, g, u)?));
    let lhs = besov_norm(bank, &c, BesovSpec::new(pp.s - 1.0 + pp.eps, pp.p, pp.r)?)?;
    let dg = gradient(g);
    let dg_norm = besov_norm_vec(bank, &dg, BesovSpec::new(pp.eps - 1.0, pp.p1, f64::INFINITY)?)?;
    if dg_norm == 0.0 {
        return Ok((Evaluation { lhs, rhs: 0.0 }, Some("degenerate: grad g = 0".into())));
    }
    let rhs = dg_norm * besov_norm(bank, u, BesovSpec::new(pp.s, pp.p2, pp.r)?)?;
    Ok((Evaluation { lhs, rhs }, None))
}

/// `𝒯_X f - ∂_X f` against `‖X‖_{𝒞^ε}‖∇f‖_{B^{s-1}_{p,r}}`.
pub fn para_vector_sample(bank: &DyadicFilterBank, pp: &ProbeParams, x: &VectorField2, f: &ScalarField) -> Result<Evaluation> {
    let gf = gradient(f);
    let strong = product(&x.x, &gf.x).add(&product(&x.y, &gf.y));
    let d = para_vector_field(bank, x, f)?.sub(&strong);
    let lhs = besov_norm(bank, &d, BesovSpec::holder(pp.s + pp.eps - 2.0 / pp.p - 1.0))?;
    let rhs = besov_norm_vec(bank, x, BesovSpec::holder(pp.eps))? * besov_norm_vec(bank, &gf, BesovSpec::new(pp.s - 1.0, pp.p, pp.r)?)?;
    Ok(Evaluation { lhs, rhs })
}

fn para_vec(bank: &DyadicFilterBank, x: &VectorField2, v: &VectorField2) -> Result<VectorField2> {
    Ok(VectorField2 {
        x: para_vector_field(bank, x, &v.x)?,
        y: para_vector_field(bank, x, &v.y)?,
    })
}

/// `[𝒯_X, ∂_t + v·∇]v = -T_{∂_t X^k}∂_k v + 𝒯_X(v·∇v) - v·∇(𝒯_X v)`.
pub fn transport_commutator_sample(bank: &DyadicFilterBank, pp: &ProbeParams, x: &VectorField2, v: &VectorField2) -> Result<Evaluation> {
    let dxv = directional_derivative_vec(x, v);
    let vgx = directional_derivative_vec(v, x);
    let dt_x = dxv.sub(&vgx);
    let vgv = directional_derivative_vec(v, v);
    let txv = para_vec(bank, x, v)?;
    let v_txv = directional_derivative_vec(v, &txv);
    let tx_vgv = para_vec(bank, x, &vgv)?;
    let mut comps = Vec::with_capacity(2);
    for (i, vi) in v.components().into_iter().enumerate() {
        let lead = para_vector_field(bank, &dt_x, vi)?;
        let c = tx_vgv.components()[i].sub(v_txv.components()[i]).sub(&lead);
        comps.push(c);
    }
    let lhs = vec_besov(bank, &[&comps[0], &comps[1]], BesovSpec::holder(pp.eps - 2.0))?;
    let two_p = 2.0 / pp.p;
    let x_tilde = besov_norm_vec(bank, x, BesovSpec::holder(pp.eps))?
        + besov_norm(bank, &divergence(x), BesovSpec::holder(pp.eps))?;
    let v_hi = besov_norm_vec(bank, v, BesovSpec::new(two_p + 1.0, pp.p, 1.0)?)?;
    let v_lo = besov_norm_vec(bank, v, BesovSpec::new(two_p - 1.0, pp.p, 1.0)?)?;
    let v_m1 = besov_norm_vec(bank, v, BesovSpec::holder(-1.0))?;
    let t_eps = besov_norm_vec(bank, &txv, BesovSpec::holder(pp.eps))?;
    let t_eps2 = besov_norm_vec(bank, &txv, BesovSpec::holder(pp.eps - 2.0))?;
    let rhs = x_tilde * v_hi * v_lo + v_m1 * t_eps + v_hi * t_eps2;
    Ok(Evaluation { lhs, rhs })
}

pub fn striated_velocity_sample(bank: &DyadicFilterBank, pp: &ProbeParams, x: &VectorField2, omega: &ScalarField) -> Result<Evaluation> {
    let u = biot_savart(omega);
    let dxu = directional_derivative_vec(x, &u);
    let lhs = besov_norm_vec(bank, &dxu, BesovSpec::holder(pp.eps))?;
    let gu = [gradient(&u.x), gradient(&u.y)];
    let gu_inf = [&gu[0].x, &gu[0].y, &gu[1].x, &gu[1].y].iter().map(|f| f.max_abs()).fold(0.0, f64::max);
    let xo = div_product(x, omega);
    let rhs = gu_inf * besov_norm_vec(bank, x, BesovSpec::holder(pp.eps))?
        + besov_norm(bank, &xo, BesovSpec::holder(pp.eps - 1.0))?;
    Ok(Evaluation { lhs, rhs })
}

pub fn compat_vorticity_sample(bank: &DyadicFilterBank, pp: &ProbeParams, x: &VectorField2, omega: &ScalarField) -> Result<Evaluation> {
    let lhs = besov_norm(bank, &div_product(x, omega), BesovSpec::holder(-3.0))?;
    let q = pp.q;
    let rhs = besov_norm_vec(bank, x, BesovSpec::holder(pp.eps))? * besov_norm(bank, omega, BesovSpec::new(2.0 / q - 2.0, q, 1.0)?)?;
    Ok(Evaluation { lhs, rhs })
}

pub fn compat_temperature_sample(bank: &DyadicFilterBank, pp: &ProbeParams, x: &VectorField2, theta: &ScalarField) -> Result<Evaluation> {
    let lhs = besov_norm(bank, &directional_derivative_weak(x, theta), BesovSpec::holder(-2.0))?;
    let q = pp.q;
    let rhs = besov_norm_vec(bank, x, BesovSpec::holder(pp.eps))? * besov_norm(bank, theta, BesovSpec::new(2.0 / q - 1.0, q, 1.0)?)?;
    Ok(Evaluation { lhs, rhs })
}

fn evaluate(id: ProbeId, cfg: &EnsembleConfig, pp: &ProbeParams, grid: &GridRef, bank: &DyadicFilterBank, index: usize) -> Result<(Evaluation, Option<String>)> {
    let seed = cfg.seed;
    let a = cfg.alpha;
    let k = cfg.kmax;
    let stream = 8 * index as u64;
    let ok = |e: Evaluation| (e, None);
    Ok(match id {
        ProbeId::Commutator => {
            let g = random_field(grid, seed, stream, a + 0.5, k);
            let u = random_field(grid, seed, stream + 1, a, k);
            commutator_sample(bank, pp, &g, &u)?
        }
        ProbeId::ParaVector => {
            let x = random_vector_field(grid, seed, stream, a + 0.5, k);
            let f = random_field(grid, seed, stream + 2, a, k);
            ok(para_vector_sample(bank, pp, &x, &f)?)
        }
        ProbeId::TransportCommutator => {
            let x = random_solenoidal_field(grid, seed, stream, a + 0.5, k);
            let w = random_field(grid, seed, stream + 1, a, k);
            ok(transport_commutator_sample(bank, pp, &x, &biot_savart(&w))?)
        }
        ProbeId::StriatedVelocity => {
            let x = random_solenoidal_field(grid, seed, stream, a + 0.5, k);
            let w = random_field(grid, seed, stream + 1, a, k);
            ok(striated_velocity_sample(bank, pp, &x, &w)?)
        }
        ProbeId::CompatVorticity => {
            let x = random_solenoidal_field(grid, seed, stream, a + 0.5, k);
            let w = random_field(grid, seed, stream + 1, a - 0.5, k);
            ok(compat_vorticity_sample(bank, pp, &x, &w)?)
        }
        ProbeId::CompatTemperature => {
            let x = random_solenoidal_field(grid, seed, stream, a + 0.5, k);
            let th = random_field(grid, seed, stream + 1, a - 0.5, k);
            ok(compat_temperature_sample(bank, pp, &x, &th)?)
        }
    })
}

/// Runs the ensemble for `id` at `cfg.n` and `2·cfg.n`.
pub fn inequality_probe(id: ProbeId, cfg: &EnsembleConfig) -> Result<ProbeReport> {
    if cfg.size < MIN_ENSEMBLE {
        return argument(format!("ensemble size must be >= {MIN_ENSEMBLE}, got {}", cfg.size));
    }
    let pp = cfg.params.unwrap_or_else(|| ProbeParams::defaults(id));
    pp.validate(id)?;
    let resolutions = [cfg.n, 2 * cfg.n];
    let mut evals: Vec<Vec<(Evaluation, Option<String>)>> = Vec::with_capacity(2);
    for &n in &resolutions {
        let grid = Grid::new(n, cfg.length)?;
        let bank = DyadicFilterBank::with_options(&grid, DEFAULT_N0, cfg.oversample)?;
        let level: Result<Vec<_>> = (0..cfg.size)
            .into_par_iter()
            .map(|i| evaluate(id, cfg, &pp, &grid, &bank, i))
            .collect();
        evals.push(level?);
    }
    let rows: Vec<ProbeRow> = (0..cfg.size)
        .map(|i| ProbeRow {
            index: i,
            eval: [evals[0][i].0, evals[1][i].0],
            note: evals[0][i].1.clone().or_else(|| evals[1][i].1.clone()),
        })
        .collect();
    let mut max_ratio = [0.0f64; 2];
    for (l, m) in max_ratio.iter_mut().enumerate() {
        *m = rows.iter().filter_map(|r| r.ratio(l)).fold(0.0, f64::max);
    }
    let mut sorted: Vec<f64> = rows.iter().filter_map(|r| r.ratio(0)).collect();
    sorted.sort_by(f64::total_cmp);
    let percentiles = [10.0, 50.0, 90.0, 99.0].iter().map(|&p| (p, percentile(&sorted, p))).collect();
    let growth = if max_ratio[0] > 0.0 { max_ratio[1] / max_ratio[0] } else { f64::NAN };
    Ok(ProbeReport {
        id,
        ensemble_size: cfg.size,
        resolutions,
        rows,
        max_ratio,
        percentiles,
        growth,
    })
}

/// One CSV row per sample and a trailing summary row.
pub fn write_probe_csv(mut w: impl std::io::Write, config_hash: &str, rep: &ProbeReport) -> Result<()> {
    use super::record::format_float;
    let f = |v: Option<f64>| v.map(format_float).unwrap_or_default();
    writeln!(w, "config_hash,probe,row,n,lhs,rhs,ratio,lhs_2n,rhs_2n,ratio_2n,note")?;
    for r in &rep.rows {
        writeln!(
            w,
            "{config_hash},{},{},{},{},{},{},{},{},{},{}",
            rep.id,
            r.index,
            rep.resolutions[0],
            format_float(r.eval[0].lhs),
            format_float(r.eval[0].rhs),
            f(r.ratio(0)),
            format_float(r.eval[1].lhs),
            format_float(r.eval[1].rhs),
            f(r.ratio(1)),
            r.note.as_deref().unwrap_or("")
        )?;
    }
    let pct: Vec<String> = rep.percentiles.iter().map(|(p, v)| format!("p{p}={}", format_float(*v))).collect();
    writeln!(
        w,
        "{config_hash},{},summary,{},,,{},,,{},growth={};degenerate={};{}",
        rep.id,
        rep.resolutions[0],
        format_float(rep.max_ratio[0]),
        format_float(rep.max_ratio[1]),
        format_float(rep.growth),
        rep.degenerate(),
        pct.join(";")
    )?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn ids_parse_with_aliases() {
        assert_eq!("lemma_A1".parse::<ProbeId>().unwrap(), ProbeId::Commutator);
        assert_eq!("para_vector".parse::<ProbeId>().unwrap(), ProbeId::ParaVector);
        assert_eq!("prop_A5".parse::<ProbeId>().unwrap(), ProbeId::TransportCommutator);
        assert!("nope".parse::<ProbeId>().is_err());
    }

    #[test]
    fn hypotheses_are_checked() {
        let mut pp = ProbeParams::defaults(ProbeId::Commutator);
        pp.p1 = 2.0;
        let e = pp.validate(ProbeId::Commutator).unwrap_err().to_string();
        assert!(e.contains("1/p = 1/p1 + 1/p2"), "{e}");
        let mut pp = ProbeParams::defaults(ProbeId::ParaVector);
        pp.s = 0.2;
        assert!(pp.validate(ProbeId::ParaVector).unwrap_err().to_string().contains("s + eps > 1"));
        let mut pp = ProbeParams::defaults(ProbeId::CompatVorticity);
        pp.q = 1.5;
        assert!(pp.validate(ProbeId::CompatVorticity).is_err());
    }

    #[test]
    fn constant_g_is_degenerate() {
        let g = Grid::new(32, 2.0 * PI).unwrap();
        let bank = DyadicFilterBank::new(&g);
        let pp = ProbeParams::defaults(ProbeId::Commutator);
        let c = ScalarField::constant(&g, 2.0);
        let u = random_field(&g, 1, 0, 2.0, 10);
        let (e, note) = commutator_sample(&bank, &pp, &c, &u).unwrap();
        assert!(note.unwrap().starts_with("degenerate"));
        assert!(e.lhs < 1e-12);
    }

    #[test]
    fn constant_x_leaves_only_low_block_terms() {
        // With constant X the difference is -X·∇S_{N0}f, which has no content above block N0.
        let g = Grid::new(64, 2.0 * PI).unwrap();
        let bank = DyadicFilterBank::new(&g);
        let pp = ProbeParams::defaults(ProbeId::ParaVector);
        let x = VectorField2::constant(&g, [0.3, -0.7]);
        let f = random_field(&g, 5, 0, 2.0, 20);
        let gf = gradient(&f);
        let strong = gf.x.scaled(0.3).add(&gf.y.scaled(-0.7));
        let d = para_vector_field(&bank, &x, &f).unwrap().sub(&strong);
        let dec = bank.decompose(&d).unwrap();
        for j in DEFAULT_N0 + 1..=bank.j_max() {
            assert!(dec.get(j).unwrap().max_abs() < 1e-12);
        }
        let e = para_vector_sample(&bank, &pp, &x, &f).unwrap();
        assert!(e.ratio().unwrap().is_finite());
    }

    #[test]
    fn small_ensemble_is_rejected() {
        let cfg = EnsembleConfig { size: 8, ..Default::default() };
        assert!(inequality_probe(ProbeId::Commutator, &cfg).is_err());
    }

    #[test]
    fn percentile_nearest_rank() {
        let v = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(percentile(&v, 50.0), 2.0);
        assert_eq!(percentile(&v, 100.0), 4.0);
        assert_eq!(percentile(&v, 1.0), 1.0);
    }
}
