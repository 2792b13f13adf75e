use std::io::Write;
use std::sync::Arc;

use super::energy::{energy_equality_residual, EnergySample};
use super::striated::{StriatedNorms, StriatedParams};
use crate::error::Result;
use crate::interp::cubic_field;
use crate::lagrangian::{curve_c1eps_norm, det, polygon_area, BoundaryNorm, PatchState};
use crate::lp::DyadicFilterBank;
use crate::spectral::{biot_savart, ScalarField, VectorField2};

/// Per-marker data needed to rebuild the boundary diagnostics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MarkerSample {
    pub p: [f64; 2],
    /// `∂_σγ`
    pub tangent: [f64; 2],
    /// `Dψ·X_ref`
    pub x_lagr: [f64; 2],
    /// `det Dψ` since the last redistribution.
    pub det: f64,
}

impl MarkerSample {
    pub fn from_patch(patch: &PatchState) -> Vec<Self> {
        let tangents = patch.tangents();
        let xl = patch.x_from_jacobian();
        (0..patch.len())
            .map(|i| Self {
                p: patch.markers[i],
                tangent: tangents[i],
                x_lagr: xl[i],
                det: det(&patch.jacobians[i]),
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PatchRecord {
    pub area: f64,
    /// `|A(t) - A(0)| / A(0)`
    pub area_drift: f64,
    pub det_deviation: f64,
    pub boundary: BoundaryNorm,
    /// `max_i |X(γ_i) - Dψ·X_ref(γ_i)|`
    pub x_marker_dev: f64,
}

/// One row of `diagnostics.csv`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagnosticsRecord {
    pub t: f64,
    pub energy_residual: f64,
    /// Residual over `‖u₀‖²_{L²}` (the raw residual when `u₀ = 0`).
    pub energy_residual_rel: f64,
    pub l2_u: f64,
    /// `∫|∇u|²`
    pub grad_u_l2_sq: f64,
    pub theta_l1: f64,
    pub theta_l2: f64,
    pub theta_linf: f64,
    pub theta_integral: f64,
    /// `V(t) = ∫₀ᵗ ‖∇u‖_{L^∞}`
    pub v_int: f64,
    pub norms: StriatedNorms,
    /// `U_q(t) = ∫₀ᵗ ‖∇u‖_{B^{2/q}_{q,1}}`
    pub u_q: f64,
    pub w: f64,
    pub z: f64,
    pub velocity_ratio: Option<f64>,
    pub patch: Option<PatchRecord>,
}

pub const CSV_COLUMNS: &[&str] = &[
    "t",
    "energy_residual",
    "energy_residual_rel",
    "l2_u",
    "grad_u_l2_sq",
    "theta_l1",
    "theta_l2",
    "theta_linf",
    "theta_integral",
    "grad_u_linf",
    "v_int",
    "x_holder",
    "div_x_omega_m1",
    "div_x_omega_m3",
    "dx_theta",
    "dx_u",
    "omega_low",
    "omega_high",
    "theta_b",
    "grad_u_b",
    "u_q",
    "w",
    "z",
    "velocity_ratio",
    "div_x_linf",
    "grad_x_linf",
    "area",
    "area_drift",
    "det_deviation",
    "boundary_c1",
    "boundary_holder",
    "boundary_norm",
    "arc_chord",
    "x_marker_dev",
];

impl DiagnosticsRecord {
    /// Values in [`CSV_COLUMNS`] order; `None` for quantities that do not apply.
    pub fn values(&self) -> Vec<Option<f64>> {
        let n = &self.norms;
        let mut v = vec![
            Some(self.t),
            Some(self.energy_residual),
            Some(self.energy_residual_rel),
            Some(self.l2_u),
            Some(self.grad_u_l2_sq),
            Some(self.theta_l1),
            Some(self.theta_l2),
            Some(self.theta_linf),
            Some(self.theta_integral),
            Some(n.grad_u_linf),
            Some(self.v_int),
            Some(n.x_holder),
            Some(n.div_x_omega_m1),
            Some(n.div_x_omega_m3),
            Some(n.dx_theta),
            Some(n.dx_u),
            Some(n.omega_low),
            Some(n.omega_high),
            Some(n.theta_b),
            Some(n.grad_u_b),
            Some(self.u_q),
            Some(self.w),
            Some(self.z),
            self.velocity_ratio,
            Some(n.div_x_linf),
            Some(n.grad_x_linf),
        ];
        match &self.patch {
            Some(p) => v.extend([
                Some(p.area),
                Some(p.area_drift),
                Some(p.det_deviation),
                Some(p.boundary.c1),
                Some(p.boundary.holder),
                Some(p.boundary.total),
                Some(p.boundary.arc_chord),
                Some(p.x_marker_dev),
            ]),
            None => v.extend([None; 8]),
        }
        debug_assert_eq!(v.len(), CSV_COLUMNS.len());
        v
    }

    /// Named entries, skipping those that do not apply.
    pub fn named(&self) -> Vec<(&'static str, f64)> {
        CSV_COLUMNS
            .iter()
            .zip(self.values())
            .filter_map(|(k, v)| v.map(|v| (*k, v)))
            .collect()
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        let i = CSV_COLUMNS.iter().position(|c| *c == name)?;
        self.values()[i]
    }
}

/// Shortest round-trip formatting, so parsing a written value gives back the same bits.
pub fn format_float(v: f64) -> String {
    format!("{v:e}")
}

pub fn write_csv_header(mut w: impl Write) -> Result<()> {
    writeln!(w, "config_hash,{}", CSV_COLUMNS.join(","))?;
    Ok(())
}

pub fn write_csv_row(mut w: impl Write, config_hash: &str, rec: &DiagnosticsRecord) -> Result<()> {
    let cells: Vec<String> = rec
        .values()
        .into_iter()
        .map(|v| v.map(format_float).unwrap_or_default())
        .collect();
    writeln!(w, "{config_hash},{}", cells.join(","))?;
    Ok(())
}

#[derive(Debug, Clone, Copy)]
struct Integrands {
    t: f64,
    grad_u_linf: f64,
    grad_u_b: f64,
    rest: f64,
}

/// Turns states into [`DiagnosticsRecord`]s, carrying the running time
/// integrals and maxima between calls.
///
/// Inputs are detached from any cached spectra first, so that a record built
/// from in-memory fields and one built from stored samples agree bit for bit.
pub struct Recorder {
    bank: Arc<DyadicFilterBank>,
    params: StriatedParams,
    nu: f64,
    last: Option<Integrands>,
    v_int: f64,
    u_q: f64,
    rest: f64,
    z_x: f64,
    z_w: f64,
    area0: Option<f64>,
}

impl Recorder {
    pub fn new(bank: Arc<DyadicFilterBank>, params: StriatedParams, nu: f64) -> Self {
        Self {
            bank,
            params,
            nu,
            last: None,
            v_int: 0.0,
            u_q: 0.0,
            rest: 0.0,
            z_x: 0.0,
            z_w: 0.0,
            area0: None,
        }
    }

    pub fn params(&self) -> StriatedParams {
        self.params
    }

    /// `energy` holds every energy sample up to and including time `t`.
    pub fn record(
        &mut self,
        t: f64,
        theta: &ScalarField,
        omega: &ScalarField,
        x: &VectorField2,
        markers: Option<&[MarkerSample]>,
        energy: &[EnergySample],
    ) -> Result<DiagnosticsRecord> {
        let theta = theta.detached();
        let omega = omega.detached();
        let x = x.detached();
        let u = biot_savart(&omega);
        let norms = StriatedNorms::compute(&self.bank, self.params, &theta, &omega, &u, &x)?;

        let now = Integrands {
            t,
            grad_u_linf: norms.grad_u_linf,
            grad_u_b: norms.grad_u_b,
            rest: norms.omega_high + norms.theta_b,
        };
        if let Some(prev) = self.last {
            let h = 0.5 * (now.t - prev.t);
            self.v_int += h * (prev.grad_u_linf + now.grad_u_linf);
            self.u_q += h * (prev.grad_u_b + now.grad_u_b);
            self.rest += h * (prev.rest + now.rest);
        }
        self.last = Some(now);
        self.z_x = self.z_x.max(norms.x_holder);
        self.z_w = self.z_w.max(norms.div_x_omega_m3);

        let residual = energy_equality_residual(energy, self.nu)?;
        let k0 = energy[0].kinetic;
        let patch = match markers {
            Some(m) => Some(self.patch_record(m, &x)?),
            None => None,
        };
        Ok(DiagnosticsRecord {
            t,
            energy_residual: residual,
            energy_residual_rel: if k0 > 0.0 { residual / k0 } else { residual },
            l2_u: u.l2_norm_squared().sqrt(),
            grad_u_l2_sq: omega.inner(&omega),
            theta_l1: theta.lp_norm(1.0),
            theta_l2: theta.lp_norm(2.0),
            theta_linf: theta.max_abs(),
            theta_integral: theta.integral(),
            v_int: self.v_int,
            velocity_ratio: norms.velocity_ratio(),
            norms,
            u_q: self.u_q,
            w: self.u_q + self.rest,
            z: self.z_x + self.z_w,
            patch,
        })
    }

    fn patch_record(&mut self, m: &[MarkerSample], x: &VectorField2) -> Result<PatchRecord> {
        let pts: Vec<[f64; 2]> = m.iter().map(|s| s.p).collect();
        let tans: Vec<[f64; 2]> = m.iter().map(|s| s.tangent).collect();
        let boundary = curve_c1eps_norm(&pts, &tans, self.params.eps)?;
        let area = polygon_area(&pts).abs();
        let a0 = *self.area0.get_or_insert(area);
        let x_marker_dev = m.iter().fold(0.0f64, |acc, s| {
            let e = [cubic_field(&x.x, s.p) - s.x_lagr[0], cubic_field(&x.y, s.p) - s.x_lagr[1]];
            acc.max(e[0].hypot(e[1]))
        });
        Ok(PatchRecord {
            area,
            area_drift: (area - a0).abs() / a0,
            det_deviation: m.iter().fold(0.0, |acc, s| acc.max((s.det - 1.0).abs())),
            boundary,
            x_marker_dev,
        })
    }
}
