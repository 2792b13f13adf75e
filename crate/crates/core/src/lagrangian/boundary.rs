use std::f64::consts::PI;

use super::patch::PatchState;
use crate::error::{argument, Error, Result};

pub const MIN_MARKERS: usize = 64;

/// `C^{1,ε}` diagnostics of a closed curve sampled uniformly in `σ ∈ [0, 2π)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryNorm {
    /// `max|γ| + max|∂_σγ|`.
    pub c1: f64,
    /// Hölder seminorm of the unit tangent in `σ`.
    pub holder: f64,
    /// `c1 + holder`.
    pub total: f64,
    /// Largest ratio of shorter arc length to chord length.
    pub arc_chord: f64,
}

pub fn boundary_c1eps_norm(patch: &PatchState, eps: f64) -> Result<BoundaryNorm> {
    curve_c1eps_norm(&patch.markers, &patch.tangents(), eps)
}

pub fn curve_c1eps_norm(points: &[[f64; 2]], tangents: &[[f64; 2]], eps: f64) -> Result<BoundaryNorm> {
    let n = points.len();
    if n < MIN_MARKERS {
        return argument(format!("need at least {MIN_MARKERS} markers, got {n}"));
    }
    if !(eps > 0.0 && eps < 1.0) {
        return argument(format!("Hölder exponent must lie in (0, 1), got {eps}"));
    }
    let mut unit = Vec::with_capacity(n);
    let mut max_t = 0.0f64;
    for (i, t) in tangents.iter().enumerate() {
        let m = t[0].hypot(t[1]);
        if !(m >= 1e-12) {
            return Err(Error::Degenerate(format!("tangent vanishes at marker {i}")));
        }
        max_t = max_t.max(m);
        unit.push([t[0] / m, t[1] / m]);
    }
    let max_p = points.iter().fold(0.0f64, |m, p| m.max(p[0].hypot(p[1])));
    let dsig = 2.0 * PI / n as f64;
    // Parameter-distance powers depend only on the index gap.
    let weights: Vec<f64> = (0..=n / 2)
        .map(|k| if k == 0 { 0.0 } else { (k as f64 * dsig).powf(-eps) })
        .collect();
    let mut cum = Vec::with_capacity(n + 1);
    cum.push(0.0);
    for i in 0..n {
        let a = points[i];
        let b = points[(i + 1) % n];
        cum.push(cum[i] + (b[0] - a[0]).hypot(b[1] - a[1]));
    }
    let perimeter = cum[n];
    let mut holder = 0.0f64;
    let mut arc_chord = 1.0f64;
    for i in 0..n {
        for j in i + 1..n {
            let gap = (j - i).min(n - (j - i));
            let d = [unit[i][0] - unit[j][0], unit[i][1] - unit[j][1]];
            holder = holder.max(d[0].hypot(d[1]) * weights[gap]);
            let arc = (cum[j] - cum[i]).min(perimeter - (cum[j] - cum[i]));
            let chord = (points[i][0] - points[j][0]).hypot(points[i][1] - points[j][1]);
            if chord > 0.0 {
                arc_chord = arc_chord.max(arc / chord);
            } else {
                arc_chord = f64::INFINITY;
            }
        }
    }
    let c1 = max_p + max_t;
    Ok(BoundaryNorm {
        c1,
        holder,
        total: c1 + holder,
        arc_chord,
    })
}
