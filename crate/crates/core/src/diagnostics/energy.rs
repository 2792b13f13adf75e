use crate::error::{argument, Result};
use crate::spectral::{ScalarField, VectorField2};

/// Quantities entering the energy balance at one time level.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergySample {
    pub t: f64,
    /// `‖u‖²_{L²}`
    pub kinetic: f64,
    /// `‖∇u‖²_{L²}`, equal to `‖ω‖²_{L²}` for a mean-free periodic field.
    pub dissipation: f64,
    /// `∫ θ_b u₂ dx` with `θ_b` the temperature seen by the buoyancy term.
    pub work: f64,
    /// `∫‖∇u‖²` over the step ending at this sample, when the caller had
    /// both end states; otherwise the residual falls back to the trapezoid rule.
    pub step_dissipation: Option<f64>,
}

impl EnergySample {
    pub fn new(t: f64, u: &VectorField2, omega: &ScalarField, theta_b: &ScalarField) -> Self {
        Self {
            t,
            kinetic: u.l2_norm_squared(),
            dissipation: omega.inner(omega),
            work: theta_b.inner(&u.y),
            step_dissipation: None,
        }
    }

    pub fn with_step_dissipation(self, v: f64) -> Self {
        Self {
            step_dissipation: Some(v),
            ..self
        }
    }
}

/// Logarithmic mean `(a - b)/(ln a - ln b)`, the time average of a quantity
/// moving exponentially from `a` to `b`.
fn log_mean(a: f64, b: f64) -> f64 {
    if a <= 0.0 || b <= 0.0 {
        return 0.0;
    }
    let r = b / a;
    if (r - 1.0).abs() < 1e-4 {
        // series of (r - 1)/ln r about r = 1
        let x = r - 1.0;
        a * (1.0 + x / 2.0 - x * x / 12.0 + x * x * x / 24.0)
    } else {
        a * (r - 1.0) / r.ln()
    }
}

/// `∫‖ω‖²` over a step of length `dt` from the vorticity at both ends.
///
/// Each Fourier mode's squared amplitude is taken to vary exponentially across
/// the step. This is exact for viscous decay, whose rate at the top of the
/// band far exceeds `1/dt` right after rough initial data, and second-order
/// accurate otherwise.
pub fn step_dissipation(a: &ScalarField, b: &ScalarField, dt: f64) -> f64 {
    let g = a.grid();
    let nn = g.len() as f64;
    let norm = g.cell_area() / nn;
    let sum: f64 = a
        .spectrum()
        .iter()
        .zip(b.spectrum())
        .map(|(x, y)| log_mean(x.norm_sqr(), y.norm_sqr()))
        .sum();
    dt * norm * sum
}

/// `R(t) = ‖u(t)‖² + 2ν∫‖∇u‖² - ‖u₀‖² - 2∫∫θu₂` at the last sample. The work
/// integral uses the trapezoid rule; the dissipation integral uses the stored
/// per-step values where present and the trapezoid rule elsewhere.
pub fn energy_equality_residual(history: &[EnergySample], nu: f64) -> Result<f64> {
    let (first, last) = match (history.first(), history.last()) {
        (Some(a), Some(b)) => (a, b),
        _ => return argument("energy residual needs at least one sample"),
    };
    let mut diss = 0.0;
    let mut work = 0.0;
    for w in history.windows(2) {
        let dt = w[1].t - w[0].t;
        if !(dt >= 0.0) {
            return argument("energy samples must be ordered in time");
        }
        diss += w[1]
            .step_dissipation
            .unwrap_or(0.5 * dt * (w[0].dissipation + w[1].dissipation));
        work += 0.5 * dt * (w[0].work + w[1].work);
    }
    Ok(last.kinetic + 2.0 * nu * diss - first.kinetic - 2.0 * work)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::Grid;

    #[test]
    fn zero_data_has_zero_residual() {
        let g = Grid::new(16, 1.0).unwrap();
        let z = ScalarField::zeros(&g);
        let s = EnergySample::new(0.0, &VectorField2::zeros(&g), &z, &z);
        let h = [s, EnergySample { t: 0.5, ..s }];
        assert_eq!(energy_equality_residual(&h, 1.0).unwrap(), 0.0);
        assert!(energy_equality_residual(&[], 1.0).is_err());
    }

    #[test]
    fn exact_decay_balances() {
        // ‖u‖² = e^{-2t} with ‖∇u‖² = ‖u‖² and ν = 1 closes up to trapezoid error.
        let h: Vec<EnergySample> = (0..=1000)
            .map(|i| {
                let t = i as f64 * 1e-3;
                let e = (-2.0 * t).exp();
                EnergySample { t, kinetic: e, dissipation: e, work: 0.0, step_dissipation: None }
            })
            .collect();
        let r = energy_equality_residual(&h, 1.0).unwrap();
        assert!(r.abs() < 1e-6, "{r}");
    }

    #[test]
    fn step_dissipation_is_exact_for_heat_decay() {
        // Mixed modes whose decay over the step ranges from mild to e^{-50}.
        let g = Grid::new(32, 2.0 * std::f64::consts::PI).unwrap();
        let w0 = ScalarField::from_fn(&g, |x, y| x.sin() + (5.0 * y).cos() + 0.3 * (10.0 * x - 7.0 * y).sin());
        let dt = 0.1;
        let w1 = crate::spectral::heat_multiplier(&w0, 1.0, dt).unwrap();
        // ∫₀^dt ‖e^{tΔ}ω₀‖² = Σ_k |c_k|² (1 - e^{-2|k|²dt}) / (2|k|²)
        let area = 4.0 * std::f64::consts::PI * std::f64::consts::PI;
        let mode = |k2: f64, amp: f64| 0.5 * amp * amp * area * (1.0 - (-2.0 * k2 * dt).exp()) / (2.0 * k2);
        let exact = mode(1.0, 1.0) + mode(25.0, 1.0) + mode(149.0, 0.3);
        let got = step_dissipation(&w0, &w1, dt);
        assert!((got - exact).abs() < 1e-12 * exact, "{got} vs {exact}");
        let trap = 0.5 * dt * (w0.inner(&w0) + w1.inner(&w1));
        assert!((trap - exact).abs() > 1e-3);
    }

    #[test]
    fn log_mean_limits() {
        assert_eq!(log_mean(2.0, 2.0), 2.0);
        assert!((log_mean(1.0, 1.0 + 1e-6) - (1.0 + 5e-7 - 1e-12 / 12.0)).abs() < 1e-15);
        assert_eq!(log_mean(0.0, 3.0), 0.0);
        let (a, b) = (1.0, (-3.0f64).exp());
        assert!((log_mean(a, b) - (1.0 - b) / 3.0).abs() < 1e-15);
    }
}
