use crate::error::{argument, Result};
use crate::lp::{aggregate, BesovSpec, DyadicFilterBank};
use crate::spectral::{divergence, gradient, product, ScalarField, VectorField2};

/// Exponents `(ε, q)` of the striated-regularity norms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StriatedParams {
    pub eps: f64,
    pub q: f64,
}

impl StriatedParams {
    /// Requires `0 < ε < 1`, `q > 1` and `ε/2 + 1/q > 1`.
    pub fn new(eps: f64, q: f64) -> Result<Self> {
        if !(eps > 0.0 && eps < 1.0) {
            return argument(format!("constraint 0 < eps < 1 violated: eps = {eps}"));
        }
        if !(q > 1.0) {
            return argument(format!("constraint q > 1 violated: q = {q}"));
        }
        if !(eps / 2.0 + 1.0 / q > 1.0) {
            return argument(format!(
                "constraint eps/2 + 1/q > 1 violated: eps = {eps}, q = {q} (need q < {})",
                2.0 / (2.0 - eps)
            ));
        }
        Ok(Self { eps, q })
    }
}

/// `∂_X f` in weak form, `div(Xf) - f div X`, with dealiased products.
pub fn directional_derivative_weak(x: &VectorField2, f: &ScalarField) -> ScalarField {
    let flux = VectorField2 {
        x: product(&x.x, f),
        y: product(&x.y, f),
    };
    divergence(&flux).sub(&product(f, &divergence(x)))
}

/// `div(Xω)` with a dealiased product.
pub fn div_product(x: &VectorField2, w: &ScalarField) -> ScalarField {
    divergence(&VectorField2 {
        x: product(&x.x, w),
        y: product(&x.y, w),
    })
}

/// `∂_X u = (X·∇)u` componentwise with dealiased products.
pub fn directional_derivative_vec(x: &VectorField2, u: &VectorField2) -> VectorField2 {
    let d = |c: &ScalarField| {
        let g = gradient(c);
        product(&x.x, &g.x).add(&product(&x.y, &g.y))
    };
    VectorField2 { x: d(&u.x), y: d(&u.y) }
}

/// Largest component norm.
fn vec_norm(bank: &DyadicFilterBank, fields: &[&ScalarField], spec: BesovSpec) -> Result<f64> {
    let mut m: f64 = 0.0;
    for f in fields {
        m = m.max(aggregate(&bank.block_norms(f, spec.p)?, spec.s, spec.r));
    }
    Ok(m)
}

/// Instantaneous striated and critical norms of one state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StriatedNorms {
    /// `‖X‖_{𝒞^ε}`
    pub x_holder: f64,
    /// `‖div(Xω)‖_{𝒞^{ε-1}}`
    pub div_x_omega_m1: f64,
    /// `‖div(Xω)‖_{𝒞^{ε-3}}`
    pub div_x_omega_m3: f64,
    /// `‖∂_Xθ‖_{𝒞^{ε-2}}`
    pub dx_theta: f64,
    /// `‖∂_Xu‖_{𝒞^ε}`
    pub dx_u: f64,
    /// `‖ω‖_{B^{2/q-2}_{q,1}}`
    pub omega_low: f64,
    /// `‖ω‖_{B^{2/q}_{q,1}}`
    pub omega_high: f64,
    /// `‖θ‖_{B^{2/q-1}_{q,1}}`
    pub theta_b: f64,
    /// `‖∇u‖_{B^{2/q}_{q,1}}`
    pub grad_u_b: f64,
    /// `‖∇u‖_{L^∞}`, largest entry.
    pub grad_u_linf: f64,
    pub div_x_linf: f64,
    /// `‖∇X‖_{L^∞}`, largest entry.
    pub grad_x_linf: f64,
}

impl StriatedNorms {
    pub fn compute(
        bank: &DyadicFilterBank,
        params: StriatedParams,
        theta: &ScalarField,
        omega: &ScalarField,
        u: &VectorField2,
        x: &VectorField2,
    ) -> Result<Self> {
        let eps = params.eps;
        let q = params.q;
        let inf = f64::INFINITY;
        let xo = div_product(x, omega);
        let xo_blocks = bank.block_norms(&xo, inf)?;
        let dxt = directional_derivative_weak(x, theta);
        let dxu = directional_derivative_vec(x, u);
        let om_blocks = bank.block_norms(omega, q)?;
        let gu = [gradient(&u.x), gradient(&u.y)];
        let gu_fields = [&gu[0].x, &gu[0].y, &gu[1].x, &gu[1].y];
        let gx = [gradient(&x.x), gradient(&x.y)];
        let grad_u_b = vec_norm(bank, &gu_fields, BesovSpec::new(2.0 / q, q, 1.0)?)?;
        Ok(Self {
            x_holder: vec_norm(bank, &[&x.x, &x.y], BesovSpec::holder(eps))?,
            div_x_omega_m1: aggregate(&xo_blocks, eps - 1.0, inf),
            div_x_omega_m3: aggregate(&xo_blocks, eps - 3.0, inf),
            dx_theta: aggregate(&bank.block_norms(&dxt, inf)?, eps - 2.0, inf),
            dx_u: vec_norm(bank, &[&dxu.x, &dxu.y], BesovSpec::holder(eps))?,
            omega_low: aggregate(&om_blocks, 2.0 / q - 2.0, 1.0),
            omega_high: aggregate(&om_blocks, 2.0 / q, 1.0),
            theta_b: aggregate(&bank.block_norms(theta, q)?, 2.0 / q - 1.0, 1.0),
            grad_u_b,
            grad_u_linf: gu_fields.iter().map(|f| f.max_abs()).fold(0.0, f64::max),
            div_x_linf: divergence(x).max_abs(),
            grad_x_linf: [&gx[0].x, &gx[0].y, &gx[1].x, &gx[1].y]
                .iter()
                .map(|f| f.max_abs())
                .fold(0.0, f64::max),
        })
    }

    /// Ratio of `‖∂_Xu‖_{𝒞^ε}` to `‖∇u‖_{L^∞}‖X‖_{𝒞^ε} + ‖div(Xω)‖_{𝒞^{ε-1}}`.
    pub fn velocity_ratio(&self) -> Option<f64> {
        let rhs = self.grad_u_linf * self.x_holder + self.div_x_omega_m1;
        (rhs > 0.0).then(|| self.dx_u / rhs)
    }
}
