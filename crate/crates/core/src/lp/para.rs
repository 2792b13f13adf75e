use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::spectral::{dealias, divergence, laplacian, partial, product, Axis, ScalarField, VectorField2};

use super::filter::{DyadicDecomposition, DyadicFilterBank};

fn check(a: &ScalarField, b: &ScalarField) -> Result<()> {
    if a.same_grid(b) {
        Ok(())
    } else {
        Err(Error::GridMismatch)
    }
}

fn finish(like: &ScalarField, values: Vec<f64>) -> ScalarField {
    dealias(&ScalarField::from_values_trusted(like.grid(), values))
}

/// `Σ_{j ≥ N0} S_{j-N0}u · Δ_j v` before dealiasing.
fn para_sum(n0: i32, du: &DyadicDecomposition, dv: &DyadicDecomposition) -> Vec<f64> {
    let low = du.low_sums();
    let len = low[0].len();
    let j_max = dv.j_max();
    let mut out = vec![0.0; len];
    for j in n0..=j_max {
        // low[i] holds S_{i-1}
        let s = &low[(j - n0 + 1) as usize];
        let b = dv.get(j).unwrap().values();
        out.par_iter_mut()
            .zip(s.par_iter().zip(b.par_iter()))
            .for_each(|(o, (a, c))| *o += a * c);
    }
    out
}

fn remainder_sum(n0: i32, du: &DyadicDecomposition, dv: &DyadicDecomposition) -> Vec<f64> {
    let j_max = du.j_max();
    let len = du.blocks()[0].values().len();
    let mut out = vec![0.0; len];
    for j in -1..=j_max {
        let mut band = vec![0.0; len];
        for k in (j - n0).max(-1)..=(j + n0).min(j_max) {
            for (b, v) in band.iter_mut().zip(dv.get(k).unwrap().values()) {
                *b += v;
            }
        }
        let a = du.get(j).unwrap().values();
        out.par_iter_mut()
            .zip(a.par_iter().zip(band.par_iter()))
            .for_each(|(o, (x, y))| *o += x * y);
    }
    out
}

/// Paraproduct `T_u v = P[Σ_j S_{j-N0}u Δ_j v]`.
pub fn paraproduct(bank: &DyadicFilterBank, u: &ScalarField, v: &ScalarField) -> Result<ScalarField> {
    check(u, v)?;
    let du = bank.decompose(u)?;
    let dv = bank.decompose(v)?;
    Ok(finish(u, para_sum(bank.n0(), &du, &dv)))
}

/// Bony remainder `R(u,v) = P[Σ_{|j-k| ≤ N0} Δ_j u Δ_k v]`.
pub fn remainder(bank: &DyadicFilterBank, u: &ScalarField, v: &ScalarField) -> Result<ScalarField> {
    check(u, v)?;
    let du = bank.decompose(u)?;
    let dv = bank.decompose(v)?;
    Ok(finish(u, remainder_sum(bank.n0(), &du, &dv)))
}

/// `(T_u v, T_v u, R(u,v))` sharing one pair of decompositions.
pub fn paraproduct_pair(
    bank: &DyadicFilterBank,
    u: &ScalarField,
    v: &ScalarField,
) -> Result<(ScalarField, ScalarField, ScalarField)> {
    check(u, v)?;
    let du = bank.decompose(u)?;
    let dv = bank.decompose(v)?;
    let n0 = bank.n0();
    Ok((
        finish(u, para_sum(n0, &du, &dv)),
        finish(u, para_sum(n0, &dv, &du)),
        finish(u, remainder_sum(n0, &du, &dv)),
    ))
}

/// Para-vector field `𝒯_X f = T_{X¹}∂₁f + T_{X²}∂₂f`.
pub fn para_vector_field(bank: &DyadicFilterBank, x: &VectorField2, f: &ScalarField) -> Result<ScalarField> {
    check(&x.x, f)?;
    let a = paraproduct(bank, &x.x, &partial(f, Axis::X))?;
    let b = paraproduct(bank, &x.y, &partial(f, Axis::Y))?;
    Ok(a.add(&b))
}

/// Source of the `div(Xω)` equation:
/// `ν div(XΔω − Δ(Xω)) + div(X ∂₁θ)`, every product dealiased.
pub fn striated_source(x: &VectorField2, omega: &ScalarField, theta: &ScalarField, nu: f64) -> Result<ScalarField> {
    check(&x.x, omega)?;
    check(&x.x, theta)?;
    let lap_w = laplacian(omega);
    let dth = partial(theta, Axis::X);
    let comp = |xi: &ScalarField| {
        let visc = product(xi, &lap_w).sub(&laplacian(&product(xi, omega)));
        visc.scaled(nu).add(&product(xi, &dth))
    };
    let flux = VectorField2 {
        x: comp(&x.x),
        y: comp(&x.y),
    };
    Ok(divergence(&flux))
}
