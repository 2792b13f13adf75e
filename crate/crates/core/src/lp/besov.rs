use crate::error::{argument, Result};
use crate::spectral::{ScalarField, VectorField2};

use super::filter::DyadicFilterBank;

/// Exponents `(s, p, r)` of a Besov space `B^s_{p,r}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BesovSpec {
    pub s: f64,
    pub p: f64,
    pub r: f64,
}

impl BesovSpec {
    pub fn new(s: f64, p: f64, r: f64) -> Result<Self> {
        if !s.is_finite() {
            return argument(format!("regularity index must be finite, got {s}"));
        }
        for (name, v) in [("p", p), ("r", r)] {
            if !(v >= 1.0) {
                return argument(format!("exponent {name} must lie in [1, inf], got {v}"));
            }
        }
        Ok(Self { s, p, r })
    }

    /// Hölder–Zygmund space `𝒞^s = B^s_{∞,∞}`.
    pub fn holder(s: f64) -> Self {
        Self {
            s,
            p: f64::INFINITY,
            r: f64::INFINITY,
        }
    }

    pub fn with_s(self, s: f64) -> Self {
        Self { s, ..self }
    }
}

/// Dyadic weight `2^{js}`; the low block `j = -1` carries `2^{-s}`.
fn weight(j: i32, s: f64) -> f64 {
    2f64.powf(j as f64 * s)
}

/// `ℓ^r` aggregation of `2^{js}·a_j` where `norms[i]` holds `a_{i-1}`.
pub fn aggregate(norms: &[f64], s: f64, r: f64) -> f64 {
    let terms = norms
        .iter()
        .enumerate()
        .map(|(i, a)| weight(i as i32 - 1, s) * a);
    if r.is_infinite() {
        terms.fold(0.0, f64::max)
    } else if r == 1.0 {
        terms.sum()
    } else {
        terms.map(|t| t.powf(r)).sum::<f64>().powf(1.0 / r)
    }
}

pub fn besov_norm(bank: &DyadicFilterBank, f: &ScalarField, spec: BesovSpec) -> Result<f64> {
    let norms = bank.block_norms(f, spec.p)?;
    Ok(aggregate(&norms, spec.s, spec.r))
}

/// Largest component norm.
pub fn besov_norm_vec(bank: &DyadicFilterBank, v: &VectorField2, spec: BesovSpec) -> Result<f64> {
    Ok(besov_norm(bank, &v.x, spec)?.max(besov_norm(bank, &v.y, spec)?))
}

/// Running time norms of a block-decomposed signal.
///
/// Each pushed sample is the vector of `‖Δ_j f(t)‖_{L^p}`. The accumulator
/// keeps, per block, the trapezoid integral of the `ρ`-th power (running max
/// for `ρ = ∞`) for the tilde norm `L̃^ρ_t(B^s_{p,r})`, and the same integral of
/// the full Besov norm for `L^ρ_t(B^s_{p,r})`.
#[derive(Debug, Clone)]
pub struct TimeNormAccumulator {
    spec: BesovSpec,
    rho: f64,
    last: Option<(f64, Vec<f64>, f64)>,
    blocks: Vec<f64>,
    plain: f64,
    samples: usize,
}

impl TimeNormAccumulator {
    pub fn new(spec: BesovSpec, rho: f64) -> Result<Self> {
        if !(rho >= 1.0) {
            return argument(format!("time exponent rho must lie in [1, inf], got {rho}"));
        }
        Ok(Self {
            spec,
            rho,
            last: None,
            blocks: Vec::new(),
            plain: 0.0,
            samples: 0,
        })
    }

    pub fn spec(&self) -> BesovSpec {
        self.spec
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn samples(&self) -> usize {
        self.samples
    }

    pub fn push(&mut self, t: f64, block_norms: &[f64]) -> Result<()> {
        let full = aggregate(block_norms, self.spec.s, self.spec.r);
        if self.blocks.is_empty() {
            self.blocks = vec![0.0; block_norms.len()];
        } else if self.blocks.len() != block_norms.len() {
            return argument("block count changed between samples");
        }
        if self.rho.is_infinite() {
            for (b, v) in self.blocks.iter_mut().zip(block_norms) {
                *b = b.max(*v);
            }
            self.plain = self.plain.max(full);
        } else if let Some((t0, prev, prev_full)) = &self.last {
            let dt = t - t0;
            if !(dt >= 0.0) {
                return argument("samples must be pushed in time order");
            }
            let rho = self.rho;
            for ((b, v), p) in self.blocks.iter_mut().zip(block_norms).zip(prev) {
                *b += 0.5 * dt * (v.powf(rho) + p.powf(rho));
            }
            self.plain += 0.5 * dt * (full.powf(rho) + prev_full.powf(rho));
        }
        self.last = Some((t, block_norms.to_vec(), full));
        self.samples += 1;
        Ok(())
    }

    fn root(&self, v: f64) -> f64 {
        if self.rho.is_infinite() {
            v
        } else {
            v.powf(1.0 / self.rho)
        }
    }

    /// `‖f‖_{L̃^ρ_t(B^s_{p,r})}`.
    pub fn tilde(&self) -> f64 {
        let per_block: Vec<f64> = self.blocks.iter().map(|&b| self.root(b)).collect();
        aggregate(&per_block, self.spec.s, self.spec.r)
    }

    /// `‖f‖_{L^ρ_t(B^s_{p,r})}`.
    pub fn plain(&self) -> f64 {
        self.root(self.plain)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::Grid;
    use std::f64::consts::PI;

    #[test]
    fn spec_validation() {
        assert!(BesovSpec::new(0.5, 0.5, 1.0).is_err());
        assert!(BesovSpec::new(f64::NAN, 2.0, 1.0).is_err());
        assert!(BesovSpec::new(-2.0, f64::INFINITY, 1.0).is_ok());
    }

    #[test]
    fn aggregate_weights() {
        let norms = [1.0, 1.0, 1.0];
        assert_eq!(aggregate(&norms, 1.0, f64::INFINITY), 2.0);
        assert!((aggregate(&norms, 1.0, 1.0) - 3.5).abs() < 1e-15);
        assert!((aggregate(&norms, 0.0, 2.0) - 3f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn zero_and_scaling() {
        let g = Grid::new(64, 2.0 * PI).unwrap();
        let bank = DyadicFilterBank::new(&g);
        let spec = BesovSpec::new(0.7, 2.0, 1.0).unwrap();
        assert_eq!(besov_norm(&bank, &ScalarField::zeros(&g), spec).unwrap(), 0.0);
        let f = ScalarField::from_fn(&g, |x, y| (3.0 * x).sin() + (7.0 * y + x).cos());
        let a = besov_norm(&bank, &f, spec).unwrap();
        let b = besov_norm(&bank, &f.scaled(-2.5), spec).unwrap();
        assert!((b - 2.5 * a).abs() <= 1e-13 * b);
    }

    #[test]
    fn single_dyadic_mode_scales_like_power() {
        let g = Grid::new(256, 2.0 * PI).unwrap();
        let bank = DyadicFilterBank::new(&g);
        let s = 0.6;
        let ratios: Vec<f64> = (1..=6)
            .map(|m| {
                let k = 2f64.powi(m);
                let f = ScalarField::from_fn(&g, |x, _| (k * x).cos());
                besov_norm(&bank, &f, BesovSpec::holder(s)).unwrap() / 2f64.powf(m as f64 * s)
            })
            .collect();
        let lo = ratios.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = ratios.iter().copied().fold(0.0, f64::max);
        assert!(lo > 0.3 && hi < 3.0, "{ratios:?}");
        assert!(hi / lo < 1.0 + 1e-9);
    }

    #[test]
    fn lower_regularity_is_weaker() {
        let g = Grid::new(64, 2.0 * PI).unwrap();
        let bank = DyadicFilterBank::new(&g);
        // No content below |k| = 4/3, so the low block (weight 2^{-s}) is empty.
        let f = ScalarField::from_fn(&g, |x, y| (5.0 * x + 2.0 * y).sin() + 0.3 * (17.0 * y).cos());
        assert!(bank.block(&f, -1).unwrap().max_abs() < 1e-14);
        let mut prev = 0.0;
        for s in [-3.0, -2.0, -1.5, -0.5, 0.0] {
            let v = besov_norm(&bank, &f, BesovSpec::holder(s)).unwrap();
            assert!(v >= prev);
            prev = v;
        }
    }

    #[test]
    fn tilde_ordering_follows_minkowski() {
        // Two blocks whose mass moves between them over time.
        let series: Vec<(f64, [f64; 2])> = (0..=20)
            .map(|i| {
                let t = i as f64 * 0.05;
                (t, [1.0 - t, t * t])
            })
            .collect();
        let run = |r: f64, rho: f64| {
            let mut acc = TimeNormAccumulator::new(BesovSpec::new(0.0, 2.0, r).unwrap(), rho).unwrap();
            for (t, a) in &series {
                acc.push(*t, a).unwrap();
            }
            (acc.tilde(), acc.plain())
        };
        let (tilde, plain) = run(f64::INFINITY, 1.0);
        assert!(tilde <= plain + 1e-15, "r >= rho: {tilde} vs {plain}");
        let (tilde, plain) = run(1.0, f64::INFINITY);
        assert!(tilde >= plain - 1e-15, "r <= rho: {tilde} vs {plain}");
        let (tilde, plain) = run(2.0, 2.0);
        assert!((tilde - plain).abs() < 1e-14);
    }

    #[test]
    fn constant_in_time_sample() {
        let mut acc = TimeNormAccumulator::new(BesovSpec::new(1.0, 2.0, 1.0).unwrap(), 2.0).unwrap();
        acc.push(0.0, &[1.0, 2.0]).unwrap();
        acc.push(4.0, &[1.0, 2.0]).unwrap();
        // (4·a_j²)^{1/2} = 2 a_j, then weights 1/2 and 1.
        assert!((acc.tilde() - (0.5 * 2.0 + 4.0)).abs() < 1e-14);
        assert!(acc.push(3.0, &[1.0, 2.0]).is_err());
    }
}
