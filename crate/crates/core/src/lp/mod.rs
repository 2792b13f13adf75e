//! Littlewood–Paley analysis: dyadic blocks, Besov norms, time-frequency
//! norms and Bony's paraproduct calculus.

mod besov;
mod filter;
mod para;

pub use besov::{aggregate, besov_norm, besov_norm_vec, BesovSpec, TimeNormAccumulator};
pub use filter::{
    chi0, phi, smooth_step, DyadicDecomposition, DyadicFilterBank, ANNULUS_INNER, DEFAULT_N0,
    LOW_PASS_OUTER,
};
pub use para::{para_vector_field, paraproduct, paraproduct_pair, remainder, striated_source};
