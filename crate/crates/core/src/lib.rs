//! Pseudo-spectral solver for the two-dimensional Boussinesq system with
//! temperature patches, plus Littlewood–Paley diagnostics.
//!
//! The crate is organised bottom-up:
//!
//! * [`spectral`] holds grids, fields and the Fourier-side operators.
//! * [`lp`] builds dyadic blocks, Besov norms and Bony paraproducts.
//! * [`lagrangian`] tracks boundary markers, flow-map Jacobians and level sets.
//! * [`solver`] advances the coupled system.
//! * [`diagnostics`] turns a run into time series and inequality probes.

pub mod diagnostics;
pub mod error;
pub mod interp;
pub mod lagrangian;
pub mod lp;
pub mod solver;
pub mod spectral;

pub use error::{Error, Result};
pub use spectral::{Grid, GridRef, ScalarField, VectorField2};
