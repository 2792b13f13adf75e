//! Periodic grids, sampled fields and spectral operators.

mod field;
mod grid;
pub mod ops;
pub mod snapshot;

pub use field::{ScalarField, VectorField2};
pub(crate) use field::lp_norm;
pub use grid::{Grid, GridRef, TWO_THIRDS};
pub use ops::{
    biot_savart, biot_savart_with_report, curl, dealias, divergence, gradient, heat_multiplier,
    laplacian, leray_project, mollify, multiplier, partial, product, recover_pressure, stream_function, Axis,
};
pub use snapshot::Snapshot;
