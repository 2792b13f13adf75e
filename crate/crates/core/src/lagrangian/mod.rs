//! Flow maps, boundary markers, level sets and transport of the striation
//! vector field.

mod boundary;
mod flow;
mod levelset;
mod patch;
mod spline;
mod transport;

pub use boundary::{boundary_c1eps_norm, curve_c1eps_norm, BoundaryNorm, MIN_MARKERS};
pub use flow::{
    det, mat_mul, mat_vec, rigid_rotation, still, AnalyticFlow, FlowSampler, GriddedFlow, Mat2,
    TimeLinearFlow, IDENTITY,
};
pub use levelset::{advect_level_set, hausdorff, marching_squares, LevelSet};
pub use patch::{
    advect_markers, polygon_area, seed_markers, MarkerScheme, PatchState, RedistributionEvent,
    SPACING_RATIO_LIMIT,
};
pub use spline::{curve_tangents, spectral_derivative, PeriodicSpline};
pub use transport::{
    advect_cubic, advect_monotone, departure_points, departure_points_flow, evolve_x_eulerian,
};
