//! Time integration of the Boussinesq system and of linear
//! transport-diffusion.

mod boussinesq;
mod ifrk;
mod run;
mod transport_diffusion;

pub use boussinesq::{
    Forcing, SimState, Simulation, StepInfo, StepperConfig, ThetaAdvection, XAdvection,
};
pub use ifrk::{ifrk_step, Scheme, Spectra};
pub use run::{run, RunSink};
pub use transport_diffusion::{
    solve_transport_diffusion, solve_transport_diffusion_observed, SourceFn, TdOptions, VelocityFn,
};
