//! Conservation checks, striated-regularity time series and inequality
//! probes.

mod energy;
mod ensemble;
mod probes;
mod record;
mod striated;
mod transdiff;

pub use energy::{energy_equality_residual, step_dissipation, EnergySample};
pub use ensemble::{random_field, random_solenoidal_field, random_vector_field, RandomSpectrum};
pub use probes::{
    commutator_sample, compat_temperature_sample, compat_vorticity_sample, inequality_probe, para_vector_sample,
    percentile, striated_velocity_sample, transport_commutator_sample, write_probe_csv, EnsembleConfig, Evaluation,
    ProbeId, ProbeParams, ProbeReport, ProbeRow, MIN_ENSEMBLE,
};
pub use record::{
    format_float, write_csv_header, write_csv_row, DiagnosticsRecord, MarkerSample, PatchRecord, Recorder, CSV_COLUMNS,
};
pub use striated::{directional_derivative_vec, directional_derivative_weak, div_product, StriatedNorms, StriatedParams};
pub use transdiff::{
    check_admissible, trans_diff_bound_probe, write_td_csv, TdBound, TdReport, TdRow, TdSweepConfig, VelocityFamily,
};
