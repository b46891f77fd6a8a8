//! Temperature sweeps of the ice-sector steady state, their CSV and plot
//! outputs, and the self-check suite behind `hexice validate`.

mod config;
mod output;
mod run;
mod validate;

pub use config::{
    parse_pairs, temperature_grid, SweepConfig, ValidationDepth, DEFAULT_TMAX, DEFAULT_TMIN, DEFAULT_TSTEP,
};
pub use output::{
    csv_header, csv_string, emit_csv, emit_plot_script, format_g12, MARKER_DISORDERING, MARKER_GLASS, MARKER_ORDERING,
};
pub use run::{evaluate, run_sweep, PairRecord, SweepRecord};
pub use validate::{
    edge_block, ice_dynamics_check, spectral_mismatch, validate, Check, Fault, ValidationReport, ICE_RELAXATION_TIME,
};
