//! Markovian dynamics of the ring coupled to independent thermal baths, one
//! per site through `σ_z`.
//!
//! The production path is the closed-form steady state: thermal inside each
//! sector, with sector weights fixed by the initial state. The Liouvillian
//! is kept as an independent check on small sectors.

mod bath;
mod eigen;
mod liouvillian;
mod steady;

pub use bath::{lamb_shift, rate, BathSpec, SpectralDensity, DEFAULT_ETA, DEFAULT_OMEGA_C};
pub use eigen::{eigenoperators, BohrBins, EigenOperatorSet};
pub use liouvillian::{Liouvillian, MAX_DENSE_DIM};
pub use steady::{p_bf, steady_state_analytic, steady_state_ice, BlockDiagonalState, SectorBlock};
