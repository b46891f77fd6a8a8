//! Physical constants in the crate's unit system (meV, K, ps).

/// Boltzmann constant, meV/K.
pub const K_B: f64 = 0.086_173_332_62;

/// Reduced Planck constant, meV·ps.
pub const HBAR: f64 = 0.658_211_956_9;
