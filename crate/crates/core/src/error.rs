use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("site index {0} is outside 1..=12")]
    InvalidSite(i64),

    #[error("basis word {0:#x} does not fit in 12 bits")]
    InvalidBasisState(u32),

    #[error("edge occupancy {0} is outside 0..=2")]
    InvalidOccupancy(u8),

    #[error("kept sites must be distinct, got ({0}, {0})")]
    RepeatedSite(u8),

    #[error("invalid model parameters: {0}")]
    InvalidParams(String),

    #[error("basis list is empty")]
    EmptyBasis,

    #[error("Hamiltonian couples {from:#014b} to {to:#014b} outside the requested basis (|element| = {magnitude:e})")]
    SectorLeak { from: u16, to: u16, magnitude: f64 },

    #[error("matrix is not Hermitian (max asymmetry {residual:e})")]
    NotHermitian { residual: f64 },

    #[error("matrix is not positive semidefinite (min eigenvalue {min_eigenvalue:e})")]
    NotPositive { min_eigenvalue: f64 },

    #[error("trace is {0}, expected 1")]
    BadTrace(f64),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("temperature {0} K is not allowed")]
    InvalidTemperature(f64),

    #[error("spectrum contains non-finite values")]
    NonFiniteSpectrum,

    #[error("invalid bath: {0}")]
    InvalidBath(String),

    #[error("sector dimension {dim} exceeds the dense Liouvillian limit {max}")]
    DimensionTooLarge { dim: usize, max: usize },

    #[error("the generator has {0} independent stationary blocks")]
    NonUniqueSteadyState(usize),

    #[error("time grid must be non-negative and strictly increasing")]
    NonMonotoneTimeGrid,

    #[error("density matrix basis does not match: {0}")]
    BasisMismatch(String),

    #[error("initial state has no weight on any of the given sectors")]
    NoSectorWeight,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("no records to write")]
    EmptyRecords,

    #[error("numerical failure at T = {temperature} K: {source}")]
    AtTemperature {
        temperature: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("cannot write {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}
