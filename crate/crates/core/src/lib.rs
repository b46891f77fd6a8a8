//! Pseudo-spin model of a hexameric water ring with proton tunneling.
//!
//! Twelve proton sites sit on the six hydrogen bonds of a hexagonal ring.
//! The crate builds the Hamiltonian in fermionic and pseudo-spin form,
//! computes thermal steady states of the Lindblad dynamics sector by sector,
//! and evaluates coherence and pairwise correlation measures on them.

pub mod error;
pub mod hamiltonian;
pub mod lattice;
pub mod measures;
pub mod numerics;
pub mod open_system;
pub mod sweep;
pub mod units;

pub use error::{Error, Result};
