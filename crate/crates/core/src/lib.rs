//! Single-bosonic-mode encoding of finite Hamiltonians, SNAIL gate compilation
//! and Fock-space simulation of the resulting circuits.

pub mod error;
pub mod fock;
pub mod models;
pub mod numerics;
pub mod random;
pub mod simulate;
pub mod snail;
pub mod transpile;
pub mod units;

pub use error::{Result, SbmError};
pub use numerics::{ComplexMatrix, HermitianMatrix, C64};
