//! Galerkin simulation of a viscous fluid around a rigid disk with Navier
//! slip and prescribed circulation at infinity.

pub mod cli;
pub mod density;
pub mod error;
pub mod forms;
pub mod galerkin;
pub mod geometry;
pub mod harmonic;
pub mod spaces;
pub mod suites;
pub mod tolerances;

pub use error::{Error, Result};
