//! Weighted finite element solver for the time-dependent Navier-Stokes
//! equations on polygonal domains with a reentrant corner at the origin.

pub mod analysis;
pub mod error;
pub mod fem;
pub mod manufactured;
pub mod mesh;
pub mod oseen;
pub mod quadrature;
pub mod solver;
pub mod timestep;
pub mod weight;

pub use error::{Error, Result};
