//! Bohmian double-slit simulator: wavefield, quantum potential, guided
//! trajectories, canyon-crossing radiation and the Copenhagen comparison.

// `!(x > 0.0)` guards are meant to reject NaN as well.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod constants;
pub mod copenhagen;
pub mod dynamics;
pub mod error;
pub mod exec;
pub mod ode;
pub mod qpotential;
pub mod quad;
pub mod radiation;
pub mod specfun;
pub mod validation;
pub mod wavefield;

pub use error::{Error, Result};
