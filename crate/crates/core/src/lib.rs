//! Spectral-Galerkin solvers for third-order nonlinear acoustics on an
//! interval, with energy diagnostics and a parameter-sweep driver.

pub mod assembly;
pub mod basis;
pub mod config;
pub mod energy;
pub mod error;
pub mod experiment;
pub mod integrate;
pub mod model;
pub mod nonlinear;
pub mod output;

pub use error::{Error, Result};
