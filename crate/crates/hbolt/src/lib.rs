//! Runs, sweeps, file formats and validation suites for the spectral
//! Boltzmann solver in `hbolt-core`.

pub mod config;
pub mod error;
pub mod io;
pub mod sim;
pub mod validate;

pub use config::RunConfig;
pub use error::{Error, Result};
