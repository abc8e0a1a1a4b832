//! Statevector simulation, a fermionic exact-diagonalisation oracle, run
//! configuration and the verification suite for the circuits compiled by
//! `dkhub-core`.

pub mod config;
pub mod io;
pub mod oracle;
pub mod pipeline;
pub mod sim;
pub mod verify;

use dkhub_core::compile::CompileError;
use dkhub_core::dk_mapping::MappingError;

/// Any failure across the pipelines.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Config(#[from] config::ConfigError),
    #[error("compilation failed: {0}")]
    Compile(#[from] CompileError),
    #[error("mapping failed: {0}")]
    Mapping(#[from] MappingError),
    #[error("simulation failed: {0}")]
    Sim(#[from] sim::SimError),
    #[error("green's function failed: {0}")]
    Greens(#[from] sim::GreensError),
    #[error("oracle failed: {0}")]
    Oracle(#[from] oracle::OracleError),
    #[error("{0}")]
    Usage(String),
}
