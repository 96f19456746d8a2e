use std::path::PathBuf;

use thiserror::Error;

use crate::entropy::EntropyReport;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("non-finite sample {value} at index {index}")]
    NonFinite { index: usize, value: f64 },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("density not normalized: integral = {integral} (tolerance {tolerance:e})")]
    NotNormalized { integral: f64, tolerance: f64 },

    #[error("negative density {value} at index {index}")]
    NegativeDensity { index: usize, value: f64 },

    #[error("ground state did not converge after {iterations} iterations (last residual {residual:e})")]
    NonConvergence { iterations: usize, residual: f64 },

    #[error(
        "wavefunction reaches the box edge (psi = {value:e} near r_max = {r_max}); increase r_max"
    )]
    BoundaryClipping { value: f64, r_max: f64 },

    #[error(
        "momentum distribution normalization defect {defect:e} exceeds {limit:e}; \
         increase k_max or refine the radial grid"
    )]
    MomentumLeakage { defect: f64, limit: f64 },

    #[error("entropy sum {s_total} exceeds its upper bound {s_max}")]
    BoundViolation { s_total: f64, s_max: f64 },

    #[error("sweep failed at N = {n_particles}: {source}")]
    SweepFailed {
        n_particles: u64,
        #[source]
        source: Box<Error>,
        /// Reports for the N values that did succeed, in increasing N.
        partial: Vec<(u64, EntropyReport)>,
    },

    #[error("{}:{line}: {message}", path.display())]
    Ingest {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("i/o error on {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    /// True for failures originating in the ground-state solver.
    pub fn is_solver_failure(&self) -> bool {
        match self {
            Error::NonConvergence { .. }
            | Error::BoundaryClipping { .. }
            | Error::MomentumLeakage { .. }
            | Error::BoundViolation { .. } => true,
            Error::SweepFailed { source, .. } => source.is_solver_failure(),
            _ => false,
        }
    }
}
