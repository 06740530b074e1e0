//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by state construction, bound evaluation, inference and I/O.
#[derive(Debug, Error)]
pub enum Error {
    /// A caller-supplied value violates a documented precondition.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// Bound requested for a probe with no phase information (vacuum: the
    /// Cramér-Rao bounds diverge).
    #[error("no phase information: vacuum probe has zero Fisher information")]
    VacuumProbe,

    /// SQL requested for a probe with zero mean photon number.
    #[error("no photons: standard quantum limit requires mean photon number > 0")]
    NoPhotons,

    /// The posterior carries no information (flat over the grid), so no
    /// maximum can be reported.
    #[error("uninformative posterior: density is flat over the grid")]
    UninformativePosterior,

    /// Configuration validation failed; every problem found is listed.
    #[error("invalid configuration:\n{}", format_config_errors(.0))]
    Config(Vec<String>),

    /// Malformed input file (CSV or meta header).
    #[error("parse error: {0}")]
    Parse(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

fn format_config_errors(errors: &[String]) -> String {
    errors
        .iter()
        .map(|e| format!("  - {e}"))
        .collect::<Vec<_>>()
        .join("\n")
}

pub type Result<T> = std::result::Result<T, Error>;
