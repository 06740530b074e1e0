//! Optical phase estimation with a squeezed thermal probe, at desk scale.
//!
//! The crate simulates the full estimation chain: a squeezed (optionally
//! impure) probe picks up an unknown phase, homodyne detection samples the
//! rotated quadrature, and Bayesian inference on the sample record
//! recovers the phase. Alongside the simulation it evaluates the analytic
//! precision landscape — Fisher information, the standard quantum limit,
//! and the optimal/quantum Cramér-Rao bounds — so achieved variances can
//! be compared against what theory allows.
//!
//! Modules:
//! * [`state`] — squeezed thermal states and covariance algebra
//! * [`measurement`] — homodyne likelihood and seeded sampling
//! * [`bounds`] — Fisher information and the SQL/OCRB/QCRB ladder
//! * [`bayes`] — grid posterior, MAP estimate, posterior variance
//! * [`experiments`] — seeded Monte Carlo studies over phases and probes
//! * [`config`], [`report`], [`svg`] — config files, CSV and figure output
//!
//! Determinism: all randomness flows from a single master seed through
//! named substreams (see [`rng`]), so every run — serial or parallel — is
//! reproducible byte for byte.

pub mod bayes;
pub mod bounds;
pub mod config;
pub mod error;
pub mod experiments;
pub mod measurement;
pub mod report;
pub mod rng;
pub mod state;
pub mod svg;

pub use bayes::{map_estimate, posterior, posterior_variance, PosteriorGrid};
pub use bounds::{
    beyond_sql_interval, fisher_information, max_fisher, ocrb, optimal_phase, qcrb, qfi, sql,
    BeyondSqlInterval, BoundsReport,
};
pub use error::{Error, Result};
pub use experiments::{
    purity_scan, run_repeated, run_trial, sweep_theta, ExecMode, ExperimentConfig,
    ExperimentReport, StateSpec,
};
pub use measurement::{log_likelihood, marginal_variance, sample_homodyne, SampleSet};
pub use state::{CovarianceMatrix2, SqueezedThermalState};

/// Version stamp recorded in every emitted file.
pub const ARTIFACT_VERSION: &str = env!("CARGO_PKG_VERSION");
