//! Homodyne measurement model.
//!
//! A homodyne detector reading of the phase-shifted probe is a zero-mean
//! Gaussian draw whose variance is the `xx` entry of the rotated covariance.
//! In the parameterization used throughout, that marginal reads
//!
//! ```text
//! p(x|θ) = exp(-x² / (e^{2r'} Σ_θ²)) / (e^{r'} √(π Σ_θ²)),
//! Σ_θ² = e^{-2r-2r'} cos²θ + e^{2r} sin²θ,
//! ```
//!
//! i.e. `Var[x] = e^{2r'} Σ_θ² / 2`. Sampling is deterministic per seed;
//! see [`crate::rng`] for the frozen generator stack.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::GaussianSampler;
use crate::state::SqueezedThermalState;

/// Reduced marginal variance `Σ_θ²` (the full variance divided by
/// `e^{2r'}/2`).
fn reduced_variance(state: &SqueezedThermalState, theta: f64) -> f64 {
    let (sin_t, cos_t) = theta.sin_cos();
    (-2.0 * state.r() - 2.0 * state.r_prime()).exp() * cos_t * cos_t
        + (2.0 * state.r()).exp() * sin_t * sin_t
}

/// Variance of a single homodyne outcome on the phase-shifted state,
/// `Var[x] = e^{2r'} Σ_θ² / 2`. Agrees with
/// `state.covariance_at(theta).xx()` up to rounding.
pub fn marginal_variance(state: &SqueezedThermalState, theta: f64) -> f64 {
    0.5 * (2.0 * state.r_prime()).exp() * reduced_variance(state, theta)
}

/// Log of the homodyne outcome density, `ln p(x|θ)`.
pub fn log_likelihood(x: f64, theta: f64, state: &SqueezedThermalState) -> f64 {
    let scaled = (2.0 * state.r_prime()).exp() * reduced_variance(state, theta);
    -0.5 * (std::f64::consts::PI * scaled).ln() - x * x / scaled
}

/// Ordered record of homodyne outcomes together with everything needed to
/// regenerate it bit-for-bit: probe state, true phase, and seed.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleSet {
    samples: Vec<f64>,
    state: SqueezedThermalState,
    theta_true: f64,
    seed: u64,
}

impl SampleSet {
    /// Assembles a record from raw outcomes, e.g. data imported from
    /// elsewhere. The provenance fields are taken at face value.
    pub fn from_parts(
        samples: Vec<f64>,
        state: SqueezedThermalState,
        theta_true: f64,
        seed: u64,
    ) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::InvalidParameter(
                "a sample record must hold at least one outcome".into(),
            ));
        }
        if samples.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidParameter(
                "sample outcomes must be finite".into(),
            ));
        }
        Ok(Self {
            samples,
            state,
            theta_true,
            seed,
        })
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn state(&self) -> &SqueezedThermalState {
        &self.state
    }

    pub fn theta_true(&self) -> f64 {
        self.theta_true
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Serializes the record as CSV: a `# meta:` line holding the
    /// provenance as one-line JSON, a `index,x` header, then one row per
    /// outcome. Floats are written with 17 significant digits so the
    /// round-trip through [`SampleSet::from_csv`] is bit-exact.
    pub fn to_csv(&self) -> String {
        let meta = SampleMeta {
            version: crate::ARTIFACT_VERSION.to_string(),
            state: self.state,
            theta_true: self.theta_true,
            seed: self.seed,
            n_samples: self.samples.len(),
        };
        let mut out = String::new();
        writeln!(
            out,
            "# meta: {}",
            serde_json::to_string(&meta).expect("meta serializes")
        )
        .unwrap();
        out.push_str("index,x\n");
        for (i, x) in self.samples.iter().enumerate() {
            writeln!(out, "{i},{:.16e}", x).unwrap();
        }
        out
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_csv())?;
        Ok(())
    }

    /// Parses the CSV form written by [`SampleSet::to_csv`].
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        let meta_line = lines
            .next()
            .ok_or_else(|| Error::Parse("empty sample file".into()))?;
        let json = meta_line
            .strip_prefix("# meta: ")
            .ok_or_else(|| Error::Parse("missing '# meta:' header line".into()))?;
        let meta: SampleMeta =
            serde_json::from_str(json).map_err(|e| Error::Parse(format!("bad meta line: {e}")))?;
        match lines.next() {
            Some("index,x") => {}
            other => {
                return Err(Error::Parse(format!(
                    "expected 'index,x' header, got {other:?}"
                )))
            }
        }
        let mut samples = Vec::with_capacity(meta.n_samples);
        for (k, line) in lines.enumerate() {
            let (idx, val) = line
                .split_once(',')
                .ok_or_else(|| Error::Parse(format!("malformed row {k}: {line:?}")))?;
            if idx.parse::<usize>().ok() != Some(k) {
                return Err(Error::Parse(format!("non-contiguous index at row {k}")));
            }
            let x: f64 = val
                .parse()
                .map_err(|e| Error::Parse(format!("bad float at row {k}: {e}")))?;
            samples.push(x);
        }
        if samples.len() != meta.n_samples {
            return Err(Error::Parse(format!(
                "meta declares {} samples, file holds {}",
                meta.n_samples,
                samples.len()
            )));
        }
        Self::from_parts(samples, meta.state, meta.theta_true, meta.seed)
    }

    pub fn read_csv(path: &Path) -> Result<Self> {
        Self::from_csv(&std::fs::read_to_string(path)?)
    }
}

#[derive(Serialize, Deserialize)]
struct SampleMeta {
    version: String,
    state: SqueezedThermalState,
    theta_true: f64,
    seed: u64,
    n_samples: usize,
}

/// Draws `n_samples` i.i.d. homodyne outcomes at the given phase.
///
/// Regenerating with identical `(state, theta, n_samples, seed)` yields a
/// bit-identical record.
pub fn sample_homodyne(
    state: &SqueezedThermalState,
    theta: f64,
    n_samples: usize,
    seed: u64,
) -> Result<SampleSet> {
    if n_samples == 0 {
        return Err(Error::InvalidParameter(
            "n_samples must be at least 1".into(),
        ));
    }
    if !theta.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "theta must be finite, got {theta}"
        )));
    }
    let variance = marginal_variance(state, theta);
    let mut rng = GaussianSampler::from_seed(seed);
    let samples = (0..n_samples).map(|_| rng.next_scaled(variance)).collect();
    Ok(SampleSet {
        samples,
        state: *state,
        theta_true: theta,
        seed,
    })
}
