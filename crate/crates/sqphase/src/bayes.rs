//! Bayesian phase inference on a grid.
//!
//! The posterior over the phase is the product of the per-outcome homodyne
//! likelihoods times a flat prior `2/π` on `[0, π/2]`, evaluated on a
//! uniform grid and normalized by the trapezoidal rule. All accumulation
//! happens in log space; the working range is restricted to `[0, π/2]`
//! because the marginal variance is strictly monotone there, which makes
//! the phase identifiable (outside it, θ and π−θ are indistinguishable).

use crate::error::{Error, Result};
use crate::measurement::SampleSet;

/// Grid resolution used by the harness unless a config overrides it. Fine
/// enough that posterior widths at N = 1000 span hundreds of grid steps.
pub const DEFAULT_GRID_POINTS: usize = 2048;

const MIN_GRID_POINTS: usize = 64;

/// ln(2/π), the log of the flat prior density on [0, π/2].
fn log_prior() -> f64 {
    (2.0 / std::f64::consts::PI).ln()
}

/// Discretized posterior density over `[0, π/2]`.
///
/// `log_density` is the unnormalized log posterior (likelihood plus log
/// prior); `density` is normalized so its trapezoidal integral is 1.
#[derive(Debug, Clone, PartialEq)]
pub struct PosteriorGrid {
    thetas: Vec<f64>,
    log_density: Vec<f64>,
    density: Vec<f64>,
}

impl PosteriorGrid {
    pub fn thetas(&self) -> &[f64] {
        &self.thetas
    }

    pub fn density(&self) -> &[f64] {
        &self.density
    }

    pub fn log_density(&self) -> &[f64] {
        &self.log_density
    }

    pub fn len(&self) -> usize {
        self.thetas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.thetas.is_empty()
    }

    pub fn step(&self) -> f64 {
        std::f64::consts::FRAC_PI_2 / (self.thetas.len() - 1) as f64
    }

    /// Builds a grid from raw (possibly unnormalized) density values on the
    /// uniform grid implied by `values.len()`; used for synthetic inputs.
    pub fn from_density(values: &[f64]) -> Result<Self> {
        if values.len() < MIN_GRID_POINTS {
            return Err(Error::InvalidParameter(format!(
                "grid needs at least {MIN_GRID_POINTS} points, got {}",
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::InvalidParameter(
                "density values must be finite and non-negative".into(),
            ));
        }
        let thetas = uniform_grid(values.len());
        let log_density = values.iter().map(|v| v.ln()).collect();
        let density = normalize(&thetas, values.to_vec())?;
        Ok(Self {
            thetas,
            log_density,
            density,
        })
    }
}

fn uniform_grid(points: usize) -> Vec<f64> {
    let step = std::f64::consts::FRAC_PI_2 / (points - 1) as f64;
    (0..points).map(|i| i as f64 * step).collect()
}

/// Trapezoidal integral of `ys` over the uniform grid `xs`.
pub(crate) fn trapezoid(xs: &[f64], ys: &[f64]) -> f64 {
    let step = xs[1] - xs[0];
    let interior: f64 = ys[1..ys.len() - 1].iter().sum();
    step * (0.5 * ys[0] + interior + 0.5 * ys[ys.len() - 1])
}

fn normalize(thetas: &[f64], mut density: Vec<f64>) -> Result<Vec<f64>> {
    let mass = trapezoid(thetas, &density);
    if !mass.is_finite() || mass <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "density mass must be positive and finite, got {mass}"
        )));
    }
    for d in &mut density {
        *d /= mass;
    }
    Ok(density)
}

/// Posterior over the phase given a homodyne record.
///
/// For a Gaussian likelihood the data enter only through the sum of
/// squared outcomes, so the log posterior at each grid phase is
/// `N·c(θ) + Σx² / (-e^{2r'}Σ_θ²) + ln(2/π)`; the sum of squares is
/// accumulated with Kahan compensation so the result is independent of
/// sample order to machine precision. Exponentiation subtracts the max
/// log density first, then the trapezoidal rule normalizes.
pub fn posterior(samples: &SampleSet, grid_points: usize) -> Result<PosteriorGrid> {
    if grid_points < MIN_GRID_POINTS {
        return Err(Error::InvalidParameter(format!(
            "grid_points must be at least {MIN_GRID_POINTS}, got {grid_points}"
        )));
    }
    if samples.is_empty() {
        return Err(Error::InvalidParameter(
            "posterior requires at least one sample".into(),
        ));
    }
    let state = samples.state();
    let n = samples.len() as f64;
    let sum_sq = kahan_sum_of_squares(samples.samples());
    let thetas = uniform_grid(grid_points);

    let log_density: Vec<f64> = thetas
        .iter()
        .map(|&theta| {
            let scaled = 2.0 * crate::measurement::marginal_variance(state, theta);
            // N * [-0.5 ln(pi * scaled)] - sum_sq / scaled + ln(2/pi)
            -0.5 * n * (std::f64::consts::PI * scaled).ln() - sum_sq / scaled + log_prior()
        })
        .collect();

    let max_log = log_density.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let density: Vec<f64> = log_density.iter().map(|ld| (ld - max_log).exp()).collect();
    let density = normalize(&thetas, density)?;
    Ok(PosteriorGrid {
        thetas,
        log_density,
        density,
    })
}

fn kahan_sum_of_squares(xs: &[f64]) -> f64 {
    let mut sum = 0.0;
    let mut carry = 0.0;
    for &x in xs {
        let y = x * x - carry;
        let t = sum + y;
        carry = (t - sum) - y;
        sum = t;
    }
    sum
}

/// Prior-only grid: the flat density `2/π` at every point.
pub fn prior_grid(grid_points: usize) -> Result<PosteriorGrid> {
    if grid_points < MIN_GRID_POINTS {
        return Err(Error::InvalidParameter(format!(
            "grid_points must be at least {MIN_GRID_POINTS}, got {grid_points}"
        )));
    }
    let thetas = uniform_grid(grid_points);
    let flat = 2.0 / std::f64::consts::PI;
    Ok(PosteriorGrid {
        log_density: vec![log_prior(); grid_points],
        density: vec![flat; grid_points],
        thetas,
    })
}

/// Posterior-mode estimate of the phase.
///
/// The grid argmax is refined by fitting a parabola to the log density at
/// the argmax and its two neighbors (exact for a locally Gaussian
/// posterior), which removes the grid-step bias. Boundary maxima are
/// returned as-is. A flat posterior has no meaningful mode and errors.
pub fn map_estimate(grid: &PosteriorGrid) -> Result<f64> {
    let d = grid.density();
    let (mut argmax, mut max) = (0usize, f64::NEG_INFINITY);
    let mut min = f64::INFINITY;
    for (i, &v) in d.iter().enumerate() {
        if v > max {
            max = v;
            argmax = i;
        }
        if v < min {
            min = v;
        }
    }
    if max - min <= 1e-15 * max {
        return Err(Error::UninformativePosterior);
    }
    if argmax == 0 || argmax == d.len() - 1 {
        return Ok(grid.thetas()[argmax]);
    }
    let ld = grid.log_density();
    let (l0, l1, l2) = (ld[argmax - 1], ld[argmax], ld[argmax + 1]);
    let denom = l0 - 2.0 * l1 + l2;
    if denom >= 0.0 || !denom.is_finite() {
        return Ok(grid.thetas()[argmax]);
    }
    let offset = 0.5 * (l0 - l2) / denom;
    Ok(grid.thetas()[argmax] + offset * grid.step())
}

/// Posterior variance `⟨θ²⟩ − ⟨θ⟩²` via trapezoidal moments.
pub fn posterior_variance(grid: &PosteriorGrid) -> f64 {
    let thetas = grid.thetas();
    let d = grid.density();
    let first: Vec<f64> = thetas.iter().zip(d).map(|(t, p)| t * p).collect();
    let second: Vec<f64> = thetas.iter().zip(d).map(|(t, p)| t * t * p).collect();
    let mean = trapezoid(thetas, &first);
    let mean_sq = trapezoid(thetas, &second);
    (mean_sq - mean * mean).max(0.0)
}
