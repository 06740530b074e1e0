//! Precision bounds for homodyne phase estimation.
//!
//! Per-measurement quantities (Fisher information, its maximum, the quantum
//! Fisher information) are kept separate from the `N`-scaled variance
//! bounds (SQL, OCRB, QCRB); reports always carry `N` explicitly.

use crate::error::{Error, Result};
use crate::state::SqueezedThermalState;

/// Halt bisection once the bracket is this narrow (radians).
const INTERVAL_TOL: f64 = 1e-6;

/// Fisher information of a single homodyne outcome about the phase,
///
/// ```text
/// F(θ) = sin²(2θ) (e^{2r} - e^{-2r-2r'})² / (2 Σ_θ⁴).
/// ```
///
/// Vanishes at θ ∈ {0, π/2} and identically for the vacuum.
pub fn fisher_information(state: &SqueezedThermalState, theta: f64) -> f64 {
    let a = (2.0 * state.r()).exp();
    let b = (-2.0 * state.r() - 2.0 * state.r_prime()).exp();
    let (sin_t, cos_t) = theta.sin_cos();
    let sigma2 = b * cos_t * cos_t + a * sin_t * sin_t;
    let sin_2t = (2.0 * theta).sin();
    sin_2t * sin_2t * (a - b) * (a - b) / (2.0 * sigma2 * sigma2)
}

/// Phase at which the homodyne Fisher information peaks,
/// `θ_opt = arccos(tanh(2r + r')) / 2`; lies in `(0, π/4]`.
pub fn optimal_phase(state: &SqueezedThermalState) -> f64 {
    0.5 * (2.0 * state.r() + state.r_prime()).tanh().acos()
}

/// Maximum of the homodyne Fisher information, `F_max = 2 sinh²(2r + r')`.
pub fn max_fisher(state: &SqueezedThermalState) -> f64 {
    let s = (2.0 * state.r() + state.r_prime()).sinh();
    2.0 * s * s
}

/// Quantum Fisher information per measurement,
/// `H = 8 n_r (n_r + 1) · 2 / (1 + e^{-2r'})`; dominates the homodyne
/// Fisher information and coincides with it for a pure probe. Zero for
/// the vacuum.
pub fn qfi(state: &SqueezedThermalState) -> f64 {
    let nr = state.squeezing_photon_number();
    8.0 * nr * (nr + 1.0) * 2.0 / (1.0 + (-2.0 * state.r_prime()).exp())
}

fn require_informative(state: &SqueezedThermalState) -> Result<f64> {
    let nr = state.squeezing_photon_number();
    if nr <= 0.0 {
        return Err(Error::VacuumProbe);
    }
    Ok(nr)
}

fn require_n_meas(n_meas: u64) -> Result<f64> {
    if n_meas == 0 {
        return Err(Error::InvalidParameter(
            "number of measurements must be at least 1".into(),
        ));
    }
    Ok(n_meas as f64)
}

/// Quantum Cramér-Rao bound on the phase variance after `n_meas`
/// measurements: `[1/(8N n_r(n_r+1))] · (1 + e^{-2r'})/2`. Errors on a
/// vacuum probe, where the bound diverges.
pub fn qcrb(state: &SqueezedThermalState, n_meas: u64) -> Result<f64> {
    let nr = require_informative(state)?;
    let n = require_n_meas(n_meas)?;
    Ok(0.5 * (1.0 + (-2.0 * state.r_prime()).exp()) / (8.0 * n * nr * (nr + 1.0)))
}

/// Best variance attainable with homodyne detection after `n_meas`
/// measurements: `1/(8N n_r(n_r+1)) = 1/(N F_max)`.
pub fn ocrb(state: &SqueezedThermalState, n_meas: u64) -> Result<f64> {
    let nr = require_informative(state)?;
    let n = require_n_meas(n_meas)?;
    Ok(1.0 / (8.0 * n * nr * (nr + 1.0)))
}

/// Standard quantum limit `1/(4Nn)` for a coherent probe of mean photon
/// number `n`. The caller chooses `n`; comparisons in this crate pass the
/// squeezed probe's own mean photon number.
pub fn sql(mean_photon: f64, n_meas: u64) -> Result<f64> {
    if !mean_photon.is_finite() || mean_photon <= 0.0 {
        return Err(Error::NoPhotons);
    }
    let n = require_n_meas(n_meas)?;
    Ok(1.0 / (4.0 * n * mean_photon))
}

/// Contiguous phase interval around `θ_opt` on `[0, π/2]` where the
/// achievable variance beats the SQL, i.e. where `F(θ) > 4n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BeyondSqlInterval {
    pub empty: bool,
    pub theta_low: f64,
    pub theta_high: f64,
}

impl BeyondSqlInterval {
    fn empty() -> Self {
        Self {
            empty: true,
            theta_low: 0.0,
            theta_high: 0.0,
        }
    }

    /// Interval width Δθ; zero when empty.
    pub fn width(&self) -> f64 {
        if self.empty {
            0.0
        } else {
            self.theta_high - self.theta_low
        }
    }
}

/// Locates the beyond-SQL interval by bisecting `F(θ) - 4n` on
/// `[0, θ_opt]` and `[θ_opt, π/2]`. `F` rises from zero to its single
/// maximum at `θ_opt` and falls back to zero, so each bracket holds
/// exactly one crossing. Endpoints are resolved to 1e-6 rad. An empty
/// interval (probe never beats the SQL) is a valid result, not an error.
pub fn beyond_sql_interval(state: &SqueezedThermalState) -> BeyondSqlInterval {
    if state.is_vacuum() {
        return BeyondSqlInterval::empty();
    }
    let target = 4.0 * state.mean_photon_number();
    if max_fisher(state) <= target {
        return BeyondSqlInterval::empty();
    }
    let theta_opt = optimal_phase(state);
    let excess = |theta: f64| fisher_information(state, theta) - target;
    let theta_low = bisect_crossing(excess, 0.0, theta_opt);
    let theta_high = bisect_crossing(excess, std::f64::consts::FRAC_PI_2, theta_opt);
    BeyondSqlInterval {
        empty: false,
        theta_low,
        theta_high,
    }
}

/// Bisection for the sign change of `f` between `below` (where `f < 0`)
/// and `above` (where `f > 0`).
fn bisect_crossing<F: Fn(f64) -> f64>(f: F, below: f64, above: f64) -> f64 {
    let (mut lo, mut hi) = (below, above);
    while (hi - lo).abs() > INTERVAL_TOL {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

/// One row of the analytic precision landscape at a fixed phase.
#[derive(Debug, Clone, Copy)]
pub struct BoundsReport {
    pub theta: f64,
    pub fisher: f64,
    pub sql: f64,
    pub ocrb: f64,
    pub qcrb: f64,
    pub n_meas: u64,
    pub mean_photon: f64,
}

impl BoundsReport {
    /// Cramér-Rao variance floor at this phase, `1/(N F(θ))`; `None`
    /// where the Fisher information vanishes (the bound diverges).
    pub fn inv_nf(&self) -> Option<f64> {
        if self.fisher > 0.0 {
            Some(1.0 / (self.n_meas as f64 * self.fisher))
        } else {
            None
        }
    }
}

/// Evaluates the full bound ladder at one phase. Errors on a vacuum probe.
pub fn bounds_report(
    state: &SqueezedThermalState,
    theta: f64,
    n_meas: u64,
) -> Result<BoundsReport> {
    let mean_photon = state.mean_photon_number();
    Ok(BoundsReport {
        theta,
        fisher: fisher_information(state, theta),
        sql: sql(mean_photon, n_meas)?,
        ocrb: ocrb(state, n_meas)?,
        qcrb: qcrb(state, n_meas)?,
        n_meas,
        mean_photon,
    })
}
