//! Squeezed thermal probe states and their phase-space algebra.
//!
//! Quadrature convention: vacuum variance is 1/2 in both quadratures, so a
//! probe squeezed by `r` with extra antisqueezing noise `r'` has base
//! covariance `diag(e^{-2r}, e^{2r+2r'}) / 2`. A phase shift acts as a
//! rotation in phase space; all state-level quantities (photon number,
//! purity, Wigner density) follow from the covariance matrix.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `20 / ln(10)`: decibels per unit of (anti)squeezing parameter.
const DB_PER_NEPER: f64 = 20.0 / std::f64::consts::LN_10;

/// Single-mode squeezed thermal state, parameterized by the squeezing `r`
/// and the extra antisqueezing `r'` (both dimensionless, >= 0).
///
/// The squeezed quadrature variance is `e^{-2r}/2 <= 1/2` and the
/// antisqueezed one is `e^{2r+2r'}/2 >= 1/2`; `r' = 0` is a pure squeezed
/// vacuum. Values are immutable; operations return new values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SqueezedThermalState {
    r: f64,
    r_prime: f64,
}

impl SqueezedThermalState {
    /// Builds a state from the squeezing parameters, rejecting negative or
    /// non-finite inputs rather than clamping them.
    pub fn new(r: f64, r_prime: f64) -> Result<Self> {
        if !r.is_finite() || r < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "squeezing parameter r must be finite and >= 0, got {r}"
            )));
        }
        if !r_prime.is_finite() || r_prime < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "antisqueezing parameter r_prime must be finite and >= 0, got {r_prime}"
            )));
        }
        Ok(Self { r, r_prime })
    }

    /// The vacuum state (`r = r' = 0`).
    pub fn vacuum() -> Self {
        Self { r: 0.0, r_prime: 0.0 }
    }

    /// Builds a state from measured noise levels in dB relative to the
    /// vacuum (shot-noise) variance: `squeezing_db` is the magnitude of the
    /// noise suppression below the SQL, `antisqueezing_db` the amplification
    /// above it. Requires `antisqueezing_db >= squeezing_db >= 0` so that
    /// the implied extra noise is non-negative.
    pub fn from_db(squeezing_db: f64, antisqueezing_db: f64) -> Result<Self> {
        if !squeezing_db.is_finite() || squeezing_db < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "squeezing_db must be finite and >= 0, got {squeezing_db}"
            )));
        }
        if !antisqueezing_db.is_finite() || antisqueezing_db < squeezing_db {
            return Err(Error::InvalidParameter(format!(
                "antisqueezing_db ({antisqueezing_db}) must be >= squeezing_db ({squeezing_db}); \
                 a smaller value would imply negative extra noise"
            )));
        }
        Self::new(
            squeezing_db / DB_PER_NEPER,
            (antisqueezing_db - squeezing_db) / DB_PER_NEPER,
        )
    }

    /// Reports the state as `(squeezing_db, antisqueezing_db)`, the inverse
    /// of [`SqueezedThermalState::from_db`].
    pub fn to_db(&self) -> (f64, f64) {
        (
            self.r * DB_PER_NEPER,
            (self.r + self.r_prime) * DB_PER_NEPER,
        )
    }

    /// Squeezing parameter `r`.
    pub fn r(&self) -> f64 {
        self.r
    }

    /// Extra antisqueezing parameter `r'`.
    pub fn r_prime(&self) -> f64 {
        self.r_prime
    }

    pub fn is_vacuum(&self) -> bool {
        self.r == 0.0 && self.r_prime == 0.0
    }

    /// Base covariance `diag(e^{-2r}, e^{2r+2r'}) / 2` (no phase shift).
    pub fn base_covariance(&self) -> CovarianceMatrix2 {
        self.covariance_at(0.0)
    }

    /// Covariance matrix after a phase shift `theta`.
    ///
    /// The rotation mixes the squeezed and antisqueezed variances:
    /// `xx = (e^{-2r} cos^2 θ + e^{2r+2r'} sin^2 θ)/2` and symmetrically for
    /// `pp`, with off-diagonal `(e^{2r+2r'} - e^{-2r}) sin(2θ)/4`.
    /// The determinant `e^{2r'}/4` is rotation-invariant.
    pub fn covariance_at(&self, theta: f64) -> CovarianceMatrix2 {
        debug_assert!(theta.is_finite(), "phase must be finite");
        let sq = (-2.0 * self.r).exp();
        let asq = (2.0 * self.r + 2.0 * self.r_prime).exp();
        let (sin_t, cos_t) = theta.sin_cos();
        let (sin2, cos2) = (sin_t * sin_t, cos_t * cos_t);
        CovarianceMatrix2 {
            xx: 0.5 * (sq * cos2 + asq * sin2),
            xp: 0.25 * (asq - sq) * (2.0 * theta).sin(),
            pp: 0.5 * (asq * cos2 + sq * sin2),
        }
    }

    /// Photon number contributed by the squeezing alone,
    /// `n_r = sinh^2(r + r'/2)`.
    pub fn squeezing_photon_number(&self) -> f64 {
        let s = (self.r + 0.5 * self.r_prime).sinh();
        s * s
    }

    /// Mean photon number `n = e^{r'} n_r + (e^{r'} - 1)/2`, which reduces
    /// to `sinh^2 r` for a pure squeezed vacuum.
    pub fn mean_photon_number(&self) -> f64 {
        let erp = self.r_prime.exp();
        erp * self.squeezing_photon_number() + 0.5 * (erp - 1.0)
    }

    /// Purity `1/(2 sqrt(det σ)) = e^{-r'}`; equals 1 exactly when `r' = 0`.
    pub fn purity(&self) -> f64 {
        (-self.r_prime).exp()
    }

    /// Wigner density of the phase-shifted state at the phase-space point
    /// `(x, p)`. Normalized: integrates to 1 over the plane. This is a
    /// helper for plots and checks, not part of the inference path.
    pub fn wigner_value(&self, theta: f64, x: f64, p: f64) -> f64 {
        let cov = self.covariance_at(theta);
        let det = cov.det();
        // quadratic form X^T σ^{-1} X via the adjugate of the 2x2 matrix
        let quad = (cov.pp * x * x - 2.0 * cov.xp * x * p + cov.xx * p * p) / det;
        (-0.5 * quad).exp() / (2.0 * std::f64::consts::PI * det.sqrt())
    }
}

/// Symmetric 2x2 phase-space covariance matrix in quadrature units
/// (vacuum variance 1/2).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CovarianceMatrix2 {
    xx: f64,
    xp: f64,
    pp: f64,
}

/// Relative slack on the Heisenberg bound `det >= 1/4` to absorb rounding
/// in covariances obtained by rotation.
const DET_SLACK: f64 = 1e-12;

impl CovarianceMatrix2 {
    /// Builds a covariance matrix, enforcing positive definiteness and the
    /// Heisenberg bound `det >= 1/4` (up to rounding slack).
    pub fn new(xx: f64, xp: f64, pp: f64) -> Result<Self> {
        if !(xx.is_finite() && xp.is_finite() && pp.is_finite()) {
            return Err(Error::InvalidParameter(
                "covariance entries must be finite".into(),
            ));
        }
        if xx <= 0.0 || pp <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "variances must be positive, got xx={xx}, pp={pp}"
            )));
        }
        let det = xx * pp - xp * xp;
        if det <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "covariance must be positive definite, got det={det}"
            )));
        }
        if det < 0.25 * (1.0 - DET_SLACK) {
            return Err(Error::InvalidParameter(format!(
                "covariance violates the Heisenberg bound det >= 1/4, got det={det}"
            )));
        }
        Ok(Self { xx, xp, pp })
    }

    pub fn xx(&self) -> f64 {
        self.xx
    }

    pub fn xp(&self) -> f64 {
        self.xp
    }

    pub fn pp(&self) -> f64 {
        self.pp
    }

    pub fn det(&self) -> f64 {
        self.xx * self.pp - self.xp * self.xp
    }

    pub fn trace(&self) -> f64 {
        self.xx + self.pp
    }
}

/// Deserialization goes through [`SqueezedThermalState::new`] so invalid
/// parameter values are rejected at the boundary.
impl<'de> Deserialize<'de> for SqueezedThermalState {
    fn deserialize<D>(deserializer: D) -> std::result::Result<Self, D::Error>
    where
        D: serde::Deserializer<'de>,
    {
        #[derive(Deserialize)]
        struct Raw {
            r: f64,
            r_prime: f64,
        }
        let raw = Raw::deserialize(deserializer)?;
        SqueezedThermalState::new(raw.r, raw.r_prime).map_err(serde::de::Error::custom)
    }
}
