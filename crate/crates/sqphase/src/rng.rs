//! Reproducible random number generation.
//!
//! Every stochastic path in the crate draws from this module so that runs
//! are bit-reproducible across platforms and releases. The stack is frozen:
//!
//! * stream cipher: ChaCha12 (`rand_chacha`), keyed via `seed_from_u64`
//!   (SplitMix64 key expansion, stable in `rand_core` 0.6);
//! * uniforms: 53-bit mantissa taken from the top bits of `next_u64`;
//! * normals: Box-Muller, both branches used, cosine branch first.
//!
//! Parallel trials never share a generator: each trial derives its own
//! 64-bit seed with [`substream`] and owns an independent `GaussianSampler`.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha12Rng;

const TWO_NEG_53: f64 = 1.0 / (1u64 << 53) as f64;
/// SplitMix64 increment (golden-ratio constant).
const GOLDEN_GAMMA: u64 = 0x9e37_79b9_7f4a_7c15;

/// Derives the seed of substream `index` from a master seed.
///
/// This is the SplitMix64 output function applied to
/// `seed + (index + 1) * gamma`; distinct indices give statistically
/// independent streams and the map is stable by construction.
pub fn substream(seed: u64, index: u64) -> u64 {
    let mut z = seed.wrapping_add(index.wrapping_add(1).wrapping_mul(GOLDEN_GAMMA));
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Standard-normal generator with a fixed, documented algorithm.
#[derive(Debug, Clone)]
pub struct GaussianSampler {
    rng: ChaCha12Rng,
    spare: Option<f64>,
}

impl GaussianSampler {
    pub fn from_seed(seed: u64) -> Self {
        Self {
            rng: ChaCha12Rng::seed_from_u64(seed),
            spare: None,
        }
    }

    /// Uniform draw on `[0, 1)` from the top 53 bits of `next_u64`.
    fn next_uniform(&mut self) -> f64 {
        (self.rng.next_u64() >> 11) as f64 * TWO_NEG_53
    }

    /// One standard-normal draw (Box-Muller).
    pub fn next_standard(&mut self) -> f64 {
        if let Some(z) = self.spare.take() {
            return z;
        }
        // u1 on (0, 1] keeps ln(u1) finite; u2 on [0, 1)
        let u1 = ((self.rng.next_u64() >> 11) + 1) as f64 * TWO_NEG_53;
        let u2 = self.next_uniform();
        let radius = (-2.0 * u1.ln()).sqrt();
        let angle = 2.0 * std::f64::consts::PI * u2;
        self.spare = Some(radius * angle.sin());
        radius * angle.cos()
    }

    /// One zero-mean normal draw with the given variance.
    pub fn next_scaled(&mut self, variance: f64) -> f64 {
        debug_assert!(variance > 0.0);
        variance.sqrt() * self.next_standard()
    }
}
