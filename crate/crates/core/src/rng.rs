//! Counter-based deterministic random streams.
//!
//! Every Monte-Carlo trial draws from its own stream, derived from
//! `(seed, stream_id)`. The generator is a pure function of the counter, so
//! results are bit-identical for any execution order or worker count. The
//! output sequence is the SplitMix64 sequence started at a mixed per-stream
//! base; Gaussians come from a fixed Box-Muller transform of consecutive
//! uniforms. Not cryptographically secure.

use crate::math;

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;
const STREAM_SALT: u64 = 0xD1B5_4A32_D192_ED03;
const TWO_PI: f64 = core::f64::consts::TAU;

/// SplitMix64 finalizer.
#[inline(always)]
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// One independent random stream, addressable by `(seed, stream_id)`.
#[derive(Debug, Clone)]
pub struct RngStream {
    base: u64,
    counter: u64,
    spare_gaussian: Option<f64>,
}

impl RngStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        let base = mix64(seed ^ GOLDEN).wrapping_add(mix64(stream_id ^ STREAM_SALT));
        RngStream { base, counter: 0, spare_gaussian: None }
    }

    #[inline(always)]
    pub fn next_u64(&mut self) -> u64 {
        let x = self.base.wrapping_add(self.counter.wrapping_mul(GOLDEN)).wrapping_add(GOLDEN);
        self.counter += 1;
        mix64(x)
    }

    /// Uniform draw in the open interval (0, 1); never returns 0 or 1.
    #[inline(always)]
    pub fn next_uniform(&mut self) -> f64 {
        ((self.next_u64() >> 11) as f64 + 0.5) * (1.0 / 9_007_199_254_740_992.0)
    }

    /// Standard exponential draw by inversion.
    #[inline(always)]
    pub fn next_exponential(&mut self) -> f64 {
        -math::ln(self.next_uniform())
    }

    /// Standard Gaussian draw (Box-Muller; the second coordinate is cached).
    #[inline]
    pub fn next_gaussian(&mut self) -> f64 {
        if let Some(z) = self.spare_gaussian.take() {
            return z;
        }
        let r = math::sqrt(-2.0 * math::ln(self.next_uniform()));
        let theta = TWO_PI * self.next_uniform();
        self.spare_gaussian = Some(r * math::sin(theta));
        r * math::cos(theta)
    }
}
