//! Deterministic random streams.
//!
//! Everything random in this crate flows through [`Prng`], a SplitMix64
//! generator. The algorithm is fully specified by integer arithmetic, so a
//! seed reproduces the same stream on every platform. Transcendentals in the
//! Gaussian path go through `libm` rather than the system math library to keep
//! the produced bits platform-independent too.
//!
//! Independent streams come from [`Prng::child`]: one release seed fans out
//! into per-class and per-image generators whose draws do not interact, so
//! masks can be generated in any order (or in parallel) with identical
//! results.

use crate::error::{Error, Result};

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 output mixing function.
#[inline]
fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Deterministic pseudo-random generator (SplitMix64).
///
/// Not cryptographic: this is reproducibility machinery, not an obfuscation
/// guarantee.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Prng {
    state: u64,
}

impl Prng {
    pub fn new(seed: u64) -> Self {
        Prng { state: seed }
    }

    /// Independent stream for `(seed, tag)`. Distinct tags give distinct
    /// streams regardless of how many draws any other stream has made.
    pub fn child(seed: u64, tag: u64) -> Self {
        let scrambled = seed ^ tag.wrapping_add(1).wrapping_mul(GOLDEN_GAMMA);
        Prng::new(mix(scrambled))
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN_GAMMA);
        mix(self.state)
    }

    /// Uniform draw in `[0, 1)` with 53-bit resolution.
    #[inline]
    pub fn next_unit(&mut self) -> f64 {
        const DEN: f64 = (1u64 << 53) as f64;
        (self.next_u64() >> 11) as f64 / DEN
    }

    /// Gaussian draw via Box-Muller.
    ///
    /// Consumes exactly two unit draws (the sine branch is discarded), so
    /// stream positions stay computable in closed form. `u1` is taken as
    /// `1 - next_unit` to keep it away from zero.
    #[inline]
    pub fn next_gaussian(&mut self, mu: f64, sigma: f64) -> f64 {
        debug_assert!(sigma >= 0.0);
        let u1 = 1.0 - self.next_unit();
        let u2 = self.next_unit();
        let r = libm::sqrt(-2.0 * libm::log(u1));
        mu + sigma * (r * libm::cos(2.0 * std::f64::consts::PI * u2))
    }

    /// Validated Gaussian draw; rejects negative `sigma`.
    pub fn try_next_gaussian(&mut self, mu: f64, sigma: f64) -> Result<f64> {
        if sigma < 0.0 {
            return Err(Error::param(format!("sigma must be >= 0, got {sigma}")));
        }
        Ok(self.next_gaussian(mu, sigma))
    }

    /// Uniform draw in `{0 .. n-1}` by floor-scaling one unit draw.
    #[inline]
    pub fn next_index(&mut self, n: usize) -> usize {
        debug_assert!(n > 0);
        let i = (self.next_unit() * n as f64) as usize;
        i.min(n - 1)
    }
}

/// Parses a 64-bit seed given in decimal or `0x`-prefixed hex.
pub fn parse_seed(text: &str) -> Result<u64> {
    let t = text.trim();
    let parsed = if let Some(hex) = t.strip_prefix("0x").or_else(|| t.strip_prefix("0X")) {
        u64::from_str_radix(hex, 16)
    } else {
        t.parse::<u64>()
    };
    parsed.map_err(|_| Error::param(format!("cannot parse seed {text:?} as a 64-bit value")))
}
