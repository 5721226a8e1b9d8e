//! Deterministic random number generation.
//!
//! The generator is xoshiro256++ seeded by SplitMix64 expansion of a `u64`
//! seed. Normals come from Box-Muller with both outputs of each pair used.
//! This exact construction is part of the file/CSV compatibility contract
//! (see `docs/formats.md`): any reimplementation that follows it draws
//! bit-identical streams, so experiment outputs can be compared across
//! languages.

use std::f64::consts::TAU;

const SPLITMIX_GAMMA: u64 = 0x9e37_79b9_7f4a_7c15;

/// One SplitMix64 step starting from `state`: advances by the golden-ratio
/// increment and mixes. Used both for seed expansion and for deriving
/// per-trial seeds.
pub fn splitmix64(state: u64) -> u64 {
    let mut z = state.wrapping_add(SPLITMIX_GAMMA);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed for trial `index` under `master_seed`. Trials get decorrelated
/// streams while staying reproducible from a single master seed.
pub fn trial_seed(master_seed: u64, index: u64) -> u64 {
    splitmix64(master_seed ^ index)
}

/// xoshiro256++ generator with a Box-Muller spare-normal cache.
///
/// The cache is part of the generator state: `normal()` consumes two
/// uniforms on every other call and hands out the second Box-Muller output
/// in between, so a stream of normals uses every draw.
#[derive(Debug, Clone)]
pub struct Rng {
    state: [u64; 4],
    spare_normal: Option<f64>,
}

#[inline]
fn rotl(x: u64, k: u32) -> u64 {
    x.rotate_left(k)
}

impl Rng {
    /// Builds the generator from a `u64` seed by taking four consecutive
    /// SplitMix64 outputs as the initial state.
    pub fn from_seed(seed: u64) -> Self {
        let mut s = seed;
        let mut state = [0u64; 4];
        for slot in &mut state {
            s = s.wrapping_add(SPLITMIX_GAMMA);
            let mut z = s;
            z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
            z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
            *slot = z ^ (z >> 31);
        }
        Rng {
            state,
            spare_normal: None,
        }
    }

    pub fn next_u64(&mut self) -> u64 {
        let s = &mut self.state;
        let result = rotl(s[0].wrapping_add(s[3]), 23).wrapping_add(s[0]);
        let t = s[1] << 17;
        s[2] ^= s[0];
        s[3] ^= s[1];
        s[1] ^= s[2];
        s[0] ^= s[3];
        s[2] ^= t;
        s[3] = rotl(s[3], 45);
        result
    }

    /// Uniform in `[0, 1)` with 53 bits of precision.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in `(0, 1]`; safe as a logarithm argument.
    fn next_open_closed(&mut self) -> f64 {
        1.0 - self.next_f64()
    }

    /// Uniform in `[lo, hi)`.
    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_f64()
    }

    /// Uniform integer in `[0, n)`. Bias is negligible for the small `n`
    /// used here (dataset mode picking).
    pub fn index(&mut self, n: usize) -> usize {
        debug_assert!(n > 0);
        ((self.next_f64() * n as f64) as usize).min(n - 1)
    }

    /// Standard normal draw via Box-Muller.
    ///
    /// Pairs of uniforms `(u1, u2)` with `u1` in `(0, 1]` produce
    /// `r·cos(2πu2)` first and `r·sin(2πu2)` on the following call,
    /// where `r = sqrt(-2 ln u1)`.
    pub fn normal(&mut self) -> f64 {
        if let Some(z) = self.spare_normal.take() {
            return z;
        }
        let u1 = self.next_open_closed();
        let u2 = self.next_f64();
        let r = (-2.0 * u1.ln()).sqrt();
        let angle = TAU * u2;
        self.spare_normal = Some(r * angle.sin());
        r * angle.cos()
    }

    pub fn normal_vec(&mut self, len: usize) -> Vec<f64> {
        (0..len).map(|_| self.normal()).collect()
    }
}
