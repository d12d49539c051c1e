//! Counter-based seed derivation.
//!
//! Every random draw in a benchmark is keyed by a path of integers
//! `(stream, task, repeat, …)` below the master seed. The derived seed is a
//! pure function of that path, so the order in which workers pick up tasks
//! cannot change any output. Each path component is folded in with the
//! SplitMix64 finalizer:
//!
//! ```text
//! h₀ = mix(master)
//! hₖ = mix(hₖ₋₁ ⊕ mix(cₖ + (k + 1) · 0x9E3779B97F4A7C15))
//! ```

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

pub const SIMULATION: u64 = 1;
pub const CV_PLAN: u64 = 2;
pub const VALIDATION: u64 = 3;
pub const INNER: u64 = 4;
pub const TUNING_POOL: u64 = 5;

/// SplitMix64 output function.
pub fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn derive(master: u64, path: &[u64]) -> u64 {
    path.iter().enumerate().fold(mix(master), |h, (k, &c)| {
        mix(h ^ mix(c.wrapping_add((k as u64 + 1).wrapping_mul(GOLDEN))))
    })
}
