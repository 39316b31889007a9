//! Per-trial seed derivation.

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 finalizer; a bijection on `u64`.
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed for trial `trial_index` of an experiment with `base_seed`.
///
/// `mix64(base_seed + (trial_index + 1) · γ)` with wrapping arithmetic and
/// `γ = 0x9E3779B97F4A7C15`. The golden-ratio increment is odd, so for a fixed
/// base the map from trial index to seed is a bijection and distinct trials
/// never share a seed.
pub fn derive_seed(base_seed: u64, trial_index: u64) -> u64 {
    mix64(base_seed.wrapping_add(trial_index.wrapping_add(1).wrapping_mul(GOLDEN_GAMMA)))
}
