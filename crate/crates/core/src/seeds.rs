//! Deterministic derivation of independent RNG stream seeds.
//!
//! Every random stream in an experiment is keyed by a pure function of the
//! base seed: trial streams by `(base, trial index)`, and within a trial the
//! problem-generation, amplifier-noise, and per-algorithm circuit-noise
//! streams by fixed tags. This makes trial execution order and parallelism
//! irrelevant to the output, and lets all algorithms in a trial share the
//! amplifier stream (same derived seed) while the diode algorithms draw
//! circuit noise from streams that differ per algorithm.
//!
//! The mixing function is splitmix64, a fixed, platform-independent bijection
//! with good avalanche behavior. The derived values are part of the crate's
//! reproducibility contract: changing them changes every published curve, so
//! the unit tests freeze a few outputs.

/// Stage tag for the problem-generation stream of a trial.
const TAG_PROBLEM: u64 = 0x70726f626c656d00; // "problem\0"
/// Stage tag for the per-trial noise seed handed to every solver config.
const TAG_NOISE: u64 = 0x6e6f697365000000; // "noise\0\0\0"
/// Stage tag for the amplifier stream (shared by all algorithms).
const TAG_AMPLIFIER: u64 = 0x616d706c69666900; // "amplifi\0"
/// Stage tag for the circuit (OEM/EOM) stream family.
const TAG_CIRCUIT: u64 = 0x6369726375697400; // "circuit\0"

/// splitmix64 finalizer: one step of the reference generator.
fn splitmix64(seed: u64) -> u64 {
    let mut z = seed.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Combine two words into a well-mixed derived seed.
fn mix(a: u64, b: u64) -> u64 {
    splitmix64(a ^ splitmix64(b))
}

/// FNV-1a over a byte string; folds labels into stream tags and serves as
/// the config fingerprint hash.
pub fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01B3);
    }
    h
}

/// Seed of trial `t` under `base`.
pub fn trial_seed(base: u64, trial: u64) -> u64 {
    mix(base, trial)
}

/// Seed for the problem-generation stream of a trial.
pub fn problem_seed(trial_seed: u64) -> u64 {
    mix(trial_seed, TAG_PROBLEM)
}

/// Per-trial noise seed; the harness writes this into every solver config of
/// the trial so the amplifier stream (derived from it algorithm-independently)
/// is shared.
pub fn noise_seed(trial_seed: u64) -> u64 {
    mix(trial_seed, TAG_NOISE)
}

/// Seed of the amplifier-noise stream; depends only on the noise seed, so all
/// algorithms in a trial replay the identical stream.
pub fn amplifier_stream_seed(noise_seed: u64) -> u64 {
    mix(noise_seed, TAG_AMPLIFIER)
}

/// Seed of the circuit-noise (OEM/EOM) stream for one algorithm; folding the
/// label in keeps the diode-ℓ1 and diode-MCP streams independent.
pub fn circuit_stream_seed(noise_seed: u64, algorithm_label: &str) -> u64 {
    mix(
        noise_seed,
        mix(TAG_CIRCUIT, fnv1a(algorithm_label.as_bytes())),
    )
}
