//! Deterministic seed derivation.
//!
//! Every run's randomness is derived from one root seed by splitmix64
//! mixing over (root seed, problem id, cell id, run index), so adding a
//! strategy to a batch never perturbs another strategy's runs.

pub fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = x;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// FNV-1a over the bytes of a label.
pub fn hash_label(s: &str) -> u64 {
    let mut h: u64 = 0xCBF2_9CE4_8422_2325;
    for b in s.bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01B3);
    }
    h
}

pub fn mix(h: u64, x: u64) -> u64 {
    splitmix64(h ^ x)
}

/// Seed for run `run_index` of cell `cell` on problem `problem`.
pub fn run_seed(root_seed: u64, problem: &str, cell: &str, run_index: u32) -> u64 {
    mix(
        mix(mix(root_seed, hash_label(problem)), hash_label(cell)),
        run_index as u64,
    )
}

/// Scheduling stream seed for a run (aperiodic leg draws, split shuffles),
/// kept separate from the genetic-operator stream.
pub fn sched_seed(run_seed: u64) -> u64 {
    mix(run_seed, 0x5CED_u64)
}
