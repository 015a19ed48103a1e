//! Per-stage seed derivation.
//!
//! Every random stage of a run gets its own stream, derived from the single
//! master seed and a stage label (plus an index for batches), so adding or
//! reordering stages never shifts the random numbers of the others:
//!
//! ```text
//! stage_seed = splitmix64(master ^ fnv1a(label) ^ splitmix64(index))
//! ```

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;

/// One step of the SplitMix64 output function.
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn fnv1a(label: &str) -> u64 {
    label
        .bytes()
        .fold(FNV_OFFSET, |h, b| (h ^ b as u64).wrapping_mul(FNV_PRIME))
}

/// Seed for stage `label`, item `index` of a run seeded with `master`.
pub fn derive(master: u64, label: &str, index: u64) -> u64 {
    splitmix64(master ^ fnv1a(label) ^ splitmix64(index))
}
