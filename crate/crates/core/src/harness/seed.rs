const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

#[inline]
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(GOLDEN);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed for one trial, a pure function of its logical coordinates.
///
/// Each coordinate is folded through a SplitMix64 finalizer, so the seed never
/// depends on scheduling or on how many workers ran the experiment.
pub fn derive_trial_seed(master_seed: u64, scenario_id: u64, algorithm_id: u64, trial_index: u64) -> u64 {
    [scenario_id, algorithm_id, trial_index]
        .into_iter()
        .fold(splitmix64(master_seed), |acc, part| splitmix64(acc ^ splitmix64(part)))
}
