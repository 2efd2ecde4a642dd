use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::algorithms::{ResolvedAlgorithm, SamplerState, Status};
use crate::error::{Error, Result};
use crate::scenario::{BanditInstance, RewardStreams};

/// Stream id reserved for an algorithm's own randomness; arm reward streams use `0..n`.
const SETUP_STREAM: u64 = u64::MAX;

/// Outcome of one run of one algorithm on one instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialResult {
    pub scenario: String,
    pub n: usize,
    pub algorithm: String,
    pub trial: u64,
    pub seed: u64,
    pub total_pulls: u64,
    pub stopped: bool,
    /// Stopped recommendation, or the empirical leader when the cap was hit.
    pub recommended: Option<usize>,
    /// Only defined for stopped runs.
    pub correct: Option<bool>,
    /// Per checkpoint: whether the recommendation at that pull count was wrong.
    #[serde(skip)]
    pub anytime_errors: Vec<bool>,
    pub wall_ms: f64,
}

pub fn validate_checkpoints(checkpoints: &[u64]) -> Result<()> {
    if checkpoints.first() == Some(&0) {
        return Err(Error::InvalidConfig("checkpoints must be >= 1".into()));
    }
    if checkpoints.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidConfig("checkpoints must be strictly increasing".into()));
    }
    Ok(())
}

/// Drives one sampler until it stops or `max_pulls` is reached.
///
/// At every checkpoint the empirical leader is compared against the true best
/// arm. Checkpoints after a stop reuse the stopped recommendation; checkpoints
/// beyond the cap reuse the leader at the cap.
pub fn run_trial(
    algorithm: &ResolvedAlgorithm,
    instance: &BanditInstance,
    trial: u64,
    seed: u64,
    max_pulls: u64,
    checkpoints: &[u64],
) -> Result<TrialResult> {
    validate_checkpoints(checkpoints)?;
    if algorithm.num_arms != instance.num_arms() {
        return Err(Error::InvalidConfig(format!(
            "algorithm resolved for {} arms, instance has {}",
            algorithm.num_arms,
            instance.num_arms()
        )));
    }
    let start = Instant::now();
    let mut setup_rng = ChaCha8Rng::seed_from_u64(seed);
    setup_rng.set_stream(SETUP_STREAM);
    let mut sampler = SamplerState::new(algorithm, &mut setup_rng)?;
    let mut rewards = RewardStreams::new(seed, instance.num_arms());
    let best = instance.best_arm();

    let mut anytime_errors = Vec::with_capacity(checkpoints.len());
    let mut next_cp = 0;
    let mut total = 0u64;
    while sampler.status() == Status::Running && total < max_pulls {
        let arm = sampler.next_arm()?;
        if arm >= instance.num_arms() {
            return Err(Error::Contract(format!("sampler chose arm {arm} of {}", instance.num_arms())));
        }
        let reward = rewards.draw(instance, arm)?;
        sampler.update(arm, reward)?;
        total += 1;
        if sampler.stats().total() != total {
            return Err(Error::Contract("pull count diverged from update count".into()));
        }
        while next_cp < checkpoints.len() && checkpoints[next_cp] == total {
            anytime_errors.push(sampler.anytime_best() != Some(best));
            next_cp += 1;
        }
    }

    let (stopped, recommended) = match sampler.status() {
        Status::Stopped(arm) => (true, Some(arm)),
        Status::Running => (false, sampler.anytime_best()),
    };
    let frozen_wrong = recommended != Some(best);
    anytime_errors.resize(checkpoints.len(), frozen_wrong);

    let spec = instance.spec();
    Ok(TrialResult {
        scenario: spec.label(),
        n: spec.size(),
        algorithm: algorithm.label.clone(),
        trial,
        seed,
        total_pulls: total,
        stopped,
        recommended,
        correct: stopped.then_some(!frozen_wrong),
        anytime_errors,
        wall_ms: start.elapsed().as_secs_f64() * 1e3,
    })
}
