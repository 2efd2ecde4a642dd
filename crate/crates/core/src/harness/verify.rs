use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::confidence::{lil_failure_probability, BoundVariant, LilParams};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LilVerification {
    pub eps: f64,
    pub delta: f64,
    pub sigma: f64,
    pub horizon: u64,
    pub num_walks: u64,
    pub seed: u64,
    pub failures: u64,
    pub empirical_rate: f64,
    pub bound: f64,
}

impl LilVerification {
    /// Whether the empirical rate is within `slack` of the bound.
    pub fn holds(&self, slack: f64) -> bool {
        self.empirical_rate <= self.bound + slack
    }
}

/// The crossing boundary `(1+sqrt e) sqrt(2 (1+e) t log(log((1+e)t)/delta))` for
/// unit scale, `t = 1..=horizon`.
fn unit_boundary(eps: f64, delta: f64, horizon: u64) -> Vec<f64> {
    let outer = 1.0 + eps.sqrt();
    (1..=horizon)
        .map(|t| {
            let t = t as f64;
            outer * (2.0 * (1.0 + eps) * t * (((1.0 + eps) * t).ln() / delta).ln()).sqrt()
        })
        .collect()
}

/// Simulates `num_walks` zero-mean Gaussian random walks of length `horizon`
/// and counts those whose partial sum ever exceeds the LIL boundary.
///
/// Walk `w` draws from ChaCha8 stream `w` of `seed`, so results do not depend
/// on the thread count.
pub fn verify_lil_bound(
    eps: f64,
    delta: f64,
    sigma: f64,
    horizon: u64,
    num_walks: u64,
    seed: u64,
) -> Result<LilVerification> {
    LilParams::new(eps, delta, sigma, BoundVariant::Strict).validate()?;
    if horizon == 0 {
        return Err(Error::InvalidParams("horizon must be >= 1".into()));
    }
    if num_walks == 0 {
        return Err(Error::InvalidParams("num_walks must be >= 1".into()));
    }
    let boundary: Vec<f64> = unit_boundary(eps, delta, horizon).into_iter().map(|b| sigma * b).collect();
    let failures = (0..num_walks)
        .into_par_iter()
        .filter(|&walk| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(walk);
            let mut sum = 0.0;
            boundary.iter().any(|&b| {
                let z: f64 = StandardNormal.sample(&mut rng);
                sum += sigma * z;
                sum > b
            })
        })
        .count() as u64;
    Ok(LilVerification {
        eps,
        delta,
        sigma,
        horizon,
        num_walks,
        seed,
        failures,
        empirical_rate: failures as f64 / num_walks as f64,
        bound: lil_failure_probability(eps, delta)?,
    })
}
