use crate::error::{Error, Result};

/// Per-arm pull counts and reward sums.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleStats {
    pulls: Vec<u64>,
    sums: Vec<f64>,
    total: u64,
    pulled_arms: usize,
}

impl SampleStats {
    pub fn new(num_arms: usize) -> Self {
        Self { pulls: vec![0; num_arms], sums: vec![0.0; num_arms], total: 0, pulled_arms: 0 }
    }

    /// Builds stats directly from counts and empirical means.
    pub fn from_counts(pulls: &[u64], means: &[f64]) -> Self {
        assert_eq!(pulls.len(), means.len());
        let sums = pulls.iter().zip(means).map(|(&t, &m)| t as f64 * m).collect();
        Self {
            pulls: pulls.to_vec(),
            sums,
            total: pulls.iter().sum(),
            pulled_arms: pulls.iter().filter(|&&t| t > 0).count(),
        }
    }

    pub fn record(&mut self, arm: usize, reward: f64) {
        if self.pulls[arm] == 0 {
            self.pulled_arms += 1;
        }
        self.pulls[arm] += 1;
        self.sums[arm] += reward;
        self.total += 1;
    }

    pub fn num_arms(&self) -> usize {
        self.pulls.len()
    }

    pub fn pulls(&self, arm: usize) -> u64 {
        self.pulls[arm]
    }

    pub fn all_pulls(&self) -> &[u64] {
        &self.pulls
    }

    pub fn reward_sum(&self, arm: usize) -> f64 {
        self.sums[arm]
    }

    /// Total number of recorded pulls.
    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn all_pulled(&self) -> bool {
        self.pulled_arms == self.pulls.len()
    }

    pub fn mean(&self, arm: usize) -> Option<f64> {
        let t = self.pulls[arm];
        (t > 0).then(|| self.sums[arm] / t as f64)
    }

    #[inline]
    pub(crate) fn mean_unchecked(&self, arm: usize) -> f64 {
        self.sums[arm] / self.pulls[arm] as f64
    }
}

/// Arm with the highest empirical mean, lowest index on ties.
pub fn anytime_recommendation(stats: &SampleStats) -> Result<usize> {
    let mut best: Option<(usize, f64)> = None;
    for arm in 0..stats.num_arms() {
        let mean = stats.mean(arm).ok_or(Error::Unpulled(arm))?;
        match best {
            Some((_, m)) if m >= mean => {}
            _ => best = Some((arm, mean)),
        }
    }
    best.map(|(arm, _)| arm).ok_or(Error::Unpulled(0))
}

/// Arm with the most pulls, lowest index on ties.
pub(crate) fn most_pulled(stats: &SampleStats) -> usize {
    let mut best = 0;
    for arm in 1..stats.num_arms() {
        if stats.pulls(arm) > stats.pulls(best) {
            best = arm;
        }
    }
    best
}
