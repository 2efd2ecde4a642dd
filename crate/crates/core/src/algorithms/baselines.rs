//! UCB1, uniform (nonadaptive) sampling and successive elimination.

use rand::seq::SliceRandom;
use rand::Rng;

use super::stats::SampleStats;
use crate::confidence::{ls_radius_unchecked, LilParams};

/// UCB1 exploration bonus, scaled for sigma-sub-Gaussian rewards:
/// `2 sigma sqrt(2 ln t / T_i)`. At `sigma = 1/2` this is the classical
/// `sqrt(2 ln t / T_i)`.
#[inline]
pub fn ucb1_bonus(total: u64, pulls: u64, scale: f64) -> f64 {
    2.0 * scale * (2.0 * (total as f64).ln() / pulls as f64).sqrt()
}

#[derive(Debug, Clone)]
pub struct Ucb1 {
    scale: f64,
    next_init: usize,
}

impl Ucb1 {
    pub fn new(scale: f64) -> Self {
        Self { scale, next_init: 0 }
    }

    /// Sweeps unpulled arms in order, then scans for the largest index.
    pub fn select(&mut self, stats: &SampleStats) -> usize {
        while self.next_init < stats.num_arms() {
            if stats.pulls(self.next_init) == 0 {
                return self.next_init;
            }
            self.next_init += 1;
        }
        let total = stats.total();
        let mut best = 0;
        let mut best_score = f64::NEG_INFINITY;
        for arm in 0..stats.num_arms() {
            let score = stats.mean_unchecked(arm) + ucb1_bonus(total, stats.pulls(arm), self.scale);
            if score > best_score {
                best = arm;
                best_score = score;
            }
        }
        best
    }
}

/// Cycles through a permutation of the arms fixed at construction.
#[derive(Debug, Clone)]
pub struct Nonadaptive {
    order: Vec<usize>,
}

impl Nonadaptive {
    pub fn new<R: Rng + ?Sized>(num_arms: usize, rng: &mut R) -> Self {
        let mut order: Vec<usize> = (0..num_arms).collect();
        order.shuffle(rng);
        Self { order }
    }

    pub fn with_order(order: Vec<usize>) -> Self {
        Self { order }
    }

    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn select(&self, stats: &SampleStats) -> usize {
        self.order[(stats.total() % self.order.len() as u64) as usize]
    }
}

/// Round-robin over the active set; after each full round the empirical
/// leader eliminates every arm whose upper bound it clears.
#[derive(Debug, Clone)]
pub struct SuccessiveElim {
    active: Vec<usize>,
    cursor: usize,
    params: LilParams,
    union_size: usize,
}

impl SuccessiveElim {
    /// `params` must be valid for the `+2` bound.
    pub fn new(num_arms: usize, params: LilParams) -> Self {
        Self { active: (0..num_arms).collect(), cursor: 0, params, union_size: num_arms }
    }

    pub fn active(&self) -> &[usize] {
        &self.active
    }

    pub fn select(&self) -> usize {
        self.active[self.cursor]
    }

    pub fn observe(&mut self, stats: &SampleStats) -> Option<usize> {
        self.cursor += 1;
        if self.cursor < self.active.len() {
            return None;
        }
        self.cursor = 0;
        self.eliminate(stats)
    }

    fn eliminate(&mut self, stats: &SampleStats) -> Option<usize> {
        let mut leader = self.active[0];
        for &arm in &self.active[1..] {
            if stats.mean_unchecked(arm) > stats.mean_unchecked(leader) {
                leader = arm;
            }
        }
        let rounds = stats.pulls(leader);
        let radius = ls_radius_unchecked(rounds, self.union_size, &self.params);
        let lower = stats.mean_unchecked(leader) - radius;
        self.active.retain(|&j| j == leader || lower < stats.mean_unchecked(j) + radius);
        (self.active.len() == 1).then_some(leader)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::confidence::BoundVariant;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn ucb1_equal_bonuses_pick_larger_mean() {
        let stats = SampleStats::from_counts(&[1, 1], &[0.3, 0.1]);
        let mut ucb = Ucb1::new(0.5);
        assert_eq!(ucb.select(&stats), 0);
    }

    #[test]
    fn ucb1_half_scale_is_classical_formula() {
        for (t, n) in [(2u64, 1u64), (101, 1), (101, 100), (5000, 37)] {
            let classical = (2.0 * (t as f64).ln() / n as f64).sqrt();
            assert_eq!(ucb1_bonus(t, n, 0.5), classical);
        }
    }

    #[test]
    fn ucb1_exploration_example() {
        // t = 101: 0.9 + sqrt(2 ln 101 / 100) ~ 1.204 against 0.5 + sqrt(2 ln 101) ~ 3.538
        let stats = SampleStats::from_counts(&[100, 1], &[0.9, 0.5]);
        let s0 = 0.9 + (2.0 * 101f64.ln() / 100.0).sqrt();
        let s1 = 0.5 + (2.0 * 101f64.ln()).sqrt();
        assert!(s1 > s0);
        assert_eq!(Ucb1::new(0.5).select(&stats), 1);
    }

    #[test]
    fn ucb1_sweeps_first() {
        let mut stats = SampleStats::new(3);
        let mut ucb = Ucb1::new(0.5);
        for expected in 0..3 {
            let arm = ucb.select(&stats);
            assert_eq!(arm, expected);
            stats.record(arm, 0.0);
        }
    }

    #[test]
    fn nonadaptive_cycles_its_order() {
        let policy = Nonadaptive::with_order(vec![2, 0, 1]);
        let mut stats = SampleStats::new(3);
        let mut seq = Vec::new();
        for _ in 0..7 {
            let arm = policy.select(&stats);
            seq.push(arm);
            stats.record(arm, 0.0);
        }
        assert_eq!(seq, vec![2, 0, 1, 2, 0, 1, 2]);
    }

    #[test]
    fn nonadaptive_balances_counts() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let policy = Nonadaptive::new(5, &mut rng);
        let mut stats = SampleStats::new(5);
        for _ in 0..5 * 4 {
            let arm = policy.select(&stats);
            stats.record(arm, 0.0);
        }
        assert!((0..5).all(|i| stats.pulls(i) == 4));
    }

    #[test]
    fn nonadaptive_permutation_is_seeded() {
        let a = Nonadaptive::new(50, &mut ChaCha8Rng::seed_from_u64(17));
        let b = Nonadaptive::new(50, &mut ChaCha8Rng::seed_from_u64(17));
        let c = Nonadaptive::new(50, &mut ChaCha8Rng::seed_from_u64(18));
        assert_eq!(a.order(), b.order());
        assert_ne!(a.order(), c.order());
        let mut sorted = a.order().to_vec();
        sorted.sort_unstable();
        assert_eq!(sorted, (0..50).collect::<Vec<_>>());
    }

    fn se_params() -> LilParams {
        LilParams::new(0.01, 0.1, 0.5, BoundVariant::PlusTwo)
    }

    #[test]
    fn successive_elim_one_round_pulls_each_arm_once() {
        let mut se = SuccessiveElim::new(3, se_params());
        let mut stats = SampleStats::new(3);
        let mut seen = Vec::new();
        for _ in 0..3 {
            let arm = se.select();
            seen.push(arm);
            stats.record(arm, arm as f64 * 0.1);
            assert_eq!(se.observe(&stats), None);
        }
        assert_eq!(seen, vec![0, 1, 2]);
        assert_eq!(se.active(), &[0, 1, 2]);
    }

    #[test]
    fn successive_elim_huge_gap_eliminates() {
        let mut se = SuccessiveElim::new(2, se_params());
        let stats = SampleStats::from_counts(&[1_000_000, 1_000_000], &[1.0, 0.0]);
        se.cursor = 1;
        assert_eq!(se.observe(&stats), Some(0));
        assert_eq!(se.active(), &[0]);
    }

    #[test]
    fn successive_elim_zero_gap_keeps_all() {
        let mut se = SuccessiveElim::new(2, se_params());
        let stats = SampleStats::from_counts(&[1_000_000, 1_000_000], &[0.5, 0.5]);
        se.cursor = 1;
        assert_eq!(se.observe(&stats), None);
        assert_eq!(se.active(), &[0, 1]);
    }
}
