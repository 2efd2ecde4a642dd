//! LIL stopping rule: stop once the empirical leader's lower bound clears every
//! other arm's upper bound, with radii union-bounded over all arms.

use super::index_heap::IndexHeap;
use super::stats::SampleStats;
use crate::confidence::{ls_radius_unchecked, LilParams};

/// Full-scan form of the rule. `None` while any arm is unpulled.
pub fn ls_should_stop(stats: &SampleStats, p: &LilParams, n: usize) -> Option<usize> {
    if !stats.all_pulled() || stats.num_arms() < 2 {
        return None;
    }
    let mut leader = 0;
    for arm in 1..stats.num_arms() {
        if stats.mean_unchecked(arm) > stats.mean_unchecked(leader) {
            leader = arm;
        }
    }
    let lower = stats.mean_unchecked(leader) - ls_radius_unchecked(stats.pulls(leader), n, p);
    let dominated = (0..stats.num_arms()).filter(|&j| j != leader).all(|j| {
        lower >= stats.mean_unchecked(j) + ls_radius_unchecked(stats.pulls(j), n, p)
    });
    dominated.then_some(leader)
}

/// Incremental form of [`ls_should_stop`]: two indexed heaps (empirical means
/// and upper bounds) updated per pull, `O(log n)` per check.
#[derive(Debug, Clone)]
pub struct LsMonitor {
    params: LilParams,
    union_size: usize,
    means: IndexHeap,
    uppers: IndexHeap,
}

impl LsMonitor {
    /// `params` must be valid for the `+2` bound; `union_size >= 2`.
    pub fn new(num_arms: usize, params: LilParams) -> Self {
        Self {
            params,
            union_size: num_arms,
            means: IndexHeap::new(num_arms),
            uppers: IndexHeap::new(num_arms),
        }
    }

    pub fn params(&self) -> &LilParams {
        &self.params
    }

    fn radius(&self, t: u64) -> f64 {
        ls_radius_unchecked(t, self.union_size, &self.params)
    }

    pub fn observe(&mut self, stats: &SampleStats, arm: usize) -> Option<usize> {
        let t = stats.pulls(arm);
        if t == 0 {
            return None;
        }
        let mean = stats.mean_unchecked(arm);
        self.means.set(arm, mean);
        self.uppers.set(arm, mean + self.radius(t));
        if !stats.all_pulled() {
            return None;
        }
        let leader = self.means.top()?;
        let challenger = match self.uppers.top()? {
            top if top == leader => self.uppers.runner_up()?,
            top => top,
        };
        let lower = stats.mean_unchecked(leader) - self.radius(stats.pulls(leader));
        let upper = self.uppers.score(challenger)?;
        (lower >= upper).then_some(leader)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::confidence::{ls_radius, BoundVariant};
    use proptest::prelude::*;

    fn params(delta: f64) -> LilParams {
        LilParams::new(0.01, delta, 0.5, BoundVariant::PlusTwo)
    }

    #[test]
    fn huge_samples_stop() {
        let p = params(0.05);
        let stats = SampleStats::from_counts(&[1_000_000, 1_000_000], &[1.0, 0.0]);
        let r = ls_radius(1_000_000, 2, &p).unwrap();
        assert!(r < 0.005, "radius {r}");
        assert_eq!(ls_should_stop(&stats, &p, 2), Some(0));
    }

    #[test]
    fn zero_gap_never_stops() {
        let p = params(0.05);
        for t in [1, 100, 1_000_000_000] {
            let stats = SampleStats::from_counts(&[t, t], &[0.5, 0.5]);
            assert_eq!(ls_should_stop(&stats, &p, 2), None);
        }
    }

    #[test]
    fn single_samples_do_not_stop() {
        let p = params(0.05);
        let r = ls_radius(1, 2, &p).unwrap();
        assert!(r > 0.6, "radius {r}");
        let stats = SampleStats::from_counts(&[1, 1], &[0.6, 0.0]);
        assert_eq!(ls_should_stop(&stats, &p, 2), None);
    }

    #[test]
    fn unpulled_arm_blocks_stop() {
        let stats = SampleStats::from_counts(&[1_000_000, 0], &[1.0, 0.0]);
        assert_eq!(ls_should_stop(&stats, &params(0.05), 2), None);
    }

    proptest! {
        #[test]
        fn monitor_matches_scan(
            n in 2usize..7,
            pulls in prop::collection::vec((0usize..7, -4i32..5), 1..400),
        ) {
            let p = params(0.1);
            let mut stats = SampleStats::new(n);
            let mut monitor = LsMonitor::new(n, p);
            for (arm, raw) in pulls {
                let arm = arm % n;
                // Coarse rewards make exact ties common.
                stats.record(arm, raw as f64 * 0.25 + if arm == 0 { 0.5 } else { 0.0 });
                prop_assert_eq!(monitor.observe(&stats, arm), ls_should_stop(&stats, &p, n));
            }
        }
    }
}
