//! lil'UCB: pull the arm with the largest LIL upper confidence bound, stop once
//! one arm holds a fixed fraction of all pulls.

use super::index_heap::IndexHeap;
use super::stats::{most_pulled, SampleStats};
use crate::confidence::UcbParams;

/// Stopping test: the arm `i` with `T_i >= 1 + a * sum_{j != i} T_j`, if any.
/// Returns the most-pulled arm (lowest index on ties).
pub fn lil_ucb_should_stop(stats: &SampleStats, a: f64) -> Option<usize> {
    let total = stats.total();
    let hit = (0..stats.num_arms()).any(|i| crosses(stats.pulls(i), total, a));
    hit.then(|| most_pulled(stats))
}

#[inline]
fn crosses(pulls: u64, total: u64, a: f64) -> bool {
    pulls as f64 >= 1.0 + a * (total - pulls) as f64
}

/// Sampling state for lil'UCB.
///
/// Index values depend only on an arm's own `(mean, pulls)`, so after a pull
/// only that arm's heap entry moves. Likewise only the pulled arm can newly
/// satisfy the stopping inequality, since every other arm's left side stays
/// fixed while its right side grows.
#[derive(Debug, Clone)]
pub struct LilUcb {
    params: UcbParams,
    heap: IndexHeap,
    num_arms: usize,
    next_init: usize,
}

impl LilUcb {
    /// `params` must already be validated.
    pub fn new(num_arms: usize, params: UcbParams) -> Self {
        Self { params, heap: IndexHeap::new(num_arms), num_arms, next_init: 0 }
    }

    pub fn params(&self) -> &UcbParams {
        &self.params
    }

    /// `true` once every arm has been pulled in the initial sweep.
    pub fn initialized(&self) -> bool {
        self.next_init == self.num_arms
    }

    /// Next arm: the initial sweep `0..n` in order, then the largest index.
    pub fn select(&self) -> usize {
        if self.next_init < self.num_arms {
            self.next_init
        } else {
            self.heap.top().expect("heap holds every arm after the sweep")
        }
    }

    /// Refreshes `arm`'s index after its stats changed. Returns the
    /// recommendation if the stopping rule now fires.
    pub fn observe(&mut self, stats: &SampleStats, arm: usize) -> Option<usize> {
        let t = stats.pulls(arm);
        if t == 0 {
            return None;
        }
        let index = self.params.index_unchecked(stats.mean_unchecked(arm), t);
        self.heap.set(arm, index);
        if self.initialized() {
            return crosses(t, stats.total(), self.params.a).then(|| most_pulled(stats));
        }
        while self.next_init < self.num_arms && stats.pulls(self.next_init) > 0 {
            self.next_init += 1;
        }
        if self.initialized() {
            return lil_ucb_should_stop(stats, self.params.a);
        }
        None
    }
}
