//! Indexed binary max-heap over arm scores.
//!
//! Each arm occupies at most one slot; changing an arm's score re-sifts only
//! that slot, so the argmax is maintained in `O(log n)` per update. Ordering is
//! by score, then by lower arm index, which makes the top agree exactly with a
//! left-to-right argmax scan.

use std::cmp::Ordering;

const ABSENT: usize = usize::MAX;

#[derive(Debug, Clone)]
pub struct IndexHeap {
    heap: Vec<usize>,
    pos: Vec<usize>,
    score: Vec<f64>,
}

/// `true` when `(sa, a)` ranks strictly above `(sb, b)`.
#[inline]
fn outranks(sa: f64, a: usize, sb: f64, b: usize) -> bool {
    match sa.total_cmp(&sb) {
        Ordering::Greater => true,
        Ordering::Less => false,
        Ordering::Equal => a < b,
    }
}

impl IndexHeap {
    pub fn new(num_arms: usize) -> Self {
        Self {
            heap: Vec::with_capacity(num_arms),
            pos: vec![ABSENT; num_arms],
            score: vec![f64::NEG_INFINITY; num_arms],
        }
    }

    pub fn len(&self) -> usize {
        self.heap.len()
    }

    pub fn is_empty(&self) -> bool {
        self.heap.is_empty()
    }

    pub fn contains(&self, arm: usize) -> bool {
        self.pos[arm] != ABSENT
    }

    pub fn score(&self, arm: usize) -> Option<f64> {
        self.contains(arm).then(|| self.score[arm])
    }

    /// Arm with the largest score.
    pub fn top(&self) -> Option<usize> {
        self.heap.first().copied()
    }

    /// Best arm other than the current top.
    pub fn runner_up(&self) -> Option<usize> {
        match (self.heap.get(1), self.heap.get(2)) {
            (Some(&l), Some(&r)) => Some(if self.above(l, r) { l } else { r }),
            (Some(&l), None) => Some(l),
            _ => None,
        }
    }

    /// Inserts `arm` or changes its score.
    pub fn set(&mut self, arm: usize, score: f64) {
        if self.pos[arm] == ABSENT {
            self.score[arm] = score;
            self.pos[arm] = self.heap.len();
            self.heap.push(arm);
            self.sift_up(self.heap.len() - 1);
            return;
        }
        let old = self.score[arm];
        self.score[arm] = score;
        let at = self.pos[arm];
        if outranks(score, arm, old, arm) {
            self.sift_up(at);
        } else {
            self.sift_down(at);
        }
    }

    pub fn remove(&mut self, arm: usize) {
        let at = self.pos[arm];
        if at == ABSENT {
            return;
        }
        let last = self.heap.len() - 1;
        self.swap(at, last);
        self.heap.pop();
        self.pos[arm] = ABSENT;
        if at < self.heap.len() {
            self.sift_down(at);
            self.sift_up(at);
        }
    }

    #[inline]
    fn above(&self, a: usize, b: usize) -> bool {
        outranks(self.score[a], a, self.score[b], b)
    }

    fn swap(&mut self, i: usize, j: usize) {
        self.heap.swap(i, j);
        self.pos[self.heap[i]] = i;
        self.pos[self.heap[j]] = j;
    }

    fn sift_up(&mut self, mut i: usize) {
        while i > 0 {
            let parent = (i - 1) / 2;
            if !self.above(self.heap[i], self.heap[parent]) {
                break;
            }
            self.swap(i, parent);
            i = parent;
        }
    }

    fn sift_down(&mut self, mut i: usize) {
        let len = self.heap.len();
        loop {
            let left = 2 * i + 1;
            if left >= len {
                break;
            }
            let right = left + 1;
            let mut child = left;
            if right < len && self.above(self.heap[right], self.heap[left]) {
                child = right;
            }
            if !self.above(self.heap[child], self.heap[i]) {
                break;
            }
            self.swap(i, child);
            i = child;
        }
    }
}
