//! Median elimination: halving rounds that return an eps-optimal arm with
//! probability at least `1 - delta`.
//!
//! Round `l` pulls every survivor `ceil((2 sigma)^2 * 4 / eps_l^2 * ln(3 / delta_l))`
//! times on fresh samples, then keeps the upper half by round-local mean.
//! Schedule: `eps_1 = eps / 4`, `delta_1 = delta / 2`, `eps_{l+1} = 3/4 eps_l`,
//! `delta_{l+1} = delta_l / 2`.

use crate::error::{Error, Result};

/// Pulls per survivor in one median-elimination round.
pub fn median_round_budget(eps_l: f64, delta_l: f64, scale: f64) -> u64 {
    let width = 2.0 * scale;
    // At least one pull, even when a tiny scale underflows the product.
    ((width * width * 4.0 / (eps_l * eps_l) * (3.0 / delta_l).ln()).ceil() as u64).max(1)
}

/// Cycles through `len` slots, `per_slot` passes in total.
#[derive(Debug, Clone)]
pub(crate) struct RoundRobin {
    len: usize,
    per_slot: u64,
    pass: u64,
    slot: usize,
}

impl RoundRobin {
    pub(crate) fn new(len: usize, per_slot: u64) -> Self {
        Self { len, per_slot, pass: 0, slot: 0 }
    }

    pub(crate) fn current(&self) -> Option<usize> {
        (self.len > 0 && self.pass < self.per_slot).then_some(self.slot)
    }

    pub(crate) fn advance(&mut self) {
        self.slot += 1;
        if self.slot == self.len {
            self.slot = 0;
            self.pass += 1;
        }
    }

    pub(crate) fn per_slot(&self) -> u64 {
        self.per_slot
    }
}

/// Resumable median elimination over a fixed arm set.
#[derive(Debug, Clone)]
pub struct MedianElimination {
    survivors: Vec<usize>,
    sums: Vec<f64>,
    plan: RoundRobin,
    eps_l: f64,
    delta_l: f64,
    scale: f64,
    rounds: u32,
    result: Option<usize>,
}

impl MedianElimination {
    pub fn new(arms: &[usize], eps: f64, delta: f64, scale: f64) -> Result<Self> {
        if arms.is_empty() {
            return Err(Error::InvalidParams("median elimination needs at least one arm".into()));
        }
        if !(eps > 0.0 && eps < 1.0) {
            return Err(Error::InvalidParams(format!("eps = {eps} must lie in (0, 1)")));
        }
        if !(delta > 0.0 && delta < 1.0) {
            return Err(Error::InvalidParams(format!("delta = {delta} must lie in (0, 1)")));
        }
        if !(scale.is_finite() && scale > 0.0) {
            return Err(Error::InvalidParams(format!("scale = {scale} must be positive")));
        }
        let mut me = Self {
            survivors: arms.to_vec(),
            sums: Vec::new(),
            plan: RoundRobin::new(0, 0),
            eps_l: eps / 4.0,
            delta_l: delta / 2.0,
            scale,
            rounds: 0,
            result: None,
        };
        if arms.len() == 1 {
            me.result = Some(arms[0]);
        } else {
            me.start_round();
        }
        Ok(me)
    }

    fn start_round(&mut self) {
        self.rounds += 1;
        self.sums = vec![0.0; self.survivors.len()];
        let budget = median_round_budget(self.eps_l, self.delta_l, self.scale);
        self.plan = RoundRobin::new(self.survivors.len(), budget);
    }

    /// Arm to pull next, or `None` once finished.
    pub fn next_arm(&self) -> Option<usize> {
        if self.result.is_some() {
            return None;
        }
        self.plan.current().map(|slot| self.survivors[slot])
    }

    /// Records the reward for the arm returned by [`Self::next_arm`].
    pub fn record(&mut self, reward: f64) {
        let Some(slot) = self.plan.current() else { return };
        if self.result.is_some() {
            return;
        }
        self.sums[slot] += reward;
        self.plan.advance();
        if self.plan.current().is_none() {
            self.halve();
        }
    }

    fn halve(&mut self) {
        let budget = self.plan.per_slot() as f64;
        let mut ranked: Vec<(usize, f64)> = self
            .survivors
            .iter()
            .zip(&self.sums)
            .map(|(&arm, &sum)| (arm, sum / budget))
            .collect();
        ranked.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
        ranked.truncate(ranked.len().div_ceil(2));
        let mut kept: Vec<usize> = ranked.into_iter().map(|(arm, _)| arm).collect();
        kept.sort_unstable();
        self.survivors = kept;
        self.eps_l *= 0.75;
        self.delta_l /= 2.0;
        if self.survivors.len() == 1 {
            self.result = Some(self.survivors[0]);
        } else {
            self.start_round();
        }
    }

    pub fn result(&self) -> Option<usize> {
        self.result
    }

    /// Halving rounds started so far.
    pub fn rounds(&self) -> u32 {
        self.rounds
    }

    pub fn survivors(&self) -> &[usize] {
        &self.survivors
    }
}

/// Runs median elimination to completion, drawing rewards through `pull`.
pub fn median_elimination<F>(arms: &[usize], eps: f64, delta: f64, scale: f64, mut pull: F) -> Result<usize>
where
    F: FnMut(usize) -> f64,
{
    let mut me = MedianElimination::new(arms, eps, delta, scale)?;
    while let Some(arm) = me.next_arm() {
        me.record(pull(arm));
    }
    Ok(me.result().expect("finished median elimination has a result"))
}
