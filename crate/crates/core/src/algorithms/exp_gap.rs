//! Exponential-gap elimination.
//!
//! Round `r` uses tolerance `eps_r = 2^-r / 4` and confidence
//! `delta_r = delta / (50 r^3)`. Each active arm is pulled
//! `ceil((2 sigma)^2 * 2 / eps_r^2 * ln(2 / delta_r))` times on fresh samples,
//! median elimination picks a reference arm at `(eps_r / 2, delta_r)`, and every
//! arm whose round mean falls more than `eps_r` below the reference's is dropped.

use super::median::{MedianElimination, RoundRobin};

pub fn exp_gap_tolerance(round: u32) -> f64 {
    0.25 * 0.5f64.powi(round as i32)
}

pub fn exp_gap_confidence(round: u32, delta: f64) -> f64 {
    delta / (50.0 * (round as f64).powi(3))
}

/// Pulls per active arm in the sampling phase of `round`.
pub fn exp_gap_round_budget(round: u32, delta: f64, scale: f64) -> u64 {
    let eps_r = exp_gap_tolerance(round);
    let delta_r = exp_gap_confidence(round, delta);
    let width = 2.0 * scale;
    ((width * width * 2.0 / (eps_r * eps_r) * (2.0 / delta_r).ln()).ceil() as u64).max(1)
}

#[derive(Debug, Clone)]
enum Phase {
    Sample { plan: RoundRobin, sums: Vec<f64> },
    Reference { me: MedianElimination, round_means: Vec<f64> },
}

#[derive(Debug, Clone)]
pub struct ExpGapElim {
    active: Vec<usize>,
    delta: f64,
    scale: f64,
    round: u32,
    phase: Phase,
}

impl ExpGapElim {
    /// `delta` in `(0, 1)`, `scale > 0`, at least two arms.
    pub fn new(num_arms: usize, delta: f64, scale: f64) -> Self {
        let active: Vec<usize> = (0..num_arms).collect();
        let mut eg = Self {
            active,
            delta,
            scale,
            round: 0,
            phase: Phase::Sample { plan: RoundRobin::new(0, 0), sums: Vec::new() },
        };
        eg.start_round();
        eg
    }

    fn start_round(&mut self) {
        self.round += 1;
        let budget = exp_gap_round_budget(self.round, self.delta, self.scale);
        self.phase = Phase::Sample {
            plan: RoundRobin::new(self.active.len(), budget),
            sums: vec![0.0; self.active.len()],
        };
    }

    pub fn round(&self) -> u32 {
        self.round
    }

    pub fn active(&self) -> &[usize] {
        &self.active
    }

    pub fn select(&self) -> usize {
        match &self.phase {
            Phase::Sample { plan, .. } => {
                self.active[plan.current().expect("sampling phase has pulls left")]
            }
            Phase::Reference { me, .. } => me.next_arm().expect("reference phase has pulls left"),
        }
    }

    /// Records the reward for the arm returned by [`Self::select`].
    pub fn observe(&mut self, reward: f64) -> Option<usize> {
        match &mut self.phase {
            Phase::Sample { plan, sums } => {
                let slot = plan.current()?;
                sums[slot] += reward;
                plan.advance();
                if plan.current().is_some() {
                    return None;
                }
                let budget = plan.per_slot() as f64;
                let round_means: Vec<f64> = sums.iter().map(|s| s / budget).collect();
                let eps_r = exp_gap_tolerance(self.round);
                let delta_r = exp_gap_confidence(self.round, self.delta);
                let me = MedianElimination::new(&self.active, eps_r / 2.0, delta_r, self.scale)
                    .expect("schedule keeps median-elimination parameters in range");
                self.phase = Phase::Reference { me, round_means };
                self.after_reference()
            }
            Phase::Reference { me, .. } => {
                me.record(reward);
                self.after_reference()
            }
        }
    }

    fn after_reference(&mut self) -> Option<usize> {
        let Phase::Reference { me, round_means } = &self.phase else { return None };
        let reference = me.result()?;
        let ref_slot = self.active.iter().position(|&a| a == reference)?;
        let threshold = round_means[ref_slot] - exp_gap_tolerance(self.round);
        self.active = self
            .active
            .iter()
            .zip(round_means)
            .filter(|&(_, &m)| m >= threshold)
            .map(|(&arm, _)| arm)
            .collect();
        if self.active.len() == 1 {
            return Some(self.active[0]);
        }
        self.start_round();
        None
    }
}
