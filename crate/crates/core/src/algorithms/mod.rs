//! Sampling policies behind one pull/update/status contract.
//!
//! A [`SamplerState`] is built from an [`AlgorithmSpec`] and driven by
//! alternating [`SamplerState::next_arm`] and [`SamplerState::update`] calls
//! until [`SamplerState::status`] reports [`Status::Stopped`].

mod baselines;
mod exp_gap;
mod index_heap;
mod lil_ucb;
mod ls;
mod median;
mod stats;

use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

pub use baselines::{ucb1_bonus, Nonadaptive, SuccessiveElim, Ucb1};
pub use exp_gap::{exp_gap_confidence, exp_gap_round_budget, exp_gap_tolerance, ExpGapElim};
pub use index_heap::IndexHeap;
pub use lil_ucb::{lil_ucb_should_stop, LilUcb};
pub use ls::{ls_should_stop, LsMonitor};
pub use median::{median_elimination, median_round_budget, MedianElimination};
pub use stats::{anytime_recommendation, SampleStats};

use crate::confidence::{
    map_confidence_heuristic, map_confidence_theory, BoundVariant, LilParams, UcbParams,
};
use crate::error::{Error, Result};

/// Epsilon used by the LIL stopping rule and successive elimination unless overridden.
pub const LS_DEFAULT_EPS: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AlgorithmKind {
    LilUcbTheory,
    LilUcbHeuristic,
    Ucb1,
    SuccessiveElim,
    ExpGapElim,
    Nonadaptive,
}

impl AlgorithmKind {
    pub const ALL: [AlgorithmKind; 6] = [
        AlgorithmKind::LilUcbTheory,
        AlgorithmKind::LilUcbHeuristic,
        AlgorithmKind::Ucb1,
        AlgorithmKind::SuccessiveElim,
        AlgorithmKind::ExpGapElim,
        AlgorithmKind::Nonadaptive,
    ];

    pub fn name(self) -> &'static str {
        match self {
            AlgorithmKind::LilUcbTheory => "lil_ucb_theory",
            AlgorithmKind::LilUcbHeuristic => "lil_ucb_heuristic",
            AlgorithmKind::Ucb1 => "ucb1",
            AlgorithmKind::SuccessiveElim => "successive_elim",
            AlgorithmKind::ExpGapElim => "exp_gap_elim",
            AlgorithmKind::Nonadaptive => "nonadaptive",
        }
    }

    /// Whether the LIL stopping rule is attached when the spec does not say.
    fn default_ls(self) -> bool {
        !matches!(self, AlgorithmKind::LilUcbHeuristic | AlgorithmKind::SuccessiveElim)
    }

    /// Whether the algorithm spends confidence of its own, so that attaching
    /// the stopping rule splits the input confidence in half.
    fn consumes_confidence(self) -> bool {
        matches!(self, AlgorithmKind::LilUcbTheory | AlgorithmKind::ExpGapElim)
    }
}

impl fmt::Display for AlgorithmKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Serializable algorithm selection with optional parameter overrides.
///
/// ```json
/// {"kind": "lil_ucb_heuristic", "nu": 0.1, "ls": false}
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgorithmSpec {
    pub kind: AlgorithmKind,
    /// Input confidence; falls back to the experiment-wide value.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nu: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ls: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<f64>,
    /// The algorithm's own confidence, replacing the value derived from `nu`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    /// Confidence of the stopping rule, replacing the value derived from `nu`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ls_delta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scale: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub variant: Option<BoundVariant>,
}

impl AlgorithmSpec {
    pub fn new(kind: AlgorithmKind) -> Self {
        Self {
            kind,
            nu: None,
            ls: None,
            eps: None,
            beta: None,
            a: None,
            delta: None,
            ls_delta: None,
            scale: None,
            variant: None,
        }
    }

    pub fn with_nu(mut self, nu: f64) -> Self {
        self.nu = Some(nu);
        self
    }

    pub fn with_ls(mut self, ls: bool) -> Self {
        self.ls = Some(ls);
        self
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// Table label, e.g. `lil_ucb_theory+ls`.
    pub fn label(&self) -> String {
        let ls = self.ls.unwrap_or(self.kind.default_ls());
        if ls && self.kind != AlgorithmKind::SuccessiveElim {
            format!("{}+ls", self.kind)
        } else {
            self.kind.to_string()
        }
    }

    /// Fills every parameter for a problem with `num_arms` arms of common
    /// `scale`, using `default_nu` when the spec carries no `nu`.
    pub fn resolve(&self, num_arms: usize, scale: f64, default_nu: f64) -> Result<ResolvedAlgorithm> {
        if num_arms < 2 {
            return Err(Error::InvalidParams(format!("need at least 2 arms, got {num_arms}")));
        }
        let kind = self.kind;
        let nu = self.nu.unwrap_or(default_nu);
        if !(nu > 0.0 && nu < 1.0) {
            return Err(Error::InvalidParams(format!("nu = {nu} must lie in (0, 1)")));
        }
        let scale = self.scale.unwrap_or(scale);
        let ls = self.ls.unwrap_or(kind.default_ls());
        if kind == AlgorithmKind::LilUcbHeuristic && ls {
            return Err(Error::InvalidParams(
                "lil_ucb_heuristic stops only by its own rule; ls must be false".into(),
            ));
        }
        let split = ls && kind.consumes_confidence();
        let own_nu = if split { nu / 2.0 } else { nu };
        let variant = self.variant.unwrap_or_default();

        let mut resolved = ResolvedAlgorithm {
            kind,
            label: self.label(),
            nu,
            num_arms,
            scale,
            ls: None,
            ucb: None,
            elimination: None,
            exp_gap_delta: None,
        };

        match kind {
            AlgorithmKind::LilUcbTheory | AlgorithmKind::LilUcbHeuristic => {
                let theory = kind == AlgorithmKind::LilUcbTheory;
                let eps = self.eps.unwrap_or(if theory { 0.01 } else { 0.0 });
                let beta = self.beta.unwrap_or(if theory { 1.0 } else { 0.5 });
                let a = match self.a {
                    Some(a) => a,
                    None if theory => ((2.0 + beta) / beta).powi(2),
                    None => 1.0 + 10.0 / num_arms as f64,
                };
                let delta = match self.delta {
                    Some(d) => d,
                    None if theory => map_confidence_theory(own_nu, eps)?,
                    None => map_confidence_heuristic(own_nu)?,
                };
                let ucb = UcbParams { lil: LilParams::new(eps, delta, scale, variant), beta, a };
                ucb.validate()?;
                resolved.ucb = Some(ucb);
            }
            AlgorithmKind::SuccessiveElim => {
                let p = LilParams::new(
                    self.eps.unwrap_or(LS_DEFAULT_EPS),
                    self.delta.unwrap_or(nu),
                    scale,
                    BoundVariant::PlusTwo,
                );
                p.validate()?;
                resolved.elimination = Some(p);
            }
            AlgorithmKind::ExpGapElim => {
                let delta = self.delta.unwrap_or(own_nu);
                if !(delta > 0.0 && delta < 1.0) {
                    return Err(Error::InvalidParams(format!("delta = {delta} must lie in (0, 1)")));
                }
                if !(scale.is_finite() && scale > 0.0) {
                    return Err(Error::InvalidParams(format!("scale = {scale} must be positive")));
                }
                resolved.exp_gap_delta = Some(delta);
            }
            AlgorithmKind::Ucb1 | AlgorithmKind::Nonadaptive => {
                if !(scale.is_finite() && scale > 0.0) {
                    return Err(Error::InvalidParams(format!("scale = {scale} must be positive")));
                }
            }
        }

        if ls && kind != AlgorithmKind::SuccessiveElim {
            let eps = match &resolved.ucb {
                Some(ucb) => ucb.lil.eps,
                None => self.eps.unwrap_or(LS_DEFAULT_EPS),
            };
            let delta = self.ls_delta.unwrap_or(if split { nu / 2.0 } else { nu });
            let p = LilParams::new(eps, delta, scale, BoundVariant::PlusTwo);
            p.validate()?;
            resolved.ls = Some(p);
        }
        Ok(resolved)
    }
}

/// Every parameter an algorithm runs with, recorded for reproducibility.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResolvedAlgorithm {
    pub kind: AlgorithmKind,
    pub label: String,
    pub nu: f64,
    pub num_arms: usize,
    pub scale: f64,
    /// Stopping-rule parameters when the rule is attached.
    pub ls: Option<LilParams>,
    /// Index parameters for the lil'UCB variants.
    pub ucb: Option<UcbParams>,
    /// Elimination radius parameters for successive elimination.
    pub elimination: Option<LilParams>,
    pub exp_gap_delta: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Status {
    Running,
    Stopped(usize),
}

#[derive(Debug, Clone)]
enum Policy {
    LilUcb(LilUcb),
    Ucb1(Ucb1),
    SuccessiveElim(SuccessiveElim),
    ExpGap(ExpGapElim),
    Nonadaptive(Nonadaptive),
}

/// One algorithm's complete state for one run.
#[derive(Debug, Clone)]
pub struct SamplerState {
    kind: AlgorithmKind,
    stats: SampleStats,
    status: Status,
    pending: Option<usize>,
    policy: Policy,
    ls: Option<LsMonitor>,
}

impl SamplerState {
    /// Builds the sampler. `rng` is consumed only by algorithms with
    /// randomized setup (the nonadaptive permutation).
    pub fn new<R: Rng + ?Sized>(resolved: &ResolvedAlgorithm, rng: &mut R) -> Result<Self> {
        let n = resolved.num_arms;
        if n < 2 {
            return Err(Error::InvalidParams(format!("need at least 2 arms, got {n}")));
        }
        let missing = |what: &str| Error::InvalidParams(format!("{} needs {what}", resolved.kind));
        let policy = match resolved.kind {
            AlgorithmKind::LilUcbTheory | AlgorithmKind::LilUcbHeuristic => {
                let ucb = resolved.ucb.ok_or_else(|| missing("index parameters"))?;
                ucb.validate()?;
                Policy::LilUcb(LilUcb::new(n, ucb))
            }
            AlgorithmKind::Ucb1 => Policy::Ucb1(Ucb1::new(resolved.scale)),
            AlgorithmKind::SuccessiveElim => {
                let p = resolved.elimination.ok_or_else(|| missing("elimination parameters"))?;
                p.validate()?;
                Policy::SuccessiveElim(SuccessiveElim::new(n, p))
            }
            AlgorithmKind::ExpGapElim => {
                let delta = resolved.exp_gap_delta.ok_or_else(|| missing("a confidence"))?;
                Policy::ExpGap(ExpGapElim::new(n, delta, resolved.scale))
            }
            AlgorithmKind::Nonadaptive => Policy::Nonadaptive(Nonadaptive::new(n, rng)),
        };
        let ls = match resolved.ls {
            Some(p) => {
                LilParams { variant: BoundVariant::PlusTwo, ..p }.validate()?;
                Some(LsMonitor::new(n, p))
            }
            None => None,
        };
        Ok(Self {
            kind: resolved.kind,
            stats: SampleStats::new(n),
            status: Status::Running,
            pending: None,
            policy,
            ls,
        })
    }

    pub fn kind(&self) -> AlgorithmKind {
        self.kind
    }

    pub fn stats(&self) -> &SampleStats {
        &self.stats
    }

    pub fn status(&self) -> Status {
        self.status
    }

    /// Arm to pull next. Calling this again before [`Self::update`] returns the same arm.
    pub fn next_arm(&mut self) -> Result<usize> {
        if let Status::Stopped(arm) = self.status {
            return Err(Error::Contract(format!("next_arm after stop (recommended arm {arm})")));
        }
        if let Some(arm) = self.pending {
            return Ok(arm);
        }
        let arm = match &mut self.policy {
            Policy::LilUcb(p) => p.select(),
            Policy::Ucb1(p) => p.select(&self.stats),
            Policy::SuccessiveElim(p) => p.select(),
            Policy::ExpGap(p) => p.select(),
            Policy::Nonadaptive(p) => p.select(&self.stats),
        };
        self.pending = Some(arm);
        Ok(arm)
    }

    /// Feeds back the reward for the arm last returned by [`Self::next_arm`].
    pub fn update(&mut self, arm: usize, reward: f64) -> Result<()> {
        if let Status::Stopped(_) = self.status {
            return Err(Error::Contract("update after stop".into()));
        }
        if !reward.is_finite() {
            return Err(Error::Contract(format!("non-finite reward {reward}")));
        }
        match self.pending.take() {
            Some(expected) if expected == arm => {}
            Some(expected) => {
                self.pending = Some(expected);
                return Err(Error::Contract(format!("update for arm {arm}, expected arm {expected}")));
            }
            None => return Err(Error::Contract(format!("update for arm {arm} without next_arm"))),
        }
        self.stats.record(arm, reward);
        let own_stop = match &mut self.policy {
            Policy::LilUcb(p) => p.observe(&self.stats, arm),
            Policy::SuccessiveElim(p) => p.observe(&self.stats),
            Policy::ExpGap(p) => p.observe(reward),
            Policy::Ucb1(_) | Policy::Nonadaptive(_) => None,
        };
        let ls_stop = match &mut self.ls {
            Some(monitor) => monitor.observe(&self.stats, arm),
            None => None,
        };
        if let Some(arm) = own_stop.or(ls_stop) {
            self.status = Status::Stopped(arm);
        }
        Ok(())
    }

    /// Highest empirical mean, or `None` while some arm is unpulled.
    pub fn anytime_best(&self) -> Option<usize> {
        anytime_recommendation(&self.stats).ok()
    }
}
