//! Arm models, problem scenarios and hardness measures.
//!
//! All arms are Gaussian with a known common standard deviation, which doubles
//! as the sub-Gaussian scale used by the confidence radii.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Standard deviation used by every scenario unless overridden (variance 1/4).
pub const DEFAULT_SCALE: f64 = 0.5;

/// Upper limit on the number of arms an instance may have.
pub const MAX_ARMS: usize = 1_000_000;

/// Constant inside the `log log` of the H3 hardness. `e^e` is the smallest
/// value for which `log(log(c / gap^2)) >= 1` on every gap in `(0, 1]`.
pub const H3_CONSTANT: f64 = 15.154_262_241_479_262; // e^e

fn default_scale() -> f64 {
    DEFAULT_SCALE
}

/// One Gaussian arm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ArmModel {
    pub mean: f64,
    pub scale: f64,
}

impl ArmModel {
    pub fn new(mean: f64, scale: f64) -> Result<Self> {
        if !mean.is_finite() {
            return Err(Error::InvalidScenario(format!("arm mean {mean} is not finite")));
        }
        if !(scale.is_finite() && scale > 0.0) {
            return Err(Error::InvalidScenario(format!("arm scale {scale} must be positive")));
        }
        Ok(Self { mean, scale })
    }

    /// One reward draw.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let z: f64 = rng.sample(StandardNormal);
        self.mean + self.scale * z
    }
}

/// Shape of a scenario, tagged by `kind` in JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ScenarioKind {
    /// One arm with mean 0.5, the remaining `n - 1` arms at 0.
    #[serde(alias = "one-sparse")]
    OneSparse { n: usize },
    /// `n + 1` arms: mean 1 for arm 0 and `1 - (i/n)^alpha` for arm `i >= 1`.
    Alpha { n: usize, alpha: f64 },
    /// Arbitrary means.
    Explicit { means: Vec<f64> },
}

/// A serializable scenario description.
///
/// ```json
/// {"kind": "alpha", "n": 100, "alpha": 0.3, "scale": 0.5}
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioSpec {
    #[serde(flatten)]
    pub kind: ScenarioKind,
    #[serde(default = "default_scale")]
    pub scale: f64,
}

impl ScenarioSpec {
    pub fn one_sparse(n: usize) -> Self {
        Self { kind: ScenarioKind::OneSparse { n }, scale: DEFAULT_SCALE }
    }

    pub fn alpha(n: usize, alpha: f64) -> Self {
        Self { kind: ScenarioKind::Alpha { n, alpha }, scale: DEFAULT_SCALE }
    }

    pub fn explicit(means: Vec<f64>) -> Self {
        Self { kind: ScenarioKind::Explicit { means }, scale: DEFAULT_SCALE }
    }

    pub fn with_scale(mut self, scale: f64) -> Self {
        self.scale = scale;
        self
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// Size parameter `n` as written in the spec (an alpha scenario has `n + 1` arms).
    pub fn size(&self) -> usize {
        match &self.kind {
            ScenarioKind::OneSparse { n } | ScenarioKind::Alpha { n, .. } => *n,
            ScenarioKind::Explicit { means } => means.len(),
        }
    }

    /// Short label used in tables, e.g. `one_sparse`, `alpha_0.3`.
    pub fn label(&self) -> String {
        match &self.kind {
            ScenarioKind::OneSparse { .. } => "one_sparse".to_string(),
            ScenarioKind::Alpha { alpha, .. } => format!("alpha_{alpha}"),
            ScenarioKind::Explicit { .. } => "explicit".to_string(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.scale.is_finite() && self.scale > 0.0) {
            return Err(Error::InvalidScenario(format!("scale {} must be positive", self.scale)));
        }
        match &self.kind {
            ScenarioKind::OneSparse { n } => {
                if *n < 2 {
                    return Err(Error::InvalidScenario("one-sparse needs n >= 2".into()));
                }
                if *n > MAX_ARMS {
                    return Err(Error::InvalidScenario(format!("n = {n} exceeds {MAX_ARMS}")));
                }
            }
            ScenarioKind::Alpha { n, alpha } => {
                if *n < 1 {
                    return Err(Error::InvalidScenario("alpha scenario needs n >= 1".into()));
                }
                if *n >= MAX_ARMS {
                    return Err(Error::InvalidScenario(format!("n = {n} exceeds {MAX_ARMS}")));
                }
                if !(*alpha > 0.0 && *alpha < 1.0) {
                    return Err(Error::InvalidScenario(format!("alpha = {alpha} must lie in (0, 1)")));
                }
            }
            ScenarioKind::Explicit { means } => {
                if means.len() < 2 {
                    return Err(Error::InvalidScenario("need at least 2 arms".into()));
                }
                if means.len() > MAX_ARMS {
                    return Err(Error::InvalidScenario(format!(
                        "{} arms exceeds {MAX_ARMS}",
                        means.len()
                    )));
                }
            }
        }
        Ok(())
    }

    fn means(&self) -> Vec<f64> {
        match &self.kind {
            ScenarioKind::OneSparse { n } => {
                let mut means = vec![0.0; *n];
                means[0] = 0.5;
                means
            }
            ScenarioKind::Alpha { n, alpha } => {
                let nf = *n as f64;
                std::iter::once(1.0)
                    .chain((1..=*n).map(|i| 1.0 - (i as f64 / nf).powf(*alpha)))
                    .collect()
            }
            ScenarioKind::Explicit { means } => means.clone(),
        }
    }
}

impl fmt::Display for ScenarioSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(n={})", self.label(), self.size())
    }
}

/// An immutable bandit problem with a unique best arm.
#[derive(Debug, Clone, PartialEq)]
pub struct BanditInstance {
    arms: Vec<ArmModel>,
    spec: ScenarioSpec,
    best: usize,
}

/// Builds the instance described by `spec`.
pub fn make_scenario(spec: &ScenarioSpec) -> Result<BanditInstance> {
    spec.validate()?;
    let arms = spec
        .means()
        .into_iter()
        .map(|mean| ArmModel::new(mean, spec.scale))
        .collect::<Result<Vec<_>>>()?;
    let best = unique_argmax(&arms)?;
    Ok(BanditInstance { arms, spec: spec.clone(), best })
}

fn unique_argmax(arms: &[ArmModel]) -> Result<usize> {
    let mut best = 0;
    for (i, arm) in arms.iter().enumerate().skip(1) {
        if arm.mean > arms[best].mean {
            best = i;
        }
    }
    let ties = arms.iter().filter(|a| a.mean == arms[best].mean).count();
    if ties > 1 {
        return Err(Error::InvalidScenario(format!(
            "{ties} arms share the maximum mean {}; the best arm must be unique",
            arms[best].mean
        )));
    }
    Ok(best)
}

impl BanditInstance {
    pub fn arms(&self) -> &[ArmModel] {
        &self.arms
    }

    pub fn num_arms(&self) -> usize {
        self.arms.len()
    }

    pub fn spec(&self) -> &ScenarioSpec {
        &self.spec
    }

    pub fn means(&self) -> impl Iterator<Item = f64> + '_ {
        self.arms.iter().map(|a| a.mean)
    }

    /// Common arm scale.
    pub fn scale(&self) -> f64 {
        self.spec.scale
    }

    pub fn best_arm(&self) -> usize {
        self.best
    }

    /// Gap of every arm to the best mean (0 for the best arm itself).
    pub fn gaps(&self) -> Vec<f64> {
        let top = self.arms[self.best].mean;
        self.arms.iter().map(|a| top - a.mean).collect()
    }

    fn suboptimal_gaps(&self) -> impl Iterator<Item = f64> + '_ {
        let top = self.arms[self.best].mean;
        self.arms
            .iter()
            .enumerate()
            .filter(move |(i, _)| *i != self.best)
            .map(move |(_, a)| top - a.mean)
    }

    /// H1: sum of inverse squared gaps over the suboptimal arms.
    pub fn hardness_h1(&self) -> f64 {
        self.suboptimal_gaps().map(|d| 1.0 / (d * d)).sum()
    }

    /// H3 with `c = e^e`. Every gap must lie in `(0, 1]`.
    pub fn hardness_h3(&self) -> Result<f64> {
        let mut total = 0.0;
        for gap in self.suboptimal_gaps() {
            if gap > 1.0 {
                return Err(Error::InvalidScenario(format!(
                    "H3 needs every gap in (0, 1], found {gap}"
                )));
            }
            let inv = 1.0 / (gap * gap);
            total += (H3_CONSTANT * inv).ln().ln() * inv;
        }
        Ok(total)
    }

    /// One reward from `arm`, drawn from `rng`.
    pub fn sample_arm<R: Rng + ?Sized>(&self, arm: usize, rng: &mut R) -> Result<f64> {
        let model = self
            .arms
            .get(arm)
            .ok_or(Error::ArmOutOfRange { arm, num_arms: self.arms.len() })?;
        Ok(model.sample(rng))
    }
}

/// Per-arm reward streams for one trial.
///
/// Arm `i`'s `k`-th reward depends only on `(seed, i, k)`, so samplers that
/// visit arms in different orders still see reproducible reward sequences.
#[derive(Debug, Clone)]
pub struct RewardStreams {
    streams: Vec<ChaCha8Rng>,
}

impl RewardStreams {
    pub fn new(seed: u64, num_arms: usize) -> Self {
        let streams = (0..num_arms)
            .map(|arm| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(arm as u64);
                rng
            })
            .collect();
        Self { streams }
    }

    pub fn draw(&mut self, instance: &BanditInstance, arm: usize) -> Result<f64> {
        let num_arms = self.streams.len();
        let rng = self.streams.get_mut(arm).ok_or(Error::ArmOutOfRange { arm, num_arms })?;
        instance.sample_arm(arm, rng)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn alpha_means() {
        let inst = make_scenario(&ScenarioSpec::alpha(10, 0.3)).unwrap();
        assert_eq!(inst.num_arms(), 11);
        let means: Vec<f64> = inst.means().collect();
        assert_eq!(means[0], 1.0);
        // 1 - 10^-0.3
        assert_relative_eq!(means[1], 0.498_812_766_372_727_7, epsilon = 1e-10);
        assert_eq!(means[10], 0.0);
        assert_eq!(inst.best_arm(), 0);
    }

    #[test]
    fn one_sparse_means() {
        let inst = make_scenario(&ScenarioSpec::one_sparse(3)).unwrap();
        assert_eq!(inst.means().collect::<Vec<_>>(), vec![0.5, 0.0, 0.0]);
        assert_eq!(inst.best_arm(), 0);
        assert_eq!(inst.scale(), 0.5);
    }

    #[test]
    fn explicit_tie_rejected() {
        let err = make_scenario(&ScenarioSpec::explicit(vec![0.5, 0.5])).unwrap_err();
        assert!(matches!(err, Error::InvalidScenario(_)));
    }

    #[test]
    fn invalid_specs_rejected() {
        assert!(make_scenario(&ScenarioSpec::one_sparse(1)).is_err());
        assert!(make_scenario(&ScenarioSpec::alpha(0, 0.3)).is_err());
        assert!(make_scenario(&ScenarioSpec::alpha(10, 1.5)).is_err());
        assert!(make_scenario(&ScenarioSpec::alpha(10, 0.0)).is_err());
        assert!(make_scenario(&ScenarioSpec::alpha(10, f64::NAN)).is_err());
        assert!(make_scenario(&ScenarioSpec::one_sparse(4).with_scale(0.0)).is_err());
        assert!(make_scenario(&ScenarioSpec::explicit(vec![1.0])).is_err());
        assert!(make_scenario(&ScenarioSpec::explicit(vec![1.0, f64::INFINITY])).is_err());
        assert!(make_scenario(&ScenarioSpec::one_sparse(MAX_ARMS + 1)).is_err());
    }

    #[test]
    fn best_arm_examples() {
        let inst = make_scenario(&ScenarioSpec::explicit(vec![0.0, 0.25, 0.1])).unwrap();
        assert_eq!(inst.best_arm(), 1);
        for n in [1, 2, 7, 100] {
            let inst = make_scenario(&ScenarioSpec::alpha(n, 0.6)).unwrap();
            assert_eq!(inst.best_arm(), 0);
        }
        for n in [2, 5, 1000] {
            assert_eq!(make_scenario(&ScenarioSpec::one_sparse(n)).unwrap().best_arm(), 0);
        }
    }

    #[test]
    fn h1_examples() {
        let inst = make_scenario(&ScenarioSpec::explicit(vec![1.0, 0.5])).unwrap();
        assert_eq!(inst.hardness_h1(), 4.0);
        let inst = make_scenario(&ScenarioSpec::one_sparse(10)).unwrap();
        assert_eq!(inst.hardness_h1(), 36.0);
        // Alpha scenario: gap_i = (i/n)^alpha, so H1 = sum (n/i)^(2 alpha).
        let inst = make_scenario(&ScenarioSpec::alpha(100, 0.6)).unwrap();
        let brute: f64 = (1..=100).map(|i| (100.0 / i as f64).powf(1.2)).sum();
        assert_relative_eq!(inst.hardness_h1(), brute, max_relative = 1e-12);
    }

    #[test]
    fn h3_examples() {
        let e = std::f64::consts::E;
        let inst = make_scenario(&ScenarioSpec::explicit(vec![1.0, 0.0])).unwrap();
        assert_relative_eq!(inst.hardness_h3().unwrap(), 1.0, epsilon = 1e-12);

        let inst = make_scenario(&ScenarioSpec::explicit(vec![1.0, 0.5])).unwrap();
        // log(4 e^e) = ln 4 + e
        let expected = 4.0 * (4f64.ln() + e).ln();
        assert_relative_eq!(inst.hardness_h3().unwrap(), expected, max_relative = 1e-12);

        let inst = make_scenario(&ScenarioSpec::explicit(vec![1.0, 0.9, 0.5])).unwrap();
        // gap 0.1: 100 * ln(ln 100 + e); gap 0.5: 4 * ln(ln 4 + e)
        let expected = 100.0 * (100f64.ln() + e).ln() + 4.0 * (4f64.ln() + e).ln();
        assert_relative_eq!(inst.hardness_h3().unwrap(), expected, max_relative = 1e-12);
    }

    #[test]
    fn h3_rejects_large_gap() {
        let inst = make_scenario(&ScenarioSpec::explicit(vec![1.0, -0.5])).unwrap();
        assert!(inst.hardness_h3().is_err());
    }

    #[test]
    fn h3_constant_is_e_to_the_e() {
        let e = std::f64::consts::E;
        assert_relative_eq!(H3_CONSTANT, e.powf(e), max_relative = 1e-15);
    }

    #[test]
    fn degenerate_scale_returns_mean() {
        let inst = make_scenario(&ScenarioSpec::explicit(vec![0.3, -1.0]).with_scale(1e-12)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..100 {
            assert!((inst.sample_arm(0, &mut rng).unwrap() - 0.3).abs() < 1e-9);
        }
    }

    #[test]
    fn sampling_is_reproducible() {
        let inst = make_scenario(&ScenarioSpec::one_sparse(4)).unwrap();
        let mut a = ChaCha8Rng::seed_from_u64(42);
        let mut b = ChaCha8Rng::seed_from_u64(42);
        let a1 = inst.sample_arm(0, &mut a).unwrap();
        let a2 = inst.sample_arm(0, &mut a).unwrap();
        assert_ne!(a1, a2);
        assert_eq!(a1.to_bits(), inst.sample_arm(0, &mut b).unwrap().to_bits());
        assert_eq!(a2.to_bits(), inst.sample_arm(0, &mut b).unwrap().to_bits());
    }

    #[test]
    fn sample_out_of_range() {
        let inst = make_scenario(&ScenarioSpec::one_sparse(4)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert_eq!(
            inst.sample_arm(4, &mut rng),
            Err(Error::ArmOutOfRange { arm: 4, num_arms: 4 })
        );
    }

    #[test]
    fn moments_of_a_million_draws() {
        let inst = make_scenario(&ScenarioSpec::explicit(vec![0.0, -1.0])).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        let n = 1_000_000;
        let draws: Vec<f64> = (0..n).map(|_| inst.sample_arm(0, &mut rng).unwrap()).collect();
        let mean = draws.iter().sum::<f64>() / n as f64;
        let var = draws.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        assert!(mean.abs() < 0.002, "mean {mean}");
        assert!((var - 0.25).abs() < 0.02 * 0.25, "variance {var}");
    }

    #[test]
    fn reward_streams_are_per_arm() {
        let inst = make_scenario(&ScenarioSpec::one_sparse(3)).unwrap();
        let mut forward = RewardStreams::new(7, 3);
        let mut interleaved = RewardStreams::new(7, 3);
        let arm0: Vec<f64> = (0..5).map(|_| forward.draw(&inst, 0).unwrap()).collect();
        let mut got = Vec::new();
        for _ in 0..5 {
            interleaved.draw(&inst, 2).unwrap();
            got.push(interleaved.draw(&inst, 0).unwrap());
        }
        assert_eq!(arm0, got);
        assert!(forward.draw(&inst, 3).is_err());
    }

    #[test]
    fn json_format() {
        let spec = ScenarioSpec::from_json(r#"{"kind": "alpha", "n": 100, "alpha": 0.3, "scale": 0.5}"#)
            .unwrap();
        assert_eq!(spec, ScenarioSpec::alpha(100, 0.3));
        let spec = ScenarioSpec::from_json(r#"{"kind": "one_sparse", "n": 10}"#).unwrap();
        assert_eq!(spec, ScenarioSpec::one_sparse(10));
        let spec = ScenarioSpec::from_json(r#"{"kind": "explicit", "means": [1, 0]}"#).unwrap();
        assert_eq!(spec, ScenarioSpec::explicit(vec![1.0, 0.0]));
        assert!(ScenarioSpec::from_json(r#"{"kind": "poisson", "n": 3}"#).is_err());
        let round = serde_json::to_string(&ScenarioSpec::alpha(100, 0.3)).unwrap();
        assert_eq!(round, r#"{"kind":"alpha","n":100,"alpha":0.3,"scale":0.5}"#);
    }
}
