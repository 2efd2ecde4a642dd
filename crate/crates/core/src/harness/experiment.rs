use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::seed::derive_trial_seed;
use super::trial::{run_trial, validate_checkpoints, TrialResult};
use crate::algorithms::{AlgorithmSpec, ResolvedAlgorithm};
use crate::error::{Error, Result};
use crate::scenario::{make_scenario, BanditInstance, ScenarioSpec};

pub const DEFAULT_NU: f64 = 0.1;
pub const DEFAULT_MAX_PULLS: u64 = 1_000_000_000;
pub const DEFAULT_STOPPING_TRIALS: u64 = 40;
pub const DEFAULT_ANYTIME_TRIALS: u64 = 5000;
/// Ratio between consecutive default checkpoints.
pub const CHECKPOINT_RATIO: f64 = 1.25;

fn default_nu() -> f64 {
    DEFAULT_NU
}

fn default_max_pulls() -> u64 {
    DEFAULT_MAX_PULLS
}

/// One experiment, as read from a JSON config file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub scenarios: Vec<ScenarioSpec>,
    pub algorithms: Vec<AlgorithmSpec>,
    /// Trials per (scenario, algorithm) cell; defaults depend on the experiment.
    #[serde(default)]
    pub trials: Option<u64>,
    #[serde(default = "default_nu")]
    pub nu: f64,
    #[serde(default)]
    pub master_seed: u64,
    #[serde(default = "default_max_pulls")]
    pub max_pulls: u64,
    /// Anytime checkpoints; a geometric grid from `n` to `max_pulls` when absent.
    #[serde(default)]
    pub checkpoints: Option<Vec<u64>>,
    /// Worker threads; `None` lets the thread pool decide.
    #[serde(default)]
    pub parallelism: Option<usize>,
    /// Record per-trial wall time. Off by default: it is the only column that
    /// varies between otherwise identical runs.
    #[serde(default)]
    pub timing: bool,
}

impl ExperimentConfig {
    pub fn new(scenarios: Vec<ScenarioSpec>, algorithms: Vec<AlgorithmSpec>) -> Self {
        Self {
            scenarios,
            algorithms,
            trials: None,
            nu: DEFAULT_NU,
            master_seed: 0,
            max_pulls: DEFAULT_MAX_PULLS,
            checkpoints: None,
            parallelism: None,
            timing: false,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn validate(&self) -> Result<()> {
        if self.scenarios.is_empty() {
            return Err(Error::InvalidConfig("no scenarios".into()));
        }
        if self.algorithms.is_empty() {
            return Err(Error::InvalidConfig("no algorithms".into()));
        }
        if self.trials == Some(0) {
            return Err(Error::InvalidConfig("trials must be >= 1".into()));
        }
        if !(self.nu > 0.0 && self.nu < 1.0) {
            return Err(Error::InvalidConfig(format!("nu = {} must lie in (0, 1)", self.nu)));
        }
        if self.max_pulls == 0 {
            return Err(Error::InvalidConfig("max_pulls must be >= 1".into()));
        }
        if self.parallelism == Some(0) {
            return Err(Error::InvalidConfig("parallelism must be >= 1".into()));
        }
        if let Some(cps) = &self.checkpoints {
            validate_checkpoints(cps)?;
        }
        for spec in &self.scenarios {
            spec.validate()?;
        }
        Ok(())
    }

    /// Instances plus resolved parameters for every (scenario, algorithm) cell.
    pub fn resolve(&self) -> Result<Vec<ResolvedScenario>> {
        self.validate()?;
        self.scenarios
            .iter()
            .map(|spec| {
                let instance = make_scenario(spec)?;
                let algorithms = self
                    .algorithms
                    .iter()
                    .map(|a| a.resolve(instance.num_arms(), instance.scale(), self.nu))
                    .collect::<Result<Vec<_>>>()?;
                Ok(ResolvedScenario { instance, algorithms })
            })
            .collect()
    }
}

#[derive(Debug, Clone)]
pub struct ResolvedScenario {
    pub instance: BanditInstance,
    pub algorithms: Vec<ResolvedAlgorithm>,
}

/// Geometric checkpoint grid: `start`, then each point `ceil(1.25 x)` of the
/// last, always ending at `end`.
pub fn geometric_checkpoints(start: u64, end: u64) -> Vec<u64> {
    let start = start.max(1);
    if start >= end {
        return vec![end.max(1)];
    }
    let mut points = vec![start];
    let mut current = start;
    while current < end {
        let next = ((current as f64 * CHECKPOINT_RATIO).ceil() as u64).max(current + 1);
        current = next.min(end);
        points.push(current);
    }
    points
}

struct Job<'a> {
    scenario: &'a ResolvedScenario,
    algorithm: &'a ResolvedAlgorithm,
    checkpoints: &'a [u64],
    trial: u64,
    seed: u64,
}

fn run_jobs(cfg: &ExperimentConfig, resolved: &[ResolvedScenario], trials: u64, checkpoints: &[Vec<u64>]) -> Result<Vec<TrialResult>> {
    let mut jobs = Vec::new();
    for (si, scenario) in resolved.iter().enumerate() {
        for (ai, algorithm) in scenario.algorithms.iter().enumerate() {
            for trial in 0..trials {
                jobs.push(Job {
                    scenario,
                    algorithm,
                    checkpoints: &checkpoints[si],
                    trial,
                    seed: derive_trial_seed(cfg.master_seed, si as u64, ai as u64, trial),
                });
            }
        }
    }
    let run = |job: &Job| {
        let mut row = run_trial(
            job.algorithm,
            &job.scenario.instance,
            job.trial,
            job.seed,
            cfg.max_pulls,
            job.checkpoints,
        )?;
        if !cfg.timing {
            row.wall_ms = 0.0;
        }
        Ok(row)
    };
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(workers) = cfg.parallelism {
        builder = builder.num_threads(workers);
    }
    let pool = builder.build().map_err(|e| Error::InvalidConfig(format!("thread pool: {e}")))?;
    pool.install(|| jobs.par_iter().map(run).collect())
}

/// Aggregate statistics for one (scenario, algorithm) cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellSummary {
    pub scenario: String,
    pub n: usize,
    pub algorithm: String,
    pub trials: u64,
    pub stopped: u64,
    pub mean_pulls: f64,
    pub median_pulls: f64,
    pub stdev_pulls: f64,
    /// Fraction of trials that did not stop with the best arm (cap hits count as errors).
    pub error_rate: f64,
    pub h1: f64,
    pub mean_pulls_over_h1: f64,
}

pub fn median(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let m = values.len();
    if m == 0 {
        return f64::NAN;
    }
    if m % 2 == 1 {
        values[m / 2]
    } else {
        0.5 * (values[m / 2 - 1] + values[m / 2])
    }
}

/// Summarizes the rows of one cell.
pub fn summarize(rows: &[TrialResult], h1: f64) -> Option<CellSummary> {
    let first = rows.first()?;
    let count = rows.len() as f64;
    let mut pulls: Vec<f64> = rows.iter().map(|r| r.total_pulls as f64).collect();
    let mean = pulls.iter().sum::<f64>() / count;
    let var = if rows.len() > 1 {
        pulls.iter().map(|p| (p - mean).powi(2)).sum::<f64>() / (count - 1.0)
    } else {
        0.0
    };
    let errors = rows.iter().filter(|r| r.correct != Some(true)).count() as f64;
    Some(CellSummary {
        scenario: first.scenario.clone(),
        n: first.n,
        algorithm: first.algorithm.clone(),
        trials: rows.len() as u64,
        stopped: rows.iter().filter(|r| r.stopped).count() as u64,
        mean_pulls: mean,
        median_pulls: median(&mut pulls),
        stdev_pulls: var.sqrt(),
        error_rate: errors / count,
        h1,
        mean_pulls_over_h1: mean / h1,
    })
}

/// Parameters one cell actually ran with.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellParams {
    pub scenario: String,
    pub n: usize,
    pub num_arms: usize,
    pub best_arm: usize,
    pub h1: f64,
    pub algorithm: ResolvedAlgorithm,
}

fn cell_params(resolved: &[ResolvedScenario]) -> Vec<CellParams> {
    resolved
        .iter()
        .flat_map(|s| {
            s.algorithms.iter().map(move |a| CellParams {
                scenario: s.instance.spec().label(),
                n: s.instance.spec().size(),
                num_arms: s.instance.num_arms(),
                best_arm: s.instance.best_arm(),
                h1: s.instance.hardness_h1(),
                algorithm: a.clone(),
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StoppingReport {
    pub rows: Vec<TrialResult>,
    pub cells: Vec<CellSummary>,
    pub params: Vec<CellParams>,
}

/// Stopping-time study: every algorithm on every scenario, `trials` times each
/// (40 by default), summarized per cell.
pub fn run_stopping_time_experiment(cfg: &ExperimentConfig) -> Result<StoppingReport> {
    let resolved = cfg.resolve()?;
    let trials = cfg.trials.unwrap_or(DEFAULT_STOPPING_TRIALS);
    let no_checkpoints = vec![Vec::new(); resolved.len()];
    let rows = run_jobs(cfg, &resolved, trials, &no_checkpoints)?;
    let per_cell = trials as usize;
    let h1s: Vec<f64> = resolved
        .iter()
        .flat_map(|s| std::iter::repeat_n(s.instance.hardness_h1(), s.algorithms.len()))
        .collect();
    let cells = rows
        .chunks(per_cell)
        .zip(h1s)
        .filter_map(|(chunk, h1)| summarize(chunk, h1))
        .collect();
    Ok(StoppingReport { rows, cells, params: cell_params(&resolved) })
}

/// Empirical probability that the anytime recommendation is wrong, per checkpoint.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorCurve {
    pub scenario: String,
    pub n: usize,
    pub algorithm: String,
    pub trials: u64,
    pub checkpoints: Vec<u64>,
    pub error_rates: Vec<f64>,
    pub stopped: u64,
    /// Mean stopping time over the trials that stopped.
    pub mean_stop_time: Option<f64>,
}

impl ErrorCurve {
    pub fn from_rows(rows: &[TrialResult], checkpoints: &[u64]) -> Option<Self> {
        let first = rows.first()?;
        let count = rows.len() as f64;
        let error_rates = (0..checkpoints.len())
            .map(|k| rows.iter().filter(|r| r.anytime_errors[k]).count() as f64 / count)
            .collect();
        let stops: Vec<f64> = rows.iter().filter(|r| r.stopped).map(|r| r.total_pulls as f64).collect();
        let mean_stop_time = (!stops.is_empty()).then(|| stops.iter().sum::<f64>() / stops.len() as f64);
        Some(Self {
            scenario: first.scenario.clone(),
            n: first.n,
            algorithm: first.algorithm.clone(),
            trials: rows.len() as u64,
            checkpoints: checkpoints.to_vec(),
            error_rates,
            stopped: stops.len() as u64,
            mean_stop_time,
        })
    }

    /// First checkpoint whose error rate is strictly below `level`.
    pub fn first_below(&self, level: f64) -> Option<u64> {
        self.checkpoints
            .iter()
            .zip(&self.error_rates)
            .find(|(_, &e)| e < level)
            .map(|(&c, _)| c)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnytimeReport {
    pub curves: Vec<ErrorCurve>,
    pub rows: Vec<TrialResult>,
    pub params: Vec<CellParams>,
}

/// Anytime-error study: the fraction of trials whose empirical leader is not
/// the best arm, at each checkpoint (5000 trials per cell by default).
pub fn run_anytime_experiment(cfg: &ExperimentConfig) -> Result<AnytimeReport> {
    let resolved = cfg.resolve()?;
    let trials = cfg.trials.unwrap_or(DEFAULT_ANYTIME_TRIALS);
    let checkpoints: Vec<Vec<u64>> = resolved
        .iter()
        .map(|s| match &cfg.checkpoints {
            Some(cps) => cps.clone(),
            None => geometric_checkpoints(s.instance.num_arms() as u64, cfg.max_pulls),
        })
        .collect();
    let rows = run_jobs(cfg, &resolved, trials, &checkpoints)?;
    let per_cell = trials as usize;
    let cell_checkpoints = resolved
        .iter()
        .zip(&checkpoints)
        .flat_map(|(s, cps)| std::iter::repeat_n(cps, s.algorithms.len()));
    let curves = rows
        .chunks(per_cell)
        .zip(cell_checkpoints)
        .filter_map(|(chunk, cps)| ErrorCurve::from_rows(chunk, cps))
        .collect();
    Ok(AnytimeReport { curves, rows, params: cell_params(&resolved) })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn geometric_grid() {
        let g = geometric_checkpoints(10, 100);
        assert_eq!(g.first(), Some(&10));
        assert_eq!(g.last(), Some(&100));
        assert!(g.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(&g[..4], &[10, 13, 17, 22]);
        assert_eq!(geometric_checkpoints(1, 3), vec![1, 2, 3]);
        assert_eq!(geometric_checkpoints(50, 5), vec![5]);
    }

    #[test]
    fn median_even_and_odd() {
        assert_eq!(median(&mut [3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&mut [4.0, 1.0, 2.0, 3.0]), 2.5);
        assert!(median(&mut []).is_nan());
    }

    #[test]
    fn config_validation() {
        let ok = ExperimentConfig::new(
            vec![ScenarioSpec::one_sparse(4)],
            vec![AlgorithmSpec::new(crate::algorithms::AlgorithmKind::Ucb1)],
        );
        assert!(ok.validate().is_ok());
        assert!(ExperimentConfig { trials: Some(0), ..ok.clone() }.validate().is_err());
        assert!(ExperimentConfig { nu: 0.0, ..ok.clone() }.validate().is_err());
        assert!(ExperimentConfig { checkpoints: Some(vec![5, 5]), ..ok.clone() }.validate().is_err());
        assert!(ExperimentConfig { checkpoints: Some(vec![0, 5]), ..ok.clone() }.validate().is_err());
        assert!(ExperimentConfig { parallelism: Some(0), ..ok.clone() }.validate().is_err());
        assert!(ExperimentConfig { scenarios: vec![], ..ok.clone() }.validate().is_err());
    }
}
