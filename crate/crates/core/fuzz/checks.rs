//! Invariants exercised by the fuzz targets. Also replayed over the checked-in
//! corpus by `tests/fuzz_corpus.rs`, so a stable toolchain covers the seeds.

// Each target uses one entry point.
#![allow(dead_code)]

use std::cmp::Ordering;

use lilucb::algorithms::{AlgorithmSpec, IndexHeap, SamplerState, Status};
use lilucb::harness::{run_anytime_experiment, run_stopping_time_experiment, ExperimentConfig};
use lilucb::scenario::{make_scenario, ScenarioSpec};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Instances above this size are parsed and validated but not built.
const MAX_BUILD_ARMS: usize = 4096;
const MAX_PULLS: u64 = 2000;

pub fn scenario_json(data: &[u8]) {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(spec) = ScenarioSpec::from_json(text) else { return };
    let encoded = serde_json::to_string(&spec).expect("spec serializes");
    assert_eq!(ScenarioSpec::from_json(&encoded).expect("round trip parses"), spec);
    if spec.validate().is_err() || spec.size() > MAX_BUILD_ARMS {
        return;
    }
    let Ok(instance) = make_scenario(&spec) else { return };
    let means: Vec<f64> = instance.means().collect();
    let best = instance.best_arm();
    assert!(means.iter().enumerate().all(|(i, &m)| i == best || m < means[best]));
    let gaps = instance.gaps();
    assert_eq!(gaps[best], 0.0);
    assert!(gaps.iter().all(|&g| g >= 0.0));
    let h1 = instance.hardness_h1();
    assert!(h1 >= 0.0 && !h1.is_nan());
}

/// Drives a sampler against a fixed two-level reward pattern.
fn drive(spec: &AlgorithmSpec, num_arms: usize) {
    let Ok(resolved) = spec.resolve(num_arms, 0.5, 0.1) else { return };
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let Ok(mut sampler) = SamplerState::new(&resolved, &mut rng) else { return };
    for step in 0..MAX_PULLS {
        let arm = sampler.next_arm().expect("running sampler yields an arm");
        assert!(arm < num_arms);
        let wobble = ((step * 7919) % 13) as f64 / 13.0 - 0.5;
        let reward = if arm == 0 { 1.0 } else { 0.0 } + wobble;
        sampler.update(arm, reward).expect("update for the proposed arm");
        assert_eq!(sampler.stats().total(), step + 1);
        if let Status::Stopped(best) = sampler.status() {
            assert!(best < num_arms);
            assert!(sampler.next_arm().is_err());
            return;
        }
    }
}

pub fn algorithm_json(data: &[u8]) {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(spec) = AlgorithmSpec::from_json(text) else { return };
    let encoded = serde_json::to_string(&spec).expect("spec serializes");
    assert_eq!(AlgorithmSpec::from_json(&encoded).expect("round trip parses"), spec);
    for num_arms in [1, 2, 7] {
        drive(&spec, num_arms);
    }
}

pub fn experiment_config_json(data: &[u8]) {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(cfg) = ExperimentConfig::from_json(text) else { return };
    let encoded = serde_json::to_string(&cfg).expect("config serializes");
    assert_eq!(ExperimentConfig::from_json(&encoded).expect("round trip parses"), cfg);
    if cfg.validate().is_err() {
        return;
    }
    let arms: usize = cfg.scenarios.iter().map(|s| s.size()).sum();
    if arms > 256 || cfg.algorithms.len() > 8 {
        return;
    }
    // Shrink the run; parsing and resolution are what is under test.
    let small = ExperimentConfig {
        trials: Some(1),
        max_pulls: cfg.max_pulls.min(MAX_PULLS),
        checkpoints: cfg.checkpoints.clone().map(|c| c.into_iter().filter(|&p| p <= MAX_PULLS).collect()),
        parallelism: Some(1),
        ..cfg
    };
    if let Ok(report) = run_stopping_time_experiment(&small) {
        assert!(report.rows.iter().all(|r| r.total_pulls <= small.max_pulls));
    }
    if let Ok(report) = run_anytime_experiment(&small) {
        for curve in &report.curves {
            assert!(curve.error_rates.iter().all(|e| (0.0..=1.0).contains(e)));
        }
    }
}

fn ranks_above(scores: &[Option<f64>], a: usize, b: usize) -> bool {
    match (scores[a], scores[b]) {
        (Some(sa), Some(sb)) => match sa.total_cmp(&sb) {
            Ordering::Greater => true,
            Ordering::Less => false,
            Ordering::Equal => a < b,
        },
        (Some(_), None) => true,
        _ => false,
    }
}

fn scan(scores: &[Option<f64>], skip: Option<usize>) -> Option<usize> {
    let mut best: Option<usize> = None;
    for arm in (0..scores.len()).filter(|&a| scores[a].is_some() && Some(a) != skip) {
        if best.is_none_or(|b| ranks_above(scores, arm, b)) {
            best = Some(arm);
        }
    }
    best
}

/// Byte-coded operations on an `IndexHeap`, checked against a linear scan.
pub fn index_heap(data: &[u8]) {
    let Some((&first, ops)) = data.split_first() else { return };
    let num_arms = first as usize % 32 + 1;
    let mut heap = IndexHeap::new(num_arms);
    let mut model: Vec<Option<f64>> = vec![None; num_arms];
    for op in ops.chunks_exact(3) {
        let arm = op[1] as usize % num_arms;
        if op[0] % 5 == 0 {
            heap.remove(arm);
            model[arm] = None;
        } else {
            // Few distinct values so ties are common; include both zeros.
            let score = match op[2] {
                0 => -0.0,
                255 => f64::INFINITY,
                b => (b as f64 - 128.0) / 16.0,
            };
            heap.set(arm, score);
            model[arm] = Some(score);
        }
        let top = scan(&model, None);
        assert_eq!(heap.top(), top);
        assert_eq!(heap.runner_up(), top.and_then(|t| scan(&model, Some(t))));
        assert_eq!(heap.len(), model.iter().filter(|s| s.is_some()).count());
        assert!((0..num_arms).all(|a| heap.contains(a) == model[a].is_some()));
    }
}
