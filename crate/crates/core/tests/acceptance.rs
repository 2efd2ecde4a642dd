//! Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use lilucb::algorithms::{AlgorithmKind, AlgorithmSpec, LilUcb, SampleStats};
use lilucb::confidence::{map_confidence_theory, min_exploration_a, ucb_index, BoundVariant, LilParams, UcbParams};
use lilucb::harness::{
    run_anytime_experiment, run_stopping_time_experiment, verify_lil_bound, write_anytime, write_summary,
    write_trials, CellSummary, ExperimentConfig, Format,
};
use lilucb::scenario::ScenarioSpec;

type Check = Result<String, String>;
type Criterion = (u8, &'static str, fn() -> Check);

fn spec(kind: AlgorithmKind) -> AlgorithmSpec {
    AlgorithmSpec::new(kind)
}

fn config(scenarios: Vec<ScenarioSpec>, algorithms: Vec<AlgorithmSpec>, trials: u64) -> ExperimentConfig {
    ExperimentConfig { trials: Some(trials), ..ExperimentConfig::new(scenarios, algorithms) }
}

fn err(e: lilucb::Error) -> String {
    e.to_string()
}

fn cell<'a>(cells: &'a [CellSummary], scenario: &str, algorithm: &str) -> Result<&'a CellSummary, String> {
    cells
        .iter()
        .find(|c| c.scenario == scenario && c.algorithm == algorithm)
        .ok_or_else(|| format!("missing cell {scenario}/{algorithm}"))
}

fn verdict(ok: bool, detail: String) -> Check {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn correctness_at_confidence() -> Check {
    let trials = 500;
    let cfg = config(
        vec![ScenarioSpec::one_sparse(10), ScenarioSpec::alpha(10, 0.3)],
        vec![
            spec(AlgorithmKind::LilUcbTheory),
            spec(AlgorithmKind::LilUcbHeuristic),
            spec(AlgorithmKind::SuccessiveElim),
            spec(AlgorithmKind::Nonadaptive),
        ],
        trials,
    );
    let report = run_stopping_time_experiment(&cfg).map_err(err)?;
    let limit = 0.1 + 1.96 * (0.1 * 0.9 / trials as f64).sqrt();
    let worst = report.cells.iter().max_by(|a, b| a.error_rate.total_cmp(&b.error_rate)).unwrap();
    verdict(
        report.cells.iter().all(|c| c.error_rate <= limit),
        format!(
            "{} cells x {trials} trials, worst error {:.4} ({}/{}) vs limit {limit:.4}",
            report.cells.len(),
            worst.error_rate,
            worst.scenario,
            worst.algorithm
        ),
    )
}

fn heuristic_reliability() -> Check {
    let cfg = config(
        vec![ScenarioSpec::one_sparse(10), ScenarioSpec::alpha(10, 0.3)],
        vec![spec(AlgorithmKind::LilUcbHeuristic)],
        1000,
    );
    let report = run_stopping_time_experiment(&cfg).map_err(err)?;
    let wrong = report.rows.iter().filter(|r| r.correct != Some(true)).count();
    verdict(wrong == 0, format!("{wrong} errors in {} trials", report.rows.len()))
}

fn stopping_time_ordering() -> Check {
    let cfg = config(
        vec![ScenarioSpec::alpha(100, 0.3)],
        vec![
            spec(AlgorithmKind::LilUcbHeuristic),
            spec(AlgorithmKind::LilUcbTheory),
            spec(AlgorithmKind::SuccessiveElim),
            spec(AlgorithmKind::Nonadaptive),
            spec(AlgorithmKind::ExpGapElim),
        ],
        40,
    );
    let report = run_stopping_time_experiment(&cfg).map_err(err)?;
    let m = |alg: &str| cell(&report.cells, "alpha_0.3", alg).map(|c| c.median_pulls);
    let (heur, lil, se, unif, eg) = (
        m("lil_ucb_heuristic")?,
        m("lil_ucb_theory+ls")?,
        m("successive_elim")?,
        m("nonadaptive+ls")?,
        m("exp_gap_elim+ls")?,
    );
    let eg_ratio = eg / unif;
    verdict(
        heur < lil && lil <= se && se < unif && (eg_ratio - 1.0).abs() <= 0.15,
        format!(
            "medians heuristic {heur} < lil_ucb+ls {lil} <= successive_elim {se} < nonadaptive+ls {unif}; \
             exp_gap+ls / nonadaptive+ls = {eg_ratio:.3}"
        ),
    )
}

fn anytime_separation() -> Check {
    let cfg = config(
        vec![ScenarioSpec::one_sparse(100)],
        vec![spec(AlgorithmKind::LilUcbHeuristic), spec(AlgorithmKind::SuccessiveElim)],
        2000,
    );
    let report = run_anytime_experiment(&cfg).map_err(err)?;
    let first = |alg: &str| {
        report
            .curves
            .iter()
            .find(|c| c.algorithm == alg)
            .and_then(|c| c.first_below(0.1))
            .ok_or_else(|| format!("{alg} never drops below 0.1"))
    };
    let (heur, se) = (first("lil_ucb_heuristic")?, first("successive_elim")?);
    let ratio = heur as f64 / se as f64;
    verdict(
        ratio <= 0.6,
        format!("error < 0.1 first at {heur} (heuristic) vs {se} (successive_elim), ratio {ratio:.3} <= 0.6"),
    )
}

fn lil_bound_verification() -> Check {
    let start = Instant::now();
    let v = verify_lil_bound(1.0, 0.05, 1.0, 100_000, 10_000, 0).map_err(err)?;
    let elapsed = start.elapsed();
    let limit = 0.0156 + 3.0 * (0.0156f64 / 1e4).sqrt();
    verdict(
        v.empirical_rate <= limit && elapsed < Duration::from_secs(120),
        format!(
            "{} of {} walks crossed, rate {:.4} vs limit {limit:.6} (bound {:.6}), {:.1?}",
            v.failures, v.num_walks, v.empirical_rate, v.bound, elapsed
        ),
    )
}

fn scaling_sanity() -> Check {
    let sizes = [10, 100, 1000];
    let cfg = config(
        sizes.iter().map(|&n| ScenarioSpec::one_sparse(n)).collect(),
        vec![spec(AlgorithmKind::LilUcbHeuristic)],
        40,
    );
    let report = run_stopping_time_experiment(&cfg).map_err(err)?;
    let ratios: Vec<f64> = report
        .cells
        .iter()
        .zip(&report.params)
        .map(|(c, p)| {
            let delta = p.algorithm.ucb.expect("heuristic has ucb params").lil.delta;
            c.median_pulls / (c.h1 * (1.0 / delta).ln())
        })
        .collect();
    let hi = ratios.iter().cloned().fold(f64::MIN, f64::max);
    let lo = ratios.iter().cloned().fold(f64::MAX, f64::min);
    verdict(
        hi / lo < 3.0,
        format!("median / (H1 log(1/delta)) = {ratios:.3?} for n = {sizes:?}, spread {:.3} < 3", hi / lo),
    )
}

fn brute_force_argmax(stats: &SampleStats, params: &UcbParams) -> usize {
    let mut best = 0;
    let mut best_score = f64::NEG_INFINITY;
    for arm in 0..stats.num_arms() {
        let score = ucb_index(stats.mean(arm).unwrap(), stats.pulls(arm), params).unwrap();
        if score > best_score {
            best = arm;
            best_score = score;
        }
    }
    best
}

fn oracle_equivalence() -> Check {
    let n = 1000;
    let sequences = 16;
    let steps = 10_000;
    let params = UcbParams {
        lil: LilParams::new(0.0, 0.02, 0.5, BoundVariant::PlusTwo),
        beta: 0.5,
        a: 1.0 + 10.0 / n as f64,
    };
    let noise = Normal::new(0.0, 0.5).unwrap();
    let mut compared = 0u64;
    for seq in 0..sequences {
        let mut rng = ChaCha8Rng::seed_from_u64(seq);
        let means: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..1.0)).collect();
        let mut stats = SampleStats::new(n);
        let mut policy = LilUcb::new(n, params);
        let feed = |stats: &mut SampleStats, policy: &mut LilUcb, rng: &mut ChaCha8Rng, arm: usize| {
            stats.record(arm, means[arm] + noise.sample(rng));
            policy.observe(stats, arm);
        };
        for arm in 0..n {
            feed(&mut stats, &mut policy, &mut rng, arm);
        }
        for step in 0..steps {
            // Mix arbitrary updates with the policy's own choices.
            let arm = if rng.random_bool(0.5) { rng.random_range(0..n) } else { policy.select() };
            feed(&mut stats, &mut policy, &mut rng, arm);
            let (lazy, brute) = (policy.select(), brute_force_argmax(&stats, &params));
            if lazy != brute {
                return Err(format!("sequence {seq}, step {step}: heap says {lazy}, scan says {brute}"));
            }
            compared += 1;
        }
    }
    Ok(format!("{compared} steps over {sequences} sequences of {steps} updates, n = {n}: all match"))
}

fn render(cfg: &ExperimentConfig) -> lilucb::Result<Vec<u8>> {
    let stopping = run_stopping_time_experiment(cfg)?;
    let anytime = run_anytime_experiment(cfg)?;
    let mut out = Vec::new();
    write_trials(&mut out, &stopping.rows, Format::Csv)?;
    write_summary(&mut out, &stopping.cells, Format::Csv)?;
    write_anytime(&mut out, &anytime.curves, Format::Csv)?;
    write_trials(&mut out, &anytime.rows, Format::Csv)?;
    Ok(out)
}

fn determinism() -> Check {
    let base = ExperimentConfig {
        master_seed: 2024,
        max_pulls: 200_000,
        ..config(
            vec![ScenarioSpec::one_sparse(10), ScenarioSpec::alpha(20, 0.6)],
            AlgorithmKind::ALL.into_iter().map(spec).collect(),
            24,
        )
    };
    let one = render(&ExperimentConfig { parallelism: Some(1), ..base.clone() }).map_err(err)?;
    let eight = render(&ExperimentConfig { parallelism: Some(8), ..base }).map_err(err)?;
    verdict(one == eight, format!("{} bytes of CSV, workers 1 vs 8 identical: {}", one.len(), one == eight))
}

fn formula_oracles() -> Check {
    // 40-digit mpmath evaluations.
    const MIN_A: f64 = 45.286_606_158_703_29;
    const MAP_THEORY: f64 = 1.090_082_442_737_181e-4;
    let a = min_exploration_a(0.01, 1.0).map_err(err)?;
    let d = map_confidence_theory(0.1, 0.01).map_err(err)?;
    let rel = |x: f64, o: f64| ((x - o) / o).abs();
    verdict(
        rel(a, MIN_A) < 5e-7 && rel(d, MAP_THEORY) < 5e-7,
        format!("min_exploration_a = {a:.9} (oracle {MIN_A}), map_confidence_theory = {d:.9e} (oracle {MAP_THEORY:e})"),
    )
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        (1, "correctness at confidence", correctness_at_confidence),
        (2, "heuristic reliability", heuristic_reliability),
        (3, "stopping-time ordering", stopping_time_ordering),
        (4, "anytime separation", anytime_separation),
        (5, "LIL bound verification", lil_bound_verification),
        (6, "scaling sanity", scaling_sanity),
        (7, "lazy argmax oracle equivalence", oracle_equivalence),
        (8, "determinism across worker counts", determinism),
        (9, "formula oracles", formula_oracles),
    ];
    let mut failed = 0;
    for (id, name, check) in criteria {
        let start = Instant::now();
        let (status, detail) = match check() {
            Ok(detail) => ("PASS", detail),
            Err(detail) => {
                failed += 1;
                ("FAIL", detail)
            }
        };
        println!("criterion {id} {status}: {name}: {detail} [{:.1?}]", start.elapsed());
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
