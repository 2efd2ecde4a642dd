use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use lilucb::algorithms::{AlgorithmKind, AlgorithmSpec};
use lilucb::harness::{
    run_anytime_experiment, run_stopping_time_experiment, verify_lil_bound, write_anytime, write_stop_times,
    write_summary, write_trials, CellParams, ExperimentConfig, Format, LilVerification,
};
use lilucb::scenario::{make_scenario, ScenarioSpec, DEFAULT_SCALE};

const EXIT_USAGE: u8 = 1;
const EXIT_BOUND_EXCEEDED: u8 = 2;

/// Best-arm identification experiments: lil'UCB and baselines.
#[derive(Debug, Parser)]
#[command(name = "lilucb", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print means, gaps and hardness of a scenario.
    Scenarios(ScenarioArgs),
    /// Print resolved algorithm parameters for a problem size.
    Presets(PresetArgs),
    /// Run the stopping-time experiment.
    RunStopping(RunArgs),
    /// Run the anytime-error experiment.
    RunAnytime(RunArgs),
    /// Check the finite-time LIL bound against simulated random walks.
    VerifyLil(VerifyArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum KindFlag {
    OneSparse,
    Alpha,
    Explicit,
}

#[derive(Debug, Args)]
struct ScenarioArgs {
    /// Scenario JSON; replaces the other flags.
    #[arg(long, conflicts_with_all = ["kind", "n", "alpha", "means"])]
    spec: Option<String>,
    #[arg(long, value_enum)]
    kind: Option<KindFlag>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    alpha: Option<f64>,
    /// Comma-separated means for `--kind explicit`.
    #[arg(long, value_delimiter = ',')]
    means: Option<Vec<f64>>,
    #[arg(long, default_value_t = DEFAULT_SCALE)]
    scale: f64,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

impl ScenarioArgs {
    fn spec(&self) -> anyhow::Result<ScenarioSpec> {
        if let Some(json) = &self.spec {
            return Ok(ScenarioSpec::from_json(json)?);
        }
        let spec = match self.kind {
            None => bail!("either --spec or --kind is required"),
            Some(KindFlag::OneSparse) => ScenarioSpec::one_sparse(self.n.context("--n is required")?),
            Some(KindFlag::Alpha) => {
                ScenarioSpec::alpha(self.n.context("--n is required")?, self.alpha.context("--alpha is required")?)
            }
            Some(KindFlag::Explicit) => ScenarioSpec::explicit(self.means.clone().context("--means is required")?),
        };
        Ok(spec.with_scale(self.scale))
    }
}

#[derive(Debug, Args)]
struct PresetArgs {
    /// Number of arms.
    #[arg(long)]
    arms: usize,
    #[arg(long, default_value_t = lilucb::harness::DEFAULT_NU)]
    nu: f64,
    #[arg(long, default_value_t = DEFAULT_SCALE)]
    scale: f64,
    /// Algorithm name or JSON spec; repeatable. Defaults to every algorithm.
    #[arg(long = "algorithm")]
    algorithms: Vec<String>,
}

#[derive(Debug, Args)]
struct RunArgs {
    /// Experiment config (JSON). Flags below override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Scenario JSON, or shorthand `one_sparse:N` / `alpha:N:ALPHA`; repeatable.
    #[arg(long = "scenario")]
    scenarios: Vec<String>,
    /// Algorithm name or JSON spec; repeatable.
    #[arg(long = "algorithm")]
    algorithms: Vec<String>,
    #[arg(long)]
    trials: Option<u64>,
    #[arg(long)]
    nu: Option<f64>,
    #[arg(long)]
    master_seed: Option<u64>,
    #[arg(long)]
    max_pulls: Option<u64>,
    /// Comma-separated, strictly increasing pull counts.
    #[arg(long, value_delimiter = ',')]
    checkpoints: Option<Vec<u64>>,
    /// Worker threads.
    #[arg(long, alias = "parallelism", env = "LILUCB_WORKERS")]
    workers: Option<usize>,
    /// Record per-trial wall time (makes `wall_ms` nondeterministic).
    #[arg(long)]
    timing: bool,
    /// Main output file; sidecars are written next to it. Stdout when absent.
    #[arg(long, short)]
    output: Option<PathBuf>,
    /// Metadata sidecar path; defaults to `<output stem>.meta.json`, or stderr.
    #[arg(long)]
    metadata: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    /// Comma-separated epsilons.
    #[arg(long, value_delimiter = ',', default_value = "1")]
    eps: Vec<f64>,
    /// Comma-separated deltas.
    #[arg(long, value_delimiter = ',', default_value = "0.05")]
    delta: Vec<f64>,
    #[arg(long, default_value_t = 1.0)]
    sigma: f64,
    #[arg(long, default_value_t = 100_000)]
    horizon: u64,
    #[arg(long, default_value_t = 10_000)]
    walks: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Allowed excess of the empirical rate over the bound; negative tightens the check.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    slack: f64,
    #[arg(long, env = "LILUCB_WORKERS")]
    workers: Option<usize>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

fn parse_algorithm(text: &str) -> anyhow::Result<AlgorithmSpec> {
    let text = text.trim();
    if text.starts_with('{') {
        return Ok(AlgorithmSpec::from_json(text)?);
    }
    let (name, ls) = match text.split_once('+') {
        Some((name, "ls")) => (name, Some(true)),
        Some(_) => bail!("unknown algorithm suffix in {text:?}"),
        None => (text, None),
    };
    let kind = AlgorithmKind::ALL
        .into_iter()
        .find(|k| k.name() == name.replace('-', "_"))
        .with_context(|| {
            let names: Vec<&str> = AlgorithmKind::ALL.iter().map(|k| k.name()).collect();
            format!("unknown algorithm {name:?}; expected one of {}", names.join(", "))
        })?;
    let spec = AlgorithmSpec::new(kind);
    Ok(match ls {
        Some(ls) => spec.with_ls(ls),
        None => spec,
    })
}

fn parse_scenario(text: &str) -> anyhow::Result<ScenarioSpec> {
    let text = text.trim();
    if text.starts_with('{') {
        return Ok(ScenarioSpec::from_json(text)?);
    }
    let parts: Vec<&str> = text.split(':').collect();
    let spec = match parts.as_slice() {
        [kind, n] if matches!(*kind, "one_sparse" | "one-sparse") => ScenarioSpec::one_sparse(n.parse()?),
        [kind, n, alpha] if *kind == "alpha" => ScenarioSpec::alpha(n.parse()?, alpha.parse()?),
        _ => bail!("cannot parse scenario {text:?}; use JSON, one_sparse:N or alpha:N:ALPHA"),
    };
    spec.validate()?;
    Ok(spec)
}

impl RunArgs {
    fn config(&self) -> anyhow::Result<ExperimentConfig> {
        let mut cfg = match &self.config {
            Some(path) => {
                let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
                ExperimentConfig::from_json(&text).with_context(|| format!("parsing {}", path.display()))?
            }
            None => ExperimentConfig::new(Vec::new(), Vec::new()),
        };
        if !self.scenarios.is_empty() {
            cfg.scenarios = self.scenarios.iter().map(|s| parse_scenario(s)).collect::<anyhow::Result<_>>()?;
        }
        if !self.algorithms.is_empty() {
            cfg.algorithms = self.algorithms.iter().map(|s| parse_algorithm(s)).collect::<anyhow::Result<_>>()?;
        }
        if let Some(v) = self.trials {
            cfg.trials = Some(v);
        }
        if let Some(v) = self.nu {
            cfg.nu = v;
        }
        if let Some(v) = self.master_seed {
            cfg.master_seed = v;
        }
        if let Some(v) = self.max_pulls {
            cfg.max_pulls = v;
        }
        if let Some(v) = &self.checkpoints {
            cfg.checkpoints = Some(v.clone());
        }
        if let Some(v) = self.workers {
            cfg.parallelism = Some(v);
        }
        cfg.timing |= self.timing;
        cfg.validate()?;
        Ok(cfg)
    }

    fn sidecar(&self, suffix: &str) -> Option<PathBuf> {
        self.output.as_ref().map(|p| sibling(p, suffix))
    }

    fn metadata_path(&self) -> Option<PathBuf> {
        self.metadata.clone().or_else(|| self.sidecar("meta.json"))
    }
}

/// `results.csv` + `summary.csv` → `results.summary.csv`.
fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    path.with_file_name(format!("{stem}.{suffix}"))
}

fn extension(format: Format) -> &'static str {
    match format {
        Format::Csv => "csv",
        Format::Json => "json",
    }
}

fn create(path: &Path) -> anyhow::Result<BufWriter<File>> {
    let file = File::create(path).with_context(|| format!("cannot write {}", path.display()))?;
    Ok(BufWriter::new(file))
}

fn with_output<F>(path: Option<&Path>, write: F) -> anyhow::Result<()>
where
    F: FnOnce(&mut dyn Write) -> lilucb::Result<()>,
{
    match path {
        Some(path) => {
            let mut out = create(path)?;
            write(&mut out)?;
            out.flush().with_context(|| format!("cannot write {}", path.display()))?;
        }
        None => {
            let stdout = io::stdout();
            let mut out = stdout.lock();
            write(&mut out)?;
            out.flush()?;
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct Metadata<'a> {
    command: &'a str,
    version: &'a str,
    master_seed: u64,
    config: &'a ExperimentConfig,
    resolved: &'a [CellParams],
}

fn write_metadata(args: &RunArgs, meta: &Metadata) -> anyhow::Result<()> {
    let text = serde_json::to_string_pretty(meta)? + "\n";
    match args.metadata_path() {
        Some(path) => {
            std::fs::write(&path, text).with_context(|| format!("cannot write {}", path.display()))?;
            eprintln!("metadata: {}", path.display());
        }
        None => eprint!("{text}"),
    }
    Ok(())
}

fn cmd_scenarios(args: &ScenarioArgs) -> anyhow::Result<ExitCode> {
    let spec = args.spec()?;
    let instance = make_scenario(&spec)?;
    let gaps = instance.gaps();
    let h1 = instance.hardness_h1();
    let h3 = instance.hardness_h3().ok();
    match args.format {
        Format::Json => {
            let means: Vec<f64> = instance.means().collect();
            let value = serde_json::json!({
                "spec": spec,
                "best_arm": instance.best_arm(),
                "means": means,
                "gaps": gaps,
                "h1": h1,
                "h3": h3,
            });
            println!("{}", serde_json::to_string_pretty(&value)?);
        }
        Format::Csv => {
            println!("# {spec}");
            println!("# best_arm = {}", instance.best_arm());
            println!("# H1 = {h1}");
            match h3 {
                Some(h3) => println!("# H3 = {h3}"),
                None => println!("# H3 = undefined (a gap exceeds 1)"),
            }
            println!("arm,mean,gap");
            for (arm, (mean, gap)) in instance.means().zip(&gaps).enumerate() {
                println!("{arm},{mean},{gap}");
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_presets(args: &PresetArgs) -> anyhow::Result<ExitCode> {
    let specs: Vec<AlgorithmSpec> = if args.algorithms.is_empty() {
        AlgorithmKind::ALL.into_iter().map(AlgorithmSpec::new).collect()
    } else {
        args.algorithms.iter().map(|s| parse_algorithm(s)).collect::<anyhow::Result<_>>()?
    };
    let resolved = specs
        .iter()
        .map(|s| s.resolve(args.arms, args.scale, args.nu))
        .collect::<lilucb::Result<Vec<_>>>()?;
    println!("{}", serde_json::to_string_pretty(&resolved)?);
    Ok(ExitCode::SUCCESS)
}

fn announce(kind: &str, cfg: &ExperimentConfig, trials: u64) {
    let cells = cfg.scenarios.len() * cfg.algorithms.len();
    let workers = cfg.parallelism.map_or_else(|| "auto".to_string(), |w| w.to_string());
    eprintln!("{kind}: {cells} cells x {trials} trials, master_seed {}, workers {workers}", cfg.master_seed);
}

fn cmd_run_stopping(args: &RunArgs) -> anyhow::Result<ExitCode> {
    let cfg = args.config()?;
    announce("run-stopping", &cfg, cfg.trials.unwrap_or(lilucb::harness::DEFAULT_STOPPING_TRIALS));
    let start = Instant::now();
    let report = run_stopping_time_experiment(&cfg)?;
    eprintln!("finished {} trials in {:.2?}", report.rows.len(), start.elapsed());

    with_output(args.output.as_deref(), |out| write_trials(out, &report.rows, args.format))?;
    let summary = args.sidecar(&format!("summary.{}", extension(args.format)));
    match &summary {
        Some(path) => with_output(Some(path), |out| write_summary(out, &report.cells, args.format))?,
        None => {
            let mut buf = Vec::new();
            write_summary(&mut buf, &report.cells, args.format)?;
            eprint!("{}", String::from_utf8_lossy(&buf));
        }
    }
    write_metadata(
        args,
        &Metadata {
            command: "run-stopping",
            version: env!("CARGO_PKG_VERSION"),
            master_seed: cfg.master_seed,
            config: &cfg,
            resolved: &report.params,
        },
    )?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_run_anytime(args: &RunArgs) -> anyhow::Result<ExitCode> {
    let cfg = args.config()?;
    announce("run-anytime", &cfg, cfg.trials.unwrap_or(lilucb::harness::DEFAULT_ANYTIME_TRIALS));
    let start = Instant::now();
    let report = run_anytime_experiment(&cfg)?;
    eprintln!("finished {} trials in {:.2?}", report.rows.len(), start.elapsed());

    with_output(args.output.as_deref(), |out| write_anytime(out, &report.curves, args.format))?;
    let ext = extension(args.format);
    if let Some(path) = args.sidecar(&format!("stops.{ext}")) {
        with_output(Some(&path), |out| write_stop_times(out, &report.curves, args.format))?;
    }
    if let Some(path) = args.sidecar(&format!("trials.{ext}")) {
        with_output(Some(&path), |out| write_trials(out, &report.rows, args.format))?;
    }
    write_metadata(
        args,
        &Metadata {
            command: "run-anytime",
            version: env!("CARGO_PKG_VERSION"),
            master_seed: cfg.master_seed,
            config: &cfg,
            resolved: &report.params,
        },
    )?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_verify_lil(args: &VerifyArgs) -> anyhow::Result<ExitCode> {
    if args.walks == 0 {
        bail!("--walks must be at least 1");
    }
    if args.horizon == 0 {
        bail!("--horizon must be at least 1");
    }
    if !args.slack.is_finite() {
        bail!("--slack must be finite");
    }
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(w) = args.workers {
        builder = builder.num_threads(w);
    }
    let pool = builder.build()?;
    let mut results: Vec<LilVerification> = Vec::new();
    for &eps in &args.eps {
        for &delta in &args.delta {
            eprintln!("verify-lil: eps {eps}, delta {delta}, {} walks x {}", args.walks, args.horizon);
            let v = pool
                .install(|| verify_lil_bound(eps, delta, args.sigma, args.horizon, args.walks, args.seed))
                .with_context(|| format!("grid point eps = {eps}, delta = {delta}"))?;
            results.push(v);
        }
    }
    let exceeded = results.iter().filter(|v| !v.holds(args.slack)).count();
    match args.format {
        Format::Json => println!("{}", serde_json::to_string_pretty(&results)?),
        Format::Csv => {
            println!("eps,delta,sigma,horizon,walks,failures,empirical_rate,bound,holds");
            for v in &results {
                println!(
                    "{},{},{},{},{},{},{},{},{}",
                    v.eps,
                    v.delta,
                    v.sigma,
                    v.horizon,
                    v.num_walks,
                    v.failures,
                    v.empirical_rate,
                    v.bound,
                    v.holds(args.slack)
                );
            }
        }
    }
    if exceeded > 0 {
        eprintln!("{exceeded} grid point(s) exceeded the bound (slack {})", args.slack);
        return Ok(ExitCode::from(EXIT_BOUND_EXCEEDED));
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let _ = err.print();
            return if err.use_stderr() { ExitCode::from(EXIT_USAGE) } else { ExitCode::SUCCESS };
        }
    };
    let result = match &cli.command {
        Command::Scenarios(args) => cmd_scenarios(args),
        Command::Presets(args) => cmd_presets(args),
        Command::RunStopping(args) => cmd_run_stopping(args),
        Command::RunAnytime(args) => cmd_run_anytime(args),
        Command::VerifyLil(args) => cmd_verify_lil(args),
    };
    result.unwrap_or_else(|err| {
        eprintln!("error: {err:#}");
        ExitCode::from(EXIT_USAGE)
    })
}
