use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use switchomd::harness::{persist_scaling_study, validate_horizon_grid};
use switchomd::{
    best_s_switch_loss, brute_force_s_switch_loss, load_loss_matrix, regret::MAX_BRUTE_FORCE_SEQUENCES, run_experiment,
    run_scaling_study, save_loss_matrix, AlgorithmId, ClipMode, EnvSpec, Error, ExperimentConfig, LogBase, Pattern,
    SegmentLayout,
};

#[derive(Parser)]
#[command(name = "switchomd", version, about = "Switching-regret bandit experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one algorithm over a seed list and report S-switch regret.
    Run(RunArgs),
    /// Repeat a run over a grid of horizons and fit the log-log regret slope.
    Scale {
        #[command(flatten)]
        run: RunArgs,
        /// Comma-separated horizons, e.g. 2000,8000,32000.
        #[arg(long = "t-grid", value_delimiter = ',', required = true)]
        t_grid: Vec<usize>,
    },
    /// Generate a loss table and write it as CSV (plus a .meta.json sidecar).
    GenEnv {
        #[command(flatten)]
        env: EnvArgs,
        #[arg(long = "T")]
        horizon: usize,
        #[arg(long = "K")]
        arms: usize,
        #[arg(long = "S")]
        switches: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Compute the best S-switch comparator for a loss table.
    Oracle {
        #[command(flatten)]
        env: EnvArgs,
        #[arg(long = "T")]
        horizon: Option<usize>,
        #[arg(long = "K")]
        arms: Option<usize>,
        #[arg(long = "S")]
        switches: usize,
        /// Cross-check against exhaustive enumeration (small tables only).
        #[arg(long)]
        brute_force: bool,
    },
}

#[derive(Args, Clone)]
struct EnvArgs {
    /// Generator name (piecewise-bernoulli, alternating-punisher, sawtooth) or a CSV path.
    #[arg(long)]
    env: Option<String>,
    /// Best-arm advantage for piecewise-bernoulli.
    #[arg(long)]
    gap: Option<f64>,
    /// Segment layout for piecewise-bernoulli (equal or geometric).
    #[arg(long)]
    layout: Option<String>,
    /// Seed for the environment draw (independent of the run seeds).
    #[arg(long = "env-seed")]
    env_seed: Option<u64>,
}

#[derive(Args, Clone)]
struct RunArgs {
    /// JSON file mirroring the experiment configuration; flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    algo: Option<String>,
    #[command(flatten)]
    env: EnvArgs,
    #[arg(long = "T")]
    horizon: Option<usize>,
    #[arg(long = "K")]
    arms: Option<usize>,
    #[arg(long = "S")]
    switches: Option<usize>,
    /// Seed list: `0..20` (half-open range) or `1,2,3`.
    #[arg(long)]
    seeds: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long = "log-base")]
    log_base: Option<String>,
    #[arg(long = "clip-mode")]
    clip_mode: Option<String>,
    /// Record per-round learning-rate state.
    #[arg(long)]
    instrument: bool,
}

fn config_error(field: &str, reason: impl Into<String>) -> anyhow::Error {
    Error::Config { field: field.to_string(), reason: reason.into() }.into()
}

fn parse_seeds(text: &str) -> Result<Vec<u64>> {
    let bad = |_| config_error("seeds", format!("cannot parse `{text}` (use `0..20` or `1,2,3`)"));
    if let Some((lo, hi)) = text.split_once("..") {
        let lo: u64 = lo.trim().parse().map_err(bad)?;
        let hi: u64 = hi.trim().parse().map_err(bad)?;
        return Ok((lo..hi).collect());
    }
    text.split(',').map(|s| s.trim().parse::<u64>().map_err(bad)).collect()
}

impl EnvArgs {
    fn spec(&self, base: Option<EnvSpec>) -> Result<EnvSpec> {
        let name = match (&self.env, &base) {
            (Some(name), _) => name.as_str(),
            (None, Some(spec)) => return self.patch(spec.clone()),
            (None, None) => return Err(config_error("env", "no environment given (use --env)")),
        };
        let spec = match name {
            "piecewise-bernoulli" => EnvSpec::PiecewiseBernoulli { gap: 0.4, layout: SegmentLayout::Equal, seed: 0 },
            "alternating-punisher" | "sawtooth" => EnvSpec::Deterministic { pattern: name.parse::<Pattern>()? },
            path => EnvSpec::File { path: PathBuf::from(path) },
        };
        self.patch(spec)
    }

    fn patch(&self, spec: EnvSpec) -> Result<EnvSpec> {
        match spec {
            EnvSpec::PiecewiseBernoulli { gap, layout, seed } => Ok(EnvSpec::PiecewiseBernoulli {
                gap: self.gap.unwrap_or(gap),
                layout: match &self.layout {
                    Some(l) => l.parse::<SegmentLayout>()?,
                    None => layout,
                },
                seed: self.env_seed.unwrap_or(seed),
            }),
            other => {
                if self.gap.is_some() || self.layout.is_some() || self.env_seed.is_some() {
                    return Err(config_error("env", "--gap, --layout and --env-seed apply only to piecewise-bernoulli"));
                }
                Ok(other)
            }
        }
    }
}

impl RunArgs {
    fn resolve(&self) -> Result<ExperimentConfig> {
        let base = match &self.config {
            Some(path) => Some(ExperimentConfig::from_file(path)?),
            None => None,
        };
        let require = |v: Option<usize>, from_base: Option<usize>, field: &str| {
            v.or(from_base).ok_or_else(|| config_error(field, format!("missing (use --{field} or --config)")))
        };
        let algorithm = match (&self.algo, &base) {
            (Some(a), _) => a.parse::<AlgorithmId>()?,
            (None, Some(b)) => b.algorithm,
            (None, None) => return Err(config_error("algorithm", "missing (use --algo or --config)")),
        };
        let seeds = match (&self.seeds, &base) {
            (Some(s), _) => parse_seeds(s)?,
            (None, Some(b)) => b.seeds.clone(),
            (None, None) => vec![0],
        };
        let log_base = match &self.log_base {
            Some(s) => s.parse::<LogBase>()?,
            None => base.as_ref().map(|b| b.log_base).unwrap_or_default(),
        };
        let clip_mode = match &self.clip_mode {
            Some(s) => s.parse::<ClipMode>()?,
            None => base.as_ref().map(|b| b.clip_mode).unwrap_or_default(),
        };
        Ok(ExperimentConfig {
            algorithm,
            env: self.env.spec(base.as_ref().map(|b| b.env.clone()))?,
            horizon: require(self.horizon, base.as_ref().map(|b| b.horizon), "T")?,
            arms: require(self.arms, base.as_ref().map(|b| b.arms), "K")?,
            switches: require(self.switches, base.as_ref().map(|b| b.switches), "S")?,
            seeds,
            out_dir: self.out.clone().or_else(|| base.as_ref().and_then(|b| b.out_dir.clone())),
            log_base,
            clip_mode,
            instrument: self.instrument || base.as_ref().is_some_and(|b| b.instrument),
        })
    }
}

fn run(args: &RunArgs) -> Result<()> {
    let config = args.resolve()?;
    let outcome = run_experiment(&config)?;
    let r = &outcome.report;
    if config.out_dir.is_none() {
        println!("{}", serde_json::to_string_pretty(r)?);
    } else {
        println!(
            "{}: T={} K={} S={} seeds={} mean_loss={:.4} se={:.4} comparator={:.4} regret={:.4}",
            r.algorithm,
            r.horizon,
            r.arms,
            r.switches,
            r.per_seed.len(),
            r.mean_loss,
            r.std_error,
            r.comparator_loss,
            r.regret
        );
    }
    Ok(())
}

fn scale(args: &RunArgs, grid: &[usize]) -> Result<()> {
    validate_horizon_grid(grid)?;
    // Each grid point supplies its own horizon.
    let config = RunArgs { horizon: Some(grid[0]), ..args.clone() }.resolve()?;
    let study = run_scaling_study(&config, grid)?;
    print!("{}", study.to_csv());
    println!("slope={:.4} se={:.4}", study.fit.slope, study.fit.slope_std_error);
    if !study.fit.excluded.is_empty() {
        println!("excluded (nonpositive regret): {:?}", study.fit.excluded);
    }
    if let Some(dir) = &config.out_dir {
        persist_scaling_study(&study, dir)?;
    }
    Ok(())
}

fn load_table(env: &EnvArgs, horizon: Option<usize>, arms: Option<usize>, switches: usize) -> Result<switchomd::LossMatrix> {
    let spec = env.spec(None)?;
    if let EnvSpec::File { path } = &spec {
        return Ok(load_loss_matrix(path)?);
    }
    let config = ExperimentConfig {
        algorithm: AlgorithmId::Uniform,
        env: spec,
        horizon: horizon.ok_or_else(|| config_error("T", "missing (use --T)"))?,
        arms: arms.ok_or_else(|| config_error("K", "missing (use --K)"))?,
        switches,
        seeds: vec![0],
        out_dir: None,
        log_base: LogBase::default(),
        clip_mode: ClipMode::default(),
        instrument: false,
    };
    config.validate()?;
    Ok(switchomd::harness::build_environment(&config)?)
}

fn gen_env(env: &EnvArgs, horizon: usize, arms: usize, switches: usize, out: &Path) -> Result<()> {
    let matrix = load_table(env, Some(horizon), Some(arms), switches)?;
    save_loss_matrix(&matrix, out).with_context(|| format!("writing {}", out.display()))?;
    println!("wrote {} ({} x {})", out.display(), matrix.horizon(), matrix.arms());
    Ok(())
}

fn oracle(env: &EnvArgs, horizon: Option<usize>, arms: Option<usize>, switches: usize, brute_force: bool) -> Result<()> {
    let matrix = load_table(env, horizon, arms, switches)?;
    let comparator = best_s_switch_loss(&matrix, switches);
    println!(
        "{}",
        serde_json::json!({
            "loss": comparator.loss,
            "switches": comparator.switches,
            "clamped": comparator.clamped,
            "schedule": comparator.schedule,
        })
    );
    if brute_force {
        if (matrix.arms() as f64).powi(matrix.horizon() as i32) > MAX_BRUTE_FORCE_SEQUENCES {
            return Err(config_error("brute-force", "table too large for exhaustive enumeration"));
        }
        let exact = brute_force_s_switch_loss(&matrix, switches)?;
        println!("brute_force={exact} agree={}", exact == comparator.loss);
    }
    Ok(())
}

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<Error>() {
        Some(e) if e.is_config_error() => 2,
        _ => 3,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Run(args) => run(args),
        Command::Scale { run, t_grid } => scale(run, t_grid),
        Command::GenEnv { env, horizon, arms, switches, out } => gen_env(env, *horizon, *arms, *switches, out),
        Command::Oracle { env, horizon, arms, switches, brute_force } => {
            oracle(env, *horizon, *arms, *switches, *brute_force)
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
