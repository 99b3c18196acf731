//! Reproducible experiment runner.
//!
//! Seeding: every configured seed `s` drives the algorithm through
//! `ChaCha8Rng::seed_from_u64(derive_seed(s, STREAM_ALGORITHM))`, while the
//! environment is drawn once from `derive_seed(env_seed, STREAM_ENVIRONMENT)`.
//! Changing the algorithm therefore never changes the loss table.

use std::path::{Path, PathBuf};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algos::{build_algorithm, AlgorithmId, AlgorithmOptions};
use crate::env::{
    gen_deterministic_adversarial, gen_piecewise_bernoulli, load_loss_matrix, loss_matrix_to_csv, write_atomic, LossMatrix,
    Pattern, SegmentLayout,
};
use crate::error::{Error, Result};
use crate::grid::{CandidateGrid, LogBase};
use crate::record::{Instrumentation, RunRecord, StepRecord};
use crate::regret::{best_s_switch_loss, evaluate_with_comparator, RegretReport};
use crate::simplex::ClipMode;

pub const STREAM_ENVIRONMENT: u64 = 1;
pub const STREAM_ALGORITHM: u64 = 2;

/// SplitMix64 finalizer applied to `root + stream * golden_gamma`.
pub fn derive_seed(root: u64, stream: u64) -> u64 {
    let mut z = root.wrapping_add(stream.wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Where the loss table comes from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "generator", rename_all = "kebab-case", deny_unknown_fields)]
pub enum EnvSpec {
    PiecewiseBernoulli {
        gap: f64,
        #[serde(default)]
        layout: SegmentLayout,
        #[serde(default)]
        seed: u64,
    },
    Deterministic {
        pattern: Pattern,
    },
    File {
        path: PathBuf,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub algorithm: AlgorithmId,
    pub env: EnvSpec,
    #[serde(rename = "T")]
    pub horizon: usize,
    #[serde(rename = "K")]
    pub arms: usize,
    #[serde(rename = "S")]
    pub switches: usize,
    pub seeds: Vec<u64>,
    #[serde(default)]
    pub out_dir: Option<PathBuf>,
    #[serde(default)]
    pub log_base: LogBase,
    #[serde(default)]
    pub clip_mode: ClipMode,
    /// Record per-round learning-rate series.
    #[serde(default)]
    pub instrument: bool,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::config("config", e.to_string()))
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::config("config", format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn options(&self) -> AlgorithmOptions {
        AlgorithmOptions { log_base: self.log_base, clip_mode: self.clip_mode }
    }

    pub fn validate(&self) -> Result<()> {
        if self.seeds.is_empty() {
            return Err(Error::config("seeds", "seed list must be nonempty"));
        }
        let mut sorted = self.seeds.clone();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::config("seeds", "seed list contains duplicates"));
        }
        if self.horizon < 2 {
            return Err(Error::config("T", format!("horizon must be >= 2, got {}", self.horizon)));
        }
        if self.arms < 2 {
            return Err(Error::config("K", format!("need at least 2 arms, got {}", self.arms)));
        }
        if self.switches >= self.horizon {
            return Err(Error::config("S", format!("S = {} must be < T = {}", self.switches, self.horizon)));
        }
        match &self.env {
            EnvSpec::PiecewiseBernoulli { gap, .. } if !(*gap > 0.0 && *gap <= 1.0) => {
                return Err(Error::config("env.gap", format!("{gap} is outside (0, 1]")));
            }
            EnvSpec::File { path } if !path.is_file() => {
                return Err(Error::config("env.path", format!("{} does not exist", path.display())));
            }
            _ => {}
        }
        // Surfaces infeasible (T, K) combinations before any work happens.
        build_algorithm(self.algorithm, self.horizon, self.arms, self.switches, self.options()).map_err(|e| match e {
            Error::InfeasibleParameters(msg) => Error::config("T/K", msg),
            other => other,
        })?;
        Ok(())
    }
}

/// Builds the loss table a config describes.
pub fn build_environment(config: &ExperimentConfig) -> Result<LossMatrix> {
    let matrix = match &config.env {
        EnvSpec::PiecewiseBernoulli { gap, layout, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(*seed, STREAM_ENVIRONMENT));
            let mut m = gen_piecewise_bernoulli(config.horizon, config.arms, config.switches, *gap, *layout, &mut rng)?;
            m.metadata.seed = Some(*seed);
            m
        }
        EnvSpec::Deterministic { pattern } => gen_deterministic_adversarial(config.horizon, config.arms, config.switches, *pattern)?,
        EnvSpec::File { path } => {
            let m = load_loss_matrix(path)?;
            if m.horizon() != config.horizon {
                return Err(Error::config("T", format!("file has {} rounds, config says {}", m.horizon(), config.horizon)));
            }
            if m.arms() != config.arms {
                return Err(Error::config("K", format!("file has {} arms, config says {}", m.arms(), config.arms)));
            }
            m
        }
    };
    Ok(matrix)
}

/// Plays one seed against `matrix`.
pub fn run_single(config: &ExperimentConfig, matrix: &LossMatrix, seed: u64) -> Result<RunRecord> {
    let mut alg = build_algorithm(config.algorithm, matrix.horizon(), matrix.arms(), config.switches, config.options())?;
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, STREAM_ALGORITHM));
    let mut instrumentation = if config.instrument {
        let h_dagger = match config.algorithm {
            AlgorithmId::Alg1 | AlgorithmId::Alg2 => CandidateGrid::build_with_base(matrix.horizon(), config.log_base)?
                .h_dagger(config.switches.max(1) as f64)
                .map(|(i, _)| i),
            _ => None,
        };
        Some(Instrumentation { h_dagger, ..Instrumentation::default() })
    } else {
        None
    };
    let mut steps = Vec::with_capacity(matrix.horizon());
    for t in 1..=matrix.horizon() {
        if let (Some(ins), Some(sample)) = (instrumentation.as_mut(), alg.instrument()) {
            if let Some(h) = ins.h_dagger {
                ins.h_dagger_prob.push(sample.master_probs[h]);
            }
            if let Some(th) = sample.thresholds {
                ins.thresholds.push(th);
            }
            if let Some(xi) = sample.master_rates {
                ins.master_rates.push(xi);
            }
            ins.base_rates.push(sample.base_rates);
        }
        let step = alg.step(&mut rng, &mut |a| matrix.loss(t, a))?;
        steps.push(StepRecord { t, base: step.base, arm: step.arm, loss: step.loss });
    }
    Ok(RunRecord { algorithm: config.algorithm.to_string(), seed, steps, instrumentation })
}

/// Everything an experiment produced, before (or after) persistence.
#[derive(Clone, Debug)]
pub struct ExperimentOutcome {
    pub config: ExperimentConfig,
    pub matrix: LossMatrix,
    pub runs: Vec<RunRecord>,
    pub report: RegretReport,
}

#[derive(Serialize)]
struct Summary<'a> {
    config: &'a ExperimentConfig,
    report: &'a RegretReport,
}

impl ExperimentOutcome {
    pub fn summary_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&Summary { config: &self.config, report: &self.report })?)
    }

    /// File name -> contents, in canonical order.
    pub fn artifacts(&self) -> Result<Vec<(String, Vec<u8>)>> {
        let mut files = vec![
            ("summary.json".to_string(), self.summary_json()?.into_bytes()),
            ("env.csv".to_string(), loss_matrix_to_csv(&self.matrix).into_bytes()),
            ("env.meta.json".to_string(), serde_json::to_string_pretty(&self.matrix.metadata)?.into_bytes()),
        ];
        for run in &self.runs {
            files.push((format!("run-{}-seed{}.csv", run.algorithm, run.seed), run.to_csv().into_bytes()));
            if let Some(ins) = &run.instrumentation {
                files.push((format!("instrument-{}-seed{}.json", run.algorithm, run.seed), serde_json::to_vec(ins)?));
            }
        }
        Ok(files)
    }

    /// Writes every artifact into `dir`. Files are staged in a temporary
    /// directory inside `dir` and renamed into place only once all of them exist.
    pub fn persist(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let files = self.artifacts()?;
        let staging = tempfile::Builder::new().prefix(".staging-").tempdir_in(dir).map_err(|e| Error::io(dir, e))?;
        for (name, bytes) in &files {
            write_atomic(&staging.path().join(name), bytes)?;
        }
        for (name, _) in &files {
            let from = staging.path().join(name);
            let to = dir.join(name);
            std::fs::rename(&from, &to).map_err(|e| Error::io(&to, e))?;
        }
        Ok(())
    }
}

/// Runs every seed (in parallel), evaluates regret, and persists when `out_dir` is set.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentOutcome> {
    config.validate()?;
    let matrix = build_environment(config)?;
    let outcome = run_on_matrix(config, matrix)?;
    if let Some(dir) = &config.out_dir {
        outcome.persist(dir)?;
    }
    Ok(outcome)
}

/// Runs every seed against an already-built table (no persistence).
pub fn run_on_matrix(config: &ExperimentConfig, matrix: LossMatrix) -> Result<ExperimentOutcome> {
    let mut seeds = config.seeds.clone();
    seeds.sort_unstable();
    let runs = seeds.par_iter().map(|&s| run_single(config, &matrix, s)).collect::<Result<Vec<_>>>()?;
    for run in &runs {
        run.validate(&matrix)?;
    }
    let comparator = best_s_switch_loss(&matrix, config.switches);
    let report = evaluate_with_comparator(&runs, &matrix, &comparator)?;
    Ok(ExperimentOutcome { config: config.clone(), matrix, runs, report })
}

/// Ordinary least squares fit of `ln(regret) = intercept + slope * ln(T)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PowerLawFit {
    pub slope: f64,
    pub intercept: f64,
    /// `NaN` with fewer than three usable points.
    pub slope_std_error: f64,
    /// Horizons dropped because their regret was not positive.
    pub excluded: Vec<usize>,
}

pub fn fit_power_law(points: &[(usize, f64)]) -> Result<PowerLawFit> {
    let excluded: Vec<usize> = points.iter().filter(|(_, r)| !(*r > 0.0)).map(|(t, _)| *t).collect();
    let used: Vec<(f64, f64)> =
        points.iter().filter(|(_, r)| *r > 0.0).map(|&(t, r)| ((t as f64).ln(), r.ln())).collect();
    if used.len() < 2 {
        return Err(Error::InvalidParameter { name: "points", reason: "need at least two positive regret points".into() });
    }
    let n = used.len() as f64;
    let mx = used.iter().map(|p| p.0).sum::<f64>() / n;
    let my = used.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = used.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = used.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidParameter { name: "points", reason: "horizons must differ".into() });
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let slope_std_error = if used.len() > 2 {
        let ssr: f64 = used.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum();
        (ssr / (n - 2.0) / sxx).sqrt()
    } else {
        f64::NAN
    };
    Ok(PowerLawFit { slope, intercept, slope_std_error, excluded })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingRow {
    #[serde(rename = "T")]
    pub horizon: usize,
    pub mean_regret: f64,
    pub std_error: f64,
    pub comparator_loss: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingStudy {
    pub algorithm: AlgorithmId,
    pub rows: Vec<ScalingRow>,
    pub fit: PowerLawFit,
}

impl ScalingStudy {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("T,mean_regret,std_error,comparator_loss\n");
        for r in &self.rows {
            out.push_str(&format!("{},{},{},{}\n", r.horizon, r.mean_regret, r.std_error, r.comparator_loss));
        }
        out
    }
}

/// Checks that a horizon grid has at least three increasing, roughly geometric points.
pub fn validate_horizon_grid(grid: &[usize]) -> Result<()> {
    if grid.len() < 3 {
        return Err(Error::config("t_grid", "need at least 3 horizons"));
    }
    if grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::config("t_grid", "horizons must be strictly increasing"));
    }
    let ratios: Vec<f64> = grid.windows(2).map(|w| w[1] as f64 / w[0] as f64).collect();
    let r0 = ratios[0].ln();
    if ratios.iter().any(|r| (r.ln() - r0).abs() > 0.05 * r0.abs()) {
        return Err(Error::config("t_grid", "horizons must be geometrically spaced"));
    }
    Ok(())
}

/// Runs `base` at every horizon in `grid` and fits the log-log regret slope.
pub fn run_scaling_study(base: &ExperimentConfig, grid: &[usize]) -> Result<ScalingStudy> {
    validate_horizon_grid(grid)?;
    if matches!(base.env, EnvSpec::File { .. }) {
        return Err(Error::config("env", "scaling studies need a generated environment"));
    }
    let mut rows = Vec::with_capacity(grid.len());
    for &horizon in grid {
        let config = ExperimentConfig { horizon, out_dir: None, instrument: false, ..base.clone() };
        config.validate()?;
        let outcome = run_on_matrix(&config, build_environment(&config)?)?;
        rows.push(ScalingRow {
            horizon,
            mean_regret: outcome.report.regret,
            std_error: outcome.report.std_error,
            comparator_loss: outcome.report.comparator_loss,
        });
    }
    let fit = fit_power_law(&rows.iter().map(|r| (r.horizon, r.mean_regret)).collect::<Vec<_>>())?;
    Ok(ScalingStudy { algorithm: base.algorithm, rows, fit })
}

/// Persists a scaling study as `scaling-<algo>.json` and `.csv`.
pub fn persist_scaling_study(study: &ScalingStudy, dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let stem = format!("scaling-{}", study.algorithm);
    write_atomic(&dir.join(format!("{stem}.json")), serde_json::to_string_pretty(study)?.as_bytes())?;
    write_atomic(&dir.join(format!("{stem}.csv")), study.to_csv().as_bytes())
}
