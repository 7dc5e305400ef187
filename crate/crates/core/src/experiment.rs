//! Experiment grids and hyperparameter sweeps.
//!
//! One dataset is generated per experiment. Each (proportion, repeat) pair
//! gets its own mask and initialisation seed, shared by every arm so arms are
//! compared on identical inputs; adding or reordering arms leaves the other
//! arms' numbers unchanged.

use std::collections::HashSet;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::{generate, mask_labels, GeneratorConfig, SyntheticDataset};
use crate::distribution::DEFAULT_BINS;
use crate::error::{Error, Result};
use crate::io::{histograms, metrics_csv, thresholds_csv, write_hashed};
use crate::labels::PartialLabelMatrix;
use crate::seed::derive_seed;
use crate::threshold::default_gamma;
use crate::train::{train, ThresholdMode, TrainConfig, TrainRun};

const MASK_STREAM: u64 = 1;
const TRAIN_STREAM: u64 = 2;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Arm {
    pub label: String,
    pub config: TrainConfig,
}

impl Arm {
    pub fn new(label: impl Into<String>, config: TrainConfig) -> Self {
        Self {
            label: label.into(),
            config,
        }
    }
}

/// The four standard arms: fixed threshold, linear decay, SATE without the
/// ranking term, and SATE with it.
pub fn ablation_arms(base: &TrainConfig) -> Vec<Arm> {
    let with = |mode, lambda| TrainConfig {
        threshold_mode: mode,
        lambda,
        ..base.clone()
    };
    vec![
        Arm::new("fixed_0.9", with(ThresholdMode::Fixed { value: 0.9 }, 0.0)),
        Arm::new("linear_decay", with(ThresholdMode::LinearDecay { start: 0.95, end: 0.75 }, 0.0)),
        Arm::new("sate", with(ThresholdMode::Sate, 0.0)),
        Arm::new("sate_drl", with(ThresholdMode::Sate, base.lambda)),
    ]
}

fn default_workers() -> usize {
    1
}

fn default_true() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub name: String,
    pub generator: GeneratorConfig,
    pub known_proportions: Vec<f64>,
    pub arms: Vec<Arm>,
    pub repeats: usize,
    pub output_dir: PathBuf,
    #[serde(default)]
    pub base_seed: u64,
    /// Size of the worker pool running grid cells.
    #[serde(default = "default_workers")]
    pub workers: usize,
    /// Replace each arm's `gamma` with the proportion-dependent default.
    #[serde(default = "default_true")]
    pub gamma_from_proportion: bool,
}

impl ExperimentSpec {
    pub fn validate(&self) -> Result<()> {
        if self.name.is_empty() || self.name.contains(['/', '\\']) {
            return Err(Error::Config(format!("invalid experiment name {:?}", self.name)));
        }
        if self.repeats == 0 {
            return Err(Error::Config("repeats must be at least 1".into()));
        }
        if self.arms.is_empty() || self.known_proportions.is_empty() {
            return Err(Error::Config("need at least one arm and one proportion".into()));
        }
        let mut seen = HashSet::new();
        for arm in &self.arms {
            if arm.label.is_empty() || arm.label.contains(['/', '\\', ',']) {
                return Err(Error::Config(format!("invalid arm label {:?}", arm.label)));
            }
            if !seen.insert(arm.label.as_str()) {
                return Err(Error::Config(format!("duplicate arm label {:?}", arm.label)));
            }
            arm.config.validate()?;
        }
        if let Some(p) = self.known_proportions.iter().find(|p| !(**p > 0.0 && **p <= 1.0)) {
            return Err(Error::Config(format!("known proportion {p} outside (0, 1]")));
        }
        self.generator.validate()
    }

    /// Config actually trained for one grid cell.
    pub fn cell_config(&self, proportion_index: usize, arm_index: usize, repeat: usize) -> TrainConfig {
        let mut config = self.arms[arm_index].config.clone();
        if self.gamma_from_proportion {
            config.sate.gamma = default_gamma(self.known_proportions[proportion_index]);
        }
        config.seed = derive_seed(self.base_seed, &[TRAIN_STREAM, proportion_index as u64, repeat as u64]);
        config
    }

    pub fn mask_seed(&self, proportion_index: usize, repeat: usize) -> u64 {
        derive_seed(self.base_seed, &[MASK_STREAM, proportion_index as u64, repeat as u64])
    }
}

/// Headline numbers of one finished grid cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellResult {
    pub proportion: f64,
    pub arm: String,
    pub repeat: usize,
    pub final_map: Option<f64>,
    pub best_map: Option<f64>,
    pub best_epoch: Option<usize>,
    pub pseudo_precision: Option<f64>,
    pub pseudo_recall: Option<f64>,
}

impl CellResult {
    fn from_run(proportion: f64, arm: &str, repeat: usize, run: &TrainRun) -> Self {
        let best = run.best_stage2_epoch();
        Self {
            proportion,
            arm: arm.to_owned(),
            repeat,
            final_map: run.final_record().eval.map,
            best_map: best.and_then(|r| r.eval.map),
            best_epoch: best.map(|r| r.epoch),
            pseudo_precision: best.and_then(|r| r.pseudo.mean_precision),
            pseudo_recall: best.and_then(|r| r.pseudo.mean_recall_all),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellFailure {
    pub proportion: f64,
    pub arm: String,
    pub repeat: usize,
    pub error: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub name: String,
    pub cells: usize,
    pub completed: usize,
    pub files: Vec<ManifestEntry>,
    pub failures: Vec<CellFailure>,
}

impl Manifest {
    pub fn is_success(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Mean and sample standard deviation (`None` below two values).
pub fn mean_std(values: &[f64]) -> (Option<f64>, Option<f64>) {
    if values.is_empty() {
        return (None, None);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let std = (values.len() >= 2)
        .then(|| (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt());
    (Some(mean), std)
}

/// `65.8±0.2` style cell, in percent.
pub fn format_cell(mean: Option<f64>, std: Option<f64>) -> String {
    match (mean, std) {
        (Some(m), Some(s)) => format!("{:.1}±{:.1}", 100.0 * m, 100.0 * s),
        (Some(m), None) => format!("{:.1}", 100.0 * m),
        _ => String::new(),
    }
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.6}")).unwrap_or_default()
}

pub const SUMMARY_HEADER: &str = "proportion,arm,repeats,completed,final_map_mean,final_map_std,best_map_mean,\
best_map_std,pseudo_precision_mean,pseudo_recall_mean,final_map_cell";

/// One row per (proportion, arm) in spec order.
pub fn summary_csv(spec: &ExperimentSpec, results: &[CellResult]) -> String {
    let mut out = String::from(SUMMARY_HEADER);
    out.push('\n');
    for &p in &spec.known_proportions {
        for arm in &spec.arms {
            let cell: Vec<&CellResult> = results.iter().filter(|r| r.proportion == p && r.arm == arm.label).collect();
            let collect = |f: fn(&CellResult) -> Option<f64>| cell.iter().filter_map(|r| f(r)).collect::<Vec<_>>();
            let (fm, fs) = mean_std(&collect(|r| r.final_map));
            let (bm, bs) = mean_std(&collect(|r| r.best_map));
            let (pm, _) = mean_std(&collect(|r| r.pseudo_precision));
            let (rm, _) = mean_std(&collect(|r| r.pseudo_recall));
            let _ = writeln!(
                out,
                "{p},{},{},{},{},{},{},{},{},{},{}",
                arm.label,
                spec.repeats,
                cell.len(),
                fmt_opt(fm),
                fmt_opt(fs),
                fmt_opt(bm),
                fmt_opt(bs),
                fmt_opt(pm),
                fmt_opt(rm),
                format_cell(fm, fs)
            );
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentOutcome {
    pub results: Vec<CellResult>,
    pub summary: String,
    pub manifest: Manifest,
}

fn in_pool<T: Send>(workers: usize, job: impl FnOnce() -> T + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::Config(format!("worker pool: {e}")))?;
    Ok(pool.install(job))
}

struct Cell {
    p_idx: usize,
    arm_idx: usize,
    repeat: usize,
}

fn cell_dir(spec: &ExperimentSpec, cell: &Cell) -> String {
    format!(
        "p{}_{}/{}/r{}",
        cell.p_idx, spec.known_proportions[cell.p_idx], spec.arms[cell.arm_idx].label, cell.repeat
    )
}

fn run_cell(
    spec: &ExperimentSpec,
    dataset: &SyntheticDataset,
    masks: &[Vec<PartialLabelMatrix>],
    cell: &Cell,
) -> Result<(CellResult, Vec<ManifestEntry>)> {
    let config = spec.cell_config(cell.p_idx, cell.arm_idx, cell.repeat);
    let run = train(dataset, &masks[cell.p_idx][cell.repeat], &config)?;
    let dir = cell_dir(spec, cell);
    let files = [
        ("metrics.csv", metrics_csv(&run).into_bytes()),
        ("thresholds.csv", thresholds_csv(&run).into_bytes()),
        (
            "histograms.json",
            serde_json::to_vec_pretty(&histograms(&run.final_distributions, DEFAULT_BINS)?)?,
        ),
    ];
    let mut entries = Vec::with_capacity(files.len());
    for (name, bytes) in files {
        let rel = format!("{dir}/{name}");
        let sha256 = write_hashed(&spec.output_dir.join(&rel), &bytes)?;
        entries.push(ManifestEntry { path: rel, sha256 });
    }
    let result = CellResult::from_run(
        spec.known_proportions[cell.p_idx],
        &spec.arms[cell.arm_idx].label,
        cell.repeat,
        &run,
    );
    Ok((result, entries))
}

/// Runs every (proportion × arm × repeat) cell and writes per-cell files,
/// `summary.csv` and `manifest.json` under `spec.output_dir`.
///
/// Cell failures are recorded in the manifest; the other cells still run.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<ExperimentOutcome> {
    spec.validate()?;
    let dataset = generate(&spec.generator)?;
    let masks = spec
        .known_proportions
        .iter()
        .enumerate()
        .map(|(p_idx, &rho)| {
            (0..spec.repeats)
                .map(|r| mask_labels(&dataset.full_labels, rho, spec.mask_seed(p_idx, r)))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;

    let cells: Vec<Cell> = (0..spec.known_proportions.len())
        .flat_map(|p_idx| {
            (0..spec.arms.len()).flat_map(move |arm_idx| (0..spec.repeats).map(move |repeat| Cell { p_idx, arm_idx, repeat }))
        })
        .collect();
    let outcomes: Vec<Result<(CellResult, Vec<ManifestEntry>)>> =
        in_pool(spec.workers, || cells.par_iter().map(|c| run_cell(spec, &dataset, &masks, c)).collect())?;

    let mut results = Vec::new();
    let mut files = Vec::new();
    let mut failures = Vec::new();
    for (cell, outcome) in cells.iter().zip(outcomes) {
        match outcome {
            Ok((result, entries)) => {
                results.push(result);
                files.extend(entries);
            }
            Err(e) => failures.push(CellFailure {
                proportion: spec.known_proportions[cell.p_idx],
                arm: spec.arms[cell.arm_idx].label.clone(),
                repeat: cell.repeat,
                error: e.to_string(),
            }),
        }
    }

    let summary = summary_csv(spec, &results);
    let sha256 = write_hashed(&spec.output_dir.join("summary.csv"), summary.as_bytes())?;
    files.push(ManifestEntry {
        path: "summary.csv".into(),
        sha256,
    });
    let manifest = Manifest {
        name: spec.name.clone(),
        cells: cells.len(),
        completed: results.len(),
        files,
        failures,
    };
    let mut bytes = serde_json::to_vec_pretty(&manifest)?;
    bytes.push(b'\n');
    write_hashed(&spec.output_dir.join("manifest.json"), &bytes)?;
    Ok(ExperimentOutcome {
        results,
        summary,
        manifest,
    })
}

/// Shared setup for the hyperparameter sweeps.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepBase {
    pub generator: GeneratorConfig,
    pub known_proportion: f64,
    pub train: TrainConfig,
    pub repeats: usize,
    #[serde(default)]
    pub base_seed: u64,
    #[serde(default = "default_workers")]
    pub workers: usize,
}

/// Best-epoch pseudo-label quality for one hyperparameter setting,
/// averaged over repeats.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub gamma: f64,
    pub kappa_pos: f64,
    pub kappa_neg: f64,
    pub precision: Option<f64>,
    pub recall: Option<f64>,
    pub best_map: Option<f64>,
    pub completed: usize,
}

impl SweepBase {
    fn validate(&self) -> Result<()> {
        if self.repeats == 0 {
            return Err(Error::Config("repeats must be at least 1".into()));
        }
        if !(self.known_proportion > 0.0 && self.known_proportion <= 1.0) {
            return Err(Error::Config(format!("known proportion {} outside (0, 1]", self.known_proportion)));
        }
        self.generator.validate()?;
        self.train.validate()
    }

    /// Runs one config per entry of `configs` with DRL off and SATE on,
    /// pairing masks and initialisation across entries.
    fn run(&self, configs: Vec<TrainConfig>) -> Result<Vec<SweepRow>> {
        self.validate()?;
        let dataset = generate(&self.generator)?;
        let masks = (0..self.repeats)
            .map(|r| mask_labels(&dataset.full_labels, self.known_proportion, derive_seed(self.base_seed, &[MASK_STREAM, r as u64])))
            .collect::<Result<Vec<_>>>()?;
        let jobs: Vec<(usize, usize)> = (0..configs.len()).flat_map(|i| (0..self.repeats).map(move |r| (i, r))).collect();
        let runs: Vec<Result<CellResult>> = in_pool(self.workers, || {
            jobs.par_iter()
                .map(|&(i, r)| {
                    let config = TrainConfig {
                        lambda: 0.0,
                        threshold_mode: ThresholdMode::Sate,
                        seed: derive_seed(self.base_seed, &[TRAIN_STREAM, r as u64]),
                        ..configs[i].clone()
                    };
                    config.validate()?;
                    let run = train(&dataset, &masks[r], &config)?;
                    Ok(CellResult::from_run(self.known_proportion, "", r, &run))
                })
                .collect()
        })?;
        let mut rows = Vec::with_capacity(configs.len());
        for (i, config) in configs.iter().enumerate() {
            let done: Vec<&CellResult> = jobs
                .iter()
                .zip(&runs)
                .filter(|((j, _), _)| *j == i)
                .filter_map(|(_, r)| r.as_ref().ok())
                .collect();
            let mean = |f: fn(&CellResult) -> Option<f64>| mean_std(&done.iter().filter_map(|c| f(c)).collect::<Vec<_>>()).0;
            rows.push(SweepRow {
                gamma: config.sate.gamma,
                kappa_pos: config.sate.kappa_pos,
                kappa_neg: config.sate.kappa_neg,
                precision: mean(|c| c.pseudo_precision),
                recall: mean(|c| c.pseudo_recall),
                best_map: mean(|c| c.best_map),
                completed: done.len(),
            });
        }
        if let Some(Err(e)) = runs.into_iter().find(Result::is_err) {
            if rows.iter().all(|r| r.completed == 0) {
                return Err(e);
            }
        }
        Ok(rows)
    }
}

/// Pseudo-label precision and recall as a function of the EMA momentum.
pub fn sweep_gamma(base: &SweepBase, gammas: &[f64]) -> Result<Vec<SweepRow>> {
    if let Some(g) = gammas.iter().find(|g| !(**g > 0.0 && **g < 1.0)) {
        return Err(Error::Config(format!("gamma {g} outside (0, 1)")));
    }
    let configs = gammas
        .iter()
        .map(|&gamma| {
            let mut c = base.train.clone();
            c.sate.gamma = gamma;
            c
        })
        .collect();
    base.run(configs)
}

/// One-at-a-time quantile-level sweep: each `kappa_pos` with the base
/// `kappa_neg`, then each `kappa_neg` with the base `kappa_pos`.
pub fn sweep_kappa(base: &SweepBase, kappa_pos: &[f64], kappa_neg: &[f64]) -> Result<Vec<SweepRow>> {
    if let Some(k) = kappa_pos.iter().chain(kappa_neg).find(|k| !(**k > 0.0 && **k < 1.0)) {
        return Err(Error::Config(format!("quantile level {k} outside (0, 1)")));
    }
    let with = |kp: f64, kn: f64| {
        let mut c = base.train.clone();
        c.sate.kappa_pos = kp;
        c.sate.kappa_neg = kn;
        c
    };
    let configs = kappa_pos
        .iter()
        .map(|&kp| with(kp, base.train.sate.kappa_neg))
        .chain(kappa_neg.iter().map(|&kn| with(base.train.sate.kappa_pos, kn)))
        .collect();
    base.run(configs)
}

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from("gamma,kappa_pos,kappa_neg,precision,recall,best_map,completed\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            r.gamma,
            r.kappa_pos,
            r.kappa_neg,
            fmt_opt(r.precision),
            fmt_opt(r.recall),
            fmt_opt(r.best_map),
            r.completed
        );
    }
    out
}

/// Writes `contents` under `dir` and returns a manifest entry for it.
pub fn write_entry(dir: &Path, name: &str, contents: &[u8]) -> Result<ManifestEntry> {
    Ok(ManifestEntry {
        path: name.to_owned(),
        sha256: write_hashed(&dir.join(name), contents)?,
    })
}
