//! Command-line front end. Every subcommand prints one JSON status object on
//! stdout; the exit code is 0 on full success, 1 when some experiment cells
//! failed, and 2 on any other error.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use satl::data::{generate, mask_labels, GeneratorConfig, SyntheticDataset};
use satl::distribution::{accumulate, DEFAULT_BINS};
use satl::experiment::{ablation_arms, run_experiment, sweep_csv, sweep_gamma, sweep_kappa, Arm, ExperimentSpec, SweepBase};
use satl::io::{self, Checkpoint};
use satl::metrics::evaluate;
use satl::model::Architecture;
use satl::threshold::SateConfig;
use satl::{train, Error, Result, ThresholdMode, TrainConfig};

#[derive(Parser)]
#[command(name = "satl", version, about = "Semantic-aware threshold learning for partially labelled multi-label data")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic dataset and a masked copy of its labels.
    Generate {
        #[command(flatten)]
        generator: GenArgs,
        #[arg(long, default_value_t = 0.2)]
        known_proportion: f64,
        #[arg(long, default_value_t = 1)]
        mask_seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Train on a generated dataset directory.
    Train {
        #[arg(long)]
        data: PathBuf,
        #[command(flatten)]
        train: TrainArgs,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run a (proportion x arm x repeat) grid.
    Experiment {
        /// JSON experiment spec; replaces the flags below.
        #[arg(long)]
        spec: Option<PathBuf>,
        #[arg(long, default_value = "experiment")]
        name: String,
        #[command(flatten)]
        generator: GenArgs,
        #[command(flatten)]
        train: TrainArgs,
        #[arg(long, value_delimiter = ',', default_value = "0.05,0.1,0.2,0.3,0.4,0.5")]
        proportions: Vec<f64>,
        /// Subset of fixed_0.9, linear_decay, sate, sate_drl.
        #[arg(long, value_delimiter = ',', default_value = "fixed_0.9,linear_decay,sate,sate_drl")]
        arms: Vec<String>,
        #[arg(long, default_value_t = 3)]
        repeats: usize,
        #[arg(long)]
        output_dir: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        base_seed: u64,
        #[arg(long, default_value_t = 1)]
        workers: usize,
    },
    /// Pseudo-label precision and recall against the EMA momentum.
    SweepGamma {
        #[command(flatten)]
        sweep: SweepArgs,
        #[arg(long, value_delimiter = ',', default_value = "0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9")]
        gammas: Vec<f64>,
    },
    /// Pseudo-label precision and recall against the quantile levels.
    SweepKappa {
        #[command(flatten)]
        sweep: SweepArgs,
        /// Levels for the positive-score quantile.
        #[arg(long, value_delimiter = ',', default_value = "0.999,0.9,0.8,0.7,0.6,0.5")]
        pos_levels: Vec<f64>,
        /// Levels for the negative-score quantile.
        #[arg(long, value_delimiter = ',', default_value = "0.1,0.2,0.3,0.4,0.5")]
        neg_levels: Vec<f64>,
    },
    /// Histogram the known-label score distributions of a checkpoint.
    DumpDistributions {
        #[arg(long)]
        checkpoint: PathBuf,
        #[arg(long)]
        data: PathBuf,
        #[arg(long, default_value_t = DEFAULT_BINS)]
        bins: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Evaluate a checkpoint, or a scores CSV, against full labels.
    Eval {
        #[arg(long, required_unless_present = "scores")]
        checkpoint: Option<PathBuf>,
        /// Directory with features.csv and labels_full.csv.
        #[arg(long)]
        data: Option<PathBuf>,
        #[arg(long, requires = "labels")]
        scores: Option<PathBuf>,
        #[arg(long)]
        labels: Option<PathBuf>,
        #[arg(long, default_value_t = 0.5)]
        threshold: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args, Clone)]
struct GenArgs {
    #[arg(long, default_value_t = 5000)]
    n_samples: usize,
    #[arg(long, default_value_t = 20)]
    n_categories: usize,
    #[arg(long, default_value_t = 64)]
    feature_dim: usize,
    #[arg(long, default_value_t = 14.0)]
    separation: f64,
    #[arg(long, default_value_t = 0.1)]
    prevalence: f64,
    /// Use prevalence head/(c+1) instead of a constant.
    #[arg(long)]
    long_tail: Option<f64>,
    #[arg(long, default_value_t = 0.0)]
    cooccurrence: f64,
    #[arg(long, default_value_t = 1.0)]
    noise: f64,
    #[arg(long, default_value_t = 7)]
    data_seed: u64,
}

impl GenArgs {
    fn config(&self) -> GeneratorConfig {
        let cfg = GeneratorConfig::uniform(
            self.n_samples,
            self.n_categories,
            self.feature_dim,
            self.separation,
            self.prevalence,
            self.data_seed,
        )
        .with_cooccurrence(self.cooccurrence)
        .with_noise(self.noise);
        match self.long_tail {
            Some(head) => cfg.long_tail(head),
            None => cfg,
        }
    }
}

#[derive(Args, Clone)]
struct TrainArgs {
    /// JSON train config; replaces the flags below.
    #[arg(long)]
    config: Option<PathBuf>,
    /// `linear` or `mlp:<hidden>`.
    #[arg(long, default_value = "linear")]
    architecture: String,
    #[arg(long, default_value_t = 0.02)]
    lr: f64,
    /// Last epoch trained on known labels only.
    #[arg(long, default_value_t = 10)]
    epochs_stage1: usize,
    /// Last epoch overall.
    #[arg(long, default_value_t = 40)]
    epochs_stage2: usize,
    #[arg(long, default_value_t = 64)]
    batch_size: usize,
    #[arg(long, default_value_t = 0.01)]
    lambda: f64,
    /// `sate`, `fixed:<value>` or `decay:<start>:<end>`.
    #[arg(long, default_value = "sate")]
    threshold_mode: String,
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long, default_value_t = 0.1)]
    kappa_pos: f64,
    #[arg(long, default_value_t = 0.999)]
    kappa_neg: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

fn parse_f64(s: &str) -> Result<f64> {
    s.parse().map_err(|_| Error::Parse {
        context: "command line".into(),
        message: format!("not a number: {s:?}"),
    })
}

impl TrainArgs {
    fn config(&self, known_proportion: f64) -> Result<TrainConfig> {
        if let Some(path) = &self.config {
            return io::read_json(path);
        }
        let architecture = match self.architecture.split_once(':') {
            None if self.architecture == "linear" => Architecture::Linear,
            Some(("mlp", h)) => Architecture::Mlp {
                hidden: h.parse().map_err(|_| Error::Config(format!("bad hidden size {h:?}")))?,
            },
            _ => return Err(Error::Config(format!("unknown architecture {:?}", self.architecture))),
        };
        let parts: Vec<&str> = self.threshold_mode.split(':').collect();
        let threshold_mode = match parts.as_slice() {
            ["sate"] => ThresholdMode::Sate,
            ["fixed", v] => ThresholdMode::Fixed { value: parse_f64(v)? },
            ["decay", a, b] => ThresholdMode::LinearDecay {
                start: parse_f64(a)?,
                end: parse_f64(b)?,
            },
            _ => return Err(Error::Config(format!("unknown threshold mode {:?}", self.threshold_mode))),
        };
        let mut sate = SateConfig::for_known_proportion(known_proportion);
        sate.kappa_pos = self.kappa_pos;
        sate.kappa_neg = self.kappa_neg;
        if let Some(g) = self.gamma {
            sate.gamma = g;
        }
        Ok(TrainConfig {
            architecture,
            lr_stage1: self.lr,
            lr_stage2: self.lr,
            epochs_stage1: self.epochs_stage1,
            epochs_stage2: self.epochs_stage2,
            batch_size: self.batch_size,
            lambda: self.lambda,
            threshold_mode,
            sate,
            seed: self.seed,
            ..TrainConfig::default()
        })
    }
}

#[derive(Args)]
struct SweepArgs {
    /// JSON sweep base; replaces the flags below.
    #[arg(long)]
    spec: Option<PathBuf>,
    #[command(flatten)]
    generator: GenArgs,
    #[command(flatten)]
    train: TrainArgs,
    #[arg(long, default_value_t = 0.2)]
    known_proportion: f64,
    #[arg(long, default_value_t = 3)]
    repeats: usize,
    #[arg(long, default_value_t = 1)]
    base_seed: u64,
    #[arg(long, default_value_t = 1)]
    workers: usize,
    #[arg(long)]
    out: PathBuf,
}

impl SweepArgs {
    fn base(&self) -> Result<SweepBase> {
        if let Some(path) = &self.spec {
            return io::read_json(path);
        }
        Ok(SweepBase {
            generator: self.generator.config(),
            known_proportion: self.known_proportion,
            train: self.train.config(self.known_proportion)?,
            repeats: self.repeats,
            base_seed: self.base_seed,
            workers: self.workers,
        })
    }
}

const FEATURES: &str = "features.csv";
const FULL_LABELS: &str = "labels_full.csv";
const MASKED_LABELS: &str = "labels_masked.csv";
const GENERATOR: &str = "generator.json";

fn load_dataset(dir: &Path) -> Result<(SyntheticDataset, satl::PartialLabelMatrix)> {
    let dataset = SyntheticDataset {
        features: io::read_real_csv(&dir.join(FEATURES))?,
        full_labels: io::read_labels_csv(&dir.join(FULL_LABELS))?,
        config: io::read_json(&dir.join(GENERATOR))?,
    };
    let masked = io::read_labels_csv(&dir.join(MASKED_LABELS))?;
    if dataset.features.nrows() != dataset.full_labels.n_samples() {
        return Err(Error::Dimension {
            expected: dataset.full_labels.dim(),
            actual: dataset.features.dim(),
        });
    }
    Ok((dataset, masked))
}

fn run(command: Command) -> Result<(Value, u8)> {
    match command {
        Command::Generate {
            generator,
            known_proportion,
            mask_seed,
            out,
        } => {
            let dataset = generate(&generator.config())?;
            let masked = mask_labels(&dataset.full_labels, known_proportion, mask_seed)?;
            io::write_real_csv(&out.join(FEATURES), &dataset.features)?;
            io::write_labels_csv(&out.join(FULL_LABELS), &dataset.full_labels)?;
            io::write_labels_csv(&out.join(MASKED_LABELS), &masked)?;
            io::write_json(&out.join(GENERATOR), &dataset.config)?;
            Ok((json!({ "status": "ok", "out": out, "known": masked.total_known() }), 0))
        }
        Command::Train { data, train: args, out } => {
            let (dataset, masked) = load_dataset(&data)?;
            let rho = masked.total_known() as f64 / (masked.n_samples() * masked.n_categories()) as f64;
            let config = args.config(rho)?;
            let run = train(&dataset, &masked, &config)?;
            io::write_metrics_csv(&out.join("metrics.csv"), &run)?;
            io::write_thresholds_csv(&out.join("thresholds.csv"), &run)?;
            io::write_histograms(&out.join("histograms.json"), &run.final_distributions, DEFAULT_BINS)?;
            io::write_json(&out.join("config.json"), &run.config)?;
            Checkpoint::from_run(&run).save(&out.join("checkpoint.json"))?;
            let last = run.final_record();
            Ok((
                json!({ "status": "ok", "out": out, "final_map": last.eval.map, "best_epoch": run.best_stage2_epoch().map(|r| r.epoch) }),
                0,
            ))
        }
        Command::Experiment {
            spec,
            name,
            generator,
            train: args,
            proportions,
            arms,
            repeats,
            output_dir,
            base_seed,
            workers,
        } => {
            let mut spec = match spec {
                Some(path) => io::read_json::<ExperimentSpec>(&path)?,
                None => {
                    let base = args.config(0.2)?;
                    let available = ablation_arms(&base);
                    let arms = arms
                        .iter()
                        .map(|label| {
                            available
                                .iter()
                                .find(|a| &a.label == label)
                                .cloned()
                                .ok_or_else(|| Error::Config(format!("unknown arm {label:?}")))
                        })
                        .collect::<Result<Vec<Arm>>>()?;
                    ExperimentSpec {
                        output_dir: PathBuf::from(&name),
                        name,
                        generator: generator.config(),
                        known_proportions: proportions,
                        arms,
                        repeats,
                        base_seed,
                        workers,
                        gamma_from_proportion: args.gamma.is_none(),
                    }
                }
            };
            if let Some(dir) = output_dir {
                spec.output_dir = dir;
            }
            let outcome = run_experiment(&spec)?;
            let code = if outcome.manifest.is_success() { 0 } else { 1 };
            Ok((
                json!({
                    "status": if code == 0 { "ok" } else { "partial" },
                    "manifest": spec.output_dir.join("manifest.json"),
                    "completed": outcome.manifest.completed,
                    "cells": outcome.manifest.cells,
                    "failures": outcome.manifest.failures,
                }),
                code,
            ))
        }
        Command::SweepGamma { sweep, gammas } => {
            let rows = sweep_gamma(&sweep.base()?, &gammas)?;
            io::write_hashed(&sweep.out, sweep_csv(&rows).as_bytes())?;
            Ok((json!({ "status": "ok", "out": sweep.out, "rows": rows.len() }), 0))
        }
        Command::SweepKappa {
            sweep,
            pos_levels,
            neg_levels,
        } => {
            let rows = sweep_kappa(&sweep.base()?, &pos_levels, &neg_levels)?;
            io::write_hashed(&sweep.out, sweep_csv(&rows).as_bytes())?;
            Ok((json!({ "status": "ok", "out": sweep.out, "rows": rows.len() }), 0))
        }
        Command::DumpDistributions {
            checkpoint,
            data,
            bins,
            out,
        } => {
            let ckpt = Checkpoint::load(&checkpoint)?;
            let (dataset, masked) = load_dataset(&data)?;
            let scores = ckpt.model.forward(dataset.features.view())?;
            io::write_histograms(&out, &accumulate(&scores, &masked)?, bins)?;
            Ok((json!({ "status": "ok", "out": out }), 0))
        }
        Command::Eval {
            checkpoint,
            data,
            scores,
            labels,
            threshold,
            out,
        } => {
            let (scores, truth) = match (scores, labels, checkpoint, data) {
                (Some(s), Some(l), _, _) => (io::read_scores_csv(&s)?, io::read_labels_csv(&l)?),
                (_, _, Some(c), Some(d)) => {
                    let model = Checkpoint::load(&c)?.model;
                    let (dataset, _) = load_dataset(&d)?;
                    (model.forward(dataset.features.view())?, dataset.full_labels)
                }
                _ => return Err(Error::Config("need --scores and --labels, or --checkpoint and --data".into())),
            };
            let report = evaluate(&scores, &truth, threshold)?;
            if let Some(path) = &out {
                io::write_json(path, &report)?;
            }
            Ok((json!({ "status": "ok", "report": report }), 0))
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => e.exit(),
        Err(e) => {
            eprint!("{e}");
            println!("{}", json!({ "status": "error", "error": e.kind().to_string() }));
            return ExitCode::from(2);
        }
    };
    let (value, code) = run(cli.command).unwrap_or_else(|e| (json!({ "status": "error", "error": e.to_string() }), 2));
    println!("{value}");
    ExitCode::from(code)
}
