//! Two-stage training.
//!
//! Stage one fits the classifier to the known labels only, with every
//! threshold pinned at its initial value. Stage two runs, once per epoch: a
//! full forward pass, per-category distribution estimates, a threshold
//! update, pseudo-label generation and fusion, and a mini-batch pass over the
//! combined objective.

use ndarray::Axis;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::data::SyntheticDataset;
use crate::distribution::{accumulate, ClassDistribution};
use crate::error::{Error, Result};
use crate::labels::{fuse_labels, FusedLabelMatrix, PartialLabelMatrix, ScoreMatrix};
use crate::loss::{partial_bce, satl_loss, score_to_logit_grad, LossBreakdown};
use crate::metrics::{evaluate, EvalReport, DEFAULT_PREDICTION_THRESHOLD};
use crate::model::{Architecture, Classifier, Gradients, Sgd};
use crate::pseudo::{evaluate_pseudo_labels, generate_pseudo_labels, PseudoLabelReport};
use crate::seed::derive_seed;
use crate::threshold::{estimate_boundaries, Boundaries, SateConfig, ThresholdState};

/// How stage-two thresholds are chosen.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum ThresholdMode {
    /// Quantile-based estimates tracked by an EMA.
    Sate,
    /// One constant threshold for every category.
    Fixed { value: f64 },
    /// One shared threshold decaying linearly from `start` at the first
    /// stage-two epoch to `end` at the last.
    LinearDecay { start: f64, end: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub architecture: Architecture,
    pub lr_stage1: f64,
    pub lr_stage2: f64,
    /// Last epoch of stage one.
    pub epochs_stage1: usize,
    /// Last epoch overall.
    pub epochs_stage2: usize,
    pub batch_size: usize,
    pub momentum: f64,
    pub sate: SateConfig,
    pub lambda: f64,
    pub threshold_mode: ThresholdMode,
    /// Trailing fraction of samples held out for evaluation; 0 evaluates on
    /// the training samples.
    pub validation_fraction: f64,
    pub prediction_threshold: f64,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            architecture: Architecture::Linear,
            lr_stage1: 0.02,
            lr_stage2: 0.02,
            epochs_stage1: 10,
            epochs_stage2: 40,
            batch_size: 64,
            momentum: 0.9,
            sate: SateConfig::default(),
            lambda: 0.01,
            threshold_mode: ThresholdMode::Sate,
            validation_fraction: 0.2,
            prediction_threshold: DEFAULT_PREDICTION_THRESHOLD,
            seed: 0,
        }
    }
}

impl TrainConfig {
    /// Defaults with `gamma` chosen from the known-label proportion.
    pub fn for_known_proportion(known_proportion: f64) -> Self {
        Self {
            sate: SateConfig::for_known_proportion(known_proportion),
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.epochs_stage1 >= self.epochs_stage2 {
            return Err(Error::Config(format!(
                "epochs_stage1 ({}) must be below epochs_stage2 ({})",
                self.epochs_stage1, self.epochs_stage2
            )));
        }
        if !(self.lr_stage1 > 0.0 && self.lr_stage2 > 0.0) {
            return Err(Error::Config("learning rates must be positive".into()));
        }
        if self.batch_size == 0 {
            return Err(Error::Config("batch_size must be positive".into()));
        }
        if !(0.0..1.0).contains(&self.momentum) {
            return Err(Error::Config(format!("momentum {} outside [0, 1)", self.momentum)));
        }
        if self.lambda.is_nan() || self.lambda < 0.0 {
            return Err(Error::Config(format!("lambda {} must be >= 0", self.lambda)));
        }
        if !(0.0..1.0).contains(&self.validation_fraction) {
            return Err(Error::Config(format!(
                "validation_fraction {} outside [0, 1)",
                self.validation_fraction
            )));
        }
        let in_unit = |v: f64| v > 0.0 && v <= 1.0;
        match self.threshold_mode {
            ThresholdMode::Sate => {}
            ThresholdMode::Fixed { value } if in_unit(value) => {}
            ThresholdMode::LinearDecay { start, end } if in_unit(start) && in_unit(end) => {}
            other => return Err(Error::Config(format!("threshold mode {other:?} outside (0, 1]"))),
        }
        self.sate.validate()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpochRecord {
    pub epoch: usize,
    pub stage: u8,
    /// Losses summed over the epoch's mini-batches.
    pub losses: LossBreakdown,
    /// Live thresholds used for this epoch's pseudo-labels.
    pub thresholds: Vec<f64>,
    /// Per-category boundaries estimated this epoch (stage two only).
    pub boundaries: Vec<Option<Boundaries>>,
    pub pseudo: PseudoLabelReport,
    pub eval: EvalReport,
}

impl EpochRecord {
    pub fn recalled(&self) -> usize {
        self.pseudo.recalled_total()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainRun {
    pub config: TrainConfig,
    pub records: Vec<EpochRecord>,
    pub model: Classifier,
    pub thresholds: ThresholdState,
    /// Known-sample score distributions under the final model.
    pub final_distributions: Vec<ClassDistribution>,
}

impl TrainRun {
    /// Stage-two epoch with the highest evaluation mAP (earliest on ties).
    pub fn best_stage2_epoch(&self) -> Option<&EpochRecord> {
        self.records
            .iter()
            .filter(|r| r.stage == 2)
            .fold(None, |best: Option<&EpochRecord>, r| match (best, r.eval.map) {
                (_, None) => best,
                (None, Some(_)) => Some(r),
                (Some(b), Some(m)) if m > b.eval.map.unwrap_or(f64::NEG_INFINITY) => Some(r),
                (Some(b), _) => Some(b),
            })
    }

    pub fn final_record(&self) -> &EpochRecord {
        self.records.last().expect("a run has at least one epoch")
    }
}

struct Split<'a> {
    train: SyntheticDataset,
    eval: std::borrow::Cow<'a, SyntheticDataset>,
    known: PartialLabelMatrix,
}

fn split<'a>(dataset: &'a SyntheticDataset, masked: &PartialLabelMatrix, fraction: f64) -> Result<Split<'a>> {
    masked.ensure_dim(dataset.full_labels.dim())?;
    if fraction == 0.0 {
        return Ok(Split {
            train: dataset.clone(),
            eval: std::borrow::Cow::Borrowed(dataset),
            known: masked.clone(),
        });
    }
    let (train, eval) = dataset.split(fraction)?;
    let known = masked.slice_rows(0, train.n_samples())?;
    Ok(Split {
        train,
        eval: std::borrow::Cow::Owned(eval),
        known,
    })
}

fn stage2_thresholds(
    mode: ThresholdMode,
    state: &mut ThresholdState,
    boundaries: &[Option<Boundaries>],
    epoch: usize,
    config: &TrainConfig,
) -> Result<()> {
    match mode {
        ThresholdMode::Sate => {
            let ideal: Vec<Option<f64>> = boundaries.iter().map(|b| b.map(|b| b.ideal())).collect();
            state.step(&ideal)?;
        }
        ThresholdMode::Fixed { value } => {
            state.thresholds.fill(value);
            state.epoch += 1;
        }
        ThresholdMode::LinearDecay { start, end } => {
            let span = (config.epochs_stage2 - config.epochs_stage1 - 1).max(1) as f64;
            let k = (epoch - config.epochs_stage1 - 1) as f64;
            state.thresholds.fill(start + (end - start) * (k / span).min(1.0));
            state.epoch += 1;
        }
    }
    Ok(())
}

/// Runs both training stages; deterministic given `config.seed`.
///
/// `masked` must cover every row of `dataset`; the trailing
/// `validation_fraction` of rows is used only for evaluation against the
/// full labels.
pub fn train(dataset: &SyntheticDataset, masked: &PartialLabelMatrix, config: &TrainConfig) -> Result<TrainRun> {
    config.validate()?;
    let Split { train, eval, known } = split(dataset, masked, config.validation_fraction)?;
    let n_categories = known.n_categories();
    let n_train = train.n_samples();

    let mut model = Classifier::new(
        config.architecture,
        train.features.ncols(),
        n_categories,
        derive_seed(config.seed, &[0]),
    )?;
    let mut shuffle_rng = ChaCha8Rng::seed_from_u64(derive_seed(config.seed, &[1]));
    let mut optimizer = Sgd::new(config.momentum);
    let mut state = ThresholdState::new(n_categories, config.sate);
    let mut records = Vec::with_capacity(config.epochs_stage2);
    let mut order: Vec<usize> = (0..n_train).collect();

    for epoch in 1..=config.epochs_stage2 {
        let stage2 = epoch > config.epochs_stage1;
        let scores = model.forward(train.features.view())?;
        let boundaries = if stage2 {
            let b = estimate_boundaries(&accumulate(&scores, &known)?, &config.sate);
            stage2_thresholds(config.threshold_mode, &mut state, &b, epoch, config)?;
            b
        } else {
            vec![None; n_categories]
        };

        let pseudo = generate_pseudo_labels(&scores, &known, &state.thresholds)?;
        let pseudo_report = evaluate_pseudo_labels(&pseudo, &known, &train.full_labels)?;
        let fused = fuse_labels(&known, &pseudo)?;

        let (lr, lambda) = if stage2 {
            (config.lr_stage2, config.lambda)
        } else {
            (config.lr_stage1, 0.0)
        };
        let mut losses = LossBreakdown::zero(lambda);
        order.shuffle(&mut shuffle_rng);
        for chunk in order.chunks(config.batch_size) {
            let x = train.features.select(Axis(0), chunk);
            let batch_known = known.select_rows(chunk);
            let cache = model.forward_cached(x.view())?;
            let batch_scores = ScoreMatrix::from_logits(&cache.logits);
            let (breakdown, dscores) = if stage2 {
                let batch_fused = fused.labels().select_rows(chunk);
                satl_loss(
                    &batch_scores,
                    &FusedLabelMatrix::from_known(&batch_fused),
                    &batch_known,
                    &state.thresholds,
                    lambda,
                )?
            } else {
                let out = partial_bce(&batch_scores, &batch_known)?;
                (LossBreakdown::new(out.loss, 0.0, 0.0), out.grad)
            };
            if !breakdown.total.is_finite() {
                return Err(Error::Diverged {
                    epoch,
                    loss: breakdown.total,
                });
            }
            losses.accumulate(&breakdown);
            let dlogits = score_to_logit_grad(&batch_scores, &dscores) / chunk.len() as f64;
            let grads: Gradients = model.backward(x.view(), &cache, &dlogits);
            optimizer.step(&mut model, &grads, lr);
        }
        if model.params().iter().any(|w| !w.is_finite()) {
            return Err(Error::Diverged {
                epoch,
                loss: f64::NAN,
            });
        }

        let eval_scores = model.forward(eval.features.view())?;
        records.push(EpochRecord {
            epoch,
            stage: if stage2 { 2 } else { 1 },
            losses,
            thresholds: state.thresholds.clone(),
            boundaries,
            pseudo: pseudo_report,
            eval: evaluate(&eval_scores, &eval.full_labels, config.prediction_threshold)?,
        });
    }

    let final_scores = model.forward(train.features.view())?;
    Ok(TrainRun {
        config: config.clone(),
        records,
        final_distributions: accumulate(&final_scores, &known)?,
        model,
        thresholds: state,
    })
}
