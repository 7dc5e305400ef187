//! File formats: dense matrix CSVs, per-epoch metric and threshold CSVs,
//! histogram dumps, and model checkpoints.

use std::fs;
use std::io::Write;
use std::path::Path;

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::distribution::{histogram, ClassDistribution, HistogramSummary};
use crate::error::{Error, Result};
use crate::labels::{LabelValue, PartialLabelMatrix, ScoreMatrix};
use crate::model::Classifier;
use crate::threshold::ThresholdState;
use crate::train::TrainRun;

pub const CHECKPOINT_MAGIC: &str = "SATL-CHECKPOINT";
pub const CHECKPOINT_VERSION: u32 = 1;

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

fn read_rows(path: &Path) -> Result<Vec<Vec<String>>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .from_path(path)
        .map_err(|e| match e.into_kind() {
            csv::ErrorKind::Io(io) => Error::io(path, io),
            other => Error::Parse {
                context: path.display().to_string(),
                message: format!("{other:?}"),
            },
        })?;
    let mut rows = Vec::new();
    for record in reader.records() {
        rows.push(record?.iter().map(str::to_owned).collect());
    }
    Ok(rows)
}

fn to_matrix<T>(rows: Vec<Vec<String>>, path: &Path, parse: impl Fn(&str) -> Option<T>) -> Result<Array2<T>> {
    let n = rows.len();
    let c = rows.first().map_or(0, Vec::len);
    let mut flat = Vec::with_capacity(n * c);
    for (i, row) in rows.into_iter().enumerate() {
        if row.len() != c {
            return Err(Error::Dimension {
                expected: (n, c),
                actual: (i, row.len()),
            });
        }
        for cell in row {
            flat.push(parse(cell.trim()).ok_or_else(|| Error::Parse {
                context: format!("{} row {}", path.display(), i + 1),
                message: format!("bad value {cell:?}"),
            })?);
        }
    }
    Array2::from_shape_vec((n, c), flat).map_err(|e| Error::Parse {
        context: path.display().to_string(),
        message: e.to_string(),
    })
}

fn matrix_csv<T>(m: &Array2<T>, fmt: impl Fn(&T) -> String) -> Vec<u8> {
    let mut out = String::new();
    for row in m.rows() {
        let cells: Vec<String> = row.iter().map(&fmt).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out.into_bytes()
}

pub fn write_labels_csv(path: &Path, labels: &PartialLabelMatrix) -> Result<()> {
    write_file(path, &matrix_csv(&labels.codes(), |v| v.to_string()))
}

pub fn read_labels_csv(path: &Path) -> Result<PartialLabelMatrix> {
    let codes = to_matrix(read_rows(path)?, path, |s| s.parse::<i64>().ok())?;
    let mut entries = Array2::from_elem(codes.dim(), LabelValue::Unknown);
    for (dst, &code) in entries.iter_mut().zip(codes.iter()) {
        *dst = LabelValue::try_from(code)?;
    }
    PartialLabelMatrix::new(entries)
}

pub fn write_real_csv(path: &Path, m: &Array2<f64>) -> Result<()> {
    write_file(path, &matrix_csv(m, |v| v.to_string()))
}

pub fn read_real_csv(path: &Path) -> Result<Array2<f64>> {
    to_matrix(read_rows(path)?, path, |s| s.parse::<f64>().ok())
}

pub fn write_scores_csv(path: &Path, scores: &ScoreMatrix) -> Result<()> {
    write_real_csv(path, &scores.view().to_owned())
}

pub fn read_scores_csv(path: &Path) -> Result<ScoreMatrix> {
    ScoreMatrix::new(read_real_csv(path)?)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut bytes = serde_json::to_vec_pretty(value)?;
    bytes.push(b'\n');
    write_file(path, &bytes)
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    Ok(serde_json::from_slice(&bytes)?)
}

pub const METRICS_HEADER: &str = "epoch,stage,cls_loss,drl_loss,total_loss,lambda,map,op,cp,or,cr,of1,cf1,\
pl_precision,pl_recall,pl_recall_all,recalled,true_positives,mean_threshold";

/// Per-epoch losses, evaluation metrics and pseudo-label quality.
pub fn metrics_csv(run: &TrainRun) -> String {
    let mut out = String::from(METRICS_HEADER);
    out.push('\n');
    for r in &run.records {
        let tp: usize = r.pseudo.per_category.iter().map(|q| q.true_positive_count).sum();
        let mean_tau = r.thresholds.iter().sum::<f64>() / r.thresholds.len() as f64;
        let f = &r.eval.f1;
        let cells = [
            r.epoch.to_string(),
            r.stage.to_string(),
            r.losses.cls_loss.to_string(),
            r.losses.drl_loss.to_string(),
            r.losses.total.to_string(),
            r.losses.lambda.to_string(),
            opt(r.eval.map),
            opt(f.op),
            opt(f.cp),
            opt(f.or_),
            opt(f.cr),
            opt(f.of1),
            opt(f.cf1),
            opt(r.pseudo.mean_precision),
            opt(r.pseudo.mean_recall),
            opt(r.pseudo.mean_recall_all),
            r.recalled().to_string(),
            tp.to_string(),
            mean_tau.to_string(),
        ];
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

/// Threshold trajectory: one row per (epoch, category).
pub fn thresholds_csv(run: &TrainRun) -> String {
    let mut out = String::from("epoch,category,tau_neg,tau_pos,tau_star,tau_live\n");
    for r in &run.records {
        for (c, (&live, b)) in r.thresholds.iter().zip(&r.boundaries).enumerate() {
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                r.epoch,
                c,
                opt(b.map(|b| b.tau_neg)),
                opt(b.map(|b| b.tau_pos)),
                opt(b.map(|b| b.ideal())),
                live
            ));
        }
    }
    out
}

pub fn histograms(dists: &[ClassDistribution], bins: usize) -> Result<Vec<HistogramSummary>> {
    dists.iter().map(|d| histogram(d, bins)).collect()
}

pub fn write_histograms(path: &Path, dists: &[ClassDistribution], bins: usize) -> Result<()> {
    write_json(path, &histograms(dists, bins)?)
}

pub fn write_metrics_csv(path: &Path, run: &TrainRun) -> Result<()> {
    write_file(path, metrics_csv(run).as_bytes())
}

pub fn write_thresholds_csv(path: &Path, run: &TrainRun) -> Result<()> {
    write_file(path, thresholds_csv(run).as_bytes())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub magic: String,
    pub version: u32,
    pub epoch: usize,
    pub model: Classifier,
    pub thresholds: ThresholdState,
}

impl Checkpoint {
    pub fn new(epoch: usize, model: Classifier, thresholds: ThresholdState) -> Self {
        Self {
            magic: CHECKPOINT_MAGIC.to_owned(),
            version: CHECKPOINT_VERSION,
            epoch,
            model,
            thresholds,
        }
    }

    pub fn from_run(run: &TrainRun) -> Self {
        Self::new(run.records.len(), run.model.clone(), run.thresholds.clone())
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        write_json(path, self)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let value: serde_json::Value = read_json(path)?;
        match value.get("magic").and_then(|m| m.as_str()) {
            Some(CHECKPOINT_MAGIC) => {}
            other => return Err(Error::Checkpoint(format!("bad magic {other:?} in {}", path.display()))),
        }
        match value.get("version").and_then(|v| v.as_u64()) {
            Some(v) if v == CHECKPOINT_VERSION as u64 => {}
            other => return Err(Error::Checkpoint(format!("unsupported version {other:?}"))),
        }
        let ckpt: Checkpoint = serde_json::from_value(value)?;
        if ckpt.thresholds.n_categories() != ckpt.model.n_categories() {
            return Err(Error::Checkpoint("threshold count does not match model outputs".into()));
        }
        Ok(ckpt)
    }
}

/// Writes `contents` and returns the lowercase hex SHA-256 of the bytes.
pub fn write_hashed(path: &Path, contents: &[u8]) -> Result<String> {
    write_file(path, contents)?;
    Ok(sha256_hex(contents))
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    use sha2::{Digest, Sha256};
    hex::encode(Sha256::digest(bytes))
}

pub fn append_line(path: &Path, line: &str) -> Result<()> {
    let mut f = fs::OpenOptions::new()
        .create(true)
        .append(true)
        .open(path)
        .map_err(|e| Error::io(path, e))?;
    writeln!(f, "{line}").map_err(|e| Error::io(path, e))
}
