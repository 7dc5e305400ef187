//! Ternary label matrices and score matrices shared by every other module.
//!
//! Labels use the code `-1` (negative), `0` (unknown) and `+1` (positive), so
//! the number of known labels in a row is simply the sum of absolute values.

use ndarray::{Array2, ArrayView1, ArrayView2, Axis};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Smallest distance a score keeps from 0 and 1.
///
/// Keeps `log p` and `log (1 - p)` finite and guarantees that a threshold of
/// exactly 1.0 never recalls anything.
pub const SCORE_EPS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(into = "i8", try_from = "i8")]
#[repr(i8)]
pub enum LabelValue {
    Negative = -1,
    #[default]
    Unknown = 0,
    Positive = 1,
}

impl LabelValue {
    pub fn code(self) -> i8 {
        self as i8
    }

    pub fn is_known(self) -> bool {
        self != LabelValue::Unknown
    }
}

impl From<LabelValue> for i8 {
    fn from(v: LabelValue) -> i8 {
        v.code()
    }
}

impl TryFrom<i64> for LabelValue {
    type Error = Error;

    fn try_from(code: i64) -> Result<Self> {
        match code {
            -1 => Ok(LabelValue::Negative),
            0 => Ok(LabelValue::Unknown),
            1 => Ok(LabelValue::Positive),
            other => Err(Error::InvalidLabel(other)),
        }
    }
}

impl TryFrom<i8> for LabelValue {
    type Error = Error;

    fn try_from(code: i8) -> Result<Self> {
        LabelValue::try_from(code as i64)
    }
}

/// N x C grid of ternary labels.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartialLabelMatrix {
    entries: Array2<LabelValue>,
}

impl PartialLabelMatrix {
    pub fn new(entries: Array2<LabelValue>) -> Result<Self> {
        let (n, c) = entries.dim();
        if n == 0 || c == 0 {
            return Err(Error::Config(format!(
                "label matrix must have positive dimensions, got {n}x{c}"
            )));
        }
        Ok(Self { entries })
    }

    /// Builds a matrix from integer codes, one inner vector per sample.
    pub fn from_codes(rows: &[Vec<i64>]) -> Result<Self> {
        let n = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut entries = Array2::from_elem((n, c), LabelValue::Unknown);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != c {
                return Err(Error::Dimension {
                    expected: (n, c),
                    actual: (n, row.len()),
                });
            }
            for (j, &code) in row.iter().enumerate() {
                entries[[i, j]] = LabelValue::try_from(code)?;
            }
        }
        Self::new(entries)
    }

    pub fn unknown(n_samples: usize, n_categories: usize) -> Result<Self> {
        Self::new(Array2::from_elem(
            (n_samples, n_categories),
            LabelValue::Unknown,
        ))
    }

    pub fn n_samples(&self) -> usize {
        self.entries.nrows()
    }

    pub fn n_categories(&self) -> usize {
        self.entries.ncols()
    }

    pub fn dim(&self) -> (usize, usize) {
        self.entries.dim()
    }

    pub fn get(&self, sample: usize, category: usize) -> LabelValue {
        self.entries[[sample, category]]
    }

    pub fn view(&self) -> ArrayView2<'_, LabelValue> {
        self.entries.view()
    }

    pub fn row(&self, sample: usize) -> ArrayView1<'_, LabelValue> {
        self.entries.row(sample)
    }

    pub fn codes(&self) -> Array2<i8> {
        self.entries.mapv(LabelValue::code)
    }

    /// Number of known labels (`sum_c |y_c|`) in one sample row.
    pub fn known_count(&self, sample: usize) -> usize {
        self.entries
            .row(sample)
            .iter()
            .filter(|v| v.is_known())
            .count()
    }

    pub fn total_known(&self) -> usize {
        self.entries.iter().filter(|v| v.is_known()).count()
    }

    pub fn is_fully_known(&self) -> bool {
        self.entries.iter().all(|v| v.is_known())
    }

    /// Rows `start..end` as a new matrix.
    pub fn slice_rows(&self, start: usize, end: usize) -> Result<Self> {
        Self::new(
            self.entries
                .slice(ndarray::s![start..end, ..])
                .to_owned(),
        )
    }

    pub fn select_rows(&self, rows: &[usize]) -> Self {
        Self {
            entries: self.entries.select(Axis(0), rows),
        }
    }

    pub(crate) fn ensure_dim(&self, dim: (usize, usize)) -> Result<()> {
        if self.dim() != dim {
            return Err(Error::Dimension {
                expected: dim,
                actual: self.dim(),
            });
        }
        Ok(())
    }
}

/// N x C grid of confidence scores, every entry strictly inside (0, 1).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreMatrix {
    entries: Array2<f64>,
}

impl ScoreMatrix {
    pub fn new(entries: Array2<f64>) -> Result<Self> {
        for ((row, col), &value) in entries.indexed_iter() {
            if !(value > 0.0 && value < 1.0) {
                return Err(Error::ScoreOutOfRange { row, col, value });
            }
        }
        Ok(Self { entries })
    }

    /// Maps logits through the logistic function, keeping outputs at least
    /// `SCORE_EPS` away from 0 and 1.
    pub fn from_logits(logits: &Array2<f64>) -> Self {
        Self {
            entries: logits.mapv(sigmoid),
        }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let flat: Vec<f64> = rows.iter().flatten().copied().collect();
        if flat.len() != n * c {
            return Err(Error::Dimension {
                expected: (n, c),
                actual: (n, flat.len() / n.max(1)),
            });
        }
        let entries = Array2::from_shape_vec((n, c), flat).map_err(|e| Error::Config(e.to_string()))?;
        Self::new(entries)
    }

    pub fn n_samples(&self) -> usize {
        self.entries.nrows()
    }

    pub fn n_categories(&self) -> usize {
        self.entries.ncols()
    }

    pub fn dim(&self) -> (usize, usize) {
        self.entries.dim()
    }

    pub fn get(&self, sample: usize, category: usize) -> f64 {
        self.entries[[sample, category]]
    }

    pub fn view(&self) -> ArrayView2<'_, f64> {
        self.entries.view()
    }

    pub fn column(&self, category: usize) -> ArrayView1<'_, f64> {
        self.entries.column(category)
    }

    pub fn into_inner(self) -> Array2<f64> {
        self.entries
    }
}

/// Logistic function clamped into `[SCORE_EPS, 1 - SCORE_EPS]`.
pub fn sigmoid(z: f64) -> f64 {
    let s = if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    };
    s.clamp(SCORE_EPS, 1.0 - SCORE_EPS)
}

/// Binary grid of positive pseudo-labels (`true` = recalled).
pub type PseudoLabelGrid = Array2<bool>;

/// Known labels merged with positive pseudo-labels.
///
/// Known entries are never changed; unknown entries are either still unknown
/// or promoted to `Positive`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FusedLabelMatrix(PartialLabelMatrix);

impl FusedLabelMatrix {
    pub fn labels(&self) -> &PartialLabelMatrix {
        &self.0
    }

    pub fn into_labels(self) -> PartialLabelMatrix {
        self.0
    }

    /// Fused matrix with no pseudo-labels at all.
    pub fn from_known(known: &PartialLabelMatrix) -> Self {
        Self(known.clone())
    }
}

pub fn known_mask(labels: &PartialLabelMatrix) -> Array2<bool> {
    labels.entries.mapv(LabelValue::is_known)
}

/// Merges known labels with positive pseudo-labels: known entries win, unknown
/// entries become positive where `pseudo` is set.
pub fn fuse_labels(known: &PartialLabelMatrix, pseudo: &PseudoLabelGrid) -> Result<FusedLabelMatrix> {
    if pseudo.dim() != known.dim() {
        return Err(Error::Dimension {
            expected: known.dim(),
            actual: pseudo.dim(),
        });
    }
    let mut entries = known.entries.clone();
    ndarray::Zip::from(&mut entries)
        .and(pseudo)
        .for_each(|label, &recalled| {
            if *label == LabelValue::Unknown && recalled {
                *label = LabelValue::Positive;
            }
        });
    Ok(FusedLabelMatrix(PartialLabelMatrix { entries }))
}
