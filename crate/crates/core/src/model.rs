//! A small hand-differentiated multi-label classifier: either a linear score
//! head over the raw features, or one tanh hidden layer followed by the head.

use ndarray::{Array1, Array2, ArrayView2, Axis};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::labels::{FusedLabelMatrix, PartialLabelMatrix, ScoreMatrix};
use crate::loss::{differential_ranking_loss, partial_bce, satl_loss, score_to_logit_grad};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Architecture {
    Linear,
    Mlp { hidden: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dense {
    /// `inputs x outputs`
    pub weights: Array2<f64>,
    pub bias: Array1<f64>,
}

impl Dense {
    fn zeros(inputs: usize, outputs: usize) -> Self {
        Self {
            weights: Array2::zeros((inputs, outputs)),
            bias: Array1::zeros(outputs),
        }
    }

    fn random(inputs: usize, outputs: usize, std: f64, rng: &mut ChaCha8Rng) -> Self {
        let normal = Normal::new(0.0, std).expect("positive std");
        Self {
            weights: Array2::from_shape_fn((inputs, outputs), |_| normal.sample(rng)),
            bias: Array1::zeros(outputs),
        }
    }

    fn apply(&self, x: ArrayView2<'_, f64>) -> Array2<f64> {
        x.dot(&self.weights) + &self.bias
    }

    fn num_params(&self) -> usize {
        self.weights.len() + self.bias.len()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Classifier {
    pub architecture: Architecture,
    pub hidden: Option<Dense>,
    pub head: Dense,
}

/// Parameter-shaped gradient buffer.
pub type Gradients = Classifier;

/// Intermediate activations kept for the backward pass.
pub struct ForwardCache {
    hidden: Option<Array2<f64>>,
    pub logits: Array2<f64>,
}

impl Classifier {
    pub fn new(architecture: Architecture, input_dim: usize, n_categories: usize, seed: u64) -> Result<Self> {
        if input_dim == 0 || n_categories == 0 {
            return Err(Error::Config("classifier needs positive input and output sizes".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Ok(match architecture {
            Architecture::Linear => Self {
                architecture,
                hidden: None,
                head: Dense::random(input_dim, n_categories, 0.01, &mut rng),
            },
            Architecture::Mlp { hidden } => {
                if hidden == 0 {
                    return Err(Error::Config("hidden width must be positive".into()));
                }
                Self {
                    architecture,
                    hidden: Some(Dense::random(input_dim, hidden, (1.0 / input_dim as f64).sqrt(), &mut rng)),
                    head: Dense::random(hidden, n_categories, 0.1 / (hidden as f64).sqrt(), &mut rng),
                }
            }
        })
    }

    /// All-zero parameters of the same shape.
    pub fn zeros_like(&self) -> Self {
        Self {
            architecture: self.architecture,
            hidden: self.hidden.as_ref().map(|d| Dense::zeros(d.weights.nrows(), d.weights.ncols())),
            head: Dense::zeros(self.head.weights.nrows(), self.head.weights.ncols()),
        }
    }

    pub fn input_dim(&self) -> usize {
        self.hidden.as_ref().unwrap_or(&self.head).weights.nrows()
    }

    pub fn n_categories(&self) -> usize {
        self.head.weights.ncols()
    }

    pub fn num_params(&self) -> usize {
        self.hidden.as_ref().map_or(0, Dense::num_params) + self.head.num_params()
    }

    fn layers(&self) -> impl Iterator<Item = &Dense> {
        self.hidden.iter().chain(std::iter::once(&self.head))
    }

    fn layers_mut(&mut self) -> impl Iterator<Item = &mut Dense> {
        self.hidden.iter_mut().chain(std::iter::once(&mut self.head))
    }

    /// Flattened parameters in a fixed order (hidden weights, hidden bias,
    /// head weights, head bias).
    pub fn params(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.num_params());
        for layer in self.layers() {
            out.extend(layer.weights.iter());
            out.extend(layer.bias.iter());
        }
        out
    }

    pub fn set_params(&mut self, values: &[f64]) -> Result<()> {
        if values.len() != self.num_params() {
            return Err(Error::Config(format!(
                "expected {} parameters, got {}",
                self.num_params(),
                values.len()
            )));
        }
        let mut it = values.iter();
        for layer in self.layers_mut() {
            for w in layer.weights.iter_mut().chain(layer.bias.iter_mut()) {
                *w = *it.next().expect("length checked");
            }
        }
        Ok(())
    }

    /// Applies `f(param, other_param)` to matching entries of `self` and `other`.
    pub fn zip_apply(&mut self, other: &Classifier, mut f: impl FnMut(&mut f64, f64)) {
        for (mine, theirs) in self.layers_mut().zip(other.layers()) {
            ndarray::Zip::from(&mut mine.weights).and(&theirs.weights).for_each(|a, &b| f(a, b));
            ndarray::Zip::from(&mut mine.bias).and(&theirs.bias).for_each(|a, &b| f(a, b));
        }
    }

    fn check_input(&self, features: ArrayView2<'_, f64>) -> Result<()> {
        if features.ncols() != self.input_dim() {
            return Err(Error::Dimension {
                expected: (features.nrows(), self.input_dim()),
                actual: features.dim(),
            });
        }
        Ok(())
    }

    pub fn forward_cached(&self, features: ArrayView2<'_, f64>) -> Result<ForwardCache> {
        self.check_input(features)?;
        let hidden = self.hidden.as_ref().map(|d| d.apply(features).mapv(f64::tanh));
        let logits = match &hidden {
            Some(h) => self.head.apply(h.view()),
            None => self.head.apply(features),
        };
        Ok(ForwardCache { hidden, logits })
    }

    pub fn forward(&self, features: ArrayView2<'_, f64>) -> Result<ScoreMatrix> {
        Ok(ScoreMatrix::from_logits(&self.forward_cached(features)?.logits))
    }

    /// Parameter gradients given `dL/dlogits`.
    pub fn backward(&self, features: ArrayView2<'_, f64>, cache: &ForwardCache, dlogits: &Array2<f64>) -> Gradients {
        let mut grads = self.zeros_like();
        let head_input = cache.hidden.as_ref().map_or(features, |h| h.view());
        grads.head.weights = head_input.t().dot(dlogits);
        grads.head.bias = dlogits.sum_axis(Axis(0));
        if let (Some(layer), Some(h), Some(g)) = (&self.hidden, &cache.hidden, grads.hidden.as_mut()) {
            let mut dpre = dlogits.dot(&self.head.weights.t());
            ndarray::Zip::from(&mut dpre).and(h).for_each(|d, &a| *d *= 1.0 - a * a);
            g.weights = features.t().dot(&dpre);
            g.bias = dpre.sum_axis(Axis(0));
            debug_assert_eq!(g.weights.dim(), layer.weights.dim());
        }
        grads
    }
}

/// Which objective a gradient check differentiates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LossSelector {
    /// Partial BCE on the known labels.
    PartialBce,
    /// Ranking loss on the known labels.
    Ranking,
    /// Partial BCE on fused labels plus `lambda` times the ranking loss.
    Combined { lambda: f64 },
}

pub struct Batch<'a> {
    pub features: ArrayView2<'a, f64>,
    pub known: &'a PartialLabelMatrix,
    pub fused: &'a FusedLabelMatrix,
    pub thresholds: &'a [f64],
}

/// Loss value and parameter gradients for one batch.
pub fn loss_and_gradients(model: &Classifier, batch: &Batch<'_>, selector: LossSelector) -> Result<(f64, Gradients)> {
    let cache = model.forward_cached(batch.features)?;
    let scores = ScoreMatrix::from_logits(&cache.logits);
    let (loss, dscores) = match selector {
        LossSelector::PartialBce => {
            let out = partial_bce(&scores, batch.known)?;
            (out.loss, out.grad)
        }
        LossSelector::Ranking => {
            let out = differential_ranking_loss(&scores, batch.known, batch.thresholds)?;
            (out.loss, out.grad)
        }
        LossSelector::Combined { lambda } => {
            let (b, g) = satl_loss(&scores, batch.fused, batch.known, batch.thresholds, lambda)?;
            (b.total, g)
        }
    };
    let dlogits = score_to_logit_grad(&scores, &dscores);
    Ok((loss, model.backward(batch.features, &cache, &dlogits)))
}

/// Step used for central differences in [`gradient_check`].
pub const FD_STEP: f64 = 1e-5;

/// Outcome of comparing analytical and finite-difference gradients.
#[derive(Debug, Clone)]
pub struct GradientCheck {
    /// `max|a - n| / max(max|a|, max|n|)`; 0 when both gradients vanish.
    pub max_relative_error: f64,
    pub analytic: Vec<f64>,
    pub numeric: Vec<f64>,
}

/// Compares analytical parameter gradients against central differences with
/// step [`FD_STEP`] on every parameter.
///
/// The error is measured relative to the largest gradient component, so
/// components that are tiny by cancellation do not dominate through
/// floating-point noise.
pub fn gradient_check(model: &Classifier, batch: &Batch<'_>, selector: LossSelector) -> Result<GradientCheck> {
    let (_, grads) = loss_and_gradients(model, batch, selector)?;
    let analytic = grads.params();
    let base = model.params();
    let mut probe = model.clone();
    let mut numeric = Vec::with_capacity(base.len());
    let mut values = base.clone();
    for k in 0..base.len() {
        values[k] = base[k] + FD_STEP;
        probe.set_params(&values)?;
        let up = loss_and_gradients(&probe, batch, selector)?.0;
        values[k] = base[k] - FD_STEP;
        probe.set_params(&values)?;
        let down = loss_and_gradients(&probe, batch, selector)?.0;
        values[k] = base[k];
        numeric.push((up - down) / (2.0 * FD_STEP));
    }
    Ok(GradientCheck {
        max_relative_error: max_relative_error(&analytic, &numeric),
        analytic,
        numeric,
    })
}

pub fn max_relative_error(analytic: &[f64], numeric: &[f64]) -> f64 {
    let inf_norm = |v: &[f64]| v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let scale = inf_norm(analytic).max(inf_norm(numeric));
    if scale == 0.0 {
        return 0.0;
    }
    let diff = analytic
        .iter()
        .zip(numeric)
        .fold(0.0f64, |m, (a, n)| m.max((a - n).abs()));
    diff / scale
}

/// Mini-batch gradient descent with optional heavy-ball momentum.
#[derive(Debug, Clone)]
pub struct Sgd {
    pub momentum: f64,
    velocity: Option<Classifier>,
}

impl Sgd {
    pub fn new(momentum: f64) -> Self {
        Self { momentum, velocity: None }
    }

    pub fn step(&mut self, model: &mut Classifier, grads: &Gradients, lr: f64) {
        if self.momentum == 0.0 {
            model.zip_apply(grads, |w, g| *w -= lr * g);
            return;
        }
        let velocity = self.velocity.get_or_insert_with(|| model.zeros_like());
        let momentum = self.momentum;
        velocity.zip_apply(grads, |v, g| *v = momentum * *v + g);
        model.zip_apply(velocity, |w, v| *w -= lr * v);
    }
}
