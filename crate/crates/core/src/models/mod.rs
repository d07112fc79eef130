//! Classifiers built on the characteristic function embedding.
//!
//! Both models consume the embedding `Z(Θ̃)` computed with trainable
//! evaluation points `Θ̃`:
//!
//! * softmax: `Ŷ = softmax(Z · β)`
//! * neural: `Ŷ = softmax(ReLU(Z · β₀) · β₁)`
//!
//! and are fit by full-batch Adam on the log-loss over the labeled training
//! nodes. Gradients with respect to `Θ̃` flow through the sine and cosine of
//! `x ⊗ Θ̃`; the transition matrix does not depend on `Θ̃`.

mod adam;
mod backward;
pub mod checkpoint;
mod descriptor;
mod forward;
mod train;

pub use adam::Adam;
pub use backward::{backward, finite_difference_grad, Gradients};
pub use descriptor::{DescriptorClassifier, DescriptorConfig};
pub use forward::{forward_neural, forward_softmax, log_loss, softmax_rows, LOSS_CLIP};
pub use train::{argmax_rows, predict, train, Prediction, TrainedModel};

use std::fmt;
use std::str::FromStr;

use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::charfunc::{EvaluationGrid, GridLayout, DEFAULT_THETA_HI, DEFAULT_THETA_LO};
use crate::error::{FeatherError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Softmax,
    Neural,
}

impl FromStr for ModelKind {
    type Err = FeatherError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "softmax" => Ok(ModelKind::Softmax),
            "neural" => Ok(ModelKind::Neural),
            other => Err(FeatherError::InvalidParameter(format!(
                "unknown model kind `{other}` (expected softmax or neural)"
            ))),
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ModelKind::Softmax => "softmax",
            ModelKind::Neural => "neural",
        })
    }
}

/// Node labels and the training subset.
#[derive(Debug, Clone, PartialEq)]
pub struct LabelData {
    classes: Vec<Option<usize>>,
    num_classes: usize,
    train_mask: Vec<bool>,
}

impl LabelData {
    /// Every labeled node is placed in the training set.
    pub fn new(classes: Vec<Option<usize>>, num_classes: usize) -> Result<Self> {
        if num_classes == 0 {
            return Err(FeatherError::InvalidParameter(
                "need at least one class".into(),
            ));
        }
        if let Some(c) = classes.iter().flatten().find(|&&c| c >= num_classes) {
            return Err(FeatherError::InvalidParameter(format!(
                "class {c} out of range for {num_classes} classes"
            )));
        }
        let train_mask = classes.iter().map(Option::is_some).collect();
        Ok(LabelData {
            classes,
            num_classes,
            train_mask,
        })
    }

    /// Fully labeled nodes with `num_classes` inferred as `max + 1`.
    pub fn from_classes(classes: &[usize]) -> Result<Self> {
        let c = classes.iter().max().map_or(0, |m| m + 1);
        Self::new(classes.iter().copied().map(Some).collect(), c)
    }

    /// Restricts training to nodes where `mask` is set; they must be labeled.
    pub fn with_train_mask(mut self, mask: Vec<bool>) -> Result<Self> {
        if mask.len() != self.classes.len() {
            return Err(FeatherError::ShapeMismatch(format!(
                "train mask has {} entries for {} nodes",
                mask.len(),
                self.classes.len()
            )));
        }
        if let Some(u) = (0..mask.len()).find(|&u| mask[u] && self.classes[u].is_none()) {
            return Err(FeatherError::InvalidParameter(format!(
                "node {u} is in the training set but has no label"
            )));
        }
        self.train_mask = mask;
        Ok(self)
    }

    pub fn num_nodes(&self) -> usize {
        self.classes.len()
    }

    pub fn num_classes(&self) -> usize {
        self.num_classes
    }

    pub fn class_of(&self, u: usize) -> Option<usize> {
        self.classes[u]
    }

    pub fn classes(&self) -> &[Option<usize>] {
        &self.classes
    }

    pub fn train_mask(&self) -> &[bool] {
        &self.train_mask
    }

    /// Training nodes with their classes.
    pub fn training_nodes(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.classes
            .iter()
            .zip(&self.train_mask)
            .enumerate()
            .filter_map(|(u, (c, &m))| if m { c.map(|c| (u, c)) } else { None })
    }

    pub fn num_train(&self) -> usize {
        self.training_nodes().count()
    }

    /// One-hot matrix; unlabeled rows are zero.
    pub fn one_hot(&self) -> Array2<f64> {
        let mut y = Array2::zeros((self.classes.len(), self.num_classes));
        for (u, c) in self.classes.iter().enumerate() {
            if let Some(c) = c {
                y[[u, *c]] = 1.0;
            }
        }
        y
    }
}

/// Classifier weights on top of the embedding.
#[derive(Debug, Clone, PartialEq)]
pub enum Weights {
    Softmax {
        beta: Array2<f64>,
    },
    Neural {
        beta0: Array2<f64>,
        beta1: Array2<f64>,
    },
}

impl Weights {
    pub fn kind(&self) -> ModelKind {
        match self {
            Weights::Softmax { .. } => ModelKind::Softmax,
            Weights::Neural { .. } => ModelKind::Neural,
        }
    }

    fn tensors(&self) -> Vec<&Array2<f64>> {
        match self {
            Weights::Softmax { beta } => vec![beta],
            Weights::Neural { beta0, beta1 } => vec![beta0, beta1],
        }
    }

    fn tensors_mut(&mut self) -> Vec<&mut Array2<f64>> {
        match self {
            Weights::Softmax { beta } => vec![beta],
            Weights::Neural { beta0, beta1 } => vec![beta0, beta1],
        }
    }
}

/// Trainable state: evaluation points plus classifier weights.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelParams {
    pub theta: EvaluationGrid,
    pub weights: Weights,
    pub feature_names: Vec<String>,
    pub num_classes: usize,
}

impl ModelParams {
    /// Seeded initialization: `Θ̃` uniform on `[theta_lo, theta_hi)`, then the
    /// weight matrices uniform on `±sqrt(6 / (fan_in + fan_out))` unless
    /// `init_scale` overrides the bound.
    pub fn init(
        kind: ModelKind,
        feature_names: Vec<String>,
        num_classes: usize,
        config: &TrainConfig,
    ) -> Result<Self> {
        config.validate()?;
        let k = feature_names.len();
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        let points = (0..k)
            .map(|_| {
                (0..config.d)
                    .map(|_| rng.random_range(config.theta_lo..config.theta_hi))
                    .collect()
            })
            .collect();
        let theta = EvaluationGrid::from_points(points, config.r)?;
        let width = theta.width();
        let mut uniform = |rows: usize, cols: usize| {
            let bound = config
                .init_scale
                .unwrap_or_else(|| (6.0 / (rows + cols) as f64).sqrt());
            Array2::from_shape_fn((rows, cols), |_| {
                if bound > 0.0 {
                    rng.random_range(-bound..bound)
                } else {
                    0.0
                }
            })
        };
        let weights = match kind {
            ModelKind::Softmax => Weights::Softmax {
                beta: uniform(width, num_classes),
            },
            ModelKind::Neural => Weights::Neural {
                beta0: uniform(width, config.hidden),
                beta1: uniform(config.hidden, num_classes),
            },
        };
        Ok(ModelParams {
            theta,
            weights,
            feature_names,
            num_classes,
        })
    }

    pub fn kind(&self) -> ModelKind {
        self.weights.kind()
    }

    pub fn k(&self) -> usize {
        self.theta.k()
    }

    pub fn d(&self) -> usize {
        self.theta.d()
    }

    pub fn r(&self) -> usize {
        self.theta.r()
    }

    /// Hidden width of the neural model.
    pub fn hidden(&self) -> Option<usize> {
        match &self.weights {
            Weights::Softmax { .. } => None,
            Weights::Neural { beta1, .. } => Some(beta1.nrows()),
        }
    }

    /// Count of trainable scalars, evaluation points included.
    pub fn num_trainable(&self) -> usize {
        self.theta.vectors().iter().map(Vec::len).sum::<usize>()
            + self
                .weights
                .tensors()
                .iter()
                .map(|t| t.len())
                .sum::<usize>()
    }

    /// All trainable scalars: evaluation points, then weights in row-major order.
    pub fn to_flat(&self) -> Vec<f64> {
        let mut out: Vec<f64> = self.theta.vectors().iter().flatten().copied().collect();
        for t in self.weights.tensors() {
            out.extend(t.iter().copied());
        }
        out
    }

    /// Inverse of [`ModelParams::to_flat`].
    pub fn set_flat(&mut self, flat: &[f64]) {
        assert_eq!(flat.len(), self.num_trainable());
        let mut it = flat.iter().copied();
        for v in self.theta.vectors_mut().iter_mut().flatten() {
            *v = it.next().unwrap();
        }
        for t in self.weights.tensors_mut() {
            t.iter_mut().for_each(|v| *v = it.next().unwrap());
        }
    }

    /// Mutable slices over every trainable tensor, in [`ModelParams::to_flat`] order.
    pub(crate) fn slices_mut(&mut self) -> Vec<&mut [f64]> {
        let mut out: Vec<&mut [f64]> = self
            .theta
            .vectors_mut()
            .iter_mut()
            .map(Vec::as_mut_slice)
            .collect();
        for t in self.weights.tensors_mut() {
            out.push(t.as_slice_mut().expect("weights are contiguous"));
        }
        out
    }

    pub(crate) fn check_finite(&self) -> Result<()> {
        if self.to_flat().iter().all(|v| v.is_finite()) {
            Ok(())
        } else {
            Err(FeatherError::NonFinite("model parameters".into()))
        }
    }
}

/// Optimizer and initialization settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub epochs: usize,
    pub hidden: usize,
    pub adam_beta1: f64,
    pub adam_beta2: f64,
    pub adam_eps: f64,
    pub seed: u64,
    /// Overrides the Glorot bound of the weight initialization.
    pub init_scale: Option<f64>,
    pub d: usize,
    pub r: usize,
    pub theta_lo: f64,
    pub theta_hi: f64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            learning_rate: 0.001,
            epochs: 50,
            hidden: 32,
            adam_beta1: 0.9,
            adam_beta2: 0.999,
            adam_eps: 1e-8,
            seed: 0,
            init_scale: None,
            d: 16,
            r: 2,
            theta_lo: DEFAULT_THETA_LO,
            theta_hi: DEFAULT_THETA_HI,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(FeatherError::InvalidParameter(msg.into()));
        if !(self.learning_rate.is_finite() && self.learning_rate > 0.0) {
            return bad("learning rate must be positive");
        }
        if self.epochs == 0 {
            return bad("epochs must be at least 1");
        }
        if self.hidden == 0 {
            return bad("hidden width must be at least 1");
        }
        if self.d == 0 || self.r == 0 {
            return bad("d and r must be at least 1");
        }
        if !(0.0..1.0).contains(&self.adam_beta1) || !(0.0..1.0).contains(&self.adam_beta2) {
            return bad("Adam decay rates must lie in [0, 1)");
        }
        if self.adam_eps.is_nan() || self.adam_eps <= 0.0 {
            return bad("Adam epsilon must be positive");
        }
        if let Some(s) = self.init_scale {
            // The sampling range spans 2·s, which must stay finite.
            if !(0.0..=f64::MAX / 2.0).contains(&s) {
                return bad("init scale must be nonnegative and at most f64::MAX / 2");
            }
        }
        if !(self.theta_lo.is_finite()
            && self.theta_hi.is_finite()
            && self.theta_lo < self.theta_hi)
        {
            return Err(FeatherError::InvalidDomain {
                lo: self.theta_lo,
                hi: self.theta_hi,
            });
        }
        Ok(())
    }
}

pub(crate) fn require_shared(grid: &EvaluationGrid) -> Result<()> {
    if grid.layout() != GridLayout::Shared {
        return Err(FeatherError::InvalidParameter(
            "trainable evaluation points require the shared grid layout".into(),
        ));
    }
    Ok(())
}
