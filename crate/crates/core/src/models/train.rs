use ndarray::{Array2, ArrayView2};

use super::adam::Adam;
use super::backward::{backward, forward_pass};
use super::{LabelData, ModelKind, ModelParams, TrainConfig};
use crate::error::{FeatherError, Result};
use crate::graph::{FeatureSet, RowStochasticMatrix};

/// Trained parameters with the loss recorded before each update.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainedModel {
    pub params: ModelParams,
    pub loss_history: Vec<f64>,
    /// Loss after the last update.
    pub final_loss: f64,
}

/// Fits a classifier and its evaluation points by full-batch Adam.
pub fn train(
    ahat: &RowStochasticMatrix,
    features: &FeatureSet,
    labels: &LabelData,
    kind: ModelKind,
    config: &TrainConfig,
) -> Result<TrainedModel> {
    config.validate()?;
    if labels.num_train() == 0 {
        return Err(FeatherError::EmptyTrainSet);
    }
    let mut params = ModelParams::init(
        kind,
        features.names().to_vec(),
        labels.num_classes(),
        config,
    )?;
    let mut adam = Adam::new(
        config.learning_rate,
        config.adam_beta1,
        config.adam_beta2,
        config.adam_eps,
    );
    let mut loss_history = Vec::with_capacity(config.epochs);
    for epoch in 0..config.epochs {
        let (loss, grads) = backward(ahat, features, labels, &params)?;
        if !loss.is_finite() {
            return Err(FeatherError::DivergenceDetected { epoch });
        }
        log::debug!("epoch {epoch}: loss {loss:.6}");
        loss_history.push(loss);
        adam.update(params.slices_mut(), grads.slices());
        if params.check_finite().is_err() {
            return Err(FeatherError::DivergenceDetected { epoch });
        }
    }
    let (final_loss, _) = backward(ahat, features, labels, &params)?;
    if !final_loss.is_finite() {
        return Err(FeatherError::DivergenceDetected {
            epoch: config.epochs,
        });
    }
    Ok(TrainedModel {
        params,
        loss_history,
        final_loss,
    })
}

/// Class distributions and hard labels for every node.
#[derive(Debug, Clone, PartialEq)]
pub struct Prediction {
    pub probs: Array2<f64>,
    pub labels: Vec<usize>,
}

impl Prediction {
    /// Fraction of the given `(node, class)` pairs predicted correctly.
    pub fn accuracy(&self, truth: impl IntoIterator<Item = (usize, usize)>) -> f64 {
        let (mut hit, mut total) = (0usize, 0usize);
        for (u, c) in truth {
            total += 1;
            hit += usize::from(self.labels[u] == c);
        }
        if total == 0 {
            0.0
        } else {
            hit as f64 / total as f64
        }
    }
}

/// Argmax per row; ties go to the lowest class index.
pub fn argmax_rows(probs: ArrayView2<f64>) -> Vec<usize> {
    probs
        .rows()
        .into_iter()
        .map(|row| {
            let mut best = 0;
            for (c, &p) in row.iter().enumerate() {
                if p > row[best] {
                    best = c;
                }
            }
            best
        })
        .collect()
}

/// Runs the forward pass on any graph whose features match the model's schema.
pub fn predict(
    params: &ModelParams,
    ahat: &RowStochasticMatrix,
    features: &FeatureSet,
) -> Result<Prediction> {
    let cache = forward_pass(ahat, features, params)?;
    let labels = argmax_rows(cache.probs.view());
    Ok(Prediction {
        probs: cache.probs,
        labels,
    })
}
