//! Softmax regression on fixed descriptors, used for graph classification.

use ndarray::{Array1, Array2, ArrayView2, Axis};
use serde::{Deserialize, Serialize};

use super::adam::Adam;
use super::forward::{softmax_rows, LOSS_CLIP};
use super::train::argmax_rows;
use crate::error::{FeatherError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DescriptorConfig {
    pub learning_rate: f64,
    pub epochs: usize,
}

impl Default for DescriptorConfig {
    fn default() -> Self {
        DescriptorConfig {
            learning_rate: 0.05,
            epochs: 500,
        }
    }
}

/// Multinomial logistic regression with an intercept, trained from zero
/// weights by full-batch Adam on the mean log-loss.
#[derive(Debug, Clone, PartialEq)]
pub struct DescriptorClassifier {
    pub weights: Array2<f64>,
    pub bias: Array1<f64>,
}

impl DescriptorClassifier {
    pub fn fit(
        x: ArrayView2<f64>,
        classes: &[usize],
        num_classes: usize,
        config: &DescriptorConfig,
    ) -> Result<Self> {
        if x.nrows() != classes.len() {
            return Err(FeatherError::ShapeMismatch(format!(
                "{} descriptors but {} labels",
                x.nrows(),
                classes.len()
            )));
        }
        if classes.is_empty() {
            return Err(FeatherError::EmptyTrainSet);
        }
        if let Some(c) = classes.iter().find(|&&c| c >= num_classes) {
            return Err(FeatherError::InvalidParameter(format!(
                "class {c} out of range for {num_classes} classes"
            )));
        }
        if config.learning_rate.is_nan() || config.learning_rate <= 0.0 || config.epochs == 0 {
            return Err(FeatherError::InvalidParameter(
                "descriptor classifier needs a positive learning rate and epochs".into(),
            ));
        }
        let mut model = DescriptorClassifier {
            weights: Array2::zeros((x.ncols(), num_classes)),
            bias: Array1::zeros(num_classes),
        };
        let mut adam = Adam::new(config.learning_rate, 0.9, 0.999, 1e-8);
        let scale = 1.0 / classes.len() as f64;
        for epoch in 0..config.epochs {
            let mut dlogits = model.predict_proba(x);
            for (u, &c) in classes.iter().enumerate() {
                if dlogits[[u, c]] < LOSS_CLIP {
                    dlogits.row_mut(u).fill(0.0);
                } else {
                    dlogits[[u, c]] -= 1.0;
                }
            }
            dlogits *= scale;
            let dw = x.t().dot(&dlogits);
            let db = dlogits.sum_axis(Axis(0));
            if !dw.iter().chain(db.iter()).all(|v| v.is_finite()) {
                return Err(FeatherError::DivergenceDetected { epoch });
            }
            adam.update(
                vec![
                    model.weights.as_slice_mut().unwrap(),
                    model.bias.as_slice_mut().unwrap(),
                ],
                vec![dw.as_slice().unwrap(), db.as_slice().unwrap()],
            );
        }
        Ok(model)
    }

    pub fn predict_proba(&self, x: ArrayView2<f64>) -> Array2<f64> {
        let logits = x.dot(&self.weights) + &self.bias;
        softmax_rows(logits.view())
    }

    pub fn predict(&self, x: ArrayView2<f64>) -> Vec<usize> {
        argmax_rows(self.predict_proba(x).view())
    }
}
