use ndarray::{Array2, ArrayView2};

use super::LabelData;
use crate::error::{FeatherError, Result};

/// Probabilities are clipped to this floor before taking the logarithm.
pub const LOSS_CLIP: f64 = 1e-15;

/// `p` floored at [`LOSS_CLIP`]; NaN passes through so divergence stays visible.
pub(crate) fn clip_probability(p: f64) -> f64 {
    if p.is_nan() {
        p
    } else {
        p.max(LOSS_CLIP)
    }
}

/// Row-wise softmax with per-row max subtraction.
pub fn softmax_rows(logits: ArrayView2<f64>) -> Array2<f64> {
    let mut out = logits.to_owned();
    for mut row in out.rows_mut() {
        let max = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        row.mapv_inplace(|v| (v - max).exp());
        let total: f64 = row.iter().sum();
        row.mapv_inplace(|v| v / total);
    }
    out
}

fn check_inner(a: ArrayView2<f64>, b: ArrayView2<f64>, what: &str) -> Result<()> {
    if a.ncols() != b.nrows() {
        return Err(FeatherError::ShapeMismatch(format!(
            "{what}: {}×{} cannot multiply {}×{}",
            a.nrows(),
            a.ncols(),
            b.nrows(),
            b.ncols()
        )));
    }
    Ok(())
}

/// `softmax(Z · β)`.
pub fn forward_softmax(z: ArrayView2<f64>, beta: ArrayView2<f64>) -> Result<Array2<f64>> {
    check_inner(z, beta, "embedding × beta")?;
    Ok(softmax_rows(z.dot(&beta).view()))
}

/// `softmax(ReLU(Z · β₀) · β₁)`.
pub fn forward_neural(
    z: ArrayView2<f64>,
    beta0: ArrayView2<f64>,
    beta1: ArrayView2<f64>,
) -> Result<Array2<f64>> {
    check_inner(z, beta0, "embedding × beta0")?;
    check_inner(beta0, beta1, "beta0 × beta1")?;
    let hidden = z.dot(&beta0).mapv(|v| v.max(0.0));
    Ok(softmax_rows(hidden.dot(&beta1).view()))
}

/// Summed log-loss over the training nodes.
pub fn log_loss(yhat: ArrayView2<f64>, labels: &LabelData) -> Result<f64> {
    if yhat.nrows() != labels.num_nodes() || yhat.ncols() != labels.num_classes() {
        return Err(FeatherError::ShapeMismatch(format!(
            "predictions are {}×{}, labels describe {} nodes and {} classes",
            yhat.nrows(),
            yhat.ncols(),
            labels.num_nodes(),
            labels.num_classes()
        )));
    }
    let mut loss = 0.0;
    let mut seen = false;
    for (u, c) in labels.training_nodes() {
        loss -= clip_probability(yhat[[u, c]]).ln();
        seen = true;
    }
    if !seen {
        return Err(FeatherError::EmptyTrainSet);
    }
    Ok(loss)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn zero_beta_is_uniform() {
        let z = array![[0.3, -0.2], [1.0, 0.5]];
        let p = forward_softmax(z.view(), Array2::zeros((2, 4)).view()).unwrap();
        assert!(p.iter().all(|&v| v == 0.25));
    }

    #[test]
    fn closed_form_softmax() {
        let z = array![[1.0]];
        let beta = array![[0.0, 3f64.ln()]];
        let p = forward_softmax(z.view(), beta.view()).unwrap();
        assert!((p[[0, 0]] - 0.25).abs() < 1e-15);
        assert!((p[[0, 1]] - 0.75).abs() < 1e-15);
    }

    #[test]
    fn softmax_is_stable_for_large_logits() {
        let p = softmax_rows(array![[1000.0, 1000.0, -1000.0]].view());
        assert_eq!(p[[0, 0]], 0.5);
        assert_eq!(p[[0, 2]], 0.0);
    }

    #[test]
    fn neural_dead_relu_is_uniform() {
        let z = array![[0.5, 0.5], [0.2, 0.9]];
        let beta1 = array![[3.0, -1.0, 2.0], [0.5, 0.5, 7.0]];
        let p = forward_neural(z.view(), Array2::zeros((2, 2)).view(), beta1.view()).unwrap();
        assert!(p.iter().all(|&v| (v - 1.0 / 3.0).abs() < 1e-15));
        let negative = array![[-1.0, -2.0], [-3.0, -1.0]];
        let q = forward_neural(z.view(), negative.view(), beta1.view()).unwrap();
        assert_eq!(p, q);
    }

    #[test]
    fn neural_hand_computed() {
        // Node 0: hidden = relu([1, -1]) = [1, 0]; logits = [2, 0].
        // Node 1: hidden = relu([0.5, 0.5]) = [0.5, 0.5]; logits = [1, 0.5].
        let z = array![[1.0, 0.0], [0.5, 0.5]];
        let beta0 = array![[1.0, -1.0], [0.0, 2.0]];
        let beta1 = array![[2.0, 0.0], [0.0, 1.0]];
        let p = forward_neural(z.view(), beta0.view(), beta1.view()).unwrap();
        let s0 = 1.0 / (1.0 + (-2f64).exp());
        let s1 = 1.0 / (1.0 + (-0.5f64).exp());
        assert!((p[[0, 0]] - s0).abs() < 1e-15);
        assert!((p[[1, 0]] - s1).abs() < 1e-15);
        assert!((p[[1, 1]] - (1.0 - s1)).abs() < 1e-15);
    }

    #[test]
    fn shape_errors() {
        let z = Array2::<f64>::zeros((2, 3));
        assert!(matches!(
            forward_softmax(z.view(), Array2::zeros((2, 2)).view()),
            Err(FeatherError::ShapeMismatch(_))
        ));
    }

    #[test]
    fn loss_values() {
        let labels = LabelData::new(vec![Some(0), Some(1)], 2).unwrap();
        let yhat = array![[0.9, 0.1], [0.4, 0.6]];
        let loss = log_loss(yhat.view(), &labels).unwrap();
        assert!((loss - 0.6162).abs() < 1e-4);
        assert!((loss + 0.9f64.ln() + 0.6f64.ln()).abs() < 1e-15);

        let uniform = Array2::from_elem((2, 2), 0.5);
        assert!((log_loss(uniform.view(), &labels).unwrap() - 2.0 * 2f64.ln()).abs() < 1e-15);

        let exact = array![[1.0, 0.0], [0.0, 1.0]];
        assert!(log_loss(exact.view(), &labels).unwrap() <= 2.0 * 1e-13);

        let wrong = array![[0.0, 1.0], [1.0, 0.0]];
        assert!((log_loss(wrong.view(), &labels).unwrap() + 2.0 * LOSS_CLIP.ln()).abs() < 1e-9);
    }

    #[test]
    fn loss_needs_training_nodes() {
        let labels = LabelData::new(vec![None, None], 2).unwrap();
        assert_eq!(
            log_loss(Array2::from_elem((2, 2), 0.5).view(), &labels),
            Err(FeatherError::EmptyTrainSet)
        );
    }
}
