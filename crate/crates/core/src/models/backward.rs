use ndarray::{Array2, Axis};

use super::forward::{clip_probability, softmax_rows, LOSS_CLIP};
use super::{require_shared, LabelData, ModelParams, Weights};
use crate::charfunc::{column_index, feather_embed, propagate_scales, trig_block, Part};
use crate::error::{FeatherError, Result};
use crate::graph::{FeatureSet, RowStochasticMatrix};

/// Gradient of the log-loss, shaped like [`ModelParams`].
#[derive(Debug, Clone, PartialEq)]
pub struct Gradients {
    pub theta: Vec<Vec<f64>>,
    pub weights: Weights,
}

impl Gradients {
    /// Same order as [`ModelParams::to_flat`].
    pub fn to_flat(&self) -> Vec<f64> {
        let mut out: Vec<f64> = self.theta.iter().flatten().copied().collect();
        for t in self.weights.tensors() {
            out.extend(t.iter().copied());
        }
        out
    }

    pub(crate) fn slices(&self) -> Vec<&[f64]> {
        let mut out: Vec<&[f64]> = self.theta.iter().map(Vec::as_slice).collect();
        for t in self.weights.tensors() {
            out.push(t.as_slice().expect("gradients are contiguous"));
        }
        out
    }

    pub fn norm(&self) -> f64 {
        self.to_flat().iter().map(|g| g * g).sum::<f64>().sqrt()
    }
}

/// Intermediate values of one forward pass.
pub(crate) struct ForwardCache {
    pub z: Array2<f64>,
    /// Pre-activation `Z · β₀` of the neural model.
    pub hidden_pre: Option<Array2<f64>>,
    pub probs: Array2<f64>,
}

pub(crate) fn check_compat(
    ahat: &RowStochasticMatrix,
    features: &FeatureSet,
    params: &ModelParams,
) -> Result<()> {
    require_shared(&params.theta)?;
    if features.k() != params.k() {
        return Err(FeatherError::FeatureCountMismatch {
            expected: params.k(),
            found: features.k(),
        });
    }
    if features.num_nodes() != ahat.num_nodes() {
        return Err(FeatherError::ShapeMismatch(format!(
            "features cover {} nodes, graph has {}",
            features.num_nodes(),
            ahat.num_nodes()
        )));
    }
    Ok(())
}

pub(crate) fn forward_pass(
    ahat: &RowStochasticMatrix,
    features: &FeatureSet,
    params: &ModelParams,
) -> Result<ForwardCache> {
    check_compat(ahat, features, params)?;
    let z = feather_embed(ahat, features, &params.theta)?.into_values();
    let (hidden_pre, logits) = match &params.weights {
        Weights::Softmax { beta } => (None, z.dot(beta)),
        Weights::Neural { beta0, beta1 } => {
            let pre = z.dot(beta0);
            let logits = pre.mapv(|v| v.max(0.0)).dot(beta1);
            (Some(pre), logits)
        }
    };
    Ok(ForwardCache {
        z,
        hidden_pre,
        probs: softmax_rows(logits.view()),
    })
}

/// Log-loss and its exact gradient with respect to every trainable tensor.
///
/// The evaluation point gradient uses `∂cos(θx)/∂θ = −x·sin(θx)` and
/// `∂sin(θx)/∂θ = x·cos(θx)`, propagated through the same `Âˢ` chain as
/// the forward pass.
pub fn backward(
    ahat: &RowStochasticMatrix,
    features: &FeatureSet,
    labels: &LabelData,
    params: &ModelParams,
) -> Result<(f64, Gradients)> {
    let cache = forward_pass(ahat, features, params)?;
    if labels.num_nodes() != ahat.num_nodes() || labels.num_classes() != params.num_classes {
        return Err(FeatherError::ShapeMismatch(format!(
            "labels describe {} nodes and {} classes, model has {} classes on {} nodes",
            labels.num_nodes(),
            labels.num_classes(),
            params.num_classes,
            ahat.num_nodes()
        )));
    }

    let mut loss = 0.0;
    let mut dlogits = Array2::<f64>::zeros(cache.probs.raw_dim());
    let mut any = false;
    for (u, c) in labels.training_nodes() {
        any = true;
        let p = cache.probs[[u, c]];
        loss -= clip_probability(p).ln();
        if p >= LOSS_CLIP {
            dlogits.row_mut(u).assign(&cache.probs.row(u));
            dlogits[[u, c]] -= 1.0;
        }
    }
    if !any {
        return Err(FeatherError::EmptyTrainSet);
    }

    let (weights, dz) = match &params.weights {
        Weights::Softmax { beta } => {
            let dbeta = cache.z.t().dot(&dlogits);
            let dz = dlogits.dot(&beta.t());
            (Weights::Softmax { beta: dbeta }, dz)
        }
        Weights::Neural { beta0, beta1 } => {
            let pre = cache.hidden_pre.as_ref().expect("neural cache");
            let hidden = pre.mapv(|v| v.max(0.0));
            let dbeta1 = hidden.t().dot(&dlogits);
            let mut dpre = dlogits.dot(&beta1.t());
            dpre.zip_mut_with(pre, |g, &p| {
                if p <= 0.0 {
                    *g = 0.0;
                }
            });
            let dbeta0 = cache.z.t().dot(&dpre);
            let dz = dpre.dot(&beta0.t());
            (
                Weights::Neural {
                    beta0: dbeta0,
                    beta1: dbeta1,
                },
                dz,
            )
        }
    };

    let theta = theta_gradient(ahat, features, params, &dz);
    Ok((loss, Gradients { theta, weights }))
}

fn theta_gradient(
    ahat: &RowStochasticMatrix,
    features: &FeatureSet,
    params: &ModelParams,
    dz: &Array2<f64>,
) -> Vec<Vec<f64>> {
    let (d, r) = (params.d(), params.r());
    features
        .iter()
        .enumerate()
        .map(|(i, x)| {
            let points = params.theta.points_for(i, 1);
            let mut grad = vec![0.0; d];
            if x.iter().all(|&v| v == 0.0) {
                return grad;
            }
            let block = trig_block(x, points, |xu, t| {
                let (s, c) = (t * xu).sin_cos();
                (-xu * s, xu * c)
            });
            propagate_scales(ahat, block, 2 * d, r, |s, h| {
                let re0 = column_index(d, r, i, s, Part::Re, 0);
                let im0 = column_index(d, r, i, s, Part::Im, 0);
                for (row, dz_row) in h.chunks(2 * d).zip(dz.axis_iter(Axis(0))) {
                    for (j, g) in grad.iter_mut().enumerate() {
                        *g += dz_row[re0 + j] * row[j] + dz_row[im0 + j] * row[d + j];
                    }
                }
            });
            grad
        })
        .collect()
}

/// Central-difference estimate `(f(p + h·e_i) − f(p − h·e_i)) / 2h` for every coordinate.
pub fn finite_difference_grad(
    mut loss: impl FnMut(&[f64]) -> f64,
    params: &[f64],
    h: f64,
) -> Vec<f64> {
    assert!(h > 0.0, "finite difference step must be positive");
    let mut p = params.to_vec();
    (0..p.len())
        .map(|i| {
            let orig = p[i];
            p[i] = orig + h;
            let plus = loss(&p);
            p[i] = orig - h;
            let minus = loss(&p);
            p[i] = orig;
            (plus - minus) / (2.0 * h)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{erdos_renyi, log_degree_feature};
    use crate::models::{ModelKind, TrainConfig};

    #[test]
    fn finite_difference_of_quadratic() {
        let g = finite_difference_grad(|p| p[0] * p[0], &[3.0], 1e-5);
        assert!((g[0] - 6.0).abs() < 1e-8);
        assert_eq!(
            finite_difference_grad(|_| 0.0, &[1.0, 2.0], 1e-5),
            vec![0.0, 0.0]
        );
    }

    fn instance(
        kind: ModelKind,
        seed: u64,
    ) -> (RowStochasticMatrix, FeatureSet, LabelData, ModelParams) {
        let g = erdos_renyi(6, 1, seed).unwrap();
        let x = log_degree_feature(&g);
        let features = FeatureSet::single("deg", x).unwrap();
        let labels = LabelData::from_classes(&[0, 1, 0, 1, 1, 0]).unwrap();
        let cfg = TrainConfig {
            d: 3,
            r: 2,
            hidden: 4,
            seed,
            ..TrainConfig::default()
        };
        let params = ModelParams::init(kind, vec!["deg".into()], 2, &cfg).unwrap();
        (g.normalize(), features, labels, params)
    }

    #[test]
    fn analytic_matches_finite_differences() {
        for kind in [ModelKind::Softmax, ModelKind::Neural] {
            for seed in 0..3 {
                let (a, f, l, p) = instance(kind, seed);
                let (_, grads) = backward(&a, &f, &l, &p).unwrap();
                let analytic = grads.to_flat();
                let numeric = finite_difference_grad(
                    |flat| {
                        let mut q = p.clone();
                        q.set_flat(flat);
                        backward(&a, &f, &l, &q).unwrap().0
                    },
                    &p.to_flat(),
                    1e-5,
                );
                for (x, y) in analytic.iter().zip(&numeric) {
                    let scale = x.abs().max(y.abs());
                    if scale < 1e-8 {
                        assert!((x - y).abs() < 1e-7);
                    } else {
                        assert!((x - y).abs() / scale < 1e-4, "{kind}: {x} vs {y}");
                    }
                }
            }
        }
    }

    #[test]
    fn theta_gradient_vanishes_for_zero_features() {
        let (a, f, l, p) = instance(ModelKind::Neural, 1);
        let (_, grads) = backward(&a, &f.zeros_like(), &l, &p).unwrap();
        assert!(grads.theta.iter().flatten().all(|&g| g == 0.0));
    }

    #[test]
    fn feature_count_mismatch() {
        let (a, f, l, p) = instance(ModelKind::Softmax, 0);
        let two = FeatureSet::new(
            vec!["a".into(), "b".into()],
            vec![f.feature(0).to_vec(), f.feature(0).to_vec()],
        )
        .unwrap();
        assert!(matches!(
            backward(&a, &two, &l, &p),
            Err(FeatherError::FeatureCountMismatch {
                expected: 1,
                found: 2
            })
        ));
    }
}
