use crate::error::{FeatherError, Result};

/// `k` real-valued node feature vectors sharing one node count.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureSet {
    names: Vec<String>,
    features: Vec<Vec<f64>>,
    num_nodes: usize,
}

impl FeatureSet {
    pub fn new(names: Vec<String>, features: Vec<Vec<f64>>) -> Result<Self> {
        if names.len() != features.len() {
            return Err(FeatherError::ShapeMismatch(format!(
                "{} feature names for {} feature vectors",
                names.len(),
                features.len()
            )));
        }
        if features.is_empty() {
            return Err(FeatherError::ShapeMismatch("feature set is empty".into()));
        }
        let num_nodes = features[0].len();
        for (name, x) in names.iter().zip(&features) {
            if x.len() != num_nodes {
                return Err(FeatherError::ShapeMismatch(format!(
                    "feature `{name}` has {} values, expected {num_nodes}",
                    x.len()
                )));
            }
            if let Some(v) = x.iter().find(|v| !v.is_finite()) {
                return Err(FeatherError::NonFinite(format!(
                    "feature `{name}` contains {v}"
                )));
            }
        }
        Ok(FeatureSet {
            names,
            features,
            num_nodes,
        })
    }

    /// A set holding one named feature.
    pub fn single(name: impl Into<String>, values: Vec<f64>) -> Result<Self> {
        Self::new(vec![name.into()], vec![values])
    }

    pub fn k(&self) -> usize {
        self.features.len()
    }

    pub fn num_nodes(&self) -> usize {
        self.num_nodes
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn feature(&self, i: usize) -> &[f64] {
        &self.features[i]
    }

    pub fn iter(&self) -> impl Iterator<Item = &[f64]> {
        self.features.iter().map(Vec::as_slice)
    }

    /// Moves the value of node `u` to node `perm[u]` in every feature.
    pub fn permute(&self, perm: &[usize]) -> Result<Self> {
        super::check_permutation(perm, self.num_nodes)?;
        let features = self
            .features
            .iter()
            .map(|x| {
                let mut y = vec![0.0; x.len()];
                for (u, &p) in perm.iter().enumerate() {
                    y[p] = x[u];
                }
                y
            })
            .collect();
        Ok(FeatureSet {
            names: self.names.clone(),
            features,
            num_nodes: self.num_nodes,
        })
    }

    /// Replaces all values with zero, keeping names and shape.
    pub fn zeros_like(&self) -> Self {
        FeatureSet {
            names: self.names.clone(),
            features: vec![vec![0.0; self.num_nodes]; self.k()],
            num_nodes: self.num_nodes,
        }
    }
}
