//! Whole-graph descriptors from node embeddings.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::charfunc::{feather_embed, EmbeddingMatrix, EvaluationGrid};
use crate::error::{FeatherError, Result};
use crate::graph::{FeatureSet, Graph};

/// Column-wise aggregation applied across nodes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum PoolMode {
    #[default]
    Mean,
    Max,
    Min,
}

impl FromStr for PoolMode {
    type Err = FeatherError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mean" => Ok(PoolMode::Mean),
            "max" => Ok(PoolMode::Max),
            "min" => Ok(PoolMode::Min),
            other => Err(FeatherError::InvalidParameter(format!(
                "unknown pool mode `{other}` (expected mean, max or min)"
            ))),
        }
    }
}

impl fmt::Display for PoolMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PoolMode::Mean => "mean",
            PoolMode::Max => "max",
            PoolMode::Min => "min",
        })
    }
}

/// A pooled embedding; columns follow the embedding layout.
#[derive(Debug, Clone, PartialEq)]
pub struct PooledDescriptor {
    pub values: Vec<f64>,
    pub mode: PoolMode,
    pub column_names: Vec<String>,
}

/// Aggregates every embedding column over all nodes.
///
/// The mean sums rows in index order before dividing, so it is reproducible
/// bit for bit.
pub fn pool(z: &EmbeddingMatrix, mode: PoolMode) -> Result<PooledDescriptor> {
    let values = z.values();
    let n = values.nrows();
    if n == 0 {
        return Err(FeatherError::EmptyEmbedding);
    }
    let mut acc: Vec<f64> = values.row(0).to_vec();
    for row in values.rows().into_iter().skip(1) {
        for (a, &v) in acc.iter_mut().zip(row.iter()) {
            *a = match mode {
                PoolMode::Mean => *a + v,
                PoolMode::Max => a.max(v),
                PoolMode::Min => a.min(v),
            };
        }
    }
    if mode == PoolMode::Mean {
        acc.iter_mut().for_each(|a| *a /= n as f64);
    }
    Ok(PooledDescriptor {
        values: acc,
        mode,
        column_names: z.column_names(),
    })
}

/// Normalizes `g`, embeds `features` on `grid` and pools the result.
pub fn graph_descriptor(
    g: &Graph,
    features: &FeatureSet,
    grid: &EvaluationGrid,
    mode: PoolMode,
) -> Result<PooledDescriptor> {
    pool(&feather_embed(&g.normalize(), features, grid)?, mode)
}
