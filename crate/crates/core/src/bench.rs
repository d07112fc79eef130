//! Runtime sweeps of the embedding on synthetic Erdős–Rényi graphs.
//!
//! Only the embedding call is timed; graph generation, feature extraction
//! and normalization happen before the clock starts.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::charfunc::{feather_embed, EvaluationGrid, DEFAULT_THETA_HI, DEFAULT_THETA_LO};
use crate::error::{FeatherError, Result};
use crate::graph::{erdos_renyi, log_degree_feature, FeatureSet, Graph};

/// The parameter varied by a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Knob {
    Nodes,
    Edges,
    Features,
    Points,
    Scale,
}

impl FromStr for Knob {
    type Err = FeatherError;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "nodes" => Knob::Nodes,
            "edges" => Knob::Edges,
            "features" => Knob::Features,
            "points" => Knob::Points,
            "scale" => Knob::Scale,
            other => {
                return Err(FeatherError::InvalidParameter(format!(
                    "unknown knob `{other}` (expected nodes, edges, features, points or scale)"
                )))
            }
        })
    }
}

impl fmt::Display for Knob {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Knob::Nodes => "nodes",
            Knob::Edges => "edges",
            Knob::Features => "features",
            Knob::Points => "points",
            Knob::Scale => "scale",
        })
    }
}

/// Workload held fixed while one knob varies.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BenchBase {
    pub nodes: usize,
    pub edges_per_node: usize,
    pub features: usize,
    pub points: usize,
    pub scale: usize,
    pub seed: u64,
}

impl Default for BenchBase {
    fn default() -> Self {
        BenchBase {
            nodes: 1 << 12,
            edges_per_node: 1 << 4,
            features: 1,
            points: 16,
            scale: 2,
            seed: 0,
        }
    }
}

impl BenchBase {
    /// The base workload with `knob` set to `level`.
    pub fn with_level(mut self, knob: Knob, level: usize) -> Self {
        match knob {
            Knob::Nodes => self.nodes = level,
            Knob::Edges => self.edges_per_node = level,
            Knob::Features => self.features = level,
            Knob::Points => self.points = level,
            Knob::Scale => self.scale = level,
        }
        self
    }
}

/// Prepared inputs of one benchmark level.
pub struct Workload {
    pub graph: Graph,
    pub features: FeatureSet,
    pub grid: EvaluationGrid,
}

/// Builds the graph, features and grid for a configuration. The first
/// feature is the log degree; further features are uniform on `[0, 1)`.
pub fn workload(base: &BenchBase) -> Result<Workload> {
    let graph = erdos_renyi(base.nodes, base.edges_per_node, base.seed)?;
    if base.features == 0 {
        return Err(FeatherError::InvalidParameter(
            "need at least one feature".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(base.seed.wrapping_add(1));
    let mut names = vec!["log_degree".to_string()];
    let mut columns = vec![log_degree_feature(&graph)];
    for i in 1..base.features {
        names.push(format!("random_{i}"));
        columns.push((0..base.nodes).map(|_| rng.random::<f64>()).collect());
    }
    let features = FeatureSet::new(names, columns)?;
    let grid = EvaluationGrid::random(
        base.features,
        base.points,
        base.scale,
        DEFAULT_THETA_LO,
        DEFAULT_THETA_HI,
        base.seed.wrapping_add(2),
    )?;
    Ok(Workload {
        graph,
        features,
        grid,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRecord {
    pub knob: Knob,
    pub level: usize,
    pub repetition: usize,
    pub seconds: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchSpec {
    pub knob: Knob,
    pub levels: Vec<usize>,
    pub repetitions: usize,
    pub base: BenchBase,
}

/// Times the embedding `repetitions` times at every level. Levels take turns
/// within each repetition so slow drift in machine load hits them equally;
/// each level gets one untimed warm-up run first.
pub fn run_sweep(spec: &BenchSpec) -> Result<Vec<BenchRecord>> {
    if spec.levels.is_empty() || spec.repetitions == 0 {
        return Err(FeatherError::InvalidParameter(
            "a sweep needs at least one level and one repetition".into(),
        ));
    }
    let mut prepared = Vec::with_capacity(spec.levels.len());
    for &level in &spec.levels {
        let w = workload(&spec.base.with_level(spec.knob, level))?;
        let ahat = w.graph.normalize();
        std::hint::black_box(feather_embed(&ahat, &w.features, &w.grid)?);
        prepared.push((level, w, ahat));
    }
    let mut records = Vec::with_capacity(spec.levels.len() * spec.repetitions);
    for repetition in 0..spec.repetitions {
        for (level, w, ahat) in &prepared {
            let start = Instant::now();
            let z = feather_embed(ahat, &w.features, &w.grid)?;
            let seconds = start.elapsed().as_secs_f64();
            std::hint::black_box(&z);
            log::debug!("{} = {level}, rep {repetition}: {seconds:.6}s", spec.knob);
            records.push(BenchRecord {
                knob: spec.knob,
                level: *level,
                repetition,
                seconds,
            });
        }
    }
    // Report level by level, as listed.
    records.sort_by_key(|r| spec.levels.iter().position(|&l| l == r.level));
    Ok(records)
}

pub fn median(values: &mut [f64]) -> f64 {
    assert!(!values.is_empty());
    values.sort_by(f64::total_cmp);
    let mid = values.len() / 2;
    if values.len() % 2 == 1 {
        values[mid]
    } else {
        0.5 * (values[mid - 1] + values[mid])
    }
}

/// Median time of each level, in sweep order.
pub fn median_by_level(records: &[BenchRecord]) -> Vec<(usize, f64)> {
    let mut levels: Vec<usize> = Vec::new();
    for r in records {
        if !levels.contains(&r.level) {
            levels.push(r.level);
        }
    }
    levels
        .into_iter()
        .map(|level| {
            let mut times: Vec<f64> = records
                .iter()
                .filter(|r| r.level == level)
                .map(|r| r.seconds)
                .collect();
            (level, median(&mut times))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sweep_row_count() {
        let spec = BenchSpec {
            knob: Knob::Nodes,
            levels: vec![64, 128, 256],
            repetitions: 10,
            base: BenchBase {
                edges_per_node: 4,
                ..BenchBase::default()
            },
        };
        let records = run_sweep(&spec).unwrap();
        assert_eq!(records.len(), 30);
        assert_eq!(median_by_level(&records).len(), 3);
    }

    #[test]
    fn workloads_are_seeded() {
        let base = BenchBase {
            nodes: 256,
            features: 3,
            ..BenchBase::default()
        };
        let a = workload(&base).unwrap();
        let b = workload(&base).unwrap();
        assert_eq!(a.graph, b.graph);
        assert_eq!(a.features, b.features);
        assert_eq!(a.grid, b.grid);
    }

    #[test]
    fn median_of_even_and_odd() {
        assert_eq!(median(&mut [3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&mut [4.0, 1.0, 2.0, 3.0]), 2.5);
    }

    #[test]
    fn knob_names() {
        for k in [
            Knob::Nodes,
            Knob::Edges,
            Knob::Features,
            Knob::Points,
            Knob::Scale,
        ] {
            assert_eq!(k.to_string().parse::<Knob>().unwrap(), k);
        }
    }
}
