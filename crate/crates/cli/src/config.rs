//! Run configuration shared by every subcommand.
//!
//! The same struct is filled from command-line flags and from an optional
//! JSON file; flags win field by field.

use std::path::{Path, PathBuf};

use clap::Args;
use feather_core::bench::Knob;
use feather_core::models::{ModelKind, TrainConfig};
use feather_core::{GridLayout, PoolMode};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

/// Built-in structural node features.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BuiltinFeature {
    LogDegree,
    Clustering,
}

impl BuiltinFeature {
    pub fn column_name(self) -> &'static str {
        match self {
            BuiltinFeature::LogDegree => "log_degree",
            BuiltinFeature::Clustering => "clustering",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Binary,
}

/// Parses a flag value with the same spelling the JSON config uses.
fn parse_value<T: DeserializeOwned>(s: &str) -> Result<T, String> {
    serde_json::from_value(serde_json::Value::String(s.to_owned())).map_err(|e| e.to_string())
}

#[derive(Debug, Clone, Default, PartialEq, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    /// JSON file with default values for any flag below.
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,

    /// Edge list: `u w [weight]` per line.
    #[arg(long)]
    pub graph: Option<PathBuf>,
    /// Node feature CSV with header `node,f1,...,fk`.
    #[arg(long)]
    pub features: Option<PathBuf>,
    /// Built-in feature computed from the graph; repeatable.
    #[arg(long, value_delimiter = ',', value_parser = parse_value::<BuiltinFeature>)]
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub feature: Vec<BuiltinFeature>,
    /// Label CSV with header `node,class`.
    #[arg(long)]
    pub labels: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Model checkpoint read by `predict`.
    #[arg(long)]
    pub checkpoint: Option<PathBuf>,
    /// Directory of edge lists for `pool`.
    #[arg(long)]
    pub graphs: Option<PathBuf>,
    /// `id graph_path [features_path]` per line, for `pool`.
    #[arg(long)]
    pub manifest: Option<PathBuf>,

    #[arg(long)]
    pub seed: Option<u64>,
    /// Evaluation points per feature.
    #[arg(long)]
    pub d: Option<usize>,
    /// Largest random walk scale.
    #[arg(long)]
    pub r: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    pub theta_lo: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub theta_hi: Option<f64>,
    /// Put every evaluation point at this value instead of sampling.
    #[arg(long, allow_hyphen_values = true)]
    pub theta_const: Option<f64>,
    #[arg(long, value_parser = parse_value::<GridLayout>)]
    pub layout: Option<GridLayout>,
    /// Worker thread cap; defaults to all cores.
    #[arg(long)]
    pub threads: Option<usize>,

    #[arg(long, value_parser = parse_value::<PoolMode>)]
    pub pool: Option<PoolMode>,
    #[arg(long, value_parser = parse_value::<OutputFormat>)]
    pub format: Option<OutputFormat>,

    #[arg(long, value_parser = parse_value::<ModelKind>)]
    pub model: Option<ModelKind>,
    #[arg(long)]
    pub epochs: Option<usize>,
    #[arg(long = "lr")]
    pub learning_rate: Option<f64>,
    #[arg(long)]
    pub hidden: Option<usize>,
    #[arg(long)]
    pub init_scale: Option<f64>,
    #[arg(long)]
    pub adam_beta1: Option<f64>,
    #[arg(long)]
    pub adam_beta2: Option<f64>,
    #[arg(long)]
    pub adam_eps: Option<f64>,
    /// Class count; defaults to one more than the largest label.
    #[arg(long)]
    pub num_classes: Option<usize>,

    #[arg(long, value_parser = parse_value::<Knob>)]
    pub knob: Option<Knob>,
    #[arg(long, value_delimiter = ',')]
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub levels: Vec<usize>,
    #[arg(long)]
    pub reps: Option<usize>,
    /// Base graph size for `bench`.
    #[arg(long)]
    pub nodes: Option<usize>,
    #[arg(long)]
    pub edges_per_node: Option<usize>,
    /// Base feature count for `bench`.
    #[arg(long)]
    pub k: Option<usize>,
}

impl RunConfig {
    pub fn from_json(text: &str) -> CliResult<Self> {
        serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        Self::from_json(&text).map_err(|e| match e {
            CliError::Config(msg) => CliError::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    /// Fields set here take precedence over `base`.
    pub fn over(self, base: RunConfig) -> RunConfig {
        fn vec_or<T>(a: Vec<T>, b: Vec<T>) -> Vec<T> {
            if a.is_empty() {
                b
            } else {
                a
            }
        }
        RunConfig {
            config: self.config.or(base.config),
            graph: self.graph.or(base.graph),
            features: self.features.or(base.features),
            feature: vec_or(self.feature, base.feature),
            labels: self.labels.or(base.labels),
            out: self.out.or(base.out),
            checkpoint: self.checkpoint.or(base.checkpoint),
            graphs: self.graphs.or(base.graphs),
            manifest: self.manifest.or(base.manifest),
            seed: self.seed.or(base.seed),
            d: self.d.or(base.d),
            r: self.r.or(base.r),
            theta_lo: self.theta_lo.or(base.theta_lo),
            theta_hi: self.theta_hi.or(base.theta_hi),
            theta_const: self.theta_const.or(base.theta_const),
            layout: self.layout.or(base.layout),
            threads: self.threads.or(base.threads),
            pool: self.pool.or(base.pool),
            format: self.format.or(base.format),
            model: self.model.or(base.model),
            epochs: self.epochs.or(base.epochs),
            learning_rate: self.learning_rate.or(base.learning_rate),
            hidden: self.hidden.or(base.hidden),
            init_scale: self.init_scale.or(base.init_scale),
            adam_beta1: self.adam_beta1.or(base.adam_beta1),
            adam_beta2: self.adam_beta2.or(base.adam_beta2),
            adam_eps: self.adam_eps.or(base.adam_eps),
            num_classes: self.num_classes.or(base.num_classes),
            knob: self.knob.or(base.knob),
            levels: vec_or(self.levels, base.levels),
            reps: self.reps.or(base.reps),
            nodes: self.nodes.or(base.nodes),
            edges_per_node: self.edges_per_node.or(base.edges_per_node),
            k: self.k.or(base.k),
        }
    }

    /// Merges flags with the JSON file named by `--config`, if any.
    pub fn resolve(self) -> CliResult<RunConfig> {
        match &self.config {
            Some(path) => {
                let file = RunConfig::load(path)?;
                Ok(self.over(file))
            }
            None => Ok(self),
        }
    }

    pub fn require<'a, T>(&self, value: &'a Option<T>, flag: &str) -> CliResult<&'a T> {
        value
            .as_ref()
            .ok_or_else(|| CliError::Usage(format!("missing --{flag}")))
    }

    /// Training hyperparameters: defaults overridden by whatever is set.
    pub fn train_config(&self) -> TrainConfig {
        let mut c = TrainConfig::default();
        macro_rules! set {
            ($($field:ident),*) => {
                $(if let Some(v) = self.$field { c.$field = v; })*
            };
        }
        set!(
            learning_rate,
            epochs,
            hidden,
            adam_beta1,
            adam_beta2,
            adam_eps,
            seed,
            d,
            r,
            theta_lo,
            theta_hi
        );
        if self.init_scale.is_some() {
            c.init_scale = self.init_scale;
        }
        c
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_round_trip_and_unknown_keys() {
        let c = RunConfig::from_json(
            r#"{"d": 4, "pool": "max", "feature": ["log-degree"], "layout": "fresh-power"}"#,
        )
        .unwrap();
        assert_eq!(c.d, Some(4));
        assert_eq!(c.pool, Some(PoolMode::Max));
        assert_eq!(c.feature, vec![BuiltinFeature::LogDegree]);
        assert_eq!(c.layout, Some(GridLayout::FreshPower));
        let back = RunConfig::from_json(&serde_json::to_string(&c).unwrap()).unwrap();
        assert_eq!(back, c);
        assert!(matches!(
            RunConfig::from_json(r#"{"dd": 4}"#),
            Err(CliError::Config(_))
        ));
        assert!(RunConfig::from_json(r#"{"config": "x.json"}"#).is_err());
    }

    #[test]
    fn flags_override_file() {
        let flags = RunConfig {
            d: Some(8),
            ..RunConfig::default()
        };
        let file = RunConfig {
            d: Some(4),
            r: Some(3),
            ..RunConfig::default()
        };
        let merged = flags.over(file);
        assert_eq!((merged.d, merged.r), (Some(8), Some(3)));
    }

    #[test]
    fn train_config_overrides() {
        let c = RunConfig {
            epochs: Some(7),
            learning_rate: Some(0.1),
            ..RunConfig::default()
        };
        let t = c.train_config();
        assert_eq!(
            (t.epochs, t.learning_rate, t.hidden),
            (7, 0.1, TrainConfig::default().hidden)
        );
    }
}
