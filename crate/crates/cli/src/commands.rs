use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use feather_core::bench::{median_by_level, run_sweep, BenchBase, BenchSpec};
use feather_core::charfunc::{feather_embed, DEFAULT_THETA_HI, DEFAULT_THETA_LO};
use feather_core::graph::{clustering_coefficient_feature, log_degree_feature};
use feather_core::io::{
    parse_manifest, read_features, read_graph, read_labels, write_descriptors_csv,
    write_embedding_binary, write_embedding_csv, ManifestEntry,
};
use feather_core::models::{checkpoint, predict, train, ModelKind};
use feather_core::pooling::graph_descriptor;
use feather_core::{
    EvaluationGrid, FeatherError, FeatureSet, Graph, GridLayout, PoolMode, PooledDescriptor,
};
use serde::Serialize;

use crate::config::{OutputFormat, RunConfig};
use crate::error::{CliError, CliResult};

pub const DEFAULT_D: usize = 16;
pub const DEFAULT_R: usize = 2;

fn create(path: &Path) -> CliResult<BufWriter<File>> {
    let file =
        File::create(path).map_err(|e| FeatherError::Io(format!("{}: {e}", path.display())))?;
    Ok(BufWriter::new(file))
}

fn with_suffix(path: &Path, suffix: &str) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

/// Records what produced an output file. Holds no timings so reruns match.
#[derive(Serialize)]
struct RunManifest<'a> {
    tool: &'static str,
    version: &'static str,
    command: &'a str,
    config: serde_json::Value,
}

fn write_run_manifest(out: &Path, command: &str, config: &RunConfig) -> CliResult<()> {
    let mut settings = serde_json::to_value(config).map_err(|e| FeatherError::Io(e.to_string()))?;
    if let serde_json::Value::Object(map) = &mut settings {
        map.retain(|_, v| !v.is_null());
    }
    let manifest = RunManifest {
        tool: "feather",
        version: env!("CARGO_PKG_VERSION"),
        command,
        config: settings,
    };
    let mut w = create(&with_suffix(out, ".run.json"))?;
    serde_json::to_writer_pretty(&mut w, &manifest).map_err(|e| FeatherError::Io(e.to_string()))?;
    writeln!(w).map_err(FeatherError::from)?;
    w.flush().map_err(FeatherError::from)?;
    Ok(())
}

/// Loads a graph and its features. A feature file fixes the node count;
/// otherwise it is one more than the largest index in the edge list.
fn load_inputs(
    graph_path: &Path,
    features_path: Option<&Path>,
    config: &RunConfig,
) -> CliResult<(Graph, FeatureSet)> {
    match (features_path, config.feature.is_empty()) {
        (Some(_), false) => Err(CliError::Usage(
            "use either --features or --feature, not both".into(),
        )),
        (Some(fp), true) => {
            let features = read_features(fp, None)?;
            let graph = read_graph(graph_path, Some(features.num_nodes()))?;
            Ok((graph, features))
        }
        (None, false) => {
            let graph = read_graph(graph_path, None)?;
            let features = builtin_features(&graph, config)?;
            Ok((graph, features))
        }
        (None, true) => Err(CliError::Usage(
            "node features required: pass --features <csv> or --feature log-degree|clustering"
                .into(),
        )),
    }
}

fn builtin_features(graph: &Graph, config: &RunConfig) -> CliResult<FeatureSet> {
    let mut names = Vec::new();
    let mut columns = Vec::new();
    for &f in &config.feature {
        if names.iter().any(|n: &String| n == f.column_name()) {
            return Err(CliError::Usage(format!(
                "feature `{}` listed twice",
                f.column_name()
            )));
        }
        names.push(f.column_name().to_string());
        columns.push(match f {
            crate::config::BuiltinFeature::LogDegree => log_degree_feature(graph),
            crate::config::BuiltinFeature::Clustering => clustering_coefficient_feature(graph),
        });
    }
    Ok(FeatureSet::new(names, columns)?)
}

fn evaluation_grid(k: usize, config: &RunConfig) -> CliResult<EvaluationGrid> {
    let d = config.d.unwrap_or(DEFAULT_D);
    let r = config.r.unwrap_or(DEFAULT_R);
    let layout = config.layout.unwrap_or_default();
    if let Some(c) = config.theta_const {
        if !c.is_finite() {
            return Err(CliError::Usage("--theta-const must be finite".into()));
        }
        // Identical points make the layouts coincide.
        return Ok(EvaluationGrid::constant(k, d, r, c)?);
    }
    Ok(EvaluationGrid::random_with_layout(
        k,
        d,
        r,
        config.theta_lo.unwrap_or(DEFAULT_THETA_LO),
        config.theta_hi.unwrap_or(DEFAULT_THETA_HI),
        config.seed.unwrap_or(0),
        layout,
    )?)
}

pub fn embed(config: &RunConfig) -> CliResult<()> {
    let graph_path = config.require(&config.graph, "graph")?;
    let out = config.require(&config.out, "out")?;
    let (graph, features) = load_inputs(graph_path, config.features.as_deref(), config)?;
    let grid = evaluation_grid(features.k(), config)?;
    let ahat = graph.normalize();

    let start = Instant::now();
    let z = feather_embed(&ahat, &features, &grid)?;
    let seconds = start.elapsed().as_secs_f64();

    match config.format.unwrap_or_default() {
        OutputFormat::Csv => {
            let mut w = create(out)?;
            write_embedding_csv(&z, &mut w)?;
            w.flush().map_err(FeatherError::from)?;
        }
        OutputFormat::Binary => write_embedding_binary(&z, out)?,
    }
    write_run_manifest(out, "embed", config)?;
    eprintln!(
        "embedding: {} x {} ({} nodes, {} features, d = {}, r = {}) in {seconds:.3}s",
        z.num_rows(),
        z.width(),
        graph.num_nodes(),
        features.k(),
        grid.d(),
        grid.r()
    );
    Ok(())
}

fn pool_entries(config: &RunConfig) -> CliResult<Vec<ManifestEntry>> {
    match (&config.manifest, &config.graphs) {
        (Some(_), Some(_)) => Err(CliError::Usage("use either --manifest or --graphs".into())),
        (Some(path), None) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| FeatherError::Io(format!("{}: {e}", path.display())))?;
            let base = path.parent().unwrap_or(Path::new("."));
            let entries = parse_manifest(&text, base)?;
            if entries.is_empty() {
                return Err(CliError::EmptyInput(format!(
                    "{} lists no graphs",
                    path.display()
                )));
            }
            Ok(entries)
        }
        (None, Some(dir)) => {
            let mut paths: Vec<PathBuf> = std::fs::read_dir(dir)
                .map_err(|e| FeatherError::Io(format!("{}: {e}", dir.display())))?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|p| p.is_file())
                .collect();
            paths.sort();
            if paths.is_empty() {
                return Err(CliError::EmptyInput(format!(
                    "{} holds no files",
                    dir.display()
                )));
            }
            Ok(paths
                .into_iter()
                .map(|p| ManifestEntry {
                    id: p
                        .file_stem()
                        .map(|s| s.to_string_lossy().into_owned())
                        .unwrap_or_default(),
                    graph: p,
                    features: None,
                })
                .collect())
        }
        (None, None) => Err(CliError::Usage(
            "pool needs --graphs <dir> or --manifest <file>".into(),
        )),
    }
}

pub fn pool(config: &RunConfig) -> CliResult<()> {
    let out = config.require(&config.out, "out")?;
    let mode = config.pool.unwrap_or(PoolMode::Mean);
    let entries = pool_entries(config)?;
    if config.features.is_some() {
        return Err(CliError::Usage(
            "pool reads per-graph feature files from the manifest; --features is not used".into(),
        ));
    }

    let mut rows: Vec<(String, PooledDescriptor)> = Vec::new();
    // Every graph shares one grid so descriptors stay comparable.
    let mut grid: Option<(Vec<String>, EvaluationGrid)> = None;
    let mut failed = 0;
    for entry in &entries {
        let result = (|| -> CliResult<PooledDescriptor> {
            let (graph, features) = load_inputs(&entry.graph, entry.features.as_deref(), config)?;
            let (names, grid) = match &grid {
                Some(g) => g,
                None => grid.insert((
                    features.names().to_vec(),
                    evaluation_grid(features.k(), config)?,
                )),
            };
            if features.names() != names.as_slice() {
                return Err(CliError::Core(FeatherError::ShapeMismatch(format!(
                    "features {:?} differ from {:?} of the first graph",
                    features.names(),
                    names
                ))));
            }
            Ok(graph_descriptor(&graph, &features, grid, mode)?)
        })();
        match result {
            Ok(desc) => rows.push((entry.id.clone(), desc)),
            Err(e) => {
                failed += 1;
                eprintln!("error: graph `{}`: {e}", entry.id);
            }
        }
    }

    let mut w = create(out)?;
    write_descriptors_csv(&rows, &mut w)?;
    w.flush().map_err(FeatherError::from)?;
    write_run_manifest(out, "pool", config)?;
    eprintln!("pooled {} of {} graphs ({mode})", rows.len(), entries.len());
    if failed > 0 {
        return Err(CliError::PartialFailure {
            failed,
            total: entries.len(),
        });
    }
    Ok(())
}

pub fn train_cmd(config: &RunConfig) -> CliResult<()> {
    let graph_path = config.require(&config.graph, "graph")?;
    let labels_path = config.require(&config.labels, "labels")?;
    let out = config.require(&config.out, "out")?;
    let kind = config.model.unwrap_or(ModelKind::Softmax);
    if config.layout.is_some_and(|l| l != GridLayout::Shared) || config.theta_const.is_some() {
        return Err(CliError::Usage(
            "training learns shared evaluation points; --layout and --theta-const do not apply"
                .into(),
        ));
    }
    let (graph, features) = load_inputs(graph_path, config.features.as_deref(), config)?;
    let labels = read_labels(labels_path, graph.num_nodes(), config.num_classes)?;
    let tc = config.train_config();
    let ahat = graph.normalize();

    let start = Instant::now();
    let model = train(&ahat, &features, &labels, kind, &tc)?;
    let seconds = start.elapsed().as_secs_f64();

    std::fs::write(out, checkpoint::to_bytes(&model.params))
        .map_err(|e| FeatherError::Io(format!("{}: {e}", out.display())))?;
    let mut w = create(&with_suffix(out, ".loss.csv"))?;
    writeln!(w, "epoch,loss").map_err(FeatherError::from)?;
    for (epoch, loss) in model.loss_history.iter().enumerate() {
        writeln!(w, "{epoch},{loss}").map_err(FeatherError::from)?;
    }
    w.flush().map_err(FeatherError::from)?;
    write_run_manifest(out, "train", config)?;

    let prediction = predict(&model.params, &ahat, &features)?;
    let accuracy = prediction.accuracy(labels.training_nodes());
    eprintln!(
        "{kind} model: {} epochs, loss {:.6} -> {:.6}, training accuracy {accuracy:.4}, {seconds:.3}s",
        tc.epochs,
        model.loss_history.first().copied().unwrap_or(f64::NAN),
        model.final_loss
    );
    Ok(())
}

pub fn predict_cmd(config: &RunConfig) -> CliResult<()> {
    let ckpt_path = config.require(&config.checkpoint, "checkpoint")?;
    let graph_path = config.require(&config.graph, "graph")?;
    let out = config.require(&config.out, "out")?;
    let bytes = std::fs::read(ckpt_path)
        .map_err(|e| FeatherError::Io(format!("{}: {e}", ckpt_path.display())))?;
    let params = checkpoint::from_bytes(&bytes)?;
    let (graph, features) = load_inputs(graph_path, config.features.as_deref(), config)?;

    if features.k() != params.k() {
        return Err(CliError::IncompatibleCheckpoint(format!(
            "checkpoint expects {} features, input has {}",
            params.k(),
            features.k()
        )));
    }
    for (flag, given, stored) in [("d", config.d, params.d()), ("r", config.r, params.r())] {
        if given.is_some_and(|v| v != stored) {
            return Err(CliError::IncompatibleCheckpoint(format!(
                "--{flag} {} differs from the checkpoint's {stored}",
                given.unwrap()
            )));
        }
    }
    if features.names() != params.feature_names.as_slice() {
        log::warn!(
            "feature names {:?} differ from training names {:?}",
            features.names(),
            params.feature_names
        );
    }

    let prediction = predict(&params, &graph.normalize(), &features)?;
    let mut w = create(out)?;
    let mut header = String::from("node");
    for c in 0..params.num_classes {
        header.push_str(&format!(",p_{c}"));
    }
    writeln!(w, "{header},label").map_err(FeatherError::from)?;
    for (u, (row, label)) in prediction
        .probs
        .rows()
        .into_iter()
        .zip(&prediction.labels)
        .enumerate()
    {
        let mut line = u.to_string();
        for p in row {
            line.push(',');
            line.push_str(&p.to_string());
        }
        writeln!(w, "{line},{label}").map_err(FeatherError::from)?;
    }
    w.flush().map_err(FeatherError::from)?;
    write_run_manifest(out, "predict", config)?;
    eprintln!(
        "predicted {} nodes into {} classes",
        graph.num_nodes(),
        params.num_classes
    );
    Ok(())
}

pub fn bench(config: &RunConfig) -> CliResult<()> {
    let out = config.require(&config.out, "out")?;
    let knob = *config.require(&config.knob, "knob")?;
    if config.levels.is_empty() {
        return Err(CliError::Usage("missing --levels".into()));
    }
    let defaults = BenchBase::default();
    let base = BenchBase {
        nodes: config.nodes.unwrap_or(defaults.nodes),
        edges_per_node: config.edges_per_node.unwrap_or(defaults.edges_per_node),
        features: config.k.unwrap_or(defaults.features),
        points: config.d.unwrap_or(defaults.points),
        scale: config.r.unwrap_or(defaults.scale),
        seed: config.seed.unwrap_or(defaults.seed),
    };
    let spec = BenchSpec {
        knob,
        levels: config.levels.clone(),
        repetitions: config.reps.unwrap_or(10),
        base,
    };
    let records = run_sweep(&spec)?;

    let mut w = create(out)?;
    writeln!(w, "knob,level,repetition,seconds").map_err(FeatherError::from)?;
    for r in &records {
        writeln!(w, "{},{},{},{}", r.knob, r.level, r.repetition, r.seconds)
            .map_err(FeatherError::from)?;
    }
    w.flush().map_err(FeatherError::from)?;
    write_run_manifest(out, "bench", config)?;
    for (level, median) in median_by_level(&records) {
        eprintln!("{knob} = {level}: median {median:.6}s");
    }
    Ok(())
}
