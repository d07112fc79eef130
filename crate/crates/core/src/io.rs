//! Text and binary file formats.
//!
//! * Edge lists: one `u w [weight]` per line, whitespace separated, 0-based,
//!   `#` starts a comment.
//! * Feature CSV: header `node,f1,...,fk`, one row per node in any order.
//! * Label CSV: header `node,class`; nodes without a row are unlabeled.
//! * Embedding CSV: header `node,<feature>_s<scale>_<re|im>_<j>,...`.
//! * Embedding binary: row-major little-endian `f64` with a JSON sidecar.
//! * Graph manifest: `id path [features_path]` per line.

use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::charfunc::{column_names, EmbeddingMatrix};
use crate::error::{FeatherError, Result};
use crate::graph::{FeatureSet, Graph};
use crate::models::LabelData;
use crate::pooling::PooledDescriptor;

/// Upper bound on node indices accepted from text inputs.
pub const MAX_NODES: usize = 1 << 26;

fn parse_err(line: usize, message: impl Into<String>) -> FeatherError {
    FeatherError::Parse {
        line,
        message: message.into(),
    }
}

fn parse_index(token: &str, line: usize, what: &str) -> Result<usize> {
    let v: usize = token
        .parse()
        .map_err(|_| parse_err(line, format!("invalid {what} `{token}`")))?;
    if v >= MAX_NODES {
        return Err(parse_err(
            line,
            format!("{what} {v} exceeds limit {MAX_NODES}"),
        ));
    }
    Ok(v)
}

/// Parses edge-list text into `(u, w, weight)` triples.
pub fn parse_edge_list(text: &str) -> Result<Vec<(usize, usize, Option<f64>)>> {
    let mut edges = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("");
        let tokens: Vec<&str> = content.split_whitespace().collect();
        match tokens.as_slice() {
            [] => continue,
            [u, w] => edges.push((
                parse_index(u, line, "node")?,
                parse_index(w, line, "node")?,
                None,
            )),
            [u, w, weight] => {
                let a: f64 = weight
                    .parse()
                    .map_err(|_| parse_err(line, format!("invalid weight `{weight}`")))?;
                if !(a.is_finite() && a >= 0.0) {
                    return Err(parse_err(
                        line,
                        format!("weight {a} must be finite and nonnegative"),
                    ));
                }
                edges.push((
                    parse_index(u, line, "node")?,
                    parse_index(w, line, "node")?,
                    Some(a),
                ));
            }
            _ => {
                return Err(parse_err(
                    line,
                    format!("expected `u w [weight]`, found {} fields", tokens.len()),
                ))
            }
        }
    }
    Ok(edges)
}

/// Parses an edge list and builds the graph.
pub fn parse_graph(text: &str, num_nodes: Option<usize>) -> Result<Graph> {
    Graph::from_edge_list(parse_edge_list(text)?, num_nodes)
}

pub fn read_graph(path: &Path, num_nodes: Option<usize>) -> Result<Graph> {
    parse_graph(&read_text(path)?, num_nodes)
}

/// Writes each undirected edge once as `u w weight`.
pub fn write_edge_list<W: Write>(g: &Graph, mut out: W) -> Result<()> {
    for (u, w, a) in g.edges() {
        writeln!(out, "{u} {w} {a}")?;
    }
    Ok(())
}

fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| FeatherError::Io(format!("{}: {e}", path.display())))
}

fn csv_line(pos: Option<&csv::Position>) -> usize {
    pos.map_or(0, |p| p.line() as usize)
}

fn csv_reader<R: Read>(input: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(input)
}

/// Parses a feature CSV. Without `num_nodes`, the row count defines it.
pub fn parse_features<R: Read>(input: R, num_nodes: Option<usize>) -> Result<FeatureSet> {
    let mut reader = csv_reader(input);
    let header = reader
        .headers()
        .map_err(|e| parse_err(1, e.to_string()))?
        .clone();
    if header.len() < 2 || &header[0] != "node" {
        return Err(parse_err(1, "header must be `node,f1,...,fk`"));
    }
    let names: Vec<String> = header.iter().skip(1).map(str::to_owned).collect();
    let k = names.len();

    let mut rows: Vec<(usize, usize, Vec<f64>)> = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| parse_err(csv_line(e.position()), e.to_string()))?;
        let line = csv_line(record.position());
        if record.len() != k + 1 {
            return Err(parse_err(
                line,
                format!("expected {} fields, found {}", k + 1, record.len()),
            ));
        }
        let node = parse_index(&record[0], line, "node")?;
        let values = record
            .iter()
            .skip(1)
            .zip(&names)
            .map(|(v, name)| {
                let x: f64 = v
                    .parse()
                    .map_err(|_| parse_err(line, format!("invalid value `{v}` for `{name}`")))?;
                if !x.is_finite() {
                    return Err(parse_err(line, format!("non-finite value for `{name}`")));
                }
                Ok(x)
            })
            .collect::<Result<Vec<f64>>>()?;
        rows.push((line, node, values));
    }

    let n = num_nodes.unwrap_or(rows.len());
    let mut columns = vec![vec![0.0; n]; k];
    let mut seen = vec![false; n];
    for (line, node, values) in rows {
        if node >= n {
            return Err(parse_err(
                line,
                format!("node {node} out of range for {n} nodes"),
            ));
        }
        if std::mem::replace(&mut seen[node], true) {
            return Err(parse_err(line, format!("node {node} listed twice")));
        }
        for (col, v) in columns.iter_mut().zip(values) {
            col[node] = v;
        }
    }
    if let Some(missing) = seen.iter().position(|s| !s) {
        return Err(FeatherError::ShapeMismatch(format!(
            "feature file has no row for node {missing}"
        )));
    }
    FeatureSet::new(names, columns)
}

pub fn read_features(path: &Path, num_nodes: Option<usize>) -> Result<FeatureSet> {
    let file = std::fs::File::open(path)
        .map_err(|e| FeatherError::Io(format!("{}: {e}", path.display())))?;
    parse_features(file, num_nodes)
}

pub fn write_features<W: Write>(f: &FeatureSet, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["node".to_string()];
    header.extend(f.names().iter().cloned());
    w.write_record(&header).map_err(csv_io)?;
    for u in 0..f.num_nodes() {
        let mut row = vec![u.to_string()];
        row.extend(f.iter().map(|x| x[u].to_string()));
        w.write_record(&row).map_err(csv_io)?;
    }
    w.flush()?;
    Ok(())
}

fn csv_io(e: csv::Error) -> FeatherError {
    FeatherError::Io(e.to_string())
}

/// Parses a `node,class` CSV. Classes run from 0 to `num_classes - 1`;
/// without `num_classes` the largest class present defines it.
pub fn parse_labels<R: Read>(
    input: R,
    num_nodes: usize,
    num_classes: Option<usize>,
) -> Result<LabelData> {
    let mut reader = csv_reader(input);
    let header = reader
        .headers()
        .map_err(|e| parse_err(1, e.to_string()))?
        .clone();
    if header.len() != 2 || &header[0] != "node" || &header[1] != "class" {
        return Err(parse_err(1, "header must be `node,class`"));
    }
    let mut classes = vec![None; num_nodes];
    for record in reader.records() {
        let record = record.map_err(|e| parse_err(csv_line(e.position()), e.to_string()))?;
        let line = csv_line(record.position());
        if record.len() != 2 {
            return Err(parse_err(line, "expected `node,class`"));
        }
        let node = parse_index(&record[0], line, "node")?;
        let class = parse_index(&record[1], line, "class")?;
        if node >= num_nodes {
            return Err(parse_err(
                line,
                format!("node {node} out of range for {num_nodes} nodes"),
            ));
        }
        if classes[node].replace(class).is_some() {
            return Err(parse_err(line, format!("node {node} labeled twice")));
        }
    }
    let c = match num_classes {
        Some(c) => c,
        None => classes.iter().flatten().max().map_or(0, |m| m + 1),
    };
    LabelData::new(classes, c)
}

pub fn read_labels(path: &Path, num_nodes: usize, num_classes: Option<usize>) -> Result<LabelData> {
    let file = std::fs::File::open(path)
        .map_err(|e| FeatherError::Io(format!("{}: {e}", path.display())))?;
    parse_labels(file, num_nodes, num_classes)
}

/// Writes the embedding as CSV with one row per node.
pub fn write_embedding_csv<W: Write>(z: &EmbeddingMatrix, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["node".to_string()];
    header.extend(z.column_names());
    w.write_record(&header).map_err(csv_io)?;
    let mut row = Vec::with_capacity(z.width() + 1);
    for (u, values) in z.values().rows().into_iter().enumerate() {
        row.clear();
        row.push(u.to_string());
        row.extend(values.iter().map(f64::to_string));
        w.write_record(&row).map_err(csv_io)?;
    }
    w.flush()?;
    Ok(())
}

/// Header and numeric rows of a CSV whose first column is an identifier.
#[derive(Debug, Clone, PartialEq)]
pub struct NumericTable {
    pub header: Vec<String>,
    pub ids: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

/// Reads an embedding, descriptor or prediction CSV back into memory.
pub fn parse_numeric_csv<R: Read>(input: R) -> Result<NumericTable> {
    let mut reader = csv_reader(input);
    let header: Vec<String> = reader
        .headers()
        .map_err(|e| parse_err(1, e.to_string()))?
        .iter()
        .map(str::to_owned)
        .collect();
    if header.is_empty() {
        return Err(parse_err(1, "empty header"));
    }
    let mut table = NumericTable {
        header,
        ids: Vec::new(),
        rows: Vec::new(),
    };
    for record in reader.records() {
        let record = record.map_err(|e| parse_err(csv_line(e.position()), e.to_string()))?;
        let line = csv_line(record.position());
        if record.len() != table.header.len() {
            return Err(parse_err(line, "row width differs from header"));
        }
        table.ids.push(record[0].to_owned());
        table.rows.push(
            record
                .iter()
                .skip(1)
                .map(|v| {
                    v.parse()
                        .map_err(|_| parse_err(line, format!("invalid number `{v}`")))
                })
                .collect::<Result<_>>()?,
        );
    }
    Ok(table)
}

/// Sidecar describing a raw binary embedding.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EmbeddingSidecar {
    pub rows: usize,
    pub cols: usize,
    pub dtype: String,
    pub byte_order: String,
    pub layout: String,
    pub d: usize,
    pub r: usize,
    pub feature_names: Vec<String>,
    pub columns: Vec<String>,
}

const SIDECAR_DTYPE: &str = "f64";
const SIDECAR_ORDER: &str = "little-endian";
const SIDECAR_LAYOUT: &str = "row-major; columns ordered by feature, scale, part (re, im), point";

pub fn embedding_sidecar(z: &EmbeddingMatrix) -> EmbeddingSidecar {
    EmbeddingSidecar {
        rows: z.num_rows(),
        cols: z.width(),
        dtype: SIDECAR_DTYPE.into(),
        byte_order: SIDECAR_ORDER.into(),
        layout: SIDECAR_LAYOUT.into(),
        d: z.d(),
        r: z.r(),
        feature_names: z.feature_names().to_vec(),
        columns: z.column_names(),
    }
}

/// Raw row-major little-endian bytes of the embedding.
pub fn embedding_to_bytes(z: &EmbeddingMatrix) -> Vec<u8> {
    z.values().iter().flat_map(|v| v.to_le_bytes()).collect()
}

/// Validates a sidecar and decodes the matching binary payload.
pub fn embedding_from_parts(sidecar_json: &str, payload: &[u8]) -> Result<EmbeddingMatrix> {
    let side: EmbeddingSidecar = serde_json::from_str(sidecar_json)
        .map_err(|e| parse_err(e.line(), format!("sidecar: {e}")))?;
    if side.dtype != SIDECAR_DTYPE || side.byte_order != SIDECAR_ORDER {
        return Err(FeatherError::ShapeMismatch(format!(
            "unsupported dtype {} / {}",
            side.dtype, side.byte_order
        )));
    }
    let width = 2usize
        .checked_mul(side.feature_names.len())
        .and_then(|v| v.checked_mul(side.d))
        .and_then(|v| v.checked_mul(side.r));
    // Checked before generating names so a forged `d` cannot force a huge allocation.
    if width != Some(side.cols) || side.columns.len() != side.cols {
        return Err(FeatherError::ShapeMismatch(
            "sidecar column count disagrees with k, d and r".into(),
        ));
    }
    if side.columns != column_names(&side.feature_names, side.d, side.r) {
        return Err(FeatherError::ShapeMismatch(
            "sidecar column names do not follow the layout".into(),
        ));
    }
    let expected = side
        .rows
        .checked_mul(side.cols)
        .and_then(|v| v.checked_mul(8));
    if expected != Some(payload.len()) {
        return Err(FeatherError::ShapeMismatch(format!(
            "payload has {} bytes, sidecar describes {}×{} values",
            payload.len(),
            side.rows,
            side.cols
        )));
    }
    let values: Vec<f64> = payload
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    let values = Array2::from_shape_vec((side.rows, side.cols), values)
        .map_err(|e| FeatherError::ShapeMismatch(e.to_string()))?;
    EmbeddingMatrix::new(values, side.feature_names, side.d, side.r)
}

/// Writes `<path>` with the payload and `<path>.json` with the sidecar.
pub fn write_embedding_binary(z: &EmbeddingMatrix, path: &Path) -> Result<()> {
    std::fs::write(path, embedding_to_bytes(z))?;
    let json = serde_json::to_string_pretty(&embedding_sidecar(z)).expect("sidecar serializes");
    std::fs::write(sidecar_path(path), json + "\n")?;
    Ok(())
}

pub fn read_embedding_binary(path: &Path) -> Result<EmbeddingMatrix> {
    let payload = std::fs::read(path)?;
    let json = read_text(&sidecar_path(path))?;
    embedding_from_parts(&json, &payload)
}

pub fn sidecar_path(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".json");
    PathBuf::from(s)
}

/// Writes one CSV row per descriptor, keyed by graph id.
pub fn write_descriptors_csv<W: Write>(rows: &[(String, PooledDescriptor)], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    if let Some((_, first)) = rows.first() {
        let mut header = vec!["graph".to_string()];
        header.extend(first.column_names.iter().cloned());
        w.write_record(&header).map_err(csv_io)?;
    }
    for (id, desc) in rows {
        let mut row = vec![id.clone()];
        row.extend(desc.values.iter().map(f64::to_string));
        w.write_record(&row).map_err(csv_io)?;
    }
    w.flush()?;
    Ok(())
}

/// One graph of a pooling batch.
#[derive(Debug, Clone, PartialEq)]
pub struct ManifestEntry {
    pub id: String,
    pub graph: PathBuf,
    pub features: Option<PathBuf>,
}

/// Parses `id path [features_path]` lines; relative paths resolve against `base`.
pub fn parse_manifest(text: &str, base: &Path) -> Result<Vec<ManifestEntry>> {
    let mut out: Vec<ManifestEntry> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("");
        let tokens: Vec<&str> = content.split_whitespace().collect();
        let (id, graph, features) = match tokens.as_slice() {
            [] => continue,
            [id, g] => (id, g, None),
            [id, g, f] => (id, g, Some(*f)),
            _ => return Err(parse_err(line, "expected `id graph_path [features_path]`")),
        };
        if out.iter().any(|e| e.id == *id) {
            return Err(parse_err(line, format!("duplicate graph id `{id}`")));
        }
        out.push(ManifestEntry {
            id: id.to_string(),
            graph: base.join(graph),
            features: features.map(|f| base.join(f)),
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::charfunc::{feather_embed, EvaluationGrid};
    use proptest::prelude::*;

    #[test]
    fn edge_list_with_comments_and_weights() {
        let text = "# header\n0 1\n1 2 0.5  # trailing\n\n2 3 2\n";
        let edges = parse_edge_list(text).unwrap();
        assert_eq!(
            edges,
            vec![(0, 1, None), (1, 2, Some(0.5)), (2, 3, Some(2.0))]
        );
    }

    #[test]
    fn edge_list_errors_carry_line_numbers() {
        let err = parse_edge_list("0 1\n0 -1\n").unwrap_err();
        assert!(matches!(err, FeatherError::Parse { line: 2, .. }));
        let err = parse_edge_list("0 1 2 3\n").unwrap_err();
        assert!(matches!(err, FeatherError::Parse { line: 1, .. }));
        let err = parse_edge_list("0 1\n\n1 2 -3\n").unwrap_err();
        assert!(matches!(err, FeatherError::Parse { line: 3, .. }));
    }

    #[test]
    fn edge_list_reingestion_is_idempotent() {
        let g = crate::graph::erdos_renyi(50, 3, 1).unwrap();
        let mut buf = Vec::new();
        write_edge_list(&g, &mut buf).unwrap();
        let h = parse_graph(std::str::from_utf8(&buf).unwrap(), Some(50)).unwrap();
        assert_eq!(g, h);
    }

    #[test]
    fn features_any_row_order() {
        let text = "node,a,b\n2,0.5,1\n0,1.5,2\n1,-1,3\n";
        let f = parse_features(text.as_bytes(), None).unwrap();
        assert_eq!(f.names(), &["a".to_string(), "b".to_string()]);
        assert_eq!(f.feature(0), &[1.5, -1.0, 0.5]);
        assert_eq!(f.feature(1), &[2.0, 3.0, 1.0]);
    }

    #[test]
    fn features_must_cover_nodes_once() {
        assert!(matches!(
            parse_features("node,a\n0,1\n0,2\n".as_bytes(), Some(2)),
            Err(FeatherError::Parse { line: 3, .. })
        ));
        assert!(matches!(
            parse_features("node,a\n0,1\n".as_bytes(), Some(2)),
            Err(FeatherError::ShapeMismatch(_))
        ));
        assert!(parse_features("id,a\n0,1\n".as_bytes(), None).is_err());
        assert!(matches!(
            parse_features("node,a\n0,x\n".as_bytes(), None),
            Err(FeatherError::Parse { line: 2, .. })
        ));
    }

    #[test]
    fn labels_partial_coverage() {
        let l = parse_labels("node,class\n0,1\n2,0\n".as_bytes(), 3, None).unwrap();
        assert_eq!(l.classes(), &[Some(1), None, Some(0)]);
        assert_eq!(l.num_classes(), 2);
        assert!(parse_labels("node,class\n0,1\n0,0\n".as_bytes(), 3, None).is_err());
        assert!(parse_labels("node,class\n5,1\n".as_bytes(), 3, None).is_err());
    }

    #[test]
    fn embedding_csv_header_and_width() {
        let g = crate::graph::erdos_renyi(5, 1, 0).unwrap();
        let f = FeatureSet::single("deg", crate::graph::log_degree_feature(&g)).unwrap();
        let grid = EvaluationGrid::random(1, 4, 2, 0.0, 5.0, 0).unwrap();
        let z = feather_embed(&g.normalize(), &f, &grid).unwrap();
        let mut buf = Vec::new();
        write_embedding_csv(&z, &mut buf).unwrap();
        let table = parse_numeric_csv(buf.as_slice()).unwrap();
        assert_eq!(table.header.len(), 17);
        assert_eq!(table.header[1], "deg_s1_re_0");
        assert_eq!(table.header[16], "deg_s2_im_3");
        for (row, values) in table.rows.iter().zip(z.values().rows()) {
            assert_eq!(row.as_slice(), values.as_slice().unwrap());
        }
    }

    #[test]
    fn binary_embedding_round_trip() {
        let g = crate::graph::erdos_renyi(7, 2, 3).unwrap();
        let f = FeatureSet::single("deg", crate::graph::log_degree_feature(&g)).unwrap();
        let grid = EvaluationGrid::random(1, 3, 2, 0.0, 5.0, 0).unwrap();
        let z = feather_embed(&g.normalize(), &f, &grid).unwrap();
        let json = serde_json::to_string(&embedding_sidecar(&z)).unwrap();
        let back = embedding_from_parts(&json, &embedding_to_bytes(&z)).unwrap();
        assert_eq!(back, z);
        assert!(embedding_from_parts(&json, &embedding_to_bytes(&z)[8..]).is_err());
    }

    #[test]
    fn manifest_lines() {
        let m = parse_manifest("a g1.txt\n# skip\nb g2.txt f2.csv\n", Path::new("/data")).unwrap();
        assert_eq!(m.len(), 2);
        assert_eq!(m[1].graph, PathBuf::from("/data/g2.txt"));
        assert_eq!(m[1].features, Some(PathBuf::from("/data/f2.csv")));
        assert!(parse_manifest("a x\na y\n", Path::new(".")).is_err());
    }

    proptest! {
        #[test]
        fn edge_list_parser_never_panics(s in "\\PC{0,200}") {
            let _ = parse_edge_list(&s);
        }

        #[test]
        fn feature_parser_never_panics(s in "[0-9a-z,.\\n -]{0,200}") {
            let _ = parse_features(s.as_bytes(), None);
        }

        #[test]
        fn exported_edge_lists_reparse_identically(
            edges in proptest::collection::vec((0usize..20, 0usize..20, 0.0f64..10.0), 0..60)
        ) {
            let g = Graph::from_edge_list(edges.into_iter().map(|(u, w, a)| (u, w, Some(a))), Some(20)).unwrap();
            let mut buf = Vec::new();
            write_edge_list(&g, &mut buf).unwrap();
            let h = parse_graph(std::str::from_utf8(&buf).unwrap(), Some(20)).unwrap();
            prop_assert_eq!(g, h);
        }
    }
}
