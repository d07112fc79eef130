use feather_core::charfunc::feather_embed;
use feather_core::graph::{erdos_renyi, log_degree_feature};
use feather_core::io::{
    parse_numeric_csv, read_embedding_binary, read_features, read_graph, read_labels, sidecar_path,
    write_edge_list, write_embedding_binary, write_embedding_csv, write_features,
};
use feather_core::models::{checkpoint, ModelKind, ModelParams, TrainConfig};
use feather_core::{EvaluationGrid, FeatureSet};
use std::fs::File;

#[test]
fn graph_and_features_survive_files() {
    let dir = tempfile::tempdir().unwrap();
    let g = erdos_renyi(50, 3, 1).unwrap();
    let f = FeatureSet::new(
        vec!["deg".into(), "half".into()],
        vec![
            log_degree_feature(&g),
            (0..50).map(|u| u as f64 / 2.0).collect(),
        ],
    )
    .unwrap();

    let gp = dir.path().join("g.edges");
    write_edge_list(&g, File::create(&gp).unwrap()).unwrap();
    assert_eq!(read_graph(&gp, Some(50)).unwrap(), g);

    let fp = dir.path().join("f.csv");
    write_features(&f, File::create(&fp).unwrap()).unwrap();
    assert_eq!(read_features(&fp, Some(50)).unwrap(), f);
}

#[test]
fn embedding_csv_and_binary_agree() {
    let dir = tempfile::tempdir().unwrap();
    let g = erdos_renyi(30, 2, 4).unwrap();
    let f = FeatureSet::single("deg", log_degree_feature(&g)).unwrap();
    let grid = EvaluationGrid::random(1, 3, 2, 0.0, 5.0, 9).unwrap();
    let z = feather_embed(&g.normalize(), &f, &grid).unwrap();

    let bin = dir.path().join("z.bin");
    write_embedding_binary(&z, &bin).unwrap();
    assert!(sidecar_path(&bin).exists());
    assert_eq!(read_embedding_binary(&bin).unwrap(), z);

    let mut csv = Vec::new();
    write_embedding_csv(&z, &mut csv).unwrap();
    let table = parse_numeric_csv(csv.as_slice()).unwrap();
    assert_eq!(table.header[1..], z.column_names()[..]);
    for (u, (id, row)) in table.ids.iter().zip(&table.rows).enumerate() {
        assert_eq!(id, &u.to_string());
        // Shortest round-trip formatting reproduces every bit.
        assert_eq!(row, &z.values().row(u).to_vec());
    }
}

#[test]
fn checkpoint_file_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = TrainConfig {
        d: 4,
        r: 3,
        hidden: 6,
        seed: 2,
        ..TrainConfig::default()
    };
    let params = ModelParams::init(ModelKind::Neural, vec!["deg".into()], 4, &cfg).unwrap();
    let path = dir.path().join("m.ckpt");
    std::fs::write(&path, checkpoint::to_bytes(&params)).unwrap();
    assert_eq!(
        checkpoint::from_bytes(&std::fs::read(&path).unwrap()).unwrap(),
        params
    );
}

#[test]
fn partial_labels_leave_nodes_unlabeled() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("labels.csv");
    std::fs::write(&path, "node,class\n0,1\n3,0\n").unwrap();
    let labels = read_labels(&path, 5, None).unwrap();
    assert_eq!(labels.num_classes(), 2);
    assert_eq!(labels.classes(), &[Some(1), None, None, Some(0), None]);
    assert_eq!(labels.num_train(), 2);
}
