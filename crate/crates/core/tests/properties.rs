#![allow(clippy::needless_range_loop)]

use feather_core::charfunc::{column_index, feather_embed, Part};
use feather_core::graph::{clustering_coefficient_feature, invert_permutation, log_degree_feature};
use feather_core::models::{predict, ModelKind, ModelParams, TrainConfig};
use feather_core::pooling::pool;
use feather_core::{EmbeddingMatrix, EvaluationGrid, FeatureSet, Graph, GridLayout, PoolMode};
use ndarray::Array2;
use proptest::prelude::*;

/// A graph on `n` nodes from a list of candidate edges and weights.
fn arb_graph(max_nodes: usize) -> impl Strategy<Value = Graph> {
    (2..=max_nodes).prop_flat_map(|n| {
        prop::collection::vec((0..n, 0..n, 0.1f64..4.0), 0..3 * n).prop_map(move |edges| {
            Graph::from_edge_list(edges.into_iter().map(|(u, w, a)| (u, w, Some(a))), Some(n))
                .unwrap()
        })
    })
}

fn arb_graph_and_perm(max_nodes: usize) -> impl Strategy<Value = (Graph, Vec<usize>)> {
    arb_graph(max_nodes).prop_flat_map(|g| {
        let n = g.num_nodes();
        (Just(g), Just((0..n).collect::<Vec<_>>()).prop_shuffle())
    })
}

fn features(g: &Graph) -> FeatureSet {
    FeatureSet::new(
        vec!["deg".into(), "cc".into()],
        vec![log_degree_feature(g), clustering_coefficient_feature(g)],
    )
    .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn normalization_commutes_with_relabeling((g, perm) in arb_graph_and_perm(40)) {
        let a = g.normalize().to_dense();
        let b = g.permute(&perm).unwrap().normalize().to_dense();
        for u in 0..g.num_nodes() {
            for w in 0..g.num_nodes() {
                prop_assert!((a[u][w] - b[perm[u]][perm[w]]).abs() <= 1e-15);
            }
        }
    }

    #[test]
    fn rows_sum_to_one(g in arb_graph(60)) {
        let a = g.normalize();
        for u in 0..g.num_nodes() {
            let (_, p) = a.row(u);
            prop_assert_eq!(p.iter().sum::<f64>(), 1.0);
        }
    }

    #[test]
    fn embedding_is_equivariant((g, perm) in arb_graph_and_perm(40), seed in any::<u64>(), r in 1usize..4) {
        let grid = EvaluationGrid::random(2, 3, r, -5.0, 5.0, seed).unwrap();
        let h = g.permute(&perm).unwrap();
        let z = feather_embed(&g.normalize(), &features(&g), &grid).unwrap();
        let y = feather_embed(&h.normalize(), &features(&h), &grid).unwrap();
        for u in 0..g.num_nodes() {
            for c in 0..z.width() {
                prop_assert!((z.values()[[u, c]] - y.values()[[perm[u], c]]).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn relabeled_features_follow_nodes((g, perm) in arb_graph_and_perm(30)) {
        let f = features(&g);
        let moved = f.permute(&perm).unwrap();
        let back = moved.permute(&invert_permutation(&perm)).unwrap();
        prop_assert_eq!(back, f);
    }

    #[test]
    fn entries_are_bounded_and_parity_holds(
        g in arb_graph(50),
        seed in any::<u64>(),
        fresh in any::<bool>(),
    ) {
        let layout = if fresh { GridLayout::FreshPower } else { GridLayout::Shared };
        let grid = EvaluationGrid::random_with_layout(2, 4, 3, -5.0, 5.0, seed, layout).unwrap();
        let a = g.normalize();
        let f = features(&g);
        let z = feather_embed(&a, &f, &grid).unwrap();
        let m = feather_embed(&a, &f, &grid.mirrored()).unwrap();
        prop_assert!(z.values().iter().all(|v| v.abs() <= 1.0 + 1e-12));
        for i in 0..2 {
            for s in 1..=3 {
                for j in 0..4 {
                    let re = column_index(4, 3, i, s, Part::Re, j);
                    let im = column_index(4, 3, i, s, Part::Im, j);
                    for u in 0..g.num_nodes() {
                        prop_assert_eq!(m.values()[[u, re]], z.values()[[u, re]]);
                        prop_assert_eq!(m.values()[[u, im]], -z.values()[[u, im]]);
                    }
                }
            }
        }
    }

    #[test]
    fn zero_points_give_unit_real_part(g in arb_graph(50), r in 1usize..5) {
        let grid = EvaluationGrid::constant(2, 2, r, 0.0).unwrap();
        let z = feather_embed(&g.normalize(), &features(&g), &grid).unwrap();
        for i in 0..2 {
            for s in 1..=r {
                for j in 0..2 {
                    for u in 0..g.num_nodes() {
                        prop_assert!((z.get(u, i, s, Part::Re, j) - 1.0).abs() <= 1e-15);
                        prop_assert!(z.get(u, i, s, Part::Im, j).abs() <= 1e-15);
                    }
                }
            }
        }
    }

    #[test]
    fn pooling_ignores_row_order(
        rows in prop::collection::vec(prop::collection::vec(-1.0f64..1.0, 4), 1..30),
        seed in any::<u64>(),
    ) {
        let n = rows.len();
        let values = Array2::from_shape_fn((n, 4), |(u, c)| rows[u][c]);
        let mut order: Vec<usize> = (0..n).collect();
        // Deterministic shuffle driven by the seed.
        order.sort_by_key(|&u| (u as u64).wrapping_mul(seed | 1).rotate_left(17));
        let shuffled = Array2::from_shape_fn((n, 4), |(u, c)| rows[order[u]][c]);
        let z = EmbeddingMatrix::new(values, vec!["x".into()], 2, 1).unwrap();
        let y = EmbeddingMatrix::new(shuffled, vec!["x".into()], 2, 1).unwrap();
        for mode in [PoolMode::Max, PoolMode::Min] {
            prop_assert_eq!(pool(&z, mode).unwrap().values, pool(&y, mode).unwrap().values);
        }
        let a = pool(&z, PoolMode::Mean).unwrap().values;
        let b = pool(&y, PoolMode::Mean).unwrap().values;
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x - y).abs() <= 1e-12);
        }
    }

    #[test]
    fn predictions_follow_relabeling((g, perm) in arb_graph_and_perm(30), seed in any::<u64>(), neural in any::<bool>()) {
        let kind = if neural { ModelKind::Neural } else { ModelKind::Softmax };
        let cfg = TrainConfig { d: 3, r: 2, hidden: 5, seed, ..TrainConfig::default() };
        let params = ModelParams::init(kind, vec!["deg".into(), "cc".into()], 3, &cfg).unwrap();
        let h = g.permute(&perm).unwrap();
        let p = predict(&params, &g.normalize(), &features(&g)).unwrap();
        let q = predict(&params, &h.normalize(), &features(&h)).unwrap();
        for u in 0..g.num_nodes() {
            for c in 0..3 {
                prop_assert!((p.probs[[u, c]] - q.probs[[perm[u], c]]).abs() <= 1e-12);
            }
            let row_sum: f64 = p.probs.row(u).sum();
            prop_assert!((row_sum - 1.0).abs() <= 1e-12);
        }
    }
}
