//! Seeded synthetic graph generators.

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::Graph;
use crate::error::{FeatherError, Result};

/// Uniform `G(n, m)` sample with `m = n · edges_per_node` distinct undirected edges.
pub fn erdos_renyi(n: usize, edges_per_node: usize, seed: u64) -> Result<Graph> {
    if n < 2 {
        return Err(FeatherError::InvalidParameter(format!(
            "erdos_renyi needs at least 2 nodes, got {n}"
        )));
    }
    if edges_per_node == 0 {
        return Err(FeatherError::InvalidParameter(
            "edges_per_node must be at least 1".into(),
        ));
    }
    let max = n * (n - 1) / 2;
    let m = n
        .checked_mul(edges_per_node)
        .ok_or(FeatherError::TooDense {
            n,
            requested: usize::MAX,
            max,
        })?;
    if m > max {
        return Err(FeatherError::TooDense {
            n,
            requested: m,
            max,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let picks = index::sample(&mut rng, max, m);
    let edges = picks.into_iter().map(|k| {
        let (u, w) = decode_pair(k, n);
        (u, w, None)
    });
    Graph::from_edge_list(edges, Some(n))
}

/// Maps `k ∈ [0, n(n-1)/2)` to the `k`-th pair `(i, j)`, `i < j`, in row order.
fn decode_pair(k: usize, n: usize) -> (usize, usize) {
    // Pairs preceding row i.
    let before = |i: usize| i * (2 * n - i - 1) / 2;
    let (mut lo, mut hi) = (0usize, n - 1);
    while hi - lo > 1 {
        let mid = (lo + hi) / 2;
        if before(mid) <= k {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let i = lo;
    (i, i + 1 + (k - before(i)))
}

/// Planted partition graph: each pair inside a block is linked with
/// probability `p_in`, each pair across blocks with `p_out`.
///
/// Returns the graph and the block index of every node.
pub fn planted_partition(
    block_sizes: &[usize],
    p_in: f64,
    p_out: f64,
    seed: u64,
) -> Result<(Graph, Vec<usize>)> {
    for p in [p_in, p_out] {
        if !(0.0..=1.0).contains(&p) {
            return Err(FeatherError::InvalidParameter(format!(
                "edge probability {p} outside [0, 1]"
            )));
        }
    }
    let blocks: Vec<usize> = block_sizes
        .iter()
        .enumerate()
        .flat_map(|(b, &size)| std::iter::repeat_n(b, size))
        .collect();
    let n = blocks.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for u in 0..n {
        for w in u + 1..n {
            let p = if blocks[u] == blocks[w] { p_in } else { p_out };
            if rng.random::<f64>() < p {
                edges.push((u, w, None));
            }
        }
    }
    Ok((Graph::from_edge_list(edges, Some(n))?, blocks))
}
