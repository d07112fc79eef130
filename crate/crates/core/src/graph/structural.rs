//! Structural node features computed from the graph alone.

use super::Graph;

/// `ln(1 + D_u)` for every node, with `D_u` the weighted degree.
pub fn log_degree_feature(g: &Graph) -> Vec<f64> {
    g.degrees().into_iter().map(f64::ln_1p).collect()
}

/// Local clustering coefficient on the unweighted skeleton of `g`.
///
/// Any positive weight counts as an edge and self-loops are ignored. Nodes
/// with fewer than two neighbours get 0.
pub fn clustering_coefficient_feature(g: &Graph) -> Vec<f64> {
    let n = g.num_nodes();
    let skeleton: Vec<Vec<usize>> = (0..n)
        .map(|u| {
            let (cols, ws) = g.neighbors(u);
            cols.iter()
                .zip(ws)
                .filter(|&(&w, &a)| w != u && a > 0.0)
                .map(|(&w, _)| w)
                .collect()
        })
        .collect();

    let mut triangles = vec![0usize; n];
    // Count each triangle once at its lowest node via sorted-list intersection.
    for u in 0..n {
        let nu = &skeleton[u];
        for &v in nu.iter().filter(|&&v| v > u) {
            let nv = &skeleton[v];
            let (mut i, mut j) = (0, 0);
            while i < nu.len() && j < nv.len() {
                match nu[i].cmp(&nv[j]) {
                    std::cmp::Ordering::Less => i += 1,
                    std::cmp::Ordering::Greater => j += 1,
                    std::cmp::Ordering::Equal => {
                        let w = nu[i];
                        if w > v {
                            triangles[u] += 1;
                            triangles[v] += 1;
                            triangles[w] += 1;
                        }
                        i += 1;
                        j += 1;
                    }
                }
            }
        }
    }

    skeleton
        .iter()
        .zip(triangles)
        .map(|(nbrs, t)| {
            let deg = nbrs.len();
            if deg < 2 {
                0.0
            } else {
                2.0 * t as f64 / (deg * (deg - 1)) as f64
            }
        })
        .collect()
}
