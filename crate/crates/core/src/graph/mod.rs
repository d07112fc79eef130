//! Undirected weighted graphs in compressed sparse row form, the random-walk
//! transition matrix derived from them, and node feature sets.

mod features;
mod generate;
mod structural;

pub use features::FeatureSet;
pub use generate::{erdos_renyi, planted_partition};
pub use structural::{clustering_coefficient_feature, log_degree_feature};

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::error::{FeatherError, Result};

/// Work size (rows × columns) above which propagation is split across threads.
const PARALLEL_THRESHOLD: usize = 1 << 14;

/// Options controlling edge-list ingestion.
#[derive(Debug, Clone, Copy, Default)]
pub struct EdgeListOptions {
    /// Reject an edge listed in both directions with different total weights.
    pub strict: bool,
}

/// An undirected, nonnegatively weighted graph stored symmetrically in CSR form.
///
/// Each row holds strictly increasing column indices with no duplicates, and
/// every entry `(u, w, a)` has a mirror `(w, u, a)`. Self-loops are stored once.
#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    num_nodes: usize,
    row_offsets: Vec<usize>,
    col_indices: Vec<usize>,
    weights: Vec<f64>,
}

#[derive(Default)]
struct PairWeight {
    forward: Option<f64>,
    backward: Option<f64>,
}

impl Graph {
    /// Builds a canonical graph from `(u, w, weight)` triples.
    ///
    /// Missing weights default to 1. Repeated listings of the same ordered
    /// pair are summed. When an edge is listed in both directions the two
    /// directional totals are averaged, so a symmetric listing collapses to a
    /// single edge of that weight. Edges whose final weight is zero are dropped.
    pub fn from_edge_list<I>(edges: I, num_nodes: Option<usize>) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, Option<f64>)>,
    {
        Self::from_edge_list_with(edges, num_nodes, EdgeListOptions::default())
    }

    pub fn from_edge_list_with<I>(
        edges: I,
        num_nodes: Option<usize>,
        options: EdgeListOptions,
    ) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, Option<f64>)>,
    {
        let mut pairs: BTreeMap<(usize, usize), PairWeight> = BTreeMap::new();
        let mut max_index: Option<usize> = None;
        for (u, w, weight) in edges {
            let weight = weight.unwrap_or(1.0);
            if !(weight.is_finite() && weight >= 0.0) {
                return Err(FeatherError::InvalidWeight { u, w, weight });
            }
            if let Some(n) = num_nodes {
                for index in [u, w] {
                    if index >= n {
                        return Err(FeatherError::IndexOutOfRange {
                            index,
                            num_nodes: n,
                        });
                    }
                }
            }
            max_index = Some(max_index.map_or(u.max(w), |m| m.max(u).max(w)));
            let entry = pairs.entry((u.min(w), u.max(w))).or_default();
            let slot = if u <= w {
                &mut entry.forward
            } else {
                &mut entry.backward
            };
            *slot = Some(slot.unwrap_or(0.0) + weight);
        }
        let num_nodes = match (num_nodes, max_index) {
            (Some(n), _) => n,
            (None, None) => 0,
            (None, Some(m)) => m.checked_add(1).ok_or(FeatherError::IndexOutOfRange {
                index: m,
                num_nodes: usize::MAX,
            })?,
        };

        let mut triples = Vec::with_capacity(2 * pairs.len());
        for ((u, w), pw) in pairs {
            let weight = match (pw.forward, pw.backward) {
                (Some(a), None) | (None, Some(a)) => a,
                (Some(a), Some(b)) => {
                    if options.strict && a != b {
                        return Err(FeatherError::AsymmetricWeight {
                            u,
                            w,
                            forward: a,
                            backward: b,
                        });
                    }
                    if a == b {
                        a
                    } else {
                        0.5 * (a + b)
                    }
                }
                (None, None) => unreachable!(),
            };
            if weight == 0.0 {
                continue;
            }
            triples.push((u, w, weight));
            if u != w {
                triples.push((w, u, weight));
            }
        }
        Ok(Self::from_sorted_triples(num_nodes, triples))
    }

    /// Assembles CSR arrays from symmetric triples. Sorts and assumes no duplicates.
    fn from_sorted_triples(num_nodes: usize, mut triples: Vec<(usize, usize, f64)>) -> Self {
        triples.sort_unstable_by_key(|&(u, w, _)| (u, w));
        let mut row_offsets = vec![0usize; num_nodes + 1];
        for &(u, _, _) in &triples {
            row_offsets[u + 1] += 1;
        }
        for i in 0..num_nodes {
            row_offsets[i + 1] += row_offsets[i];
        }
        let col_indices = triples.iter().map(|t| t.1).collect();
        let weights = triples.iter().map(|t| t.2).collect();
        Graph {
            num_nodes,
            row_offsets,
            col_indices,
            weights,
        }
    }

    pub fn num_nodes(&self) -> usize {
        self.num_nodes
    }

    /// Number of undirected edges, self-loops included.
    pub fn num_edges(&self) -> usize {
        self.edges().count()
    }

    /// Number of stored CSR entries.
    pub fn nnz(&self) -> usize {
        self.col_indices.len()
    }

    pub fn row_offsets(&self) -> &[usize] {
        &self.row_offsets
    }

    pub fn col_indices(&self) -> &[usize] {
        &self.col_indices
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Neighbour indices and edge weights of `u`.
    pub fn neighbors(&self, u: usize) -> (&[usize], &[f64]) {
        let range = self.row_offsets[u]..self.row_offsets[u + 1];
        (&self.col_indices[range.clone()], &self.weights[range])
    }

    /// Weighted degree: the row sum of the adjacency matrix.
    pub fn degree(&self, u: usize) -> f64 {
        self.neighbors(u).1.iter().sum()
    }

    pub fn degrees(&self) -> Vec<f64> {
        (0..self.num_nodes).map(|u| self.degree(u)).collect()
    }

    /// Each undirected edge once as `(u, w, weight)` with `u <= w`, in row order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.num_nodes).flat_map(move |u| {
            let (cols, ws) = self.neighbors(u);
            cols.iter()
                .zip(ws)
                .filter(move |(&w, _)| u <= w)
                .map(move |(&w, &a)| (u, w, a))
        })
    }

    /// Relabels nodes so that edge `(u, w, a)` becomes `(perm[u], perm[w], a)`.
    pub fn permute(&self, perm: &[usize]) -> Result<Graph> {
        check_permutation(perm, self.num_nodes)?;
        let triples = (0..self.num_nodes)
            .flat_map(|u| {
                let (cols, ws) = self.neighbors(u);
                cols.iter()
                    .zip(ws)
                    .map(move |(&w, &a)| (perm[u], perm[w], a))
            })
            .collect();
        Ok(Self::from_sorted_triples(self.num_nodes, triples))
    }

    /// Row-normalizes the adjacency matrix into the random-walk transition matrix.
    ///
    /// A node with zero weighted degree gets a single self-loop of probability 1.
    /// The last entry of each row absorbs the rounding residual so that the
    /// sequential row sum evaluates to exactly 1.
    pub fn normalize(&self) -> RowStochasticMatrix {
        let mut row_offsets = Vec::with_capacity(self.num_nodes + 1);
        let mut col_indices = Vec::with_capacity(self.nnz());
        let mut values = Vec::with_capacity(self.nnz());
        row_offsets.push(0);
        for u in 0..self.num_nodes {
            let (cols, ws) = self.neighbors(u);
            let degree: f64 = ws.iter().sum();
            if degree > 0.0 {
                let start = values.len();
                col_indices.extend_from_slice(cols);
                values.extend(ws.iter().map(|&a| a / degree));
                let last = values.len() - 1;
                if last > start {
                    let head: f64 = values[start..last].iter().fold(0.0, |acc, &v| acc + v);
                    values[last] = (1.0 - head).clamp(0.0, 1.0);
                } else {
                    values[last] = 1.0;
                }
            } else {
                col_indices.push(u);
                values.push(1.0);
            }
            row_offsets.push(values.len());
        }
        RowStochasticMatrix {
            num_nodes: self.num_nodes,
            row_offsets,
            col_indices,
            values,
        }
    }
}

pub(crate) fn check_permutation(perm: &[usize], n: usize) -> Result<()> {
    if perm.len() != n {
        return Err(FeatherError::InvalidPermutation(n));
    }
    let mut seen = vec![false; n];
    for &p in perm {
        if p >= n || seen[p] {
            return Err(FeatherError::InvalidPermutation(n));
        }
        seen[p] = true;
    }
    Ok(())
}

/// Inverse of a permutation given as an image array.
pub fn invert_permutation(perm: &[usize]) -> Vec<usize> {
    let mut inv = vec![0; perm.len()];
    for (i, &p) in perm.iter().enumerate() {
        inv[p] = i;
    }
    inv
}

/// The row-stochastic random-walk transition matrix `D⁻¹A` in CSR form.
#[derive(Debug, Clone, PartialEq)]
pub struct RowStochasticMatrix {
    num_nodes: usize,
    row_offsets: Vec<usize>,
    col_indices: Vec<usize>,
    values: Vec<f64>,
}

impl RowStochasticMatrix {
    pub fn num_nodes(&self) -> usize {
        self.num_nodes
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// Column indices and transition probabilities of row `u`.
    pub fn row(&self, u: usize) -> (&[usize], &[f64]) {
        let range = self.row_offsets[u]..self.row_offsets[u + 1];
        (&self.col_indices[range.clone()], &self.values[range])
    }

    /// Dense copy, row-major.
    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let mut dense = vec![vec![0.0; self.num_nodes]; self.num_nodes];
        for (u, row) in dense.iter_mut().enumerate() {
            let (cols, vals) = self.row(u);
            for (&w, &p) in cols.iter().zip(vals) {
                row[w] = p;
            }
        }
        dense
    }

    /// Computes `out = Â · input` for a row-major `num_nodes × width` block.
    ///
    /// Each output entry is accumulated sequentially in column-index order, so
    /// the result does not depend on how rows are split across threads.
    pub fn propagate_into(&self, input: &[f64], width: usize, out: &mut [f64]) {
        assert_eq!(input.len(), self.num_nodes * width);
        assert_eq!(out.len(), self.num_nodes * width);
        if width == 0 {
            return;
        }
        let kernel = |(u, row): (usize, &mut [f64])| {
            row.iter_mut().for_each(|v| *v = 0.0);
            let (cols, vals) = self.row(u);
            for (&w, &p) in cols.iter().zip(vals) {
                let src = &input[w * width..(w + 1) * width];
                for (o, &s) in row.iter_mut().zip(src) {
                    *o += p * s;
                }
            }
        };
        if self.num_nodes * width >= PARALLEL_THRESHOLD {
            out.par_chunks_mut(width).enumerate().for_each(kernel);
        } else {
            out.chunks_mut(width).enumerate().for_each(kernel);
        }
    }

    /// `Â · input` for a single column vector.
    pub fn propagate(&self, input: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.num_nodes];
        self.propagate_into(input, 1, &mut out);
        out
    }

    /// `input · Â` for a row vector: one step of the walk distribution.
    pub fn step_distribution(&self, input: &[f64]) -> Vec<f64> {
        assert_eq!(input.len(), self.num_nodes);
        let mut out = vec![0.0; self.num_nodes];
        for (u, &mass) in input.iter().enumerate() {
            if mass == 0.0 {
                continue;
            }
            let (cols, vals) = self.row(u);
            for (&w, &p) in cols.iter().zip(vals) {
                out[w] += mass * p;
            }
        }
        out
    }
}
