//! Random-walk weighted characteristic functions of node features.
//!
//! For a transition matrix `Â`, feature `x` and evaluation points `Θ`, the
//! scale-`s` embedding block is `Âˢ · cos(x ⊗ Θ)` (real part) and
//! `Âˢ · sin(x ⊗ Θ)` (imaginary part). [`feather_embed`] evaluates every
//! feature at every scale `1..=r` and concatenates the blocks in the column
//! order fixed by [`column_index`].

use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{FeatherError, Result};
use crate::graph::{FeatureSet, RowStochasticMatrix};

/// Default evaluation domain.
pub const DEFAULT_THETA_LO: f64 = 0.0;
pub const DEFAULT_THETA_HI: f64 = 5.0;

/// Largest graph accepted by [`dense_power_oracle`].
pub const ORACLE_MAX_NODES: usize = 2048;

/// How evaluation points relate to walk scales.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum GridLayout {
    /// One point vector per feature, reused at every scale. The embedding is
    /// computed by repeated propagation, one sparse product per scale.
    #[default]
    Shared,
    /// A distinct point vector for each (feature, scale) pair. Each scale
    /// recomputes `Âˢ · cos(x ⊗ Θ^{i,s})` from scratch.
    FreshPower,
}

/// Evaluation points of the characteristic function.
#[derive(Debug, Clone, PartialEq)]
pub struct EvaluationGrid {
    d: usize,
    r: usize,
    layout: GridLayout,
    /// Feature-major; `k` vectors for `Shared`, `k · r` for `FreshPower`.
    points: Vec<Vec<f64>>,
}

impl EvaluationGrid {
    /// Points drawn i.i.d. uniform on `[lo, hi)` from `seed`.
    pub fn random(k: usize, d: usize, r: usize, lo: f64, hi: f64, seed: u64) -> Result<Self> {
        Self::random_with_layout(k, d, r, lo, hi, seed, GridLayout::Shared)
    }

    pub fn random_with_layout(
        k: usize,
        d: usize,
        r: usize,
        lo: f64,
        hi: f64,
        seed: u64,
        layout: GridLayout,
    ) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(FeatherError::InvalidDomain { lo, hi });
        }
        check_dims(k, d, r)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let vectors = k * layout_multiplier(layout, r);
        let points = (0..vectors)
            .map(|_| (0..d).map(|_| rng.random_range(lo..hi)).collect())
            .collect();
        Ok(EvaluationGrid {
            d,
            r,
            layout,
            points,
        })
    }

    /// Every point set to `value`.
    pub fn constant(k: usize, d: usize, r: usize, value: f64) -> Result<Self> {
        check_dims(k, d, r)?;
        Self::from_points(vec![vec![value; d]; k], r)
    }

    /// Shared-layout grid from explicit per-feature point vectors.
    pub fn from_points(points: Vec<Vec<f64>>, r: usize) -> Result<Self> {
        Self::from_points_with_layout(points, r, GridLayout::Shared)
    }

    pub fn from_points_with_layout(
        points: Vec<Vec<f64>>,
        r: usize,
        layout: GridLayout,
    ) -> Result<Self> {
        let d = points.first().map_or(0, Vec::len);
        let per = layout_multiplier(layout, r);
        if points.is_empty() || !points.len().is_multiple_of(per.max(1)) {
            return Err(FeatherError::ShapeMismatch(format!(
                "{} point vectors do not fit layout {layout:?} with r = {r}",
                points.len()
            )));
        }
        check_dims(points.len() / per.max(1), d, r)?;
        if points.iter().any(|p| p.len() != d) {
            return Err(FeatherError::ShapeMismatch(
                "evaluation point vectors differ in length".into(),
            ));
        }
        if points.iter().flatten().any(|v| !v.is_finite()) {
            return Err(FeatherError::NonFinite("evaluation point".into()));
        }
        Ok(EvaluationGrid {
            d,
            r,
            layout,
            points,
        })
    }

    /// Number of features the grid serves.
    pub fn k(&self) -> usize {
        self.points.len() / layout_multiplier(self.layout, self.r)
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn layout(&self) -> GridLayout {
        self.layout
    }

    /// Embedding width `2 · k · d · r`.
    pub fn width(&self) -> usize {
        2 * self.k() * self.d * self.r
    }

    /// Points used for feature `i` at scale `s` (1-based).
    pub fn points_for(&self, i: usize, s: usize) -> &[f64] {
        debug_assert!((1..=self.r).contains(&s));
        match self.layout {
            GridLayout::Shared => &self.points[i],
            GridLayout::FreshPower => &self.points[i * self.r + s - 1],
        }
    }

    /// All point vectors in storage order.
    pub fn vectors(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub(crate) fn vectors_mut(&mut self) -> &mut [Vec<f64>] {
        &mut self.points
    }

    /// The grid with every point negated.
    pub fn mirrored(&self) -> Self {
        let mut g = self.clone();
        g.points.iter_mut().flatten().for_each(|v| *v = -*v);
        g
    }
}

fn layout_multiplier(layout: GridLayout, r: usize) -> usize {
    match layout {
        GridLayout::Shared => 1,
        GridLayout::FreshPower => r,
    }
}

fn check_dims(k: usize, d: usize, r: usize) -> Result<()> {
    if k == 0 || d == 0 || r == 0 {
        return Err(FeatherError::InvalidParameter(format!(
            "grid dimensions must be positive (k = {k}, d = {d}, r = {r})"
        )));
    }
    Ok(())
}

/// Real or imaginary half of a characteristic function block.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Part {
    Re = 0,
    Im = 1,
}

/// Column of (feature `i`, scale `s` in `1..=r`, `part`, point `j`).
///
/// Order is feature-major, then scale, then real before imaginary, then point.
pub fn column_index(d: usize, r: usize, i: usize, s: usize, part: Part, j: usize) -> usize {
    ((i * r + (s - 1)) * 2 + part as usize) * d + j
}

/// Column headers matching [`column_index`] order.
pub fn column_names(names: &[String], d: usize, r: usize) -> Vec<String> {
    let mut out = Vec::with_capacity(2 * names.len() * d * r);
    for name in names {
        for s in 1..=r {
            for part in ["re", "im"] {
                for j in 0..d {
                    out.push(format!("{name}_s{s}_{part}_{j}"));
                }
            }
        }
    }
    out
}

/// Node embedding of shape `|V| × 2·k·d·r`.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingMatrix {
    values: Array2<f64>,
    feature_names: Vec<String>,
    d: usize,
    r: usize,
}

impl EmbeddingMatrix {
    pub fn new(
        values: Array2<f64>,
        feature_names: Vec<String>,
        d: usize,
        r: usize,
    ) -> Result<Self> {
        let expected = 2 * feature_names.len() * d * r;
        if values.ncols() != expected {
            return Err(FeatherError::ShapeMismatch(format!(
                "embedding has {} columns, layout requires {expected}",
                values.ncols()
            )));
        }
        Ok(EmbeddingMatrix {
            values,
            feature_names,
            d,
            r,
        })
    }

    pub fn values(&self) -> &Array2<f64> {
        &self.values
    }

    pub fn into_values(self) -> Array2<f64> {
        self.values
    }

    pub fn num_rows(&self) -> usize {
        self.values.nrows()
    }

    pub fn width(&self) -> usize {
        self.values.ncols()
    }

    pub fn k(&self) -> usize {
        self.feature_names.len()
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    pub fn column_names(&self) -> Vec<String> {
        column_names(&self.feature_names, self.d, self.r)
    }

    pub fn get(&self, u: usize, i: usize, s: usize, part: Part, j: usize) -> f64 {
        self.values[[u, column_index(self.d, self.r, i, s, part, j)]]
    }
}

fn check_inputs(
    ahat: &RowStochasticMatrix,
    features: &FeatureSet,
    grid: &EvaluationGrid,
) -> Result<()> {
    if features.k() != grid.k() {
        return Err(FeatherError::ShapeMismatch(format!(
            "{} features but the grid holds points for {}",
            features.k(),
            grid.k()
        )));
    }
    if features.num_nodes() != ahat.num_nodes() {
        return Err(FeatherError::ShapeMismatch(format!(
            "features cover {} nodes, graph has {}",
            features.num_nodes(),
            ahat.num_nodes()
        )));
    }
    Ok(())
}

/// Fills a row-major `|V| × 2d` block with `[f(θ_j x_u) | g(θ_j x_u)]`.
pub(crate) fn trig_block(
    x: &[f64],
    theta: &[f64],
    mut f: impl FnMut(f64, f64) -> (f64, f64),
) -> Vec<f64> {
    let d = theta.len();
    let mut block = vec![0.0; x.len() * 2 * d];
    for (row, &xu) in block.chunks_mut(2 * d).zip(x) {
        let (re, im) = row.split_at_mut(d);
        for ((a, b), &t) in re.iter_mut().zip(im.iter_mut()).zip(theta) {
            (*a, *b) = f(xu, t);
        }
    }
    block
}

/// `[cos(x ⊗ Θ) | sin(x ⊗ Θ)]`.
pub(crate) fn cos_sin_block(x: &[f64], theta: &[f64]) -> Vec<f64> {
    trig_block(x, theta, |xu, t| {
        let (s, c) = (t * xu).sin_cos();
        (c, s)
    })
}

/// Runs `block ← Â · block` for scales `1..=r`, handing each result to `sink`.
pub(crate) fn propagate_scales(
    ahat: &RowStochasticMatrix,
    mut block: Vec<f64>,
    width: usize,
    r: usize,
    mut sink: impl FnMut(usize, &[f64]),
) {
    let mut next = vec![0.0; block.len()];
    for s in 1..=r {
        ahat.propagate_into(&block, width, &mut next);
        std::mem::swap(&mut block, &mut next);
        sink(s, &block);
    }
}

/// Copies a `|V| × 2d` scale block into the embedding at column `offset`.
fn scatter_block(z: &mut Array2<f64>, block: &[f64], offset: usize, block_width: usize) {
    let z_width = z.ncols();
    let dst = z.as_slice_mut().expect("embedding is contiguous");
    for (dst_row, src_row) in dst.chunks_mut(z_width).zip(block.chunks(block_width)) {
        dst_row[offset..offset + block_width].copy_from_slice(src_row);
    }
}

/// Evaluates the characteristic function of every feature at every scale.
///
/// Returns the `|V| × 2·k·d·r` embedding. Output is bit-identical across runs
/// and thread counts.
pub fn feather_embed(
    ahat: &RowStochasticMatrix,
    features: &FeatureSet,
    grid: &EvaluationGrid,
) -> Result<EmbeddingMatrix> {
    check_inputs(ahat, features, grid)?;
    let (n, d, r) = (ahat.num_nodes(), grid.d(), grid.r());
    let mut z = Array2::<f64>::zeros((n, grid.width()));
    for (i, x) in features.iter().enumerate() {
        match grid.layout() {
            GridLayout::Shared => {
                let block = cos_sin_block(x, grid.points_for(i, 1));
                propagate_scales(ahat, block, 2 * d, r, |s, h| {
                    scatter_block(&mut z, h, column_index(d, r, i, s, Part::Re, 0), 2 * d);
                });
            }
            GridLayout::FreshPower => {
                for s in 1..=r {
                    let block = cos_sin_block(x, grid.points_for(i, s));
                    propagate_scales(ahat, block, 2 * d, s, |step, h| {
                        if step == s {
                            scatter_block(&mut z, h, column_index(d, r, i, s, Part::Re, 0), 2 * d);
                        }
                    });
                }
            }
        }
    }
    EmbeddingMatrix::new(z, features.names().to_vec(), d, r)
}

/// Characteristic function of `x` around node `u` at scale `r`, as `(Re, Im)`.
///
/// Computed by stepping the walk distribution from the indicator of `u`, an
/// evaluation path independent of [`feather_embed`].
pub fn node_charfunc(
    ahat: &RowStochasticMatrix,
    x: &[f64],
    u: usize,
    theta: f64,
    r: usize,
) -> Result<(f64, f64)> {
    let n = ahat.num_nodes();
    if u >= n {
        return Err(FeatherError::IndexOutOfRange {
            index: u,
            num_nodes: n,
        });
    }
    if x.len() != n {
        return Err(FeatherError::ShapeMismatch(format!(
            "feature has {} values, graph has {n} nodes",
            x.len()
        )));
    }
    if r == 0 {
        return Err(FeatherError::InvalidParameter(
            "scale must be at least 1".into(),
        ));
    }
    let mut dist = vec![0.0; n];
    dist[u] = 1.0;
    for _ in 0..r {
        dist = ahat.step_distribution(&dist);
    }
    let (mut re, mut im) = (0.0, 0.0);
    for (&p, &xw) in dist.iter().zip(x) {
        if p != 0.0 {
            re += p * (theta * xw).cos();
            im += p * (theta * xw).sin();
        }
    }
    Ok((re, im))
}

/// `Âʳ` by naive dense repeated multiplication.
pub fn dense_power_oracle(ahat: &RowStochasticMatrix, r: usize) -> Result<Vec<Vec<f64>>> {
    let n = ahat.num_nodes();
    if n > ORACLE_MAX_NODES {
        return Err(FeatherError::OracleSizeExceeded {
            num_nodes: n,
            max: ORACLE_MAX_NODES,
        });
    }
    if r == 0 {
        return Err(FeatherError::InvalidParameter(
            "scale must be at least 1".into(),
        ));
    }
    let base = ahat.to_dense();
    let mut power = base.clone();
    for _ in 1..r {
        let mut next = vec![vec![0.0; n]; n];
        for (a, out) in power.iter().zip(next.iter_mut()) {
            for (l, &alk) in a.iter().enumerate() {
                if alk == 0.0 {
                    continue;
                }
                for (o, &b) in out.iter_mut().zip(&base[l]) {
                    *o += alk * b;
                }
            }
        }
        power = next;
    }
    Ok(power)
}

/// Effect of perturbing the feature of one node on every node's characteristic function.
#[derive(Debug, Clone, PartialEq)]
pub struct CorruptionReport {
    pub delta_re: Vec<f64>,
    pub delta_im: Vec<f64>,
    /// `2 · Âʳ_{u,w}` for every source `u`.
    pub bound: Vec<f64>,
}

impl CorruptionReport {
    pub fn max_delta_re(&self) -> f64 {
        self.delta_re.iter().copied().fold(0.0, f64::max)
    }

    pub fn max_delta_im(&self) -> f64 {
        self.delta_im.iter().copied().fold(0.0, f64::max)
    }

    /// Whether every delta is within its bound plus `slack`.
    pub fn holds(&self, slack: f64) -> bool {
        self.delta_re
            .iter()
            .zip(&self.delta_im)
            .zip(&self.bound)
            .all(|((&re, &im), &b)| re <= b + slack && im <= b + slack)
    }

    /// Smallest gap between bound and the larger delta, over all nodes.
    pub fn tightest_gap(&self) -> f64 {
        self.delta_re
            .iter()
            .zip(&self.delta_im)
            .zip(&self.bound)
            .map(|((&re, &im), &b)| b - re.max(im))
            .fold(f64::INFINITY, f64::min)
    }
}

/// Compares the scale-`r` characteristic function of `x` with that of `x`
/// shifted by `epsilon` at node `w`, together with the bound `2 · Âʳ_{u,w}`.
pub fn corruption_delta(
    ahat: &RowStochasticMatrix,
    x: &[f64],
    w: usize,
    epsilon: f64,
    theta: f64,
    r: usize,
) -> Result<CorruptionReport> {
    let n = ahat.num_nodes();
    if w >= n {
        return Err(FeatherError::IndexOutOfRange {
            index: w,
            num_nodes: n,
        });
    }
    if x.len() != n {
        return Err(FeatherError::ShapeMismatch(format!(
            "feature has {} values, graph has {n} nodes",
            x.len()
        )));
    }
    if r == 0 {
        return Err(FeatherError::InvalidParameter(
            "scale must be at least 1".into(),
        ));
    }
    let mut corrupted = x.to_vec();
    corrupted[w] += epsilon;

    let evaluate = |values: &[f64]| {
        let mut out = (vec![0.0; n], vec![0.0; n]);
        let block = cos_sin_block(values, &[theta]);
        propagate_scales(ahat, block, 2, r, |s, h| {
            if s == r {
                for (u, pair) in h.chunks(2).enumerate() {
                    out.0[u] = pair[0];
                    out.1[u] = pair[1];
                }
            }
        });
        out
    };
    let (re, im) = evaluate(x);
    let (re_c, im_c) = evaluate(&corrupted);

    let mut column = vec![0.0; n];
    column[w] = 1.0;
    for _ in 0..r {
        column = ahat.propagate(&column);
    }

    Ok(CorruptionReport {
        delta_re: re.iter().zip(&re_c).map(|(a, b)| (a - b).abs()).collect(),
        delta_im: im.iter().zip(&im_c).map(|(a, b)| (a - b).abs()).collect(),
        bound: column.into_iter().map(|p| 2.0 * p).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Graph;

    fn triangle() -> RowStochasticMatrix {
        Graph::from_edge_list([(0, 1, None), (1, 2, None), (0, 2, None)], None)
            .unwrap()
            .normalize()
    }

    fn path2() -> RowStochasticMatrix {
        Graph::from_edge_list([(0, 1, None)], None)
            .unwrap()
            .normalize()
    }

    #[test]
    fn grid_dimensions_and_domain() {
        let g = EvaluationGrid::random(1, 16, 2, 0.0, 5.0, 1).unwrap();
        assert_eq!(g.vectors().len(), 1);
        assert!(g.points_for(0, 1).iter().all(|&t| (0.0..5.0).contains(&t)));
        assert_eq!(g.width(), 64);
        let h = EvaluationGrid::random(1, 25, 5, 0.0, 5.0, 1).unwrap();
        assert_eq!((h.d(), h.r()), (25, 5));
        assert_eq!(g, EvaluationGrid::random(1, 16, 2, 0.0, 5.0, 1).unwrap());
        assert!(matches!(
            EvaluationGrid::random(1, 4, 1, 5.0, 5.0, 0),
            Err(FeatherError::InvalidDomain { .. })
        ));
    }

    #[test]
    fn fresh_power_grid_holds_one_vector_per_scale() {
        let g = EvaluationGrid::random_with_layout(2, 3, 4, 0.0, 5.0, 9, GridLayout::FreshPower)
            .unwrap();
        assert_eq!(g.k(), 2);
        assert_eq!(g.vectors().len(), 8);
        assert_ne!(g.points_for(1, 1), g.points_for(1, 2));
    }

    #[test]
    fn theta_zero_gives_unit_real_part() {
        let a = triangle();
        assert_eq!(
            node_charfunc(&a, &[0.3, 7.0, -2.0], 1, 0.0, 3).unwrap(),
            (1.0, 0.0)
        );
    }

    #[test]
    fn path_single_target() {
        let (re, im) =
            node_charfunc(&path2(), &[0.0, std::f64::consts::FRAC_PI_2], 0, 1.0, 1).unwrap();
        assert!(re.abs() < 1e-15);
        assert_eq!(im, 1.0);
    }

    #[test]
    fn triangle_second_scale() {
        let (re, _) = node_charfunc(&triangle(), &[0.0, 1.0, 2.0], 0, 1.0, 2).unwrap();
        let expected = 0.5 + 0.25 * 1f64.cos() + 0.25 * 2f64.cos();
        assert!((re - expected).abs() < 1e-15);
        assert!((re - 0.5310).abs() < 1e-4);
    }

    #[test]
    fn node_charfunc_rejects_bad_node() {
        assert!(matches!(
            node_charfunc(&path2(), &[0.0, 0.0], 2, 1.0, 1),
            Err(FeatherError::IndexOutOfRange { index: 2, .. })
        ));
    }

    #[test]
    fn embedding_width_and_zero_grid() {
        let g = crate::graph::erdos_renyi(30, 2, 4).unwrap();
        let f = FeatureSet::single("deg", crate::graph::log_degree_feature(&g)).unwrap();
        let grid = EvaluationGrid::random(1, 16, 2, 0.0, 5.0, 0).unwrap();
        let z = feather_embed(&g.normalize(), &f, &grid).unwrap();
        assert_eq!(z.width(), 64);

        let zero = EvaluationGrid::constant(1, 4, 3, 0.0).unwrap();
        let z = feather_embed(&g.normalize(), &f, &zero).unwrap();
        for u in 0..30 {
            for s in 1..=3 {
                for j in 0..4 {
                    assert_eq!(z.get(u, 0, s, Part::Re, j), 1.0);
                    assert_eq!(z.get(u, 0, s, Part::Im, j), 0.0);
                }
            }
        }
    }

    #[test]
    fn embedding_matches_node_charfunc() {
        let g = crate::graph::erdos_renyi(25, 2, 11).unwrap();
        let a = g.normalize();
        let x = crate::graph::clustering_coefficient_feature(&g);
        let y = crate::graph::log_degree_feature(&g);
        let f = FeatureSet::new(vec!["c".into(), "l".into()], vec![x, y]).unwrap();
        for layout in [GridLayout::Shared, GridLayout::FreshPower] {
            let grid = EvaluationGrid::random_with_layout(2, 3, 3, -5.0, 5.0, 2, layout).unwrap();
            let z = feather_embed(&a, &f, &grid).unwrap();
            for i in 0..2 {
                for s in 1..=3 {
                    for (j, &t) in grid.points_for(i, s).iter().enumerate() {
                        for u in 0..25 {
                            let (re, im) = node_charfunc(&a, f.feature(i), u, t, s).unwrap();
                            assert!((z.get(u, i, s, Part::Re, j) - re).abs() < 1e-12);
                            assert!((z.get(u, i, s, Part::Im, j) - im).abs() < 1e-12);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn shape_mismatch_is_reported() {
        let a = triangle();
        let f = FeatureSet::single("x", vec![0.0; 4]).unwrap();
        let grid = EvaluationGrid::constant(1, 2, 1, 1.0).unwrap();
        assert!(matches!(
            feather_embed(&a, &f, &grid),
            Err(FeatherError::ShapeMismatch(_))
        ));
        let f = FeatureSet::single("x", vec![0.0; 3]).unwrap();
        let grid = EvaluationGrid::constant(2, 2, 1, 1.0).unwrap();
        assert!(matches!(
            feather_embed(&a, &f, &grid),
            Err(FeatherError::ShapeMismatch(_))
        ));
    }

    #[test]
    fn dense_oracle_triangle() {
        let a = triangle();
        assert_eq!(dense_power_oracle(&a, 1).unwrap(), a.to_dense());
        let p2 = dense_power_oracle(&a, 2).unwrap();
        assert_eq!(p2[0], vec![0.5, 0.25, 0.25]);
        assert_eq!(p2[1], vec![0.25, 0.5, 0.25]);
    }

    #[test]
    fn dense_oracle_size_guard() {
        let g = Graph::from_edge_list([(0, 1, None)], Some(ORACLE_MAX_NODES + 1)).unwrap();
        assert!(matches!(
            dense_power_oracle(&g.normalize(), 2),
            Err(FeatherError::OracleSizeExceeded { .. })
        ));
    }

    #[test]
    fn corruption_zero_epsilon() {
        let a = triangle();
        let rep = corruption_delta(&a, &[1.0, 2.0, 3.0], 1, 0.0, 1.3, 2).unwrap();
        assert_eq!(rep.max_delta_re(), 0.0);
        assert_eq!(rep.max_delta_im(), 0.0);
    }

    #[test]
    fn corruption_bound_is_tight_on_path() {
        let rep = corruption_delta(&path2(), &[0.0, 0.0], 1, std::f64::consts::PI, 1.0, 1).unwrap();
        assert_eq!(rep.delta_re[0], 2.0);
        assert_eq!(rep.bound[0], 2.0);
        assert!(rep.holds(1e-12));
    }

    #[test]
    fn corruption_bound_survives_huge_epsilon() {
        let g = crate::graph::erdos_renyi(40, 3, 5).unwrap();
        let a = g.normalize();
        let x = crate::graph::log_degree_feature(&g);
        for w in 0..40 {
            let rep = corruption_delta(&a, &x, w, 1e6, 2.7, 3).unwrap();
            assert!(rep.holds(1e-12));
        }
    }

    #[test]
    fn column_names_follow_layout() {
        let names = column_names(&["deg".into()], 2, 2);
        assert_eq!(
            names,
            [
                "deg_s1_re_0",
                "deg_s1_re_1",
                "deg_s1_im_0",
                "deg_s1_im_1",
                "deg_s2_re_0",
                "deg_s2_re_1",
                "deg_s2_im_0",
                "deg_s2_im_1"
            ]
        );
        assert_eq!(column_index(2, 2, 0, 2, Part::Im, 1), 7);
    }
}
