//! CART trees grown greedily over presorted columns.
//!
//! Every feature is sorted once per training matrix ([`ColumnStore`]); each
//! node keeps one sorted row list per feature and splits partition those
//! lists stably, so a level costs `O(n·d)` rather than a sort per node.
//!
//! Candidate thresholds are midpoints between consecutive distinct values.
//! Splits maximise the impurity decrease; among equal decreases the lower
//! feature index and then the lower threshold win. An impure node is split
//! even when the best decrease is zero (XOR-like data needs that), so an
//! unbounded tree separates any data without conflicting duplicates.

use ndarray::{Array2, ArrayView2, Axis};
use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::flowdata::FeatureMatrix;
use crate::{seed, Classifier, Error, Model, Result};

/// Number of features examined per split.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum MaxFeatures {
    #[default]
    All,
    /// `ceil(sqrt(d))`
    Sqrt,
    Count(usize),
}

impl MaxFeatures {
    pub fn resolve(self, d: usize) -> usize {
        match self {
            MaxFeatures::All => d,
            MaxFeatures::Sqrt => ((d as f64).sqrt().ceil() as usize).clamp(1, d),
            MaxFeatures::Count(k) => k.clamp(1, d),
        }
    }
}

/// Decision-tree hyperparameters (CART, Gini criterion).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TreeConfig {
    /// `None` grows until leaves are pure.
    pub max_depth: Option<usize>,
    pub min_samples_split: usize,
    pub max_features: MaxFeatures,
    /// Only used when `max_features` samples a subset.
    pub seed: u64,
}

impl Default for TreeConfig {
    fn default() -> Self {
        TreeConfig { max_depth: None, min_samples_split: 2, max_features: MaxFeatures::All, seed: 0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Node<L> {
    Split { feature: usize, threshold: f64, left: usize, right: usize },
    Leaf { value: L },
}

/// Classification node: leaves hold (weighted) class histograms.
pub type TreeNode = Node<Vec<f64>>;

/// Column-major copy of a feature block plus per-feature sort orders.
pub(crate) struct ColumnStore {
    cols: Vec<Vec<f64>>,
    sorted: Vec<Vec<u32>>,
}

impl ColumnStore {
    pub(crate) fn new(x: ArrayView2<'_, f64>) -> Self {
        let cols: Vec<Vec<f64>> = x.axis_iter(Axis(1)).map(|c| c.to_vec()).collect();
        let sorted = cols
            .iter()
            .map(|c| {
                let mut idx: Vec<u32> = (0..c.len() as u32).collect();
                idx.sort_unstable_by(|&a, &b| c[a as usize].total_cmp(&c[b as usize]).then(a.cmp(&b)));
                idx
            })
            .collect();
        ColumnStore { cols, sorted }
    }

    pub(crate) fn n_rows(&self) -> usize {
        self.cols.first().map_or(0, Vec::len)
    }

    pub(crate) fn n_features(&self) -> usize {
        self.cols.len()
    }
}

pub(crate) struct GrowParams {
    pub max_depth: Option<usize>,
    pub min_samples_split: usize,
    pub max_features: usize,
    pub seed: u64,
}

/// Node statistics for one kind of target.
pub(crate) trait Target {
    type Stats: Clone;
    type Leaf;
    fn empty(&self) -> Self::Stats;
    fn add(&self, s: &mut Self::Stats, row: usize, w: f64);
    /// Split quality: larger is better, additive over the two children.
    fn split_score(&self, parent: &Self::Stats, left: &Self::Stats) -> f64;
    fn is_pure(&self, s: &Self::Stats) -> bool;
    fn leaf(&self, s: &Self::Stats) -> Self::Leaf;
}

/// Gini impurity over weighted class counts. Maximising
/// `sum_c wL_c^2 / WL + sum_c wR_c^2 / WR` is equivalent to maximising the
/// weighted Gini decrease.
pub(crate) struct GiniTarget<'a> {
    pub y: &'a [usize],
    pub n_classes: usize,
}

#[derive(Clone)]
pub(crate) struct ClassStats {
    w: Vec<f64>,
    total: f64,
}

impl Target for GiniTarget<'_> {
    type Stats = ClassStats;
    type Leaf = Vec<f64>;

    fn empty(&self) -> ClassStats {
        ClassStats { w: vec![0.0; self.n_classes], total: 0.0 }
    }

    fn add(&self, s: &mut ClassStats, row: usize, w: f64) {
        s.w[self.y[row]] += w;
        s.total += w;
    }

    fn split_score(&self, parent: &ClassStats, left: &ClassStats) -> f64 {
        let wr = parent.total - left.total;
        let mut sl = 0.0;
        let mut sr = 0.0;
        for (p, l) in parent.w.iter().zip(&left.w) {
            sl += l * l;
            let r = p - l;
            sr += r * r;
        }
        let a = if left.total > 0.0 { sl / left.total } else { 0.0 };
        let b = if wr > 0.0 { sr / wr } else { 0.0 };
        a + b
    }

    fn is_pure(&self, s: &ClassStats) -> bool {
        s.w.iter().filter(|&&w| w > 0.0).count() <= 1
    }

    fn leaf(&self, s: &ClassStats) -> Vec<f64> {
        s.w.clone()
    }
}

/// Squared-error regression with an optional L2 shrinkage on leaf values:
/// leaf = sum / (count + lambda).
pub(crate) struct SquaredErrorTarget<'a> {
    pub values: &'a [f64],
    pub lambda: f64,
}

#[derive(Clone)]
pub(crate) struct SumStats {
    sum: f64,
    sum_sq: f64,
    weight: f64,
}

impl Target for SquaredErrorTarget<'_> {
    type Stats = SumStats;
    type Leaf = f64;

    fn empty(&self) -> SumStats {
        SumStats { sum: 0.0, sum_sq: 0.0, weight: 0.0 }
    }

    fn add(&self, s: &mut SumStats, row: usize, w: f64) {
        let v = self.values[row];
        s.sum += w * v;
        s.sum_sq += w * v * v;
        s.weight += w;
    }

    fn split_score(&self, parent: &SumStats, left: &SumStats) -> f64 {
        let rs = parent.sum - left.sum;
        let rw = parent.weight - left.weight;
        left.sum * left.sum / (left.weight + self.lambda) + rs * rs / (rw + self.lambda)
    }

    fn is_pure(&self, s: &SumStats) -> bool {
        if s.weight <= 0.0 {
            return true;
        }
        let mean = s.sum / s.weight;
        s.sum_sq / s.weight - mean * mean <= 1e-18
    }

    fn leaf(&self, s: &SumStats) -> f64 {
        if s.weight + self.lambda > 0.0 {
            s.sum / (s.weight + self.lambda)
        } else {
            0.0
        }
    }
}

struct Pending<S> {
    id: usize,
    depth: usize,
    lists: Vec<Vec<u32>>,
    stats: S,
}

fn midpoint(a: f64, b: f64) -> f64 {
    let m = a + (b - a) * 0.5;
    if m >= b || m < a {
        a
    } else {
        m
    }
}

/// Grows one tree over the rows with positive weight.
pub(crate) fn grow<T: Target>(
    store: &ColumnStore,
    target: &T,
    weights: &[f64],
    params: &GrowParams,
) -> Vec<Node<T::Leaf>> {
    let d = store.n_features();
    let mut rng = seed::rng(params.seed);
    let mut feature_order: Vec<usize> = (0..d).collect();
    let mut go_left = vec![false; store.n_rows()];

    let root_lists: Vec<Vec<u32>> = store
        .sorted
        .iter()
        .map(|s| s.iter().copied().filter(|&r| weights[r as usize] > 0.0).collect())
        .collect();
    let mut root_stats = target.empty();
    for &r in &root_lists[0] {
        target.add(&mut root_stats, r as usize, weights[r as usize]);
    }

    let mut nodes: Vec<Option<Node<T::Leaf>>> = vec![None];
    let mut stack = vec![Pending { id: 0, depth: 0, lists: root_lists, stats: root_stats }];

    while let Some(p) = stack.pop() {
        let n_rows = p.lists[0].len();
        let stop = n_rows < params.min_samples_split
            || params.max_depth.is_some_and(|m| p.depth >= m)
            || target.is_pure(&p.stats);
        let best = if stop {
            None
        } else {
            best_split(store, target, weights, params, &p, &mut feature_order, &mut rng)
        };
        let Some((feature, threshold)) = best else {
            nodes[p.id] = Some(Node::Leaf { value: target.leaf(&p.stats) });
            continue;
        };

        let col = &store.cols[feature];
        for &r in &p.lists[0] {
            go_left[r as usize] = col[r as usize] <= threshold;
        }
        let mut left_lists = Vec::with_capacity(d);
        let mut right_lists = Vec::with_capacity(d);
        for list in &p.lists {
            let (l, r): (Vec<u32>, Vec<u32>) = list.iter().partition(|&&r| go_left[r as usize]);
            left_lists.push(l);
            right_lists.push(r);
        }
        let mut ls = target.empty();
        let mut rs = target.empty();
        for &r in &left_lists[0] {
            target.add(&mut ls, r as usize, weights[r as usize]);
        }
        for &r in &right_lists[0] {
            target.add(&mut rs, r as usize, weights[r as usize]);
        }

        let left = nodes.len();
        let right = left + 1;
        nodes.push(None);
        nodes.push(None);
        nodes[p.id] = Some(Node::Split { feature, threshold, left, right });
        stack.push(Pending { id: right, depth: p.depth + 1, lists: right_lists, stats: rs });
        stack.push(Pending { id: left, depth: p.depth + 1, lists: left_lists, stats: ls });
    }

    nodes.into_iter().map(|n| n.expect("every node resolved")).collect()
}

fn best_split<T: Target>(
    store: &ColumnStore,
    target: &T,
    weights: &[f64],
    params: &GrowParams,
    p: &Pending<T::Stats>,
    feature_order: &mut [usize],
    rng: &mut rand_chacha::ChaCha8Rng,
) -> Option<(usize, f64)> {
    let d = store.n_features();
    let non_constant = |f: usize| {
        let list = &p.lists[f];
        let col = &store.cols[f];
        col[list[0] as usize] < col[list[list.len() - 1] as usize]
    };
    let mut candidates: Vec<usize> = if params.max_features >= d {
        (0..d).filter(|&f| non_constant(f)).collect()
    } else {
        feature_order.shuffle(rng);
        feature_order
            .iter()
            .copied()
            .filter(|&f| non_constant(f))
            .take(params.max_features)
            .collect()
    };
    candidates.sort_unstable();

    let mut best: Option<(usize, f64)> = None;
    let mut best_score = f64::NEG_INFINITY;
    for f in candidates {
        let list = &p.lists[f];
        let col = &store.cols[f];
        let mut left = target.empty();
        for i in 0..list.len() - 1 {
            let r = list[i] as usize;
            target.add(&mut left, r, weights[r]);
            let v = col[r];
            let next = col[list[i + 1] as usize];
            if v == next {
                continue;
            }
            let s = target.split_score(&p.stats, &left);
            if s > best_score {
                best_score = s;
                best = Some((f, midpoint(v, next)));
            }
        }
    }
    best
}

fn descend<L>(nodes: &[Node<L>], row: ndarray::ArrayView1<'_, f64>) -> usize {
    let mut i = 0;
    loop {
        match &nodes[i] {
            Node::Split { feature, threshold, left, right } => {
                i = if row[*feature] <= *threshold { *left } else { *right };
            }
            Node::Leaf { .. } => return i,
        }
    }
}

fn depth_of<L>(nodes: &[Node<L>]) -> usize {
    let mut best = 0;
    let mut stack = vec![(0usize, 0usize)];
    while let Some((i, depth)) = stack.pop() {
        best = best.max(depth);
        if let Node::Split { left, right, .. } = &nodes[i] {
            stack.push((*left, depth + 1));
            stack.push((*right, depth + 1));
        }
    }
    best
}

/// CART classification tree.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionTree {
    pub nodes: Vec<TreeNode>,
    pub n_features: usize,
    pub n_classes: usize,
}

impl DecisionTree {
    pub fn fit(train: &FeatureMatrix, cfg: &TreeConfig) -> Result<Self> {
        let weights = vec![1.0; train.n_samples()];
        Self::fit_weighted(train, &weights, cfg)
    }

    /// Weighted fit; rows with zero weight are ignored.
    pub fn fit_weighted(train: &FeatureMatrix, weights: &[f64], cfg: &TreeConfig) -> Result<Self> {
        let store = ColumnStore::new(train.x());
        Self::fit_on_store(&store, train.y(), train.n_classes(), weights, cfg)
    }

    pub(crate) fn fit_on_store(
        store: &ColumnStore,
        y: &[usize],
        n_classes: usize,
        weights: &[f64],
        cfg: &TreeConfig,
    ) -> Result<Self> {
        if cfg.min_samples_split < 2 {
            return Err(Error::Config("min_samples_split must be at least 2".into()));
        }
        if weights.len() != y.len() || weights.iter().any(|w| !(*w >= 0.0)) {
            return Err(Error::Dimension("sample weights must be non-negative, one per row".into()));
        }
        if !weights.iter().any(|&w| w > 0.0) {
            return Err(Error::Precondition("no rows with positive weight".into()));
        }
        let params = GrowParams {
            max_depth: cfg.max_depth,
            min_samples_split: cfg.min_samples_split,
            max_features: cfg.max_features.resolve(store.n_features()),
            seed: cfg.seed,
        };
        let nodes = grow(store, &GiniTarget { y, n_classes }, weights, &params);
        Ok(DecisionTree { nodes, n_features: store.n_features(), n_classes })
    }

    pub fn depth(&self) -> usize {
        depth_of(&self.nodes)
    }

    pub fn n_leaves(&self) -> usize {
        self.nodes.iter().filter(|n| matches!(n, Node::Leaf { .. })).count()
    }

    pub fn root(&self) -> &TreeNode {
        &self.nodes[0]
    }

    /// Raw leaf histogram reached by `row`.
    pub fn leaf_histogram(&self, row: ndarray::ArrayView1<'_, f64>) -> &[f64] {
        match &self.nodes[descend(&self.nodes, row)] {
            Node::Leaf { value } => value,
            Node::Split { .. } => unreachable!(),
        }
    }
}

impl Classifier for DecisionTree {
    fn n_classes(&self) -> usize {
        self.n_classes
    }

    fn n_features(&self) -> usize {
        self.n_features
    }

    fn predict_proba(&self, x: ArrayView2<'_, f64>) -> Result<Array2<f64>> {
        crate::model::check_width(self.n_features, x)?;
        let mut out = Array2::zeros((x.nrows(), self.n_classes));
        for (row, mut o) in x.outer_iter().zip(out.outer_iter_mut()) {
            let h = self.leaf_histogram(row);
            let total: f64 = h.iter().sum();
            for (dst, v) in o.iter_mut().zip(h) {
                *dst = v / total;
            }
        }
        Ok(out)
    }
}

/// Squared-error regression tree (gradient-boosting stage learner).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegressionTree {
    pub nodes: Vec<Node<f64>>,
    pub n_features: usize,
}

impl RegressionTree {
    pub(crate) fn fit_on_store(
        store: &ColumnStore,
        targets: &[f64],
        max_depth: Option<usize>,
        lambda: f64,
    ) -> Self {
        let weights = vec![1.0; targets.len()];
        let params = GrowParams { max_depth, min_samples_split: 2, max_features: store.n_features(), seed: 0 };
        let nodes = grow(store, &SquaredErrorTarget { values: targets, lambda }, &weights, &params);
        RegressionTree { nodes, n_features: store.n_features() }
    }

    pub fn predict_row(&self, row: ndarray::ArrayView1<'_, f64>) -> f64 {
        match &self.nodes[descend(&self.nodes, row)] {
            Node::Leaf { value } => *value,
            Node::Split { .. } => unreachable!(),
        }
    }

    pub fn depth(&self) -> usize {
        depth_of(&self.nodes)
    }
}

/// Fits an unweighted CART classifier.
pub fn fit_decision_tree(train: &FeatureMatrix, cfg: &TreeConfig) -> Result<Model> {
    Ok(Model::DecisionTree(DecisionTree::fit(train, cfg)?))
}
