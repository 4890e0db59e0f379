//! Random forest of CART trees with Gini impurity.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Deserialize;

use crate::corpus::ClassLabel;
use crate::error::LearnError;
use crate::rng;
use crate::scalar::Scalar;

use super::check_xy;

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default)]
pub struct ForestConfig {
    pub n_trees: usize,
    /// Candidate features per split; `None` means `ceil(sqrt(d))`.
    pub features_per_split: Option<usize>,
    pub min_leaf: usize,
    pub max_depth: Option<usize>,
    pub bootstrap: bool,
    pub seed: u64,
}

impl Default for ForestConfig {
    fn default() -> Self {
        Self { n_trees: 100, features_per_split: None, min_leaf: 1, max_depth: None, bootstrap: true, seed: 42 }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Node<T> {
    Leaf { counts: [usize; 2] },
    Split { feature: usize, threshold: T, left: usize, right: usize },
}

/// Majority class of a count pair; ties go to FR.
fn majority(counts: [usize; 2]) -> ClassLabel {
    if counts[1] > counts[0] {
        ClassLabel::TR
    } else {
        ClassLabel::FR
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Tree<T> {
    nodes: Vec<Node<T>>,
}

impl<T: Scalar> Tree<T> {
    /// Class counts of the leaf reached by `row`.
    pub fn leaf_counts(&self, row: &[T]) -> [usize; 2] {
        let mut i = 0;
        loop {
            match &self.nodes[i] {
                Node::Leaf { counts } => return *counts,
                Node::Split { feature, threshold, left, right } => {
                    i = if row[*feature] <= *threshold { *left } else { *right };
                }
            }
        }
    }

    pub fn predict(&self, row: &[T]) -> ClassLabel {
        majority(self.leaf_counts(row))
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Forest<T> {
    pub trees: Vec<Tree<T>>,
    pub n_features: usize,
    /// Set when the training labels had a single class; every prediction
    /// is then that class.
    pub degenerate: Option<ClassLabel>,
}

impl<T: Scalar> Forest<T> {
    /// Votes per class over all trees.
    pub fn votes(&self, row: &[T]) -> [usize; 2] {
        let mut v = [0; 2];
        for t in &self.trees {
            v[t.predict(row).code()] += 1;
        }
        v
    }

    pub fn tree_predictions(&self, row: &[T]) -> Vec<ClassLabel> {
        self.trees.iter().map(|t| t.predict(row)).collect()
    }

    /// Majority vote of the trees; ties go to FR.
    pub fn predict(&self, row: &[T]) -> ClassLabel {
        match self.degenerate {
            Some(c) => c,
            None => majority(self.votes(row)),
        }
    }
}

fn gini(c: [usize; 2]) -> f64 {
    let n = (c[0] + c[1]) as f64;
    if n == 0.0 {
        return 0.0;
    }
    let (p0, p1) = (c[0] as f64 / n, c[1] as f64 / n);
    1.0 - p0 * p0 - p1 * p1
}

struct Builder<'a, T> {
    x: &'a [Vec<T>],
    y: &'a [usize],
    mtry: usize,
    min_leaf: usize,
    max_depth: usize,
    nodes: Vec<Node<T>>,
}

struct Candidate<T> {
    impurity: f64,
    feature: usize,
    threshold: T,
}

impl<T: Scalar> Builder<'_, T> {
    fn counts(&self, idx: &[usize]) -> [usize; 2] {
        let mut c = [0; 2];
        for &i in idx {
            c[self.y[i]] += 1;
        }
        c
    }

    /// Best threshold on one feature, scored by weighted child Gini.
    fn best_on_feature(&self, idx: &mut [usize], feature: usize, total: [usize; 2]) -> Option<Candidate<T>> {
        let x = self.x;
        idx.sort_by(|&a, &b| x[a][feature].partial_cmp(&x[b][feature]).expect("finite features"));
        let n = idx.len();
        let mut left = [0usize; 2];
        let mut best: Option<Candidate<T>> = None;
        for pos in 0..n - 1 {
            left[self.y[idx[pos]]] += 1;
            let (lo, hi) = (x[idx[pos]][feature], x[idx[pos + 1]][feature]);
            let n_left = pos + 1;
            if lo == hi || n_left < self.min_leaf || n - n_left < self.min_leaf {
                continue;
            }
            let right = [total[0] - left[0], total[1] - left[1]];
            let imp = (n_left as f64 * gini(left) + (n - n_left) as f64 * gini(right)) / n as f64;
            if best.as_ref().is_none_or(|b| imp < b.impurity) {
                let mut threshold = (lo + hi) * T::of(0.5);
                if threshold >= hi {
                    threshold = lo;
                }
                best = Some(Candidate { impurity: imp, feature, threshold });
            }
        }
        best
    }

    fn build(&mut self, idx: &mut [usize], depth: usize, order: &mut [usize], r: &mut ChaCha8Rng) -> usize {
        let counts = self.counts(idx);
        let id = self.nodes.len();
        self.nodes.push(Node::Leaf { counts });
        if counts[0] == 0 || counts[1] == 0 || depth >= self.max_depth || idx.len() < 2 * self.min_leaf {
            return id;
        }
        order.shuffle(r);
        let mut best: Option<Candidate<T>> = None;
        for (tried, &f) in order.iter().enumerate() {
            if tried >= self.mtry && best.is_some() {
                break;
            }
            if let Some(c) = self.best_on_feature(idx, f, counts) {
                if best.as_ref().is_none_or(|b| c.impurity < b.impurity) {
                    best = Some(c);
                }
            }
        }
        let Some(split) = best else { return id };
        let (feature, threshold) = (split.feature, split.threshold);
        let x = self.x;
        idx.sort_by(|&a, &b| x[a][feature].partial_cmp(&x[b][feature]).expect("finite features"));
        let cut = idx.partition_point(|&i| x[i][feature] <= threshold);
        let (l, rgt) = idx.split_at_mut(cut);
        let left = self.build(l, depth + 1, order, r);
        let right = self.build(rgt, depth + 1, order, r);
        self.nodes[id] = Node::Split { feature, threshold, left, right };
        id
    }
}

fn train_tree<T: Scalar>(x: &[Vec<T>], y: &[usize], cfg: &ForestConfig, mtry: usize, tree: u64) -> Tree<T> {
    let mut r = rng::stream(cfg.seed, "rf-tree", tree);
    let n = x.len();
    let mut idx: Vec<usize> =
        if cfg.bootstrap { (0..n).map(|_| r.gen_range(0..n)).collect() } else { (0..n).collect() };
    let mut order: Vec<usize> = (0..x[0].len()).collect();
    let mut b = Builder {
        x,
        y,
        mtry,
        min_leaf: cfg.min_leaf.max(1),
        max_depth: cfg.max_depth.unwrap_or(usize::MAX),
        nodes: Vec::new(),
    };
    b.build(&mut idx, 0, &mut order, &mut r);
    Tree { nodes: b.nodes }
}

/// Trains a forest. Trees are grown in parallel from per-tree random
/// streams, so the result does not depend on thread count.
pub fn rf_train<T: Scalar>(x: &[Vec<T>], y: &[ClassLabel], cfg: &ForestConfig) -> Result<Forest<T>, LearnError> {
    let d = check_xy(x, y)?;
    if cfg.n_trees == 0 {
        return Err(LearnError::Config("n_trees must be positive".into()));
    }
    if d == 0 {
        return Err(LearnError::Dimension { expected: 1, found: 0 });
    }
    if y.iter().all(|&l| l == y[0]) {
        return Ok(Forest { trees: Vec::new(), n_features: d, degenerate: Some(y[0]) });
    }
    let mtry = cfg.features_per_split.unwrap_or_else(|| (d as f64).sqrt().ceil() as usize).clamp(1, d);
    let codes: Vec<usize> = y.iter().map(|l| l.code()).collect();
    let trees = (0..cfg.n_trees as u64).into_par_iter().map(|t| train_tree(x, &codes, cfg, mtry, t)).collect();
    Ok(Forest { trees, n_features: d, degenerate: None })
}

pub fn rf_predict<T: Scalar>(forest: &Forest<T>, row: &[T]) -> ClassLabel {
    forest.predict(row)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    fn threshold_data(n: usize, seed: u64) -> (Vec<Vec<f64>>, Vec<ClassLabel>) {
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        let x: Vec<Vec<f64>> = (0..n).map(|_| (0..41).map(|_| r.gen::<f64>()).collect()).collect();
        let y = x.iter().map(|row| if row[1] > 0.5 { ClassLabel::TR } else { ClassLabel::FR }).collect();
        (x, y)
    }

    #[test]
    fn learns_threshold_rule() {
        let (x, y) = threshold_data(300, 1);
        let (tx, ty) = threshold_data(300, 2);
        let f = rf_train(&x, &y, &ForestConfig::default()).unwrap();
        let acc = tx.iter().zip(&ty).filter(|(r, l)| f.predict(r) == **l).count() as f64 / 300.0;
        assert!(acc >= 0.95, "{acc}");
    }

    #[test]
    fn single_tree_memorizes() {
        let (x, y) = threshold_data(50, 3);
        let cfg = ForestConfig { n_trees: 1, bootstrap: false, ..Default::default() };
        let f = rf_train(&x, &y, &cfg).unwrap();
        for (r, l) in x.iter().zip(&y) {
            assert_eq!(f.predict(r), *l);
        }
    }

    #[test]
    fn tie_goes_to_fr() {
        assert_eq!(majority([2, 2]), ClassLabel::FR);
        let leaf = |c: [usize; 2]| Tree { nodes: vec![Node::Leaf { counts: c }] };
        let f = Forest { trees: vec![leaf([0, 3]), leaf([5, 1])], n_features: 1, degenerate: None };
        assert_eq!(f.predict(&[0.0]), ClassLabel::FR);
    }

    #[test]
    fn vote_matches_tally() {
        let (x, y) = threshold_data(80, 4);
        let f = rf_train(&x, &y, &ForestConfig { n_trees: 9, ..Default::default() }).unwrap();
        let (tx, _) = threshold_data(40, 5);
        for r in &tx {
            let preds = f.tree_predictions(r);
            let tr = preds.iter().filter(|p| **p == ClassLabel::TR).count();
            let want = if tr > preds.len() - tr { ClassLabel::TR } else { ClassLabel::FR };
            assert_eq!(f.predict(r), want);
        }
    }

    #[test]
    fn single_class_is_degenerate() {
        let x = vec![vec![0.1], vec![0.2]];
        let f = rf_train(&x, &[ClassLabel::TR; 2], &ForestConfig::default()).unwrap();
        assert_eq!(f.degenerate, Some(ClassLabel::TR));
        assert_eq!(f.predict(&[9.0]), ClassLabel::TR);
    }

    #[test]
    fn deterministic_and_thread_independent() {
        let (x, y) = threshold_data(100, 6);
        let cfg = ForestConfig { n_trees: 20, ..Default::default() };
        let a = rf_train(&x, &y, &cfg).unwrap();
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let b = pool.install(|| rf_train(&x, &y, &cfg).unwrap());
        assert_eq!(a, b);
    }

    #[test]
    fn depth_and_leaf_limits() {
        let (x, y) = threshold_data(100, 7);
        let stump = rf_train(&x, &y, &ForestConfig { n_trees: 1, max_depth: Some(1), ..Default::default() }).unwrap();
        assert!(stump.trees[0].node_count() <= 3);
        let big_leaf = ForestConfig { n_trees: 1, min_leaf: 60, bootstrap: false, ..Default::default() };
        assert_eq!(rf_train(&x, &y, &big_leaf).unwrap().trees[0].node_count(), 1);
    }
}
