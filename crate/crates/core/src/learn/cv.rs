//! Stratified k-fold cross-validation with pooled metrics.

use rand::seq::SliceRandom;
use serde::Serialize;

use crate::corpus::ClassLabel;
use crate::error::LearnError;
use crate::rng;
use crate::scalar::Scalar;

use super::forest::{rf_train, ForestConfig};
use super::linear::{train_linear, LinearConfig, Standardizer};
use super::metrics::Metrics;
use super::{check_xy, take};

/// Fold index of every row.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Folds {
    pub k: usize,
    pub assignment: Vec<usize>,
}

impl Folds {
    /// (training rows, test rows) of fold `f`.
    pub fn split(&self, f: usize) -> (Vec<usize>, Vec<usize>) {
        (0..self.assignment.len()).partition(|&i| self.assignment[i] != f)
    }
}

/// Assigns rows to `k` folds so each fold holds both classes in roughly
/// their overall proportion. Each class is shuffled, then dealt round-robin.
///
/// When a class has fewer than `k` rows, `k` drops to that class size and a
/// warning is returned.
pub fn stratified_folds(y: &[ClassLabel], k: usize, seed: u64) -> Result<(Folds, Option<String>), LearnError> {
    if k < 2 {
        return Err(LearnError::Config(format!("k must be at least 2, got {k}")));
    }
    if y.len() < k {
        return Err(LearnError::TooFewRows { needed: k, found: y.len() });
    }
    let by_class: Vec<Vec<usize>> =
        ClassLabel::BOTH.iter().map(|c| (0..y.len()).filter(|&i| y[i] == *c).collect()).collect();
    let smallest = by_class.iter().map(Vec::len).min().unwrap_or(0);
    if smallest == 0 {
        return Err(LearnError::SingleClass);
    }
    let mut warning = None;
    let mut k_used = k;
    if smallest < k {
        if smallest < 2 {
            return Err(LearnError::TooFewRows { needed: 2, found: smallest });
        }
        k_used = smallest;
        warning = Some(format!("a class has only {smallest} rows; using {smallest} folds instead of {k}"));
    }
    let mut assignment = vec![0; y.len()];
    let mut next = 0;
    for (c, members) in by_class.into_iter().enumerate() {
        let mut members = members;
        members.shuffle(&mut rng::stream(seed, "cv-folds", c as u64));
        for i in members {
            assignment[i] = next % k_used;
            next += 1;
        }
    }
    Ok((Folds { k: k_used, assignment }, warning))
}

#[derive(Debug, Clone, PartialEq)]
pub enum ModelKind {
    RandomForest(ForestConfig),
    Linear(LinearConfig),
}

#[derive(Debug, Clone, PartialEq)]
pub struct CvReport {
    pub metrics: Metrics,
    pub folds: Folds,
    /// Held-out prediction for every row.
    pub predictions: Vec<ClassLabel>,
    pub warnings: Vec<String>,
}

/// Runs stratified k-fold cross-validation and pools held-out predictions.
pub fn cross_validate<T: Scalar>(
    x: &[Vec<T>],
    y: &[ClassLabel],
    k: usize,
    model: &ModelKind,
    seed: u64,
) -> Result<CvReport, LearnError> {
    check_xy(x, y)?;
    let (folds, warning) = stratified_folds(y, k, rng::child_seed(seed, "cv-outer", 0))?;
    let mut report = cross_validate_with_folds(x, y, &folds, model, seed)?;
    report.warnings.extend(warning);
    Ok(report)
}

/// Cross-validation on a fixed fold assignment.
pub fn cross_validate_with_folds<T: Scalar>(
    x: &[Vec<T>],
    y: &[ClassLabel],
    folds: &Folds,
    model: &ModelKind,
    seed: u64,
) -> Result<CvReport, LearnError> {
    check_xy(x, y)?;
    if folds.assignment.len() != x.len() {
        return Err(LearnError::Dimension { expected: x.len(), found: folds.assignment.len() });
    }
    let mut predictions = vec![ClassLabel::FR; x.len()];
    let mut warnings = Vec::new();
    for f in 0..folds.k {
        let (train, test) = folds.split(f);
        if test.is_empty() {
            continue;
        }
        let (tx, ty) = (take(x, &train), take(y, &train));
        let test_x = take(x, &test);
        let preds: Vec<ClassLabel> = match model {
            ModelKind::RandomForest(cfg) => {
                let cfg = ForestConfig { seed: rng::child_seed(seed, "cv-forest", f as u64), ..cfg.clone() };
                let forest = rf_train(&tx, &ty, &cfg)?;
                if let Some(c) = forest.degenerate {
                    warnings.push(format!("fold {f}: training labels are all {c}; forest is degenerate"));
                }
                test_x.iter().map(|r| forest.predict(r)).collect()
            }
            ModelKind::Linear(cfg) => {
                let std = Standardizer::fit(&tx);
                let fit = train_linear(&std.transform(&tx), &ty, cfg)?;
                test_x.iter().map(|r| fit.model.predict(&std.transform_row(r))).collect()
            }
        };
        for (i, p) in test.into_iter().zip(preds) {
            predictions[i] = p;
        }
    }
    Ok(CvReport { metrics: Metrics::from_predictions(y, &predictions), folds: folds.clone(), predictions, warnings })
}
