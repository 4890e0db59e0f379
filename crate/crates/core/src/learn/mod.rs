//! Feature weighting by particle swarm optimization, a linear max-margin
//! classifier, a random forest and the cross-validation harness.

mod ablation;
mod cv;
mod forest;
mod linear;
mod metrics;
mod pso;

pub use ablation::{ablation_spr, append_spr_column, scale_columns, AblationReport};
pub use cv::{cross_validate, cross_validate_with_folds, stratified_folds, CvReport, Folds, ModelKind};
pub use forest::{rf_predict, rf_train, Forest, ForestConfig, Tree};
pub use linear::{train_linear, LinearConfig, LinearFit, LinearModel, Standardizer};
pub use metrics::{ClassMetrics, ConfusionMatrix, Metrics};
pub use pso::{inner_cv_accuracy, pso_optimize, pso_weight_features, PsoConfig, PsoResult, ScaledCvFitness};

use crate::corpus::{ClassLabel, MatrixRowOf};
use crate::error::LearnError;
use crate::scalar::Scalar;

/// +1 for TR, -1 for FR.
pub(crate) fn label_sign<T: Scalar>(l: ClassLabel) -> T {
    match l {
        ClassLabel::TR => T::one(),
        ClassLabel::FR => -T::one(),
    }
}

/// Checks shape agreement and returns the column count.
pub(crate) fn check_xy<T: Scalar>(x: &[Vec<T>], y: &[ClassLabel]) -> Result<usize, LearnError> {
    if x.is_empty() {
        return Err(LearnError::TooFewRows { needed: 1, found: 0 });
    }
    if x.len() != y.len() {
        return Err(LearnError::Dimension { expected: x.len(), found: y.len() });
    }
    let d = x[0].len();
    if let Some(bad) = x.iter().find(|r| r.len() != d) {
        return Err(LearnError::Dimension { expected: d, found: bad.len() });
    }
    Ok(d)
}

/// Splits labeled matrix rows into a design matrix and labels. Rows
/// without a label are skipped.
pub fn design_matrix<T: Scalar>(rows: &[MatrixRowOf<T>]) -> (Vec<Vec<T>>, Vec<ClassLabel>) {
    rows.iter().filter_map(|r| r.label.map(|l| (r.features.as_slice().to_vec(), l))).unzip()
}

/// Row subset by index.
pub(crate) fn take<R: Clone>(items: &[R], idx: &[usize]) -> Vec<R> {
    idx.iter().map(|&i| items[i].clone()).collect()
}
