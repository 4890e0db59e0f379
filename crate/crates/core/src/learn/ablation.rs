//! With/without-SPR comparison on shared folds.

use crate::corpus::ClassLabel;
use crate::error::LearnError;
use crate::features::{FeatureVectorOf, FEATURE_COUNT};
use crate::rng;
use crate::scalar::Scalar;
use crate::scoring::{spr, WeightVectorOf};

use super::check_xy;
use super::cv::{cross_validate_with_folds, stratified_folds, CvReport, ModelKind};

#[derive(Debug, Clone, PartialEq)]
pub struct AblationReport {
    pub without_spr: CvReport,
    pub with_spr: CvReport,
    pub folds_identical: bool,
    pub warnings: Vec<String>,
}

/// Multiplies every column by its weight.
pub fn scale_columns<T: Scalar>(x: &[Vec<T>], weights: &WeightVectorOf<T>) -> Vec<Vec<T>> {
    x.iter().map(|r| r.iter().zip(weights.as_slice()).map(|(v, w)| *v * *w).collect()).collect()
}

/// Appends the SPR score of each row, computed from its 41 raw features.
pub fn append_spr_column<T: Scalar>(
    raw: &[Vec<T>],
    inputs: &[Vec<T>],
    weights: &WeightVectorOf<T>,
) -> Result<Vec<Vec<T>>, LearnError> {
    raw.iter()
        .zip(inputs)
        .map(|(r, inp)| {
            let fv = FeatureVectorOf::from_slice(r)
                .map_err(|_| LearnError::Dimension { expected: FEATURE_COUNT, found: r.len() })?;
            let mut out = inp.clone();
            out.push(spr(&fv, weights).spr);
            Ok(out)
        })
        .collect()
}

/// Cross-validates the feature matrix with and without an appended SPR
/// column, using one fold assignment and one model seed for both arms.
/// With `scale_inputs` the feature columns are multiplied by `weights`
/// before classification.
pub fn ablation_spr<T: Scalar>(
    x: &[Vec<T>],
    y: &[ClassLabel],
    weights: &WeightVectorOf<T>,
    k: usize,
    model: &ModelKind,
    seed: u64,
    scale_inputs: bool,
) -> Result<AblationReport, LearnError> {
    let d = check_xy(x, y)?;
    if d != FEATURE_COUNT {
        return Err(LearnError::Dimension { expected: FEATURE_COUNT, found: d });
    }
    let (folds, warning) = stratified_folds(y, k, rng::child_seed(seed, "cv-outer", 0))?;
    let inputs = if scale_inputs { scale_columns(x, weights) } else { x.to_vec() };
    let with_col = append_spr_column(x, &inputs, weights)?;
    let without_spr = cross_validate_with_folds(&inputs, y, &folds, model, seed)?;
    let with_spr = cross_validate_with_folds(&with_col, y, &folds, model, seed)?;
    let folds_identical = without_spr.folds == with_spr.folds;
    Ok(AblationReport { without_spr, with_spr, folds_identical, warnings: warning.into_iter().collect() })
}
