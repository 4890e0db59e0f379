//! Primal linear max-margin classifier: hinge loss plus L2, trained by
//! full-batch subgradient descent with step `1 / (lambda * t)`.

use serde::Deserialize;

use crate::corpus::ClassLabel;
use crate::error::LearnError;
use crate::scalar::Scalar;

use super::{check_xy, label_sign};

/// Column means and standard deviations from a training set.
#[derive(Debug, Clone, PartialEq)]
pub struct Standardizer<T> {
    pub mean: Vec<T>,
    /// Population standard deviation; constant columns store 0 and map to 0.
    pub std: Vec<T>,
}

impl<T: Scalar> Standardizer<T> {
    pub fn fit(x: &[Vec<T>]) -> Self {
        let d = x.first().map_or(0, Vec::len);
        let n = T::from_count(x.len().max(1));
        let mut mean = vec![T::zero(); d];
        for row in x {
            for (m, v) in mean.iter_mut().zip(row) {
                *m = *m + *v;
            }
        }
        mean.iter_mut().for_each(|m| *m = *m / n);
        let mut var = vec![T::zero(); d];
        for row in x {
            for ((s, v), m) in var.iter_mut().zip(row).zip(&mean) {
                *s = *s + (*v - *m) * (*v - *m);
            }
        }
        let std = var.into_iter().map(|s| (s / n).sqrt()).collect();
        Self { mean, std }
    }

    pub fn transform_row(&self, row: &[T]) -> Vec<T> {
        row.iter()
            .zip(self.mean.iter().zip(&self.std))
            .map(|(&v, (&m, &s))| if s > T::zero() { (v - m) / s } else { T::zero() })
            .collect()
    }

    pub fn transform(&self, x: &[Vec<T>]) -> Vec<Vec<T>> {
        x.iter().map(|r| self.transform_row(r)).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(default)]
pub struct LinearConfig {
    pub lambda: f64,
    pub epochs: usize,
}

impl Default for LinearConfig {
    fn default() -> Self {
        Self { lambda: 0.05, epochs: 60 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinearModel<T> {
    pub weights: Vec<T>,
    pub bias: T,
    pub lambda: T,
}

impl<T: Scalar> LinearModel<T> {
    pub fn decision(&self, row: &[T]) -> T {
        self.weights.iter().zip(row).map(|(w, v)| *w * *v).sum::<T>() + self.bias
    }

    /// Positive margin means TR, otherwise FR.
    pub fn predict(&self, row: &[T]) -> ClassLabel {
        if self.decision(row) > T::zero() {
            ClassLabel::TR
        } else {
            ClassLabel::FR
        }
    }

    /// Regularized mean hinge loss; the bias is regularized like a weight.
    pub fn objective(&self, x: &[Vec<T>], y: &[ClassLabel]) -> T {
        let half = T::of(0.5);
        let reg = self.weights.iter().map(|w| *w * *w).sum::<T>() + self.bias * self.bias;
        let hinge: T =
            x.iter().zip(y).map(|(row, &l)| (T::one() - label_sign::<T>(l) * self.decision(row)).max(T::zero())).sum();
        half * self.lambda * reg + hinge / T::from_count(x.len())
    }
}

/// Trained model with the per-epoch objective of the returned iterate.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearFit<T> {
    pub model: LinearModel<T>,
    /// Best objective seen after each epoch; non-increasing.
    pub loss_trace: Vec<T>,
}

/// Trains on already standardized columns. Returns the lowest-objective
/// iterate, so the trace never increases.
pub fn train_linear<T: Scalar>(x: &[Vec<T>], y: &[ClassLabel], cfg: &LinearConfig) -> Result<LinearFit<T>, LearnError> {
    let d = check_xy(x, y)?;
    if !(cfg.lambda > 0.0 && cfg.lambda.is_finite()) {
        return Err(LearnError::Config(format!("lambda must be positive, got {}", cfg.lambda)));
    }
    if y.iter().all(|&l| l == y[0]) {
        return Err(LearnError::SingleClass);
    }
    let lambda = T::of(cfg.lambda);
    let n = T::from_count(x.len());
    let radius = T::one() / lambda.sqrt();
    let half = T::of(0.5);
    let mut model = LinearModel { weights: vec![T::zero(); d], bias: T::zero(), lambda };
    let mut best = model.clone();
    let mut best_loss = T::infinity();
    let mut trace = Vec::with_capacity(cfg.epochs);
    let mut grad = vec![T::zero(); d];
    // pass t scores iterate t (0 = the zero model) and yields its subgradient
    for t in 0..=cfg.epochs {
        grad.iter_mut().for_each(|g| *g = T::zero());
        let mut grad_b = T::zero();
        let mut hinge = T::zero();
        for (row, &l) in x.iter().zip(y) {
            let s = label_sign::<T>(l);
            let margin = s * model.decision(row);
            if margin < T::one() {
                hinge = hinge + T::one() - margin;
                for (g, v) in grad.iter_mut().zip(row) {
                    *g = *g + s * *v;
                }
                grad_b = grad_b + s;
            }
        }
        let reg = model.weights.iter().map(|w| *w * *w).sum::<T>() + model.bias * model.bias;
        let loss = half * lambda * reg + hinge / n;
        if loss < best_loss {
            best_loss = loss;
            best.clone_from(&model);
        }
        if t > 0 {
            trace.push(best_loss);
        }
        if t == cfg.epochs {
            break;
        }
        let eta = T::one() / (lambda * T::from_count(t + 1));
        let shrink = T::one() - eta * lambda;
        for (w, g) in model.weights.iter_mut().zip(&grad) {
            *w = shrink * *w + eta * *g / n;
        }
        model.bias = shrink * model.bias + eta * grad_b / n;
        let norm = (model.weights.iter().map(|w| *w * *w).sum::<T>() + model.bias * model.bias).sqrt();
        if norm > radius {
            let c = radius / norm;
            model.weights.iter_mut().for_each(|w| *w = *w * c);
            model.bias = model.bias * c;
        }
    }
    Ok(LinearFit { model: best, loss_trace: trace })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_clouds() -> (Vec<Vec<f64>>, Vec<ClassLabel>) {
        let mut x = Vec::new();
        let mut y = Vec::new();
        for i in 0..40 {
            let j = (i % 7) as f64 * 0.1;
            x.push(vec![3.0 + j, 2.0 - j, 0.5]);
            y.push(ClassLabel::TR);
            x.push(vec![-3.0 - j, -2.0 + j, 0.5]);
            y.push(ClassLabel::FR);
        }
        (x, y)
    }

    #[test]
    fn separable_clouds_fit_perfectly() {
        let (x, y) = two_clouds();
        let z = Standardizer::fit(&x).transform(&x);
        let fit = train_linear(&z, &y, &LinearConfig::default()).unwrap();
        let correct = z.iter().zip(&y).filter(|(r, l)| fit.model.predict(r) == **l).count();
        assert_eq!(correct, y.len());
        assert!(fit.model.weights.iter().all(|w| w.is_finite()));
        assert!(fit.loss_trace.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn identical_rows_predict_majority() {
        let x = vec![vec![1.0, 2.0]; 10];
        let mut y = vec![ClassLabel::TR; 7];
        y.extend([ClassLabel::FR; 3]);
        let z = Standardizer::fit(&x).transform(&x);
        let fit = train_linear(&z, &y, &LinearConfig::default()).unwrap();
        assert_eq!(fit.model.predict(&z[0]), ClassLabel::TR);
        let y2: Vec<_> = y.iter().map(|l| if *l == ClassLabel::TR { ClassLabel::FR } else { ClassLabel::TR }).collect();
        let fit = train_linear(&z, &y2, &LinearConfig::default()).unwrap();
        assert_eq!(fit.model.predict(&z[0]), ClassLabel::FR);
    }

    #[test]
    fn deterministic() {
        let (x, y) = two_clouds();
        let a = train_linear(&x, &y, &LinearConfig::default()).unwrap();
        let b = train_linear(&x, &y, &LinearConfig::default()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn rejects_bad_input() {
        let x = vec![vec![1.0]; 3];
        assert_eq!(
            train_linear(&x, &[ClassLabel::FR; 3], &LinearConfig::default()).unwrap_err(),
            LearnError::SingleClass
        );
        let bad = LinearConfig { lambda: 0.0, ..Default::default() };
        assert!(matches!(
            train_linear(&x, &[ClassLabel::FR, ClassLabel::TR, ClassLabel::FR], &bad),
            Err(LearnError::Config(_))
        ));
    }

    #[test]
    fn standardizer_zeroes_constant_columns() {
        let x = vec![vec![1.0, 5.0], vec![3.0, 5.0]];
        let s = Standardizer::fit(&x);
        assert_eq!(s.transform(&x), vec![vec![-1.0, 0.0], vec![1.0, 0.0]]);
    }

    #[test]
    fn works_in_f32() {
        let (x, y) = two_clouds();
        let x: Vec<Vec<f32>> = x.iter().map(|r| r.iter().map(|v| *v as f32).collect()).collect();
        let fit = train_linear(&x, &y, &LinearConfig::default()).unwrap();
        assert_eq!(fit.model.predict(&x[0]), y[0]);
    }
}
