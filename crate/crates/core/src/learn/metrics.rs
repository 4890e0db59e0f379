//! Binary classification metrics.

use serde::Serialize;

use crate::corpus::ClassLabel;

/// Counts indexed `[actual][predicted]` by label code.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct ConfusionMatrix {
    pub counts: [[usize; 2]; 2],
}

impl ConfusionMatrix {
    pub fn from_predictions(actual: &[ClassLabel], predicted: &[ClassLabel]) -> Self {
        assert_eq!(actual.len(), predicted.len(), "prediction count mismatch");
        let mut counts = [[0; 2]; 2];
        for (a, p) in actual.iter().zip(predicted) {
            counts[a.code()][p.code()] += 1;
        }
        Self { counts }
    }

    pub fn total(&self) -> usize {
        self.counts.iter().flatten().sum()
    }

    /// (TP, FP, FN, TN) with `class` as the positive class.
    pub fn one_vs_rest(&self, class: ClassLabel) -> (usize, usize, usize, usize) {
        let c = class.code();
        let o = 1 - c;
        (self.counts[c][c], self.counts[o][c], self.counts[c][o], self.counts[o][o])
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct ClassMetrics {
    pub tp_rate: f64,
    pub fp_rate: f64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

fn rate(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

impl ClassMetrics {
    pub fn from_counts(tp: usize, fp: usize, fn_: usize, tn: usize) -> Self {
        let precision = rate(tp, tp + fp);
        let recall = rate(tp, tp + fn_);
        let f1 = if precision + recall > 0.0 { 2.0 * precision * recall / (precision + recall) } else { 0.0 };
        Self { tp_rate: recall, fp_rate: rate(fp, fp + tn), precision, recall, f1 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Metrics {
    #[serde(rename = "FR")]
    pub fr: ClassMetrics,
    #[serde(rename = "TR")]
    pub tr: ClassMetrics,
    pub macro_avg: ClassMetrics,
    pub accuracy: f64,
    pub confusion: ConfusionMatrix,
}

impl Metrics {
    pub fn from_confusion(confusion: ConfusionMatrix) -> Self {
        let per = |c| {
            let (tp, fp, fn_, tn) = confusion.one_vs_rest(c);
            ClassMetrics::from_counts(tp, fp, fn_, tn)
        };
        let (fr, tr) = (per(ClassLabel::FR), per(ClassLabel::TR));
        let avg = |f: fn(&ClassMetrics) -> f64| (f(&fr) + f(&tr)) / 2.0;
        let macro_avg = ClassMetrics {
            tp_rate: avg(|m| m.tp_rate),
            fp_rate: avg(|m| m.fp_rate),
            precision: avg(|m| m.precision),
            recall: avg(|m| m.recall),
            f1: avg(|m| m.f1),
        };
        let correct = confusion.counts[0][0] + confusion.counts[1][1];
        Self { fr, tr, macro_avg, accuracy: rate(correct, confusion.total()), confusion }
    }

    pub fn from_predictions(actual: &[ClassLabel], predicted: &[ClassLabel]) -> Self {
        Self::from_confusion(ConfusionMatrix::from_predictions(actual, predicted))
    }

    pub fn class(&self, c: ClassLabel) -> &ClassMetrics {
        match c {
            ClassLabel::FR => &self.fr,
            ClassLabel::TR => &self.tr,
        }
    }
}
