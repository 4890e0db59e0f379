//! Importance, ambiguity and spread-power aggregates.
//!
//! Each aggregate is a weighted sum over its feature group divided by the
//! fixed group size (18 emotional, 9 newsworthy, 14 ambiguity). Importance
//! is emotional + newsworthy and the spread power is importance × ambiguity.

use std::ops::Index;

use serde::Serialize;

use crate::corpus::round_sig;
use crate::error::FeatureError;
use crate::features::{FeatureGroup, FeatureId, FeatureVectorOf, FEATURE_COUNT};
use crate::scalar::Scalar;

/// Per-feature weights in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightVectorOf<T> {
    weights: [T; FEATURE_COUNT],
}

impl<T: Scalar> WeightVectorOf<T> {
    /// All weights 1, the default when nothing was learned.
    pub fn uniform() -> Self {
        Self::filled(T::one())
    }

    pub fn filled(w: T) -> Self {
        Self { weights: [w.clamp_unit(); FEATURE_COUNT] }
    }

    /// Values are clamped into `[0, 1]`.
    pub fn from_slice(values: &[T]) -> Result<Self, FeatureError> {
        if values.len() != FEATURE_COUNT {
            return Err(FeatureError::Dimension { expected: FEATURE_COUNT, found: values.len() });
        }
        let mut weights = [T::zero(); FEATURE_COUNT];
        for (w, v) in weights.iter_mut().zip(values) {
            *w = v.clamp_unit();
        }
        Ok(Self { weights })
    }

    pub fn as_slice(&self) -> &[T] {
        &self.weights
    }

    pub fn iter(&self) -> impl Iterator<Item = (FeatureId, T)> + '_ {
        FeatureId::ALL.into_iter().zip(self.weights.iter().copied())
    }

    /// Multiplies every weight by `c`, clamping the result into `[0, 1]`.
    pub fn scaled(&self, c: T) -> Self {
        let mut out = *self;
        for w in &mut out.weights {
            *w = (*w * c).clamp_unit();
        }
        out
    }
}

impl<T: Scalar> Default for WeightVectorOf<T> {
    fn default() -> Self {
        Self::uniform()
    }
}

impl<T> Index<FeatureId> for WeightVectorOf<T> {
    type Output = T;

    fn index(&self, id: FeatureId) -> &T {
        &self.weights[id.index()]
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SprBreakdownOf<T> {
    pub emo: T,
    pub nws: T,
    pub imp: T,
    pub amb: T,
    pub spr: T,
}

fn group_score<T: Scalar>(fv: &FeatureVectorOf<T>, w: &WeightVectorOf<T>, group: FeatureGroup) -> T {
    let sum: T = group.members().map(|f| w[f] * fv[f]).sum();
    sum / T::from_count(group.size())
}

pub fn emotional_score<T: Scalar>(fv: &FeatureVectorOf<T>, w: &WeightVectorOf<T>) -> T {
    group_score(fv, w, FeatureGroup::Emotional)
}

pub fn newsworthy_score<T: Scalar>(fv: &FeatureVectorOf<T>, w: &WeightVectorOf<T>) -> T {
    group_score(fv, w, FeatureGroup::Newsworthy)
}

pub fn importance<T: Scalar>(fv: &FeatureVectorOf<T>, w: &WeightVectorOf<T>) -> T {
    emotional_score(fv, w) + newsworthy_score(fv, w)
}

pub fn ambiguity<T: Scalar>(fv: &FeatureVectorOf<T>, w: &WeightVectorOf<T>) -> T {
    group_score(fv, w, FeatureGroup::Ambiguity)
}

pub fn spr<T: Scalar>(fv: &FeatureVectorOf<T>, w: &WeightVectorOf<T>) -> SprBreakdownOf<T> {
    let emo = emotional_score(fv, w);
    let nws = newsworthy_score(fv, w);
    let imp = emo + nws;
    let amb = ambiguity(fv, w);
    SprBreakdownOf { emo, nws, imp, amb, spr: imp * amb }
}

/// One line of the score report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScoreRecord {
    pub id: String,
    pub emo: f64,
    pub nws: f64,
    pub imp: f64,
    pub amb: f64,
    pub spr: f64,
}

impl ScoreRecord {
    pub fn new<T: Scalar>(id: &str, b: &SprBreakdownOf<T>) -> Self {
        Self {
            id: id.to_string(),
            emo: round_sig(b.emo.as_f64()),
            nws: round_sig(b.nws.as_f64()),
            imp: round_sig(b.imp.as_f64()),
            amb: round_sig(b.amb.as_f64()),
            spr: round_sig(b.spr.as_f64()),
        }
    }
}
