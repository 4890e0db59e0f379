//! The 41 content features, their canonical order and grouping.

use std::fmt;
use std::ops::{Index, IndexMut};
use std::str::FromStr;

use crate::error::FeatureError;
use crate::scalar::Scalar;

/// Number of content features.
pub const FEATURE_COUNT: usize = 41;

/// The aggregate a feature contributes to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FeatureGroup {
    Emotional,
    Newsworthy,
    Ambiguity,
}

impl FeatureGroup {
    /// Fixed divisor used by the weighted-mean aggregates.
    pub const fn size(self) -> usize {
        match self {
            FeatureGroup::Emotional => 18,
            FeatureGroup::Newsworthy => 9,
            FeatureGroup::Ambiguity => 14,
        }
    }

    pub fn members(self) -> impl Iterator<Item = FeatureId> {
        FeatureId::ALL.into_iter().filter(move |f| f.group() == self)
    }
}

macro_rules! feature_ids {
    ($($variant:ident => $abbr:literal, $group:ident;)*) => {
        /// A content feature. Discriminants follow the canonical column order.
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
        pub enum FeatureId {
            $($variant,)*
        }

        impl FeatureId {
            /// All features in canonical order: emotional, newsworthy, ambiguity.
            pub const ALL: [FeatureId; FEATURE_COUNT] = [$(FeatureId::$variant,)*];

            /// Abbreviation used in file headers and weight files.
            pub const fn abbr(self) -> &'static str {
                match self {
                    $(FeatureId::$variant => $abbr,)*
                }
            }

            pub const fn group(self) -> FeatureGroup {
                match self {
                    $(FeatureId::$variant => FeatureGroup::$group,)*
                }
            }
        }
    };
}

feature_ids! {
    ETag => "ETag", Emotional;
    Fr => "Fr", Emotional;
    Su => "Su", Emotional;
    Dsg => "Dsg", Emotional;
    Sad => "Sad", Emotional;
    An => "An", Emotional;
    Aff => "Aff", Emotional;
    MV => "MV", Emotional;
    CW => "CW", Emotional;
    CC => "CC", Emotional;
    PS => "PS", Emotional;
    NS => "NS", Emotional;
    SaThrt => "SA_Thrt", Emotional;
    SaReq => "SA_Req", Emotional;
    AdjSup => "Adj_Sup", Emotional;
    AdjCmp => "Adj_Cmp", Emotional;
    Strt => "Strt", Emotional;
    End => "End", Emotional;
    RT => "RT", Newsworthy;
    SI => "SI", Newsworthy;
    NE => "NE", Newsworthy;
    LD => "LD", Newsworthy;
    Cer => "Cer", Newsworthy;
    SaDec => "SA_Dec", Newsworthy;
    SaQuot => "SA_Quot", Newsworthy;
    AdjOrd => "Adj_Ord", Newsworthy;
    SM => "SM", Newsworthy;
    Ucer => "Ucer", Ambiguity;
    SV => "SV", Ambiguity;
    QW => "QW", Ambiguity;
    QM => "QM", Ambiguity;
    EM => "EM", Ambiguity;
    SaQues => "SA_Ques", Ambiguity;
    Pro => "Pro", Ambiguity;
    Tntv => "Tntv", Ambiguity;
    Neg => "Neg", Ambiguity;
    Antcpnt => "Antcpnt", Ambiguity;
    AdvExm => "Adv_Exm", Ambiguity;
    If => "If", Ambiguity;
    GT => "GT", Ambiguity;
    UT => "UT", Ambiguity;
}

impl FeatureId {
    /// Column index in canonical order.
    pub const fn index(self) -> usize {
        self as usize
    }

    /// Features computed as the fraction of sentences satisfying a predicate.
    pub const fn is_sentence_ratio(self) -> bool {
        use FeatureId::*;
        !matches!(self, ETag | PS | NS | SaThrt | SaReq | Strt | End | LD | Cer | SaDec | SaQuot | SM | Ucer | SaQues)
    }

    /// Features that only take the values 0 and 1.
    pub const fn is_boolean(self) -> bool {
        use FeatureId::*;
        matches!(self, SaThrt | SaReq | Strt | End | SaDec | SaQuot | SaQues)
    }
}

impl fmt::Display for FeatureId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.abbr())
    }
}

impl FromStr for FeatureId {
    type Err = FeatureError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        FeatureId::ALL.into_iter().find(|f| f.abbr() == s).ok_or_else(|| FeatureError::UnknownFeature(s.to_string()))
    }
}

/// One value per feature, indexed by [`FeatureId`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeatureVectorOf<T> {
    values: [T; FEATURE_COUNT],
}

impl<T: Scalar> FeatureVectorOf<T> {
    pub fn zeros() -> Self {
        Self { values: [T::zero(); FEATURE_COUNT] }
    }

    pub fn filled(v: T) -> Self {
        Self { values: [v; FEATURE_COUNT] }
    }

    /// Builds a vector from a slice in canonical order.
    pub fn from_slice(values: &[T]) -> Result<Self, FeatureError> {
        let values: [T; FEATURE_COUNT] =
            values.try_into().map_err(|_| FeatureError::Dimension { expected: FEATURE_COUNT, found: values.len() })?;
        Ok(Self { values })
    }

    pub fn as_slice(&self) -> &[T] {
        &self.values
    }

    pub fn iter(&self) -> impl Iterator<Item = (FeatureId, T)> + '_ {
        FeatureId::ALL.into_iter().zip(self.values.iter().copied())
    }

    /// True when every value lies in `[0, 1]` and boolean features are 0 or 1.
    pub fn is_valid(&self) -> bool {
        self.iter().all(|(id, v)| {
            let in_range = v >= T::zero() && v <= T::one();
            in_range && (!id.is_boolean() || v == T::zero() || v == T::one())
        })
    }
}

impl<T: Scalar> Default for FeatureVectorOf<T> {
    fn default() -> Self {
        Self::zeros()
    }
}

impl<T> Index<FeatureId> for FeatureVectorOf<T> {
    type Output = T;

    fn index(&self, id: FeatureId) -> &T {
        &self.values[id.index()]
    }
}

impl<T> IndexMut<FeatureId> for FeatureVectorOf<T> {
    fn index_mut(&mut self, id: FeatureId) -> &mut T {
        &mut self.values[id.index()]
    }
}
