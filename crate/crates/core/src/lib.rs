//! Content features, spread-power scoring, PSO feature weighting, classifiers
//! and significance tests for rumor and true-news corpora.
//!
//! Numeric code is generic over [`Scalar`] (`f32` or `f64`); the unsuffixed
//! aliases below fix the scalar to `f64`.

pub mod annotate;
pub mod corpus;
pub mod error;
pub mod extract;
pub mod features;
pub mod learn;
pub mod lexicon;
pub mod rng;
mod scalar;
pub mod scoring;
pub mod stats;
pub mod synth;
pub mod textprep;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub type FeatureVector = features::FeatureVectorOf<f64>;
pub type WeightVector = scoring::WeightVectorOf<f64>;
pub type SprBreakdown = scoring::SprBreakdownOf<f64>;
pub type MatrixRow = corpus::MatrixRowOf<f64>;
