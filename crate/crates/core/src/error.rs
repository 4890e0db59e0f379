//! Error types, one enum per subsystem plus a crate-wide wrapper.

use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("line {line}: duplicate id {id:?}")]
    DuplicateId { line: usize, id: String },
    #[error("line {line}: unknown label {label:?} (expected FR or TR)")]
    UnknownLabel { line: usize, label: String },
    #[error("line {line}: {field} must not be empty")]
    EmptyField { line: usize, field: &'static str },
    #[error("corpus is empty")]
    EmptyCorpus,
    #[error("row {row}: expected {expected} feature values, found {found}")]
    Dimension { row: usize, expected: usize, found: usize },
    #[error("weight file: {0}")]
    Weights(String),
}

#[derive(Debug, Error)]
pub enum TextError {
    #[error("document has no sentences after preprocessing")]
    EmptyDocument,
    #[error("normalization rules: {0}")]
    Rules(String),
    #[error("spell dictionary is empty")]
    EmptyDictionary,
    #[error("{path}: {message}")]
    Resource { path: PathBuf, message: String },
}

#[derive(Debug, Error)]
pub enum LexiconError {
    #[error("lexicon directory {0} does not exist")]
    MissingDirectory(PathBuf),
    #[error("required lexicon {id} missing (looked for {path})")]
    MissingList { id: &'static str, path: PathBuf },
    #[error("lexicons {first} and {second} must be disjoint; shared: {}", words.join(", "))]
    Overlap { first: &'static str, second: &'static str, words: Vec<String> },
    #[error("unknown lexicon id {0:?}")]
    UnknownId(String),
    #[error("{path}: {message}")]
    Format { path: PathBuf, message: String },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Debug, Error)]
pub enum FeatureError {
    #[error("document has no sentences")]
    NoSentences,
    #[error("document has no terms")]
    NoTerms,
    #[error("{0} is not a sentence-ratio feature")]
    NotRatioFeature(&'static str),
    #[error("unknown feature {0:?}")]
    UnknownFeature(String),
    #[error("expected {expected} values, found {found}")]
    Dimension { expected: usize, found: usize },
}

#[derive(Debug, Error)]
pub enum AnnotateError {
    #[error("external annotator {command:?}: {message}")]
    External { command: String, message: String },
    #[error("{path}: {message}")]
    Gazetteer { path: PathBuf, message: String },
}

#[derive(Debug, Error, PartialEq)]
pub enum LearnError {
    #[error("training labels contain a single class")]
    SingleClass,
    #[error("expected {expected} columns, found {found}")]
    Dimension { expected: usize, found: usize },
    #[error("need at least {needed} rows, found {found}")]
    TooFewRows { needed: usize, found: usize },
    #[error("invalid configuration: {0}")]
    Config(String),
}

#[derive(Debug, Error, PartialEq)]
pub enum StatsError {
    #[error("sample too small: need at least {needed}, found {found}")]
    SampleTooSmall { needed: usize, found: usize },
    #[error("sample contains non-finite values")]
    NonFinite,
    #[error("class {0} has no observations")]
    MissingClass(&'static str),
}

/// Crate-wide error used by the high-level pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Corpus(#[from] CorpusError),
    #[error(transparent)]
    Text(#[from] TextError),
    #[error(transparent)]
    Lexicon(#[from] LexiconError),
    #[error(transparent)]
    Feature(#[from] FeatureError),
    #[error(transparent)]
    Annotate(#[from] AnnotateError),
    #[error(transparent)]
    Learn(#[from] LearnError),
    #[error(transparent)]
    Stats(#[from] StatsError),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
