use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("alphabet size must be at least 1")]
    EmptyAlphabet,

    #[error("unknown axis `{0}`")]
    UnknownAxis(String),

    #[error("axis `{0}` appears more than once")]
    DuplicateAxis(String),

    #[error("axis sets overlap on `{0}`")]
    OverlappingAxes(String),

    #[error("marginalization needs at least one axis to keep")]
    EmptyKeepSet,

    #[error("table has {actual} entries but the axes require {expected}")]
    ShapeMismatch { expected: usize, actual: usize },

    #[error("invalid probability {value} at flat index {index}")]
    InvalidProbability { index: usize, value: f64 },

    #[error("probabilities sum to {sum}, not 1")]
    NotNormalized { sum: f64 },

    #[error("sequence lengths differ ({first} vs {other})")]
    LengthMismatch { first: usize, other: usize },

    #[error("expected {expected} sequences (one per axis), got {actual}")]
    SequenceCount { expected: usize, actual: usize },

    #[error("sequences must be non-empty")]
    EmptySequence,

    #[error("symbol {symbol} is outside the alphabet of axis `{axis}` (size {size})")]
    SymbolOutOfRange {
        axis: String,
        symbol: usize,
        size: usize,
    },

    #[error("typicality epsilon must lie in (0, 1), got {0}")]
    InvalidEpsilon(f64),

    #[error("kernel row for (x1={x1}, x2={x2}) sums to {sum}")]
    KernelRowSum { x1: usize, x2: usize, sum: f64 },

    #[error("incompatible alphabets: {0}")]
    AlphabetMismatch(String),

    #[error("invalid coding distribution: {0}")]
    InvalidDistribution(String),

    #[error("invalid search configuration: {0}")]
    InvalidSearch(String),

    #[error("grid search needs {evaluations} quantizer evaluations, above the limit of {limit}")]
    SearchTooLarge { evaluations: u128, limit: u128 },

    #[error("invalid channel recipe: {0}")]
    InvalidRecipe(String),

    #[error("invalid simulation parameters: {0}")]
    InvalidParams(String),

    #[error("{what} has {size} entries, above the limit of {limit}")]
    CodebookTooLarge {
        what: &'static str,
        size: u128,
        limit: u128,
    },

    #[error("joint search space has {size} index tuples, above the limit of {limit}")]
    SearchSpaceTooLarge { size: u128, limit: u128 },

    #[error("message {w} is out of range for {blocks} blocks of {words} words")]
    MessageOutOfRange {
        w: u128,
        blocks: usize,
        words: usize,
    },

    #[error("block {block} is out of range (1..={last})")]
    BlockOutOfRange { block: usize, last: usize },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    Parse {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },

    #[error("{path}: {message}")]
    ChannelFile { path: PathBuf, message: String },
}
