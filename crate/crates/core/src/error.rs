use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("vector ({0}, {1}, {2}) cannot be used as a unit axis")]
    Normalization(f64, f64, f64),

    #[error("rotation angle must be positive, got {0}")]
    NonPositiveAngle(f64),

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("index {index} out of range for sequence of length {len}")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("sequence `{0}` has an axis outside the equatorial plane")]
    NotEquatorial(String),

    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("cycle order {m} inconsistent with element angle {beta}")]
    CycleOrder { m: u32, beta: f64 },

    #[error("unsupported tensor rank {0} (supported: 0..=3)")]
    UnsupportedRank(u32),

    #[error("all delays are zero")]
    ZeroDelays,

    #[error("oscillating-field frequency must be nonzero")]
    ZeroFrequency,

    #[error("polynomial fit failed: residual {0:e}")]
    FitFailure(f64),

    #[error("unknown sequence `{0}`")]
    UnknownSequence(String),

    #[error("invalid parameters for `{name}`: {reason}")]
    InvalidParams { name: String, reason: String },

    #[error("search space of {0} tuples exceeds the enumeration guard")]
    SearchTooLarge(u128),

    #[error("no z rotation makes the axis set reflection symmetric in the xz plane")]
    NoSymmetrizingAngle,

    #[error("malformed sequence description: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, Error>;
