use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("input unit at position {0} decodes outside the alphabet")]
    OutOfAlphabet(usize),
    #[error("empty input where a nonempty string is required")]
    EmptyInput,
    #[error("string lengths differ: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("block length {block} invalid for string of length {len}")]
    BlockTooLarge { block: usize, len: usize },
    #[error("periodic pattern must be nonempty")]
    EmptyPattern,
    #[error("string length {len} is not a multiple of block length {block}")]
    NotMultiple { len: usize, block: usize },
    #[error("weights sum to {0}, not 1")]
    NotNormalized(f64),
    #[error("absolute continuity violated: alpha({0}) > 0 but beta({0}) = 0")]
    AbsoluteContinuityViolation(usize),
    #[error("frequency table has no block with positive count")]
    EmptySupport,
    #[error("symbol {symbol} out of range for input alphabet of size {alphabet}")]
    SymbolOutOfRange { symbol: usize, alphabet: usize },
    #[error("state {state} out of range for machine with {states} states")]
    StateOutOfRange { state: usize, states: usize },
    #[error("enumeration of {0} words exceeds the configured budget of {1}")]
    BudgetExceeded(u64, u64),
    #[error("machine input alphabet size {0} is not a perfect square")]
    NotProductAlphabet(usize),
    #[error("state budget {budget} is below the alphabet size {alphabet}")]
    BudgetTooSmall { budget: usize, alphabet: usize },
    #[error("self-information of the input is zero")]
    ZeroSelfInformation,
    #[error("grid point n={n} exceeds the available prefix length {len}")]
    GridExceedsPrefix { n: usize, len: usize },
    #[error("unknown check name: {0}")]
    UnknownCheck(String),
    #[error("oracle instance too large: {0}")]
    InstanceTooLarge(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("malformed machine description: {0}")]
    MachineFormat(String),
    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
