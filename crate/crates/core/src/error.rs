use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("radix must be at least {min}, got {got}")]
    InvalidRadix { got: u32, min: u32 },

    #[error("negative value {0} is not supported")]
    Negative(String),

    #[error("malformed decimal literal {0:?}")]
    MalformedDecimal(String),

    #[error("digit {digit} out of range for radix {radix}")]
    DigitOutOfRange { digit: u32, radix: u32 },

    #[error("operator code {code} out of range for radix {radix} and arity {arity}")]
    CodeOutOfRange { code: String, radix: u32, arity: usize },

    #[error("operator table has {got} entries, expected {expected}")]
    TableLength { got: usize, expected: usize },

    #[error("operator table for radix {radix} and arity {arity} is too large")]
    TableTooLarge { radix: u32, arity: usize },

    #[error("malformed operator literal {0:?}, expected N:R:p")]
    MalformedOperator(String),

    #[error("operator takes {expected} operands, got {got}")]
    ArityMismatch { expected: usize, got: usize },

    #[error("operand radix {got} does not match operator radix {expected}")]
    RadixMismatch { expected: u32, got: u32 },

    #[error("operands do not share a precision window ({0} vs {1} fractional digits)")]
    WindowMismatch(i64, i64),

    #[error("operation requires a binary operator, got arity {0}")]
    NotBinary(usize),

    #[error("output radix {q} is smaller than input radix {p}")]
    OutputRadixTooSmall { p: u32, q: u32 },

    #[error("invalid domain: {0}")]
    InvalidDomain(String),

    #[error("invalid resolution: {0}")]
    InvalidResolution(String),

    #[error("grid is not square ({0})")]
    NotSquare(String),

    #[error("worker pool: {0}")]
    Workers(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
