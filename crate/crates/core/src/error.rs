use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("entries are not pairwise distinct (value {0} repeats)")]
    DuplicateValues(i64),

    #[error("not a permutation of 1..{n}: {reason}")]
    NotAPermutation { n: usize, reason: String },

    #[error("value {value} outside the alphabet 1..{r}")]
    ValueOutOfRange { value: i64, r: u32 },

    #[error("index {index} outside 1..{n}")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("occurrence selects symbol {symbol} more than once")]
    RepeatedSymbol { symbol: u32 },

    #[error("occurrence is malformed: {0}")]
    InvalidOccurrence(String),

    #[error("pattern length {k} exceeds the supported maximum of {max}")]
    Capacity { k: usize, max: usize },

    #[error("enumeration of {required} subsets exceeds the budget of {budget}")]
    BudgetExceeded { required: String, budget: u64 },

    #[error("cannot choose {k} items out of {n}")]
    SubsetTooLarge { n: usize, k: usize },

    #[error("width semantics need an odd pattern length, got k = {0}")]
    EvenPatternLength(usize),

    #[error("malformed encoding: {0}")]
    MalformedEncoding(String),

    #[error("sequence alphabet is [{r}] but the encoding needs [{k}]")]
    AlphabetMismatch { r: u32, k: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("bound is vacuous: {0}")]
    VacuousBound(String),

    #[error("unknown certificate '{0}'")]
    UnknownCertificate(String),

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// Stable machine-readable identifier, used by the CLI on stderr.
    pub fn code(&self) -> &'static str {
        match self {
            Error::DuplicateValues(_) => "duplicate_values",
            Error::NotAPermutation { .. } => "not_a_permutation",
            Error::ValueOutOfRange { .. } => "value_out_of_range",
            Error::IndexOutOfRange { .. } => "index_out_of_range",
            Error::RepeatedSymbol { .. } => "repeated_symbol",
            Error::InvalidOccurrence(_) => "invalid_occurrence",
            Error::Capacity { .. } => "capacity",
            Error::BudgetExceeded { .. } => "budget_exceeded",
            Error::SubsetTooLarge { .. } => "subset_too_large",
            Error::EvenPatternLength(_) => "even_pattern_length",
            Error::MalformedEncoding(_) => "malformed_encoding",
            Error::AlphabetMismatch { .. } => "alphabet_mismatch",
            Error::InvalidParameter(_) => "invalid_parameter",
            Error::VacuousBound(_) => "vacuous_bound",
            Error::UnknownCertificate(_) => "unknown_certificate",
            Error::Parse(_) => "parse_error",
        }
    }
}
