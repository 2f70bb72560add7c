use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum WeightError {
    #[error("power exponent must be finite, got {0}")]
    NonFiniteExponent(f64),
    #[error("weight entry {index} must be finite and nonnegative, got {value}")]
    InvalidEntry { index: usize, value: f64 },
    #[error("line {line}: cannot parse {text:?} as a number")]
    Parse { line: usize, text: String },
    #[error("csv: {0}")]
    Csv(String),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpecialError {
    #[error("series diverges for parameter {0}")]
    Divergent(f64),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NormError {
    /// The requested cone is outside what the formulas cover: either the row
    /// sign pattern fails the cone hypothesis or the case is an open problem.
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("invalid truncation config: {0}")]
    Config(String),
}
