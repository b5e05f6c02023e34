use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("shape mismatch: expected {expected} values, got {got}")]
    Shape { expected: usize, got: usize },

    #[error("unsupported dimension N = {0} (only 1, 2 and 3 are supported)")]
    UnsupportedDimension(usize),

    #[error("invalid configuration: {field}: {reason}")]
    InvalidConfig { field: &'static str, reason: String },

    #[error("numerical breakdown in cell {cell}: {what}")]
    NumericalBreakdown { cell: usize, what: String },

    #[error("characteristics cross at t* = {t_star}, requested t = {t}")]
    Crossing { t: f64, t_star: f64 },

    #[error("blowup bound not applicable: {0}")]
    Inapplicable(String),

    #[error("density {value} in cell {cell} at t = {time} violates positivity")]
    PositivityViolated { cell: usize, value: f64, time: f64 },

    #[error("initial data rejected: {0}")]
    Validation(String),
}

impl Error {
    pub(crate) fn config(field: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidConfig {
            field,
            reason: reason.into(),
        }
    }
}
