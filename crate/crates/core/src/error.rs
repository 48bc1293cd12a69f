use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("vector has a non-finite coordinate at index {0}")]
    NonFinite(usize),

    #[error("invalid cone: {0}")]
    InvalidCone(String),

    #[error("vector is not an order unit of the cone")]
    NotOrderUnit,

    #[error("vector is not in the cone: {0}")]
    NotInCone(String),

    #[error("{op}: bracketing did not terminate after {doublings} doublings")]
    BracketFailed { op: &'static str, doublings: u32 },

    #[error("{op}: independent routes disagree ({detail})")]
    RouteMismatch { op: &'static str, detail: String },

    #[error("metric violates its axioms ({0} violations)")]
    AxiomsViolated(usize),

    #[error("invalid metric: {0}")]
    InvalidMetric(String),

    #[error("unknown point `{0}`")]
    UnknownPoint(String),

    #[error("banach_iterate: map is not a contraction ({})", contraction_detail(*.0))]
    NotContraction(Option<f64>),

    #[error("banach_iterate: iteration budget of {max_iter} exhausted; best iterate `{best}`")]
    MaxIterExhausted { max_iter: usize, best: String },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("{location}: {message}")]
    Parse { location: String, message: String },
}

impl Error {
    /// Whether the error comes from a numerical procedure rather than from
    /// malformed input.
    pub fn is_numeric(&self) -> bool {
        matches!(
            self,
            Error::BracketFailed { .. }
                | Error::RouteMismatch { .. }
                | Error::NotContraction(_)
                | Error::MaxIterExhausted { .. }
        )
    }
}

fn contraction_detail(k: Option<f64>) -> String {
    match k {
        Some(k) => format!("k = {k}"),
        None => "some pair has no dominating scale".into(),
    }
}
