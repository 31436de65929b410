use alloc::string::String;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("malformed measure: {0}")]
    Malformed(String),

    #[error("alpha takes the value 0 with positive probability (or its support contains 0)")]
    ZeroAlpha,

    #[error("log-moment E{{ln max(|beta|, 1)}} diverges")]
    MomentDivergence,

    #[error("{operation} requires K {expected}, got K = {k}")]
    Regime {
        operation: &'static str,
        expected: &'static str,
        k: f64,
    },

    #[error(
        "{operation}: P(alpha < 0) = {q} > 0; F_Upsilon then solves y(x) = 1 - E{{y(alpha(x - beta))}}, \
         not the archetypal equation"
    )]
    NegativeAlpha { operation: &'static str, q: f64 },

    #[error("{operation} requires P(alpha < 0) > 0")]
    NotApplicable { operation: &'static str },

    #[error("degenerate measure: alpha(c - beta) = c almost surely{}", fixed_point_suffix(*.fixed_point))]
    Degenerate { fixed_point: Option<f64> },

    #[error("|alpha| = 1 almost surely")]
    UnitScale,

    #[error("stopping time exceeded {max_steps} steps")]
    NotTerminated { max_steps: usize },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("unknown preset '{0}'")]
    UnknownPreset(String),

    #[error("precondition failed: {0}")]
    Precondition(String),
}

fn fixed_point_suffix(c: Option<f64>) -> String {
    match c {
        Some(c) => alloc::format!(" with c = {c}"),
        None => String::new(),
    }
}
