use thiserror::Error;

/// Errors produced by the core library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid polygon: {0}")]
    InvalidPolygon(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("region is empty")]
    EmptyRegion,

    #[error("duplicate Voronoi site at ({x}, {y})")]
    DuplicateSite { x: f64, y: f64 },

    #[error("site ({x}, {y}) lies outside the domain")]
    SiteOutsideDomain { x: f64, y: f64 },

    #[error("centers {i} and {j} are {distance} apart, closer than {required}")]
    SeparationViolated {
        i: usize,
        j: usize,
        distance: f64,
        required: f64,
    },

    #[error("degenerate triangle {index} (area {area:e})")]
    DegenerateTriangle { index: usize, area: f64 },

    #[error("factorization failed: {0}")]
    Factorization(String),

    #[error("eigensolver did not converge after {iterations} iterations (best residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("no constant in [{lo}, {hi}] produced a verified certificate")]
    NoVerifiedConstant { lo: f64, hi: f64 },

    #[error("partition needs at least {at_least} cells, more than the limit {limit}")]
    PartitionTooLarge { at_least: usize, limit: usize },

    #[error("json: {0}")]
    Json(String),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Json(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
