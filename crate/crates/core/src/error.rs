use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix shape mismatch: expected {expected}x{expected}, row {row} has {got} entries")]
    Shape { expected: usize, row: usize, got: usize },

    #[error("{labels} labels given for a {n}-point space")]
    LabelCount { labels: usize, n: usize },

    #[error("index {index} out of range for a {n}-point space")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("space has no point at infinity")]
    NoOmega,

    #[error("point {0} is the point at infinity")]
    OmegaArgument(usize),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("need at least {need} finite points, have {have}")]
    TooFewPoints { need: usize, have: usize },

    #[error("quadruple {0:?} is not admissible (a point occurs three or more times)")]
    Inadmissible([usize; 4]),

    #[error("diameter {diameter} violates the bound {bound} required for positive curvature")]
    DiameterBound { diameter: f64, bound: f64 },

    #[error("point {point} is at distance zero from the involution point {omega}")]
    ZeroDistanceToOmega { omega: usize, point: usize },

    #[error("point-at-infinity mismatch: {0:?} vs {1:?}")]
    OmegaMismatch(Option<usize>, Option<usize>),

    #[error("size mismatch: {0} vs {1} points")]
    SizeMismatch(usize, usize),

    #[error("side lengths ({0}, {1}, {2}) violate the triangle inequality")]
    TriangleInequality(f64, f64, f64),

    #[error("point violates the hyperboloid constraint by {0:e}")]
    OffSheet(f64),

    #[error("invalid height: {0}")]
    Height(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
