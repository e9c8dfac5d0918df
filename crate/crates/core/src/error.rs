use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("extent {extent} along axis {axis} is not an integer multiple of h = {h}")]
    NonDivisibleExtent { axis: usize, extent: f64, h: f64 },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("horizon {delta} is not an integer multiple of h = {h}")]
    NonIntegralHorizon { delta: f64, h: f64 },

    #[error("node index {index:?} outside grid dims {dims:?}")]
    OutOfRange { index: Vec<usize>, dims: Vec<usize> },

    #[error("2D models need a plate thickness")]
    MissingThickness,

    #[error("horizon band M = {m} too wide for axis {axis} with {n} nodes (need 2N >= 2M + 2)")]
    HorizonTooLargeForGrid { axis: usize, n: usize, m: usize },

    #[error("shape mismatch: expected {expected} values, got {got}")]
    ShapeMismatch { expected: usize, got: usize },

    #[error("broken bond ({p}, {q}) is outside the horizon band")]
    LedgerOutOfBand { p: usize, q: usize },

    #[error("no surface-correction coefficient for bond ({p}, {q})")]
    MissingCoefficients { p: usize, q: usize },

    #[error("non-finite {field} at step {step} (node {node}, component {component})")]
    NonFinite {
        field: &'static str,
        step: usize,
        node: usize,
        component: usize,
    },

    #[error("unknown scenario {0:?}: not a preset name or an existing file")]
    UnknownScenario(String),

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("invalid configuration:\n{}", .0.iter().map(|v| format!("  {v}")).collect::<Vec<_>>().join("\n"))]
    Validation(Vec<crate::sim::config::Violation>),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
