use thiserror::Error;

use crate::Vec2;

#[derive(Debug, Error)]
pub enum MpmError {
    #[error("position ({x}, {y}) lies outside the grid bounds{}", point_label(*.point))]
    OutOfDomain { x: f64, y: f64, point: Option<usize> },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("domain too thin for EBS: degenerated node {node} has no stable 3^d block within the grid")]
    DomainTooThin { node: usize },

    #[error("element inversion at point {point}, step {step}: det(F) = {det:e}")]
    ElementInversion { point: usize, step: usize, det: f64 },

    #[error("degenerate master segment ({a}, {b}) of length {length:e} m")]
    DegenerateSegment { a: usize, b: usize, length: f64 },

    #[error("contract violation: {0}")]
    ContractViolation(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("scenario validation failed:\n  {}", .0.join("\n  "))]
    Validation(Vec<String>),

    #[error("step {step}: {source}")]
    AtStep {
        step: usize,
        #[source]
        source: Box<MpmError>,
    },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

fn point_label(point: Option<usize>) -> String {
    match point {
        Some(p) => format!(" (material point {p})"),
        None => String::new(),
    }
}

impl MpmError {
    pub(crate) fn out_of_domain(x: Vec2) -> Self {
        MpmError::OutOfDomain { x: x.x, y: x.y, point: None }
    }

    /// Attaches a material point id to an out-of-domain error.
    pub(crate) fn for_point(self, id: usize) -> Self {
        match self {
            MpmError::OutOfDomain { x, y, .. } => MpmError::OutOfDomain { x, y, point: Some(id) },
            other => other,
        }
    }

    pub(crate) fn at_step(self, step: usize) -> Self {
        match self {
            e @ MpmError::AtStep { .. } => e,
            e => MpmError::AtStep { step, source: Box::new(e) },
        }
    }
}

pub type Result<T> = std::result::Result<T, MpmError>;
