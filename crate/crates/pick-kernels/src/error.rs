//! Error type shared by every operation in the crate.

use crate::point::Point;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("point set must be nonempty")]
    EmptyPointSet,

    #[error("{labels} labels for {points} points")]
    LabelCountMismatch { points: usize, labels: usize },

    #[error("non-finite point ({re}, {im})")]
    NonFinitePoint { re: f64, im: f64 },

    #[error("power kernel exponent must be finite and positive, got {alpha}")]
    InvalidAlpha { alpha: f64 },

    #[error("point {point} lies outside the open unit disk")]
    DomainError { point: Point },

    #[error("point {point} is not a node of the tabulated kernel")]
    UnknownPoint { point: Point },

    #[error("non-finite matrix entry at ({row}, {col})")]
    NonFiniteEntry { row: usize, col: usize },

    #[error("matrix must be square and nonempty, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("tolerance must be {requirement}, got {tol}")]
    InvalidTolerance { tol: f64, requirement: &'static str },

    #[error("matrix is not PSD at the requested tolerance (min eigenvalue {min_eigenvalue:e})")]
    NotPsd { min_eigenvalue: f64 },

    #[error("kernel value vanishes at ({x}, {y}); quotient criterion undefined")]
    VanishingKernel { x: Point, y: Point },

    #[error("degenerate base point: k(z,z) = {value:e} is not positive")]
    DegenerateBasePoint { value: f64 },

    #[error("target {index} has shape {rows}x{cols}, expected {expected_rows}x{expected_cols}")]
    ShapeMismatch {
        index: usize,
        rows: usize,
        cols: usize,
        expected_rows: usize,
        expected_cols: usize,
    },

    #[error("{targets} target matrices for {points} points")]
    TargetCountMismatch { points: usize, targets: usize },

    #[error("feasibility bracket exceeded {max_doublings} doublings without a PSD defect; the ambient Gram is likely not PSD")]
    NonConvergence { max_doublings: u32 },

    #[error("precondition failed: {0}")]
    PreconditionFailed(String),

    #[error("base interpolation data is infeasible (min eigenvalue {min_eigenvalue:e})")]
    InfeasibleBase { min_eigenvalue: f64 },

    #[error("induction hypothesis is not PSD (min eigenvalue {min_eigenvalue:e})")]
    HypothesisFailed { min_eigenvalue: f64 },

    #[error("at base point {point} (index {index}): {source}")]
    AtBasePoint {
        index: usize,
        point: Point,
        #[source]
        source: Box<Error>,
    },

    #[error("at induction step {step}: {source}")]
    AtStep {
        step: usize,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    /// Stable machine-readable code, used by the CLI error document.
    pub fn code(&self) -> &'static str {
        match self {
            Error::EmptyPointSet => "empty_point_set",
            Error::LabelCountMismatch { .. } => "label_count_mismatch",
            Error::NonFinitePoint { .. } => "non_finite_point",
            Error::InvalidAlpha { .. } => "invalid_alpha",
            Error::DomainError { .. } => "domain_error",
            Error::UnknownPoint { .. } => "unknown_point",
            Error::NonFiniteEntry { .. } => "non_finite_entry",
            Error::NotSquare { .. } => "not_square",
            Error::DimensionMismatch { .. } => "dimension_mismatch",
            Error::InvalidTolerance { .. } => "invalid_tolerance",
            Error::NotPsd { .. } => "not_psd",
            Error::VanishingKernel { .. } => "vanishing_kernel",
            Error::DegenerateBasePoint { .. } => "degenerate_base_point",
            Error::ShapeMismatch { .. } => "shape_mismatch",
            Error::TargetCountMismatch { .. } => "target_count_mismatch",
            Error::NonConvergence { .. } => "non_convergence",
            Error::PreconditionFailed(_) => "precondition_failed",
            Error::InfeasibleBase { .. } => "infeasible_base",
            Error::HypothesisFailed { .. } => "hypothesis_failed",
            Error::AtBasePoint { source, .. } => source.code(),
            Error::AtStep { source, .. } => source.code(),
        }
    }
}
