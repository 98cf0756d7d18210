use thiserror::Error;

use crate::expr::ExprError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error("metric is singular (condition number {condition:.3e})")]
    SingularMetric { condition: f64 },
    #[error("metric is not positive definite (leading minor {minor} = {value:.3e})")]
    NotPositiveDefinite { minor: usize, value: f64 },
    #[error("slot {slot} is out of range for a rank-{rank} tensor")]
    SlotOutOfRange { slot: usize, rank: usize },
    #[error("variance mismatch: {0}")]
    VarianceMismatch(String),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("degenerate plane: |pi1(x,y,y,x)| = {value:.3e}")]
    DegeneratePlane { value: f64 },
    #[error("degenerate structure: {0}")]
    DegenerateStructure(String),
    #[error("structure endomorphism required for starred curvature quantities")]
    MissingStructure,
    #[error("point outside the chart domain: {0}")]
    Domain(String),
    #[error("input is not a valid fundamental tensor (symmetry residual {residual:.3e} > {tolerance:.3e})")]
    SymmetryViolation { residual: f64, tolerance: f64 },
}
