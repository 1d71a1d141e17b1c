use thiserror::Error;

/// Errors raised by the geometric layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid frame: {0}")]
    InvalidFrame(String),
    #[error("not a unit quaternion (|q| = {0})")]
    NotUnit(f64),
    #[error("not a pure imaginary quaternion (real part {0})")]
    NotImaginary(f64),
    #[error("vector not tangent to the base point (<v, p> = {0})")]
    NotTangent(f64),
    #[error("tangent vectors are based at different points")]
    BasePointMismatch,
    #[error("vector not orthogonal to the flow direction (<u, X> = {0})")]
    NotOrthogonal(f64),
    #[error("point outside the plane of the great circle (defect {0})")]
    OffPlane(f64),
    #[error("point outside the domain of the map (chart |z| = {0})")]
    Domain(f64),
    #[error("point within one finite-difference step of the domain boundary (chart |z| = {0})")]
    Boundary(f64),
    #[error("fixed-point iteration left the fibred region: {0}")]
    Coverage(String),
    #[error("fixed-point iteration did not converge in {iterations} steps (residual {residual:e})")]
    Convergence { iterations: usize, residual: f64 },
    #[error("empty sample")]
    EmptySample,
    #[error("degenerate Grassmann variation: {0}")]
    DegenerateVariation(String),
    #[error("invalid kernel vector: {0}")]
    InvalidKernelVector(String),
    #[error("invalid fibration spec: {0}")]
    Spec(String),
    #[error("invalid configuration: {0}")]
    Config(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
