use thiserror::Error;

use crate::repfinder::SearchResult;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not in U(2,1): residual {residual:e} exceeds {tol:e}")]
    NotU21 { residual: f64, tol: f64 },

    #[error("matrix is not in u(2,1): residual {residual:e} exceeds {tol:e}")]
    NotLieAlgebra { residual: f64, tol: f64 },

    #[error("angle coordinates violate the G congruences: {0}")]
    InvalidGElement(String),

    #[error("non-finite matrix entry")]
    NonFinite,

    /// Re(1 + (a31 b13 + a32 b23)/(a33 b33)) <= 0 in the group law.
    #[error("correction term left the principal half-plane (real part {real_part:e})")]
    CorrectionBranch { real_part: f64 },

    #[error("eigenvalue computation failed: {0}")]
    DegenerateSpectrum(String),

    #[error("parameters do not match family {family}: {detail}")]
    FamilyMismatch { family: String, detail: String },

    #[error("invalid connection path: {0}")]
    InvalidPath(String),

    #[error("Seifert invariants are not pairwise coprime: {0}")]
    NotCoprime(String),

    #[error("invalid Seifert presentation: {0}")]
    InvalidPresentation(String),

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("representation data violates {constraint}")]
    InvalidRepData { constraint: String },

    #[error("angle data cannot be lifted: {0}")]
    Unliftable(String),

    #[error("eigenvalue angle {angle} is {distance:e} turns from every target fraction")]
    SnapFailure { angle: f64, distance: f64 },

    #[error("search did not converge: best residual {:e}", .0.residual)]
    NoConvergence(Box<SearchResult>),

    #[error("found matrices do not lift to a representation into G: {0}")]
    LiftMismatch(String),

    #[error("invalid rational literal {0:?}")]
    ParseRational(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
