//! Hyperbolic codes: configurations of geodesic half-spaces in hyperbolic
//! n-space whose boundaries meet at angle at least pi/2.
//!
//! The crate covers four layers:
//!
//! * [`lorentz`] — the signature-(1,n) form, vector classification, pairwise
//!   angles and the three equivalent right-angle conditions.
//! * [`halfspace`] — hyperboloid / ball / upper half-space model conversions
//!   and the (center, radius, orientation) presentation of a half-space.
//! * [`code`] — certified verification and normalization of strict codes,
//!   plus constructions from spherical codes.
//! * [`search`], [`bounds`], [`lattice`] — numerical optimization oracles,
//!   kissing-number bound reports, and the intersection-form layer that
//!   connects codes to families of negative curve classes on surfaces.

pub mod bounds;
pub mod code;
pub mod exact;
pub mod halfspace;
pub mod io;
pub mod lattice;
pub mod lorentz;
pub mod report;
pub mod search;
pub mod tol;

use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Error)]
pub enum HcError {
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("expected a negative vector, got I(w,w) = {0}")]
    NotNegative(f64),
    #[error("expected a positive vector, got I(w,w) = {0}")]
    NotPositive(f64),
    #[error("point is not on the upper hyperboloid sheet")]
    NotOnSheet,
    #[error("point is not inside the unit ball (norm {0})")]
    NotInBall(f64),
    #[error("half-space boundary lies in a vertical plane")]
    VerticalPlane,
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("code verification failed: {0}")]
    VerificationFailed(String),
    #[error("witness search failed: {0}")]
    WitnessNotFound(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("feasible set is empty for d1={0}, d2={1}")]
    EmptyFeasibleSet(f64, f64),
    #[error("kissing value unavailable for sphere dimension index {0} without a table")]
    KissingUnavailable(usize),
    #[error("matrix is not symmetric at ({0},{1})")]
    NotSymmetric(usize, usize),
    #[error("signature violation: expected (1,{expected_neg}), found {pos} positive, {neg} negative, {zero} zero")]
    SignatureViolation {
        expected_neg: usize,
        pos: usize,
        neg: usize,
        zero: usize,
    },
    #[error("modeling error: {0}")]
    ModelingError(String),
    #[error("the p/q interval is empty (beta^2 <= alpha*gamma)")]
    EmptyInterval,
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, HcError>;

/// `arccos(3/4)`, the critical separation angle from tangent/orthogonal
/// sphere configurations.
pub fn phi0() -> f64 {
    (3.0f64 / 4.0).acos()
}
