//! Default tolerances, collected in one place so the CLI and the library
//! agree on what "marginal" means.

/// Classification tolerance: |I(w,w)| below this is reported as null.
pub const EPS_CLS: f64 = 1e-9;

/// Angle tolerance for boundary-intersection and right-angle tests.
pub const EPS_ANG: f64 = 1e-9;

/// Isometry residual tolerance.
pub const EPS_ISO: f64 = 1e-9;

/// Ideal-boundary detection tolerance for ball points.
pub const EPS_BND: f64 = 1e-9;

/// Compatibility slack for the spherical-code construction
/// (`sin(tau/2) <= sqrt(2) sin(phi/2)` up to this much).
pub const EPS_CONS: f64 = 1e-9;

/// Signature tolerance for floating-point eigen/congruence computations.
pub const EPS_SIG: f64 = 1e-9;

/// Runtime-configurable tolerance bundle. All verification entry points
/// take one of these; [`Tolerances::default`] matches the constants above.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub cls: f64,
    pub ang: f64,
    pub iso: f64,
    pub bnd: f64,
    pub cons: f64,
    pub sig: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            cls: EPS_CLS,
            ang: EPS_ANG,
            iso: EPS_ISO,
            bnd: EPS_BND,
            cons: EPS_CONS,
            sig: EPS_SIG,
        }
    }
}

impl Tolerances {
    /// Uniform tolerance across all checks.
    pub fn uniform(tol: f64) -> Self {
        Tolerances {
            cls: tol,
            ang: tol,
            iso: tol,
            bnd: tol,
            cons: tol,
            sig: tol,
        }
    }
}
