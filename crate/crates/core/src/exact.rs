//! Exact-rational backend for the signature-(1,n) form.
//!
//! Mirrors the sign-based operations of [`crate::lorentz`] over
//! arbitrary-precision rationals, for inputs given with rational
//! coordinates. Angle values themselves need square roots and stay in the
//! float backend; everything decidable by signs is decided exactly here.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::lorentz::{LorentzVector, VectorClass};
use crate::{HcError, Result};

/// A `(space; time)` vector with exact rational coordinates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalVector {
    pub space: Vec<BigRational>,
    pub time: BigRational,
}

impl RationalVector {
    pub fn dim(&self) -> usize {
        self.space.len()
    }

    pub fn to_float(&self) -> LorentzVector {
        LorentzVector {
            space: self.space.iter().map(rational_to_f64).collect(),
            time: rational_to_f64(&self.time),
        }
    }
}

pub fn rational_to_f64(r: &BigRational) -> f64 {
    let n = bigint_to_f64(r.numer());
    let d = bigint_to_f64(r.denom());
    n / d
}

fn bigint_to_f64(i: &BigInt) -> f64 {
    // Good to f64 precision for the magnitudes this crate handles.
    let s = i.to_string();
    s.parse::<f64>().unwrap_or(f64::NAN)
}

/// Parse `"p/q"`, `"p"`, or a decimal like `"-3.25"` into an exact rational.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p
            .trim()
            .parse()
            .map_err(|_| HcError::InvalidInput(format!("bad numerator in {s:?}")))?;
        let q: BigInt = q
            .trim()
            .parse()
            .map_err(|_| HcError::InvalidInput(format!("bad denominator in {s:?}")))?;
        if q.is_zero() {
            return Err(HcError::InvalidInput(format!("zero denominator in {s:?}")));
        }
        return Ok(BigRational::new(p, q));
    }
    if let Some((int, frac)) = s.split_once('.') {
        let neg = int.trim_start().starts_with('-');
        let int: BigInt = if int.is_empty() || int == "-" {
            BigInt::zero()
        } else {
            int.parse()
                .map_err(|_| HcError::InvalidInput(format!("bad number {s:?}")))?
        };
        let digits: BigInt = frac
            .parse()
            .map_err(|_| HcError::InvalidInput(format!("bad number {s:?}")))?;
        let denom = BigInt::from(10u32).pow(frac.len() as u32);
        let frac_part = BigRational::new(digits, denom);
        let int_part = BigRational::from_integer(int);
        return Ok(if neg {
            int_part - frac_part
        } else {
            int_part + frac_part
        });
    }
    let p: BigInt = s
        .parse()
        .map_err(|_| HcError::InvalidInput(format!("bad number {s:?}")))?;
    Ok(BigRational::from_integer(p))
}

/// Exact `I((v; u), (v'; u')) = -<v, v'> + u u'`.
pub fn inner(w1: &RationalVector, w2: &RationalVector) -> Result<BigRational> {
    if w1.dim() != w2.dim() {
        return Err(HcError::DimensionMismatch(w1.dim(), w2.dim()));
    }
    let mut acc = &w1.time * &w2.time;
    for (a, b) in w1.space.iter().zip(&w2.space) {
        acc -= a * b;
    }
    Ok(acc)
}

/// Exact sign classification; a rational never lands in a tolerance band.
pub fn classify(w: &RationalVector) -> VectorClass {
    let q = inner(w, w).expect("self inner product");
    if q.is_zero() {
        VectorClass::Null
    } else if q.is_negative() {
        VectorClass::Negative
    } else {
        VectorClass::Positive
    }
}

/// Exact decision of the right-angle condition `beta >= 0` and
/// `beta^2 <= alpha gamma` for two negative vectors, with the boundary
/// (equality) case distinguished.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExactRightAngle {
    /// Strict: `beta >= 0` and `beta^2 < alpha gamma`.
    Holds,
    /// Boundary: `beta^2 = alpha gamma` (tangent) with `beta >= 0`.
    Boundary,
    Fails,
}

pub fn angle_at_least_right(w1: &RationalVector, w2: &RationalVector) -> Result<ExactRightAngle> {
    let alpha = inner(w1, w1)?;
    let gamma = inner(w2, w2)?;
    if !alpha.is_negative() {
        return Err(HcError::NotNegative(rational_to_f64(&alpha)));
    }
    if !gamma.is_negative() {
        return Err(HcError::NotNegative(rational_to_f64(&gamma)));
    }
    let beta = inner(w1, w2)?;
    if beta.is_negative() {
        return Ok(ExactRightAngle::Fails);
    }
    let lhs = &beta * &beta;
    let rhs = &alpha * &gamma;
    Ok(match lhs.cmp(&rhs) {
        std::cmp::Ordering::Less => ExactRightAngle::Holds,
        std::cmp::Ordering::Equal => ExactRightAngle::Boundary,
        std::cmp::Ordering::Greater => ExactRightAngle::Fails,
    })
}
