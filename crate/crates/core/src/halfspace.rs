//! Conversions among the hyperboloid, ball, and upper half-space models,
//! and the (center, radius, orientation) presentation of a geodesic
//! half-space in the upper model.
//!
//! The ball <-> upper half-space map used here is the Cayley-type inversion
//! with pole at the first ball coordinate: interior
//! `p -> ((2 p_2, ..., 2 p_n), 1 - |p|^2) / (|p|^2 - 2 p_1 + 1)`, whose
//! boundary extension is stereographic projection from `e_1` (which itself
//! maps to the point at infinity). Any isometry with this boundary behavior
//! is acceptable downstream; the distance-preservation tests pin it.

use serde::{Deserialize, Serialize};

use crate::lorentz::{inner, LorentzVector};
use crate::report::Verdict;
use crate::{HcError, Result};

/// Interior point of the ball model (`|coords| < 1`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BallPoint {
    pub coords: Vec<f64>,
}

/// Interior point of the upper half-space model (last coordinate > 0).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UpperPoint {
    pub coords: Vec<f64>,
}

/// Point of the ideal boundary of the upper model: `R^{n-1}` plus the point
/// at infinity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum IdealPoint {
    Finite(Vec<f64>),
    Infinity,
}

/// Upper half-space presentation of a geodesic half-space: a Euclidean
/// sphere with center on the boundary plane, or a vertical plane.
///
/// `delta = +1` when the half-space is the intersection of the upper model
/// with the closed ball (the center lies in the half-space closure),
/// `delta = -1` for the exterior.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum HalfSpaceDescriptor {
    Sphere {
        center: Vec<f64>,
        radius: f64,
        delta: i8,
    },
    Vertical {
        delta: i8,
    },
}

impl HalfSpaceDescriptor {
    pub fn sphere(center: Vec<f64>, radius: f64, delta: i8) -> Self {
        HalfSpaceDescriptor::Sphere {
            center,
            radius,
            delta,
        }
    }

    pub fn is_vertical(&self) -> bool {
        matches!(self, HalfSpaceDescriptor::Vertical { .. })
    }
}

fn sq_norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum()
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Projection from `(0; -1)`: a sheet point `(v; u)` maps to `v / (1 + u)`.
pub fn hyperboloid_to_ball(q: &LorentzVector, eps: f64) -> Result<BallPoint> {
    let norm = inner(q, q)?;
    if (norm - 1.0).abs() > eps.max(1e-7) || q.time <= 0.0 {
        return Err(HcError::NotOnSheet);
    }
    Ok(BallPoint {
        coords: q.space.iter().map(|x| x / (1.0 + q.time)).collect(),
    })
}

/// Inverse of [`hyperboloid_to_ball`].
pub fn ball_to_hyperboloid(p: &BallPoint) -> Result<LorentzVector> {
    let r2 = sq_norm(&p.coords);
    if r2 >= 1.0 {
        return Err(HcError::NotInBall(r2.sqrt()));
    }
    let f = 1.0 - r2;
    Ok(LorentzVector {
        space: p.coords.iter().map(|x| 2.0 * x / f).collect(),
        time: (1.0 + r2) / f,
    })
}

/// Ball interior to upper half-space interior.
pub fn ball_to_upper(p: &BallPoint) -> Result<UpperPoint> {
    let r2 = sq_norm(&p.coords);
    if r2 >= 1.0 {
        return Err(HcError::NotInBall(r2.sqrt()));
    }
    let d = r2 - 2.0 * p.coords[0] + 1.0;
    let mut coords: Vec<f64> = p.coords[1..].iter().map(|x| 2.0 * x / d).collect();
    coords.push((1.0 - r2) / d);
    Ok(UpperPoint { coords })
}

/// Upper half-space interior to ball interior.
pub fn upper_to_ball(z: &UpperPoint) -> Result<BallPoint> {
    let n = z.coords.len();
    let height = z.coords[n - 1];
    if height <= 0.0 {
        return Err(HcError::Degenerate(format!(
            "upper half-space point with height {height}"
        )));
    }
    let r2 = sq_norm(&z.coords);
    let d = r2 + 2.0 * height + 1.0;
    let mut coords = Vec::with_capacity(n);
    coords.push((r2 - 1.0) / d);
    for x in &z.coords[..n - 1] {
        coords.push(2.0 * x / d);
    }
    Ok(BallPoint { coords })
}

/// Boundary extension of the ball -> upper map: stereographic projection of
/// the unit sphere from `e_1`, with `e_1` itself going to infinity.
pub fn boundary_ball_to_upper(x: &[f64], eps: f64) -> Result<IdealPoint> {
    let r = sq_norm(x).sqrt();
    if (r - 1.0).abs() > eps.max(1e-7) {
        return Err(HcError::Degenerate(format!(
            "boundary point has norm {r}, expected 1"
        )));
    }
    let denom = 1.0 - x[0];
    if denom.abs() <= eps {
        return Ok(IdealPoint::Infinity);
    }
    Ok(IdealPoint::Finite(
        x[1..].iter().map(|v| v / denom).collect(),
    ))
}

/// Inverse boundary extension: `R^{n-1}` plus infinity back to the unit
/// sphere in `R^n`.
pub fn boundary_upper_to_ball(p: &IdealPoint, n: usize) -> Vec<f64> {
    match p {
        IdealPoint::Infinity => {
            let mut x = vec![0.0; n];
            x[0] = 1.0;
            x
        }
        IdealPoint::Finite(z) => {
            let r2 = sq_norm(z);
            let d = r2 + 1.0;
            let mut x = Vec::with_capacity(n);
            x.push((r2 - 1.0) / d);
            for v in z {
                x.push(2.0 * v / d);
            }
            x
        }
    }
}

/// Ideal boundary point of a null ray `(v; u)` with `u > 0`, in upper
/// half-space boundary coordinates.
pub fn null_ray_boundary_point(w: &LorentzVector, eps: f64) -> Result<IdealPoint> {
    if w.time <= 0.0 {
        return Err(HcError::Degenerate(
            "null ray must have positive time component".into(),
        ));
    }
    let x: Vec<f64> = w.space.iter().map(|v| v / w.time).collect();
    boundary_ball_to_upper(&x, eps)
}

/// Hyperbolic distance in the upper model:
/// `cosh d = 1 + |z - z'|^2 / (2 z_n z'_n)`.
pub fn upper_distance(a: &UpperPoint, b: &UpperPoint) -> f64 {
    let n = a.coords.len();
    let d2: f64 = a
        .coords
        .iter()
        .zip(&b.coords)
        .map(|(x, y)| (x - y) * (x - y))
        .sum();
    let c = 1.0 + d2 / (2.0 * a.coords[n - 1] * b.coords[n - 1]);
    c.acosh()
}

/// Closed-form (center, radius, orientation) of the half-space of a
/// negative vector `w = (v; u)`: writing `t = v_1 - u`, the boundary sphere
/// is centered at `-(v_2, ..., v_n)/t` with radius `sqrt(-I(w,w))/|t|`, and
/// the presentation is a vertical plane exactly when `t = 0`.
pub fn descriptor(w: &LorentzVector, eps: f64) -> Result<HalfSpaceDescriptor> {
    let q = inner(w, w)?;
    if q >= 0.0 {
        return Err(HcError::NotNegative(q));
    }
    let t = w.space[0] - w.time;
    let scale = w.euclid_norm();
    if t.abs() <= eps * scale {
        // The ideal boundary circle passes through the stereographic pole.
        let delta = if w.time >= w.space[0] { 1 } else { -1 };
        return Ok(HalfSpaceDescriptor::Vertical { delta });
    }
    let center: Vec<f64> = w.space[1..].iter().map(|v| -v / t).collect();
    let radius = (-q).sqrt() / t.abs();
    let delta = if t < 0.0 { 1 } else { -1 };
    Ok(HalfSpaceDescriptor::Sphere {
        center,
        radius,
        delta,
    })
}

/// Inverse of [`descriptor`]: the unique negative vector with `I(w,w) = -1`
/// presenting the given sphere.
pub fn vector_from_descriptor(d: &HalfSpaceDescriptor) -> Result<LorentzVector> {
    match d {
        HalfSpaceDescriptor::Vertical { .. } => Err(HcError::VerticalPlane),
        HalfSpaceDescriptor::Sphere {
            center,
            radius,
            delta,
        } => {
            if *radius <= 0.0 {
                return Err(HcError::Degenerate(format!(
                    "descriptor radius must be positive, got {radius}"
                )));
            }
            let s = *delta as f64;
            let z2 = sq_norm(center);
            let r = *radius;
            let mut space = Vec::with_capacity(center.len() + 1);
            space.push(s * (z2 - r * r - 1.0) / (2.0 * r));
            for c in center {
                space.push(s * c / r);
            }
            let time = s * (z2 - r * r + 1.0) / (2.0 * r);
            Ok(LorentzVector { space, time })
        }
    }
}

/// Per-side verdicts of the pairwise right-angle test in descriptor form.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PairConditionReport {
    /// +1 when both orientations agree (inequality block 5.9), -1 otherwise
    /// (block 5.10).
    pub orientation_product: i8,
    pub lower: Verdict,
    pub upper: Verdict,
}

impl PairConditionReport {
    pub fn verdict(&self) -> Verdict {
        self.lower.and(self.upper)
    }
}

/// Center-distance window test: `theta(w1, w2) >= pi/2` iff
/// `sqrt(d1^2 + d2^2) <= |z1 - z2| <= d1 + d2` (same orientations) or
/// `|d1 - d2| <= |z1 - z2| <= sqrt(d1^2 + d2^2)` (opposite orientations).
pub fn pair_condition(
    d1: &HalfSpaceDescriptor,
    d2: &HalfSpaceDescriptor,
    eps: f64,
) -> Result<PairConditionReport> {
    let (z1, r1, s1) = match d1 {
        HalfSpaceDescriptor::Sphere {
            center,
            radius,
            delta,
        } => (center, *radius, *delta),
        HalfSpaceDescriptor::Vertical { .. } => return Err(HcError::VerticalPlane),
    };
    let (z2, r2, s2) = match d2 {
        HalfSpaceDescriptor::Sphere {
            center,
            radius,
            delta,
        } => (center, *radius, *delta),
        HalfSpaceDescriptor::Vertical { .. } => return Err(HcError::VerticalPlane),
    };
    if z1.len() != z2.len() {
        return Err(HcError::DimensionMismatch(z1.len(), z2.len()));
    }
    let gap = dist(z1, z2);
    let scale = (r1 + r2).max(gap).max(1e-300);
    let product = s1 * s2;
    let (lo, hi) = if product == 1 {
        ((r1 * r1 + r2 * r2).sqrt(), r1 + r2)
    } else {
        ((r1 - r2).abs(), (r1 * r1 + r2 * r2).sqrt())
    };
    Ok(PairConditionReport {
        orientation_product: product,
        lower: Verdict::from_margin((gap - lo) / scale, eps),
        upper: Verdict::from_margin((hi - gap) / scale, eps),
    })
}
