//! The signature-(1,n) inner product, vector classification, pairwise
//! angles, and the three equivalent formulations of "angle at least pi/2".
//!
//! Vectors are stored as `(space..., time)` and the form is
//! `I((v; u), (v'; u')) = -<v, v'> + u * u'`. The upper hyperboloid sheet is
//! `{w : I(w, w) = 1, time > 0}`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::report::Verdict;
use crate::{HcError, Result};

/// A vector of `R^n _|_ R` with the split `(space; time)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LorentzVector {
    pub space: Vec<f64>,
    pub time: f64,
}

/// Sign class of `I(w, w)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VectorClass {
    Negative,
    Null,
    Positive,
}

/// Dihedral angle between two half-space boundaries, or the marker for
/// boundaries that do not meet.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AngleResult {
    Angle(f64),
    Disjoint,
}

impl AngleResult {
    pub fn angle(self) -> Option<f64> {
        match self {
            AngleResult::Angle(a) => Some(a),
            AngleResult::Disjoint => None,
        }
    }
}

impl LorentzVector {
    pub fn new(space: Vec<f64>, time: f64) -> Self {
        LorentzVector { space, time }
    }

    /// Ambient spatial dimension n.
    pub fn dim(&self) -> usize {
        self.space.len()
    }

    /// The point `(0^n; 1)`, the apex of the upper sheet.
    pub fn sheet_origin(n: usize) -> Self {
        LorentzVector {
            space: vec![0.0; n],
            time: 1.0,
        }
    }

    pub fn scale(&self, c: f64) -> Self {
        LorentzVector {
            space: self.space.iter().map(|x| c * x).collect(),
            time: c * self.time,
        }
    }

    pub fn neg(&self) -> Self {
        self.scale(-1.0)
    }

    pub fn add(&self, other: &Self) -> Self {
        LorentzVector {
            space: self
                .space
                .iter()
                .zip(&other.space)
                .map(|(a, b)| a + b)
                .collect(),
            time: self.time + other.time,
        }
    }

    /// Euclidean norm of the full coordinate vector, used for scale-aware
    /// tolerances.
    pub fn euclid_norm(&self) -> f64 {
        let s: f64 = self.space.iter().map(|x| x * x).sum();
        (s + self.time * self.time).sqrt()
    }

    /// Scale so that `I(w, w) = -1`. Errors on a non-negative vector.
    pub fn normalize_negative(&self, eps: f64) -> Result<Self> {
        let q = inner(self, self)?;
        if q >= -eps {
            return Err(HcError::NotNegative(q));
        }
        Ok(self.scale(1.0 / (-q).sqrt()))
    }

    /// Scale onto the upper sheet `I(w, w) = 1, time > 0`.
    pub fn normalize_positive(&self, eps: f64) -> Result<Self> {
        let q = inner(self, self)?;
        if q <= eps {
            return Err(HcError::NotPositive(q));
        }
        let w = self.scale(1.0 / q.sqrt());
        if w.time > 0.0 {
            Ok(w)
        } else {
            Ok(w.neg())
        }
    }
}

/// `I((v; u), (v'; u')) = -<v, v'> + u * u'`.
pub fn inner(w1: &LorentzVector, w2: &LorentzVector) -> Result<f64> {
    if w1.dim() != w2.dim() {
        return Err(HcError::DimensionMismatch(w1.dim(), w2.dim()));
    }
    let dot: f64 = w1.space.iter().zip(&w2.space).map(|(a, b)| a * b).sum();
    Ok(-dot + w1.time * w2.time)
}

/// Sign of `I(w, w)`, with `|I(w,w)| <= eps` reported as null.
pub fn classify(w: &LorentzVector, eps: f64) -> VectorClass {
    let q = inner(w, w).expect("self inner product");
    if q.abs() <= eps {
        VectorClass::Null
    } else if q < 0.0 {
        VectorClass::Negative
    } else {
        VectorClass::Positive
    }
}

fn check_negative(w: &LorentzVector, eps: f64) -> Result<f64> {
    let q = inner(w, w)?;
    if q >= -eps {
        return Err(HcError::NotNegative(q));
    }
    Ok(q)
}

/// The dihedral angle, `cos(theta) = -I(w1,w2)/sqrt(I(w1,w1) I(w2,w2))`,
/// or [`AngleResult::Disjoint`] when the boundary hypersurfaces do not meet.
pub fn angle(w1: &LorentzVector, w2: &LorentzVector, eps: f64) -> Result<AngleResult> {
    let alpha = check_negative(w1, eps)?;
    let gamma = check_negative(w2, eps)?;
    let beta = inner(w1, w2)?;
    let denom = (alpha * gamma).sqrt();
    let c = -beta / denom;
    if c.abs() > 1.0 + eps {
        return Ok(AngleResult::Disjoint);
    }
    Ok(AngleResult::Angle(c.clamp(-1.0, 1.0).acos()))
}

/// Report for the three equivalent right-angle conditions.
///
/// * `cond_i`   — `theta(w1, w2) >= pi/2` with intersecting boundaries;
/// * `cond_ii`  — `I(w1, w2) >= 0` and the boundaries meet;
/// * `cond_iii` — `I(w1, w2) >= 0` and `I(a w1 + b w2, a w1 + b w2) <= 0`
///   for all `a, b >= 0`, decided analytically by `beta^2 <= alpha gamma`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RightAngleReport {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub cond_i: Verdict,
    pub cond_ii: Verdict,
    pub cond_iii: Verdict,
}

impl RightAngleReport {
    pub fn all_hold(&self) -> bool {
        self.cond_i.passes() && self.cond_ii.passes() && self.cond_iii.passes()
    }

    pub fn agree(&self) -> bool {
        self.cond_i.passes() == self.cond_ii.passes()
            && self.cond_ii.passes() == self.cond_iii.passes()
    }
}

/// Evaluate the three conditions of the right-angle lemma, each with its own
/// computational route. Margins are scaled by the vector magnitudes so the
/// verdicts are invariant under rescaling the inputs.
pub fn angle_at_least_right(
    w1: &LorentzVector,
    w2: &LorentzVector,
    eps: f64,
) -> Result<RightAngleReport> {
    let alpha = check_negative(w1, eps)?;
    let gamma = check_negative(w2, eps)?;
    let beta = inner(w1, w2)?;
    let scale = (alpha * gamma).sqrt();

    // (i): via the angle itself.
    let cond_i = match angle(w1, w2, eps)? {
        AngleResult::Disjoint => Verdict::Fails,
        AngleResult::Angle(theta) => {
            Verdict::from_margin(theta - std::f64::consts::FRAC_PI_2, eps)
        }
    };

    // (ii): sign of the pairing plus boundary intersection.
    let nonneg = Verdict::from_margin(beta / scale, eps);
    let meet = Verdict::from_margin((scale - beta.abs()) / scale, eps);
    let cond_ii = nonneg.and(meet);

    // (iii): the quadratic form alpha a^2 + 2 beta ab + gamma b^2 stays
    // nonpositive on the closed positive quadrant iff beta <= sqrt(alpha gamma)
    // (given alpha, gamma < 0), combined with the sign clause.
    let quad = if beta <= 0.0 {
        Verdict::Holds
    } else {
        Verdict::from_margin((alpha * gamma - beta * beta) / (scale * scale), eps)
    };
    let cond_iii = nonneg.and(quad);

    Ok(RightAngleReport {
        alpha,
        beta,
        gamma,
        cond_i,
        cond_ii,
        cond_iii,
    })
}

/// A linear map of `R^n _|_ R` preserving the form `I` and the upper sheet.
#[derive(Debug, Clone)]
pub struct LorentzIsometry {
    /// Row-major (n+1) x (n+1) matrix acting on `(space..., time)` columns.
    pub matrix: Vec<Vec<f64>>,
}

impl LorentzIsometry {
    pub fn identity(n: usize) -> Self {
        let d = n + 1;
        let mut m = vec![vec![0.0; d]; d];
        for (i, row) in m.iter_mut().enumerate() {
            row[i] = 1.0;
        }
        LorentzIsometry { matrix: m }
    }

    fn dim(&self) -> usize {
        self.matrix.len() - 1
    }

    /// Spatial rotation by `theta` in the plane of space coordinates (i, j).
    pub fn rotation(n: usize, i: usize, j: usize, theta: f64) -> Self {
        let mut t = Self::identity(n);
        let (c, s) = (theta.cos(), theta.sin());
        t.matrix[i][i] = c;
        t.matrix[i][j] = -s;
        t.matrix[j][i] = s;
        t.matrix[j][j] = c;
        t
    }

    /// Hyperbolic boost with rapidity `xi` in the (space_i, time) plane.
    pub fn boost(n: usize, i: usize, xi: f64) -> Self {
        let mut t = Self::identity(n);
        let (c, s) = (xi.cosh(), xi.sinh());
        t.matrix[i][i] = c;
        t.matrix[i][n] = s;
        t.matrix[n][i] = s;
        t.matrix[n][n] = c;
        t
    }

    pub fn compose(&self, other: &Self) -> Self {
        let d = self.matrix.len();
        assert_eq!(d, other.matrix.len());
        let mut m = vec![vec![0.0; d]; d];
        for i in 0..d {
            for k in 0..d {
                let a = self.matrix[i][k];
                if a == 0.0 {
                    continue;
                }
                for j in 0..d {
                    m[i][j] += a * other.matrix[k][j];
                }
            }
        }
        LorentzIsometry { matrix: m }
    }

    pub fn apply(&self, w: &LorentzVector) -> LorentzVector {
        let n = self.dim();
        assert_eq!(n, w.dim(), "isometry/vector dimension mismatch");
        let mut out = vec![0.0; n + 1];
        for (i, row) in self.matrix.iter().enumerate() {
            let mut acc = 0.0;
            for (j, &x) in w.space.iter().enumerate() {
                acc += row[j] * x;
            }
            acc += row[n] * w.time;
            out[i] = acc;
        }
        let time = out.pop().unwrap();
        LorentzVector { space: out, time }
    }
}

/// Deterministic pseudo-random spatial rotation (no boosts): fixes the time
/// axis, used to move boundary spheres off the projection pole.
pub fn spatial_rotation_isometry(n: usize, seed: u64) -> LorentzIsometry {
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_mul(0x9e3779b97f4a7c15));
    let mut t = LorentzIsometry::identity(n);
    for i in 0..n {
        for j in (i + 1)..n {
            let theta = rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI);
            t = LorentzIsometry::rotation(n, i, j, theta).compose(&t);
        }
    }
    t
}

/// Deterministic pseudo-random isometry composed of spatial rotations and
/// boosts. Fixed seed gives a fixed map; preserves `I` and the upper sheet.
pub fn random_isometry(n: usize, seed: u64) -> LorentzIsometry {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut t = LorentzIsometry::identity(n);
    for i in 0..n {
        for j in (i + 1)..n {
            let theta = rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI);
            t = LorentzIsometry::rotation(n, i, j, theta).compose(&t);
        }
    }
    for i in 0..n {
        let xi = rng.gen_range(-1.2..1.2);
        t = LorentzIsometry::boost(n, i, xi).compose(&t);
    }
    if n >= 2 {
        let theta = rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI);
        t = LorentzIsometry::rotation(n, 0, 1, theta).compose(&t);
    }
    t
}
