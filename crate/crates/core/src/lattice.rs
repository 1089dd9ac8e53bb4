//! Intersection lattices: exact signature computation, embedding into
//! standard (1, n) coordinates, verification of negative-class families,
//! and the positive-combination certificate when verification fails.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::exact::rational_to_f64;
use crate::lorentz::LorentzVector;
use crate::{HcError, Result};

pub type RationalMatrix = Vec<Vec<BigRational>>;

/// A rational intersection form with a family of negative classes and an
/// ample class.
#[derive(Debug, Clone)]
pub struct GramLattice {
    pub rho: usize,
    pub gram: RationalMatrix,
    pub classes: Vec<Vec<BigInt>>,
    pub ample: Vec<BigInt>,
}

/// Sign counts of the diagonalized form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Inertia {
    pub pos: usize,
    pub neg: usize,
    pub zero: usize,
}

fn check_symmetric(m: &RationalMatrix) -> Result<()> {
    let n = m.len();
    if let Some(i) = m.iter().position(|r| r.len() != n) {
        return Err(HcError::InvalidInput(format!("row {i} has wrong length")));
    }
    for i in 0..n {
        for j in 0..i {
            if m[i][j] != m[j][i] {
                return Err(HcError::NotSymmetric(i, j));
            }
        }
    }
    Ok(())
}

/// Exact inertia via the diagonalizing congruence.
pub fn inertia(gram: &RationalMatrix) -> Result<Inertia> {
    let (_, lambda) = congruence_diagonalize(gram)?;
    let mut i = Inertia {
        pos: 0,
        neg: 0,
        zero: 0,
    };
    for l in &lambda {
        if l.is_positive() {
            i.pos += 1;
        } else if l.is_negative() {
            i.neg += 1;
        } else {
            i.zero += 1;
        }
    }
    Ok(i)
}

/// Require signature (1, rho - 1).
pub fn check_signature(gram: &RationalMatrix) -> Result<Inertia> {
    let i = inertia(gram)?;
    let n = gram.len();
    if i.pos == 1 && i.neg == n - 1 && i.zero == 0 {
        Ok(i)
    } else {
        Err(HcError::SignatureViolation {
            expected_neg: n - 1,
            pos: i.pos,
            neg: i.neg,
            zero: i.zero,
        })
    }
}

fn bilinear(gram: &RationalMatrix, a: &[BigInt], b: &[BigInt]) -> BigRational {
    let mut acc = BigRational::zero();
    for (i, ai) in a.iter().enumerate() {
        for (j, bj) in b.iter().enumerate() {
            acc += &gram[i][j] * BigRational::from_integer(ai * bj);
        }
    }
    acc
}

impl GramLattice {
    pub fn pair(&self, a: &[BigInt], b: &[BigInt]) -> BigRational {
        bilinear(&self.gram, a, b)
    }

    /// All structural invariants: symmetry, signature, ample positivity
    /// against itself and every class, negative distinct classes.
    pub fn validate(&self) -> Result<()> {
        if self.gram.len() != self.rho {
            return Err(HcError::InvalidInput(format!(
                "rank {} does not match matrix size {}",
                self.rho,
                self.gram.len()
            )));
        }
        check_signature(&self.gram)?;
        if self.ample.len() != self.rho {
            return Err(HcError::InvalidInput("ample class has wrong length".into()));
        }
        if !self.pair(&self.ample, &self.ample).is_positive() {
            return Err(HcError::InvalidInput(
                "ample class has non-positive self-intersection".into(),
            ));
        }
        for (i, c) in self.classes.iter().enumerate() {
            if c.len() != self.rho {
                return Err(HcError::InvalidInput(format!(
                    "class {i} has wrong length"
                )));
            }
            if !self.pair(c, c).is_negative() {
                return Err(HcError::InvalidInput(format!(
                    "class {i} has non-negative self-intersection"
                )));
            }
            if !self.pair(&self.ample, c).is_positive() {
                return Err(HcError::InvalidInput(format!(
                    "ample class does not pair positively with class {i}"
                )));
            }
            for (j, c2) in self.classes.iter().enumerate().take(i) {
                if c == c2 {
                    return Err(HcError::InvalidInput(format!(
                        "classes {j} and {i} coincide"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Diagonalizing congruence: returns `(c, lambda)` with
/// `c^T gram c = diag(lambda)`, exactly.
fn congruence_diagonalize(gram: &RationalMatrix) -> Result<(RationalMatrix, Vec<BigRational>)> {
    check_symmetric(gram)?;
    let n = gram.len();
    let mut m = gram.clone();
    let mut c: RationalMatrix = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i == j {
                        BigRational::one()
                    } else {
                        BigRational::zero()
                    }
                })
                .collect()
        })
        .collect();
    // Column operations applied to both m (two-sided) and c (right side).
    for k in 0..n {
        if m[k][k].is_zero() {
            if let Some(j) = (k + 1..n).find(|&j| !m[j][j].is_zero()) {
                m.swap(k, j);
                for row in m.iter_mut() {
                    row.swap(k, j);
                }
                for row in c.iter_mut() {
                    row.swap(k, j);
                }
            } else if let Some(j) = (k + 1..n).find(|&j| !m[k][j].is_zero()) {
                for col in 0..n {
                    let v = m[j][col].clone();
                    m[k][col] += v;
                }
                for row in 0..n {
                    let v = m[row][j].clone();
                    m[row][k] += v;
                }
                for row in c.iter_mut() {
                    let v = row[j].clone();
                    row[k] += v;
                }
            } else {
                continue;
            }
        }
        let pivot = m[k][k].clone();
        for i in (k + 1)..n {
            if m[i][k].is_zero() {
                continue;
            }
            let f = &m[i][k] / &pivot;
            for col in 0..n {
                let v = &f * &m[k][col];
                m[i][col] -= v;
            }
            for row in 0..n {
                let v = &f * &m[row][k];
                m[row][i] -= v;
            }
            for row in c.iter_mut() {
                let v = &f * &row[k];
                row[i] -= v;
            }
        }
    }
    let lambda = (0..n).map(|i| m[i][i].clone()).collect();
    Ok((c, lambda))
}

/// Float map from lattice coordinates to standard `(space...; time)`
/// coordinates, with `I(M a, M b) = a^T gram b` up to the stated residual.
#[derive(Debug, Clone)]
pub struct LorentzEmbedding {
    /// Row-major: first `n` rows are space coordinates, last row is time.
    rows: Vec<Vec<f64>>,
}

impl LorentzEmbedding {
    pub fn apply_int(&self, v: &[BigInt]) -> LorentzVector {
        let vf: Vec<f64> = v
            .iter()
            .map(|x| rational_to_f64(&BigRational::from_integer(x.clone())))
            .collect();
        self.apply(&vf)
    }

    pub fn apply(&self, v: &[f64]) -> LorentzVector {
        let mut out: Vec<f64> = self
            .rows
            .iter()
            .map(|r| r.iter().zip(v).map(|(a, b)| a * b).sum())
            .collect();
        let time = out.pop().unwrap();
        LorentzVector { space: out, time }
    }

    /// Max absolute residual of the congruence identity over basis pairs.
    pub fn residual(&self, gram: &RationalMatrix) -> f64 {
        let n = gram.len();
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                let mut e_i = vec![0.0; n];
                let mut e_j = vec![0.0; n];
                e_i[i] = 1.0;
                e_j[j] = 1.0;
                let a = self.apply(&e_i);
                let b = self.apply(&e_j);
                let got = crate::lorentz::inner(&a, &b).unwrap();
                let want = rational_to_f64(&gram[i][j]);
                worst = worst.max((got - want).abs());
            }
        }
        worst
    }
}

/// Invert a rational matrix by Gauss-Jordan elimination.
fn invert(m: &RationalMatrix) -> Result<RationalMatrix> {
    let n = m.len();
    let mut a = m.clone();
    let mut inv: RationalMatrix = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i == j {
                        BigRational::one()
                    } else {
                        BigRational::zero()
                    }
                })
                .collect()
        })
        .collect();
    for k in 0..n {
        let piv = (k..n)
            .find(|&r| !a[r][k].is_zero())
            .ok_or_else(|| HcError::Degenerate("singular congruence matrix".into()))?;
        a.swap(k, piv);
        inv.swap(k, piv);
        let p = a[k][k].clone();
        for c in 0..n {
            a[k][c] /= &p;
            inv[k][c] /= &p;
        }
        for r in 0..n {
            if r == k || a[r][k].is_zero() {
                continue;
            }
            let f = a[r][k].clone();
            for c in 0..n {
                let v = &f * &a[k][c];
                a[r][c] -= v;
                let v = &f * &inv[k][c];
                inv[r][c] -= v;
            }
        }
    }
    Ok(inv)
}

/// Basis change carrying the form to the standard signature-(1, n) pairing.
pub fn embed_to_lorentz(gram: &RationalMatrix) -> Result<LorentzEmbedding> {
    check_signature(gram)?;
    let n = gram.len();
    let (c, lambda) = congruence_diagonalize(gram)?;
    let cinv = invert(&c)?;
    let pos_idx = (0..n)
        .find(|&i| lambda[i].is_positive())
        .expect("signature has a positive entry");
    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(n);
    for i in 0..n {
        if i == pos_idx {
            continue;
        }
        let s = (-rational_to_f64(&lambda[i])).sqrt();
        rows.push(cinv[i].iter().map(|x| s * rational_to_f64(x)).collect());
    }
    let s = rational_to_f64(&lambda[pos_idx]).sqrt();
    rows.push(cinv[pos_idx].iter().map(|x| s * rational_to_f64(x)).collect());
    Ok(LorentzEmbedding { rows })
}

/// Exact status of one pair of classes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PairStatus {
    Holds,
    Boundary,
    Violating,
}

/// The positive-combination certificate for a violating pair.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AmpleCombination {
    pub i: usize,
    pub j: usize,
    #[serde(with = "crate::io::bigint_string")]
    pub p: BigInt,
    #[serde(with = "crate::io::bigint_string")]
    pub q: BigInt,
    #[serde(with = "crate::io::rational_string")]
    pub alpha: BigRational,
    #[serde(with = "crate::io::rational_string")]
    pub beta: BigRational,
    #[serde(with = "crate::io::rational_string")]
    pub gamma: BigRational,
    #[serde(with = "crate::io::rational_string")]
    pub p_alpha_q_beta: BigRational,
    #[serde(with = "crate::io::rational_string")]
    pub p_beta_q_gamma: BigRational,
    #[serde(with = "crate::io::rational_string")]
    pub e_squared: BigRational,
}

impl AmpleCombination {
    /// The three exact positivity certificates plus connectedness
    /// (`beta > 0`).
    pub fn verify(&self) -> bool {
        self.beta.is_positive()
            && self.p_alpha_q_beta.is_positive()
            && self.p_beta_q_gamma.is_positive()
            && self.e_squared.is_positive()
    }
}

/// Outcome of the family dichotomy: either every pair satisfies the exact
/// angle condition (certificate, with the scaled ample class as witness),
/// or the first violating pair with its positive combination.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "outcome")]
pub enum FamilyOutcome {
    Certificate {
        pairs: Vec<(usize, usize, PairStatus)>,
        witness: LorentzVector,
    },
    Violation {
        pair: (usize, usize),
        combination: AmpleCombination,
    },
}

/// Simplest fraction (minimal denominator) strictly inside `(lo, hi)`,
/// for `0 <= lo < hi`. Stern-Brocot style descent.
fn simplest_between(lo: &BigRational, hi: &BigRational) -> BigRational {
    let floor_lo = lo.floor();
    let candidate = &floor_lo + BigRational::one();
    if &candidate < hi {
        // An integer lies strictly inside; it may equal lo's ceiling when
        // lo is itself an integer, which is still > lo.
        return if &candidate > lo {
            candidate
        } else {
            candidate + BigRational::one()
        };
    }
    // Both ends share the integer part; recurse on reciprocals of the
    // fractional parts (order swaps).
    let lo_frac = lo - &floor_lo;
    let hi_frac = hi - &floor_lo;
    if lo_frac.is_zero() {
        // (f, f + hi_frac): take f + 1/k for the smallest valid k.
        let k = (BigRational::one() / hi_frac).floor() + BigRational::one();
        return floor_lo + BigRational::one() / k;
    }
    let inner = simplest_between(
        &(BigRational::one() / hi_frac),
        &(BigRational::one() / lo_frac),
    );
    floor_lo + BigRational::one() / inner
}

/// Positive integers `p, q` with `-gamma/beta < p/q < -beta/alpha`, with
/// minimal `q` and, for that `q`, minimal `p`. All three positivity
/// certificates are verified exactly before returning.
pub fn find_pq(
    alpha: &BigRational,
    beta: &BigRational,
    gamma: &BigRational,
) -> Result<AmpleCombinationCore> {
    if !alpha.is_negative() || !gamma.is_negative() {
        return Err(HcError::Precondition(
            "self-intersections must be negative".into(),
        ));
    }
    if !beta.is_positive() {
        return Err(HcError::Precondition("pairing must be positive".into()));
    }
    let lo = -gamma / beta; // > 0
    let hi = -beta / alpha;
    if lo >= hi {
        return Err(HcError::EmptyInterval);
    }
    let frac = simplest_between(&lo, &hi);
    let q = frac.denom().clone();
    // Minimal numerator for this denominator inside the open interval.
    let p_min = (&lo * BigRational::from_integer(q.clone())).floor() + BigRational::one();
    let mut p = p_min.to_integer();
    loop {
        let cand = BigRational::new(p.clone(), q.clone());
        if cand > lo {
            debug_assert!(cand < hi, "minimal-denominator guarantee");
            break;
        }
        p += BigInt::one();
    }
    let pr = BigRational::from_integer(p.clone());
    let qr = BigRational::from_integer(q.clone());
    let p_alpha_q_beta = &pr * alpha + &qr * beta;
    let p_beta_q_gamma = &pr * beta + &qr * gamma;
    let e_squared = &pr * &pr * alpha
        + BigRational::from_integer(BigInt::from(2)) * &pr * &qr * beta
        + &qr * &qr * gamma;
    if !(p_alpha_q_beta.is_positive() && p_beta_q_gamma.is_positive() && e_squared.is_positive()) {
        return Err(HcError::Degenerate(
            "interval member failed its positivity certificates".into(),
        ));
    }
    Ok(AmpleCombinationCore {
        p,
        q,
        p_alpha_q_beta,
        p_beta_q_gamma,
        e_squared,
    })
}

/// `find_pq` output before it is attached to a concrete pair of classes.
#[derive(Debug, Clone)]
pub struct AmpleCombinationCore {
    pub p: BigInt,
    pub q: BigInt,
    pub p_alpha_q_beta: BigRational,
    pub p_beta_q_gamma: BigRational,
    pub e_squared: BigRational,
}

fn combination_for(
    i: usize,
    j: usize,
    alpha: BigRational,
    beta: BigRational,
    gamma: BigRational,
) -> Result<AmpleCombination> {
    let core = find_pq(&alpha, &beta, &gamma)?;
    Ok(AmpleCombination {
        i,
        j,
        p: core.p,
        q: core.q,
        alpha,
        beta,
        gamma,
        p_alpha_q_beta: core.p_alpha_q_beta,
        p_beta_q_gamma: core.p_beta_q_gamma,
        e_squared: core.e_squared,
    })
}

/// The family dichotomy: exact pair checks, then either the certificate
/// with the scaled ample witness or the first violating pair (lexicographic)
/// with its positive combination.
pub fn check_family(lat: &GramLattice) -> Result<FamilyOutcome> {
    lat.validate()?;
    let m = lat.classes.len();
    let mut pairs = Vec::new();
    for i in 0..m {
        for j in (i + 1)..m {
            let alpha = lat.pair(&lat.classes[i], &lat.classes[i]);
            let gamma = lat.pair(&lat.classes[j], &lat.classes[j]);
            let beta = lat.pair(&lat.classes[i], &lat.classes[j]);
            if beta.is_negative() {
                return Err(HcError::ModelingError(format!(
                    "classes {i} and {j} pair negatively"
                )));
            }
            let b2 = &beta * &beta;
            let ag = &alpha * &gamma;
            let status = match b2.cmp(&ag) {
                std::cmp::Ordering::Less => PairStatus::Holds,
                std::cmp::Ordering::Equal => PairStatus::Boundary,
                std::cmp::Ordering::Greater => PairStatus::Violating,
            };
            if status == PairStatus::Violating {
                let combination = combination_for(i, j, alpha, beta, gamma)?;
                return Ok(FamilyOutcome::Violation {
                    pair: (i, j),
                    combination,
                });
            }
            pairs.push((i, j, status));
        }
    }
    let emb = embed_to_lorentz(&lat.gram)?;
    let h = emb.apply_int(&lat.ample);
    let witness = h
        .normalize_positive(1e-12)
        .expect("ample class maps to a positive vector");
    Ok(FamilyOutcome::Certificate { pairs, witness })
}

/// Positive combination for a specific pair; errors if the pair is not
/// violating.
pub fn ample_combination(lat: &GramLattice, i: usize, j: usize) -> Result<AmpleCombination> {
    if i >= lat.classes.len() || j >= lat.classes.len() || i == j {
        return Err(HcError::InvalidInput(format!("bad pair ({i}, {j})")));
    }
    let alpha = lat.pair(&lat.classes[i], &lat.classes[i]);
    let gamma = lat.pair(&lat.classes[j], &lat.classes[j]);
    let beta = lat.pair(&lat.classes[i], &lat.classes[j]);
    let b2 = &beta * &beta;
    if b2 <= &alpha * &gamma {
        return Err(HcError::Precondition(format!(
            "pair ({i}, {j}) satisfies the angle condition; nothing to combine"
        )));
    }
    combination_for(i, j, alpha, beta, gamma)
}

/// Random unimodular congruence of the standard form with rejection-sampled
/// negative classes. Test-suite generator, not part of the stable surface.
#[doc(hidden)]
pub fn random_lattice(rng: &mut rand_chacha::ChaCha8Rng, rho: usize, m: usize) -> GramLattice {
    use rand::Rng;
    let q = |v: i64| BigRational::from_integer(BigInt::from(v));
    // Random integer unimodular u (product of elementary operations).
    let mut u: Vec<Vec<i64>> = (0..rho)
        .map(|i| (0..rho).map(|j| i64::from(i == j)).collect())
        .collect();
    for _ in 0..3 * rho {
        let i = rng.gen_range(0..rho);
        let mut j = rng.gen_range(0..rho);
        while j == i {
            j = rng.gen_range(0..rho);
        }
        let f = rng.gen_range(-2..3i64);
        for c in 0..rho {
            u[i][c] += f * u[j][c];
        }
    }
    // gram = u^T d u with d = diag(1, -1, ..., -1).
    let d: Vec<i64> = std::iter::once(1).chain(std::iter::repeat(-1)).take(rho).collect();
    let mut gram = vec![vec![0i64; rho]; rho];
    for r in 0..rho {
        for c in 0..rho {
            gram[r][c] = (0..rho).map(|k| u[k][r] * d[k] * u[k][c]).sum();
        }
    }
    // Classes are rejection-sampled directly in gram coordinates: negative
    // self-intersection, positive ample pairing (u x)_1, pairwise >= 0.
    // Entries are small, so the rejection tests stay in machine integers.
    let pair_i64 = |a: &[i64], b: &[i64]| -> i64 {
        let mut acc = 0;
        for r in 0..rho {
            for c in 0..rho {
                acc += a[r] * gram[r][c] * b[c];
            }
        }
        acc
    };
    let mut classes_i64: Vec<Vec<i64>> = Vec::new();
    let mut guard = 0;
    while classes_i64.len() < m && guard < 200_000 {
        guard += 1;
        let x: Vec<i64> = (0..rho).map(|_| rng.gen_range(-4..5i64)).collect();
        if pair_i64(&x, &x) >= 0 {
            continue;
        }
        let ux1: i64 = (0..rho).map(|c| u[0][c] * x[c]).sum();
        if ux1 <= 0 {
            continue;
        }
        if classes_i64.contains(&x) {
            continue;
        }
        if classes_i64.iter().any(|c| pair_i64(c, &x) < 0) {
            continue;
        }
        classes_i64.push(x);
    }
    let classes: Vec<Vec<BigInt>> = classes_i64
        .iter()
        .map(|c| c.iter().map(|&v| BigInt::from(v)).collect())
        .collect();
    // ample = u^{-1} e1; u is unimodular so the inverse is integer.
    let uq: RationalMatrix = u
        .iter()
        .map(|r| r.iter().map(|&v| q(v)).collect())
        .collect();
    let uinv = invert(&uq).unwrap();
    let ample: Vec<BigInt> = (0..rho).map(|r| uinv[r][0].to_integer()).collect();
    GramLattice {
        rho,
        gram: gram
            .iter()
            .map(|r| r.iter().map(|&v| q(v)).collect())
            .collect(),
        classes,
        ample,
    }
}
