//! Hyperbolic codes: certified strictness verification, witness search,
//! normalization to the exterior-of-unit-ball presentation, the spherical
//! construction, antipodal pruning, and the direction map back to spherical
//! codes.

use serde::{Deserialize, Serialize};

use crate::halfspace::{
    ball_to_hyperboloid, descriptor, upper_to_ball, vector_from_descriptor, HalfSpaceDescriptor,
    UpperPoint,
};
use crate::lorentz::{
    angle_at_least_right, inner, LorentzIsometry, LorentzVector, RightAngleReport,
};
use crate::report::{combine, Verdict};
use crate::tol::Tolerances;
use crate::{phi0, HcError, Result};

/// A finite set of negative vectors, each cutting out a geodesic half-space,
/// with an optional strictness witness.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HyperbolicCode {
    pub n: usize,
    pub vectors: Vec<LorentzVector>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<LorentzVector>,
}

impl HyperbolicCode {
    pub fn new(n: usize, vectors: Vec<LorentzVector>) -> Self {
        HyperbolicCode {
            n,
            vectors,
            witness: None,
        }
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }
}

/// One center/radius entry of a normalized code.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Entry {
    pub z: Vec<f64>,
    pub d: f64,
}

impl Entry {
    pub fn new(z: Vec<f64>, d: f64) -> Self {
        Entry { z, d }
    }

    pub fn z_norm(&self) -> f64 {
        self.z.iter().map(|x| x * x).sum::<f64>().sqrt()
    }
}

fn gap(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Code presented with entry 0 as the exterior of the unit ball at the
/// origin (implicit) and the listed entries as interior balls.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NormalizedCode {
    pub entries: Vec<Entry>,
}

/// Unit vectors with all pairwise angles in `[min_angle, max_angle]`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SphericalCode {
    pub points: Vec<Vec<f64>>,
    pub min_angle: f64,
    pub max_angle: f64,
}

impl SphericalCode {
    /// Observed pairwise-angle range, `(pi, 0)` conventions when there are
    /// fewer than two points.
    pub fn observed_angles(&self) -> (f64, f64) {
        let mut lo = std::f64::consts::PI;
        let mut hi = 0.0f64;
        for (i, p) in self.points.iter().enumerate() {
            for q in &self.points[i + 1..] {
                let c: f64 = p.iter().zip(q).map(|(a, b)| a * b).sum();
                let t = c.clamp(-1.0, 1.0).acos();
                lo = lo.min(t);
                hi = hi.max(t);
            }
        }
        (lo, hi)
    }
}

/// Result of checking one pair of code vectors.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PairCheck {
    pub i: usize,
    pub j: usize,
    pub report: RightAngleReport,
    pub verdict: Verdict,
}

/// Certificate (or refutation) of strictness.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StrictReport {
    pub size: usize,
    pub pairs: Vec<PairCheck>,
    pub witness: Option<LorentzVector>,
    /// Conjunction over pair checks; strictness additionally needs the
    /// witness.
    pub pair_verdict: Verdict,
    pub strict: bool,
}

impl StrictReport {
    pub fn failing_pairs(&self) -> Vec<(usize, usize)> {
        self.pairs
            .iter()
            .filter(|p| !p.verdict.passes())
            .map(|p| (p.i, p.j))
            .collect()
    }
}

fn check_witness(code: &HyperbolicCode, h: &LorentzVector, eps: f64) -> bool {
    if inner(h, h).map(|q| q <= eps).unwrap_or(true) {
        return false;
    }
    code.vectors
        .iter()
        .all(|w| inner(h, w).map(|p| p > eps).unwrap_or(false))
}

/// Descriptors of the code vectors after a rotation chosen (deterministically)
/// so that none is a vertical plane. Returns the descriptors and the rotated
/// vectors.
fn sphere_descriptors(
    vectors: &[LorentzVector],
    tol: &Tolerances,
) -> Result<(Vec<HalfSpaceDescriptor>, Vec<LorentzVector>)> {
    'outer: for seed in 0..64u64 {
        let iso = if seed == 0 {
            LorentzIsometry::identity(vectors[0].dim())
        } else {
            crate::lorentz::spatial_rotation_isometry(vectors[0].dim(), seed)
        };
        let mut descs = Vec::with_capacity(vectors.len());
        let mut rotated = Vec::with_capacity(vectors.len());
        for w in vectors {
            let wr = iso.apply(w);
            match descriptor(&wr, tol.bnd)? {
                HalfSpaceDescriptor::Vertical { .. } => continue 'outer,
                d => {
                    descs.push(d);
                    rotated.push(wr);
                }
            }
        }
        return Ok((descs, rotated));
    }
    Err(HcError::Degenerate(
        "could not rotate all half-space boundaries away from the projection pole".into(),
    ))
}

/// Witness above a family of interior balls: the vertical point
/// `(0, ..., 0, T)` with `T` above every sphere top.
fn vertical_witness(descs: &[HalfSpaceDescriptor], n: usize) -> Result<LorentzVector> {
    let mut top = 1.0f64;
    for d in descs {
        if let HalfSpaceDescriptor::Sphere { center, radius, .. } = d {
            let reach = center.iter().map(|x| x * x).sum::<f64>().sqrt() + radius;
            top = top.max(2.0 * reach);
        }
    }
    let mut coords = vec![0.0; n];
    coords[n - 1] = top;
    ball_to_hyperboloid(&upper_to_ball(&UpperPoint { coords })?)
}

/// Projected supergradient ascent of `min_i I(h, w_i)` over the upper sheet.
fn ascent_witness(code: &HyperbolicCode, eps: f64, seed: u64) -> Option<LorentzVector> {
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    let hatw: Vec<LorentzVector> = code
        .vectors
        .iter()
        .filter_map(|w| w.normalize_negative(eps).ok())
        .collect();
    if hatw.len() != code.vectors.len() {
        return None;
    }
    let n = code.n;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for start in 0..24 {
        let mut h = if start == 0 {
            LorentzVector::sheet_origin(n)
        } else {
            let space: Vec<f64> = (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect();
            let time = (1.0 + space.iter().map(|x| x * x).sum::<f64>()).sqrt();
            LorentzVector { space, time }
        };
        let mut step = 0.5f64;
        for _ in 0..400 {
            let (j, val) = hatw
                .iter()
                .enumerate()
                .map(|(i, w)| (i, inner(&h, w).unwrap()))
                .min_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
                .unwrap();
            if val > 10.0 * eps.max(1e-12) {
                break;
            }
            // Euclidean gradient of h -> I(h, w_j) is (-v_j; u_j).
            let g = LorentzVector {
                space: hatw[j].space.iter().map(|x| -x).collect(),
                time: hatw[j].time,
            };
            let mut s = step;
            loop {
                let cand = h.add(&g.scale(s));
                match cand.normalize_positive(1e-12) {
                    Ok(c) => {
                        h = c;
                        break;
                    }
                    Err(_) => {
                        s *= 0.5;
                        if s < 1e-14 {
                            break;
                        }
                    }
                }
            }
            step *= 0.99;
        }
        let min_val = hatw
            .iter()
            .map(|w| inner(&h, w).unwrap())
            .fold(f64::INFINITY, f64::min);
        if min_val > 10.0 * eps.max(1e-12) {
            return Some(h);
        }
    }
    None
}

/// Find a strictness witness: a positive vector pairing positively with
/// every code vector.
pub fn find_witness(code: &HyperbolicCode, tol: &Tolerances) -> Option<LorentzVector> {
    if code.vectors.is_empty() {
        return Some(LorentzVector::sheet_origin(code.n));
    }
    // When every half-space is an interior ball (possibly after a rotation),
    // a vertical point above all of them works outright.
    if let Ok((descs, rotated)) = sphere_descriptors(&code.vectors, tol) {
        let all_interior = descs
            .iter()
            .all(|d| matches!(d, HalfSpaceDescriptor::Sphere { delta: 1, .. }));
        if all_interior {
            if let Ok(h) = vertical_witness(&descs, code.n) {
                // The witness was built in the rotated frame; rotate it back
                // by checking against the rotated vectors and mapping through
                // the same frame. Pairings are frame-invariant, so verify
                // against the rotated vectors and return the pullback.
                let rot_code = HyperbolicCode {
                    n: code.n,
                    vectors: rotated,
                    witness: None,
                };
                if check_witness(&rot_code, &h, tol.ang) {
                    // Recover the original-frame witness by inverting the
                    // rotation: rerun the deterministic frame search to get
                    // the isometry again is wasteful; instead solve by
                    // ascent seeded at the rotated answer. Simpler and
                    // exact: the identity frame is tried first, in which
                    // case no pullback is needed.
                    if code
                        .vectors
                        .iter()
                        .zip(&rot_code.vectors)
                        .all(|(a, b)| a == b)
                    {
                        return Some(h);
                    }
                }
            }
        }
    }
    ascent_witness(code, tol.ang, 0x5eed)
}

/// Verify the pairwise angle conditions and strictness of a code.
pub fn verify_strict(code: &HyperbolicCode, tol: &Tolerances) -> Result<StrictReport> {
    for w in &code.vectors {
        if w.dim() != code.n {
            return Err(HcError::DimensionMismatch(code.n, w.dim()));
        }
        let q = inner(w, w)?;
        if q >= -tol.cls {
            return Err(HcError::NotNegative(q));
        }
    }
    let m = code.vectors.len();
    let mut pairs = Vec::with_capacity(m * (m.saturating_sub(1)) / 2);
    for i in 0..m {
        for j in (i + 1)..m {
            let report = angle_at_least_right(&code.vectors[i], &code.vectors[j], tol.ang)?;
            let verdict = report.cond_iii;
            pairs.push(PairCheck {
                i,
                j,
                report,
                verdict,
            });
        }
    }
    let pair_verdict = combine(pairs.iter().map(|p| p.verdict));
    let witness = match &code.witness {
        Some(h) if check_witness(code, h, tol.ang) => Some(h.clone()),
        Some(_) => None,
        None if pair_verdict.passes() => find_witness(code, tol),
        None => None,
    };
    let strict = pair_verdict.passes() && witness.is_some();
    Ok(StrictReport {
        size: m,
        pairs,
        witness,
        pair_verdict,
        strict,
    })
}

/// Rotation sending the spatial direction of a null vector to the first
/// axis, so its ideal point becomes the projection pole (hence infinity in
/// the upper model).
fn rotation_to_pole(nu: &LorentzVector) -> LorentzIsometry {
    let n = nu.dim();
    let mut t = LorentzIsometry::identity(n);
    let mut v = nu.space.clone();
    // Chain of Givens rotations zeroing coordinates n-1, ..., 2 into
    // coordinate 1, then (2nd, 1st) into the 1st.
    for k in (1..n).rev() {
        let (a, b) = (v[k - 1], v[k]);
        let r = (a * a + b * b).sqrt();
        if r == 0.0 {
            continue;
        }
        let theta = b.atan2(a);
        // Rotate the (k-1, k) plane by -theta: sends (a, b) to (r, 0).
        let g = LorentzIsometry::rotation(n, k - 1, k, 0.0);
        let mut g = g;
        let (c, s) = (theta.cos(), theta.sin());
        g.matrix[k - 1][k - 1] = c;
        g.matrix[k - 1][k] = s;
        g.matrix[k][k - 1] = -s;
        g.matrix[k][k] = c;
        v[k - 1] = r;
        v[k] = 0.0;
        t = g.compose(&t);
    }
    if v[0] < 0.0 {
        // Half-turn in the (0, 1) plane to make the first coordinate
        // positive; n >= 2 always holds for codes with descriptors.
        t = LorentzIsometry::rotation(n, 0, 1, std::f64::consts::PI).compose(&t);
    }
    t
}

/// Candidate ideal points inside the pivot half-space's boundary disk.
fn ideal_candidates(
    code: &HyperbolicCode,
    pivot: usize,
    h: &LorentzVector,
    tol: &Tolerances,
) -> Vec<LorentzVector> {
    let mut out = Vec::new();
    let w0 = code.vectors[pivot]
        .normalize_negative(tol.cls)
        .expect("pivot is negative");
    let hhat = h.normalize_positive(tol.cls).expect("witness is positive");
    // Geodesic from the witness, aimed straight at the pivot boundary.
    let ip = inner(&w0, &hhat).unwrap();
    let tang = w0.add(&hhat.scale(-ip));
    let tq = inner(&tang, &tang).unwrap();
    if tq < -1e-15 {
        let chat = tang.scale(1.0 / (-tq).sqrt());
        for c in [chat.clone(), chat.neg()] {
            let nu = hhat.add(&c);
            if inner(&nu, &w0).unwrap() < 0.0 {
                out.push(nu);
            }
        }
    }
    // Seeded sampler over the ideal sphere as a fallback.
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    let mut rng = ChaCha8Rng::seed_from_u64(0x1dea);
    for _ in 0..512 {
        let mut v: Vec<f64> = (0..code.n).map(|_| rng.gen_range(-1.0..1.0f64)).collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm < 1e-6 {
            continue;
        }
        for x in v.iter_mut() {
            *x /= norm;
        }
        let nu = LorentzVector { space: v, time: 1.0 };
        if inner(&nu, &w0).unwrap() < 0.0 {
            out.push(nu);
        }
    }
    out
}

/// Normalize a strict code: send an ideal point interior to the pivot
/// half-space to infinity, then translate and dilate so the pivot becomes
/// the exterior of the unit ball at the origin. Entries are the remaining
/// half-spaces as interior balls, radii divided by the pivot radius.
pub fn normalize(code: &HyperbolicCode, pivot: usize, tol: &Tolerances) -> Result<NormalizedCode> {
    if pivot >= code.vectors.len() {
        return Err(HcError::InvalidInput(format!(
            "pivot {pivot} out of range for code of size {}",
            code.vectors.len()
        )));
    }
    let report = verify_strict(code, tol)?;
    if !report.strict {
        return Err(HcError::VerificationFailed(format!(
            "code is not strict (pair verdict {:?}, witness {})",
            report.pair_verdict,
            if report.witness.is_some() {
                "found"
            } else {
                "missing"
            }
        )));
    }
    if code.vectors.len() == 1 {
        return Ok(NormalizedCode { entries: vec![] });
    }
    let h = report.witness.expect("strict implies witness");

    'cand: for nu in ideal_candidates(code, pivot, &h, tol) {
        // The chosen ideal point must avoid every other half-space closure.
        for (i, w) in code.vectors.iter().enumerate() {
            if i != pivot && inner(&nu, w).unwrap() <= 0.0 {
                continue 'cand;
            }
        }
        let rot = rotation_to_pole(&nu);
        let rotated: Vec<LorentzVector> = code.vectors.iter().map(|w| rot.apply(w)).collect();
        let mut descs = Vec::with_capacity(rotated.len());
        let mut ok = true;
        for w in &rotated {
            match descriptor(w, tol.bnd) {
                Ok(HalfSpaceDescriptor::Sphere {
                    center,
                    radius,
                    delta,
                }) => descs.push((center, radius, delta)),
                _ => {
                    ok = false;
                    break;
                }
            }
        }
        if !ok {
            continue;
        }
        let (z0, d0, s0) = descs[pivot].clone();
        if s0 != -1 {
            continue; // infinity did not land inside the pivot half-space
        }
        let mut entries = Vec::with_capacity(descs.len() - 1);
        for (i, (z, d, s)) in descs.iter().enumerate() {
            if i == pivot {
                continue;
            }
            if *s != 1 {
                ok = false;
                break;
            }
            let zt: Vec<f64> = z.iter().zip(&z0).map(|(a, b)| (a - b) / d0).collect();
            entries.push(Entry::new(zt, d / d0));
        }
        if ok {
            return Ok(NormalizedCode { entries });
        }
    }
    Err(HcError::Degenerate(
        "no ideal point interior to the pivot half-space avoids the others".into(),
    ))
}

/// Per-entry and per-pair verdicts for the normalized-code inequalities.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NormalizedReport {
    /// (a): `max{0, d_i^2 - 1} < |z_i|^2` per entry.
    pub cond_a: Vec<Verdict>,
    /// (b): `|1 - d_i| <= |z_i| <= sqrt(1 + d_i^2)` per entry.
    pub cond_b: Vec<Verdict>,
    /// (c): `sqrt(d_i^2 + d_j^2) <= |z_i - z_j| <= d_i + d_j` per pair
    /// `(i, j)`, `i < j`.
    pub cond_c: Vec<(usize, usize, Verdict)>,
}

impl NormalizedReport {
    pub fn verdict(&self) -> Verdict {
        combine(
            self.cond_a
                .iter()
                .chain(&self.cond_b)
                .copied()
                .chain(self.cond_c.iter().map(|&(_, _, v)| v)),
        )
    }
}

/// Check the three normalized-code inequality families.
pub fn verify_normalized(entries: &[Entry], tol: &Tolerances) -> NormalizedReport {
    let mut cond_a = Vec::with_capacity(entries.len());
    let mut cond_b = Vec::with_capacity(entries.len());
    for e in entries {
        let zn = e.z_norm();
        let scale = (1.0 + e.d).max(zn);
        let a_floor = (e.d * e.d - 1.0).max(0.0);
        cond_a.push(Verdict::from_margin(
            (zn * zn - a_floor) / (scale * scale),
            tol.ang,
        ));
        let lo = Verdict::from_margin((zn - (1.0 - e.d).abs()) / scale, tol.ang);
        let hi = Verdict::from_margin(((1.0 + e.d * e.d).sqrt() - zn) / scale, tol.ang);
        cond_b.push(lo.and(hi));
    }
    let mut cond_c = Vec::new();
    for i in 0..entries.len() {
        for j in (i + 1)..entries.len() {
            cond_c.push((i, j, pair_c(&entries[i], &entries[j], tol.ang)));
        }
    }
    NormalizedReport {
        cond_a,
        cond_b,
        cond_c,
    }
}

/// Condition (c) for one pair of entries.
pub fn pair_c(a: &Entry, b: &Entry, eps: f64) -> Verdict {
    let g = gap(&a.z, &b.z);
    let lo = (a.d * a.d + b.d * b.d).sqrt();
    let hi = a.d + b.d;
    let scale = hi.max(g).max(1e-300);
    Verdict::from_margin((g - lo) / scale, eps).and(Verdict::from_margin((hi - g) / scale, eps))
}

/// Lift normalized entries to code vectors (interior balls) plus the
/// exterior-of-unit-ball pivot, and certify the result.
pub fn code_from_entries(entries: &[Entry], n: usize, tol: &Tolerances) -> Result<HyperbolicCode> {
    let mut vectors = Vec::with_capacity(entries.len() + 1);
    vectors.push(vector_from_descriptor(&HalfSpaceDescriptor::sphere(
        vec![0.0; n - 1],
        1.0,
        -1,
    ))?);
    for e in entries {
        if e.z.len() != n - 1 {
            return Err(HcError::DimensionMismatch(n - 1, e.z.len()));
        }
        vectors.push(vector_from_descriptor(&HalfSpaceDescriptor::sphere(
            e.z.clone(),
            e.d,
            1,
        ))?);
    }
    let mut code = HyperbolicCode::new(n, vectors);
    code.witness = find_witness(&code, tol);
    Ok(code)
}

/// Vertical-point witness for an entries-only code (all interior balls).
/// Exposed for reuse by the search pipeline.
pub fn entries_only_code(entries: &[Entry], n: usize, tol: &Tolerances) -> Result<HyperbolicCode> {
    let mut vectors = Vec::with_capacity(entries.len());
    for e in entries {
        vectors.push(vector_from_descriptor(&HalfSpaceDescriptor::sphere(
            e.z.clone(),
            e.d,
            1,
        ))?);
    }
    let mut code = HyperbolicCode::new(n, vectors);
    code.witness = find_witness(&code, tol);
    Ok(code)
}

/// Build normalized entries from a spherical code: each point becomes a
/// center, every radius is `sqrt(2) sin(min_angle / 2)`.
///
/// Requires `sin(max_angle / 2) <= sqrt(2) sin(min_angle / 2)` (up to the
/// construction tolerance): exactly the inequality that makes the pair
/// condition (c) hold for all outputs.
pub fn from_spherical(sc: &SphericalCode, tol: &Tolerances) -> Result<Vec<Entry>> {
    if sc.points.is_empty() {
        return Ok(vec![]);
    }
    for p in &sc.points {
        let norm = p.iter().map(|x| x * x).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > tol.bnd.max(1e-7) {
            return Err(HcError::InvalidInput(format!(
                "spherical-code point has norm {norm}"
            )));
        }
    }
    let d = std::f64::consts::SQRT_2 * (sc.min_angle / 2.0).sin();
    let upper = (sc.max_angle / 2.0).sin();
    if upper > d + tol.cons {
        return Err(HcError::Precondition(format!(
            "incompatible angle range: sin(max/2) = {upper} exceeds sqrt(2) sin(min/2) = {d}"
        )));
    }
    let (lo, hi) = sc.observed_angles();
    if sc.points.len() >= 2 && (lo < sc.min_angle - tol.cons || hi > sc.max_angle + tol.cons) {
        return Err(HcError::Precondition(format!(
            "observed angles [{lo}, {hi}] leave the declared range"
        )));
    }
    Ok(sc
        .points
        .iter()
        .map(|p| Entry::new(p.clone(), d))
        .collect())
}

/// Drop one endpoint of every near-antipodal pair so all remaining angles
/// are at most `pi - phi0`. The conflict relation must be a matching; with
/// all pairwise angles at least `2 phi0` it always is.
pub fn prune_antipodal(sc: &SphericalCode, tol: &Tolerances) -> Result<SphericalCode> {
    let two_phi0 = 2.0 * phi0();
    let cap = std::f64::consts::PI - phi0();
    let k = sc.points.len();
    let mut conflict: Vec<Option<usize>> = vec![None; k];
    for i in 0..k {
        for j in (i + 1)..k {
            let c: f64 = sc.points[i]
                .iter()
                .zip(&sc.points[j])
                .map(|(a, b)| a * b)
                .sum();
            let t = c.clamp(-1.0, 1.0).acos();
            if t < two_phi0 - tol.ang.max(1e-9) {
                return Err(HcError::Precondition(format!(
                    "pair ({i}, {j}) at angle {t} below 2 phi0 = {two_phi0}"
                )));
            }
            if t > cap + tol.ang {
                if conflict[i].is_some() || conflict[j].is_some() {
                    return Err(HcError::Degenerate(format!(
                        "conflict relation is not a matching at pair ({i}, {j})"
                    )));
                }
                conflict[i] = Some(j);
                conflict[j] = Some(i);
            }
        }
    }
    let points: Vec<Vec<f64>> = (0..k)
        .filter(|&i| conflict[i].map_or(true, |j| i < j))
        .map(|i| sc.points[i].clone())
        .collect();
    Ok(SphericalCode {
        points,
        min_angle: two_phi0,
        max_angle: cap,
    })
}

/// Extract a strict code from a possibly nonstrict one: keep the larger
/// orientation class of half-space boundaries and replace every kept
/// half-space by its interior-ball form.
pub fn strict_from_nonstrict(code: &HyperbolicCode, tol: &Tolerances) -> Result<HyperbolicCode> {
    for (idx, w) in code.vectors.iter().enumerate() {
        for w2 in &code.vectors[idx + 1..] {
            let r = angle_at_least_right(w, w2, tol.ang)?;
            if !r.cond_iii.passes() {
                return Err(HcError::VerificationFailed(format!(
                    "pair including vector {idx} fails the angle condition"
                )));
            }
        }
    }
    let (descs, rotated) = sphere_descriptors(&code.vectors, tol)?;
    let mut interior = Vec::new();
    let mut exterior = Vec::new();
    for (w, d) in rotated.iter().zip(&descs) {
        match d {
            HalfSpaceDescriptor::Sphere { delta: 1, .. } => interior.push(w.clone()),
            _ => exterior.push(w.neg()),
        }
    }
    // Majority class, interior preferred on ties; the flipped exterior
    // vectors are already in interior-ball form.
    let kept = if interior.len() >= exterior.len() {
        interior
    } else {
        exterior
    };
    let mut out = HyperbolicCode::new(code.n, kept);
    out.witness = find_witness(&out, tol);
    let rep = verify_strict(&out, tol)?;
    if !rep.strict {
        return Err(HcError::WitnessNotFound(
            "no witness for the kept orientation class".into(),
        ));
    }
    out.witness = rep.witness;
    Ok(out)
}

/// Unit directions from the smallest-radius center to the others. For
/// entries satisfying condition (c) all pairwise angles are at least
/// `arccos(3/4)`.
pub fn xi_directions(entries: &[Entry]) -> Result<SphericalCode> {
    if entries.len() < 2 {
        return Err(HcError::Precondition(
            "need at least 2 entries for direction extraction".into(),
        ));
    }
    let base = entries
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.d.partial_cmp(&b.1.d).unwrap())
        .map(|(i, _)| i)
        .unwrap();
    let z1 = &entries[base].z;
    let mut points = Vec::with_capacity(entries.len() - 1);
    for (i, e) in entries.iter().enumerate() {
        if i == base {
            continue;
        }
        let g = gap(&e.z, z1);
        if g <= 1e-300 {
            return Err(HcError::Degenerate(format!(
                "entries {base} and {i} share a center"
            )));
        }
        points.push(e.z.iter().zip(z1).map(|(a, b)| (a - b) / g).collect());
    }
    let sc = SphericalCode {
        points,
        min_angle: 0.0,
        max_angle: std::f64::consts::PI,
    };
    let (lo, hi) = sc.observed_angles();
    Ok(SphericalCode {
        min_angle: lo,
        max_angle: hi,
        ..sc
    })
}

/// The three-ball configuration achieving the extremal direction angle:
/// unit balls at the origin, `(3/2, sqrt(7)/2)`, and `(2, 0)`.
pub fn extremal_three_ball_entries() -> Vec<Entry> {
    vec![
        Entry::new(vec![0.0, 0.0], 1.0),
        Entry::new(vec![1.5, 7.0f64.sqrt() / 2.0], 1.0),
        Entry::new(vec![2.0, 0.0], 1.0),
    ]
}

/// Random feasible entry sets: a rejection-sampled spherical code pushed
/// through the spherical construction, then randomly translated and
/// scaled (the pair inequality is similarity-invariant). Test-suite
/// generator, not part of the stable surface.
#[doc(hidden)]
pub fn random_feasible_entries(
    rng: &mut rand_chacha::ChaCha8Rng,
    n: usize,
    m: usize,
) -> Vec<Entry> {
    use rand::Rng;
    let dim = n - 1;
    let phi = 2.0 * phi0();
    let tau = std::f64::consts::PI - phi0();
    if dim == 1 {
        // Centers on a line: at most two balls, gap within the
        // tangent-to-orthogonal window.
        let scale = rng.gen_range(0.3..3.0);
        let shift = rng.gen_range(-2.0..2.0f64);
        let mut entries = vec![Entry::new(vec![shift], scale)];
        if m >= 2 {
            let g = scale * rng.gen_range(1.45..1.95);
            entries.push(Entry::new(vec![shift + g], scale));
        }
        return entries;
    }
    let points: Vec<Vec<f64>> = {
        let mut pts: Vec<Vec<f64>> = Vec::new();
        let mut attempts = 0;
        while pts.len() < m && attempts < 100_000 {
            attempts += 1;
            let mut p: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0f64)).collect();
            let norm = p.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm < 1e-3 {
                continue;
            }
            for x in p.iter_mut() {
                *x /= norm;
            }
            let fits = pts.iter().all(|q| {
                let c: f64 = p.iter().zip(q).map(|(a, b)| a * b).sum();
                let t = c.clamp(-1.0, 1.0).acos();
                (phi + 1e-6..=tau - 1e-6).contains(&t)
            });
            if fits {
                pts.push(p);
            }
        }
        pts
    };
    let sc = SphericalCode {
        points,
        min_angle: phi,
        max_angle: tau,
    };
    let entries = from_spherical(&sc, &Tolerances::default()).unwrap();
    let scale = rng.gen_range(0.3..3.0);
    let shift: Vec<f64> = (0..dim).map(|_| rng.gen_range(-2.0..2.0)).collect();
    entries
        .into_iter()
        .map(|e| {
            Entry::new(
                e.z.iter().zip(&shift).map(|(a, b)| scale * a + b).collect(),
                scale * e.d,
            )
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lorentz::{angle, AngleResult};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    #[test]
    fn extremal_entries_verify_and_certify() {
        let entries = extremal_three_ball_entries();
        let rep = verify_normalized(&entries, &tol());
        // (c) is tight at both ends: |z1 - z3| = 2 = d1 + d3 and
        // |z2 - z3| = sqrt(2) = sqrt(d2^2 + d3^2).
        assert!(combine(rep.cond_c.iter().map(|&(_, _, v)| v)).passes());
        assert!(rep.cond_c.iter().all(|&(_, _, v)| v.is_marginal()));

        let code = entries_only_code(&entries, 3, &tol()).unwrap();
        let rep = verify_strict(&code, &tol()).unwrap();
        assert!(rep.strict);
        assert_eq!(rep.size, 3);
        // Pairwise angles are {pi, pi, pi/2}.
        let mut angles: Vec<f64> = rep
            .pairs
            .iter()
            .map(|p| {
                angle(&code.vectors[p.i], &code.vectors[p.j], 1e-9)
                    .unwrap()
                    .angle()
                    .unwrap()
            })
            .collect();
        angles.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert!((angles[0] - std::f64::consts::FRAC_PI_2).abs() <= 1e-8);
        assert!((angles[1] - std::f64::consts::PI).abs() <= 1e-8);
        assert!((angles[2] - std::f64::consts::PI).abs() <= 1e-8);
    }

    #[test]
    fn single_vector_is_strict() {
        let w = LorentzVector::new(vec![1.0, 0.0, 0.0], 0.0);
        let code = HyperbolicCode::new(3, vec![w]);
        let rep = verify_strict(&code, &tol()).unwrap();
        assert!(rep.strict);
        assert!(rep.witness.is_some());
    }

    #[test]
    fn failing_pair_is_reported() {
        // beta^2 > alpha gamma: disjoint boundaries at hyperbolic distance.
        let w1 = LorentzVector::new(vec![1.0, 0.0], 0.0);
        let w2 = LorentzVector::new(vec![-2.0, 0.5f64.sqrt()], 3.5f64.sqrt());
        assert!((inner(&w2, &w2).unwrap() + 1.0).abs() < 1e-12);
        let code = HyperbolicCode::new(2, vec![w1, w2]);
        let rep = verify_strict(&code, &tol()).unwrap();
        assert!(!rep.strict);
        assert_eq!(rep.failing_pairs(), vec![(0, 1)]);
    }

    #[test]
    fn rejects_non_negative_vector() {
        let code = HyperbolicCode::new(2, vec![LorentzVector::sheet_origin(2)]);
        assert!(verify_strict(&code, &tol()).is_err());
    }

    #[test]
    fn complementary_pair_is_nonstrict_but_pairs_pass() {
        let w = LorentzVector::new(vec![1.0, 0.3, 0.0], 0.2);
        let code = HyperbolicCode::new(3, vec![w.clone(), w.neg()]);
        let rep = verify_strict(&code, &tol()).unwrap();
        // I(w, -w) = 1 > 0 and beta^2 = alpha gamma: pairs marginal-pass,
        // but the two half-spaces cover everything, so no witness exists.
        assert!(rep.pair_verdict.passes());
        assert!(rep.witness.is_none());
        assert!(!rep.strict);
    }

    #[test]
    fn strict_from_nonstrict_complementary_pair() {
        let w = LorentzVector::new(vec![1.0, 0.3, 0.0], 0.2);
        let code = HyperbolicCode::new(3, vec![w.clone(), w.neg()]);
        let out = strict_from_nonstrict(&code, &tol()).unwrap();
        assert_eq!(out.len(), 1);
        assert!(verify_strict(&out, &tol()).unwrap().strict);
    }

    #[test]
    fn strict_from_nonstrict_keeps_interior_majority() {
        let entries = extremal_three_ball_entries();
        let mut vectors: Vec<LorentzVector> = entries
            .iter()
            .map(|e| {
                vector_from_descriptor(&HalfSpaceDescriptor::sphere(e.z.clone(), e.d, 1)).unwrap()
            })
            .collect();
        // One exterior-orientation half-space through the centroid region;
        // its boundary meets each unit ball at angle >= pi/2.
        let centroid = vec![7.0 / 6.0, 7.0f64.sqrt() / 6.0];
        vectors.push(
            vector_from_descriptor(&HalfSpaceDescriptor::sphere(centroid, 1.0, -1)).unwrap(),
        );
        let code = HyperbolicCode::new(3, vectors);
        let out = strict_from_nonstrict(&code, &tol()).unwrap();
        assert_eq!(out.len(), 3);
        assert!(verify_strict(&out, &tol()).unwrap().strict);
    }

    #[test]
    fn normalize_size_one_is_empty() {
        let code = HyperbolicCode::new(3, vec![LorentzVector::new(vec![1.0, 0.0, 0.0], 0.0)]);
        let norm = normalize(&code, 0, &tol()).unwrap();
        assert!(norm.entries.is_empty());
    }

    #[test]
    fn normalize_extremal_code_satisfies_all_conditions() {
        let code = entries_only_code(&extremal_three_ball_entries(), 3, &tol()).unwrap();
        for pivot in 0..3 {
            let norm = normalize(&code, pivot, &tol()).unwrap();
            assert_eq!(norm.entries.len(), 2);
            let rep = verify_normalized(&norm.entries, &tol());
            assert!(
                rep.verdict().passes(),
                "pivot {pivot}: {:?} entries {:?}",
                rep,
                norm.entries
            );
        }
    }

    #[test]
    fn normalize_roundtrips_to_a_strict_code() {
        let code = entries_only_code(&extremal_three_ball_entries(), 3, &tol()).unwrap();
        let norm = normalize(&code, 0, &tol()).unwrap();
        let back = code_from_entries(&norm.entries, 3, &tol()).unwrap();
        let rep = verify_strict(&back, &tol()).unwrap();
        assert!(rep.strict);
        assert_eq!(rep.size, 3);
    }

    #[test]
    fn concentric_entries_fail_condition_c() {
        let entries = vec![Entry::new(vec![0.0, 0.0], 1.0), Entry::new(vec![0.0, 0.0], 0.5)];
        let rep = verify_normalized(&entries, &tol());
        assert_eq!(rep.cond_c[0].2, Verdict::Fails);
    }

    fn circle_code(k: usize, phi: f64, tau: f64) -> SphericalCode {
        let points = (0..k)
            .map(|i| {
                let t = 2.0 * std::f64::consts::PI * i as f64 / k as f64;
                vec![t.cos(), t.sin()]
            })
            .collect();
        SphericalCode {
            points,
            min_angle: phi,
            max_angle: tau,
        }
    }

    #[test]
    fn from_spherical_triangle_code() {
        let phi = 2.0 * std::f64::consts::PI / 3.0;
        let sc = circle_code(3, phi, phi);
        let entries = from_spherical(&sc, &tol()).unwrap();
        assert_eq!(entries.len(), 3);
        let d = (1.5f64).sqrt();
        for e in &entries {
            assert!((e.d - d).abs() <= 1e-12);
        }
        let rep = verify_normalized(&entries, &tol());
        // (c) is marginal at the lower boundary: |z_i - z_j| = sqrt(3)
        // = sqrt(d_i^2 + d_j^2).
        assert!(rep.cond_c.iter().all(|&(_, _, v)| v == Verdict::Marginal));
        assert!(rep.verdict().passes());
    }

    #[test]
    fn from_spherical_standard_angles() {
        let phi = 2.0 * phi0();
        let tau = std::f64::consts::PI - phi0();
        // Compatible: sqrt(2) sin(phi0) = sin((pi - phi0)/2) = sqrt(7/8).
        let sc = SphericalCode {
            points: vec![vec![1.0, 0.0]],
            min_angle: phi,
            max_angle: tau,
        };
        let entries = from_spherical(&sc, &tol()).unwrap();
        assert!((entries[0].d - (7.0f64 / 8.0).sqrt()).abs() <= 1e-12);
    }

    #[test]
    fn from_spherical_rejects_incompatible_range() {
        let sc = SphericalCode {
            points: vec![vec![1.0, 0.0]],
            min_angle: 0.3,
            max_angle: 3.0,
        };
        assert!(from_spherical(&sc, &tol()).is_err());
    }

    #[test]
    fn from_spherical_empty() {
        let sc = SphericalCode {
            points: vec![],
            min_angle: 1.0,
            max_angle: 1.0,
        };
        assert!(from_spherical(&sc, &tol()).unwrap().is_empty());
    }

    #[test]
    fn prune_antipodal_pair() {
        let sc = SphericalCode {
            points: vec![vec![1.0, 0.0, 0.0], vec![-1.0, 0.0, 0.0]],
            min_angle: 2.0 * phi0(),
            max_angle: std::f64::consts::PI,
        };
        let out = prune_antipodal(&sc, &tol()).unwrap();
        assert_eq!(out.points.len(), 1);
    }

    #[test]
    fn prune_keeps_triangle() {
        let phi = 2.0 * std::f64::consts::PI / 3.0;
        let sc = circle_code(3, phi, phi);
        let out = prune_antipodal(&sc, &tol()).unwrap();
        assert_eq!(out.points.len(), 3);
    }

    #[test]
    fn prune_cross_keeps_half() {
        // {e1, -e1, e2, -e2}: right angles clear the 2 phi0 floor
        // (2 phi0 ~ 1.445 < pi/2); the two antipodal conflicts each drop
        // one point.
        let sc = SphericalCode {
            points: vec![
                vec![1.0, 0.0, 0.0],
                vec![-1.0, 0.0, 0.0],
                vec![0.0, 1.0, 0.0],
                vec![0.0, -1.0, 0.0],
            ],
            min_angle: 2.0 * phi0(),
            max_angle: std::f64::consts::PI,
        };
        let out = prune_antipodal(&sc, &tol()).unwrap();
        assert_eq!(out.points.len(), 2);
        let (lo, hi) = out.observed_angles();
        assert!(lo >= 2.0 * phi0() - 1e-9);
        assert!(hi <= std::f64::consts::PI - phi0() + 1e-9);
    }

    #[test]
    fn prune_rejects_close_pairs() {
        // Angle 1.2 < 2 phi0 ~ 1.445 violates the floor.
        let sc = SphericalCode {
            points: vec![
                vec![1.0, 0.0, 0.0],
                vec![1.2f64.cos(), 1.2f64.sin(), 0.0],
            ],
            min_angle: 2.0 * phi0(),
            max_angle: std::f64::consts::PI,
        };
        assert!(matches!(
            prune_antipodal(&sc, &tol()),
            Err(HcError::Precondition(_))
        ));
    }

    #[test]
    fn xi_directions_extremal_angle() {
        let entries = extremal_three_ball_entries();
        let sc = xi_directions(&entries).unwrap();
        assert_eq!(sc.points.len(), 2);
        let (lo, hi) = sc.observed_angles();
        assert!((lo - phi0()).abs() <= 1e-9, "min angle {lo}");
        assert!((hi - phi0()).abs() <= 1e-9);
    }

    #[test]
    fn xi_directions_needs_two_entries() {
        assert!(xi_directions(&[Entry::new(vec![0.0, 0.0], 1.0)]).is_err());
    }

    #[test]
    fn feasible_entries_always_build_strict_codes() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for trial in 0..200 {
            let n = 2 + trial % 3;
            let m = 1 + trial % 3;
            let entries = random_feasible_entries(&mut rng, n, m);
            let rep = verify_normalized(&entries, &tol());
            assert!(combine(rep.cond_c.iter().map(|&(_, _, v)| v)).passes());
            let code = entries_only_code(&entries, n, &tol()).unwrap();
            let rep = verify_strict(&code, &tol()).unwrap();
            assert!(rep.strict, "trial {trial}: {entries:?}");
        }
    }

    #[test]
    fn perturbed_entries_fail_verification() {
        let mut rng = ChaCha8Rng::seed_from_u64(37);
        let mut done = 0;
        while done < 100 {
            let n = 2 + done % 3;
            let entries = random_feasible_entries(&mut rng, n, 2);
            if entries.len() < 2 {
                continue;
            }
            // Pull the second center onto the first: violates the lower
            // bound of (c) decisively.
            let mut bad = entries.clone();
            let t = 0.9 + 0.09 * rng.gen_range(0.0..1.0);
            bad[1].z = bad[1]
                .z
                .iter()
                .zip(&bad[0].z)
                .map(|(a, b)| a + t * (b - a))
                .collect();
            let code = entries_only_code(&bad, n, &tol()).unwrap();
            let rep = verify_strict(&code, &tol()).unwrap();
            assert!(!rep.pair_verdict.passes(), "{bad:?}");
            done += 1;
        }
    }

    #[test]
    fn normalize_random_codes_pass_normalized_checks() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for trial in 0..50 {
            let entries = random_feasible_entries(&mut rng, 3, 3);
            let code = entries_only_code(&entries, 3, &tol()).unwrap();
            let pivot = trial % code.len();
            let norm = normalize(&code, pivot, &tol()).unwrap();
            assert_eq!(norm.entries.len(), code.len() - 1);
            let rep = verify_normalized(&norm.entries, &tol());
            assert!(rep.verdict().passes(), "trial {trial}: {:?}", norm.entries);
        }
    }

    #[test]
    fn xi_directions_from_construction_respect_floor() {
        let mut rng = ChaCha8Rng::seed_from_u64(43);
        for _ in 0..50 {
            let entries = random_feasible_entries(&mut rng, 3, 3);
            if entries.len() < 2 {
                continue;
            }
            let sc = xi_directions(&entries).unwrap();
            let (lo, _) = sc.observed_angles();
            if sc.points.len() >= 2 {
                assert!(lo >= phi0() - 1e-8, "min direction angle {lo}");
            }
        }
    }

    #[test]
    fn angle_matches_disjoint_marker_on_far_entries() {
        let a = Entry::new(vec![0.0, 0.0], 1.0);
        let b = Entry::new(vec![10.0, 0.0], 1.0);
        let code = entries_only_code(&[a, b], 3, &tol()).unwrap();
        assert_eq!(
            angle(&code.vectors[0], &code.vectors[1], 1e-9).unwrap(),
            AngleResult::Disjoint
        );
        let rep = verify_strict(&code, &tol()).unwrap();
        assert!(!rep.pair_verdict.passes());
    }
}
