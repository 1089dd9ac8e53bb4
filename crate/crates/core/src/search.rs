//! Numerical optimization: the three-ball extremal-angle maximization and
//! simulated-annealing search for large ball families subject to the
//! pairwise tangent-to-orthogonal window.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::code::{code_from_entries, entries_only_code, verify_strict, Entry, HyperbolicCode};
use crate::tol::Tolerances;
use crate::{HcError, Result};

/// Three circles with radii `d1 <= d2 <= d3 = 1`: centers at the origin,
/// `z2`, and `z3`. Every pair is constrained to the window
/// `sqrt(d_i^2 + d_j^2) <= |z_i - z_j| <= d_i + d_j`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TriangleConfig {
    pub z2: [f64; 2],
    pub z3: [f64; 2],
    pub d1: f64,
    pub d2: f64,
}

impl TriangleConfig {
    pub fn side_lengths(&self) -> (f64, f64, f64) {
        let r2 = (self.z2[0] * self.z2[0] + self.z2[1] * self.z2[1]).sqrt();
        let r3 = (self.z3[0] * self.z3[0] + self.z3[1] * self.z3[1]).sqrt();
        let dx = self.z2[0] - self.z3[0];
        let dy = self.z2[1] - self.z3[1];
        (r2, r3, (dx * dx + dy * dy).sqrt())
    }

    /// Max violation of the three pairwise window constraints.
    pub fn constraint_violation(&self) -> f64 {
        let (r2, r3, s) = self.side_lengths();
        let windows = [
            (r2, (self.d1 * self.d1 + self.d2 * self.d2).sqrt(), self.d1 + self.d2),
            (r3, (self.d1 * self.d1 + 1.0).sqrt(), self.d1 + 1.0),
            (s, (self.d2 * self.d2 + 1.0).sqrt(), self.d2 + 1.0),
        ];
        windows
            .iter()
            .map(|&(v, lo, hi)| (lo - v).max(0.0).max(v - hi))
            .fold(0.0, f64::max)
    }

    /// Euclidean distance between the coordinate tuples of two configs.
    pub fn distance(&self, other: &TriangleConfig) -> f64 {
        let mut acc = 0.0;
        for k in 0..2 {
            acc += (self.z2[k] - other.z2[k]).powi(2);
            acc += (self.z3[k] - other.z3[k]).powi(2);
        }
        acc += (self.d1 - other.d1).powi(2);
        acc += (self.d2 - other.d2).powi(2);
        acc.sqrt()
    }
}

/// Cosine of the triangle's angle at the origin.
pub fn cos_theta1(cfg: &TriangleConfig) -> Result<f64> {
    let (r2, r3, s) = cfg.side_lengths();
    if r2 <= 1e-300 || r3 <= 1e-300 {
        return Err(HcError::Degenerate("zero-length triangle side".into()));
    }
    Ok((r2 * r2 + r3 * r3 - s * s) / (2.0 * r2 * r3))
}

/// The sharp extremal configuration: unit circles at `(3/2, sqrt(7)/2)`
/// and `(2, 0)`, angle at origin `arccos(3/4)`.
pub fn extremal_config() -> TriangleConfig {
    TriangleConfig {
        z2: [1.5, 7.0f64.sqrt() / 2.0],
        z3: [2.0, 0.0],
        d1: 1.0,
        d2: 1.0,
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MaxAngleResult {
    pub max_cos: f64,
    pub argmax: TriangleConfig,
}

struct SideBox {
    r2: (f64, f64),
    r3: (f64, f64),
    s: (f64, f64),
}

fn side_box(d1: f64, d2: f64, r2_fix: Option<f64>) -> SideBox {
    let r2 = match r2_fix {
        Some(v) => (v, v),
        None => ((d1 * d1 + d2 * d2).sqrt(), d1 + d2),
    };
    SideBox {
        r2,
        r3: ((d1 * d1 + 1.0).sqrt(), d1 + 1.0),
        s: ((d2 * d2 + 1.0).sqrt(), d2 + 1.0),
    }
}

/// Feasible `s` interval after intersecting the window with the triangle
/// inequality for given `r2, r3`.
fn s_interval(b: &SideBox, r2: f64, r3: f64) -> Option<(f64, f64)> {
    let lo = b.s.0.max((r2 - r3).abs());
    let hi = b.s.1.min(r2 + r3);
    (lo <= hi + 1e-12).then_some((lo, hi.max(lo)))
}

fn cos_from_sides(r2: f64, r3: f64, s: f64) -> f64 {
    (r2 * r2 + r3 * r3 - s * s) / (2.0 * r2 * r3)
}

/// Place the side-length triple back in the plane: larger circle on the
/// positive x-axis, the other in the upper half-plane.
fn realize(r2: f64, r3: f64, s: f64, d1: f64, d2: f64) -> TriangleConfig {
    let c = cos_from_sides(r2, r3, s).clamp(-1.0, 1.0);
    let sn = (1.0 - c * c).max(0.0).sqrt();
    TriangleConfig {
        z2: [r2 * c, r2 * sn],
        z3: [r3, 0.0],
        d1,
        d2,
    }
}

/// Constrained maximization of the origin angle's cosine over all feasible
/// triangles for radii `(d1, d2, 1)`, optionally with `|z2|` pinned.
///
/// Multi-start projected local search over side-length space; for each
/// candidate `(r2, r3)` the optimal `s` is the smallest feasible one, so the
/// effective search is two-dimensional. Deterministic per seed; the result
/// is a certified lower bound on the true maximum.
pub fn lemma61_max_constrained(
    d1: f64,
    d2: f64,
    r2_fix: Option<f64>,
    restarts: usize,
    seed: u64,
) -> Result<MaxAngleResult> {
    if !(0.0 < d1 && d1 <= d2 && d2 <= 1.0) {
        return Err(HcError::Precondition(format!(
            "need 0 < d1 <= d2 <= 1, got d1 = {d1}, d2 = {d2}"
        )));
    }
    let b = side_box(d1, d2, r2_fix);
    let eval = |r2: f64, r3: f64| -> Option<(f64, f64)> {
        let (s_lo, _) = s_interval(&b, r2, r3)?;
        Some((cos_from_sides(r2, r3, s_lo), s_lo))
    };

    let mut best: Option<(f64, f64, f64, f64)> = None; // (cos, r2, r3, s)
    let mut consider = |cand: Option<(f64, f64)>, r2: f64, r3: f64| {
        if let Some((c, s)) = cand {
            if best.map_or(true, |(bc, ..)| c > bc) {
                best = Some((c, r2, r3, s));
            }
        }
    };

    // Box corners, then seeded multi-start hill climbing.
    for &r2 in &[b.r2.0, b.r2.1] {
        for &r3 in &[b.r3.0, b.r3.1] {
            consider(eval(r2, r3), r2, r3);
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..restarts.max(1) {
        let mut r2 = rng.gen_range(b.r2.0..=b.r2.1.max(b.r2.0 + f64::EPSILON));
        let mut r3 = rng.gen_range(b.r3.0..=b.r3.1);
        let mut cur = eval(r2, r3);
        let mut step = 0.25 * ((b.r2.1 - b.r2.0).max(b.r3.1 - b.r3.0)).max(1e-3);
        while step > 1e-12 {
            let mut improved = false;
            for (dr2, dr3) in [
                (step, 0.0),
                (-step, 0.0),
                (0.0, step),
                (0.0, -step),
                (step, step),
                (step, -step),
                (-step, step),
                (-step, -step),
            ] {
                let n2 = (r2 + dr2).clamp(b.r2.0, b.r2.1);
                let n3 = (r3 + dr3).clamp(b.r3.0, b.r3.1);
                let cand = eval(n2, n3);
                match (cand, cur) {
                    (Some((c, _)), Some((bc, _))) if c > bc + 1e-15 => {
                        r2 = n2;
                        r3 = n3;
                        cur = cand;
                        improved = true;
                    }
                    (Some(_), None) => {
                        r2 = n2;
                        r3 = n3;
                        cur = cand;
                        improved = true;
                    }
                    _ => {}
                }
            }
            if !improved {
                step *= 0.5;
            }
        }
        consider(cur, r2, r3);
    }

    let (c, r2, r3, s) =
        best.ok_or(HcError::EmptyFeasibleSet(d1, d2))?;
    Ok(MaxAngleResult {
        max_cos: c,
        argmax: realize(r2, r3, s, d1, d2),
    })
}

pub fn lemma61_max(d1: f64, d2: f64, restarts: usize, seed: u64) -> Result<MaxAngleResult> {
    lemma61_max_constrained(d1, d2, None, restarts, seed)
}

/// One cell of the `(d1, d2)` grid sweep.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GridCell {
    pub d1: f64,
    pub d2: f64,
    pub max_cos: f64,
}

/// Sweep the radii grid; cells are evaluated independently and merged in
/// row-major order.
pub fn lemma61_grid(grid: usize, restarts: usize, seed: u64) -> Result<Vec<GridCell>> {
    let mut tasks = Vec::new();
    for i in 0..grid {
        for j in i..grid {
            let d1 = (i + 1) as f64 / grid as f64;
            let d2 = (j + 1) as f64 / grid as f64;
            tasks.push((d1, d2));
        }
    }
    tasks
        .into_par_iter()
        .map(|(d1, d2)| {
            let r = lemma61_max(d1, d2, restarts, seed ^ ((d1.to_bits()) ^ d2.to_bits().rotate_left(17)))?;
            Ok(GridCell {
                d1,
                d2,
                max_cos: r.max_cos,
            })
        })
        .collect()
}

/// Annealing-schedule and reproducibility knobs.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SearchParams {
    /// Total proposed moves per restart.
    pub budget: u64,
    pub seed: u64,
    pub restarts: usize,
    pub t0: f64,
    /// Temperature factor applied once per sweep (one proposal per
    /// coordinate).
    pub cooling: f64,
    pub r_min: f64,
    pub r_max: f64,
}

impl Default for SearchParams {
    fn default() -> Self {
        SearchParams {
            budget: 200_000,
            seed: 0,
            restarts: 8,
            t0: 1.0,
            cooling: 0.995,
            r_min: 0.05,
            r_max: 20.0,
        }
    }
}

/// Entries plus the squared-violation score of the pair window; zero score
/// means every pair inequality holds.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SearchState {
    pub entries: Vec<Entry>,
    pub violation: f64,
    pub restart: usize,
}

/// Search outcome: either a certified code or the best infeasible state.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SearchOutcome {
    pub state: SearchState,
    /// Entries-only certificate (one vector per entry, witness included).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub code: Option<HyperbolicCode>,
    /// Size of the certified code including the exterior pivot when the
    /// pivot extension also verifies.
    pub certified_size: Option<usize>,
}

fn pair_violation(a: &Entry, b: &Entry) -> f64 {
    let g = a
        .z
        .iter()
        .zip(&b.z)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt();
    let lo = (a.d * a.d + b.d * b.d).sqrt();
    let hi = a.d + b.d;
    (lo - g).max(0.0).powi(2) + (g - hi).max(0.0).powi(2)
}

fn total_violation(entries: &[Entry]) -> f64 {
    let mut acc = 0.0;
    for i in 0..entries.len() {
        for j in (i + 1)..entries.len() {
            acc += pair_violation(&entries[i], &entries[j]);
        }
    }
    acc
}

fn entry_violation(entries: &[Entry], i: usize) -> f64 {
    entries
        .iter()
        .enumerate()
        .filter(|&(j, _)| j != i)
        .map(|(_, e)| pair_violation(&entries[i], e))
        .sum()
}

fn anneal_restart(
    n: usize,
    m: usize,
    params: &SearchParams,
    restart: usize,
) -> SearchState {
    let dim = n - 1;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed.wrapping_mul(0x100000001b3) ^ restart as u64);
    let mut entries: Vec<Entry> = (0..m)
        .map(|_| {
            Entry::new(
                (0..dim).map(|_| rng.gen_range(-3.0..3.0)).collect(),
                rng.gen_range(0.5..2.0),
            )
        })
        .collect();
    let mut violation = total_violation(&entries);
    let mut best = entries.clone();
    let mut best_violation = violation;
    let mut temp = params.t0;
    let coords = m * (dim + 1);
    let mut proposed: u64 = 0;

    'outer: while proposed < params.budget && best_violation > 0.0 {
        for i in 0..m {
            for k in 0..=dim {
                if proposed >= params.budget {
                    break 'outer;
                }
                proposed += 1;
                let sigma = 0.5 * temp + 1e-4;
                let before = entry_violation(&entries, i);
                let old = if k < dim {
                    let v = entries[i].z[k];
                    entries[i].z[k] = v + sigma * rng.sample::<f64, _>(rand_distr_standard());
                    v
                } else {
                    let v = entries[i].d;
                    entries[i].d = (v + sigma * rng.sample::<f64, _>(rand_distr_standard()))
                        .clamp(params.r_min, params.r_max);
                    v
                };
                let after = entry_violation(&entries, i);
                let delta = after - before;
                let accept = delta <= 0.0 || rng.gen_range(0.0..1.0f64) < (-delta / temp.max(1e-12)).exp();
                if accept {
                    violation += delta;
                    if violation < best_violation {
                        best_violation = violation.max(0.0);
                        best = entries.clone();
                    }
                } else if k < dim {
                    entries[i].z[k] = old;
                } else {
                    entries[i].d = old;
                }
            }
        }
        temp *= params.cooling;
        let _ = coords;
        // Guard against floating-point drift in the incremental score.
        if violation < 1e-12 {
            violation = total_violation(&entries);
            if violation <= 1e-18 {
                best_violation = 0.0;
                best = entries.clone();
            }
        }
    }
    // Polish: recompute exactly.
    let exact = total_violation(&best);
    SearchState {
        entries: best,
        violation: exact,
        restart,
    }
}

// Standard normal via Box-Muller-free rand machinery: rand 0.8 exposes
// StandardNormal only through rand_distr; a small inline implementation
// keeps the dependency set minimal.
struct StdNormal;

impl rand::distributions::Distribution<f64> for StdNormal {
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        // Box-Muller; one value per call is fine at this scale.
        let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
        let u2: f64 = rng.gen_range(0.0..1.0);
        (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
    }
}

fn rand_distr_standard() -> StdNormal {
    StdNormal
}

/// Simulated-annealing search for `m_target` balls satisfying every pair
/// window in dimension `n`. Restarts run in parallel with independent RNG
/// streams; the merge (first certified restart by index, else lowest
/// violation then index) is deterministic for any thread count.
pub fn search_code(
    n: usize,
    m_target: usize,
    params: &SearchParams,
    tol: &Tolerances,
) -> Result<SearchOutcome> {
    if n < 2 || m_target < 1 {
        return Err(HcError::Precondition(format!(
            "need n >= 2 and m_target >= 1, got n = {n}, m = {m_target}"
        )));
    }
    let states: Vec<SearchState> = (0..params.restarts.max(1))
        .into_par_iter()
        .map(|r| anneal_restart(n, m_target, params, r))
        .collect();

    let mut chosen: Option<SearchOutcome> = None;
    for st in &states {
        if st.violation == 0.0 {
            if let Ok(code) = entries_only_code(&st.entries, n, tol) {
                if let Ok(rep) = verify_strict(&code, tol) {
                    if rep.strict {
                        let mut size = code.len();
                        if let Ok(ext) = code_from_entries(&st.entries, n, tol) {
                            if verify_strict(&ext, tol).map(|r| r.strict).unwrap_or(false) {
                                size = ext.len();
                            }
                        }
                        chosen = Some(SearchOutcome {
                            state: st.clone(),
                            code: Some(code),
                            certified_size: Some(size),
                        });
                        break;
                    }
                }
            }
        }
    }
    Ok(chosen.unwrap_or_else(|| {
        let best = states
            .iter()
            .min_by(|a, b| {
                a.violation
                    .partial_cmp(&b.violation)
                    .unwrap()
                    .then(a.restart.cmp(&b.restart))
            })
            .expect("at least one restart")
            .clone();
        SearchOutcome {
            state: best,
            code: None,
            certified_size: None,
        }
    }))
}
