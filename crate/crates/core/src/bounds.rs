//! Quantitative bounds: the closed-form packing rates, exact small-sphere
//! kissing values (S^0 and the circle), and the integer sandwich for the
//! maximal strict code size.

use serde::{Deserialize, Serialize};

use crate::phi0;
use crate::{HcError, Result};

use std::f64::consts::PI;

/// A rate evaluation, flagging arguments beyond the proven validity range.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RateValue {
    pub value: f64,
    /// True when the argument exceeds pi/3, outside the range where the
    /// upper-rate bound is established; the value is still reported.
    pub beyond_validity: bool,
}

/// Upper packing rate `1 / (2^0.099 sqrt(1 - cos(phi)))`.
pub fn kl_rate(phi: f64) -> Result<RateValue> {
    if phi <= 0.0 {
        return Err(HcError::Precondition(format!(
            "angle must be positive, got {phi}"
        )));
    }
    let value = 1.0 / (2.0f64.powf(0.099) * (1.0 - phi.cos()).sqrt());
    Ok(RateValue {
        value,
        beyond_validity: phi > PI / 3.0 + 1e-15,
    })
}

/// Lower packing rate `1 / sin(phi)` (the supremal base of the exponential
/// lower bound).
pub fn csw_rate(phi: f64) -> Result<f64> {
    if !(0.0 < phi && phi < PI / 2.0) {
        return Err(HcError::Precondition(format!(
            "angle must lie in (0, pi/2), got {phi}"
        )));
    }
    Ok(1.0 / phi.sin())
}

/// A kissing value together with where it came from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kissing {
    /// Computed exactly by this crate (S^0 or circle oracle).
    Exact(usize),
    /// Taken from a user-supplied table.
    Table { value: usize, source: String },
    /// No exact method and no table entry.
    Unavailable,
}

impl Kissing {
    pub fn value(&self) -> Option<usize> {
        match self {
            Kissing::Exact(v) => Some(*v),
            Kissing::Table { value, .. } => Some(*value),
            Kissing::Unavailable => None,
        }
    }
}

/// One row of the user-supplied kissing table.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct KissingTableEntry {
    pub m: usize,
    pub phi: f64,
    #[serde(default)]
    pub tau: Option<f64>,
    pub value: usize,
    pub source: String,
}

fn circ_dist(x: f64) -> f64 {
    let r = x.rem_euclid(2.0 * PI);
    r.min(2.0 * PI - r)
}

/// Equal spacing of `k` points: exact feasibility check.
fn equal_spacing_ok(k: usize, phi: f64, tau: f64) -> bool {
    if k < 2 {
        return true;
    }
    let gap = 2.0 * PI / k as f64;
    let mut min_d = f64::INFINITY;
    let mut max_d = 0.0f64;
    for j in 1..k {
        let d = circ_dist(gap * j as f64);
        min_d = min_d.min(d);
        max_d = max_d.max(d);
    }
    min_d >= phi - 1e-12 && max_d <= tau + 1e-12
}

/// Exhaustive search over integer gap patterns on an `n_grid`-step circle,
/// with pairwise bounds relaxed by the grid resolution. Finding nothing
/// here certifies continuous infeasibility; a hit is re-checked strictly.
fn grid_gap_search(k: usize, phi: f64, tau: f64, n_grid: usize) -> Option<Vec<f64>> {
    let unit = 2.0 * PI / n_grid as f64;
    // Any continuous solution can be rounded to grid points moving each
    // point by at most unit/2, changing each pairwise distance by at most
    // unit; relax the window accordingly.
    let slack = 1.001 * unit;
    let lo = ((phi - slack) / unit).floor().max(1.0) as i64;
    let positions_ok = |pos: &[i64], cand: i64| -> bool {
        for &p in pos {
            let d = circ_dist((cand - p) as f64 * unit);
            if d < phi - slack || d > tau + slack {
                return false;
            }
        }
        true
    };
    // Depth-first placement of points at increasing grid positions; the
    // first point is pinned at 0 by rotational symmetry.
    fn dfs(
        pos: &mut Vec<i64>,
        k: usize,
        n_grid: i64,
        lo: i64,
        ok: &dyn Fn(&[i64], i64) -> bool,
    ) -> bool {
        if pos.len() == k {
            return true;
        }
        let start = pos.last().unwrap() + lo;
        // Remaining points each need at least `lo` grid units of spacing,
        // including wrap-around back to position 0.
        let remaining = (k - pos.len()) as i64;
        let end = n_grid - (remaining - 1) * lo - lo;
        let mut c = start;
        while c <= end {
            if ok(pos, c) {
                pos.push(c);
                if dfs(pos, k, n_grid, lo, ok) {
                    return true;
                }
                pos.pop();
            }
            c += 1;
        }
        false
    }
    let mut pos = vec![0i64];
    if dfs(&mut pos, k, n_grid as i64, lo, &positions_ok) {
        Some(pos.iter().map(|&p| p as f64 * unit).collect())
    } else {
        None
    }
}

/// Local repair of a near-feasible circle configuration: project each
/// pairwise distance back into the window by moving the later point.
fn polish_circle(points: &mut [f64], phi: f64, tau: f64) -> bool {
    for _ in 0..20_000 {
        let mut worst = 0.0f64;
        for i in 0..points.len() {
            for j in (i + 1)..points.len() {
                let d = circ_dist(points[j] - points[i]);
                let err = (phi - d).max(d - tau).max(0.0);
                if err > worst {
                    worst = err;
                }
                if err > 0.0 {
                    let target = d.clamp(phi, tau);
                    // Shift the j-th point along the shorter arc.
                    let raw = (points[j] - points[i]).rem_euclid(2.0 * PI);
                    let sign = if raw <= PI { 1.0 } else { -1.0 };
                    points[j] += 0.5 * sign * (target - d);
                }
            }
        }
        if worst <= 1e-12 {
            return true;
        }
    }
    false
}

/// Maximal number of circle points with pairwise angular distances in
/// `[phi, tau]`.
pub fn circle_kissing(phi: f64, tau: f64) -> Result<usize> {
    if !(phi > 0.0 && phi <= tau && tau <= PI + 1e-12) {
        return Err(HcError::Precondition(format!(
            "need 0 < phi <= tau <= pi, got phi = {phi}, tau = {tau}"
        )));
    }
    let kmax = ((2.0 * PI / phi).floor() as usize).min(12).max(1);
    for k in (2..=kmax).rev() {
        if equal_spacing_ok(k, phi, tau) {
            return Ok(k);
        }
        if let Some(mut pts) = grid_gap_search(k, phi, tau, 1440) {
            // Strict check first; otherwise refine the grid witness.
            let strict = pts.iter().enumerate().all(|(i, &a)| {
                pts[i + 1..]
                    .iter()
                    .all(|&b| (phi..=tau).contains(&circ_dist(b - a)))
            });
            if strict || polish_circle(&mut pts, phi, tau) {
                return Ok(k);
            }
        }
    }
    Ok(1)
}

/// Kissing value for the sphere of dimension index `m` (`m = 1`: two-point
/// sphere, `m = 2`: circle). Higher dimensions come from the user table.
pub fn small_kissing(
    m: usize,
    phi: f64,
    tau: Option<f64>,
    table: Option<&[KissingTableEntry]>,
) -> Result<Kissing> {
    if phi <= 0.0 {
        return Err(HcError::Precondition(format!(
            "angle must be positive, got {phi}"
        )));
    }
    let tau_v = tau.unwrap_or(PI);
    match m {
        0 => Err(HcError::Precondition("sphere dimension index 0".into())),
        1 => {
            // The only available nonzero angle on S^0 is pi.
            Ok(Kissing::Exact(if phi <= PI && PI <= tau_v + 1e-12 {
                2
            } else {
                1
            }))
        }
        2 => circle_kissing(phi, tau_v).map(Kissing::Exact),
        _ => {
            if let Some(rows) = table {
                for row in rows {
                    let row_tau = row.tau.unwrap_or(PI);
                    if row.m == m && (row.phi - phi).abs() <= 1e-9 && (row_tau - tau_v).abs() <= 1e-9
                    {
                        return Ok(Kissing::Table {
                            value: row.value,
                            source: row.source.clone(),
                        });
                    }
                }
            }
            Ok(Kissing::Unavailable)
        }
    }
}

/// The integer sandwich and asymptotic rates for the maximal strict code
/// size in dimension `n`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BoundReport {
    pub n: usize,
    /// Constructive lower bound, when the needed kissing inputs exist.
    pub lower: Option<usize>,
    /// Upper bound `K_{n-1}(phi0) + 2`, when available.
    pub upper: Option<usize>,
    /// Bounds for the possibly-nonstrict count: same lower, twice the upper.
    pub nonstrict_upper: Option<usize>,
    /// `(m, phi, tau, value)` inputs used, with their provenance.
    pub inputs: Vec<(usize, f64, Option<f64>, Kissing)>,
    /// Base of the exponential lower bound, `1/sin(2 phi0)`.
    pub lower_rate: f64,
    /// Base of the exponential upper bound, `2^0.901`.
    pub upper_rate: f64,
    /// Human-readable asymptotic forms, in both the dimension-exponent and
    /// rank-exponent conventions.
    pub asymptotics: String,
}

pub fn r_bounds(n: usize, table: Option<&[KissingTableEntry]>) -> Result<BoundReport> {
    if n < 2 {
        return Err(HcError::Precondition(format!("need n >= 2, got {n}")));
    }
    let p0 = phi0();
    let phi = 2.0 * p0;
    let tau = PI - p0;
    let m = n - 1;
    let k_phi0 = small_kissing(m, p0, None, table)?;
    let k_2phi0 = small_kissing(m, phi, None, table)?;
    let k_window = small_kissing(m, phi, Some(tau), table)?;

    let lower = match (k_2phi0.value(), k_window.value()) {
        (Some(a), Some(b)) => Some((a / 2).max(b)),
        (Some(a), None) => Some(a / 2),
        (None, Some(b)) => Some(b),
        (None, None) => None,
    };
    let upper = k_phi0.value().map(|v| v + 2);
    let lower_rate = csw_rate(phi)?;
    let upper_rate = kl_rate(p0)?.value;
    let asymptotics = format!(
        "{:.3}^n = 2^(0.011 n) <= count <= 2^(0.901 n) = 2^(0.902 (rho - 1)) rounded at the rank exponent",
        lower_rate
    );
    Ok(BoundReport {
        n,
        lower,
        upper,
        nonstrict_upper: upper.map(|u| 2 * u),
        inputs: vec![
            (m, p0, None, k_phi0),
            (m, phi, None, k_2phi0),
            (m, phi, Some(tau), k_window),
        ],
        lower_rate,
        upper_rate,
        asymptotics,
    })
}
