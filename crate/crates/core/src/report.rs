//! Three-valued verdicts for inequality checks.
//!
//! Verification never silently accepts or rejects a boundary-tight
//! configuration: an inequality whose margin is within tolerance of zero is
//! reported as [`Verdict::Marginal`].

use serde::{Deserialize, Serialize};

/// Outcome of a single inequality check.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Holds,
    Marginal,
    Fails,
}

impl Verdict {
    /// Classify a signed margin (`>= 0` means the inequality holds).
    pub fn from_margin(margin: f64, tol: f64) -> Verdict {
        if margin.abs() <= tol {
            Verdict::Marginal
        } else if margin > 0.0 {
            Verdict::Holds
        } else {
            Verdict::Fails
        }
    }

    /// A marginal check counts as passing; only a clear failure rejects.
    pub fn passes(self) -> bool {
        self != Verdict::Fails
    }

    pub fn is_marginal(self) -> bool {
        self == Verdict::Marginal
    }

    /// Conjunction: fails dominates, then marginal.
    pub fn and(self, other: Verdict) -> Verdict {
        use Verdict::*;
        match (self, other) {
            (Fails, _) | (_, Fails) => Fails,
            (Marginal, _) | (_, Marginal) => Marginal,
            _ => Holds,
        }
    }
}

/// Fold a sequence of verdicts into a single one.
pub fn combine<I: IntoIterator<Item = Verdict>>(iter: I) -> Verdict {
    iter.into_iter().fold(Verdict::Holds, Verdict::and)
}
