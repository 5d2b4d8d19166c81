//! Optimal erasure-threshold sets.
//!
//! For an outer decoder with constant tradeoff `1 < lambda < 2` and `z`
//! trials the optimal thresholds are `T_k = (E0 / s) * F_k` with
//!
//! ```text
//! F_k = (2 b^(k-1) - lambda) / (2 b^z - lambda),   b = 1 / (lambda - 1).
//! ```
//!
//! The denominator exponent is `z`: this is the unique solution of the
//! recurrence system checked by [`recurrence_residuals`], its limit as
//! `lambda -> 2` is the BMD rule `(2k - 1) / (2z + 1)`, and substituting
//! `T_z` into `p_l^(delta/lambda)` gives the closed form of
//! [`crate::analysis::pe_mtee`].
//!
//! Multiplying through by `a^z` with `a = lambda - 1 < 1` gives
//!
//! ```text
//! F_k = (2 a^(z-k+1) (1 - a^(k-1)) + (2 - lambda) a^z)
//!     / (2 (1 - a^z) + (2 - lambda) a^z)
//! ```
//!
//! which has no overflow for large `z` and no cancellation near `lambda = 2`.

use alloc::vec::Vec;

use libm::{exp, expm1, log1p};

use crate::channel::SymbolClassProbs;
use crate::{is_bmd_lambda, Error, Result};

/// Thresholds `T_1 <= ... <= T_z` in nats per inner bit, the unit of the
/// symbol reliabilities.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ThresholdSet {
    pub lambda: f64,
    pub thresholds: Vec<f64>,
}

impl ThresholdSet {
    /// A hand-picked threshold set; must be non-empty, non-negative and sorted.
    pub fn new(lambda: f64, thresholds: Vec<f64>) -> Result<Self> {
        check_lambda(lambda)?;
        if thresholds.is_empty() {
            return Err(Error::range("z", 0.0, "[1, inf)"));
        }
        for (i, &t) in thresholds.iter().enumerate() {
            if !(t >= 0.0 && t.is_finite()) {
                return Err(Error::range("threshold", t, "[0, inf)"));
            }
            if i > 0 && t < thresholds[i - 1] {
                return Err(Error::range("threshold", t, "non-decreasing order"));
            }
        }
        Ok(ThresholdSet { lambda, thresholds })
    }

    pub fn z(&self) -> usize {
        self.thresholds.len()
    }

    /// `T_k` for `1 <= k <= z`.
    pub fn t(&self, k: usize) -> f64 {
        self.thresholds[k - 1]
    }

    pub fn first(&self) -> f64 {
        self.thresholds[0]
    }

    pub fn last(&self) -> f64 {
        self.thresholds[self.thresholds.len() - 1]
    }
}

fn check_lambda(lambda: f64) -> Result<()> {
    if lambda > 1.0 && lambda <= 2.0 {
        Ok(())
    } else {
        Err(Error::range("lambda", lambda, "(1, 2]"))
    }
}

/// `a^e` and `1 - a^e` for `a = lambda - 1`, computed without cancellation.
fn pow_pair(lambda: f64, e: usize) -> (f64, f64) {
    let l = e as f64 * log1p(lambda - 2.0);
    (exp(l), -expm1(l))
}

/// The dimensionless threshold shape `F_1, ..., F_z` (thresholds over `E0/s`).
pub fn threshold_shape(lambda: f64, z: usize) -> Result<Vec<f64>> {
    check_lambda(lambda)?;
    if z < 1 {
        return Err(Error::range("z", 0.0, "[1, inf)"));
    }
    let denom_bmd = (2 * z + 1) as f64;
    if is_bmd_lambda(lambda) {
        return Ok((1..=z).map(|k| (2 * k - 1) as f64 / denom_bmd).collect());
    }
    let gap = 2.0 - lambda;
    let (az, one_minus_az) = pow_pair(lambda, z);
    let denom = 2.0 * one_minus_az + gap * az;
    Ok((1..=z)
        .map(|k| {
            let (head, _) = pow_pair(lambda, z - k + 1);
            let (_, tail) = pow_pair(lambda, k - 1);
            (2.0 * head * tail + gap * az) / denom
        })
        .collect())
}

/// Optimal thresholds for tradeoff `lambda`, `z` trials, Gallager exponent
/// `e0` and tilt `s`. `lambda` within `1e-9` of 2 uses the BMD closed form
/// `T_k = E0 (2k - 1) / (s (2z + 1))`.
pub fn optimal_thresholds(lambda: f64, z: usize, e0: f64, s: f64) -> Result<ThresholdSet> {
    if !(e0 > 0.0 && e0.is_finite()) {
        return Err(Error::range("e0", e0, "(0, inf)"));
    }
    if !(s > 0.0 && s <= 0.5) {
        return Err(Error::range("s", s, "(0, 1/2]"));
    }
    let scale = e0 / s;
    let thresholds = threshold_shape(lambda, z)?
        .into_iter()
        .map(|f| scale * f)
        .collect();
    Ok(ThresholdSet { lambda, thresholds })
}

/// Left-hand side minus right-hand side of each recurrence equation.
#[derive(Debug, Clone, PartialEq)]
pub struct RecurrenceResiduals {
    /// `(E0 + s T_z) / lambda - (E0 - s T_1)`.
    pub outer: f64,
    /// `(lambda + 1) T_1 - (lambda - 1) T_2`, for `z >= 2`.
    pub first_pair: Option<f64>,
    /// `(lambda T_(k+1) - T_k) / (lambda - 1) - T_(k+2)` for `k = 1..z-2`.
    pub chain: Vec<f64>,
}

impl RecurrenceResiduals {
    pub fn max_abs(&self) -> f64 {
        self.chain
            .iter()
            .chain(self.first_pair.iter())
            .fold(self.outer.abs(), |m, r| m.max(r.abs()))
    }
}

pub fn recurrence_residuals(ts: &ThresholdSet, e0: f64, s: f64) -> RecurrenceResiduals {
    let lambda = ts.lambda;
    let z = ts.z();
    let outer = (e0 + s * ts.last()) / lambda - (e0 - s * ts.first());
    let first_pair = (z >= 2).then(|| (lambda + 1.0) * ts.t(1) - (lambda - 1.0) * ts.t(2));
    let chain = (1..z.saturating_sub(1))
        .map(|k| (lambda * ts.t(k + 1) - ts.t(k)) / (lambda - 1.0) - ts.t(k + 2))
        .collect();
    RecurrenceResiduals {
        outer,
        first_pair,
        chain,
    }
}

/// Residuals of the optimality conditions on the class probabilities, in
/// the log domain:
///
/// * `ln p_l / lambda - ln p_c`
/// * `ln p_c - (1 - 1/lambda) (ln p_under_1 / (lambda - 1) + ln p_bar_1)`
/// * `g_k - g_(k+1)` with `g_k = ln p_under_k / (lambda - 1) + ln p_bar_k`
///
/// For `lambda = 2` the second and third families use the same formulas.
pub fn theorem1_residuals(probs: &SymbolClassProbs, lambda: f64) -> RecurrenceResiduals {
    let inv = 1.0 / (lambda - 1.0);
    let g = |k: usize| inv * probs.ln_p_under[k - 1] + probs.ln_p_bar[k - 1];
    let pairs = probs.ln_p_bar.len();
    let outer = probs.ln_p_l / lambda - probs.ln_p_c;
    let first_pair = (pairs >= 1).then(|| probs.ln_p_c - (1.0 - 1.0 / lambda) * g(1));
    let chain = (1..pairs).map(|k| g(k) - g(k + 1)).collect();
    RecurrenceResiduals {
        outer,
        first_pair,
        chain,
    }
}
