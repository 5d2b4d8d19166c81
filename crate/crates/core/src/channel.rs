//! Inner channel model: Gallager's random-coding exponent for the BSC and
//! the exponential approximations of the per-symbol class probabilities of
//! the super channel.
//!
//! All exponents are in nats per inner code bit.

use alloc::vec::Vec;

use libm::{exp, log, pow};

use crate::thresholds::ThresholdSet;
use crate::{Error, Result};

/// Lower clamp for the tilt parameter `s`.
pub const S_MIN: f64 = 1e-6;

const LN2: f64 = core::f64::consts::LN_2;

/// Gallager's function `E0(rho, p) = rho ln 2 - (1 + rho) ln(p^(1/(1+rho)) + (1-p)^(1/(1+rho)))`.
pub fn gallager_function(rho: f64, p: f64) -> f64 {
    let e = 1.0 / (1.0 + rho);
    rho * LN2 - (1.0 + rho) * log(pow(p, e) + pow(1.0 - p, e))
}

/// BSC capacity in nats.
pub fn bsc_capacity(p: f64) -> f64 {
    LN2 + p * log(p) + (1.0 - p) * log(1.0 - p)
}

/// Random-coding exponent `max_{0 <= rho <= 1} E0(rho, p) - rho R ln 2` and
/// its maximiser.
///
/// The objective is concave in `rho`, so a golden-section search on
/// `[0, 1]` converges to the maximiser; the end points are compared
/// explicitly. At or above capacity the exponent is exactly zero with
/// `rho* = 0`.
pub fn gallager_e0(p: f64, rate_bits: f64) -> Result<(f64, f64)> {
    if !(p > 0.0 && p < 0.5) {
        return Err(Error::range("p", p, "(0, 1/2)"));
    }
    if !(rate_bits > 0.0 && rate_bits < 1.0) {
        return Err(Error::range("rate", rate_bits, "(0, 1)"));
    }
    let rate = rate_bits * LN2;
    if rate >= bsc_capacity(p) {
        return Ok((0.0, 0.0));
    }
    let objective = |rho: f64| gallager_function(rho, p) - rho * rate;
    let rho = golden_section_max(objective, 0.0, 1.0, 1e-12);
    let (rho, value) = [(0.0, 0.0), (1.0, objective(1.0)), (rho, objective(rho))]
        .into_iter()
        .fold((0.0, f64::NEG_INFINITY), |best, (r, v)| {
            if v > best.1 {
                (r, v)
            } else {
                best
            }
        });
    Ok((value.max(0.0), rho))
}

/// Maximiser of a unimodal function on `[lo, hi]` to interval width `tol`.
pub(crate) fn golden_section_max(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    let inv_phi = (libm::sqrt(5.0) - 1.0) / 2.0;
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while hi - lo > tol {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = f(x1);
        }
    }
    0.5 * (lo + hi)
}

/// Default tilt `s = rho* / (1 + rho*)`, clamped to `[S_MIN, 1/2]`.
pub fn default_s(rho_star: f64) -> f64 {
    (rho_star / (1.0 + rho_star)).clamp(S_MIN, 0.5)
}

/// BSC plus inner ML decoder, summarised by its exponent and tilt.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct InnerChannelModel {
    pub p: f64,
    pub rate_inner: f64,
    pub n_inner: f64,
    pub e0: f64,
    pub rho_star: f64,
    pub s: f64,
}

impl InnerChannelModel {
    /// Derives `e0` and `rho*` from `(p, rate)`. `s` defaults to
    /// [`default_s`] unless overridden.
    pub fn new(p: f64, rate_inner: f64, n_inner: f64, s: Option<f64>) -> Result<Self> {
        if !(n_inner >= 1.0 && n_inner.is_finite()) {
            return Err(Error::range("n_inner", n_inner, "[1, inf)"));
        }
        let (e0, rho_star) = gallager_e0(p, rate_inner)?;
        let s = match s {
            Some(s) if !(s > 0.0 && s <= 0.5) => return Err(Error::range("s", s, "(0, 1/2]")),
            Some(s) => s,
            None => default_s(rho_star),
        };
        Ok(InnerChannelModel {
            p,
            rate_inner,
            n_inner,
            e0,
            rho_star,
            s,
        })
    }

    /// Inner block length that carries one `m`-bit outer symbol, `m / rate`.
    pub fn default_n_inner(m: u32, rate_inner: f64) -> f64 {
        m as f64 / rate_inner
    }

    /// `E0 * n_inner`, the exponent of the inner symbol error probability.
    pub fn block_exponent(&self) -> f64 {
        self.e0 * self.n_inner
    }

    /// Largest reliability of a correct symbol, `E0 / s`.
    pub fn reliability_cap(&self) -> f64 {
        self.e0 / self.s
    }
}

/// Approximate per-symbol class probabilities, as natural logarithms.
///
/// `p_c`: erased in every trial. `p_l`: erroneous and never erased.
/// `p_bar[k-1]` / `p_under[k-1]`: correct / erroneous, kept by `T_k` and
/// erased by `T_(k+1)`, for `k = 1..z-1`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SymbolClassProbs {
    pub ln_p_c: f64,
    pub ln_p_l: f64,
    pub ln_p_bar: Vec<f64>,
    pub ln_p_under: Vec<f64>,
}

impl SymbolClassProbs {
    pub fn p_c(&self) -> f64 {
        exp(self.ln_p_c)
    }

    pub fn p_l(&self) -> f64 {
        exp(self.ln_p_l)
    }

    pub fn p_bar(&self) -> Vec<f64> {
        self.ln_p_bar.iter().map(|&l| exp(l)).collect()
    }

    pub fn p_under(&self) -> Vec<f64> {
        self.ln_p_under.iter().map(|&l| exp(l)).collect()
    }

    /// Remaining mass: correct and never erased. No exponential
    /// approximation exists for it, so it is the complement of the others,
    /// clamped to `[0, 1]` (the approximations are not normalised).
    pub fn p_r(&self) -> f64 {
        let rest: f64 = self.p_c()
            + self.p_l()
            + self.p_bar().iter().sum::<f64>()
            + self.p_under().iter().sum::<f64>();
        (1.0 - rest).clamp(0.0, 1.0)
    }
}

pub fn lemma1_probs(model: &InnerChannelModel, ts: &ThresholdSet) -> SymbolClassProbs {
    let InnerChannelModel { e0, s, n_inner, .. } = *model;
    let z = ts.z();
    SymbolClassProbs {
        ln_p_c: -(e0 - s * ts.first()) * n_inner,
        ln_p_l: -(e0 + s * ts.last()) * n_inner,
        ln_p_bar: (1..z).map(|k| -(e0 - s * ts.t(k + 1)) * n_inner).collect(),
        ln_p_under: (1..z).map(|k| -(e0 + s * ts.t(k)) * n_inner).collect(),
    }
}
