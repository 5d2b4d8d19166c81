//! Closed-form residual codeword error probabilities of MTEE decoding with
//! optimal thresholds, and the BMD-versus-GS trial-count comparison.

use libm::{ceil, expm1, exp, log1p};

use crate::channel::{lemma1_probs, InnerChannelModel};
use crate::dcf::{optimal_kappa, TangentDecoder};
use crate::rs::OuterCode;
use crate::thresholds::optimal_thresholds;
use crate::{is_bmd_lambda, Error, Result};

/// `(b^z - 1) / (2 b^z - lambda)` with `b = 1/(lambda - 1)`, or
/// `z / (2z + 1)` for `lambda = 2`. Lies in `(0, 1/2)` and tends to `1/2`.
pub fn exponent_factor(lambda: f64, z: usize) -> Result<f64> {
    if !(lambda > 1.0 && lambda <= 2.0) {
        return Err(Error::range("lambda", lambda, "(1, 2]"));
    }
    if z < 1 {
        return Err(Error::range("z", 0.0, "[1, inf)"));
    }
    if is_bmd_lambda(lambda) {
        return Ok(z as f64 / (2 * z + 1) as f64);
    }
    // Divide through by b^z: (1 - a^z) / (2 (1 - a^z) + (2 - lambda) a^z), a = lambda - 1.
    let l = z as f64 * log1p(lambda - 2.0);
    let az = exp(l);
    let one_minus_az = -expm1(l);
    Ok(one_minus_az / (2.0 * one_minus_az + (2.0 - lambda) * az))
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PePrediction {
    /// Natural log of the residual codeword error probability.
    pub log_pe: f64,
    pub exponent_factor: f64,
    pub lambda: f64,
    pub delta: usize,
    pub z: usize,
    pub e0: f64,
    pub n_inner: f64,
}

impl PePrediction {
    pub fn log10_pe(&self) -> f64 {
        self.log_pe / core::f64::consts::LN_10
    }
}

/// `ln P_e = -2 E0 delta factor(lambda, z) n_inner`. For BMD pass
/// `lambda = 2` and `delta = d - 1`.
pub fn pe_mtee(e0: f64, n_inner: f64, lambda: f64, delta: usize, z: usize) -> Result<PePrediction> {
    if delta < 1 {
        return Err(Error::range("delta", delta as f64, "[1, inf)"));
    }
    if !(e0 >= 0.0 && e0.is_finite()) {
        return Err(Error::range("e0", e0, "[0, inf)"));
    }
    if !(n_inner > 0.0 && n_inner.is_finite()) {
        return Err(Error::range("n_inner", n_inner, "(0, inf)"));
    }
    let factor = exponent_factor(lambda, z)?;
    Ok(PePrediction {
        log_pe: -2.0 * e0 * delta as f64 * factor * n_inner,
        exponent_factor: factor,
        lambda,
        delta,
        z,
        e0,
        n_inner,
    })
}

/// Limit of `ln P_e` as `z -> inf`: `-E0 delta n_inner`.
pub fn pe_asymptote(e0: f64, n_inner: f64, delta: usize) -> f64 {
    -e0 * delta as f64 * n_inner
}

/// Relative difference between `ln p_l^(delta/lambda)`, evaluated from the
/// optimal `T_z`, and [`pe_mtee`]. Vanishes identically.
pub fn pe_self_consistency(
    e0: f64,
    s: f64,
    n_inner: f64,
    lambda: f64,
    delta: usize,
    z: usize,
) -> Result<f64> {
    let ts = optimal_thresholds(lambda, z, e0, s)?;
    let model = InnerChannelModel {
        p: f64::NAN,
        rate_inner: f64::NAN,
        n_inner,
        e0,
        rho_star: f64::NAN,
        s,
    };
    let from_pl = delta as f64 / lambda * lemma1_probs(&model, &ts).ln_p_l;
    let closed = pe_mtee(e0, n_inner, lambda, delta, z)?.log_pe;
    Ok((from_pl - closed) / closed.abs())
}

/// Outcome of the BMD-versus-GS comparison for one GS trial count.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TrialCrossover {
    pub z_gs: usize,
    pub tangent: TangentDecoder,
    /// `delta * factor` of the optimal tangent decoder (exponent over `2 E0 n_inner`).
    pub gs_exponent: f64,
    /// Smallest BMD trial count that matches or beats the GS exponent;
    /// `None` when even infinitely many BMD trials fall short.
    pub z_bmd: Option<usize>,
}

/// Smallest `z` with `(d - 1) z / (2z + 1) >= delta_gs * factor(lambda_gs, z_gs)`
/// for the optimal tangent decoder at `z_gs`. Both sides are free of `E0`
/// and `n_inner`, so the answer is the same for every inner channel.
pub fn min_bmd_trials(code: &OuterCode, z_gs: usize) -> Result<TrialCrossover> {
    let tangent = optimal_kappa(code, z_gs)?;
    let gs_exponent = tangent.delta as f64 * exponent_factor(tangent.lambda, z_gs)?;
    let dm1 = (code.d - 1) as f64;
    let bmd = |z: usize| dm1 * z as f64 / (2 * z + 1) as f64;
    let z_bmd = if dm1 / 2.0 <= gs_exponent {
        None
    } else {
        // z / (2z + 1) >= r  <=>  z >= r / (1 - 2r).
        let r = gs_exponent / dm1;
        let mut z = (ceil(r / (1.0 - 2.0 * r)) as usize).max(1);
        while z > 1 && bmd(z - 1) >= gs_exponent {
            z -= 1;
        }
        while bmd(z) < gs_exponent {
            z += 1;
        }
        Some(z)
    };
    Ok(TrialCrossover {
        z_gs,
        tangent,
        gs_exponent,
        z_bmd,
    })
}
