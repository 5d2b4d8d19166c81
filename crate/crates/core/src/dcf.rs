//! Decoder capability functions (DCFs).
//!
//! A DCF gives, for `tau` erasures, the error count `radius(tau)` at which
//! decoding starts to fail: a trial with `eps` errors succeeds iff
//! `eps < radius(tau)`. The strict inequality is used for every decoder.

use libm::{floor, sqrt};

use crate::analysis::exponent_factor;
use crate::rs::OuterCode;
use crate::{Error, Result};

/// BMD radius `(n - k + 1 - tau) / 2`, defined for `0 <= tau <= d - 1`.
pub fn eps_bmd(code: &OuterCode, tau: usize) -> Result<f64> {
    if tau > code.d - 1 {
        return Err(Error::range("tau", tau as f64, "[0, d-1]"));
    }
    Ok((code.d - tau) as f64 / 2.0)
}

/// Guruswami–Sudan radius for infinite multiplicity,
/// `n - tau - sqrt((k - 1)(n - tau))`, defined for `0 <= tau < n`.
pub fn eps_gs(code: &OuterCode, tau: f64) -> Result<f64> {
    let n = code.n as f64;
    if !(0.0..n).contains(&tau) {
        return Err(Error::range("tau", tau, "[0, n)"));
    }
    let rest = n - tau;
    Ok(rest - sqrt((code.k - 1) as f64 * rest))
}

/// Local error/erasure tradeoff of the GS radius: the negative reciprocal
/// slope `(1 - (k-1) / (2 sqrt((k-1)(n-tau))))^-1`.
///
/// Defined while the bracket is positive, `tau < n - (k-1)/4`, and only for
/// `k >= 2` (for `k = 1` the radius has slope -1 and no tradeoff above 1).
pub fn lambda_gs(code: &OuterCode, tau: f64) -> Result<f64> {
    let n = code.n as f64;
    let km1 = (code.k - 1) as f64;
    if code.k < 2 {
        return Err(Error::range("k", code.k as f64, "[2, n]"));
    }
    if !(tau >= 0.0 && tau < n - km1 / 4.0) {
        return Err(Error::range("tau", tau, "[0, n - (k-1)/4)"));
    }
    Ok(1.0 / (1.0 - km1 / (2.0 * sqrt(km1 * (n - tau)))))
}

/// Constant-tradeoff decoder whose radius is the tangent of the GS radius at
/// `kappa`. It is imitable by a GS decoder that discards results outside
/// its own (smaller) region.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TangentDecoder {
    pub kappa: usize,
    pub lambda: f64,
    /// Largest correctable erasure count, floor of the radius root.
    ///
    /// When the root is an integer the radius there is exactly zero and the
    /// strict success rule rejects `(eps = 0, tau = delta)`.
    pub delta: usize,
    pub radius_at_kappa: f64,
}

impl TangentDecoder {
    /// `eps_gs(kappa) - (tau - kappa) / lambda`.
    pub fn radius(&self, tau: f64) -> f64 {
        self.radius_at_kappa - (tau - self.kappa as f64) / self.lambda
    }
}

pub fn make_tangent(code: &OuterCode, kappa: usize) -> Result<TangentDecoder> {
    if kappa > code.d - 1 {
        return Err(Error::range("kappa", kappa as f64, "[0, d-1]"));
    }
    let kf = kappa as f64;
    let lambda = lambda_gs(code, kf)?;
    let radius_at_kappa = eps_gs(code, kf)?;
    let delta = floor(kf + lambda * radius_at_kappa) as usize;
    Ok(TangentDecoder {
        kappa,
        lambda,
        delta,
        radius_at_kappa,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum DecoderKind {
    Bmd,
    GsInfinite,
    Tangent(TangentDecoder),
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DecoderModel {
    pub kind: DecoderKind,
    pub code: OuterCode,
}

impl DecoderModel {
    pub fn bmd(code: OuterCode) -> Self {
        DecoderModel {
            kind: DecoderKind::Bmd,
            code,
        }
    }

    pub fn gs(code: OuterCode) -> Self {
        DecoderModel {
            kind: DecoderKind::GsInfinite,
            code,
        }
    }

    pub fn tangent(code: OuterCode, kappa: usize) -> Result<Self> {
        Ok(DecoderModel {
            kind: DecoderKind::Tangent(make_tangent(&code, kappa)?),
            code,
        })
    }

    /// Constant tradeoff factor, if the decoder has one.
    pub fn lambda(&self) -> Option<f64> {
        match self.kind {
            DecoderKind::Bmd => Some(2.0),
            DecoderKind::GsInfinite => None,
            DecoderKind::Tangent(t) => Some(t.lambda),
        }
    }

    /// Largest correctable erasure count.
    pub fn delta(&self) -> usize {
        match self.kind {
            DecoderKind::Bmd => self.code.d - 1,
            // eps_gs(tau) > 0 iff n - tau > k - 1.
            DecoderKind::GsInfinite => self.code.n - self.code.k,
            DecoderKind::Tangent(t) => t.delta,
        }
    }

    /// Whether a trial with `eps` errors and `tau` erasures is decoded.
    pub fn succeeds(&self, eps: usize, tau: usize) -> bool {
        let code = &self.code;
        if eps + tau > code.n {
            return false;
        }
        match self.kind {
            // 2 eps + tau < d, the exact integer form of eps < eps_bmd(tau).
            DecoderKind::Bmd => 2 * eps + tau < code.d,
            DecoderKind::GsInfinite => {
                eps_gs(code, tau as f64).is_ok_and(|radius| (eps as f64) < radius)
            }
            DecoderKind::Tangent(t) => (eps as f64) < t.radius(tau as f64),
        }
    }
}

/// Tangent point minimising `-delta * exponent_factor(lambda, z)` over the
/// integers `0..=d-1`, smallest `kappa` on ties. The objective contains no
/// channel quantity, so the result holds for every inner channel.
pub fn optimal_kappa(code: &OuterCode, z: usize) -> Result<TangentDecoder> {
    if z < 1 {
        return Err(Error::range("z", z as f64, "[1, inf)"));
    }
    let mut best: Option<(f64, TangentDecoder)> = None;
    for kappa in 0..code.d {
        let tangent = match make_tangent(code, kappa) {
            Ok(t) => t,
            // Past the domain of lambda_gs (only for very low-rate codes).
            Err(_) => continue,
        };
        if !(tangent.lambda > 1.0 && tangent.lambda <= 2.0) {
            continue;
        }
        let objective = -(tangent.delta as f64) * exponent_factor(tangent.lambda, z)?;
        if best.is_none_or(|(b, _)| objective < b) {
            best = Some((objective, tangent));
        }
    }
    best.map(|(_, t)| t)
        .ok_or(Error::range("k", code.k as f64, "codes with a tangent decoder (1 < lambda <= 2)"))
}
