//! Threshold-based multi-trial error/erasure (MTEE) decoding of concatenated
//! codes with an outer Reed–Solomon code.
//!
//! The crate covers the whole analytic chain:
//!
//! * [`gf`] and [`rs`]: GF(2^m) arithmetic and a systematic RS encoder with a
//!   bounded-distance errors-and-erasures decoder.
//! * [`dcf`]: decoder capability functions for BMD, Guruswami–Sudan
//!   (infinite multiplicity) and constant-tradeoff tangent decoders, plus the
//!   search for the optimal tangent point.
//! * [`channel`]: Gallager's random-coding exponent on the BSC and the
//!   exponential approximations of the per-symbol class probabilities.
//! * [`thresholds`]: optimal erasure-threshold sets and checkers for the
//!   optimality conditions they satisfy.
//! * [`analysis`]: closed-form residual codeword error probabilities and the
//!   BMD-versus-GS trial-count comparison.
//! * [`sim`]: a Monte Carlo super-channel simulator with deterministic,
//!   chunk-independent random streams, and an RS cross-check of the BMD
//!   capability oracle.
//!
//! Probabilities that can underflow `f64` are carried as natural logarithms.
//!
//! The crate is `no_std` and needs only `alloc`.

#![no_std]

extern crate alloc;

pub mod analysis;
pub mod channel;
pub mod dcf;
mod error;
pub mod gf;
pub mod rs;
pub mod sim;
pub mod thresholds;

pub use error::{Error, Result};

/// Tolerance below which a tradeoff factor is treated as exactly 2 (BMD).
pub const LAMBDA_BMD_EPS: f64 = 1e-9;

pub(crate) fn is_bmd_lambda(lambda: f64) -> bool {
    libm::fabs(lambda - 2.0) < LAMBDA_BMD_EPS
}
