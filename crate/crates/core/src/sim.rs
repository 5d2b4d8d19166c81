//! Monte Carlo simulation of MTEE decoding over the super channel.
//!
//! Each outer symbol is drawn from a one-uniform generative model whose
//! tails reproduce the exponential class probabilities: with `U` uniform on
//! `(0, 1]`, `x = E0 n_inner`,
//!
//! * `U <= e^-x`: erroneous, reliability `v = (-ln U - x) / (s n_inner)`,
//!   so `Pr(error, v >= t) = exp(-(E0 + s t) n_inner)` exactly;
//! * otherwise correct, `v = (x + ln U) / (s n_inner)` in `(0, E0/s]`, so
//!   `Pr(correct, v <= t) = exp(-(E0 - s t) n_inner) - e^-x`.
//!
//! Decoding trials are judged by the decoder capability function rather
//! than by running a decoder; [`validate_oracle`] cross-checks that
//! shortcut for BMD against the RS codec.
//!
//! Random streams are ChaCha8 keyed by the seed. Word `w` always reads the
//! stream from position `2 n w` (one `u64` per symbol), so the estimate is
//! identical for any chunking and any execution order.

use alloc::vec;
use alloc::vec::Vec;

use libm::{exp, log, sqrt};
use rand::seq::index::sample;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::channel::InnerChannelModel;
use crate::dcf::DecoderModel;
use crate::gf::Symbol;
use crate::rs::{DecodeOutcome, OuterCode, RsCodec, SymbolWord};
use crate::thresholds::ThresholdSet;
use crate::{Error, Result};

/// Two-sided 95% standard normal quantile.
pub const Z95: f64 = 1.959_963_984_540_054;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymbolDraw {
    pub is_error: bool,
    /// Reliability in nats per inner bit.
    pub reliability: f64,
}

/// Uniform on `(0, 1]` with 53-bit resolution.
#[inline]
pub fn uniform_open_closed<R: RngCore + ?Sized>(rng: &mut R) -> f64 {
    ((rng.next_u64() >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Precomputed constants of the generative symbol model.
#[derive(Debug, Clone, Copy)]
pub struct SymbolSampler {
    exponent: f64,
    error_probability: f64,
    scale: f64,
}

impl SymbolSampler {
    pub fn new(model: &InnerChannelModel) -> Result<Self> {
        if !(model.e0 > 0.0) {
            return Err(Error::range("e0", model.e0, "(0, inf)"));
        }
        let exponent = model.block_exponent();
        Ok(SymbolSampler {
            exponent,
            error_probability: exp(-exponent),
            scale: 1.0 / (model.s * model.n_inner),
        })
    }

    /// `Pr(is_error) = exp(-E0 n_inner)`.
    pub fn error_probability(&self) -> f64 {
        self.error_probability
    }

    #[inline]
    pub fn sample<R: RngCore + ?Sized>(&self, rng: &mut R) -> SymbolDraw {
        let u = uniform_open_closed(rng);
        let ln_u = log(u);
        if u <= self.error_probability {
            SymbolDraw {
                is_error: true,
                reliability: ((-ln_u - self.exponent) * self.scale).max(0.0),
            }
        } else {
            SymbolDraw {
                is_error: false,
                reliability: (self.exponent + ln_u) * self.scale,
            }
        }
    }
}

pub fn sample_symbol<R: RngCore + ?Sized>(model: &InnerChannelModel, rng: &mut R) -> Result<SymbolDraw> {
    Ok(SymbolSampler::new(model)?.sample(rng))
}

/// Per-trial error and erasure counts of one received word.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrialCounts {
    /// `tau_k = #{j : v_j < T_k}`.
    pub erasures: Vec<usize>,
    /// `eps_k = #{j : v_j >= T_k and symbol j is wrong}`.
    pub errors: Vec<usize>,
}

impl TrialCounts {
    pub fn new(draws: &[SymbolDraw], ts: &ThresholdSet) -> Self {
        let z = ts.z();
        let mut counts = TrialCounts {
            erasures: vec![0; z],
            errors: vec![0; z],
        };
        counts.fill(draws, ts);
        counts
    }

    fn fill(&mut self, draws: &[SymbolDraw], ts: &ThresholdSet) {
        let z = ts.z();
        // kept_by[i]: symbols kept by exactly the first i thresholds.
        let mut kept = vec![0usize; z + 1];
        let mut kept_err = vec![0usize; z + 1];
        for d in draws {
            let i = ts.thresholds.partition_point(|&t| t <= d.reliability);
            kept[i] += 1;
            if d.is_error {
                kept_err[i] += 1;
            }
        }
        // Trial k keeps every symbol with i >= k.
        let (mut keep, mut keep_err) = (0, 0);
        for k in (1..=z).rev() {
            keep += kept[k];
            keep_err += kept_err[k];
            self.erasures[k - 1] = draws.len() - keep;
            self.errors[k - 1] = keep_err;
        }
        assert!(
            self.erasures.windows(2).all(|w| w[0] <= w[1])
                && self.errors.windows(2).all(|w| w[0] >= w[1]),
            "threshold erasing must be nested"
        );
    }

    /// Index (0-based) of the first successful trial.
    pub fn first_success(&self, decoder: &DecoderModel) -> Option<usize> {
        (0..self.erasures.len()).find(|&k| decoder.succeeds(self.errors[k], self.erasures[k]))
    }
}

/// Decodes one word in all `z` trials; success iff any trial succeeds.
pub fn mtee_decode_word(draws: &[SymbolDraw], ts: &ThresholdSet, decoder: &DecoderModel) -> Result<bool> {
    if draws.len() != decoder.code.n {
        return Err(Error::Length {
            expected: decoder.code.n,
            actual: draws.len(),
        });
    }
    Ok(TrialCounts::new(draws, ts).first_success(decoder).is_some())
}

/// Wilson score interval at confidence `z_score`.
pub fn wilson_interval(failures: u64, trials: u64, z_score: f64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = failures as f64 / n;
    let z2 = z_score * z_score;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z_score / denom * sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n));
    ((center - half).clamp(0.0, p), (center + half).clamp(p, 1.0))
}

/// Counts accumulated over a range of simulated words.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimTally {
    pub words: u64,
    pub failures: u64,
    /// Words decoded by trial `k`, for each `k`.
    pub trial_successes: Vec<u64>,
}

impl SimTally {
    pub fn empty(z: usize) -> Self {
        SimTally {
            words: 0,
            failures: 0,
            trial_successes: vec![0; z],
        }
    }

    pub fn merge(mut self, other: &SimTally) -> Self {
        self.words += other.words;
        self.failures += other.failures;
        for (a, b) in self.trial_successes.iter_mut().zip(&other.trial_successes) {
            *a += b;
        }
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SimReport {
    pub num_words: u64,
    pub num_failures: u64,
    pub pe_hat: f64,
    pub ci95: (f64, f64),
    pub trial_successes: Vec<u64>,
    pub seed: u64,
    pub model: InnerChannelModel,
    pub decoder: DecoderModel,
    pub thresholds: ThresholdSet,
}

/// Everything needed to simulate any range of words reproducibly.
#[derive(Debug, Clone)]
pub struct SimPlan {
    pub model: InnerChannelModel,
    pub decoder: DecoderModel,
    pub thresholds: ThresholdSet,
    pub num_words: u64,
    pub seed: u64,
    sampler: SymbolSampler,
}

impl SimPlan {
    pub fn new(
        model: InnerChannelModel,
        decoder: DecoderModel,
        thresholds: ThresholdSet,
        num_words: u64,
        seed: u64,
    ) -> Result<Self> {
        if num_words < 1 {
            return Err(Error::range("num_words", 0.0, "[1, inf)"));
        }
        Ok(SimPlan {
            sampler: SymbolSampler::new(&model)?,
            model,
            decoder,
            thresholds,
            num_words,
            seed,
        })
    }

    /// Word range `[start, end)` of chunk `index` out of `chunks`.
    pub fn chunk_range(&self, index: usize, chunks: usize) -> (u64, u64) {
        let chunks = chunks as u64;
        let base = self.num_words / chunks;
        let extra = self.num_words % chunks;
        let i = index as u64;
        let start = i * base + i.min(extra);
        (start, start + base + u64::from(i < extra))
    }

    pub fn run_range(&self, start: u64, end: u64) -> SimTally {
        let n = self.decoder.code.n;
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_word_pos(2 * n as u128 * start as u128);
        let mut tally = SimTally::empty(self.thresholds.z());
        let mut draws = Vec::with_capacity(n);
        let mut counts = TrialCounts {
            erasures: vec![0; self.thresholds.z()],
            errors: vec![0; self.thresholds.z()],
        };
        for _ in start..end {
            draws.clear();
            draws.extend((0..n).map(|_| self.sampler.sample(&mut rng)));
            counts.fill(&draws, &self.thresholds);
            let mut any = false;
            for k in 0..self.thresholds.z() {
                if self.decoder.succeeds(counts.errors[k], counts.erasures[k]) {
                    tally.trial_successes[k] += 1;
                    any = true;
                }
            }
            tally.words += 1;
            tally.failures += u64::from(!any);
        }
        tally
    }

    pub fn run_chunk(&self, index: usize, chunks: usize) -> SimTally {
        let (start, end) = self.chunk_range(index, chunks);
        self.run_range(start, end)
    }

    pub fn report(&self, tally: &SimTally) -> SimReport {
        debug_assert_eq!(tally.words, self.num_words);
        let pe_hat = tally.failures as f64 / tally.words as f64;
        SimReport {
            num_words: tally.words,
            num_failures: tally.failures,
            pe_hat,
            ci95: wilson_interval(tally.failures, tally.words, Z95),
            trial_successes: tally.trial_successes.clone(),
            seed: self.seed,
            model: self.model,
            decoder: self.decoder,
            thresholds: self.thresholds.clone(),
        }
    }
}

/// Sequential estimate of the residual codeword error rate. Chunks are
/// processed in order; the result does not depend on `chunks`.
pub fn estimate_pe(
    model: &InnerChannelModel,
    decoder: &DecoderModel,
    ts: &ThresholdSet,
    num_words: u64,
    seed: u64,
    chunks: usize,
) -> Result<SimReport> {
    if chunks < 1 {
        return Err(Error::range("chunks", 0.0, "[1, inf)"));
    }
    let plan = SimPlan::new(*model, *decoder, ts.clone(), num_words, seed)?;
    let tally = (0..chunks)
        .map(|i| plan.run_chunk(i, chunks))
        .fold(SimTally::empty(ts.z()), |acc, t| acc.merge(&t));
    Ok(plan.report(&tally))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Discrepancy {
    /// Inside `2 eps + tau <= d - 1` the decoder failed.
    GuaranteedFailure,
    /// Inside `2 eps + tau <= d - 1` the decoder returned another codeword.
    WrongCodeword,
    /// The returned word is not a codeword or is too far from the input.
    BoundedDistanceViolation,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct OracleDisagreement {
    pub trial: u64,
    pub errors: usize,
    pub erasures: usize,
    pub kind: Discrepancy,
}

#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct OracleReport {
    pub trials: u64,
    /// Trials inside the guaranteed region.
    pub guaranteed: u64,
    /// Trials outside it where the decoder still returned a codeword.
    pub decoded_outside: u64,
    pub disagreements: Vec<OracleDisagreement>,
}

impl OracleReport {
    pub fn is_clean(&self) -> bool {
        self.disagreements.is_empty()
    }
}

/// Cross-checks the BMD capability oracle against the RS decoder.
pub fn validate_oracle(code: &OuterCode, trials: u64, seed: u64) -> Result<OracleReport> {
    let codec = RsCodec::new(*code)?;
    validate_oracle_with(&codec, trials, seed, |c, w| c.decode(w))
}

/// As [`validate_oracle`], with the decoder under test supplied by the caller.
pub fn validate_oracle_with<F>(codec: &RsCodec, trials: u64, seed: u64, decode: F) -> Result<OracleReport>
where
    F: Fn(&RsCodec, &[Option<Symbol>]) -> Result<DecodeOutcome>,
{
    if trials < 1 {
        return Err(Error::range("trials", 0.0, "[1, inf)"));
    }
    let code = *codec.code();
    let n = code.n;
    let q = code.field.size() as u32;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = OracleReport {
        trials,
        guaranteed: 0,
        decoded_outside: 0,
        disagreements: Vec::new(),
    };
    let pairs = (n + 1) * (n + 2) / 2;
    for trial in 0..trials {
        let (eps, tau) = pair_from_index(rng.gen_range(0..pairs), n);
        let info: Vec<Symbol> = (0..code.k).map(|_| rng.gen_range(0..q) as Symbol).collect();
        let codeword = codec.encode(&info)?;
        let mut word: SymbolWord = codeword.iter().copied().map(Some).collect();
        for (i, j) in sample(&mut rng, n, eps + tau).iter().enumerate() {
            word[j] = if i < tau {
                None
            } else {
                Some(codeword[j] ^ rng.gen_range(1..q) as Symbol)
            };
        }
        let guaranteed = 2 * eps + tau < code.d;
        report.guaranteed += u64::from(guaranteed);
        let outcome = decode(codec, &word)?;
        let kind = match (&outcome, guaranteed) {
            (DecodeOutcome::Failure, true) => Some(Discrepancy::GuaranteedFailure),
            (DecodeOutcome::Failure, false) => None,
            (DecodeOutcome::Decoded { codeword: out, .. }, _) => {
                let dist = word
                    .iter()
                    .zip(out)
                    .filter(|(r, c)| matches!(r, Some(x) if x != *c))
                    .count();
                if !guaranteed {
                    report.decoded_outside += 1;
                }
                if !codec.is_codeword(out) || 2 * dist + tau >= code.d {
                    Some(Discrepancy::BoundedDistanceViolation)
                } else if guaranteed && out != &codeword {
                    Some(Discrepancy::WrongCodeword)
                } else {
                    None
                }
            }
        };
        if let Some(kind) = kind {
            report.disagreements.push(OracleDisagreement {
                trial,
                errors: eps,
                erasures: tau,
                kind,
            });
        }
    }
    Ok(report)
}

/// Maps `0..(n+1)(n+2)/2` bijectively onto `{(eps, tau) : eps + tau <= n}`.
fn pair_from_index(mut index: usize, n: usize) -> (usize, usize) {
    for eps in 0..=n {
        let row = n + 1 - eps;
        if index < row {
            return (eps, index);
        }
        index -= row;
    }
    unreachable!("index out of range")
}
