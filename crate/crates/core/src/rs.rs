//! Reed–Solomon codes over GF(2^m): systematic encoding and bounded
//! minimum distance errors-and-erasures decoding.
//!
//! Positions are indexed `0..n`; position `j` carries the coefficient of
//! `x^j` and has locator `alpha^j`. The generator polynomial has roots
//! `alpha^1, ..., alpha^(n-k)`. Shortened codes (`n < 2^m - 1`) are the
//! full-length code restricted to positions `0..n`.
//!
//! Decoding runs Berlekamp–Massey initialised with the erasure locator,
//! a Chien search over the `n` valid positions and Forney's formula. Any
//! solution that is inconsistent (root count, weight budget or non-zero
//! syndrome after correction) is reported as [`DecodeOutcome::Failure`].

use alloc::vec;
use alloc::vec::Vec;

use crate::gf::{Field, FieldSpec, Symbol};
use crate::{Error, Result};

/// Parameters of an MDS outer code; `d = n - k + 1` always.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct OuterCode {
    pub field: FieldSpec,
    pub n: usize,
    pub k: usize,
    pub d: usize,
}

impl OuterCode {
    pub fn new(field: FieldSpec, n: usize, k: usize) -> Result<Self> {
        if !(2..=16).contains(&field.m) {
            return Err(Error::FieldDegree(field.m));
        }
        if k < 1 || k > n || n > field.order() {
            return Err(Error::CodeParameters { n, k, m: field.m });
        }
        Ok(OuterCode {
            field,
            n,
            k,
            d: n - k + 1,
        })
    }

    /// The RS(255, 144, 112) code over GF(256).
    pub fn rs_255_144() -> Self {
        OuterCode::new(FieldSpec::gf256(), 255, 144).expect("valid parameters")
    }

    pub fn redundancy(&self) -> usize {
        self.n - self.k
    }
}

/// A received word; `None` is the erasure marker.
pub type SymbolWord = Vec<Option<Symbol>>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DecodeOutcome {
    Decoded {
        codeword: Vec<Symbol>,
        /// Number of unerased positions that were changed.
        errors: usize,
    },
    Failure,
}

impl DecodeOutcome {
    pub fn codeword(&self) -> Option<&[Symbol]> {
        match self {
            DecodeOutcome::Decoded { codeword, .. } => Some(codeword),
            DecodeOutcome::Failure => None,
        }
    }
}

/// Encoder and decoder for one code. Immutable, shareable across threads.
#[derive(Debug, Clone)]
pub struct RsCodec {
    code: OuterCode,
    field: Field,
    generator: Vec<Symbol>,
}

impl RsCodec {
    pub fn new(code: OuterCode) -> Result<Self> {
        let field = Field::new(code.field)?;
        let mut generator = vec![1 as Symbol];
        for i in 1..=code.redundancy() {
            let root = field.alpha_pow(i as i64);
            let mut next = vec![0 as Symbol; generator.len() + 1];
            for (j, &g) in generator.iter().enumerate() {
                next[j + 1] ^= g;
                next[j] ^= field.mul(g, root);
            }
            generator = next;
        }
        Ok(RsCodec {
            code,
            field,
            generator,
        })
    }

    pub fn code(&self) -> &OuterCode {
        &self.code
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    /// Systematic encoding: parity occupies positions `0..n-k` and the
    /// information symbols positions `n-k..n`, in order.
    pub fn encode(&self, info: &[Symbol]) -> Result<Vec<Symbol>> {
        let OuterCode { n, k, .. } = self.code;
        if info.len() != k {
            return Err(Error::Length {
                expected: k,
                actual: info.len(),
            });
        }
        self.check_symbols(info.iter().copied())?;
        let r = n - k;
        let mut rem = vec![0 as Symbol; r];
        if r > 0 {
            for &a in info.iter().rev() {
                let feedback = a ^ rem[r - 1];
                for j in (1..r).rev() {
                    rem[j] = rem[j - 1] ^ self.field.mul(feedback, self.generator[j]);
                }
                rem[0] = self.field.mul(feedback, self.generator[0]);
            }
        }
        rem.extend_from_slice(info);
        Ok(rem)
    }

    /// Syndromes `S_i = r(alpha^(i+1))`, `i = 0..n-k`, with erasures read as zero.
    pub fn syndromes(&self, word: &[Option<Symbol>]) -> Vec<Symbol> {
        let f = &self.field;
        (1..=self.code.redundancy())
            .map(|i| {
                let x = f.alpha_pow(i as i64);
                word.iter()
                    .rev()
                    .fold(0, |acc, s| f.mul(acc, x) ^ s.unwrap_or(0))
            })
            .collect()
    }

    pub fn is_codeword(&self, word: &[Symbol]) -> bool {
        let w: SymbolWord = word.iter().copied().map(Some).collect();
        word.len() == self.code.n && self.syndromes(&w).iter().all(|&s| s == 0)
    }

    /// Bounded minimum distance errors-and-erasures decoding.
    ///
    /// With `tau` erasures and `eps` errors, `2 eps + tau < d` guarantees the
    /// transmitted codeword. Otherwise the result is either a failure or a
    /// codeword within `floor((d - 1 - tau) / 2)` of the unerased positions.
    pub fn decode(&self, word: &[Option<Symbol>]) -> Result<DecodeOutcome> {
        let OuterCode { n, d, .. } = self.code;
        if word.len() != n {
            return Err(Error::Length {
                expected: n,
                actual: word.len(),
            });
        }
        self.check_symbols(word.iter().flatten().copied())?;
        let f = &self.field;
        let nsyn = d - 1;
        let erasures: Vec<usize> = (0..n).filter(|&j| word[j].is_none()).collect();
        let tau = erasures.len();
        if tau > nsyn {
            return Ok(DecodeOutcome::Failure);
        }

        let s = self.syndromes(word);
        let mut received: Vec<Symbol> = word.iter().map(|s| s.unwrap_or(0)).collect();
        if tau == 0 && s.iter().all(|&x| x == 0) {
            return Ok(DecodeOutcome::Decoded {
                codeword: received,
                errors: 0,
            });
        }

        // Erasure locator Gamma(x) = prod (1 + alpha^j x).
        let mut gamma = vec![1 as Symbol];
        for &j in &erasures {
            let xj = f.alpha_pow(j as i64);
            gamma.push(0);
            for i in (1..gamma.len()).rev() {
                gamma[i] ^= f.mul(gamma[i - 1], xj);
            }
        }

        // Berlekamp–Massey continued from the erasure locator.
        let mut lambda = gamma.clone();
        let mut b = gamma;
        let mut len = tau;
        for r in tau..nsyn {
            let delta = lambda
                .iter()
                .enumerate()
                .take(r + 1)
                .fold(0, |acc, (j, &l)| acc ^ f.mul(l, s[r - j]));
            if delta == 0 {
                b.insert(0, 0);
                continue;
            }
            let mut t = lambda.clone();
            if t.len() < b.len() + 1 {
                t.resize(b.len() + 1, 0);
            }
            for (j, &bj) in b.iter().enumerate() {
                t[j + 1] ^= f.mul(delta, bj);
            }
            if 2 * len <= r + tau {
                let dinv = f.inv(delta).expect("nonzero discrepancy");
                b = lambda.iter().map(|&l| f.mul(l, dinv)).collect();
                len = r + 1 + tau - len;
            } else {
                b.insert(0, 0);
            }
            lambda = t;
        }
        while lambda.len() > 1 && *lambda.last().unwrap() == 0 {
            lambda.pop();
        }
        let degree = lambda.len() - 1;
        if degree != len || 2 * len > nsyn + tau {
            return Ok(DecodeOutcome::Failure);
        }

        // Chien search restricted to valid positions.
        let roots: Vec<usize> = (0..n)
            .filter(|&j| f.eval(&lambda, f.alpha_pow(-(j as i64))) == 0)
            .collect();
        if roots.len() != degree {
            return Ok(DecodeOutcome::Failure);
        }

        // Errata evaluator Omega = S * Lambda mod x^(d-1).
        let mut omega = vec![0 as Symbol; nsyn];
        for (i, &si) in s.iter().enumerate() {
            if si == 0 {
                continue;
            }
            for (j, &lj) in lambda.iter().enumerate().take(nsyn - i) {
                omega[i + j] ^= f.mul(si, lj);
            }
        }
        // Formal derivative: only odd-degree terms survive in characteristic 2.
        let dlambda: Vec<Symbol> = (1..lambda.len())
            .map(|i| if i % 2 == 1 { lambda[i] } else { 0 })
            .collect();

        let mut errors = 0;
        for &j in &roots {
            let xinv = f.alpha_pow(-(j as i64));
            let denom = f.eval(&dlambda, xinv);
            let Some(value) = f.div(f.eval(&omega, xinv), denom) else {
                return Ok(DecodeOutcome::Failure);
            };
            if word[j].is_some() && value != 0 {
                errors += 1;
            }
            received[j] ^= value;
        }
        if 2 * errors + tau > nsyn {
            return Ok(DecodeOutcome::Failure);
        }
        let check: SymbolWord = received.iter().copied().map(Some).collect();
        if self.syndromes(&check).iter().any(|&x| x != 0) {
            return Ok(DecodeOutcome::Failure);
        }
        Ok(DecodeOutcome::Decoded {
            codeword: received,
            errors,
        })
    }

    fn check_symbols(&self, symbols: impl Iterator<Item = Symbol>) -> Result<()> {
        for s in symbols {
            if !self.field.contains(s) {
                return Err(Error::Symbol {
                    symbol: s as u32,
                    m: self.code.field.m,
                });
            }
        }
        Ok(())
    }
}
