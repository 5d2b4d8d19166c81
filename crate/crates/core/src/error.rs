use thiserror::Error;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("extension degree m = {0} outside 2..=16")]
    FieldDegree(u32),
    #[error("polynomial {poly:#x} is not primitive of degree {m}")]
    NotPrimitive { m: u32, poly: u32 },
    #[error("invalid RS parameters n = {n}, k = {k} over GF(2^{m})")]
    CodeParameters { n: usize, k: usize, m: u32 },
    #[error("expected {expected} symbols, got {actual}")]
    Length { expected: usize, actual: usize },
    #[error("symbol {symbol:#x} is not an element of GF(2^{m})")]
    Symbol { symbol: u32, m: u32 },
    #[error("{name} = {value} is outside {range}")]
    Range {
        name: &'static str,
        value: f64,
        range: &'static str,
    },
}

impl Error {
    pub(crate) fn range(name: &'static str, value: f64, range: &'static str) -> Self {
        Error::Range { name, value, range }
    }
}
