//! Arithmetic over GF(2^m) with log/antilog tables.

use alloc::vec;
use alloc::vec::Vec;

use crate::{Error, Result};

/// A field element, stored in its polynomial-basis bit representation.
pub type Symbol = u16;

/// Extension degree and primitive polynomial of a binary extension field.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FieldSpec {
    pub m: u32,
    /// Bit mask of the degree-`m` polynomial, including the `x^m` term.
    pub primitive_polynomial: u32,
}

impl FieldSpec {
    pub const fn new(m: u32, primitive_polynomial: u32) -> Self {
        FieldSpec {
            m,
            primitive_polynomial,
        }
    }

    /// GF(256) with `x^8 + x^4 + x^3 + x^2 + 1`.
    pub const fn gf256() -> Self {
        FieldSpec::new(8, 0x11D)
    }

    /// Conventional primitive polynomial for each supported degree.
    pub fn with_default_polynomial(m: u32) -> Result<Self> {
        let poly = match m {
            2 => 0x7,
            3 => 0xB,
            4 => 0x13,
            5 => 0x25,
            6 => 0x43,
            7 => 0x89,
            8 => 0x11D,
            9 => 0x211,
            10 => 0x409,
            11 => 0x805,
            12 => 0x1053,
            13 => 0x201B,
            14 => 0x4443,
            15 => 0x8003,
            16 => 0x1100B,
            _ => return Err(Error::FieldDegree(m)),
        };
        Ok(FieldSpec::new(m, poly))
    }

    /// Number of field elements, `2^m`.
    pub fn size(&self) -> usize {
        1usize << self.m
    }

    /// Order of the multiplicative group, `2^m - 1`.
    pub fn order(&self) -> usize {
        self.size() - 1
    }
}

/// Table-driven arithmetic context. Immutable after construction.
#[derive(Debug, Clone)]
pub struct Field {
    spec: FieldSpec,
    // exp is doubled so that exp[log a + log b] needs no reduction.
    exp: Vec<Symbol>,
    log: Vec<u32>,
}

impl Field {
    /// Builds the tables, rejecting polynomials whose root does not generate
    /// the full multiplicative group.
    pub fn new(spec: FieldSpec) -> Result<Self> {
        if !(2..=16).contains(&spec.m) {
            return Err(Error::FieldDegree(spec.m));
        }
        let not_primitive = Error::NotPrimitive {
            m: spec.m,
            poly: spec.primitive_polynomial,
        };
        if spec.primitive_polynomial >> spec.m != 1 {
            return Err(not_primitive);
        }
        let q = spec.size();
        let order = spec.order();
        let mut exp = vec![0 as Symbol; 2 * order];
        let mut log = vec![0u32; q];
        let mut seen = vec![false; q];
        let mut x: u32 = 1;
        for i in 0..order {
            if seen[x as usize] {
                // The powers of x cycled early: the group order is < 2^m - 1.
                return Err(not_primitive);
            }
            seen[x as usize] = true;
            exp[i] = x as Symbol;
            log[x as usize] = i as u32;
            x <<= 1;
            if x & (1 << spec.m) != 0 {
                x ^= spec.primitive_polynomial;
            }
        }
        if x != 1 {
            return Err(not_primitive);
        }
        for i in order..2 * order {
            exp[i] = exp[i - order];
        }
        Ok(Field { spec, exp, log })
    }

    pub fn spec(&self) -> FieldSpec {
        self.spec
    }

    pub fn order(&self) -> usize {
        self.spec.order()
    }

    pub fn contains(&self, x: Symbol) -> bool {
        (x as usize) < self.spec.size()
    }

    #[inline]
    pub fn add(&self, a: Symbol, b: Symbol) -> Symbol {
        a ^ b
    }

    #[inline]
    pub fn mul(&self, a: Symbol, b: Symbol) -> Symbol {
        if a == 0 || b == 0 {
            0
        } else {
            self.exp[(self.log[a as usize] + self.log[b as usize]) as usize]
        }
    }

    /// Multiplicative inverse; `None` for zero.
    #[inline]
    pub fn inv(&self, a: Symbol) -> Option<Symbol> {
        if a == 0 {
            None
        } else {
            Some(self.exp[(self.order() - self.log[a as usize] as usize) % self.order()])
        }
    }

    /// `a / b`; `None` when dividing by zero.
    #[inline]
    pub fn div(&self, a: Symbol, b: Symbol) -> Option<Symbol> {
        if b == 0 {
            None
        } else if a == 0 {
            Some(0)
        } else {
            let order = self.order();
            let e = (self.log[a as usize] as usize + order - self.log[b as usize] as usize) % order;
            Some(self.exp[e])
        }
    }

    /// `alpha^e` for any (possibly negative) exponent.
    #[inline]
    pub fn alpha_pow(&self, e: i64) -> Symbol {
        let order = self.order() as i64;
        self.exp[e.rem_euclid(order) as usize]
    }

    /// `a^e` with `0^0 = 1`.
    pub fn pow(&self, a: Symbol, e: i64) -> Symbol {
        if a == 0 {
            return if e == 0 { 1 } else { 0 };
        }
        let order = self.order() as i64;
        let l = self.log[a as usize] as i64;
        self.exp[(l * e.rem_euclid(order)).rem_euclid(order) as usize]
    }

    /// Discrete logarithm to base alpha; `None` for zero.
    #[inline]
    pub fn log(&self, a: Symbol) -> Option<u32> {
        if a == 0 {
            None
        } else {
            Some(self.log[a as usize])
        }
    }

    /// Evaluates `poly` (coefficient of `x^i` at index `i`) at `x` by Horner's rule.
    pub fn eval(&self, poly: &[Symbol], x: Symbol) -> Symbol {
        poly.iter()
            .rev()
            .fold(0, |acc, &c| self.mul(acc, x) ^ c)
    }
}
