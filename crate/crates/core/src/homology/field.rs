use std::fmt;

use crate::error::{Error, Result};

/// Coefficient field: F2 or F_p for an odd prime `p ≤ 2^31`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Field {
    #[default]
    F2,
    Prime(u32),
}

impl Field {
    pub fn new(p: u32) -> Result<Self> {
        if p == 2 {
            return Ok(Field::F2);
        }
        if p > (1 << 31) || !is_prime(p) {
            return Err(Error::domain(format!(
                "field characteristic {p} is not a prime <= 2^31"
            )));
        }
        Ok(Field::Prime(p))
    }

    pub fn characteristic(self) -> u32 {
        match self {
            Field::F2 => 2,
            Field::Prime(p) => p,
        }
    }

    #[inline]
    pub fn add(self, a: u32, b: u32) -> u32 {
        ((a as u64 + b as u64) % self.characteristic() as u64) as u32
    }

    #[inline]
    pub fn sub(self, a: u32, b: u32) -> u32 {
        let p = self.characteristic() as u64;
        ((a as u64 + p - b as u64) % p) as u32
    }

    #[inline]
    pub fn mul(self, a: u32, b: u32) -> u32 {
        ((a as u64 * b as u64) % self.characteristic() as u64) as u32
    }

    #[inline]
    pub fn neg(self, a: u32) -> u32 {
        self.sub(0, a)
    }

    /// Multiplicative inverse of a nonzero element.
    pub fn inv(self, a: u32) -> u32 {
        debug_assert!(!a.is_multiple_of(self.characteristic()));
        let p = self.characteristic() as u64;
        let mut base = a as u64 % p;
        let mut exp = p - 2;
        let mut acc = 1u64;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc * base % p;
            }
            base = base * base % p;
            exp >>= 1;
        }
        acc as u32
    }

    /// Image of the integer ±1 coefficient `(-1)^i`.
    pub fn sign(self, i: usize) -> u32 {
        if i.is_multiple_of(2) {
            1
        } else {
            self.neg(1)
        }
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F{}", self.characteristic())
    }
}

fn is_prime(p: u32) -> bool {
    if p < 2 {
        return false;
    }
    let p = p as u64;
    let mut d = 2u64;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}
