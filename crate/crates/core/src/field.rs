//! Exact coefficient fields.
//!
//! Every scalar in the crate is a [`Q`] (an arbitrary precision rational).
//! A [`Field`] decides how those scalars are combined: over the rationals
//! they are used as is, over `GF(p)` they are kept as integer residues in
//! `0..p`.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub type Q = BigRational;

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn q_frac(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

/// Parses `3`, `-2` or `2/3`.
pub fn parse_q(s: &str) -> Option<Q> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n = BigInt::from_str(n.trim()).ok()?;
            let d = BigInt::from_str(d.trim()).ok()?;
            if d.is_zero() {
                return None;
            }
            Some(Q::new(n, d))
        }
        None => BigInt::from_str(s).ok().map(Q::from_integer),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum Field {
    #[default]
    Rational,
    Prime(u32),
}

impl Field {
    /// `0` selects the rationals, anything else must be a prime.
    pub fn from_characteristic(p: u64) -> Result<Self> {
        if p == 0 {
            return Ok(Field::Rational);
        }
        if p > u32::MAX as u64 || !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        Ok(Field::Prime(p as u32))
    }

    pub fn characteristic(&self) -> u64 {
        match self {
            Field::Rational => 0,
            Field::Prime(p) => *p as u64,
        }
    }

    pub fn zero(&self) -> Q {
        Q::zero()
    }

    pub fn one(&self) -> Q {
        Q::one()
    }

    pub fn from_int(&self, n: i64) -> Q {
        self.normalize(q(n))
    }

    /// Maps an arbitrary rational to its canonical representative.
    ///
    /// Panics over `GF(p)` when the denominator is divisible by `p`.
    pub fn normalize(&self, x: Q) -> Q {
        match self {
            Field::Rational => x,
            Field::Prime(p) => {
                let p = BigInt::from(*p);
                let num = x.numer().mod_floor(&p);
                let den = x.denom().mod_floor(&p);
                assert!(!den.is_zero(), "denominator vanishes modulo {p}");
                let inv = mod_inverse(&den, &p);
                Q::from_integer((num * inv).mod_floor(&p))
            }
        }
    }

    pub fn add(&self, a: &Q, b: &Q) -> Q {
        self.reduce(a + b)
    }

    pub fn sub(&self, a: &Q, b: &Q) -> Q {
        self.reduce(a - b)
    }

    pub fn mul(&self, a: &Q, b: &Q) -> Q {
        self.reduce(a * b)
    }

    pub fn neg(&self, a: &Q) -> Q {
        self.reduce(-a)
    }

    pub fn inv(&self, a: &Q) -> Option<Q> {
        let a = self.normalize(a.clone());
        if a.is_zero() {
            return None;
        }
        match self {
            Field::Rational => Some(a.recip()),
            Field::Prime(p) => {
                let p = BigInt::from(*p);
                Some(Q::from_integer(mod_inverse(a.numer(), &p)))
            }
        }
    }

    pub fn div(&self, a: &Q, b: &Q) -> Option<Q> {
        self.inv(b).map(|ib| self.mul(a, &ib))
    }

    pub fn is_zero(&self, a: &Q) -> bool {
        a.is_zero()
    }

    // Operands are already canonical, so only integer residues need folding.
    fn reduce(&self, x: Q) -> Q {
        match self {
            Field::Rational => x,
            Field::Prime(p) => {
                let p = BigInt::from(*p);
                debug_assert!(x.is_integer());
                Q::from_integer(x.numer().mod_floor(&p))
            }
        }
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Field::Rational => write!(f, "Q"),
            Field::Prime(p) => write!(f, "GF({p})"),
        }
    }
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

fn mod_inverse(a: &BigInt, p: &BigInt) -> BigInt {
    let e = a.extended_gcd(p);
    debug_assert!(e.gcd.is_one() || e.gcd == -BigInt::one());
    let x = if e.gcd.is_negative() { -e.x } else { e.x };
    x.mod_floor(p)
}
