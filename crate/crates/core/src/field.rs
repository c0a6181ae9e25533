//! Exact scalars: prime fields `Z_p` and arbitrary-precision rationals.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Largest supported prime modulus.
pub const MAX_PRIME: u32 = (1 << 31) - 1;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("field mismatch: {0} vs {1}")]
    Mismatch(FieldDesc, FieldDesc),
    #[error("division by zero")]
    DivisionByZero,
    #[error("{0} is not a prime in [2, 2^31 - 1]")]
    NotPrime(u64),
    #[error("infinite field: {0} cannot be enumerated")]
    InfiniteField(FieldDesc),
    #[error("invalid field literal `{0}` (expected `Fp <prime>` or `Q`)")]
    BadFieldLiteral(String),
    #[error("invalid scalar literal `{literal}` for {field}")]
    BadScalarLiteral { literal: String, field: FieldDesc },
}

/// The coefficient field `K`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FieldDesc {
    Prime(u32),
    Rationals,
}

/// The three regimes the preserver classification branches on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Cardinality {
    Two,
    Finite(u32),
    Infinite,
}

fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

impl FieldDesc {
    pub fn prime(p: u64) -> Result<Self, FieldError> {
        if p > MAX_PRIME as u64 || !is_prime(p) {
            return Err(FieldError::NotPrime(p));
        }
        Ok(FieldDesc::Prime(p as u32))
    }

    pub fn cardinality(&self) -> Cardinality {
        match *self {
            FieldDesc::Prime(2) => Cardinality::Two,
            FieldDesc::Prime(p) => Cardinality::Finite(p),
            FieldDesc::Rationals => Cardinality::Infinite,
        }
    }

    /// `Some(q)` for a finite field of order `q`.
    pub fn order(&self) -> Option<u32> {
        match *self {
            FieldDesc::Prime(p) => Some(p),
            FieldDesc::Rationals => None,
        }
    }

    pub fn characteristic(&self) -> u32 {
        match *self {
            FieldDesc::Prime(p) => p,
            FieldDesc::Rationals => 0,
        }
    }

    pub fn is_binary(&self) -> bool {
        *self == FieldDesc::Prime(2)
    }

    pub fn zero(&self) -> Scalar {
        match *self {
            FieldDesc::Prime(p) => Scalar::Mod { p, v: 0 },
            FieldDesc::Rationals => Scalar::Rat(BigRational::zero()),
        }
    }

    pub fn one(&self) -> Scalar {
        self.from_i64(1)
    }

    /// Canonical image of an integer.
    pub fn from_i64(&self, n: i64) -> Scalar {
        match *self {
            FieldDesc::Prime(p) => Scalar::Mod {
                p,
                v: n.rem_euclid(p as i64) as u32,
            },
            FieldDesc::Rationals => Scalar::Rat(BigRational::from_integer(BigInt::from(n))),
        }
    }

    /// `num/den` in this field; `den` must be invertible.
    pub fn fraction(&self, num: i64, den: i64) -> Result<Scalar, FieldError> {
        self.from_i64(num).div(&self.from_i64(den))
    }

    /// Element with canonical index `i` of a prime field (`0 <= i < p`).
    pub fn element(&self, i: u32) -> Scalar {
        match *self {
            FieldDesc::Prime(p) => {
                debug_assert!(i < p);
                Scalar::Mod { p, v: i }
            }
            FieldDesc::Rationals => self.from_i64(i as i64),
        }
    }

    /// All elements of a prime field in the order `0, 1, ..., p - 1`.
    pub fn enumerate(&self) -> Result<Vec<Scalar>, FieldError> {
        match *self {
            FieldDesc::Prime(p) => Ok((0..p).map(|v| Scalar::Mod { p, v }).collect()),
            FieldDesc::Rationals => Err(FieldError::InfiniteField(*self)),
        }
    }

    /// Parses a scalar literal: a decimal integer, or `num/den`.
    pub fn parse_scalar(&self, s: &str) -> Result<Scalar, FieldError> {
        let bad = || FieldError::BadScalarLiteral {
            literal: s.to_string(),
            field: *self,
        };
        let s = s.trim();
        let (num, den) = match s.split_once('/') {
            Some((n, d)) => (n.trim(), Some(d.trim())),
            None => (s, None),
        };
        let num: BigInt = num.parse().map_err(|_| bad())?;
        let den: BigInt = match den {
            Some(d) => d.parse().map_err(|_| bad())?,
            None => BigInt::one(),
        };
        match *self {
            FieldDesc::Prime(p) => {
                let reduce = |n: &BigInt| -> u32 {
                    let r = n % BigInt::from(p);
                    let r = if r.is_negative() { r + BigInt::from(p) } else { r };
                    u32::try_from(r).expect("residue fits in u32")
                };
                let n = Scalar::Mod { p, v: reduce(&num) };
                let d = Scalar::Mod { p, v: reduce(&den) };
                n.div(&d).map_err(|_| bad())
            }
            FieldDesc::Rationals => {
                if den.is_zero() {
                    return Err(bad());
                }
                Ok(Scalar::Rat(BigRational::new(num, den)))
            }
        }
    }
}

impl fmt::Display for FieldDesc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldDesc::Prime(p) => write!(f, "Fp {p}"),
            FieldDesc::Rationals => write!(f, "Q"),
        }
    }
}

impl FromStr for FieldDesc {
    type Err = FieldError;

    /// Accepts `Fp 3`, `Fp3`, `F3`, `Z3`, `Q`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t: String = s.split_whitespace().collect();
        if t == "Q" {
            return Ok(FieldDesc::Rationals);
        }
        let digits = t
            .strip_prefix("Fp")
            .or_else(|| t.strip_prefix("F"))
            .or_else(|| t.strip_prefix("Z"))
            .ok_or_else(|| FieldError::BadFieldLiteral(s.to_string()))?;
        let p: u64 = digits
            .parse()
            .map_err(|_| FieldError::BadFieldLiteral(s.to_string()))?;
        FieldDesc::prime(p)
    }
}

/// An exact field element in canonical form.
///
/// Prime-field values live in `[0, p)`; rationals are kept reduced with a
/// positive denominator (guaranteed by `BigRational`). The std operator impls
/// panic on mixed fields; use the `checked_*` methods at API boundaries.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Scalar {
    Mod { p: u32, v: u32 },
    Rat(BigRational),
}

impl Scalar {
    pub fn field(&self) -> FieldDesc {
        match self {
            Scalar::Mod { p, .. } => FieldDesc::Prime(*p),
            Scalar::Rat(_) => FieldDesc::Rationals,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Mod { v, .. } => *v == 0,
            Scalar::Rat(r) => r.is_zero(),
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Scalar::Mod { v, .. } => *v == 1,
            Scalar::Rat(r) => r.is_one(),
        }
    }

    /// Canonical residue for prime fields.
    pub fn residue(&self) -> Option<u32> {
        match self {
            Scalar::Mod { v, .. } => Some(*v),
            Scalar::Rat(_) => None,
        }
    }

    fn same_field(&self, other: &Scalar) -> Result<(), FieldError> {
        if self.field() == other.field() {
            Ok(())
        } else {
            Err(FieldError::Mismatch(self.field(), other.field()))
        }
    }

    pub fn checked_add(&self, other: &Scalar) -> Result<Scalar, FieldError> {
        self.same_field(other)?;
        Ok(self + other)
    }

    pub fn checked_sub(&self, other: &Scalar) -> Result<Scalar, FieldError> {
        self.same_field(other)?;
        Ok(self - other)
    }

    pub fn checked_mul(&self, other: &Scalar) -> Result<Scalar, FieldError> {
        self.same_field(other)?;
        Ok(self * other)
    }

    pub fn inv(&self) -> Result<Scalar, FieldError> {
        if self.is_zero() {
            return Err(FieldError::DivisionByZero);
        }
        Ok(match self {
            Scalar::Mod { p, v } => Scalar::Mod {
                p: *p,
                v: pow_mod(*v, *p - 2, *p),
            },
            Scalar::Rat(r) => Scalar::Rat(r.recip()),
        })
    }

    pub fn div(&self, other: &Scalar) -> Result<Scalar, FieldError> {
        self.same_field(other)?;
        Ok(self * &other.inv()?)
    }
}

fn pow_mod(base: u32, mut exp: u32, p: u32) -> u32 {
    let p = p as u64;
    let mut acc = 1u64 % p;
    let mut b = base as u64 % p;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * b % p;
        }
        b = b * b % p;
        exp >>= 1;
    }
    acc as u32
}

fn mismatch(a: &Scalar, b: &Scalar) -> ! {
    panic!("scalar field mismatch: {} vs {}", a.field(), b.field())
}

impl<'a> Add<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn add(self, rhs: &Scalar) -> Scalar {
        match (self, rhs) {
            (Scalar::Mod { p, v }, Scalar::Mod { p: q, v: w }) if p == q => Scalar::Mod {
                p: *p,
                v: ((*v as u64 + *w as u64) % *p as u64) as u32,
            },
            (Scalar::Rat(a), Scalar::Rat(b)) => Scalar::Rat(a + b),
            _ => mismatch(self, rhs),
        }
    }
}

impl<'a> Sub<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &Scalar) -> Scalar {
        match (self, rhs) {
            (Scalar::Mod { p, v }, Scalar::Mod { p: q, v: w }) if p == q => Scalar::Mod {
                p: *p,
                v: ((*v as u64 + *p as u64 - *w as u64) % *p as u64) as u32,
            },
            (Scalar::Rat(a), Scalar::Rat(b)) => Scalar::Rat(a - b),
            _ => mismatch(self, rhs),
        }
    }
}

impl<'a> Mul<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        match (self, rhs) {
            (Scalar::Mod { p, v }, Scalar::Mod { p: q, v: w }) if p == q => Scalar::Mod {
                p: *p,
                v: ((*v as u64 * *w as u64) % *p as u64) as u32,
            },
            (Scalar::Rat(a), Scalar::Rat(b)) => Scalar::Rat(a * b),
            _ => mismatch(self, rhs),
        }
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match self {
            Scalar::Mod { p, v } => Scalar::Mod {
                p: *p,
                v: (*p - *v) % *p,
            },
            Scalar::Rat(r) => Scalar::Rat(-r),
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Mod { v, .. } => write!(f, "{v}"),
            Scalar::Rat(r) if r.denom().is_one() => write!(f, "{}", r.numer()),
            Scalar::Rat(r) => write!(f, "{}/{}", r.numer(), r.denom()),
        }
    }
}
