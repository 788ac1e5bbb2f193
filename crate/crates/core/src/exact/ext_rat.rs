use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;

use crate::error::{domain, Error, Result};
use crate::natural::{nat, ratio_to_f64, Natural};

/// A nonnegative fraction in lowest terms, or the point at infinity `1/0`.
///
/// Zero is always `0/1`; `1/0` is the only value with a zero denominator.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct ExtRat<T> {
    num: T,
    den: T,
}

impl<T: Natural> ExtRat<T> {
    /// Builds `num/den`, reducing to lowest terms.
    pub fn new(num: T, den: T) -> Result<Self> {
        if num.is_zero() && den.is_zero() {
            return Err(Error::ZeroOverZero);
        }
        if den.is_zero() {
            return Ok(Self::infinity());
        }
        if num.is_zero() {
            return Ok(Self::zero());
        }
        let g = num.gcd(&den);
        if g.is_one() {
            Ok(Self { num, den })
        } else {
            Ok(Self {
                num: num / g.clone(),
                den: den / g,
            })
        }
    }

    /// Builds `num/den` from parts the caller knows to be coprime and not
    /// both zero.
    pub fn from_coprime(num: T, den: T) -> Self {
        debug_assert!(!(num.is_zero() && den.is_zero()));
        debug_assert!(num.gcd(&den).is_one(), "{num}/{den} is not reduced");
        Self { num, den }
    }

    pub fn zero() -> Self {
        Self {
            num: T::zero(),
            den: T::one(),
        }
    }

    pub fn one() -> Self {
        Self {
            num: T::one(),
            den: T::one(),
        }
    }

    pub fn infinity() -> Self {
        Self {
            num: T::one(),
            den: T::zero(),
        }
    }

    pub fn integer(n: T) -> Self {
        Self { num: n, den: T::one() }
    }

    pub fn from_u64s(num: u64, den: u64) -> Result<Self> {
        Self::new(nat(num), nat(den))
    }

    pub fn num(&self) -> &T {
        &self.num
    }

    pub fn den(&self) -> &T {
        &self.den
    }

    pub fn into_parts(self) -> (T, T) {
        (self.num, self.den)
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    pub fn is_infinite(&self) -> bool {
        self.den.is_zero()
    }

    pub fn is_finite(&self) -> bool {
        !self.den.is_zero()
    }

    pub fn is_integer(&self) -> bool {
        self.den.is_one()
    }

    /// True for finite nonzero values, i.e. vertices of the Stern-Brocot tree.
    pub fn is_positive_finite(&self) -> bool {
        !self.num.is_zero() && !self.den.is_zero()
    }

    /// Integer part. Errors at infinity.
    pub fn floor(&self) -> Result<T> {
        if self.is_infinite() {
            return Err(domain("floor", self));
        }
        Ok(self.num.clone() / self.den.clone())
    }

    /// Fractional part in `[0, 1)`. Errors at infinity.
    pub fn fract(&self) -> Result<Self> {
        if self.is_infinite() {
            return Err(domain("fract", self));
        }
        Ok(Self::from_coprime(
            self.num.clone() % self.den.clone(),
            self.den.clone(),
        ))
    }

    /// `1/x`, with `1/0 = ∞` and `1/∞ = 0`.
    pub fn recip(&self) -> Self {
        Self {
            num: self.den.clone(),
            den: self.num.clone(),
        }
    }

    /// The Farey sum `(p+p')/(q+q')`, reduced.
    pub fn mediant(&self, other: &Self) -> Self {
        if self == other {
            return self.clone();
        }
        Self::new(
            self.num.clone() + other.num.clone(),
            self.den.clone() + other.den.clone(),
        )
        .expect("mediant of two valid fractions is never 0/0")
    }

    /// `q·p' − p·q'` against `other` (as a signed integer).
    pub fn cross(&self, other: &Self) -> BigInt {
        BigInt::from(self.den.to_biguint() * other.num.to_biguint())
            - BigInt::from(self.num.to_biguint() * other.den.to_biguint())
    }

    /// True when `self < other` are Stern-Brocot neighbours: `q·p' − p·q' = 1`.
    pub fn is_unimodular_with(&self, other: &Self) -> bool {
        let lhs = self.den.clone() * other.num.clone();
        let rhs = self.num.clone() * other.den.clone();
        lhs > rhs && lhs - rhs == T::one()
    }

    /// `x + n`; infinity stays infinite.
    pub fn add_integer(&self, n: &T) -> Self {
        Self {
            num: self.num.clone() + n.clone() * self.den.clone(),
            den: self.den.clone(),
        }
    }

    /// Signed exact value; `None` at infinity.
    pub fn to_big_rational(&self) -> Option<BigRational> {
        if self.is_infinite() {
            return None;
        }
        Some(BigRational::new_raw(
            BigInt::from(self.num.to_biguint()),
            BigInt::from(self.den.to_biguint()),
        ))
    }

    /// Inverse of [`to_big_rational`](Self::to_big_rational) for nonnegative
    /// values that fit in `T`.
    pub fn from_big_rational(r: &BigRational) -> Result<Self> {
        let (n, d) = (r.numer(), r.denom());
        let to_nat = |v: &BigInt| -> Result<T> {
            let u: BigUint = v
                .try_into()
                .map_err(|_| domain("nonnegative fractions", r))?;
            T::from_biguint(&u).ok_or_else(|| domain("the scalar type", r))
        };
        Self::new(to_nat(n)?, to_nat(d)?)
    }

    /// Converts between scalar types; `None` if the target is too narrow.
    pub fn convert<U: Natural>(&self) -> Option<ExtRat<U>> {
        Some(ExtRat {
            num: U::from_biguint(&self.num.to_biguint())?,
            den: U::from_biguint(&self.den.to_biguint())?,
        })
    }

    pub fn to_f64(&self) -> f64 {
        ratio_to_f64(&self.num, &self.den)
    }

    /// The homeomorphism `J → I`, `x ↦ x/(x+1)`, with `∞ ↦ 1`.
    pub fn phi(&self) -> Self {
        // p/(p+q) is already reduced and also covers 1/0 ↦ 1/1
        Self::from_coprime(self.num.clone(), self.num.clone() + self.den.clone())
    }

    /// Inverse of [`phi`](Self::phi), `y ↦ y/(1−y)` with `1 ↦ ∞`.
    pub fn phi_inv(&self) -> Result<Self> {
        if self.num > self.den {
            return Err(domain("phi_inv (needs y ≤ 1)", self));
        }
        Ok(Self::from_coprime(
            self.num.clone(),
            self.den.clone() - self.num.clone(),
        ))
    }

    /// `1 − y` for `y ∈ [0, 1]`.
    pub fn one_minus(&self) -> Result<Self> {
        if self.num > self.den {
            return Err(domain("1 − y (needs y ≤ 1)", self));
        }
        Ok(Self::from_coprime(
            self.den.clone() - self.num.clone(),
            self.den.clone(),
        ))
    }
}

impl<T: Natural> PartialOrd for ExtRat<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<T: Natural> Ord for ExtRat<T> {
    /// Cross-multiplication; `1/0` compares above every finite value.
    fn cmp(&self, other: &Self) -> Ordering {
        (self.num.clone() * other.den.clone()).cmp(&(other.num.clone() * self.den.clone()))
    }
}

impl<T: Natural> fmt::Display for ExtRat<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

impl<T: Natural> FromStr for ExtRat<T> {
    type Err = Error;

    /// Parses `"p/q"` or a bare integer `"n"`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = |reason: &str| Error::Parse {
            input: s.to_string(),
            reason: reason.to_string(),
        };
        let parse_nat = |t: &str| -> Result<T> {
            let t = t.trim();
            if t.is_empty() || !t.bytes().all(|b| b.is_ascii_digit()) {
                return Err(bad("expected nonnegative integers"));
            }
            let big: BigUint = t.parse().map_err(|_| bad("expected nonnegative integers"))?;
            T::from_biguint(&big).ok_or_else(|| bad("value too large for the scalar type"))
        };
        match s.split_once('/') {
            Some((p, q)) => Self::new(parse_nat(p)?, parse_nat(q)?).map_err(|_| bad("0/0")),
            None => Ok(Self::integer(parse_nat(s)?)),
        }
    }
}
