//! Unsigned integer scalars the exact types are generic over.
//!
//! Everything exact in this crate (fractions, continued fractions, matrices,
//! dyadic values) is parameterised by a [`Natural`]. `BigUint` is the general
//! choice; `u64`/`u128` are much faster for bounded enumeration (tree levels
//! up to depth 24 fit comfortably) and panic on overflow in every build
//! profile of this workspace.

use std::fmt;
use std::hash::Hash;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{FromPrimitive, ToPrimitive, Unsigned};

pub trait Natural:
    Clone
    + Ord
    + Hash
    + fmt::Debug
    + fmt::Display
    + Integer
    + Unsigned
    + FromPrimitive
    + ToPrimitive
    + Send
    + Sync
    + 'static
{
    /// Number of significant bits; zero has bit length 0.
    fn bit_len(&self) -> u64;

    /// `self * 2^n`. Panics if the result does not fit.
    fn shl_bits(&self, n: u64) -> Self;

    /// `self / 2^n`, rounding down.
    fn shr_bits(&self, n: u64) -> Self;

    fn to_biguint(&self) -> BigUint;

    fn from_biguint(v: &BigUint) -> Option<Self>;

    /// `2^n`. Panics if it does not fit.
    fn pow2(n: u64) -> Self {
        Self::one().shl_bits(n)
    }

    /// Number of trailing zero bits, `None` for zero.
    fn trailing_zero_bits(&self) -> Option<u64>;
}

macro_rules! impl_natural_prim {
    ($($t:ty),*) => {$(
        impl Natural for $t {
            fn bit_len(&self) -> u64 {
                u64::from(<$t>::BITS - self.leading_zeros())
            }

            fn shl_bits(&self, n: u64) -> Self {
                if *self == 0 {
                    return 0;
                }
                assert!(
                    self.bit_len() + n <= u64::from(<$t>::BITS),
                    "{} << {} overflows {}",
                    self,
                    n,
                    stringify!($t)
                );
                *self << n
            }

            fn shr_bits(&self, n: u64) -> Self {
                if n >= u64::from(<$t>::BITS) {
                    0
                } else {
                    *self >> n
                }
            }

            fn to_biguint(&self) -> BigUint {
                BigUint::from(*self)
            }

            fn from_biguint(v: &BigUint) -> Option<Self> {
                <$t>::try_from(v).ok()
            }

            fn trailing_zero_bits(&self) -> Option<u64> {
                if *self == 0 {
                    None
                } else {
                    Some(u64::from(self.trailing_zeros()))
                }
            }
        }
    )*};
}

impl_natural_prim!(u32, u64, u128);

impl Natural for BigUint {
    fn bit_len(&self) -> u64 {
        self.bits()
    }

    fn shl_bits(&self, n: u64) -> Self {
        self << n
    }

    fn shr_bits(&self, n: u64) -> Self {
        self >> n
    }

    fn to_biguint(&self) -> BigUint {
        self.clone()
    }

    fn from_biguint(v: &BigUint) -> Option<Self> {
        Some(v.clone())
    }

    fn trailing_zero_bits(&self) -> Option<u64> {
        self.trailing_zeros()
    }
}

/// Converts a machine integer into any [`Natural`].
pub fn nat<T: Natural>(n: u64) -> T {
    T::from_u64(n).expect("every Natural holds a u64")
}

/// Best-effort `p / q` as a double, staying accurate when both operands are
/// far beyond the `f64` range.
pub fn ratio_to_f64<T: Natural>(p: &T, q: &T) -> f64 {
    if q.is_zero() {
        return if p.is_zero() { f64::NAN } else { f64::INFINITY };
    }
    let bits = p.bit_len().max(q.bit_len());
    let shift = bits.saturating_sub(120);
    let (p, q) = (p.shr_bits(shift), q.shr_bits(shift));
    let pf = p.to_f64().unwrap_or(f64::INFINITY);
    let qf = q.to_f64().unwrap_or(f64::INFINITY);
    if qf == 0.0 {
        // q lost all its bits: the quotient is astronomically large
        return f64::INFINITY;
    }
    pf / qf
}
