//! Transfer operators of `G`, `F`, `D`, the Markov operators of the two
//! chains on `[0, ∞]`, the averaging operator and harmonic-function series.
//!
//! Test functions are callbacks `&ExtRat -> Option<V>`; `None` marks a point
//! where the function is undefined and surfaces as [`Error::Singular`].
//! Weights are exact rationals whenever the exponent is an integer, so with
//! `V = BigRational` every result is exact.

use std::ops::{Add, Mul, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{check_cap, domain, Error, Result};
use crate::exact::ExtRat;
use crate::natural::Natural;

/// Largest `n` for [`markov_power`] (the expansion has `2^n` words).
pub const MAX_POWER: u32 = 24;

/// Values an operator can produce.
pub trait Scalar:
    Clone + Send + Sync + Zero + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self>
{
    fn from_ratio(r: &BigRational) -> Self;

    /// `None` when the type cannot hold an inexact value.
    fn from_f64(x: f64) -> Option<Self>;
}

impl Scalar for f64 {
    fn from_ratio(r: &BigRational) -> Self {
        r.to_f64().unwrap_or(f64::NAN)
    }

    fn from_f64(x: f64) -> Option<Self> {
        Some(x)
    }
}

impl Scalar for Complex64 {
    fn from_ratio(r: &BigRational) -> Self {
        Complex64::new(f64::from_ratio(r), 0.0)
    }

    fn from_f64(x: f64) -> Option<Self> {
        Some(Complex64::new(x, 0.0))
    }
}

impl Scalar for BigRational {
    fn from_ratio(r: &BigRational) -> Self {
        r.clone()
    }

    fn from_f64(_: f64) -> Option<Self> {
        None
    }
}

fn big<T: Natural>(x: &T) -> BigInt {
    BigInt::from(x.to_biguint())
}

fn finite<T: Natural>(x: &ExtRat<T>, what: &'static str) -> Result<BigRational> {
    x.to_big_rational().ok_or_else(|| domain(what, x))
}

fn eval<T: Natural, V>(f: &impl Fn(&ExtRat<T>) -> Option<V>, y: &ExtRat<T>) -> Result<V> {
    f(y).ok_or_else(|| Error::Singular(format!("test function undefined at {y}")))
}

/// `base^e` as `V`, exact for integer `e`.
fn power<V: Scalar>(base: &BigRational, e: f64) -> Result<V> {
    if e.fract() == 0.0 && e.abs() <= f64::from(i32::MAX) {
        let e = e as i32;
        if base.is_zero() && e < 0 {
            return Err(Error::Singular("zero weight base with negative exponent".into()));
        }
        let r = if e >= 0 {
            num_traits::pow(base.clone(), e as usize)
        } else {
            num_traits::pow(base.recip(), e.unsigned_abs() as usize)
        };
        return Ok(V::from_ratio(&r));
    }
    let b = base.to_f64().unwrap_or(f64::NAN);
    V::from_f64(b.powf(e))
        .ok_or_else(|| Error::Singular(format!("non-integer exponent {e} needs a floating value type")))
}

/// `Φ₀(x) = x/(1+x)`.
pub fn phi0<T: Natural>(x: &ExtRat<T>) -> ExtRat<T> {
    x.phi()
}

/// `Φ₁(x) = x + 1`.
pub fn phi1<T: Natural>(x: &ExtRat<T>) -> ExtRat<T> {
    x.add_integer(&T::one())
}

/// Density of `ν(dx) = dx/x`.
pub fn nu_density(x: f64) -> f64 {
    1.0 / x
}

/// Density of `μ(dx) = dx/(x(1−x))`.
pub fn mu_density(x: f64) -> f64 {
    1.0 / (x * (1.0 - x))
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum Generator {
    /// `(1+x)^{−2q} f(x/(1+x)) + f(x+1)` on `[0, ∞)`.
    G,
    /// `2^{−q} f(x/2) + 2^{−q} f(x/2 + 1/2)` on `[0, 1]`.
    Dyadic,
    /// `(1+x)^{−2q} f(x/(1+x)) + (2−x)^{−2q} f(1/(2−x))` on `[0, 1]`.
    Farey,
}

#[derive(Clone, Copy, PartialEq, Debug)]
pub struct TransferKind {
    pub generator: Generator,
    pub q: f64,
}

impl TransferKind {
    pub fn new(generator: Generator, q: f64) -> Result<Self> {
        if !q.is_finite() {
            return Err(domain("transfer operator parameter q", q));
        }
        Ok(Self { generator, q })
    }
}

/// `(L_q f)(x)`, one term per inverse branch.
pub fn transfer_apply<T, V, Fun>(kind: TransferKind, f: Fun, x: &ExtRat<T>) -> Result<V>
where
    T: Natural,
    V: Scalar,
    Fun: Fn(&ExtRat<T>) -> Option<V>,
{
    let xr = finite(x, "transfer operator (needs finite x)")?;
    let one = BigRational::one();
    let two = || T::one() + T::one();
    if kind.generator != Generator::G && x.num() > x.den() {
        return Err(domain("transfer operator on [0,1]", x));
    }
    match kind.generator {
        Generator::G => {
            let w = power::<V>(&(&one + &xr), -2.0 * kind.q)?;
            Ok(w * eval(&f, &phi0(x))? + eval(&f, &phi1(x))?)
        }
        Generator::Dyadic => {
            let w = power::<V>(&BigRational::from_integer(2.into()), -kind.q)?;
            let qq = x.den().clone() * two();
            let left = ExtRat::new(x.num().clone(), qq.clone())?;
            let right = ExtRat::new(x.num().clone() + x.den().clone(), qq)?;
            Ok(w.clone() * eval(&f, &left)? + w * eval(&f, &right)?)
        }
        Generator::Farey => {
            let w0 = power::<V>(&(&one + &xr), -2.0 * kind.q)?;
            let two_minus = BigRational::from_integer(2.into()) - &xr;
            let w1 = power::<V>(&two_minus, -2.0 * kind.q)?;
            let right = ExtRat::new(x.den().clone(), x.den().clone() * two() - x.num().clone())?;
            Ok(w0 * eval(&f, &phi0(x))? + w1 * eval(&f, &right)?)
        }
    }
}

/// `f(x) − f(x+1) − (1+x)^{−2q} f(x/(1+x))`.
pub fn lewis_zagier_residual<T, V, Fun>(f: Fun, q: f64, x: &ExtRat<T>) -> Result<V>
where
    T: Natural,
    V: Scalar,
    Fun: Fn(&ExtRat<T>) -> Option<V>,
{
    let fx = eval(&f, x)?;
    Ok(fx - transfer_apply(TransferKind::new(Generator::G, q)?, f, x)?)
}

/// The two random walks on `[0, ∞]` driven by `Φ₀`, `Φ₁`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum MarkovKind {
    /// `p(0, x) = p(1, x) = 1/2`.
    Mc0,
    /// `p(0, x) = 1/(1+x)`, `p(1, x) = x/(1+x)`; `0` and `∞` absorb.
    Mc1,
}

impl MarkovKind {
    pub fn name(self) -> &'static str {
        match self {
            MarkovKind::Mc0 => "MC0",
            MarkovKind::Mc1 => "MC1",
        }
    }
}

impl std::str::FromStr for MarkovKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "mc0" | "0" => Ok(MarkovKind::Mc0),
            "mc1" | "1" => Ok(MarkovKind::Mc1),
            _ => Err(Error::Parse {
                input: s.into(),
                reason: "expected MC0 or MC1".into(),
            }),
        }
    }
}

/// `(p(0, x), p(1, x))` as exact rationals, with `p(0, ∞) = p(1, 0) = 0`.
pub fn transition_probs<T: Natural>(kind: MarkovKind, x: &ExtRat<T>) -> (BigRational, BigRational) {
    match kind {
        MarkovKind::Mc0 => {
            let h = BigRational::new(1.into(), 2.into());
            (h.clone(), h)
        }
        MarkovKind::Mc1 => {
            let (p, q) = (big(x.num()), big(x.den()));
            let s = &p + &q;
            (BigRational::new(q, s.clone()), BigRational::new(p, s))
        }
    }
}

/// `(P f)(x) = Σ_s p(s, x) f(Φ_s(x))`; zero-probability branches are skipped.
pub fn markov_apply<T, V, Fun>(kind: MarkovKind, f: Fun, x: &ExtRat<T>) -> Result<V>
where
    T: Natural,
    V: Scalar,
    Fun: Fn(&ExtRat<T>) -> Option<V>,
{
    let (p0, p1) = transition_probs(kind, x);
    let mut acc = V::zero();
    if !p0.is_zero() {
        acc = acc + V::from_ratio(&p0) * eval(&f, &phi0(x))?;
    }
    if !p1.is_zero() {
        acc = acc + V::from_ratio(&p1) * eval(&f, &phi1(x))?;
    }
    Ok(acc)
}

/// Below this many remaining steps a subtree is summed on one thread.
const SPLIT_DEPTH: u32 = 12;

fn power_rec<T, V, Fun>(kind: MarkovKind, f: &Fun, x: &ExtRat<T>, n: u32) -> Result<V>
where
    T: Natural,
    V: Scalar,
    Fun: Fn(&ExtRat<T>) -> Option<V> + Sync,
{
    if n == 0 {
        return eval(f, x);
    }
    let (p0, p1) = transition_probs(kind, x);
    let branch = |p: &BigRational, y: ExtRat<T>| -> Result<V> {
        if p.is_zero() {
            return Ok(V::zero());
        }
        Ok(V::from_ratio(p) * power_rec(kind, f, &y, n - 1)?)
    };
    let (a, b) = if n > SPLIT_DEPTH {
        rayon::join(|| branch(&p0, phi0(x)), || branch(&p1, phi1(x)))
    } else {
        (branch(&p0, phi0(x)), branch(&p1, phi1(x)))
    };
    // fixed combination order keeps the result independent of scheduling
    Ok(a? + b?)
}

/// `(Pⁿ f)(x)` summed exactly over all `2ⁿ` words of the walk.
pub fn markov_power<T, V, Fun>(kind: MarkovKind, f: Fun, x: &ExtRat<T>, n: u32) -> Result<V>
where
    T: Natural,
    V: Scalar,
    Fun: Fn(&ExtRat<T>) -> Option<V> + Sync,
{
    markov_power_with_cap(kind, f, x, n, MAX_POWER)
}

pub fn markov_power_with_cap<T, V, Fun>(kind: MarkovKind, f: Fun, x: &ExtRat<T>, n: u32, cap: u32) -> Result<V>
where
    T: Natural,
    V: Scalar,
    Fun: Fn(&ExtRat<T>) -> Option<V> + Sync,
{
    check_cap("operator power", u64::from(n), u64::from(cap))?;
    power_rec(kind, &f, x, n)
}

/// `(A f)(x) = (f(x) + f(1/x)) / 2`.
pub fn averaging_apply<T, V, Fun>(f: Fun, x: &ExtRat<T>) -> Result<V>
where
    T: Natural,
    V: Scalar,
    Fun: Fn(&ExtRat<T>) -> Option<V>,
{
    let half = V::from_ratio(&BigRational::new(1.into(), 2.into()));
    Ok(half * (eval(&f, x)? + eval(&f, &x.recip())?))
}

/// `(P A f − A P f)(x)`.
pub fn commutator_residual<T, V, Fun>(kind: MarkovKind, f: Fun, x: &ExtRat<T>) -> Result<V>
where
    T: Natural,
    V: Scalar,
    Fun: Fn(&ExtRat<T>) -> Option<V>,
{
    let af = |y: &ExtRat<T>| averaging_apply(&f, y).ok();
    let pf = |y: &ExtRat<T>| markov_apply(kind, &f, y).ok();
    let pa = markov_apply(kind, af, x)?;
    let ap = averaging_apply(pf, x)?;
    Ok(pa - ap)
}

/// `(Σ_{k<N} w_k h(Φ₀(x+k)), tail)`: `w_k = 2^{−(k+1)}`, tail `2^{−N}` for
/// MC0; `w_k = x/((x+k)(x+k+1))`, tail `x/(x+N)` for MC1. At the absorbing
/// state `x = 0` of MC1 the result is `(h(0), 0)`.
pub fn harmonic_series_partial<T, V, Fun>(kind: MarkovKind, h: Fun, x: &ExtRat<T>, n: u64) -> Result<(V, V)>
where
    T: Natural,
    V: Scalar,
    Fun: Fn(&ExtRat<T>) -> Option<V>,
{
    let xr = finite(x, "harmonic series (needs finite x)")?;
    if n == 0 {
        return Err(domain("harmonic series (needs N >= 1)", n));
    }
    if kind == MarkovKind::Mc1 && x.is_zero() {
        return Ok((eval(&h, x)?, V::zero()));
    }
    let mut acc = V::zero();
    let mut y = x.clone();
    for k in 0..n {
        let kr = BigRational::from_integer(k.into());
        let w = match kind {
            MarkovKind::Mc0 => BigRational::new(1.into(), BigInt::one() << (k + 1)),
            MarkovKind::Mc1 => {
                let a = &xr + &kr;
                &xr / (&a * (&a + BigRational::one()))
            }
        };
        acc = acc + V::from_ratio(&w) * eval(&h, &phi0(&y))?;
        y = phi1(&y);
    }
    let nr = BigRational::from_integer(n.into());
    let tail = match kind {
        MarkovKind::Mc0 => BigRational::new(1.into(), BigInt::one() << n),
        MarkovKind::Mc1 => &xr / (&xr + nr),
    };
    Ok((acc, V::from_ratio(&tail)))
}

/// The nonconstant bounded harmonic function of MC1: the indicator of the
/// absorbing pair `{0, ∞}`.
pub fn h1<T: Natural, V: Scalar + One>(x: &ExtRat<T>) -> V {
    if x.is_zero() || x.is_infinite() {
        V::one()
    } else {
        V::zero()
    }
}

/// For `0 < a < b` and each branch `s`, the arguments of the two logarithms
/// `∫_{Φ_s a}^{Φ_s b} dx/x` and `∫_a^b p(s, x) dx/x` of MC1, computed
/// independently. Invariance of `dx/x` means each pair is equal.
pub fn nu_invariance_args<T: Natural>(a: &ExtRat<T>, b: &ExtRat<T>) -> Result<[(BigRational, BigRational); 2]> {
    let (ar, br) = (
        finite(a, "nu invariance (finite a)")?,
        finite(b, "nu invariance (finite b)")?,
    );
    if a.is_zero() || a >= b {
        return Err(Error::EmptyInterval(a.to_string(), b.to_string()));
    }
    let one = BigRational::one();
    let ratio = |lo: &ExtRat<T>, hi: &ExtRat<T>| -> Result<BigRational> {
        Ok(finite(hi, "pushforward")? / finite(lo, "pushforward")?)
    };
    // antiderivatives: p(0,x)/x = 1/(x(1+x)) → log(x/(1+x)); p(1,x)/x = 1/(1+x) → log(1+x)
    let anti0 = |t: &BigRational| t / (&one + t);
    let anti1 = |t: &BigRational| &one + t;
    Ok([
        (ratio(&phi0(a), &phi0(b))?, anti0(&br) / anti0(&ar)),
        (ratio(&phi1(a), &phi1(b))?, anti1(&br) / anti1(&ar)),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    type Q = ExtRat<u64>;

    fn q(s: &str) -> Q {
        s.parse().unwrap()
    }

    fn r(a: i64, b: i64) -> BigRational {
        BigRational::new(a.into(), b.into())
    }

    fn exact(x: &Q) -> Option<BigRational> {
        x.to_big_rational()
    }

    fn inv(x: &Q) -> Option<BigRational> {
        exact(x).filter(|v| !v.is_zero()).map(|v| v.recip())
    }

    fn h1o(x: &Q) -> Option<BigRational> {
        Some(h1(x))
    }

    fn one(_: &Q) -> Option<BigRational> {
        Some(BigRational::one())
    }

    #[test]
    fn transfer_examples() {
        let g1 = TransferKind::new(Generator::G, 1.0).unwrap();
        assert_eq!(transfer_apply(g1, inv, &q("2")).unwrap(), r(1, 2));
        let g0 = TransferKind::new(Generator::G, 0.0).unwrap();
        assert_eq!(transfer_apply(g0, one, &q("7/3")).unwrap(), r(2, 1));
        let f1 = TransferKind::new(Generator::Farey, 1.0).unwrap();
        let dens = |y: &Q| exact(y).filter(|v| !v.is_zero() && !v.is_one()).map(|v| (v.clone() * (BigRational::one() - v)).recip());
        assert_eq!(transfer_apply(f1, dens, &q("1/2")).unwrap(), r(4, 1));
        let d1 = TransferKind::new(Generator::Dyadic, 1.0).unwrap();
        assert_eq!(transfer_apply(d1, one, &q("1/3")).unwrap(), r(1, 1));
        let quarter = TransferKind::new(Generator::G, 0.25).unwrap();
        assert!(transfer_apply(quarter, one, &q("1")).is_err());
        let v: f64 = transfer_apply(quarter, |_: &Q| Some(1.0), &q("1")).unwrap();
        assert!((v - (1.0 + 0.5f64.sqrt())).abs() < 1e-15);
        assert!(transfer_apply(f1, one, &q("2")).is_err());
        assert!(matches!(transfer_apply(g1, inv, &q("0")), Err(Error::Singular(_))));
    }

    #[test]
    fn lewis_zagier_examples() {
        assert!(lewis_zagier_residual(inv, 1.0, &q("2")).unwrap().is_zero());
        let z: f64 = lewis_zagier_residual(|_: &Q| Some(0.0), 0.3, &q("5")).unwrap();
        assert_eq!(z, 0.0);
        assert_eq!(lewis_zagier_residual(one, 0.0, &q("1")).unwrap(), r(-1, 1));
    }

    #[test]
    fn markov_examples() {
        for kind in [MarkovKind::Mc0, MarkovKind::Mc1] {
            for x in [Q::zero(), Q::infinity(), q("3/7")] {
                assert_eq!(markov_apply(kind, one, &x).unwrap(), r(1, 1));
            }
        }
        let h: BigRational = markov_apply(MarkovKind::Mc1, h1o, &Q::zero()).unwrap();
        assert_eq!(h, r(1, 1));
        assert_eq!(markov_apply(MarkovKind::Mc1, exact, &q("1")).unwrap(), r(5, 4));
    }

    #[test]
    fn power_examples() {
        for n in [0, 1, 5, 13] {
            assert_eq!(markov_power(MarkovKind::Mc0, one, &q("2/5"), n).unwrap(), r(1, 1));
            let v: BigRational = markov_power(MarkovKind::Mc1, h1o, &q("1"), n).unwrap();
            assert!(v.is_zero());
        }
        assert!(markov_power(MarkovKind::Mc0, one, &q("1"), 25).is_err());
        // two steps of MC1 from 1 on f(y) = y, expanded by hand
        let two: BigRational = markov_power(MarkovKind::Mc1, exact, &q("1"), 2).unwrap();
        let by_hand = r(1, 2) * (r(2, 3) * r(1, 3) + r(1, 3) * r(3, 2)) + r(1, 2) * (r(1, 3) * r(2, 3) + r(2, 3) * r(3, 1));
        assert_eq!(two, by_hand);
    }

    #[test]
    fn commutator_examples() {
        for kind in [MarkovKind::Mc0, MarkovKind::Mc1] {
            assert!(commutator_residual(kind, one, &q("5/3")).unwrap().is_zero());
        }
        let y = |x: &Q| if x.is_infinite() { None } else { exact(x) };
        assert!(commutator_residual(MarkovKind::Mc1, y, &q("2")).unwrap().is_zero());
        let e1 = |x: &Q| Some(if x.is_infinite() { 1.0 } else { (std::f64::consts::TAU * x.to_f64()).cos() });
        let c: f64 = commutator_residual(MarkovKind::Mc0, e1, &q("3/2")).unwrap();
        assert!(c.abs() < 1e-12);
    }

    #[test]
    fn harmonic_examples() {
        let (s, t) = harmonic_series_partial(MarkovKind::Mc0, one, &q("1"), 10).unwrap();
        assert_eq!((s, t), (BigRational::one() - r(1, 1024), r(1, 1024)));
        let (s, t) = harmonic_series_partial(MarkovKind::Mc1, one, &q("1"), 10).unwrap();
        assert_eq!((s, t), (r(10, 11), r(1, 11)));
        let (s, _) = harmonic_series_partial::<u64, BigRational, _>(MarkovKind::Mc1, h1o, &q("2"), 20).unwrap();
        assert!(s.is_zero());
        let (s, t) = harmonic_series_partial::<u64, BigRational, _>(MarkovKind::Mc1, h1o, &Q::zero(), 5).unwrap();
        assert_eq!((s, t), (r(1, 1), r(0, 1)));
    }

    #[test]
    fn h1_values() {
        assert_eq!(h1::<u64, BigRational>(&Q::zero()), r(1, 1));
        assert_eq!(h1::<u64, BigRational>(&q("5/3")), r(0, 1));
        assert_eq!(h1::<u64, BigRational>(&Q::infinity()), r(1, 1));
    }

    #[test]
    fn nu_args_agree() {
        let [(a0, b0), (a1, b1)] = nu_invariance_args(&q("1/3"), &q("5/2")).unwrap();
        assert_eq!(a0, b0);
        assert_eq!(a1, b1);
        assert!(nu_invariance_args(&q("2"), &q("1")).is_err());
    }
}
