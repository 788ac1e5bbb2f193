//! Exact evaluation and inversion of the Minkowski question-mark function `?`
//! on `[0, 1]` and of its extension `ρ = ? ∘ φ` on `[0, ∞]`.
//!
//! On rationals both take dyadic values. For `x = [a₀; a₁, …, aₙ]`
//!
//! ```text
//! ρ(x) = 1 − Σ_{k=0..n} (−1)^k 2^{−(a₀+⋯+a_k)}
//! ?(x) = 2 Σ_{k=1..n} (−1)^{k+1} 2^{−(a₁+⋯+a_k)}     (a₀ = 0)
//! ```
//!
//! and the inverse reads a dyadic's binary run lengths back into partial
//! quotients. Also here: monotone enclosures on continued-fraction prefixes,
//! the counting distribution functions of the tree levels, and Stieltjes
//! means over the levels (Fourier-Stieltjes coefficients).

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{Float, Zero};
use rayon::prelude::*;

use crate::coding::{InfiniteCode, Letter, Tail};
use crate::error::{check_cap, domain, Error, Result};
use crate::exact::{eval_terms, ContFrac, ExtRat};
use crate::natural::{nat, ratio_to_f64, Natural};
use crate::sum::ComplexSum;
use crate::tree::{level_range, level_size, TreeKind, TreeSpec, DEFAULT_LEVEL_CAP, LEVEL_CHUNK};

/// Largest binary exponent `?`/`ρ` will produce (the depth of the input).
pub const MAX_DYADIC_EXP: u64 = 1 << 16;

/// An exact dyadic rational `num / 2^exp`, kept with `num` odd or `exp = 0`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Dyadic<T> {
    num: T,
    exp: u64,
}

impl<T: Natural> Dyadic<T> {
    pub fn new(num: T, exp: u64) -> Self {
        if num.is_zero() {
            return Self::zero();
        }
        let tz = num.trailing_zero_bits().expect("nonzero").min(exp);
        Self {
            num: num.shr_bits(tz),
            exp: exp - tz,
        }
    }

    pub fn zero() -> Self {
        Self {
            num: T::zero(),
            exp: 0,
        }
    }

    pub fn one() -> Self {
        Self {
            num: T::one(),
            exp: 0,
        }
    }

    pub fn num(&self) -> &T {
        &self.num
    }

    pub fn exp(&self) -> u64 {
        self.exp
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    fn aligned(&self, other: &Self) -> (T, T, u64) {
        let e = self.exp.max(other.exp);
        (
            self.num.shl_bits(e - self.exp),
            other.num.shl_bits(e - other.exp),
            e,
        )
    }

    pub fn add(&self, other: &Self) -> Self {
        let (a, b, e) = self.aligned(other);
        Self::new(a + b, e)
    }

    /// `self − other`, `None` if negative.
    pub fn checked_sub(&self, other: &Self) -> Option<Self> {
        let (a, b, e) = self.aligned(other);
        (a >= b).then(|| Self::new(a - b, e))
    }

    pub fn half(&self) -> Self {
        Self::new(self.num.clone(), self.exp + 1)
    }

    pub fn double(&self) -> Self {
        Self::new(self.num.clone() + self.num.clone(), self.exp)
    }

    /// `1 − d` for `d ≤ 1`.
    pub fn one_minus(&self) -> Option<Self> {
        Self::one().checked_sub(self)
    }

    pub fn to_ext_rat(&self) -> ExtRat<T> {
        ExtRat::from_coprime(self.num.clone(), T::pow2(self.exp))
    }

    /// `Some` exactly when the denominator is a power of two.
    pub fn from_ext_rat(x: &ExtRat<T>) -> Option<Self> {
        if x.is_infinite() {
            return None;
        }
        let d = x.den();
        let tz = d.trailing_zero_bits()?;
        (tz + 1 == d.bit_len()).then(|| Self::new(x.num().clone(), tz))
    }

    pub fn to_big_rational(&self) -> BigRational {
        BigRational::new(
            BigInt::from(self.num.to_biguint()),
            BigInt::from(T::pow2(self.exp).to_biguint()),
        )
    }

    pub fn to_f64(&self) -> f64 {
        ratio_to_f64(&self.num, &T::pow2(self.exp))
    }

    /// Binary digit `j ≥ 1` of the terminating expansion of a value in
    /// `[0, 1)`.
    pub fn digit(&self, j: u64) -> bool {
        if j > self.exp {
            return false;
        }
        let shifted = self.num.shr_bits(self.exp - j);
        shifted.is_odd()
    }
}

impl<T: Natural> PartialOrd for Dyadic<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<T: Natural> Ord for Dyadic<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        let (a, b, _) = self.aligned(other);
        a.cmp(&b)
    }
}

impl<T: Natural> fmt::Display for Dyadic<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/2^{}", self.num, self.exp)
    }
}

impl<T: Natural> FromStr for Dyadic<T> {
    type Err = Error;

    /// Accepts `"k/2^s"` or any `"p/q"` whose denominator is a power of two.
    fn from_str(s: &str) -> Result<Self> {
        let bad = |reason: &str| Error::Parse {
            input: s.to_string(),
            reason: reason.to_string(),
        };
        if let Some((k, e)) = s.split_once("/2^") {
            let k: ExtRat<T> = k.trim().parse()?;
            let e: u64 = e.trim().parse().map_err(|_| bad("bad exponent"))?;
            if !k.is_integer() {
                return Err(bad("numerator must be an integer"));
            }
            return Ok(Self::new(k.num().clone(), e));
        }
        let x: ExtRat<T> = s.parse()?;
        Self::from_ext_rat(&x).ok_or_else(|| bad("denominator is not a power of two"))
    }
}

/// Tail of an eventually-constant binary expansion.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum BinaryTail {
    Zeros,
    Ones,
}

/// A binary expansion `0.b₁b₂⋯b_s` followed by a constant tail.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct BinaryWord {
    pub bits: Vec<bool>,
    pub tail: BinaryTail,
}

impl BinaryWord {
    /// Reads an infinite `{L, R}` code as binary, `R = 1`, `L = 0`.
    pub fn from_code(code: &InfiniteCode) -> Result<Self> {
        let tail = match code.tail {
            Tail::L => BinaryTail::Zeros,
            Tail::R => BinaryTail::Ones,
            Tail::Open => return Err(domain("binary reading (needs a closed code)", code)),
        };
        Ok(Self {
            bits: code.prefix.letters().iter().map(|&l| l == Letter::R).collect(),
            tail,
        })
    }

    /// Terminating expansion (tail of zeros) of a value in `[0, 1)`, or
    /// `0.111…` for 1.
    pub fn from_dyadic<T: Natural>(d: &Dyadic<T>) -> Self {
        if *d == Dyadic::one() {
            return Self {
                bits: Vec::new(),
                tail: BinaryTail::Ones,
            };
        }
        Self {
            bits: (1..=d.exp()).map(|j| d.digit(j)).collect(),
            tail: BinaryTail::Zeros,
        }
    }

    /// The other expansion of a nonzero dyadic: `…1000… → …0111…`.
    pub fn from_dyadic_ones<T: Natural>(d: &Dyadic<T>) -> Option<Self> {
        if d.is_zero() {
            return None;
        }
        let mut w = Self::from_dyadic(d);
        if w.tail == BinaryTail::Zeros {
            let last = w.bits.last_mut().expect("nonzero dyadic has a last 1");
            *last = false;
            w.tail = BinaryTail::Ones;
        }
        Some(w)
    }

    pub fn to_dyadic<T: Natural>(&self) -> Dyadic<T> {
        let s = self.bits.len() as u64;
        let mut num = T::zero();
        for &b in &self.bits {
            num = num.shl_bits(1) + if b { T::one() } else { T::zero() };
        }
        let d = Dyadic::new(num, s);
        match self.tail {
            BinaryTail::Zeros => d,
            // 0.b₁⋯b_s111… = 0.b₁⋯b_s + 2^{−s}
            BinaryTail::Ones => d.add(&Dyadic::new(T::one(), s)),
        }
    }

    /// Lengths of the maximal runs of the finite part, starting with a
    /// (possibly empty) run of zeros.
    fn runs(&self) -> Vec<u64> {
        let mut runs = vec![0u64];
        let mut current = false;
        for &b in &self.bits {
            if b != current {
                runs.push(0);
                current = b;
            }
            *runs.last_mut().unwrap() += 1;
        }
        runs
    }
}

impl fmt::Display for BinaryWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "0.")?;
        self.bits
            .iter()
            .try_for_each(|&b| write!(f, "{}", if b { '1' } else { '0' }))?;
        match self.tail {
            BinaryTail::Zeros => write!(f, "(0)"),
            BinaryTail::Ones => write!(f, "(1)"),
        }
    }
}

fn signed_power_sum<T: Natural>(exps: impl Iterator<Item = (bool, u64)>, top: u64) -> Dyadic<T> {
    // Σ ±2^{e} over 2^{top}; positives and negatives kept apart in naturals
    let (mut pos, mut neg) = (T::zero(), T::zero());
    for (positive, e) in exps {
        if positive {
            pos = pos + T::pow2(e);
        } else {
            neg = neg + T::pow2(e);
        }
    }
    Dyadic::new(pos - neg, top)
}

fn partial_sums<T: Natural>(terms: &[T]) -> Result<Vec<u64>> {
    let mut acc = 0u64;
    let mut out = Vec::with_capacity(terms.len());
    for a in terms {
        let a = a.to_u64().unwrap_or(u64::MAX);
        acc = acc.saturating_add(a);
        check_cap("binary exponent (depth)", acc, MAX_DYADIC_EXP)?;
        out.push(acc);
    }
    Ok(out)
}

/// `ρ(x)` on `[0, ∞]`: `ρ(0) = 0`, `ρ(∞) = 1`.
pub fn rho<T: Natural>(x: &ExtRat<T>) -> Result<Dyadic<T>> {
    if x.is_zero() {
        return Ok(Dyadic::zero());
    }
    if x.is_infinite() {
        return Ok(Dyadic::one());
    }
    let cf = ContFrac::from_rat(x)?;
    let s = partial_sums(cf.terms())?;
    let top = *s.last().expect("finite x has a₀");
    // 2^top − Σ (−1)^k 2^{top − s_k}; the leading 2^top is positive
    let terms = std::iter::once((true, top))
        .chain(s.iter().enumerate().map(|(k, &sk)| (k % 2 == 1, top - sk)));
    Ok(signed_power_sum(terms, top))
}

/// `?(x)` on `[0, 1]`.
pub fn qmark<T: Natural>(x: &ExtRat<T>) -> Result<Dyadic<T>> {
    if x.num() > x.den() {
        return Err(domain("qmark (needs x in [0,1])", x));
    }
    if x.is_zero() {
        return Ok(Dyadic::zero());
    }
    if x.is_one() {
        return Ok(Dyadic::one());
    }
    let cf = ContFrac::from_rat(x)?;
    let s = partial_sums(&cf.terms()[1..])?;
    let top = *s.last().expect("x in (0,1) has a₁");
    // 2 Σ_{k≥1} (−1)^{k+1} 2^{−t_k} = Σ ± 2^{top+1−t_k} / 2^top
    let terms = s
        .iter()
        .enumerate()
        .map(|(k, &tk)| (k % 2 == 0, top + 1 - tk));
    Ok(signed_power_sum(terms, top))
}

fn quotients_from_binary(w: &BinaryWord) -> Vec<u64> {
    let runs = w.runs();
    let mut terms = vec![0u64, runs[0] + 1];
    terms.extend_from_slice(&runs[1..]);
    terms
}

/// `?⁻¹(d)`: both binary expansions of `d` are decoded and must agree.
pub fn qmark_inv<T: Natural>(d: &Dyadic<T>) -> Result<ExtRat<T>> {
    if d.is_zero() {
        return Ok(ExtRat::zero());
    }
    if *d == Dyadic::one() {
        return Ok(ExtRat::one());
    }
    if *d > Dyadic::one() {
        return Err(domain("qmark_inv (needs d in [0,1])", d));
    }
    let decode = |w: &BinaryWord| -> Result<ExtRat<T>> {
        let terms: Vec<T> = quotients_from_binary(w).into_iter().map(nat).collect();
        Ok(ContFrac::new(terms)?.to_rat())
    };
    let zeros = decode(&BinaryWord::from_dyadic(d))?;
    let ones = decode(&BinaryWord::from_dyadic_ones(d).expect("d > 0"))?;
    assert_eq!(zeros, ones, "the two binary readings of {d} decode differently");
    Ok(zeros)
}

/// `ρ⁻¹(d) = φ⁻¹(?⁻¹(d))`, with `ρ⁻¹(1) = ∞`.
pub fn rho_inv<T: Natural>(d: &Dyadic<T>) -> Result<ExtRat<T>> {
    qmark_inv(d)?.phi_inv()
}

/// Monotone enclosure of `?(x)` (or `ρ(x)` when `extended`) over every `x`
/// whose continued fraction starts with `prefix` and continues further.
/// Such `x` lie between `[a₀; …, aₙ]` and `[a₀; …, aₙ+1]`.
pub fn enclosure<T: Natural>(prefix: &[T], extended: bool) -> Result<(Dyadic<T>, Dyadic<T>)> {
    if prefix.is_empty() {
        return Err(domain("enclosure (needs a nonempty prefix)", "[]"));
    }
    if prefix.iter().skip(1).any(|a| a.is_zero()) {
        return Err(Error::InvalidContinuedFraction(
            "partial quotients after a0 must be ≥ 1".into(),
        ));
    }
    if !extended && !prefix[0].is_zero() {
        return Err(domain(
            "qmark enclosure (a0 must be 0; use the extended function)",
            prefix[0].clone(),
        ));
    }
    let a = eval_terms(prefix);
    let mut bumped = prefix.to_vec();
    let n = bumped.len() - 1;
    bumped[n] = bumped[n].clone() + T::one();
    let b = eval_terms(&bumped);
    let f = |x: &ExtRat<T>| if extended { rho(x) } else { qmark(x) };
    let (fa, fb) = (f(&a)?, f(&b)?);
    Ok(if fa <= fb { (fa, fb) } else { (fb, fa) })
}

/// `#{y in levels 1..=k : y ≤ x} / 2^k` for the Stern-Brocot, Farey or dyadic
/// tree (plain and permuted levels hold the same sets).
pub fn distribution_estimate<T: Natural>(spec: TreeSpec, k: u32, x: &ExtRat<T>) -> Result<BigRational> {
    check_cap("tree level", u64::from(k), u64::from(DEFAULT_LEVEL_CAP))?;
    let total = BigInt::from(1u8) << k;
    let count: BigInt = match spec.kind {
        TreeKind::Dyadic => {
            // levels 1..=k are exactly j/2^k for 1 ≤ j < 2^k
            let j = if x.is_infinite() {
                total.clone()
            } else {
                let scaled = x.num().to_biguint() << k;
                BigInt::from(scaled / x.den().to_biguint())
            };
            j.min(total.clone() - 1u8)
        }
        TreeKind::SternBrocot | TreeKind::Farey => {
            let (mut lo, mut hi) = spec.kind.ancestors::<T>();
            let mut count = BigInt::zero();
            let mut remaining = k;
            while remaining > 0 {
                let node = lo.mediant(&hi);
                match x.cmp(&node) {
                    Ordering::Less => hi = node,
                    ord => {
                        // node plus its whole left subtree inside the levels
                        count += BigInt::from(1u8) << (remaining - 1);
                        if ord == Ordering::Equal {
                            break;
                        }
                        lo = node;
                    }
                }
                remaining -= 1;
            }
            count
        }
    };
    Ok(BigRational::new(count, total))
}

/// `e^{2πi n x}` for finite `x`, reducing `n·x` modulo 1 exactly first.
pub fn e_n<T: Natural, F: Float>(n: i64, x: &ExtRat<T>) -> Complex<F> {
    let (p, q) = (x.num().to_biguint(), x.den().to_biguint());
    let r = (num_bigint::BigUint::from(n.unsigned_abs()) * p) % &q;
    let phase = ratio_to_f64(&r, &q) * std::f64::consts::TAU;
    let phase = if n < 0 { -phase } else { phase };
    Complex::new(
        F::from(phase.cos()).expect("f64 converts"),
        F::from(phase.sin()).expect("f64 converts"),
    )
}

/// `2^{−k} Σ_{y in levels 1..=k} f(y)`. The normalisation is `2^k` even though
/// the levels hold `2^k − 1` points. Deterministic for any thread count.
pub fn stieltjes_mean<T, F, Fun>(spec: TreeSpec, k: u32, f: Fun) -> Result<Complex<F>>
where
    T: Natural,
    F: Float + Send + Sync,
    Fun: Fn(&ExtRat<T>) -> Complex<F> + Sync,
{
    check_cap("tree level", u64::from(k), u64::from(DEFAULT_LEVEL_CAP))?;
    let units: Vec<(u32, u64)> = (1..=k)
        .flat_map(|j| (0..level_size(j).div_ceil(LEVEL_CHUNK)).map(move |c| (j, c)))
        .collect();
    let partials: Vec<ComplexSum<F>> = units
        .par_iter()
        .map(|&(j, c)| {
            let r = c * LEVEL_CHUNK..((c + 1) * LEVEL_CHUNK).min(level_size(j));
            level_range::<T>(spec, j, r)
                .expect("range within level")
                .map(|y| f(&y))
                .sum()
        })
        .collect();
    let mut total = ComplexSum::new();
    partials.iter().for_each(|p| total.merge(p));
    let scale = F::from(2.0f64.powi(-(k as i32))).expect("f64 converts");
    Ok(total.value() * scale)
}

/// Tree estimate of the Fourier-Stieltjes coefficient `c_n` of `ρ` (Stern-
/// Brocot levels) or of `?` (Farey levels).
pub fn fourier_tree<T: Natural, F: Float + Send + Sync>(spec: TreeSpec, n: i64, k: u32) -> Result<Complex<F>> {
    stieltjes_mean::<T, F, _>(spec, k, |y| e_n(n, y))
}

#[cfg(test)]
mod tests {
    use super::*;

    type Q = ExtRat<u64>;
    type D = Dyadic<u64>;

    fn q(s: &str) -> Q {
        s.parse().unwrap()
    }

    fn d(s: &str) -> D {
        s.parse().unwrap()
    }

    #[test]
    fn rho_examples() {
        assert_eq!(rho(&q("1/3")).unwrap(), d("1/8"));
        assert_eq!(rho(&q("3")).unwrap(), d("7/8"));
        assert_eq!(rho(&q("2/3")).unwrap(), d("3/8"));
        assert_eq!(rho(&Q::zero()).unwrap(), D::zero());
        assert_eq!(rho(&Q::infinity()).unwrap(), D::one());
        assert_eq!(rho(&q("1")).unwrap(), d("1/2"));
    }

    #[test]
    fn qmark_examples() {
        assert_eq!(qmark(&q("1/2")).unwrap(), d("1/2"));
        assert_eq!(qmark(&q("2/5")).unwrap(), d("3/8"));
        assert_eq!(qmark(&q("2/3")).unwrap(), d("3/4"));
        assert_eq!(qmark(&q("1/3")).unwrap(), d("1/4"));
        assert!(qmark(&q("3/2")).is_err());
    }

    #[test]
    fn inverse_examples() {
        assert_eq!(qmark_inv(&d("1/4")).unwrap(), q("1/3"));
        assert_eq!(qmark_inv(&d("3/8")).unwrap(), q("2/5"));
        assert_eq!(qmark_inv(&D::one()).unwrap(), q("1"));
        assert_eq!(rho_inv(&D::one()).unwrap(), Q::infinity());
        assert_eq!(rho_inv(&d("7/8")).unwrap(), q("3"));
        assert!(qmark_inv(&d("3/2")).is_err());
    }

    #[test]
    fn enclosure_examples() {
        let (lo, hi) = enclosure(&[0u64, 1, 1, 1, 1, 1], false).unwrap();
        assert_eq!((lo.clone(), hi.clone()), (qmark(&q("8/13")).unwrap(), qmark(&q("5/8")).unwrap()));
        assert!(hi.checked_sub(&lo).unwrap() <= d("1/32"));
        // ?(golden mean − 1) = 2/3 lies strictly inside
        let two_thirds = BigRational::new(2.into(), 3.into());
        assert!(lo.to_big_rational() < two_thirds && two_thirds < hi.to_big_rational());
        assert_eq!(enclosure(&[0u64, 2], false).unwrap(), (d("1/4"), d("1/2")));
        assert_eq!(enclosure(&[3u64], true).unwrap(), (d("7/8"), d("15/16")));
        assert!(enclosure::<u64>(&[], false).is_err());
        assert!(enclosure(&[3u64], false).is_err());
    }

    #[test]
    fn distribution_examples() {
        let r = |a: i64, b: i64| BigRational::new(a.into(), b.into());
        assert_eq!(distribution_estimate(TreeSpec::SB, 2, &q("1")).unwrap(), r(2, 4));
        assert_eq!(distribution_estimate(TreeSpec::FAREY, 2, &q("1/2")).unwrap(), r(1, 2));
        assert_eq!(distribution_estimate(TreeSpec::SB, 7, &Q::zero()).unwrap(), r(0, 1));
        assert_eq!(distribution_estimate(TreeSpec::DYADIC, 3, &q("3/8")).unwrap(), r(3, 8));
    }

    #[test]
    fn stieltjes_of_one() {
        for k in [1u32, 5, 12] {
            let m: Complex<f64> = stieltjes_mean::<u64, f64, _>(TreeSpec::SB, k, |_| Complex::new(1.0, 0.0)).unwrap();
            let expect = (2f64.powi(k as i32) - 1.0) / 2f64.powi(k as i32);
            assert_eq!(m.re, expect);
            assert_eq!(m.im, 0.0);
        }
    }

    #[test]
    fn binary_words() {
        let w = BinaryWord::from_dyadic(&d("3/8"));
        assert_eq!(w.to_string(), "0.011(0)");
        let o = BinaryWord::from_dyadic_ones(&d("3/8")).unwrap();
        assert_eq!(o.to_string(), "0.010(1)");
        assert_eq!(o.to_dyadic::<u64>(), d("3/8"));
        assert_eq!(w.to_dyadic::<u64>(), d("3/8"));
    }

    #[test]
    fn dyadic_arithmetic() {
        assert_eq!(d("1/4").add(&d("1/4")), d("1/2"));
        assert_eq!(d("1/2").half(), d("1/4"));
        assert_eq!(d("3/8").one_minus().unwrap(), d("5/8"));
        assert!(d("1/4").checked_sub(&d("1/2")).is_none());
        assert_eq!(d("6/8").to_string(), "3/2^2");
        assert!("1/3".parse::<D>().is_err());
        assert_eq!(d("5/2^3"), d("5/8"));
    }
}
