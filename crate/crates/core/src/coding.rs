//! `{L, R}` words, the `SL(2, Z)` matrix coding of the positive rationals,
//! the infinite coding `π`, and the word-reversal permutation `x ↦ x̂`.
//!
//! A positive rational `x` is identified with the matrix `(p' p; q' q)` whose
//! columns are its right and left Stern-Brocot parents. Right-multiplying by
//! `L = (1 0; 1 1)` or `R = (1 1; 0 1)` moves to the left or right child, so
//! the path from the root `1/1` to `x` is a word `M₁⋯M_{depth−1}`.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;

use crate::error::{check_cap, domain, Error, Result};
use crate::exact::{ContFrac, ExtRat};
use crate::natural::Natural;

/// Longest word (or infinite-code prefix) this module will materialise.
pub const MAX_WORD_LEN: u64 = 1 << 26;

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Letter {
    L,
    R,
}

impl Letter {
    pub fn flip(self) -> Self {
        match self {
            Letter::L => Letter::R,
            Letter::R => Letter::L,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Letter::L => 'L',
            Letter::R => 'R',
        }
    }
}

/// A finite word over `{L, R}`.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct LrWord(pub Vec<Letter>);

impl LrWord {
    pub fn empty() -> Self {
        Self(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn push(&mut self, l: Letter) {
        self.0.push(l);
    }

    pub fn reversed(&self) -> Self {
        Self(self.0.iter().rev().copied().collect())
    }

    /// Swaps every `L ↔ R`; codes the reciprocal.
    pub fn swapped(&self) -> Self {
        Self(self.0.iter().map(|l| l.flip()).collect())
    }

    pub fn is_palindrome(&self) -> bool {
        self.0.iter().eq(self.0.iter().rev())
    }

    pub fn matrix<T: Natural>(&self) -> Mat2<T> {
        matrix_from_word(self)
    }
}

impl fmt::Display for LrWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.iter().try_for_each(|l| write!(f, "{}", l.as_char()))
    }
}

impl FromStr for LrWord {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .map(|c| match c {
                'L' => Ok(Letter::L),
                'R' => Ok(Letter::R),
                _ => Err(Error::Parse {
                    input: s.to_string(),
                    reason: "words use only L and R".into(),
                }),
            })
            .collect::<Result<Vec<_>>>()
            .map(LrWord)
    }
}

/// A 2×2 matrix of naturals, row-major `(m11 m12; m21 m22)`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Mat2<T> {
    pub m11: T,
    pub m12: T,
    pub m21: T,
    pub m22: T,
}

impl<T: Natural> Mat2<T> {
    pub fn new(m11: T, m12: T, m21: T, m22: T) -> Self {
        Self { m11, m12, m21, m22 }
    }

    pub fn identity() -> Self {
        Self::new(T::one(), T::zero(), T::zero(), T::one())
    }

    /// `L^k = (1 0; k 1)`.
    pub fn l_pow(k: T) -> Self {
        Self::new(T::one(), T::zero(), k, T::one())
    }

    /// `R^k = (1 k; 0 1)`.
    pub fn r_pow(k: T) -> Self {
        Self::new(T::one(), k, T::zero(), T::one())
    }

    pub fn letter(l: Letter) -> Self {
        Self::letter_pow(l, T::one())
    }

    pub fn letter_pow(l: Letter, k: T) -> Self {
        match l {
            Letter::L => Self::l_pow(k),
            Letter::R => Self::r_pow(k),
        }
    }

    /// `U = (0 1; 1 0)`.
    pub fn u() -> Self {
        Self::new(T::zero(), T::one(), T::one(), T::zero())
    }

    pub fn mul(&self, o: &Self) -> Self {
        Self::new(
            self.m11.clone() * o.m11.clone() + self.m12.clone() * o.m21.clone(),
            self.m11.clone() * o.m12.clone() + self.m12.clone() * o.m22.clone(),
            self.m21.clone() * o.m11.clone() + self.m22.clone() * o.m21.clone(),
            self.m21.clone() * o.m12.clone() + self.m22.clone() * o.m22.clone(),
        )
    }

    /// Right-multiplication by a single letter, in place.
    pub fn push_letter(&mut self, l: Letter) {
        match l {
            // (a b; c d)·L = (a+b b; c+d d)
            Letter::L => {
                self.m11 = self.m11.clone() + self.m12.clone();
                self.m21 = self.m21.clone() + self.m22.clone();
            }
            // (a b; c d)·R = (a a+b; c c+d)
            Letter::R => {
                self.m12 = self.m12.clone() + self.m11.clone();
                self.m22 = self.m22.clone() + self.m21.clone();
            }
        }
    }

    /// Left-multiplication by a single letter, in place.
    pub fn prepend_letter(&mut self, l: Letter) {
        match l {
            // L·(a b; c d) = (a b; a+c b+d)
            Letter::L => {
                self.m21 = self.m21.clone() + self.m11.clone();
                self.m22 = self.m22.clone() + self.m12.clone();
            }
            // R·(a b; c d) = (a+c b+d; c d)
            Letter::R => {
                self.m11 = self.m11.clone() + self.m21.clone();
                self.m12 = self.m12.clone() + self.m22.clone();
            }
        }
    }

    pub fn det(&self) -> BigInt {
        BigInt::from((self.m11.clone() * self.m22.clone()).to_biguint())
            - BigInt::from((self.m12.clone() * self.m21.clone()).to_biguint())
    }

    /// `U·M·U`, which codes `1/x` when `M` codes `x`.
    pub fn conjugate_by_u(&self) -> Self {
        Self::new(
            self.m22.clone(),
            self.m21.clone(),
            self.m12.clone(),
            self.m11.clone(),
        )
    }

    /// Right parent `p'/q'` (left column).
    pub fn right_parent(&self) -> ExtRat<T> {
        ExtRat::from_coprime(self.m11.clone(), self.m21.clone())
    }

    /// Left parent `p/q` (right column).
    pub fn left_parent(&self) -> ExtRat<T> {
        ExtRat::from_coprime(self.m12.clone(), self.m22.clone())
    }

    /// Mediant of the columns without the unimodularity check; for matrices
    /// known to be products of `L` and `R`.
    pub fn value_unchecked(&self) -> ExtRat<T> {
        ExtRat::from_coprime(
            self.m11.clone() + self.m12.clone(),
            self.m21.clone() + self.m22.clone(),
        )
    }
}

impl<T: Natural> fmt::Display for Mat2<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({} {}; {} {})", self.m11, self.m12, self.m21, self.m22)
    }
}

/// Product of the generators along `w`.
pub fn matrix_from_word<T: Natural>(w: &LrWord) -> Mat2<T> {
    let mut m = Mat2::identity();
    for &l in w.letters() {
        m.push_letter(l);
    }
    m
}

/// The fraction a unimodular matrix represents: the mediant of its columns.
pub fn rat_from_matrix<T: Natural>(m: &Mat2<T>) -> Result<ExtRat<T>> {
    if m.det() != BigInt::from(1) {
        return Err(Error::NotUnimodular(m.to_string()));
    }
    Ok(m.value_unchecked())
}

/// Run-length form of the word of `x = [a₀; a₁, …, aₙ]`:
/// `R^{a₀} L^{a₁} ⋯` with the last exponent lowered by one. Empty runs are
/// dropped.
pub fn runs_from_cf<T: Natural>(cf: &ContFrac<T>) -> Result<Vec<(Letter, T)>> {
    let value = cf.to_rat();
    if !value.is_positive_finite() {
        return Err(domain("the {L,R} coding (needs x in Q+)", value));
    }
    let terms = cf.terms();
    let n = terms.len() - 1;
    let mut runs = Vec::with_capacity(terms.len());
    for (i, a) in terms.iter().enumerate() {
        let letter = if i % 2 == 0 { Letter::R } else { Letter::L };
        let exp = if i == n { a.clone() - T::one() } else { a.clone() };
        if !exp.is_zero() {
            runs.push((letter, exp));
        }
    }
    Ok(runs)
}

/// Inverse of [`runs_from_cf`]: the value coded by a run-length word
/// (adjacent runs of the same letter are allowed).
pub fn rat_from_runs<T: Natural>(runs: &[(Letter, T)]) -> ExtRat<T> {
    let mut m = Mat2::identity();
    for (l, k) in runs {
        m = m.mul(&Mat2::letter_pow(*l, k.clone()));
    }
    m.value_unchecked()
}

fn expand_runs<T: Natural>(runs: &[(Letter, T)], extra: u64) -> Result<LrWord> {
    let total = runs
        .iter()
        .try_fold(0u64, |s, (_, k)| k.to_u64().and_then(|k| s.checked_add(k)))
        .unwrap_or(u64::MAX);
    check_cap("word length", total.saturating_add(extra), MAX_WORD_LEN)?;
    let mut w = Vec::with_capacity((total + extra) as usize);
    for (l, k) in runs {
        let k = k.to_u64().expect("checked against the cap");
        w.extend(std::iter::repeat_n(*l, k as usize));
    }
    Ok(LrWord(w))
}

/// The word `X = R^{a₀}L^{a₁}⋯` coding `x` (empty for `x = 1`).
pub fn word_from_cf<T: Natural>(cf: &ContFrac<T>) -> Result<LrWord> {
    expand_runs(&runs_from_cf(cf)?, 0)
}

pub fn word_of<T: Natural>(x: &ExtRat<T>) -> Result<LrWord> {
    word_from_cf(&ContFrac::from_rat(x).map_err(|_| domain("the {L,R} coding", x))?)
}

/// The matrix of `x` built from its runs, without expanding the word.
pub fn matrix_of<T: Natural>(x: &ExtRat<T>) -> Result<Mat2<T>> {
    let cf = ContFrac::from_rat(x).map_err(|_| domain("the {L,R} coding", x))?;
    let mut m = Mat2::identity();
    for (l, k) in runs_from_cf(&cf)? {
        m = m.mul(&Mat2::letter_pow(l, k));
    }
    Ok(m)
}

/// `(left parent, right parent)` with `x` their mediant and `q·p' − p·q' = 1`.
/// The root `1/1` has the ancestors `(0/1, 1/0)`.
pub fn parents<T: Natural>(x: &ExtRat<T>) -> Result<(ExtRat<T>, ExtRat<T>)> {
    let m = matrix_of(x)?;
    Ok((m.left_parent(), m.right_parent()))
}

/// `x̂`: the value of the reversed word. Depth-preserving involution on `Q⁺`.
pub fn hat<T: Natural>(x: &ExtRat<T>) -> Result<ExtRat<T>> {
    let cf = ContFrac::from_rat(x).map_err(|_| domain("hat (needs x in Q+)", x))?;
    let mut runs = runs_from_cf(&cf)?;
    runs.reverse();
    Ok(rat_from_runs(&runs))
}

/// `1/x` through the coding: swap every letter of the word.
pub fn reciprocal_code<T: Natural>(x: &ExtRat<T>) -> Result<ExtRat<T>> {
    let cf = ContFrac::from_rat(x).map_err(|_| domain("reciprocal_code", x))?;
    let runs: Vec<_> = runs_from_cf(&cf)?
        .into_iter()
        .map(|(l, k)| (l.flip(), k))
        .collect();
    Ok(rat_from_runs(&runs))
}

/// Continued fractions of the left and right children of `x` in the
/// Stern-Brocot tree. For `n` even the left child is `[a₀; …, aₙ−1, 2]` and
/// the right `[a₀; …, aₙ+1]`; for `n` odd the two are interchanged.
pub fn children_cf<T: Natural>(cf: &ContFrac<T>) -> Result<(ContFrac<T>, ContFrac<T>)> {
    let x = cf.to_rat();
    if !x.is_positive_finite() {
        return Err(domain("children_cf (needs x in Q+)", x));
    }
    let terms = cf.terms();
    let n = terms.len() - 1;
    let mut split = terms.to_vec();
    split[n] = split[n].clone() - T::one();
    split.push(T::one() + T::one());
    let mut bump = terms.to_vec();
    bump[n] = bump[n].clone() + T::one();
    let (split, bump) = (ContFrac::new(split)?, ContFrac::new(bump)?);
    Ok(if n % 2 == 0 { (split, bump) } else { (bump, split) })
}

/// Eventually-constant tail of an infinite code.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum Tail {
    /// `L^∞`
    L,
    /// `R^∞`
    R,
    /// Unknown continuation: a truncated code of an irrational.
    Open,
}

/// A semi-infinite `{L, R}` sequence: a finite prefix followed by a tail.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct InfiniteCode {
    pub prefix: LrWord,
    pub tail: Tail,
}

impl InfiniteCode {
    /// Letter at position `i`, `None` past the prefix of an open code.
    pub fn letter(&self, i: usize) -> Option<Letter> {
        self.prefix.0.get(i).copied().or(match self.tail {
            Tail::L => Some(Letter::L),
            Tail::R => Some(Letter::R),
            Tail::Open => None,
        })
    }
}

impl fmt::Display for InfiniteCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.prefix)?;
        match self.tail {
            Tail::L => write!(f, "(L)^inf"),
            Tail::R => write!(f, "(R)^inf"),
            Tail::Open => write!(f, "..."),
        }
    }
}

/// `π(x)`: `L^∞` for 0, `R^∞` for ∞, and for `x = [a₀; …, aₙ]` the word
/// `R^{a₀}L^{a₁}⋯` with full last run followed by the opposite letter forever
/// (`L^∞` after an `R` run when `n` is even, `R^∞` when `n` is odd).
pub fn pi_code<T: Natural>(x: &ExtRat<T>) -> Result<InfiniteCode> {
    if x.is_zero() {
        return Ok(InfiniteCode {
            prefix: LrWord::empty(),
            tail: Tail::L,
        });
    }
    if x.is_infinite() {
        return Ok(InfiniteCode {
            prefix: LrWord::empty(),
            tail: Tail::R,
        });
    }
    let cf = ContFrac::from_rat(x)?;
    let mut runs = runs_from_cf(&cf)?;
    let n = cf.terms().len() - 1;
    let last = if n % 2 == 0 { Letter::R } else { Letter::L };
    // restore the full last exponent aₙ
    match runs.last_mut() {
        Some((l, k)) if *l == last => *k = k.clone() + T::one(),
        _ => runs.push((last, T::one())),
    }
    Ok(InfiniteCode {
        prefix: expand_runs(&runs, 0)?,
        tail: match last {
            Letter::R => Tail::L,
            Letter::L => Tail::R,
        },
    })
}

/// Truncated code `R^{a₀}L^{a₁}R^{a₂}⋯` of an irrational known only through
/// a prefix of its continued fraction.
pub fn pi_code_prefix<T: Natural>(terms: &[T]) -> Result<InfiniteCode> {
    if let Some(i) = terms.iter().skip(1).position(|a| a.is_zero()) {
        return Err(Error::InvalidContinuedFraction(format!(
            "partial quotient a{} is zero",
            i + 1
        )));
    }
    let runs: Vec<_> = terms
        .iter()
        .enumerate()
        .map(|(i, a)| (if i % 2 == 0 { Letter::R } else { Letter::L }, a.clone()))
        .collect();
    Ok(InfiniteCode {
        prefix: expand_runs(&runs, 0)?,
        tail: Tail::Open,
    })
}

/// Result of comparing two infinite codes lexicographically (`L < R`).
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum CodeOrdering {
    Known(Ordering),
    /// The known prefixes agree and at least one code is open there.
    Unknown,
}

pub fn code_compare(a: &InfiniteCode, b: &InfiniteCode) -> CodeOrdering {
    let horizon = a.prefix.len().max(b.prefix.len());
    for i in 0..=horizon {
        match (a.letter(i), b.letter(i)) {
            (Some(x), Some(y)) if x != y => return CodeOrdering::Known(x.cmp(&y)),
            (Some(_), Some(_)) => {}
            _ => return CodeOrdering::Unknown,
        }
    }
    // both past their prefixes and equal at `horizon`: the tails coincide
    CodeOrdering::Known(Ordering::Equal)
}

#[cfg(test)]
mod tests {
    use super::*;

    type Q = ExtRat<u64>;

    fn q(s: &str) -> Q {
        s.parse().unwrap()
    }

    fn cf(s: &str) -> ContFrac<u64> {
        s.parse().unwrap()
    }

    fn w(s: &str) -> LrWord {
        s.parse().unwrap()
    }

    #[test]
    fn words_from_continued_fractions() {
        assert_eq!(word_from_cf(&cf("[1]")).unwrap(), LrWord::empty());
        assert_eq!(word_from_cf(&cf("[0;2,2]")).unwrap(), w("LLR"));
        assert_eq!(word_from_cf(&cf("[0;1,1,2]")).unwrap(), w("LRL"));
        assert!(word_from_cf(&cf("[0]")).is_err());
        assert!(word_from_cf(&ContFrac::<u64>::infinity()).is_err());
    }

    #[test]
    fn generator_powers() {
        let m: Mat2<u64> = matrix_from_word(&w("LL"));
        assert_eq!(m, Mat2::new(1, 0, 2, 1));
        assert_eq!(rat_from_matrix(&m).unwrap(), q("1/3"));
        let m: Mat2<u64> = matrix_from_word(&w("RRR"));
        assert_eq!(m, Mat2::new(1, 3, 0, 1));
        assert_eq!(rat_from_matrix(&m).unwrap(), q("4/1"));
        let m: Mat2<u64> = matrix_from_word(&w("LRL"));
        assert_eq!(m, Mat2::new(2, 1, 3, 2));
        assert_eq!(rat_from_matrix(&m).unwrap(), q("3/5"));
        assert!(rat_from_matrix(&Mat2::<u64>::new(2, 1, 1, 2)).is_err());
    }

    #[test]
    fn parents_examples() {
        assert_eq!(parents(&q("3/5")).unwrap(), (q("1/2"), q("2/3")));
        assert_eq!(parents(&q("1/1")).unwrap(), (q("0/1"), q("1/0")));
        assert_eq!(parents(&q("4/1")).unwrap(), (q("3/1"), q("1/0")));
        assert!(parents(&Q::zero()).is_err());
        assert!(parents(&Q::infinity()).is_err());
    }

    #[test]
    fn reciprocal_examples() {
        assert_eq!(w("LLR").swapped(), w("RRL"));
        assert_eq!(reciprocal_code(&q("2/5")).unwrap(), q("5/2"));
        assert_eq!(reciprocal_code(&q("1/1")).unwrap(), q("1/1"));
        assert_eq!(reciprocal_code(&q("3/1")).unwrap(), q("1/3"));
        let m: Mat2<u64> = matrix_from_word(&w("LLR"));
        assert_eq!(rat_from_matrix(&m.conjugate_by_u()).unwrap(), q("5/2"));
        let u = Mat2::<u64>::u();
        assert_eq!(u.mul(&m).mul(&u), m.conjugate_by_u());
    }

    #[test]
    fn hat_examples() {
        assert_eq!(hat(&q("2/5")).unwrap(), q("4/3"));
        assert_eq!(hat(&q("3/5")).unwrap(), q("3/5"));
        assert_eq!(hat(&q("1/2")).unwrap(), q("1/2"));
        assert_eq!(hat(&q("1/1")).unwrap(), q("1/1"));
        assert!(hat(&Q::zero()).is_err());
    }

    #[test]
    fn children_examples() {
        let (l, r) = children_cf(&cf("[0;2]")).unwrap();
        assert_eq!((l.to_rat(), r.to_rat()), (q("1/3"), q("2/3")));
        assert_eq!((l, r), (cf("[0;3]"), cf("[0;1,2]")));
        let (l, r) = children_cf(&cf("[1]")).unwrap();
        assert_eq!((l, r), (cf("[0;2]"), cf("[2]")));
        let (l, r) = children_cf(&cf("[0;1,2]")).unwrap();
        assert_eq!((l, r), (cf("[0;1,1,2]"), cf("[0;1,3]")));
    }

    #[test]
    fn pi_examples() {
        assert_eq!(pi_code(&q("1/2")).unwrap().to_string(), "LL(R)^inf");
        assert_eq!(pi_code(&q("1/1")).unwrap().to_string(), "R(L)^inf");
        assert_eq!(pi_code(&Q::zero()).unwrap().to_string(), "(L)^inf");
        assert_eq!(pi_code(&Q::infinity()).unwrap().to_string(), "(R)^inf");
        assert_eq!(pi_code(&q("2/3")).unwrap().to_string(), "LRR(L)^inf");
        assert_eq!(pi_code(&q("1/3")).unwrap().to_string(), "LLL(R)^inf");
    }

    #[test]
    fn compare_examples() {
        let a = pi_code(&q("2/3")).unwrap();
        let b = pi_code(&q("1/3")).unwrap();
        assert_eq!(code_compare(&a, &b), CodeOrdering::Known(Ordering::Greater));
        assert_eq!(code_compare(&a, &a), CodeOrdering::Known(Ordering::Equal));
        let inf = pi_code(&Q::infinity()).unwrap();
        let big = pi_code(&q("1000/1")).unwrap();
        assert_eq!(code_compare(&inf, &big), CodeOrdering::Known(Ordering::Greater));
        // golden mean prefix vs its own longer prefix: undecidable
        let g1 = pi_code_prefix(&[1u64, 1, 1]).unwrap();
        let g2 = pi_code_prefix(&[1u64, 1, 1, 1]).unwrap();
        assert_eq!(code_compare(&g1, &g2), CodeOrdering::Unknown);
        // but 3/2 and the prefix [1;1,1,...] differ at letter 4
        assert_eq!(
            code_compare(&pi_code(&q("3/2")).unwrap(), &g2),
            CodeOrdering::Known(Ordering::Less)
        );
    }
}
