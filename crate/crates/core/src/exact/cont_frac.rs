use std::fmt;
use std::str::FromStr;

use crate::error::{domain, Error, Result};
use crate::exact::ExtRat;
use crate::natural::Natural;

/// A canonical finite continued fraction `[a₀; a₁, …, aₙ]`.
///
/// `a₀ ≥ 0`, `aᵢ ≥ 1` for `i ≥ 1` and `aₙ > 1` whenever `n ≥ 1`. The empty
/// expansion stands for infinity.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct ContFrac<T> {
    terms: Vec<T>,
}

impl<T: Natural> ContFrac<T> {
    /// Validates and canonicalises: a trailing quotient 1 is folded into its
    /// predecessor, `[…, k, 1] → […, k+1]`.
    pub fn new(mut terms: Vec<T>) -> Result<Self> {
        if let Some(i) = terms.iter().skip(1).position(|a| a.is_zero()) {
            return Err(Error::InvalidContinuedFraction(format!(
                "partial quotient a{} is zero",
                i + 1
            )));
        }
        if terms.len() >= 2 && terms.last().is_some_and(|a| a.is_one()) {
            terms.pop();
            let last = terms.last_mut().expect("len ≥ 1 after pop");
            *last = last.clone() + T::one();
        }
        Ok(Self { terms })
    }

    pub fn infinity() -> Self {
        Self { terms: Vec::new() }
    }

    pub fn terms(&self) -> &[T] {
        &self.terms
    }

    pub fn into_terms(self) -> Vec<T> {
        self.terms
    }

    pub fn is_infinity(&self) -> bool {
        self.terms.is_empty()
    }

    /// The index `n` of the last partial quotient.
    pub fn last_index(&self) -> Option<usize> {
        self.terms.len().checked_sub(1)
    }

    /// Euclidean algorithm. Infinity has no expansion.
    pub fn from_rat(x: &ExtRat<T>) -> Result<Self> {
        if x.is_infinite() {
            return Err(Error::NoContinuedFraction(x.to_string()));
        }
        let (mut p, mut q) = (x.num().clone(), x.den().clone());
        let mut terms = Vec::new();
        while !q.is_zero() {
            let (a, r) = p.div_rem(&q);
            terms.push(a);
            p = q;
            q = r;
        }
        Ok(Self { terms })
    }

    /// Exact value; infinity for the empty expansion.
    pub fn to_rat(&self) -> ExtRat<T> {
        eval_terms(&self.terms)
    }

    /// `Σ aᵢ`, the Stern-Brocot depth of a positive value.
    pub fn quotient_sum(&self) -> T {
        self.terms.iter().fold(T::zero(), |s, a| s + a.clone())
    }

    /// Expansion of `1 − x` for `x ∈ (0, 1)`:
    /// `[0; 1+a₂, a₃, …]` if `a₁ = 1`, `[0; 1, a₁−1, a₂, …]` if `a₁ > 1`.
    pub fn complement(&self) -> Result<Self> {
        let t = &self.terms;
        if t.len() < 2 || !t[0].is_zero() {
            return Err(domain("complement_cf (needs x in (0,1))", self));
        }
        let mut out = vec![T::zero()];
        if t[1].is_one() {
            // canonical form guarantees a₂ exists here
            out.push(T::one() + t[2].clone());
            out.extend_from_slice(&t[3..]);
        } else {
            out.push(T::one());
            out.push(t[1].clone() - T::one());
            out.extend_from_slice(&t[2..]);
        }
        Self::new(out)
    }
}

/// Evaluates any (not necessarily canonical) expansion with `aᵢ ≥ 1` for
/// `i ≥ 1`.
pub fn eval_terms<T: Natural>(terms: &[T]) -> ExtRat<T> {
    // h/k convergent recurrence, seeded with h₋₁/k₋₁ = 1/0, h₋₂/k₋₂ = 0/1
    let (mut h1, mut h2) = (T::one(), T::zero());
    let (mut k1, mut k2) = (T::zero(), T::one());
    for a in terms {
        let h = a.clone() * h1.clone() + h2;
        let k = a.clone() * k1.clone() + k2;
        h2 = h1;
        k2 = k1;
        h1 = h;
        k1 = k;
    }
    ExtRat::from_coprime(h1, k1)
}

/// Parses `"[a0;a1,...,an]"` (also `"[a0]"` and `"[]"`) without
/// canonicalising.
pub fn parse_terms<T: Natural>(s: &str) -> Result<Vec<T>> {
    let bad = |reason: &str| Error::Parse {
        input: s.to_string(),
        reason: reason.to_string(),
    };
    let inner = s
        .trim()
        .strip_prefix('[')
        .and_then(|r| r.strip_suffix(']'))
        .ok_or_else(|| bad("expected [a0;a1,...,an]"))?
        .trim();
    if inner.is_empty() {
        return Ok(Vec::new());
    }
    let (head, tail) = match inner.split_once(';') {
        Some((h, t)) => (h, Some(t)),
        None => (inner, None),
    };
    let parse_one = |t: &str| -> Result<T> {
        let v: ExtRat<T> = t.trim().parse().map_err(|_| bad("bad partial quotient"))?;
        if !v.is_integer() {
            return Err(bad("partial quotients are integers"));
        }
        Ok(v.num().clone())
    };
    let mut terms = vec![parse_one(head)?];
    if let Some(tail) = tail {
        for part in tail.split(',') {
            let a = parse_one(part)?;
            if a.is_zero() {
                return Err(bad("a_i must be ≥ 1 for i ≥ 1"));
            }
            terms.push(a);
        }
    }
    Ok(terms)
}

impl<T: Natural> fmt::Display for ContFrac<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_terms(f, &self.terms)
    }
}

pub(crate) fn write_terms<T: fmt::Display>(f: &mut impl fmt::Write, terms: &[T]) -> fmt::Result {
    write!(f, "[")?;
    for (i, a) in terms.iter().enumerate() {
        match i {
            0 => write!(f, "{a}")?,
            1 => write!(f, ";{a}")?,
            _ => write!(f, ",{a}")?,
        }
    }
    write!(f, "]")
}

impl<T: Natural> FromStr for ContFrac<T> {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::new(parse_terms(s)?)
    }
}

impl<T: Natural> ExtRat<T> {
    /// Level of `x` in the Stern-Brocot tree, `Σ aᵢ`. The ancestors `0/1` and
    /// `1/0` are not tree vertices and yield [`Error::Ancestor`]; see
    /// [`ancestor_depth`](Self::ancestor_depth) for the zero convention.
    pub fn depth(&self) -> Result<T> {
        if !self.is_positive_finite() {
            return Err(Error::Ancestor(self.to_string()));
        }
        Ok(ContFrac::from_rat(self)?.quotient_sum())
    }

    /// Depth with the ancestor convention `depth(0/1) = depth(1/0) = 0`.
    pub fn ancestor_depth(&self) -> T {
        self.depth().unwrap_or_else(|_| T::zero())
    }

    /// Level of `x ∈ (0, 1)` in the Farey tree (`rank(1/2) = 1`). The
    /// endpoints `0` and `1` are ancestors and get rank 0.
    pub fn rank(&self) -> Result<T> {
        if self.num() > self.den() {
            return Err(domain("rank (needs x in [0,1])", self));
        }
        if self.is_zero() || self.is_one() {
            return Ok(T::zero());
        }
        Ok(self.depth()? - T::one())
    }

    /// Right-hand side of `depth(x) = ⌊x⌋ + rank({x}) + 1`, with integers
    /// written as `(n−1) + 1` so the fractional part lies in `(0, 1]`.
    pub fn depth_from_rank(&self) -> Result<T> {
        if !self.is_positive_finite() {
            return Err(Error::Ancestor(self.to_string()));
        }
        let (int, frac) = if self.is_integer() {
            (self.num().clone() - T::one(), Self::one())
        } else {
            (self.floor()?, self.fract()?)
        };
        Ok(int + frac.rank()? + T::one())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    type Q = ExtRat<u64>;
    type Cf = ContFrac<u64>;

    fn q(s: &str) -> Q {
        s.parse().unwrap()
    }

    fn cf(s: &str) -> Cf {
        s.parse().unwrap()
    }

    #[test]
    fn euclid_examples() {
        assert_eq!(Cf::from_rat(&q("3/5")).unwrap().terms(), &[0, 1, 1, 2]);
        assert_eq!(Cf::from_rat(&q("7/3")).unwrap().terms(), &[2, 3]);
        assert_eq!(Cf::from_rat(&q("0/1")).unwrap().terms(), &[0]);
        assert!(matches!(
            Cf::from_rat(&Q::infinity()),
            Err(Error::NoContinuedFraction(_))
        ));
    }

    #[test]
    fn evaluation_examples() {
        assert_eq!(cf("[0;1,1,2]").to_rat(), q("3/5"));
        assert_eq!(cf("[0;1]").to_rat(), q("1/1"));
        assert_eq!(cf("[0;1]").terms(), &[1]);
        assert_eq!(cf("[2;3]").to_rat(), q("7/3"));
        assert_eq!(Cf::infinity().to_rat(), Q::infinity());
    }

    #[test]
    fn depth_and_rank_examples() {
        assert_eq!(q("1/1").depth().unwrap(), 1);
        assert_eq!(q("3/5").depth().unwrap(), 4);
        assert_eq!(q("7/3").depth().unwrap(), 5);
        assert_eq!(q("1/3").rank().unwrap(), 2);
        assert_eq!(q("1/2").rank().unwrap(), 1);
        assert_eq!(q("7/3").depth_from_rank().unwrap(), 5);
        assert_eq!(q("4/1").depth_from_rank().unwrap(), 4);
        assert!(matches!(Q::zero().depth(), Err(Error::Ancestor(_))));
        assert_eq!(Q::infinity().ancestor_depth(), 0);
    }

    #[test]
    fn complement_examples() {
        assert_eq!(cf("[0;1,2]").complement().unwrap(), cf("[0;3]"));
        assert_eq!(cf("[0;3]").complement().unwrap(), cf("[0;1,2]"));
        assert_eq!(cf("[0;2,2]").complement().unwrap(), cf("[0;1,1,2]"));
        assert_eq!(cf("[0;2]").complement().unwrap(), cf("[0;2]"));
        assert!(cf("[1]").complement().is_err());
        assert!(cf("[0]").complement().is_err());
    }

    #[test]
    fn rejects_zero_quotients() {
        assert!(Cf::new(vec![1, 0, 2]).is_err());
        assert!("[0;0]".parse::<Cf>().is_err());
    }

    #[test]
    fn display_round_trip() {
        for s in ["[0;1,1,2]", "[2;3]", "[0]", "[]"] {
            assert_eq!(cf(s).to_string(), s);
        }
    }
}
