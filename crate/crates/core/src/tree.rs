//! Level-by-level generation of the six trees: Stern-Brocot, Farey and
//! dyadic, each in plain and permuted (word-reversed) form.
//!
//! Levels are 1-indexed with the root at level 1, so level `k` has
//! `2^(k−1)` entries. Entry `i` of level `k` sits at the end of the path whose
//! `k−1` letters are the binary digits of `i` (most significant first,
//! `0 = L`). The generator walks those paths with a stack of prefix matrices
//! and never holds more than one path in memory; any index range can be
//! generated independently, which is what the parallel helpers use.

use std::fmt;
use std::ops::Range;
use std::str::FromStr;

use rayon::prelude::*;

use crate::coding::{Letter, Mat2};
use crate::error::{check_cap, domain, Error, Result};
use crate::exact::ExtRat;
use crate::natural::{nat, Natural};

pub const DEFAULT_LEVEL_CAP: u32 = 24;

/// Entries per parallel work unit; fixed so chunking never depends on the
/// thread count.
pub const LEVEL_CHUNK: u64 = 1 << 14;

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum TreeKind {
    SternBrocot,
    Farey,
    Dyadic,
}

impl TreeKind {
    pub fn name(self) -> &'static str {
        match self {
            TreeKind::SternBrocot => "Stern-Brocot",
            TreeKind::Farey => "Farey",
            TreeKind::Dyadic => "dyadic",
        }
    }

    /// `(left ancestor, right ancestor)`.
    pub fn ancestors<T: Natural>(self) -> (ExtRat<T>, ExtRat<T>) {
        match self {
            TreeKind::SternBrocot => (ExtRat::zero(), ExtRat::infinity()),
            TreeKind::Farey | TreeKind::Dyadic => (ExtRat::zero(), ExtRat::one()),
        }
    }

    pub fn root<T: Natural>(self) -> ExtRat<T> {
        match self {
            TreeKind::SternBrocot => ExtRat::one(),
            TreeKind::Farey | TreeKind::Dyadic => ExtRat::from_coprime(T::one(), nat(2)),
        }
    }
}

impl FromStr for TreeKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "sb" | "stern-brocot" | "t" => Ok(TreeKind::SternBrocot),
            "farey" | "f" => Ok(TreeKind::Farey),
            "dyadic" | "d" => Ok(TreeKind::Dyadic),
            _ => Err(Error::Parse {
                input: s.into(),
                reason: "tree kind is one of sb, farey, dyadic".into(),
            }),
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct TreeSpec {
    pub kind: TreeKind,
    pub permuted: bool,
}

impl TreeSpec {
    pub const fn new(kind: TreeKind, permuted: bool) -> Self {
        Self { kind, permuted }
    }

    pub const SB: Self = Self::new(TreeKind::SternBrocot, false);
    pub const SB_HAT: Self = Self::new(TreeKind::SternBrocot, true);
    pub const FAREY: Self = Self::new(TreeKind::Farey, false);
    pub const FAREY_HAT: Self = Self::new(TreeKind::Farey, true);
    pub const DYADIC: Self = Self::new(TreeKind::Dyadic, false);
    pub const DYADIC_HAT: Self = Self::new(TreeKind::Dyadic, true);

    pub const ALL: [Self; 6] = [
        Self::SB,
        Self::FAREY,
        Self::DYADIC,
        Self::SB_HAT,
        Self::FAREY_HAT,
        Self::DYADIC_HAT,
    ];

    pub fn is_vertex<T: Natural>(&self, x: &ExtRat<T>) -> bool {
        match self.kind {
            TreeKind::SternBrocot => x.is_positive_finite(),
            TreeKind::Farey => x.is_positive_finite() && x.num() < x.den(),
            TreeKind::Dyadic => {
                x.is_positive_finite()
                    && x.num() < x.den()
                    && x.den().trailing_zero_bits() == Some(x.den().bit_len() - 1)
            }
        }
    }
}

impl fmt::Display for TreeSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}{}",
            if self.permuted { "permuted " } else { "" },
            self.kind.name()
        )
    }
}

/// Streaming iterator over a contiguous index range of one level.
pub struct LevelIter<T> {
    spec: TreeSpec,
    k: u32,
    next: u64,
    end: u64,
    // prefix[j] is the product of the first j letters of the current path
    prefix: Vec<Mat2<T>>,
    primed: bool,
}

impl<T: Natural> LevelIter<T> {
    fn new(spec: TreeSpec, k: u32, range: Range<u64>) -> Self {
        Self {
            spec,
            k,
            next: range.start,
            end: range.end,
            prefix: Vec::with_capacity(k as usize),
            primed: false,
        }
    }

    fn letter(&self, i: u64, j: u32) -> Letter {
        // letter j (0-based) is bit (k−2−j) of i
        if (i >> (self.k - 2 - j)) & 1 == 1 {
            Letter::R
        } else {
            Letter::L
        }
    }

    fn extend_from(&mut self, i: u64, from: u32) {
        self.prefix.truncate(from as usize + 1);
        for j in from..self.k - 1 {
            let mut m = self.prefix[j as usize].clone();
            let l = self.letter(i, j);
            if self.spec.permuted {
                m.prepend_letter(l);
            } else {
                m.push_letter(l);
            }
            self.prefix.push(m);
        }
    }

    fn matrix_entry(&mut self, i: u64) -> ExtRat<T> {
        if !self.primed {
            self.prefix.clear();
            self.prefix.push(Mat2::identity());
            self.extend_from(i, 0);
            self.primed = true;
        } else {
            // only the letters below the highest flipped bit change
            let flipped = 64 - ((i - 1) ^ i).leading_zeros();
            let from = (self.k - 1).saturating_sub(flipped);
            self.extend_from(i, from);
        }
        self.prefix[self.k as usize - 1].value_unchecked()
    }

    fn entry(&mut self, i: u64) -> ExtRat<T> {
        let k = u64::from(self.k);
        match (self.spec.kind, self.spec.permuted) {
            (TreeKind::Dyadic, false) => {
                ExtRat::from_coprime(nat::<T>(2 * i + 1), T::pow2(k))
            }
            (TreeKind::Dyadic, true) => {
                let rev = if k == 1 {
                    0
                } else {
                    i.reverse_bits() >> (64 - (k - 1))
                };
                ExtRat::from_coprime(nat::<T>(2 * rev + 1), T::pow2(k))
            }
            (TreeKind::SternBrocot, _) => self.matrix_entry(i),
            (TreeKind::Farey, _) => self.matrix_entry(i).phi(),
        }
    }
}

impl<T: Natural> Iterator for LevelIter<T> {
    type Item = ExtRat<T>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.next >= self.end {
            return None;
        }
        let i = self.next;
        self.next += 1;
        Some(self.entry(i))
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let n = (self.end - self.next) as usize;
        (n, Some(n))
    }
}

impl<T: Natural> ExactSizeIterator for LevelIter<T> {}

pub fn level_size(k: u32) -> u64 {
    1u64 << (k - 1)
}

/// Left-to-right listing of level `k` (root = level 1), capped at
/// [`DEFAULT_LEVEL_CAP`].
pub fn level<T: Natural>(spec: TreeSpec, k: u32) -> Result<LevelIter<T>> {
    level_with_cap(spec, k, DEFAULT_LEVEL_CAP)
}

pub fn level_with_cap<T: Natural>(spec: TreeSpec, k: u32, cap: u32) -> Result<LevelIter<T>> {
    if k == 0 {
        return Err(domain("tree levels (root is level 1)", k));
    }
    check_cap("tree level", u64::from(k), u64::from(cap.min(63)))?;
    Ok(LevelIter::new(spec, k, 0..level_size(k)))
}

/// Entries `range` of level `k`; identical to the same slice of [`level`].
pub fn level_range<T: Natural>(spec: TreeSpec, k: u32, range: Range<u64>) -> Result<LevelIter<T>> {
    let full = level::<T>(spec, k)?;
    if range.end > full.end || range.start > range.end {
        return Err(domain("level index range", format!("{range:?}")));
    }
    Ok(LevelIter::new(spec, k, range))
}

/// Whole level, generated in fixed-size chunks on the rayon pool.
pub fn level_par<T: Natural>(spec: TreeSpec, k: u32) -> Result<Vec<ExtRat<T>>> {
    let n = level::<T>(spec, k)?.len() as u64;
    let chunks: Vec<Vec<ExtRat<T>>> = (0..n.div_ceil(LEVEL_CHUNK))
        .into_par_iter()
        .map(|c| {
            let r = c * LEVEL_CHUNK..((c + 1) * LEVEL_CHUNK).min(n);
            LevelIter::new(spec, k, r).collect()
        })
        .collect();
    Ok(chunks.into_iter().flatten().collect())
}

/// All entries of levels `1..=k` in reading order (row by row).
pub fn levels_upto<T: Natural>(spec: TreeSpec, k: u32) -> Result<impl Iterator<Item = ExtRat<T>>> {
    let iters = (1..=k).map(|j| level::<T>(spec, j)).collect::<Result<Vec<_>>>()?;
    Ok(iters.into_iter().flatten())
}

/// The two next-level entries below a vertex `x`, left first.
pub fn descendants<T: Natural>(spec: TreeSpec, x: &ExtRat<T>) -> Result<(ExtRat<T>, ExtRat<T>)> {
    if !spec.is_vertex(x) {
        return Err(Error::NotAVertex {
            tree: spec.kind.name(),
            value: x.to_string(),
        });
    }
    let (p, q) = (x.num().clone(), x.den().clone());
    let two = nat::<T>(2);
    Ok(match (spec.kind, spec.permuted) {
        (TreeKind::SternBrocot, false) => {
            let m = crate::coding::matrix_of(x)?;
            let (lp, rp) = (m.left_parent(), m.right_parent());
            (lp.mediant(x), x.mediant(&rp))
        }
        (TreeKind::SternBrocot, true) => (
            ExtRat::from_coprime(p.clone(), p.clone() + q.clone()),
            ExtRat::from_coprime(p + q.clone(), q),
        ),
        (TreeKind::Farey, false) => {
            let (l, r) = descendants(TreeSpec::SB, &x.phi_inv()?)?;
            (l.phi(), r.phi())
        }
        (TreeKind::Farey, true) => (
            ExtRat::from_coprime(p.clone(), p.clone() + q.clone()),
            ExtRat::from_coprime(q.clone(), two * q - p),
        ),
        (TreeKind::Dyadic, false) => (
            ExtRat::from_coprime(two.clone() * p.clone() - T::one(), two.clone() * q.clone()),
            ExtRat::from_coprime(two.clone() * p + T::one(), two * q),
        ),
        (TreeKind::Dyadic, true) => (
            ExtRat::from_coprime(p.clone(), two.clone() * q.clone()),
            ExtRat::from_coprime(p + q.clone(), two * q),
        ),
    })
}

/// Number of ways to write `n` as a sum of powers of two, each used at most
/// twice: `b(0) = 1`, `b(2m+1) = b(m)`, `b(2m+2) = b(m) + b(m+1)`.
pub fn hyperbinary(n: u64) -> u64 {
    hyperbinary_pair(n).0
}

/// `(b(n), b(n+1))` in `O(log n)` steps.
fn hyperbinary_pair(n: u64) -> (u64, u64) {
    if n == 0 {
        return (1, 1);
    }
    if n % 2 == 1 {
        let (bm, bm1) = hyperbinary_pair((n - 1) / 2);
        (bm, bm + bm1)
    } else {
        let (bm, bm1) = hyperbinary_pair((n - 2) / 2);
        (bm + bm1, bm1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    type Q = ExtRat<u64>;

    fn q(s: &str) -> Q {
        s.parse().unwrap()
    }

    fn row(spec: TreeSpec, k: u32) -> Vec<String> {
        level::<u64>(spec, k).unwrap().map(|x| x.to_string()).collect()
    }

    fn strs(s: &str) -> Vec<String> {
        s.split_whitespace().map(String::from).collect()
    }

    #[test]
    fn level_four_examples() {
        assert_eq!(
            row(TreeSpec::SB, 4),
            strs("1/4 2/5 3/5 3/4 4/3 5/3 5/2 4/1")
        );
        assert_eq!(
            row(TreeSpec::SB_HAT, 4),
            strs("1/4 4/3 3/5 5/2 2/5 5/3 3/4 4/1")
        );
        assert_eq!(
            row(TreeSpec::DYADIC_HAT, 4),
            strs("1/16 9/16 5/16 13/16 3/16 11/16 7/16 15/16")
        );
    }

    #[test]
    fn roots() {
        for spec in TreeSpec::ALL {
            let r: Vec<Q> = level(spec, 1).unwrap().collect();
            assert_eq!(r, vec![spec.kind.root()]);
        }
    }

    #[test]
    fn level_cap_and_zero() {
        assert!(matches!(
            level::<u64>(TreeSpec::SB, 25),
            Err(Error::CapExceeded { .. })
        ));
        assert!(level::<u64>(TreeSpec::SB, 0).is_err());
        assert!(level_with_cap::<u64>(TreeSpec::SB, 25, 30).is_ok());
    }

    #[test]
    fn ranges_match_full_level() {
        for spec in TreeSpec::ALL {
            let full: Vec<Q> = level(spec, 9).unwrap().collect();
            let parts: Vec<Q> = [0..37u64, 37..200, 200..256]
                .into_iter()
                .flat_map(|r| level_range::<u64>(spec, 9, r).unwrap())
                .collect();
            assert_eq!(full, parts);
            assert_eq!(level_par::<u64>(spec, 9).unwrap(), full);
        }
    }

    #[test]
    fn descendants_examples() {
        assert_eq!(
            descendants(TreeSpec::SB_HAT, &q("4/3")).unwrap(),
            (q("4/7"), q("7/3"))
        );
        assert_eq!(
            descendants(TreeSpec::FAREY_HAT, &q("3/5")).unwrap(),
            (q("3/8"), q("5/7"))
        );
        assert_eq!(
            descendants(TreeSpec::DYADIC_HAT, &q("1/2")).unwrap(),
            (q("1/4"), q("3/4"))
        );
        assert_eq!(
            descendants(TreeSpec::SB, &q("2/3")).unwrap(),
            (q("3/5"), q("3/4"))
        );
        assert!(matches!(
            descendants(TreeSpec::DYADIC, &q("1/3")),
            Err(Error::NotAVertex { .. })
        ));
        assert!(descendants(TreeSpec::FAREY, &q("3/2")).is_err());
    }

    #[test]
    fn hyperbinary_examples() {
        assert_eq!(hyperbinary(8), 4);
        assert_eq!(hyperbinary(0), 1);
        assert_eq!(hyperbinary(5), 2);
    }
}
