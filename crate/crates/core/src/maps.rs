//! The counting maps `R`, `S`, `T` (bijections whose orbits enumerate the
//! permuted trees row by row) and the genealogical maps `G`, `F`, `D` (two-to-one,
//! their inverse branches produce descendants).
//!
//! `R`, `G` act on `J = [0, ∞]`; `S`, `T`, `F`, `D` act on `I = [0, 1]`.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::Zero;

use crate::coding::{Letter, LrWord};
use crate::error::{check_cap, domain, Error, Result};
use crate::exact::{eval_terms, ContFrac, ExtRat};
use crate::minkowski::{e_n, qmark, qmark_inv, Dyadic};
use crate::natural::Natural;
use crate::sum::ComplexSum;

/// Orbits and ergodic sums are capped at this many points by default.
pub const DEFAULT_ORBIT_CAP: u64 = 1 << 24;

/// Largest stage accepted by [`stack_interval`].
pub const MAX_STACK_STAGE: u32 = 20;

/// Largest digit count accepted by [`eigenfunction_check`].
pub const MAX_EIGEN_DIGITS: u32 = 12;

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum MapId {
    R,
    S,
    T,
    G,
    F,
    D,
}

impl MapId {
    pub const ALL: [MapId; 6] = [MapId::R, MapId::S, MapId::T, MapId::G, MapId::F, MapId::D];

    pub fn is_invertible(self) -> bool {
        matches!(self, MapId::R | MapId::S | MapId::T)
    }

    /// Whether the map acts on `[0, ∞]` rather than `[0, 1]`.
    pub fn on_half_line(self) -> bool {
        matches!(self, MapId::R | MapId::G)
    }

    pub fn name(self) -> &'static str {
        match self {
            MapId::R => "R",
            MapId::S => "S",
            MapId::T => "T",
            MapId::G => "G",
            MapId::F => "F",
            MapId::D => "D",
        }
    }

    fn check_domain<T: Natural>(self, x: &ExtRat<T>) -> Result<()> {
        if !self.on_half_line() && x.num() > x.den() {
            return Err(Error::Domain {
                what: "map on [0,1]",
                value: format!("{}({x})", self.name()),
            });
        }
        Ok(())
    }
}

impl fmt::Display for MapId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for MapId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "R" | "r" => Ok(MapId::R),
            "S" | "s" => Ok(MapId::S),
            "T" | "t" => Ok(MapId::T),
            "G" | "g" => Ok(MapId::G),
            "F" | "f" => Ok(MapId::F),
            "D" | "d" => Ok(MapId::D),
            _ => Err(Error::Parse {
                input: s.to_string(),
                reason: "expected one of R, S, T, G, F, D".into(),
            }),
        }
    }
}

fn rat<T: Natural>(num: T, den: T) -> ExtRat<T> {
    ExtRat::new(num, den).expect("map formulas never produce 0/0")
}

/// Smallest `n ≥ 0` with `a·2^(n+1) > b` (`a > 0`).
fn dyadic_piece<T: Natural>(a: &T, b: &T) -> u64 {
    let mut n = b.bit_len().saturating_sub(a.bit_len()).saturating_sub(1);
    while a.shl_bits(n + 1) <= *b {
        n += 1;
    }
    while n > 0 && a.shl_bits(n) > *b {
        n -= 1;
    }
    n
}

pub fn apply<T: Natural>(m: MapId, x: &ExtRat<T>) -> Result<ExtRat<T>> {
    m.check_domain(x)?;
    let (p, q) = (x.num().clone(), x.den().clone());
    let two = || T::one() + T::one();
    Ok(match m {
        MapId::R => {
            if x.is_infinite() {
                return Ok(ExtRat::zero());
            }
            // 1 / (1 − {x} + [x])
            let (k, r) = p.div_rem(&q);
            rat(q.clone(), k * q.clone() + q - r)
        }
        MapId::G => {
            if x.is_infinite() {
                ExtRat::infinity()
            } else if p < q {
                rat(p.clone(), q - p)
            } else {
                rat(p - q.clone(), q)
            }
        }
        MapId::S => {
            if x.is_one() {
                return Ok(ExtRat::zero());
            }
            let d = q - p.clone();
            let (k, r) = p.div_rem(&d);
            rat(d.clone(), (k + two()) * d - r)
        }
        MapId::T => {
            if x.is_one() {
                return Ok(ExtRat::zero());
            }
            // x + 3/2^{n+1} − 1 on [1 − 2^{−n}, 1 − 2^{−(n+1)})
            let n = dyadic_piece(&(q.clone() - p), &q);
            let d = q.clone().shl_bits(n + 1);
            let three_q = q.clone() + q.clone() + q.clone();
            let c = (q.clone() - x.num().clone()).shl_bits(n + 1);
            rat(three_q - c, d)
        }
        MapId::F => {
            let pp = p.clone() + p.clone();
            if pp < q {
                rat(p.clone(), q - p)
            } else {
                rat(pp - q, p)
            }
        }
        MapId::D => {
            if x.is_one() {
                return Ok(ExtRat::one());
            }
            let pp = p.clone() + p;
            if pp < q {
                rat(pp, q)
            } else {
                rat(pp - q.clone(), q)
            }
        }
    })
}

/// Inverse of `R`, `S` or `T`, with the piece located by exact comparison.
pub fn apply_inverse<T: Natural>(m: MapId, y: &ExtRat<T>) -> Result<ExtRat<T>> {
    let (p, q) = (y.num().clone(), y.den().clone());
    let out_of_range = || Error::Domain {
        what: "inverse map (value outside the range)",
        value: format!("{}^-1({y})", m.name()),
    };
    match m {
        MapId::R => {
            if y.is_zero() {
                return Ok(ExtRat::infinity());
            }
            if y.is_infinite() {
                return Err(out_of_range());
            }
            // 1/y ∈ (n, n+1]: 2n + 1 − 1/y
            let n = (q.clone() - T::one()) / p.clone();
            let n2 = n.clone() + n + T::one();
            Ok(rat(n2 * p.clone() - q, p))
        }
        MapId::S => {
            if y.is_one() || y.num() > y.den() {
                return Err(out_of_range());
            }
            // S = φ ∘ R ∘ φ⁻¹
            Ok(apply_inverse(MapId::R, &y.phi_inv()?)?.phi())
        }
        MapId::T => {
            if y.is_zero() {
                return Ok(ExtRat::one());
            }
            if p >= q {
                return Err(out_of_range());
            }
            // y ∈ [2^{−(n+1)}, 2^{−n}): y + 1 − 3/2^{n+1}
            let mut n = q.bit_len().saturating_sub(p.bit_len() + 1);
            while p.shl_bits(n + 1) < q {
                n += 1;
            }
            while n > 0 && p.shl_bits(n) >= q {
                n -= 1;
            }
            let three_q = q.clone() + q.clone() + q.clone();
            Ok(rat(
                p.shl_bits(n + 1) + q.shl_bits(n + 1) - three_q,
                q.shl_bits(n + 1),
            ))
        }
        _ => Err(domain(
            "apply_inverse (two-to-one map; use inverse_branches)",
            m,
        )),
    }
}

/// The two inverse branches `(Φ₀(y), Φ₁(y))` of `G`, `F` or `D`, ordered as
/// left and right descendants. At the fixed endpoint `∞` (for `G`) or `1`
/// (for `F`, `D`) the left branch lands on the jump of the map.
pub fn inverse_branches<T: Natural>(m: MapId, y: &ExtRat<T>) -> Result<(ExtRat<T>, ExtRat<T>)> {
    m.check_domain(y)?;
    let (p, q) = (y.num().clone(), y.den().clone());
    match m {
        MapId::G => Ok((y.phi(), y.add_integer(&T::one()))),
        MapId::F => {
            let qq = q.clone() + q.clone();
            Ok((y.phi(), rat(q, qq - p)))
        }
        MapId::D => {
            let qq = q.clone() + q.clone();
            Ok((rat(p.clone(), qq.clone()), rat(p + q, qq)))
        }
        _ => Err(domain("inverse_branches (bijective map; use apply_inverse)", m)),
    }
}

/// Forward orbit `x₀ = start, x₁ = m(x₀), …`.
#[derive(Clone, Debug)]
pub struct Orbit<T> {
    map: MapId,
    next: ExtRat<T>,
    remaining: u64,
}

impl<T: Natural> Iterator for Orbit<T> {
    type Item = ExtRat<T>;

    fn next(&mut self) -> Option<ExtRat<T>> {
        if self.remaining == 0 {
            return None;
        }
        self.remaining -= 1;
        let x = self.next.clone();
        if self.remaining > 0 {
            self.next = apply(self.map, &x).expect("orbits stay in the domain");
        }
        Some(x)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let n = self.remaining as usize;
        (n, Some(n))
    }
}

impl<T: Natural> ExactSizeIterator for Orbit<T> {}

/// The first `count` points of the orbit of `start`. From `(R, ∞)`,
/// `(S, 1)` and `(T, 1)` indices `2^{k−1}+1 ..= 2^k` hold row `k` of the
/// corresponding permuted tree.
pub fn orbit<T: Natural>(m: MapId, start: &ExtRat<T>, count: u64) -> Result<Orbit<T>> {
    orbit_with_cap(m, start, count, DEFAULT_ORBIT_CAP)
}

pub fn orbit_with_cap<T: Natural>(m: MapId, start: &ExtRat<T>, count: u64, cap: u64) -> Result<Orbit<T>> {
    check_cap("orbit length", count, cap)?;
    m.check_domain(start)?;
    Ok(Orbit {
        map: m,
        next: start.clone(),
        remaining: count,
    })
}

/// The four commutative diagrams.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum Diagram {
    /// `S = φ ∘ R ∘ φ⁻¹` on `[0, 1]`.
    SvsR,
    /// `T ∘ ? = ? ∘ S` on `[0, 1]`.
    TvsS,
    /// `F ∘ φ = φ ∘ G` on `[0, ∞]`.
    FvsG,
    /// `D ∘ ? = ? ∘ F` on `[0, 1]`.
    DvsF,
}

impl Diagram {
    pub const ALL: [Diagram; 4] = [Diagram::SvsR, Diagram::TvsS, Diagram::FvsG, Diagram::DvsF];

    pub fn name(self) -> &'static str {
        match self {
            Diagram::SvsR => "S=phi.R.phi^-1",
            Diagram::TvsS => "T.?=?.S",
            Diagram::FvsG => "F.phi=phi.G",
            Diagram::DvsF => "D.?=?.F",
        }
    }

    pub fn on_half_line(self) -> bool {
        self == Diagram::FvsG
    }
}

fn qm<T: Natural>(x: &ExtRat<T>) -> Result<ExtRat<T>> {
    Ok(qmark(x)?.to_ext_rat())
}

/// Both sides of a diagram at `x`.
pub fn conjugacy_sides<T: Natural>(d: Diagram, x: &ExtRat<T>) -> Result<(ExtRat<T>, ExtRat<T>)> {
    Ok(match d {
        Diagram::SvsR => (
            apply(MapId::S, x)?,
            apply(MapId::R, &x.phi_inv()?)?.phi(),
        ),
        Diagram::TvsS => (apply(MapId::T, &qm(x)?)?, qm(&apply(MapId::S, x)?)?),
        Diagram::FvsG => (apply(MapId::F, &x.phi())?, apply(MapId::G, x)?.phi()),
        Diagram::DvsF => (apply(MapId::D, &qm(x)?)?, qm(&apply(MapId::F, x)?)?),
    })
}

/// Exact difference of the two sides. Both sides infinite counts as zero.
pub fn conjugacy_residual<T: Natural>(d: Diagram, x: &ExtRat<T>) -> Result<BigRational> {
    let (a, b) = conjugacy_sides(d, x)?;
    match (a.to_big_rational(), b.to_big_rational()) {
        (Some(a), Some(b)) => Ok(a - b),
        (None, None) => Ok(BigRational::zero()),
        _ => Err(Error::Domain {
            what: "conjugacy residual (one side is infinite)",
            value: format!("{}: {a} vs {b}", d.name()),
        }),
    }
}

/// A partial quotient or `∞`.
#[derive(Clone, Debug)]
enum Term<T> {
    Fin(T),
    Inf,
}

/// Evaluates `[0; b₁, b₂, …]` where some `bᵢ` may be 0 or `∞`: a zero merges
/// its neighbours, `[…, a, 0, b, …] = […, a+b, …]`, and `∞` ends the expansion.
fn eval_extended<T: Natural>(terms: Vec<Term<T>>) -> ExtRat<T> {
    let mut clean: Vec<T> = Vec::new();
    let mut pending_zero = false;
    for t in terms {
        match t {
            Term::Inf => {
                if pending_zero {
                    // […, c, a, 0, ∞] = […, c, a + ∞] = […, c]
                    clean.pop();
                }
                break;
            }
            Term::Fin(a) if a.is_zero() && !pending_zero && !clean.is_empty() => pending_zero = true,
            Term::Fin(a) if pending_zero => {
                let last = clean.pop().expect("zero follows a term");
                clean.push(last + a);
                pending_zero = false;
            }
            Term::Fin(a) => clean.push(a),
        }
    }
    eval_terms(&clean)
}

/// `S(x)` for `x ∈ [0, 1)` by its action on continued fractions:
/// `[0; 1, a₂, a₃, …] ↦ [0; a₂+1, 1, a₃−1, a₄, …]` and
/// `[0; a₁, a₂, …] ↦ [0; 1, 1, a₁−2, a₂, …]` for `a₁ ≥ 2`. The rule is
/// applied to the expansion of `x` as a limit from the right (ending in an
/// infinite quotient).
pub fn s_by_cf_action<T: Natural>(x: &ExtRat<T>) -> Result<ExtRat<T>> {
    if x.num() >= x.den() {
        return Err(domain("s_by_cf_action (needs x in [0,1))", x));
    }
    let mut t = ContFrac::from_rat(x)?.into_terms();
    if t.len() % 2 == 0 {
        // odd last index: use […, aₙ − 1, 1] so the appended ∞ approaches from above
        let last = t.pop().expect("len ≥ 2");
        t.push(last - T::one());
        t.push(T::one());
    }
    let mut a: Vec<Term<T>> = t.into_iter().skip(1).map(Term::Fin).collect();
    a.push(Term::Inf);
    let minus = |t: &Term<T>, k: u64| match t {
        Term::Fin(v) => Term::Fin(v.clone() - T::from_u64(k).expect("small")),
        Term::Inf => Term::Inf,
    };
    let plus_one = |t: &Term<T>| match t {
        Term::Fin(v) => Term::Fin(v.clone() + T::one()),
        Term::Inf => Term::Inf,
    };
    let a1_is_one = matches!(&a[0], Term::Fin(v) if v.is_one());
    let mut out = vec![Term::Fin(T::zero())];
    if a1_is_one {
        out.push(plus_one(&a[1]));
        out.push(Term::Fin(T::one()));
        out.push(minus(&a[2], 1));
        out.extend(a.into_iter().skip(3));
    } else {
        out.push(Term::Fin(T::one()));
        out.push(Term::Fin(T::one()));
        out.push(minus(&a[0], 2));
        out.extend(a.into_iter().skip(1));
    }
    Ok(eval_extended(out))
}

/// Follows `x ∈ 𝒯` back to the root: letter `i` is `L` iff `G^{i−1}(x) < 1`.
/// Returns the letters and the point reached after `depth(x) − 1` steps.
pub fn g_retrace<T: Natural>(x: &ExtRat<T>) -> Result<(LrWord, ExtRat<T>)> {
    let steps = x
        .depth()?
        .to_u64()
        .ok_or_else(|| domain("g_retrace (depth too large)", x))?
        - 1;
    check_cap("retrace length", steps, crate::coding::MAX_WORD_LEN)?;
    let mut w = LrWord::empty();
    let mut y = x.clone();
    for _ in 0..steps {
        w.push(if y < ExtRat::one() { Letter::L } else { Letter::R });
        y = apply(MapId::G, &y)?;
    }
    Ok((w, y))
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum StackFamily {
    /// Dyadic intervals stacked by `T`.
    A,
    /// `?⁻¹` of `A`, stacked by `S`.
    B,
    /// `φ⁻¹` of `B`, stacked by `R`.
    C,
}

impl FromStr for StackFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "A" | "a" => Ok(StackFamily::A),
            "B" | "b" => Ok(StackFamily::B),
            "C" | "c" => Ok(StackFamily::C),
            _ => Err(Error::Parse {
                input: s.into(),
                reason: "expected A, B or C".into(),
            }),
        }
    }
}

/// Half-open interval `[left, right)` of stage `n` in a rank-one tower.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct StackInterval<T> {
    pub family: StackFamily,
    pub index: u64,
    pub stage: u32,
    pub left: ExtRat<T>,
    pub right: ExtRat<T>,
}

fn dyadic_left<T: Natural>(i: u64, n: u32) -> Dyadic<T> {
    // T acts on the first n digits as an odometer carrying to the right, so
    // T^{i−1}(0) has those digits equal to i−1 written least significant first
    let j = if n == 0 { 0 } else { (i - 1).reverse_bits() >> (64 - n) };
    Dyadic::new(T::from_u64(j).expect("u64 fits"), u64::from(n))
}

/// `A(i, n) = T^{i−1}([0, 2^{−n}))`, `B = ?⁻¹(A)`, `C = φ⁻¹(B)`.
/// For `B` it is asserted that `S` carries the left end of `B(i, n)` to that
/// of `B(i+1, n)`.
pub fn stack_interval<T: Natural>(family: StackFamily, i: u64, n: u32) -> Result<StackInterval<T>> {
    check_cap("stack stage", u64::from(n), u64::from(MAX_STACK_STAGE))?;
    if i == 0 || i > 1u64 << n {
        return Err(Error::Domain {
            what: "stack interval index (needs 1 <= i <= 2^n)",
            value: format!("i={i}, n={n}"),
        });
    }
    let l = dyadic_left::<T>(i, n);
    let r = l.add(&Dyadic::new(T::one(), u64::from(n)));
    let (left, right) = match family {
        StackFamily::A => (l.to_ext_rat(), r.to_ext_rat()),
        StackFamily::B | StackFamily::C => {
            let (bl, br) = (qmark_inv(&l)?, qmark_inv(&r)?);
            if i < 1u64 << n {
                let next = qmark_inv(&dyadic_left::<T>(i + 1, n))?;
                assert_eq!(apply(MapId::S, &bl)?, next, "S does not stack B({i},{n})");
            }
            if family == StackFamily::B {
                (bl, br)
            } else {
                (bl.phi_inv()?, br.phi_inv()?)
            }
        }
    };
    Ok(StackInterval {
        family,
        index: i,
        stage: n,
        left,
        right,
    })
}

/// Outcome of [`eigenfunction_check`].
#[derive(Clone, Copy, PartialEq, Debug)]
pub struct EigenCheck {
    /// Digit integer `v` at `x` (at `?(x)` for `S`).
    pub v_x: u64,
    /// Digit integer at the image point.
    pub v_image: u64,
    /// `v_image ≡ v_x + 1 (mod 2^m)`, checked in integers.
    pub exact_ok: bool,
    /// `f(map(x))`.
    pub lhs: Complex64,
    /// `e^{2πi/2^m} f(x)`.
    pub rhs: Complex64,
}

/// First `m` binary digits of `x ∈ [0, 1)` read least significant first.
fn digit_integer<T: Natural>(x: &ExtRat<T>, m: u32) -> u64 {
    let msb_first = (x.num().shl_bits(u64::from(m)) / x.den().clone())
        .to_u64()
        .expect("< 2^m");
    if m == 0 {
        0
    } else {
        msb_first.reverse_bits() >> (64 - m)
    }
}

/// Checks `f ∘ T = e^{2πi/2^m} f` for `f(x) = e^{2πi v(x)/2^m}` (or the same
/// for `S` with `f ∘ ?`).
pub fn eigenfunction_check<T: Natural>(m: u32, x: &ExtRat<T>, map: MapId) -> Result<EigenCheck> {
    check_cap("eigenfunction digits", u64::from(m), u64::from(MAX_EIGEN_DIGITS))?;
    if x.num() >= x.den() {
        return Err(domain("eigenfunction_check (needs x in [0,1))", x));
    }
    let (u, image) = match map {
        MapId::T => (x.clone(), apply(MapId::T, x)?),
        MapId::S => (qm(x)?, qm(&apply(MapId::S, x)?)?),
        _ => return Err(domain("eigenfunction_check (map must be T or S)", map)),
    };
    let (v_x, v_image) = (digit_integer(&u, m), digit_integer(&image, m));
    let modulus = 1u64 << m;
    let f = |v: u64| Complex64::from_polar(1.0, std::f64::consts::TAU * v as f64 / modulus as f64);
    Ok(EigenCheck {
        v_x,
        v_image,
        exact_ok: v_image == (v_x + 1) % modulus,
        lhs: f(v_image),
        rhs: f(1) * f(v_x),
    })
}

/// `(1/N) Σ_{k<N} e^{2πi n x_k}` along the exact orbit of `start` under `R`
/// (finite `start > 0`) or `S` (`start ∈ [0, 1]`).
pub fn ergodic_fourier<T: Natural>(n: i64, start: &ExtRat<T>, iters: u64, map: MapId) -> Result<Complex64> {
    match map {
        MapId::R if start.is_finite() => {}
        MapId::S => {}
        _ => {
            return Err(Error::Domain {
                what: "ergodic_fourier (map R from a finite start, or S)",
                value: format!("{map} from {start}"),
            })
        }
    }
    if iters == 0 {
        return Err(domain("ergodic_fourier (needs at least one iterate)", iters));
    }
    let sum: ComplexSum<f64> = orbit(map, start, iters)?.map(|x| e_n(n, &x)).sum();
    Ok(sum.value() / iters as f64)
}

/// `(F(h) − F(0)) / h`.
pub fn farey_difference_quotient<T: Natural>(h: &ExtRat<T>) -> Result<BigRational> {
    let fh = apply(MapId::F, h)?
        .to_big_rational()
        .expect("finite");
    let h = h.to_big_rational().ok_or_else(|| domain("difference quotient", h))?;
    if h.is_zero() {
        return Err(domain("difference quotient (h = 0)", 0));
    }
    Ok(fh / h)
}

#[cfg(test)]
mod tests {
    use super::*;

    type Q = ExtRat<u64>;

    fn q(s: &str) -> Q {
        s.parse().unwrap()
    }

    fn qs(v: &[&str]) -> Vec<Q> {
        v.iter().map(|s| q(s)).collect()
    }

    #[test]
    fn apply_examples() {
        assert_eq!(apply(MapId::R, &q("5/2")).unwrap(), q("2/5"));
        assert_eq!(apply(MapId::T, &q("5/8")).unwrap(), q("3/8"));
        assert_eq!(apply(MapId::G, &q("7/3")).unwrap(), q("4/3"));
        assert_eq!(apply(MapId::G, &q("4/7")).unwrap(), q("4/3"));
        assert_eq!(apply(MapId::R, &Q::infinity()).unwrap(), Q::zero());
        assert_eq!(apply(MapId::S, &q("1")).unwrap(), Q::zero());
        assert_eq!(apply(MapId::S, &Q::zero()).unwrap(), q("1/2"));
        assert_eq!(apply(MapId::T, &q("1")).unwrap(), Q::zero());
        assert_eq!(apply(MapId::T, &q("1/4")).unwrap(), q("3/4"));
        assert_eq!(apply(MapId::G, &Q::infinity()).unwrap(), Q::infinity());
        assert_eq!(apply(MapId::F, &q("1")).unwrap(), q("1"));
        assert_eq!(apply(MapId::D, &q("1")).unwrap(), q("1"));
        assert_eq!(apply(MapId::F, &Q::zero()).unwrap(), Q::zero());
        assert!(apply(MapId::S, &q("3/2")).is_err());
    }

    #[test]
    fn inverse_examples() {
        assert_eq!(apply_inverse(MapId::R, &q("2/5")).unwrap(), q("5/2"));
        assert_eq!(apply_inverse(MapId::S, &q("1/3")).unwrap(), q("1/2"));
        assert_eq!(inverse_branches(MapId::F, &q("3/5")).unwrap(), (q("3/8"), q("5/7")));
        assert_eq!(apply_inverse(MapId::T, &q("3/8")).unwrap(), q("5/8"));
        assert_eq!(apply_inverse(MapId::R, &Q::zero()).unwrap(), Q::infinity());
        assert!(apply_inverse(MapId::R, &Q::infinity()).is_err());
        assert!(apply_inverse(MapId::T, &q("1")).is_err());
        assert!(apply_inverse(MapId::G, &q("1")).is_err());
        assert!(inverse_branches(MapId::R, &q("1")).is_err());
    }

    #[test]
    fn orbit_examples() {
        let r: Vec<Q> = orbit(MapId::R, &Q::infinity(), 9).unwrap().collect();
        assert_eq!(r, qs(&["1/0", "0", "1", "1/2", "2", "1/3", "3/2", "2/3", "3"]));
        let t: Vec<Q> = orbit(MapId::T, &q("1"), 4).unwrap().collect();
        assert_eq!(t, qs(&["1", "0", "1/2", "1/4"]));
        assert!(orbit(MapId::R, &Q::infinity(), (1 << 24) + 1).is_err());
    }

    #[test]
    fn conjugacy_examples() {
        assert!(conjugacy_residual(Diagram::TvsS, &q("2/3")).unwrap().is_zero());
        assert_eq!(conjugacy_sides(Diagram::TvsS, &q("2/3")).unwrap().0, q("1/8"));
        assert!(conjugacy_residual(Diagram::FvsG, &q("7/3")).unwrap().is_zero());
        assert_eq!(conjugacy_sides(Diagram::FvsG, &q("7/3")).unwrap().0, q("4/7"));
        for d in Diagram::ALL {
            for x in [Q::zero(), q("1")] {
                assert!(conjugacy_residual(d, &x).unwrap().is_zero(), "{d:?} at {x}");
            }
        }
        assert!(conjugacy_residual(Diagram::FvsG, &Q::infinity()).unwrap().is_zero());
    }

    #[test]
    fn stack_examples() {
        let a = stack_interval::<u64>(StackFamily::A, 2, 3).unwrap();
        assert_eq!((a.left, a.right), (q("1/2"), q("5/8")));
        let b = stack_interval::<u64>(StackFamily::B, 1, 2).unwrap();
        assert_eq!((b.left, b.right), (q("0"), q("1/3")));
        for n in 0..6 {
            let a = stack_interval::<u64>(StackFamily::A, 1, n).unwrap();
            assert_eq!((a.left, a.right), (Q::zero(), Q::new(1, 1 << n).unwrap()));
        }
        let c = stack_interval::<u64>(StackFamily::C, 2, 1).unwrap();
        assert_eq!((c.left, c.right), (q("1"), Q::infinity()));
        assert!(stack_interval::<u64>(StackFamily::A, 0, 3).is_err());
        assert!(stack_interval::<u64>(StackFamily::A, 9, 3).is_err());
        assert!(stack_interval::<u64>(StackFamily::A, 1, 21).is_err());
    }

    #[test]
    fn eigen_examples() {
        let c = eigenfunction_check(2, &q("3/16"), MapId::T).unwrap();
        assert_eq!((c.v_x, c.v_image), (0, 1));
        let c = eigenfunction_check(2, &q("11/16"), MapId::T).unwrap();
        assert_eq!((c.v_x, c.v_image), (1, 2));
        for x in ["0", "1/3", "5/7", "3/4"] {
            let c = eigenfunction_check(1, &q(x), MapId::T).unwrap();
            assert!(c.exact_ok);
            let f_x = Complex64::from_polar(1.0, std::f64::consts::PI * c.v_x as f64);
            assert!((c.lhs - c.rhs).norm() < 1e-12);
            assert!((c.lhs + f_x).norm() < 1e-12);
        }
    }

    #[test]
    fn esse2_examples() {
        for x in ["0", "1/2", "1/3", "2/3", "3/5", "2/5", "5/13"] {
            assert_eq!(s_by_cf_action(&q(x)).unwrap(), apply(MapId::S, &q(x)).unwrap(), "at {x}");
        }
    }

    #[test]
    fn retrace_example() {
        let (w, end) = g_retrace(&q("3/5")).unwrap();
        assert_eq!(w.to_string(), "LRL");
        assert_eq!(end, q("1"));
    }

    #[test]
    fn ergodic_zero_mode() {
        assert_eq!(ergodic_fourier(0, &q("1"), 1000, MapId::R).unwrap(), Complex64::new(1.0, 0.0));
        assert!(ergodic_fourier(1, &Q::infinity(), 10, MapId::R).is_err());
    }
}
