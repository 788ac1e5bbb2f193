//! Named self-checks over the library's invariants, grouped into suites.
//!
//! Each check draws its random inputs from a ChaCha stream keyed by the seed
//! and the check's position in the registry, and its report text contains no
//! timings, so a report is a pure function of `(selection, seed)`.

use std::collections::HashSet;
use std::fmt;

use num_bigint::BigUint;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand_chacha::ChaCha8Rng;
use rand_core::RngCore;

use crate::coding::{
    code_compare, hat, matrix_from_word, parents, pi_code, rat_from_matrix, word_from_cf, word_of, CodeOrdering,
    Letter, LrWord,
};
use crate::exact::{eval_terms, ContFrac, ExtRat};
use crate::maps::{
    apply, apply_inverse, conjugacy_residual, eigenfunction_check, ergodic_fourier, g_retrace, orbit,
    s_by_cf_action, stack_interval, Diagram, MapId, StackFamily,
};
use crate::minkowski::{distribution_estimate, e_n, fourier_tree, qmark, qmark_inv, rho, rho_inv, stieltjes_mean, Dyadic};
use crate::operators::{
    commutator_residual, h1, markov_apply, markov_power, nu_invariance_args, phi0, phi1, transfer_apply,
    transition_probs, Generator, MarkovKind, TransferKind,
};
use crate::stochastic::{
    cylinder_prob, hitting_experiment, martingale_check, monte_carlo_mean, run_walks, simulate, walk_rng,
    ChainSpec, Walk, MAX_CYLINDER_LEN,
};
use crate::tree::{hyperbinary, level, levels_upto, TreeSpec};
use crate::{Error, Result};

type Q = ExtRat<BigUint>;

pub const SUITES: [&str; 7] = [
    "exact-core",
    "lr-coding",
    "tree-gen",
    "minkowski",
    "interval-maps",
    "operators",
    "stochastic",
];

/// Why a check failed.
#[derive(Debug)]
pub struct Failure(String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(format!("library error: {e}"))
    }
}

type Outcome = std::result::Result<String, Failure>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(Failure(format!($($msg)+)));
        }
    };
}

pub struct Check {
    pub suite: &'static str,
    pub name: &'static str,
    pub summary: &'static str,
    run: fn(&mut Ctx) -> Outcome,
}

/// Random input source handed to a check.
pub struct Ctx {
    rng: ChaCha8Rng,
    seed: u64,
}

impl Ctx {
    fn below(&mut self, n: u64) -> u64 {
        self.rng.next_u64() % n
    }

    fn range(&mut self, lo: u64, hi: u64) -> u64 {
        lo + self.below(hi - lo + 1)
    }

    fn terms(&mut self, a0: u64, len: u64, max_term: u64) -> Vec<BigUint> {
        let mut t = vec![BigUint::from(a0)];
        for _ in 0..len {
            t.push(BigUint::from(self.range(1, max_term)));
        }
        t
    }

    /// Positive finite rational with a short continued fraction.
    fn pos(&mut self) -> Q {
        let len = self.below(8);
        let a0 = if len == 0 { self.range(1, 6) } else { self.below(5) };
        let t = self.terms(a0, len, 16);
        eval_terms(&t)
    }

    /// Rational in the open unit interval.
    fn unit(&mut self) -> Q {
        let len = self.range(1, 8);
        let mut t = self.terms(0, len, 16);
        if t.last().is_some_and(|a| a.is_one()) {
            *t.last_mut().expect("nonempty") += 1u8;
        }
        eval_terms(&t)
    }

    /// Rational in `[0, 1]`, occasionally an endpoint.
    fn closed_unit(&mut self) -> Q {
        match self.below(50) {
            0 => Q::zero(),
            1 => Q::one(),
            _ => self.unit(),
        }
    }

    /// `p/q` with `p, q` uniform in `[1, 2^64)`.
    fn wide(&mut self) -> Q {
        let p = self.rng.next_u64().max(1);
        let q = self.rng.next_u64().max(1);
        Q::new(p.into(), q.into()).expect("nonzero")
    }

    fn word(&mut self, max_len: u64) -> LrWord {
        let len = self.below(max_len + 1);
        LrWord((0..len).map(|_| if self.below(2) == 0 { Letter::L } else { Letter::R }).collect())
    }

    fn bits(&mut self, max_len: u64) -> Vec<u8> {
        let len = self.range(1, max_len);
        (0..len).map(|_| self.below(2) as u8).collect()
    }
}

/// Outcome of one check.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CheckResult {
    pub suite: &'static str,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl fmt::Display for CheckResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "{tag} {}/{}: {}", self.suite, self.name, self.detail)
    }
}

pub fn registry() -> &'static [Check] {
    &CHECKS
}

/// Checks matching a comma-separated list of `all`, suite names and check
/// names, in registry order.
pub fn select(selection: &str) -> Result<Vec<&'static Check>> {
    let mut wanted = HashSet::new();
    for part in selection.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let hits: Vec<usize> = CHECKS
            .iter()
            .enumerate()
            .filter(|(_, c)| part == "all" || c.suite == part || c.name == part)
            .map(|(i, _)| i)
            .collect();
        if hits.is_empty() {
            return Err(Error::Parse {
                input: part.into(),
                reason: "not a suite or check name".into(),
            });
        }
        wanted.extend(hits);
    }
    Ok(CHECKS
        .iter()
        .enumerate()
        .filter(|(i, _)| wanted.contains(i))
        .map(|(_, c)| c)
        .collect())
}

fn stream_of(check: &Check) -> u64 {
    CHECKS
        .iter()
        .position(|c| std::ptr::eq(c, check))
        .expect("check from the registry") as u64
}

pub fn run_check(check: &Check, seed: u64) -> CheckResult {
    let mut ctx = Ctx {
        rng: walk_rng(seed, stream_of(check)),
        seed,
    };
    let (passed, detail) = match (check.run)(&mut ctx) {
        Ok(d) => (true, d),
        Err(Failure(d)) => (false, d),
    };
    CheckResult {
        suite: check.suite,
        name: check.name,
        passed,
        detail,
    }
}

/// Runs the selected checks in registry order.
pub fn run(selection: &str, seed: u64) -> Result<Vec<CheckResult>> {
    Ok(select(selection)?.into_iter().map(|c| run_check(c, seed)).collect())
}

macro_rules! check {
    ($suite:literal, $name:literal, $summary:literal, $f:path) => {
        Check {
            suite: $suite,
            name: $name,
            summary: $summary,
            run: $f,
        }
    };
}

static CHECKS: [Check; 48] = [
    check!("exact-core", "cf-roundtrip", "cf -> rat -> cf is the identity for every canonical cf with sum <= 14", cf_roundtrip),
    check!("exact-core", "depth-vs-tree", "depth = Stern-Brocot level and rank = Farey level, levels 1..12", depth_vs_tree),
    check!("exact-core", "depth-rank-identity", "depth(x) = floor(x) + rank({x}) + 1 on 10^4 wide random rationals", depth_rank_identity),
    check!("exact-core", "phi-mediant", "phi(a+b) = phi(a)+phi(b) (mediants) on 10^4 unimodular pairs", phi_mediant),
    check!("exact-core", "complement-involution", "complement is an involution giving 1-x", complement_involution),
    check!("lr-coding", "det-one", "det = 1 for 10^4 random words of length <= 16", det_one),
    check!("lr-coding", "word-roundtrip", "matrix(word(cf(x))) gives back x on levels 1..12", word_roundtrip),
    check!("lr-coding", "hat-involution", "hat is a depth-preserving involution on levels 1..12", hat_involution),
    check!("lr-coding", "neighbour-unimodular", "adjacent entries of levels <= k (with 0, inf) are unimodular, k <= 12", neighbour_unimodular),
    check!("lr-coding", "pi-prefix", "the first depth-1 letters of pi(x) are word(x)", pi_prefix),
    check!("lr-coding", "code-order", "code_compare agrees with rational order on 10^4 pairs", code_order),
    check!("tree-gen", "permuted-is-hat", "permuted levels are hat of plain levels; Farey and dyadic relations", permuted_is_hat),
    check!("tree-gen", "calkin-wilf", "x_i = b(i-2)/b(i-1) reading the permuted tree, i <= 2^16", calkin_wilf),
    check!("tree-gen", "neighbour-chaining", "each denominator is the next numerator in the permuted tree", neighbour_chaining),
    check!("tree-gen", "qmark-farey-dyadic", "? maps Farey levels onto dyadic levels, k <= 12", qmark_farey_dyadic),
    check!("tree-gen", "bijection", "each rational of depth <= 12 appears once in levels 1..12", bijection),
    check!("minkowski", "qmark-symmetry", "?(x) + ?(1-x) = 1 on 10^4 rationals", qmark_symmetry),
    check!("minkowski", "rho-reciprocal", "rho(x) + rho(1/x) = 1 on 10^4 rationals and at 0", rho_reciprocal),
    check!("minkowski", "mediant-average", "rho(child) = average of rho(parents) on levels <= 12", mediant_average),
    check!("minkowski", "qmark-monotone", "? is strictly increasing on the sorted Farey levels <= 12", qmark_monotone),
    check!("minkowski", "f-invariance", "?-measure of F-preimages on 100 intervals and [1/3,2/3]", f_invariance),
    check!("minkowski", "rho-dilation", "2 rho(x) = rho(x/(1-x)) or rho(x-1)+1 on 10^4 rationals", rho_dilation),
    check!("minkowski", "roundtrip", "qmark_inv.qmark and rho_inv.rho are the identity on 10^4 rationals", roundtrip),
    check!("minkowski", "distribution-bound", "|rho(x) - count/2^k| <= 2^-k for k <= 16 at 100 points", distribution_bound),
    check!("interval-maps", "bijectivity", "inverse.map = id for R, S, T on 10^4 rationals", bijectivity),
    check!("interval-maps", "orbit-counting", "orbits of R, S, T list the permuted trees row by row, k <= 12", orbit_counting),
    check!("interval-maps", "orbit-powers", "orbit(R, 1/0) at index 2^n is n for n <= 16", orbit_powers),
    check!("interval-maps", "log-diffusion", "floor of the running orbit maximum is floor(log2 N), N <= 2^16", log_diffusion),
    check!("interval-maps", "conjugacy", "all four diagrams commute on depth/rank <= 12 and 10^4 random points", conjugacy),
    check!("interval-maps", "s-cf-action", "S by its continued-fraction action matches S on 10^3 rationals in [0,1)", s_cf_action),
    check!("interval-maps", "g-retrace", "G-itinerary reproduces word(x) and ends at 1, levels <= 12", g_retrace_check),
    check!("interval-maps", "fixed-points", "F fixes 0 and 1 with one-sided difference quotients tending to 1", fixed_points),
    check!("interval-maps", "eigenfunctions", "v(Tx) = v(x)+1 mod 2^m and the S analogue, m <= 12, 10^3 points", eigenfunctions),
    check!("interval-maps", "stack-intervals", "A, B, C towers are stacked by T, S, R, n <= 8", stack_intervals),
    check!("interval-maps", "fourier-cross", "tree and ergodic Fourier estimates agree and converge, n = 1..4", fourier_cross),
    check!("operators", "row-stochastic", "P1 = 1 exactly for both chains on 10^4 points", row_stochastic),
    check!("operators", "p0-rho-invariance", "stieltjes_mean(P0 e1) - stieltjes_mean(e1) decreasing, <= C 2^-k, k = 12..18", p0_rho_invariance),
    check!("operators", "nu-invariance", "dx/x is invariant branchwise: exact logs and quadrature", nu_invariance),
    check!("operators", "harmonicity", "fixed-point and commutator residuals of 1 and h1 vanish", harmonicity),
    check!("operators", "transfer-fixed", "L1 fixes 1/x and the Farey transfer operator fixes 1/(x(1-x))", transfer_fixed),
    check!("operators", "power-vs-montecarlo", "markov_power within 3 standard errors of 10^5 walks, n = 12", power_vs_montecarlo),
    check!("operators", "mc0-limit", "E_x f(W_n) against the tree integral for 1, 1/(1+y)^2 and cos", mc0_limit),
    check!("stochastic", "cylinder-symmetry", "P_x(C(w)) = P_1/x(C(flip w)), x/(x+n), 2^-n on 10^3 cases", cylinder_symmetry),
    check!("stochastic", "letter-frequencies", "first letters match 1/2 for MC0 and exact marginals for MC1", letter_frequencies),
    check!("stochastic", "reproducible", "simulate and run_walks repeat bit for bit across runs and pools", reproducible),
    check!("stochastic", "hitting-curve", "(2/5, 3/5) is hit by >= 95% of 10^4 walks within 10^3 steps", hitting_curve),
    check!("stochastic", "mc1-no-atoms", "MC1 paths are not constant: both letters occur, exact atom masses vanish", mc1_no_atoms),
    check!("stochastic", "martingale", "martingale identities for 1 and h1 (MC1); exact one-step mean of rho (MC0)", martingale),
];

fn q(p: u64, d: u64) -> Q {
    Q::from_u64s(p, d).expect("valid fraction")
}

fn big(x: &Q) -> BigRational {
    x.to_big_rational().expect("finite")
}

fn levels_list(spec: TreeSpec, k: u32) -> Result<Vec<Q>> {
    level::<BigUint>(spec, k).map(Iterator::collect)
}

// ---- exact-core ----

fn canonical_cfs(budget: u64) -> Vec<Vec<u64>> {
    fn rec(prefix: &mut Vec<u64>, left: u64, out: &mut Vec<Vec<u64>>) {
        if prefix.len() == 1 || *prefix.last().expect("nonempty") >= 2 {
            out.push(prefix.clone());
        }
        for a in 1..=left {
            prefix.push(a);
            rec(prefix, left - a, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    for a0 in 0..=budget {
        rec(&mut vec![a0], budget - a0, &mut out);
    }
    out
}

fn cf_roundtrip(_: &mut Ctx) -> Outcome {
    let all = canonical_cfs(14);
    let mut seen = HashSet::new();
    for t in &all {
        let terms: Vec<BigUint> = t.iter().map(|&a| a.into()).collect();
        let x = ContFrac::new(terms.clone())?.to_rat();
        let back = ContFrac::from_rat(&x)?;
        ensure!(back.terms() == &terms[..], "{t:?} came back as {back}");
        ensure!(seen.insert(x.clone()), "{x} has two canonical expansions");
    }
    Ok(format!("{} expansions, all distinct values", all.len()))
}

fn depth_vs_tree(_: &mut Ctx) -> Outcome {
    let mut n = 0;
    for k in 1..=12u32 {
        for x in level::<BigUint>(TreeSpec::SB, k)? {
            let s = ContFrac::from_rat(&x)?.quotient_sum();
            ensure!(x.depth()? == BigUint::from(k) && s == BigUint::from(k), "depth of {x} is not {k}");
            n += 1;
        }
        for x in level::<BigUint>(TreeSpec::FAREY, k)? {
            ensure!(x.rank()? == BigUint::from(k), "rank of {x} is not {k}");
        }
    }
    Ok(format!("{n} Stern-Brocot and {n} Farey vertices"))
}

fn depth_rank_identity(ctx: &mut Ctx) -> Outcome {
    for _ in 0..10_000 {
        let x = ctx.wide();
        ensure!(x.depth()? == x.depth_from_rank()?, "identity fails at {x}");
    }
    Ok("10000 points".into())
}

fn phi_mediant(ctx: &mut Ctx) -> Outcome {
    for _ in 0..10_000 {
        let m = ctx.word(40).matrix::<BigUint>();
        let (a, b) = (m.left_parent(), m.right_parent());
        ensure!(a.is_unimodular_with(&b), "{a}, {b} are not neighbours");
        ensure!(a.mediant(&b).phi() == a.phi().mediant(&b.phi()), "phi breaks the mediant of {a}, {b}");
    }
    Ok("10000 pairs".into())
}

fn complement_involution(ctx: &mut Ctx) -> Outcome {
    for _ in 0..10_000 {
        let x = ctx.unit();
        let c = ContFrac::from_rat(&x)?;
        let d = c.complement()?;
        ensure!(d.complement()? == c, "complement twice moves {c}");
        ensure!(big(&d.to_rat()) == BigRational::one() - big(&x), "complement of {c} is not 1 - x");
    }
    Ok("10000 points".into())
}

// ---- lr-coding ----

fn det_one(ctx: &mut Ctx) -> Outcome {
    for _ in 0..10_000 {
        let w = ctx.word(16);
        ensure!(matrix_from_word::<BigUint>(&w).det().is_one(), "det of {w:?} is not 1");
    }
    Ok("10000 words".into())
}

fn word_roundtrip(_: &mut Ctx) -> Outcome {
    for k in 1..=12u32 {
        for x in level::<BigUint>(TreeSpec::SB, k)? {
            let w = word_from_cf(&ContFrac::from_rat(&x)?)?;
            ensure!(w.len() == k as usize - 1, "word of {x} has length {}", w.len());
            ensure!(rat_from_matrix(&matrix_from_word::<BigUint>(&w))? == x, "round trip moves {x}");
        }
    }
    Ok("levels 1..12".into())
}

fn hat_involution(_: &mut Ctx) -> Outcome {
    for x in levels_upto::<BigUint>(TreeSpec::SB, 12)? {
        let h = hat(&x)?;
        ensure!(hat(&h)? == x, "hat is not an involution at {x}");
        ensure!(h.depth()? == x.depth()?, "hat changes the depth of {x}");
        ensure!(word_of(&h)? == word_of(&x)?.reversed(), "hat({x}) is not the reversed word");
    }
    Ok("levels 1..12".into())
}

fn neighbour_unimodular(_: &mut Ctx) -> Outcome {
    for k in 1..=12u32 {
        let mut all: Vec<Q> = levels_upto::<BigUint>(TreeSpec::SB, k)?.collect();
        all.push(Q::zero());
        all.push(Q::infinity());
        all.sort();
        for w in all.windows(2) {
            ensure!(w[0].is_unimodular_with(&w[1]), "{} and {} are adjacent but not unimodular", w[0], w[1]);
        }
    }
    Ok("levels <= 12 with both ancestors".into())
}

fn pi_prefix(_: &mut Ctx) -> Outcome {
    for x in levels_upto::<BigUint>(TreeSpec::SB, 12)? {
        let code = pi_code(&x)?;
        let w = word_of(&x)?;
        ensure!(code.prefix.letters().starts_with(w.letters()), "pi({x}) does not start with word({x})");
    }
    Ok("levels 1..12".into())
}

fn code_order(ctx: &mut Ctx) -> Outcome {
    for i in 0..10_000 {
        let a = ctx.pos();
        let b = if i % 10 == 0 { a.clone() } else { ctx.pos() };
        let got = code_compare(&pi_code(&a)?, &pi_code(&b)?);
        ensure!(got == CodeOrdering::Known(a.cmp(&b)), "codes of {a} and {b} compare as {got:?}");
    }
    Ok("10000 pairs".into())
}

// ---- tree-gen ----

fn permuted_is_hat(_: &mut Ctx) -> Outcome {
    for k in 1..=12u32 {
        let sb = levels_list(TreeSpec::SB, k)?;
        let sb_hat = levels_list(TreeSpec::SB_HAT, k)?;
        let farey = levels_list(TreeSpec::FAREY, k)?;
        let farey_hat = levels_list(TreeSpec::FAREY_HAT, k)?;
        let dy = levels_list(TreeSpec::DYADIC, k)?;
        let dy_hat = levels_list(TreeSpec::DYADIC_HAT, k)?;
        for i in 0..sb.len() {
            ensure!(sb_hat[i] == hat(&sb[i])?, "level {k} entry {i}: permuted tree is not hat");
            ensure!(farey[i] == sb[i].phi(), "level {k} entry {i}: Farey is not phi of Stern-Brocot");
            ensure!(farey_hat[i] == sb_hat[i].phi(), "level {k} entry {i}: permuted Farey is not phi");
            ensure!(dy[i] == qmark(&farey[i])?.to_ext_rat(), "level {k} entry {i}: dyadic is not ?");
            ensure!(dy_hat[i] == qmark(&farey_hat[i])?.to_ext_rat(), "level {k} entry {i}: permuted dyadic is not ?");
        }
    }
    Ok("levels 1..12 of all six trees".into())
}

fn calkin_wilf(_: &mut Ctx) -> Outcome {
    let mut i = 2u64;
    for x in levels_upto::<u64>(TreeSpec::SB_HAT, 16)? {
        let (b0, b1) = (hyperbinary(i - 2), hyperbinary(i - 1));
        ensure!((*x.num(), *x.den()) == (b0, b1), "x_{i} = {x}, expected {b0}/{b1}");
        i += 1;
    }
    Ok(format!("x_2 .. x_{}", i - 1))
}

fn neighbour_chaining(_: &mut Ctx) -> Outcome {
    let all: Vec<ExtRat<u64>> = levels_upto(TreeSpec::SB_HAT, 16)?.collect();
    for w in all.windows(2) {
        ensure!(w[0].den() == w[1].num(), "{} is followed by {}", w[0], w[1]);
    }
    Ok(format!("{} consecutive pairs", all.len() - 1))
}

fn qmark_farey_dyadic(_: &mut Ctx) -> Outcome {
    for k in 1..=12u32 {
        for (spec, target) in [(TreeSpec::FAREY, TreeSpec::DYADIC), (TreeSpec::FAREY_HAT, TreeSpec::DYADIC_HAT)] {
            let img: Vec<Q> = level::<BigUint>(spec, k)?
                .map(|x| qmark(&x).map(|d| d.to_ext_rat()))
                .collect::<Result<_>>()?;
            ensure!(img == levels_list(target, k)?, "? of {} level {k} differs", spec.kind.name());
        }
    }
    Ok("levels 1..12, plain and permuted".into())
}

fn bijection(_: &mut Ctx) -> Outcome {
    let mut seen = HashSet::new();
    for x in levels_upto::<BigUint>(TreeSpec::SB, 12)? {
        ensure!(seen.insert(x.clone()), "{x} appears twice");
    }
    let positive: Vec<Vec<u64>> = canonical_cfs(12).into_iter().filter(|t| t != &[0]).collect();
    ensure!(positive.len() == seen.len(), "{} rationals of depth <= 12 but {} tree entries", positive.len(), seen.len());
    for t in &positive {
        let x = eval_terms(&t.iter().map(|&a| BigUint::from(a)).collect::<Vec<_>>());
        ensure!(seen.contains(&x), "{x} is missing from levels 1..12");
    }
    Ok(format!("{} rationals", seen.len()))
}

// ---- minkowski ----

fn qmark_symmetry(ctx: &mut Ctx) -> Outcome {
    for _ in 0..10_000 {
        let x = ctx.closed_unit();
        let s = qmark(&x)?.add(&qmark(&x.one_minus()?)?);
        ensure!(s == Dyadic::one(), "?({x}) + ?(1-{x}) = {s}");
    }
    Ok("10000 points".into())
}

fn rho_reciprocal(ctx: &mut Ctx) -> Outcome {
    let mut xs = vec![Q::zero(), Q::infinity(), Q::one()];
    xs.extend((0..10_000).map(|_| ctx.pos()));
    for x in &xs {
        let s = rho(x)?.add(&rho(&x.recip())?);
        ensure!(s == Dyadic::one(), "rho({x}) + rho(1/{x}) = {s}");
    }
    Ok(format!("{} points including 0 and inf", xs.len()))
}

fn mediant_average(_: &mut Ctx) -> Outcome {
    for x in levels_upto::<BigUint>(TreeSpec::SB, 12)? {
        let (a, b) = parents(&x)?;
        ensure!(rho(&x)? == rho(&a)?.add(&rho(&b)?).half(), "rho({x}) is not the average over {a}, {b}");
    }
    Ok("all unimodular parent pairs of levels 1..12".into())
}

fn qmark_monotone(_: &mut Ctx) -> Outcome {
    let mut xs: Vec<Q> = levels_upto::<BigUint>(TreeSpec::FAREY, 12)?.collect();
    xs.push(Q::zero());
    xs.push(Q::one());
    xs.sort();
    let vals: Vec<Dyadic<BigUint>> = xs.iter().map(qmark).collect::<Result<_>>()?;
    for (i, w) in vals.windows(2).enumerate() {
        ensure!(w[0] < w[1], "? is not increasing between {} and {}", xs[i], xs[i + 1]);
    }
    Ok(format!("{} sorted points", xs.len()))
}

fn farey_branch_mass(a: &Q, b: &Q) -> Result<BigRational> {
    let right = |y: &Q| Q::new(y.den().clone(), y.den() * 2u8 - y.num()).expect("y <= 1");
    let qm = |y: &Q| qmark(y).map(|d| d.to_big_rational());
    Ok(qm(&phi0(b))? - qm(&phi0(a))? + qm(&right(b))? - qm(&right(a))?)
}

fn f_invariance(ctx: &mut Ctx) -> Outcome {
    let desk = farey_branch_mass(&q(1, 3), &q(2, 3))?;
    ensure!(desk == BigRational::new(1.into(), 2.into()), "desk interval gives {desk}");
    for _ in 0..100 {
        let (mut a, mut b) = (ctx.closed_unit(), ctx.closed_unit());
        if a == b {
            continue;
        }
        if a > b {
            std::mem::swap(&mut a, &mut b);
        }
        let lhs = farey_branch_mass(&a, &b)?;
        let rhs = qmark(&b)?.to_big_rational() - qmark(&a)?.to_big_rational();
        ensure!(lhs == rhs, "[{a}, {b}]: branch mass {lhs} vs {rhs}");
    }
    Ok("[1/3,2/3] -> 1/4 + 1/4 = 1/2 and 100 intervals".into())
}

fn rho_dilation(ctx: &mut Ctx) -> Outcome {
    ensure!(rho(&q(2, 5))? == Dyadic::new(3u8.into(), 4), "rho(2/5) != 3/16");
    ensure!(rho(&q(2, 3))? == Dyadic::new(3u8.into(), 3), "rho(2/3) != 3/8");
    for _ in 0..10_000 {
        let x = ctx.pos();
        let lhs = rho(&x)?.double();
        let rhs = if x < Q::one() {
            let y = Q::new(x.num().clone(), x.den() - x.num())?;
            rho(&y)?
        } else {
            let y = Q::new(x.num() - x.den(), x.den().clone())?;
            rho(&y)?.add(&Dyadic::one())
        };
        ensure!(lhs == rhs, "2 rho({x}) = {lhs}, expected {rhs}");
    }
    Ok("10000 points and the 2/5 instance".into())
}

fn roundtrip(ctx: &mut Ctx) -> Outcome {
    for _ in 0..5_000 {
        let x = ctx.closed_unit();
        ensure!(qmark_inv(&qmark(&x)?)? == x, "qmark_inv(qmark({x})) differs");
        let y = ctx.pos();
        ensure!(rho_inv(&rho(&y)?)? == y, "rho_inv(rho({y})) differs");
        let d = Dyadic::new(BigUint::from(ctx.below(1 << 20)), 20);
        ensure!(qmark(&qmark_inv(&d)?)? == d, "qmark(qmark_inv({d})) differs");
    }
    Ok("5000 points in each direction".into())
}

fn distribution_bound(ctx: &mut Ctx) -> Outcome {
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let x = ctx.pos();
        let r = rho(&x)?.to_big_rational();
        for k in 1..=16u32 {
            let gap = (&r - distribution_estimate(TreeSpec::SB, k, &x)?).abs();
            let scaled = gap * BigRational::from_integer(num_bigint::BigInt::one() << k);
            ensure!(scaled <= BigRational::one(), "k={k}, x={x}: gap exceeds 2^-k");
            worst = worst.max(scaled.to_f64().unwrap_or(f64::NAN));
        }
    }
    Ok(format!("100 points, k <= 16, max 2^k gap {worst:.4}"))
}

// ---- interval-maps ----

fn bijectivity(ctx: &mut Ctx) -> Outcome {
    for _ in 0..10_000 {
        let pairs = [(MapId::R, ctx.pos()), (MapId::S, ctx.closed_unit()), (MapId::T, ctx.closed_unit())];
        for (m, x) in pairs {
            let y = apply(m, &x)?;
            ensure!(apply_inverse(m, &y)? == x, "{m} is not inverted at {x}");
        }
    }
    Ok("10000 points per map".into())
}

fn orbit_counting(_: &mut Ctx) -> Outcome {
    for (m, start, spec) in [
        (MapId::R, Q::infinity(), TreeSpec::SB_HAT),
        (MapId::S, Q::one(), TreeSpec::FAREY_HAT),
        (MapId::T, Q::one(), TreeSpec::DYADIC_HAT),
    ] {
        let xs: Vec<Q> = orbit(m, &start, (1 << 12) + 1)?.collect();
        for k in 1..=12u32 {
            let row = &xs[(1usize << (k - 1)) + 1..=(1usize << k)];
            ensure!(row == &levels_list(spec, k)?[..], "{m} orbit differs from row {k}");
        }
    }
    Ok("R, S, T against rows 1..12".into())
}

fn orbit_powers(_: &mut Ctx) -> Outcome {
    let xs: Vec<ExtRat<u64>> = orbit(MapId::R, &ExtRat::infinity(), (1 << 16) + 1)?.collect();
    for n in 0..=16u64 {
        ensure!(xs[1 << n] == ExtRat::integer(n), "x_(2^{n}) = {}", xs[1 << n]);
    }
    Ok("n = 0..16".into())
}

fn log_diffusion(_: &mut Ctx) -> Outcome {
    let mut max = ExtRat::<u64>::zero();
    for (i, x) in orbit(MapId::R, &ExtRat::infinity(), (1 << 16) + 1)?.enumerate().skip(1) {
        if x > max {
            max = x;
        }
        let expect = 63 - (i as u64).leading_zeros() as u64;
        ensure!(max.floor()? == expect, "N={i}: running max {max}, floor(log2 N) = {expect}");
    }
    Ok("N = 1..2^16".into())
}

fn conjugacy(ctx: &mut Ctx) -> Outcome {
    let mut unit: Vec<Q> = vec![Q::zero(), Q::one()];
    unit.extend(levels_upto::<BigUint>(TreeSpec::FAREY, 12)?);
    let mut half: Vec<Q> = vec![Q::zero(), Q::infinity()];
    half.extend(levels_upto::<BigUint>(TreeSpec::SB, 12)?);
    for _ in 0..10_000 {
        unit.push(ctx.closed_unit());
        half.push(ctx.pos());
    }
    let mut n = 0;
    for d in Diagram::ALL {
        let xs = if d.on_half_line() { &half } else { &unit };
        for x in xs {
            let r = conjugacy_residual(d, x)?;
            ensure!(r.is_zero(), "{} residual {r} at {x}", d.name());
            n += 1;
        }
    }
    Ok(format!("{n} evaluations, all residuals 0"))
}

fn s_cf_action(ctx: &mut Ctx) -> Outcome {
    for i in 0..1_000 {
        let x = if i == 0 { Q::zero() } else { ctx.unit() };
        let (a, b) = (apply(MapId::S, &x)?, s_by_cf_action(&x)?);
        ensure!(a == b, "S({x}) = {a} but the expansion gives {b}");
    }
    Ok("1000 points".into())
}

fn g_retrace_check(_: &mut Ctx) -> Outcome {
    for x in levels_upto::<BigUint>(TreeSpec::SB, 12)? {
        let (w, end) = g_retrace(&x)?;
        ensure!(w == word_of(&x)?, "G-itinerary of {x} is not its word");
        ensure!(end.is_one(), "G^(depth-1)({x}) = {end}");
    }
    Ok("levels 1..12".into())
}

fn fixed_points(_: &mut Ctx) -> Outcome {
    ensure!(apply(MapId::F, &Q::zero())?.is_zero(), "F(0) != 0");
    ensure!(apply(MapId::F, &Q::one())?.is_one(), "F(1) != 1");
    let one = BigRational::one();
    let (mut prev0, mut prev1) = (f64::INFINITY, f64::INFINITY);
    for j in 1..=40u64 {
        let h = Q::new(BigUint::one(), BigUint::one() << j)?;
        let d0 = (crate::maps::farey_difference_quotient(&h)? - &one).abs();
        let left = apply(MapId::F, &h.one_minus()?)?;
        let d1 = ((&one - big(&left)) / big(&h) - &one).abs();
        let (e0, e1) = (d0.to_f64().unwrap_or(f64::NAN), d1.to_f64().unwrap_or(f64::NAN));
        ensure!(e0 < prev0 && e1 < prev1, "difference quotients stop approaching 1 at h = 2^-{j}");
        (prev0, prev1) = (e0, e1);
    }
    Ok(format!("|quotient - 1| at h = 2^-40: {prev0:.3e} (at 0), {prev1:.3e} (at 1)"))
}

fn eigenfunctions(ctx: &mut Ctx) -> Outcome {
    let mut n = 0;
    for i in 0..1_000 {
        let x = if i % 4 == 0 {
            Q::new(BigUint::from(ctx.below(1 << 16)), BigUint::one() << 16)?
        } else {
            ctx.unit()
        };
        for m in 1..=12 {
            for map in [MapId::T, MapId::S] {
                let c = eigenfunction_check(m, &x, map)?;
                ensure!(c.exact_ok, "{map}, m={m}, x={x}: v = {} -> {}", c.v_x, c.v_image);
                ensure!((c.lhs - c.rhs).norm() < 1e-9, "{map}, m={m}, x={x}: phases differ");
                n += 1;
            }
        }
    }
    Ok(format!("{n} exact digit checks"))
}

fn stack_intervals(_: &mut Ctx) -> Outcome {
    for n in 0..=8u32 {
        let top = 1u64 << n;
        let a1 = stack_interval::<BigUint>(StackFamily::A, 1, n)?;
        ensure!(a1.left.is_zero() && a1.right == Q::new(BigUint::one(), BigUint::one() << n)?, "A(1,{n}) wrong");
        for i in 1..top {
            for (fam, m) in [(StackFamily::A, MapId::T), (StackFamily::B, MapId::S), (StackFamily::C, MapId::R)] {
                let cur = stack_interval::<BigUint>(fam, i, n)?;
                let next = stack_interval::<BigUint>(fam, i + 1, n)?;
                ensure!(apply(m, &cur.left)? == next.left, "{m} does not carry {fam:?}({i},{n}) to the next");
            }
        }
    }
    Ok("stages 0..8".into())
}

fn fourier_gap(n: i64, k: u32) -> Result<f64> {
    let tree: Complex64 = fourier_tree::<BigUint, f64>(TreeSpec::SB, n, k)?;
    let erg = ergodic_fourier(n, &Q::one(), 1 << k, MapId::R)?;
    Ok((tree - erg).norm())
}

fn fourier_cross(_: &mut Ctx) -> Outcome {
    let mut worst = (0.0f64, 0.0f64);
    for n in 1..=4 {
        let (g14, g16) = (fourier_gap(n, 14)?, fourier_gap(n, 16)?);
        ensure!(g16 <= 0.02, "n={n}: gap {g16:.3e} at k=16");
        worst = (worst.0.max(g14), worst.1.max(g16));
    }
    ensure!(worst.1 < worst.0, "largest gap did not shrink: {:.3e} -> {:.3e}", worst.0, worst.1);
    Ok(format!("max gap {:.3e} (k=14) -> {:.3e} (k=16)", worst.0, worst.1))
}

// ---- operators ----

fn one_fn(_: &Q) -> Option<BigRational> {
    Some(BigRational::one())
}

fn h1_fn(x: &Q) -> Option<BigRational> {
    Some(h1(x))
}

fn points_with_ends(ctx: &mut Ctx, n: usize) -> Vec<Q> {
    let mut xs = vec![Q::zero(), Q::infinity(), Q::one()];
    xs.extend((0..n).map(|_| ctx.pos()));
    xs
}

fn row_stochastic(ctx: &mut Ctx) -> Outcome {
    for x in points_with_ends(ctx, 10_000) {
        for kind in [MarkovKind::Mc0, MarkovKind::Mc1] {
            let (p0, p1) = transition_probs(kind, &x);
            ensure!((&p0 + &p1).is_one(), "{} probabilities at {x} sum to {}", kind.name(), p0 + p1);
            let v: BigRational = markov_apply(kind, one_fn, &x)?;
            ensure!(v.is_one(), "{} P1({x}) = {v}", kind.name());
        }
    }
    Ok("10003 points, both chains".into())
}

/// `C` in the bound `|Δ_k| ≤ C 2^{−k}`.
const P0_BOUND: f64 = 16.0;

fn p0_rho_invariance(_: &mut Ctx) -> Outcome {
    let f = |y: &Q| e_n::<BigUint, f64>(1, y);
    let pf = |y: &Q| (f(&phi0(y)) + f(&phi1(y))) * 0.5;
    let mut prev = f64::INFINITY;
    let mut scaled = Vec::new();
    for k in 12..=18u32 {
        let d = (stieltjes_mean::<BigUint, f64, _>(TreeSpec::SB, k, pf)?
            - stieltjes_mean::<BigUint, f64, _>(TreeSpec::SB, k, f)?)
        .norm();
        ensure!(d < prev, "difference grew at k={k}: {d:.3e}");
        ensure!(d * f64::from(1u32 << k) <= P0_BOUND, "k={k}: 2^k * difference = {:.3}", d * f64::from(1u32 << k));
        scaled.push(format!("{:.2}", d * f64::from(1u32 << k)));
        prev = d;
    }
    Ok(format!("2^k * difference for k = 12..18: {}", scaled.join(", ")))
}

fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let inner: f64 = (1..n).map(|i| f(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 }).sum();
    (f(a) + f(b) + inner) * h / 3.0
}

fn nu_invariance(ctx: &mut Ctx) -> Outcome {
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let (mut a, mut b) = (ctx.pos(), ctx.pos());
        if a == b {
            continue;
        }
        if a > b {
            std::mem::swap(&mut a, &mut b);
        }
        let [s0, s1] = nu_invariance_args(&a, &b)?;
        ensure!(s0.0 == s0.1 && s1.0 == s1.1, "log arguments differ on [{a}, {b}]");
        let closed = big(&b) * (BigRational::one() + big(&a)) / (big(&a) * (BigRational::one() + big(&b)));
        ensure!(s0.0 == closed, "branch 0 on [{a}, {b}] is not log(b(1+a)/(a(1+b)))");
        {
            // integrate in u = ln x so that both sides are smooth
            let (la, lb) = (a.to_f64().ln(), b.to_f64().ln());
            for (s, args) in [(0, &s0), (1, &s1)] {
                let p = |u: f64| {
                    let x = u.exp();
                    if s == 0 { 1.0 / (1.0 + x) } else { x / (1.0 + x) }
                };
                let quad = simpson(p, la, lb, 2_000);
                let exact = args.0.to_f64().unwrap_or(f64::NAN).ln();
                worst = worst.max((quad - exact).abs());
            }
        }
    }
    ensure!(worst < 1e-9, "quadrature error {worst:.3e}");
    Ok(format!("100 intervals exact; quadrature error {worst:.1e}"))
}

fn harmonicity(ctx: &mut Ctx) -> Outcome {
    for x in points_with_ends(ctx, 10_000) {
        for kind in [MarkovKind::Mc0, MarkovKind::Mc1] {
            let c: BigRational = commutator_residual(kind, one_fn, &x)?;
            ensure!(c.is_zero(), "{} commutator of 1 at {x}: {c}", kind.name());
        }
        let p: BigRational = markov_apply(MarkovKind::Mc1, h1_fn, &x)?;
        ensure!(p == h1::<BigUint, BigRational>(&x), "P h1({x}) = {p}");
        let c: BigRational = commutator_residual(MarkovKind::Mc1, h1_fn, &x)?;
        ensure!(c.is_zero(), "MC1 commutator of h1 at {x}: {c}");
    }
    Ok("10003 points including 0 and inf".into())
}

fn transfer_fixed(ctx: &mut Ctx) -> Outcome {
    let g = TransferKind::new(Generator::G, 1.0)?;
    let fy = TransferKind::new(Generator::Farey, 1.0)?;
    let inv = |y: &Q| (!y.is_zero()).then(|| big(&y.recip()));
    let mu = |y: &Q| {
        let r = big(y);
        (!r.is_zero() && !r.is_one()).then(|| (r.clone() * (BigRational::one() - r)).recip())
    };
    for _ in 0..1_000 {
        let x = ctx.pos();
        let v: BigRational = transfer_apply(g, inv, &x)?;
        ensure!(Some(v.clone()) == inv(&x), "L1(1/x) at {x} is {v}");
        let u = ctx.unit();
        let w: BigRational = transfer_apply(fy, mu, &u)?;
        ensure!(Some(w.clone()) == mu(&u), "Farey transfer of the density at {u} is {w}");
    }
    Ok("1000 points each".into())
}

fn inv_square(y: &ExtRat<BigUint>) -> Option<f64> {
    if y.is_infinite() {
        return Some(0.0);
    }
    let t = 1.0 + y.to_f64();
    Some(1.0 / (t * t))
}

fn power_vs_montecarlo(ctx: &mut Ctx) -> Outcome {
    let mut z_max = 0.0f64;
    for (kind, start) in [(MarkovKind::Mc0, Q::one()), (MarkovKind::Mc1, Q::one()), (MarkovKind::Mc1, q(2, 3))] {
        let exact: f64 = markov_power(kind, inv_square, &start, 12)?;
        let spec = ChainSpec::new(kind, start.clone(), 12, ctx.seed)?;
        let (mean, se) = monte_carlo_mean(&spec, inv_square, 100_000)?;
        let z = (mean - exact).abs() / se;
        ensure!(z <= 3.0, "{} from {start}: exact {exact:.6}, walks {mean:.6} +- {se:.2e}", kind.name());
        z_max = z_max.max(z);
    }
    Ok(format!("three chains, largest deviation {z_max:.2} standard errors"))
}

fn mc0_limit(_: &mut Ctx) -> Outcome {
    let one = |_: &Q| Some(1.0);
    let (v, r) = crate::stochastic::mc0_limit_experiment(one, &Q::one(), 10)?;
    ensure!(v == 1.0 && r == 1023.0 / 1024.0, "f = 1 gives ({v}, {r})");
    let (v, r) = crate::stochastic::mc0_limit_experiment(inv_square, &Q::one(), 20)?;
    let g1 = (v - r).abs();
    ensure!(g1 <= 1e-2, "1/(1+y)^2 at n = 20: gap {g1:.3e}");
    let cos = |y: &Q| Some(if y.is_infinite() { 1.0 } else { e_n::<BigUint, f64>(1, y).re });
    let (v, r) = crate::stochastic::mc0_limit_experiment(cos, &Q::one(), 18)?;
    let g2 = (v - r).abs();
    ensure!(g2 <= 2e-2, "cos(2 pi y) at n = 18: gap {g2:.3e}");
    Ok(format!("gaps {g1:.2e} (1/(1+y)^2, n=20), {g2:.2e} (cos, n=18)"))
}

// ---- stochastic ----

fn cylinder_symmetry(ctx: &mut Ctx) -> Outcome {
    for _ in 0..1_000 {
        let x = ctx.pos();
        let w = ctx.bits(12);
        let flipped: Vec<u8> = w.iter().map(|b| 1 - b).collect();
        let a = cylinder_prob(MarkovKind::Mc1, &x, &w)?;
        let b = cylinder_prob(MarkovKind::Mc1, &x.recip(), &flipped)?;
        ensure!(a == b, "x={x}, w={w:?}: {a} vs {b}");
        let n = ctx.range(1, 64);
        let ones = cylinder_prob(MarkovKind::Mc1, &x, &vec![1; n as usize])?;
        let xr = big(&x);
        ensure!(ones == &xr / (&xr + BigRational::from_integer(n.into())), "1^{n} from {x}: {ones}");
        let m = w.len() as u32;
        ensure!(
            cylinder_prob(MarkovKind::Mc0, &x, &w)? == BigRational::new(1.into(), num_bigint::BigInt::one() << m),
            "MC0 cylinder of length {m} is not 2^-{m}"
        );
    }
    Ok("1000 cases".into())
}

fn letter_frequencies(ctx: &mut Ctx) -> Outcome {
    let walks = 20_000u64;
    let spec = ChainSpec::new(MarkovKind::Mc0, ctx.pos(), 64, ctx.seed)?;
    let mut ones = 0u64;
    for w in 0..walks {
        ones += Walk::new(&spec, w).map(|(b, _)| u64::from(b)).sum::<u64>();
    }
    let n = (walks * 64) as f64;
    let z0 = (ones as f64 / n - 0.5).abs() / (0.25 / n).sqrt();
    ensure!(z0 <= 3.0, "MC0 letter frequency off by {z0:.2} sigma");
    let mut z_max = 0.0f64;
    for start in [q(1, 1), q(1, 3), q(5, 2)] {
        let spec = ChainSpec::new(MarkovKind::Mc1, start.clone(), 2, ctx.seed)?;
        let mut counts = [0u64; 4];
        for w in 0..walks {
            let l: Vec<u8> = Walk::new(&spec, w).map(|(b, _)| b).collect();
            counts[usize::from(l[0] * 2 + l[1])] += 1;
        }
        for (i, &c) in counts.iter().enumerate() {
            let word = [(i >> 1) as u8, (i & 1) as u8];
            let p = cylinder_prob(MarkovKind::Mc1, &start, &word)?.to_f64().unwrap_or(f64::NAN);
            let z = (c as f64 / walks as f64 - p).abs() / (p * (1.0 - p) / walks as f64).sqrt();
            ensure!(z <= 3.0, "MC1 from {start}: word {word:?} off by {z:.2} sigma");
            z_max = z_max.max(z);
        }
    }
    Ok(format!("MC0 {z0:.2} sigma; MC1 two-letter marginals within {z_max:.2} sigma"))
}

fn reproducible(ctx: &mut Ctx) -> Outcome {
    let spec = ChainSpec::new(MarkovKind::Mc1, ctx.pos(), 256, ctx.seed)?;
    let iv = (q(2, 5), q(3, 5));
    let base = run_walks(&spec, 200, Some(&iv))?;
    for threads in [1, 2, 8] {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| Failure(format!("thread pool: {e}")))?;
        let again = pool.install(|| run_walks(&spec, 200, Some(&iv)))?;
        ensure!(again == base, "run_walks differs with {threads} threads");
        for w in [0, 7, 199] {
            ensure!(pool.install(|| simulate(&spec, w)) == simulate(&spec, w), "walk {w} differs with {threads} threads");
        }
    }
    Ok("200 walks, pools of 1, 2 and 8 threads".into())
}

fn hitting_curve(ctx: &mut Ctx) -> Outcome {
    let r = hitting_experiment(&(q(2, 5), q(3, 5)), 10_000, 1_000, ctx.seed)?;
    ensure!(r.is_nondecreasing(), "hitting curve decreases");
    ensure!(r.fraction >= 0.95, "hitting fraction {}", r.fraction);
    Ok(format!("fraction {:.4}", r.fraction))
}

fn mc1_no_atoms(ctx: &mut Ctx) -> Outcome {
    for n in [1u64, 16, 256, MAX_CYLINDER_LEN as u64] {
        let x = Q::one();
        let ones = cylinder_prob(MarkovKind::Mc1, &x, &vec![1; n as usize])?;
        let zeros = cylinder_prob(MarkovKind::Mc1, &x, &vec![0; n as usize])?;
        let expect = BigRational::new(1.into(), (n + 1).into());
        ensure!(ones == expect && zeros == expect, "constant words of length {n} do not have mass 1/(n+1)");
    }
    let spec = ChainSpec::new(MarkovKind::Mc1, Q::one(), 1 << 10, ctx.seed)?;
    let walks = 1_000u64;
    let (mut both, mut windows) = (0u64, 0u64);
    for w in 0..walks {
        let l: Vec<u8> = Walk::new(&spec, w).map(|(b, _)| b).collect();
        if l.contains(&0) && l.contains(&1) {
            both += 1;
        }
        if crate::stochastic::both_letters_in_every_window(&l, crate::stochastic::ALTERNATION_WINDOW) {
            windows += 1;
        }
    }
    let frac = both as f64 / walks as f64;
    ensure!(frac >= 0.99, "only {frac:.3} of paths contain both letters");
    Ok(format!(
        "both letters in {frac:.3} of paths; every-64-window fraction {:.3} (diagnostic)",
        windows as f64 / walks as f64
    ))
}

fn martingale(ctx: &mut Ctx) -> Outcome {
    let spec1 = ChainSpec::new(MarkovKind::Mc1, Q::one(), 64, ctx.seed)?;
    let r = martingale_check(&spec1, one_fn, 200, 6, 20)?;
    ensure!(r.identity_holds && r.max_deviation == 0.0, "h = 1 deviates by {}", r.max_deviation);
    let r = martingale_check(&spec1, h1_fn, 200, 6, 20)?;
    ensure!(r.identity_holds, "P h1 = h1 fails along a path");
    // rho is not harmonic for MC0: the one-step mean is rho/2 + 1/4, which
    // equals rho only at y = 1
    let spec0 = ChainSpec::new(MarkovKind::Mc0, Q::one(), 64, ctx.seed)?;
    let quarter = BigRational::new(1.into(), 4.into());
    let (mut states, mut fixed) = (0u64, 0u64);
    for w in 0..200 {
        for y in simulate(&spec0, w).states {
            let r = rho(&y)?.to_big_rational();
            let mean = (rho(&phi0(&y))?.to_big_rational() + rho(&phi1(&y))?.to_big_rational()) / BigRational::from_integer(2.into());
            ensure!(mean == &r / BigRational::from_integer(2.into()) + &quarter, "one-step mean of rho at {y} is {mean}");
            states += 1;
            if mean == r {
                fixed += 1;
                ensure!(y.is_one(), "rho is harmonic at {y}");
            }
        }
    }
    Ok(format!("1 and h1 exact; rho one-step mean = rho/2 + 1/4 at {states} states, harmonic only at 1 ({fixed} visits)"))
}
