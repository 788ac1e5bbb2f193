//! Realisations of the two random walks on `[0, ∞]`,
//! `W_n = Φ_{ω_n} ∘ ⋯ ∘ Φ_{ω_1}(x)` with the newest letter applied outermost.
//!
//! Walk `i` of a run draws from ChaCha8 seeded with the run seed on stream
//! `i`, so every walk is reproducible on its own and a parallel run matches a
//! serial one bit for bit.

use num_bigint::BigUint;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use rayon::prelude::*;

use crate::error::{check_cap, Error, Result};
use crate::exact::ExtRat;
use crate::minkowski::stieltjes_mean;
use crate::natural::Natural;
use crate::operators::{markov_power, phi0, phi1, transition_probs, MarkovKind};
use crate::tree::TreeSpec;

pub const DEFAULT_SEED: u64 = 0x5eed_2024;

/// Largest horizon accepted by [`simulate`].
pub const MAX_HORIZON: u64 = 1 << 20;

/// Longest word accepted by [`cylinder_prob`]; paths up to this horizon also
/// carry their exact probability.
pub const MAX_CYLINDER_LEN: usize = 1 << 10;

/// Default cap on the number of walks in one run.
pub const DEFAULT_WALK_CAP: u64 = 1_000_000;

/// Window length of the alternation diagnostic.
pub const ALTERNATION_WINDOW: usize = 64;

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ChainSpec<T> {
    pub kind: MarkovKind,
    pub start: ExtRat<T>,
    pub horizon: u64,
    pub seed: u64,
}

impl<T: Natural> ChainSpec<T> {
    pub fn new(kind: MarkovKind, start: ExtRat<T>, horizon: u64, seed: u64) -> Result<Self> {
        if horizon == 0 {
            return Err(crate::error::domain("horizon (needs >= 1)", 0));
        }
        check_cap("horizon", horizon, MAX_HORIZON)?;
        Ok(Self {
            kind,
            start,
            horizon,
            seed,
        })
    }

    /// The symmetric walk on the permuted Stern-Brocot tree: MC0 from 1.
    pub fn tree_walk(horizon: u64, seed: u64) -> Result<Self> {
        Self::new(MarkovKind::Mc0, ExtRat::one(), horizon, seed)
    }
}

/// A simulated path. `states[k] = Φ_{letters[k−1]}(states[k−1])`, `states[0]`
/// is the start.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct WalkPath<T> {
    pub states: Vec<ExtRat<T>>,
    pub letters: Vec<u8>,
    /// Exact probability of the letter prefix from the start; kept for
    /// horizons up to [`MAX_CYLINDER_LEN`].
    pub prob: Option<BigRational>,
}

pub fn walk_rng(seed: u64, walk: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(walk);
    rng
}

/// `1` with probability `p(1, x)`: the top 64 random bits `U` give
/// `1 iff U (p+q) < p 2^64` for `x = p/q`.
pub fn sample_letter<T: Natural>(kind: MarkovKind, x: &ExtRat<T>, rng: &mut impl RngCore) -> u8 {
    let u = rng.next_u64();
    match kind {
        MarkovKind::Mc0 => (u >> 63) as u8,
        MarkovKind::Mc1 => {
            let (p, q) = (x.num(), x.den());
            if let (Some(p), Some(q)) = (p.to_u64(), q.to_u64()) {
                let s = u128::from(p) + u128::from(q);
                if let Some(lhs) = u128::from(u).checked_mul(s) {
                    return u8::from(lhs < (u128::from(p) << 64));
                }
            }
            let s = p.to_biguint() + q.to_biguint();
            u8::from(BigUint::from(u) * s < p.to_biguint() << 64u32)
        }
    }
}

pub fn step<T: Natural>(letter: u8, x: &ExtRat<T>) -> ExtRat<T> {
    if letter == 0 {
        phi0(x)
    } else {
        phi1(x)
    }
}

/// Step-by-step walk: yields `(letter, new state)`.
pub struct Walk<T> {
    kind: MarkovKind,
    state: ExtRat<T>,
    rng: ChaCha8Rng,
    remaining: u64,
}

impl<T: Natural> Walk<T> {
    pub fn new(spec: &ChainSpec<T>, walk: u64) -> Self {
        Self {
            kind: spec.kind,
            state: spec.start.clone(),
            rng: walk_rng(spec.seed, walk),
            remaining: spec.horizon,
        }
    }
}

impl<T: Natural> Iterator for Walk<T> {
    type Item = (u8, ExtRat<T>);

    fn next(&mut self) -> Option<Self::Item> {
        if self.remaining == 0 {
            return None;
        }
        self.remaining -= 1;
        let letter = sample_letter(self.kind, &self.state, &mut self.rng);
        self.state = step(letter, &self.state);
        Some((letter, self.state.clone()))
    }
}

/// Walk number `walk` of the run described by `spec`.
pub fn simulate<T: Natural>(spec: &ChainSpec<T>, walk: u64) -> WalkPath<T> {
    let mut states = Vec::with_capacity(spec.horizon as usize + 1);
    let mut letters = Vec::with_capacity(spec.horizon as usize);
    states.push(spec.start.clone());
    for (l, s) in Walk::new(spec, walk) {
        letters.push(l);
        states.push(s);
    }
    let prob = (letters.len() <= MAX_CYLINDER_LEN)
        .then(|| cylinder_prob(spec.kind, &spec.start, &letters).expect("within cap"));
    WalkPath {
        states,
        letters,
        prob,
    }
}

/// The path with prescribed letters.
pub fn forced_walk<T: Natural>(kind: MarkovKind, start: &ExtRat<T>, letters: &[u8]) -> Result<WalkPath<T>> {
    let prob = cylinder_prob(kind, start, letters)?;
    let mut states = vec![start.clone()];
    for &l in letters {
        let next = step(l, states.last().expect("nonempty"));
        states.push(next);
    }
    Ok(WalkPath {
        states,
        letters: letters.to_vec(),
        prob: Some(prob),
    })
}

/// `P_x(C(i₁, …, iₙ)) = ∏ p(i_k, W_{k−1})`.
pub fn cylinder_prob<T: Natural>(kind: MarkovKind, x: &ExtRat<T>, word: &[u8]) -> Result<BigRational> {
    check_cap("cylinder word length", word.len() as u64, MAX_CYLINDER_LEN as u64)?;
    if let Some(&bad) = word.iter().find(|&&l| l > 1) {
        return Err(Error::Parse {
            input: bad.to_string(),
            reason: "letters are 0 or 1".into(),
        });
    }
    let mut prob = BigRational::one();
    let mut y = x.clone();
    for &l in word {
        let (p0, p1) = transition_probs(kind, &y);
        prob *= if l == 0 { p0 } else { p1 };
        if prob.is_zero() {
            break;
        }
        y = step(l, &y);
    }
    Ok(prob)
}

/// Per-walk outcome of a run with an optional target interval.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct WalkSummary<T> {
    pub walk: u64,
    /// First time `t ≥ 0` with `W_t ∈ (a, b)`.
    pub hit_time: Option<u64>,
    /// State at the hit, or after the full horizon.
    pub final_state: ExtRat<T>,
}

fn inside<T: Natural>(x: &ExtRat<T>, (a, b): &(ExtRat<T>, ExtRat<T>)) -> bool {
    a < x && x < b
}

fn check_interval<T: Natural>(interval: &(ExtRat<T>, ExtRat<T>)) -> Result<()> {
    if interval.0 >= interval.1 {
        return Err(Error::EmptyInterval(interval.0.to_string(), interval.1.to_string()));
    }
    Ok(())
}

/// Runs walks `0..walks`; with an interval each walk stops at its first hit.
pub fn run_walks<T: Natural>(
    spec: &ChainSpec<T>,
    walks: u64,
    interval: Option<&(ExtRat<T>, ExtRat<T>)>,
) -> Result<Vec<WalkSummary<T>>> {
    if let Some(iv) = interval {
        check_interval(iv)?;
    }
    Ok((0..walks)
        .into_par_iter()
        .map(|w| {
            let mut state = spec.start.clone();
            let mut hit_time = None;
            if interval.is_some_and(|iv| inside(&state, iv)) {
                hit_time = Some(0);
            } else {
                for (t, (_, s)) in Walk::new(spec, w).enumerate() {
                    state = s;
                    if interval.is_some_and(|iv| inside(&state, iv)) {
                        hit_time = Some(t as u64 + 1);
                        break;
                    }
                }
            }
            WalkSummary {
                walk: w,
                hit_time,
                final_state: state,
            }
        })
        .collect())
}

#[derive(Clone, PartialEq, Debug)]
pub struct HittingResult {
    pub walks: u64,
    pub hits: u64,
    pub fraction: f64,
    /// `curve[t]` = number of walks that entered by time `t`, `t = 0..=horizon`.
    pub curve: Vec<u64>,
}

impl HittingResult {
    pub fn is_nondecreasing(&self) -> bool {
        self.curve.windows(2).all(|w| w[0] <= w[1])
    }
}

/// Fraction of tree walks (MC0 from 1) entering the open interval `(a, b)`
/// within `horizon` steps.
pub fn hitting_experiment<T: Natural>(
    interval: &(ExtRat<T>, ExtRat<T>),
    walks: u64,
    horizon: u64,
    seed: u64,
) -> Result<HittingResult> {
    check_cap("walks", walks, DEFAULT_WALK_CAP)?;
    let spec = ChainSpec::tree_walk(horizon, seed)?;
    let summaries = run_walks(&spec, walks, Some(interval))?;
    let mut curve = vec![0u64; horizon as usize + 1];
    for t in summaries.iter().filter_map(|s| s.hit_time) {
        curve[t as usize] += 1;
    }
    for t in 1..curve.len() {
        curve[t] += curve[t - 1];
    }
    let hits = *curve.last().expect("horizon ≥ 1");
    Ok(HittingResult {
        walks,
        hits,
        fraction: if walks == 0 { 0.0 } else { hits as f64 / walks as f64 },
        curve,
    })
}

#[derive(Clone, PartialEq, Debug)]
pub struct MartingaleReport {
    /// `Ph(W_n) = h(W_n)` exactly at every visited state.
    pub identity_holds: bool,
    /// Largest `|Ph(W_n) − h(W_n)|` over visited states.
    pub max_identity_residual: f64,
    /// Largest `|mean(h(W_{n+1})) − h(W_n)|` over groups of walks sharing a
    /// prefix (at least `min_group` walks).
    pub max_deviation: f64,
    /// Standard error of the group with the largest deviation.
    pub std_error: f64,
    /// Largest deviation measured in standard errors.
    pub max_z: f64,
    pub groups: usize,
    /// Letter changes per path.
    pub alternations: Vec<u64>,
    /// Fraction of paths in which every window of [`ALTERNATION_WINDOW`]
    /// letters holds both letters.
    pub window_fraction: f64,
}

/// Martingale diagnostics for `h(W_n)`. `h` must be exact; groups sharing a
/// prefix are formed at times `n < group_depth`.
pub fn martingale_check<T, Fun>(
    spec: &ChainSpec<T>,
    h: Fun,
    walks: u64,
    group_depth: u64,
    min_group: usize,
) -> Result<MartingaleReport>
where
    T: Natural,
    Fun: Fn(&ExtRat<T>) -> Option<BigRational> + Sync,
{
    check_cap("walks", walks, DEFAULT_WALK_CAP)?;
    let eval = |y: &ExtRat<T>| h(y).ok_or_else(|| Error::Singular(format!("h undefined at {y}")));
    let kind = spec.kind;
    let per_walk: Vec<Result<(bool, f64, Vec<u8>, Vec<ExtRat<T>>)>> = (0..walks)
        .into_par_iter()
        .map(|w| {
            let (mut ok, mut worst) = (true, 0.0f64);
            let mut letters = Vec::with_capacity(spec.horizon as usize);
            let mut prefix = vec![spec.start.clone()];
            let mut y = spec.start.clone();
            for (l, next) in Walk::new(spec, w) {
                let ph: BigRational = crate::operators::markov_apply(kind, |z: &ExtRat<T>| h(z), &y)?;
                let hy = eval(&y)?;
                if ph != hy {
                    ok = false;
                    worst = worst.max((ph - hy).abs().to_f64().unwrap_or(f64::INFINITY));
                }
                letters.push(l);
                if prefix.len() <= group_depth as usize {
                    prefix.push(next.clone());
                }
                y = next;
            }
            Ok((ok, worst, letters, prefix))
        })
        .collect();
    let per_walk: Vec<_> = per_walk.into_iter().collect::<Result<_>>()?;

    let identity_holds = per_walk.iter().all(|r| r.0);
    let max_identity_residual = per_walk.iter().map(|r| r.1).fold(0.0, f64::max);

    // group walks by their state at time n; interior states determine the prefix
    let mut max_deviation = 0.0f64;
    let (mut std_error, mut max_z) = (0.0f64, 0.0f64);
    let mut groups = 0usize;
    for n in 0..group_depth as usize {
        let mut by_state: std::collections::BTreeMap<ExtRat<T>, Vec<f64>> = Default::default();
        for r in &per_walk {
            if r.3.len() > n + 1 {
                let next = eval(&r.3[n + 1])?.to_f64().unwrap_or(f64::NAN);
                by_state.entry(r.3[n].clone()).or_default().push(next);
            }
        }
        for (state, vals) in by_state {
            if vals.len() < min_group {
                continue;
            }
            groups += 1;
            let m = vals.len() as f64;
            let mean = vals.iter().sum::<f64>() / m;
            let var = vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (m - 1.0).max(1.0);
            let se = (var / m).sqrt();
            let dev = (mean - eval(&state)?.to_f64().unwrap_or(f64::NAN)).abs();
            if dev > max_deviation {
                max_deviation = dev;
                std_error = se;
            }
            if se > 0.0 {
                max_z = max_z.max(dev / se);
            } else if dev > 0.0 {
                max_z = f64::INFINITY;
            }
        }
    }

    let alternations: Vec<u64> = per_walk
        .iter()
        .map(|r| r.2.windows(2).filter(|w| w[0] != w[1]).count() as u64)
        .collect();
    let window_ok = per_walk
        .iter()
        .filter(|r| both_letters_in_every_window(&r.2, ALTERNATION_WINDOW))
        .count();
    Ok(MartingaleReport {
        identity_holds,
        max_identity_residual,
        max_deviation,
        std_error,
        max_z,
        groups,
        alternations,
        window_fraction: if walks == 0 { 0.0 } else { window_ok as f64 / walks as f64 },
    })
}

/// Whether every run of equal letters is shorter than `window`.
pub fn both_letters_in_every_window(letters: &[u8], window: usize) -> bool {
    letters
        .chunk_by(|a, b| a == b)
        .all(|run| run.len() < window)
}

/// Longest run of equal letters.
pub fn longest_run(letters: &[u8]) -> usize {
    letters.chunk_by(|a, b| a == b).map(<[u8]>::len).max().unwrap_or(0)
}

/// `(E_x f(W_n), 2^{−n} Σ_{y ∈ levels 1..=n} f(y))` for MC0.
pub fn mc0_limit_experiment<T, Fun>(f: Fun, x: &ExtRat<T>, n: u32) -> Result<(f64, f64)>
where
    T: Natural,
    Fun: Fn(&ExtRat<T>) -> Option<f64> + Sync,
{
    check_cap("limit experiment depth", u64::from(n), 20)?;
    let value: f64 = markov_power(MarkovKind::Mc0, &f, x, n)?;
    let reference = stieltjes_mean::<T, f64, _>(TreeSpec::SB, n, |y| {
        Complex64::new(f(y).unwrap_or(f64::NAN), 0.0)
    })?;
    Ok((value, reference.re))
}

/// Empirical `E_x f(W_n)` with its standard error over `walks` walks.
pub fn monte_carlo_mean<T, Fun>(spec: &ChainSpec<T>, f: Fun, walks: u64) -> Result<(f64, f64)>
where
    T: Natural,
    Fun: Fn(&ExtRat<T>) -> Option<f64> + Sync,
{
    check_cap("walks", walks, DEFAULT_WALK_CAP)?;
    let vals: Vec<f64> = (0..walks)
        .into_par_iter()
        .map(|w| {
            let end = Walk::new(spec, w).last().map(|(_, s)| s).unwrap_or_else(|| spec.start.clone());
            f(&end).ok_or_else(|| Error::Singular(format!("f undefined at {end}")))
        })
        .collect::<Result<_>>()?;
    let m = vals.len() as f64;
    let mean = vals.iter().sum::<f64>() / m;
    let var = vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (m - 1.0).max(1.0);
    Ok((mean, (var / m).sqrt()))
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

    #[test]
    fn transition_examples() {
        assert_eq!(transition_probs(MarkovKind::Mc1, &q("1")), (r(1, 2), r(1, 2)));
        assert_eq!(transition_probs(MarkovKind::Mc1, &Q::zero()), (r(1, 1), r(0, 1)));
        assert_eq!(transition_probs(MarkovKind::Mc1, &Q::infinity()), (r(0, 1), r(1, 1)));
        assert_eq!(transition_probs(MarkovKind::Mc0, &q("7/2")), (r(1, 2), r(1, 2)));
    }

    #[test]
    fn forced_paths() {
        let w = forced_walk(MarkovKind::Mc0, &q("1"), &[0, 1]).unwrap();
        assert_eq!(w.states[1..], [q("1/2"), q("3/2")]);
        assert_eq!(forced_walk(MarkovKind::Mc1, &q("1"), &[1, 1, 1]).unwrap().prob, Some(r(1, 4)));
        assert_eq!(forced_walk(MarkovKind::Mc1, &q("1"), &[0, 0, 0]).unwrap().prob, Some(r(1, 4)));
    }

    #[test]
    fn cylinder_examples() {
        assert_eq!(cylinder_prob(MarkovKind::Mc1, &q("2"), &[1, 0]).unwrap(), r(1, 6));
        assert_eq!(cylinder_prob(MarkovKind::Mc1, &q("1/2"), &[0, 1]).unwrap(), r(1, 6));
        for n in 1..20usize {
            let ones = vec![1u8; n];
            assert_eq!(cylinder_prob(MarkovKind::Mc1, &q("1"), &ones).unwrap(), r(1, n as i64 + 1));
        }
        assert_eq!(cylinder_prob(MarkovKind::Mc0, &q("5/3"), &[0, 1, 1, 0, 1]).unwrap(), r(1, 32));
        assert!(cylinder_prob(MarkovKind::Mc0, &q("1"), &vec![0; 1025]).is_err());
        assert!(cylinder_prob(MarkovKind::Mc0, &q("1"), &[2]).is_err());
    }

    #[test]
    fn simulate_is_reproducible() {
        let spec = ChainSpec::new(MarkovKind::Mc1, q("1"), 200, 7).unwrap();
        let a = simulate(&spec, 3);
        let b = simulate(&spec, 3);
        assert_eq!(a, b);
        assert_ne!(simulate(&spec, 4).letters, a.letters);
        for (k, l) in a.letters.iter().enumerate() {
            assert_eq!(a.states[k + 1], step(*l, &a.states[k]));
        }
        assert_eq!(a.prob, Some(cylinder_prob(MarkovKind::Mc1, &q("1"), &a.letters).unwrap()));
        assert!(ChainSpec::new(MarkovKind::Mc0, q("1"), MAX_HORIZON + 1, 0).is_err());
        assert!(ChainSpec::new(MarkovKind::Mc0, q("1"), 0, 0).is_err());
    }

    #[test]
    fn absorbing_states_stay() {
        for (start, letter) in [(Q::zero(), 0u8), (Q::infinity(), 1u8)] {
            let spec = ChainSpec::new(MarkovKind::Mc1, start.clone(), 50, 1).unwrap();
            let p = simulate(&spec, 0);
            assert!(p.letters.iter().all(|&l| l == letter));
            assert!(p.states.iter().all(|s| *s == start));
        }
    }

    #[test]
    fn hitting_examples() {
        let all = (Q::zero(), Q::infinity());
        let h = hitting_experiment(&all, 50, 1, 1).unwrap();
        assert_eq!(h.fraction, 1.0);
        let small = hitting_experiment(&(q("2/5"), q("3/5")), 200, 200, 11).unwrap();
        assert!(small.is_nondecreasing());
        assert!(hitting_experiment(&(q("1"), q("1")), 10, 10, 1).is_err());
    }

    #[test]
    fn martingale_constant() {
        let spec = ChainSpec::new(MarkovKind::Mc1, q("1"), 64, 3).unwrap();
        let rep = martingale_check(&spec, |_: &Q| Some(BigRational::one()), 64, 4, 2).unwrap();
        assert!(rep.identity_holds);
        assert_eq!(rep.max_deviation, 0.0);
    }

    #[test]
    fn windows() {
        assert!(both_letters_in_every_window(&[0, 1, 0, 1], 2));
        assert!(!both_letters_in_every_window(&[0, 0, 1], 2));
        assert_eq!(longest_run(&[1, 1, 0, 0, 0, 1]), 3);
        assert_eq!(longest_run(&[]), 0);
    }

    #[test]
    fn limit_of_constant() {
        let (v, reference) = mc0_limit_experiment(|_: &Q| Some(1.0), &q("1"), 10).unwrap();
        assert_eq!(v, 1.0);
        assert_eq!(reference, 1023.0 / 1024.0);
    }
}
