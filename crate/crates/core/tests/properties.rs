use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, Zero};
use proptest::prelude::*;

use qtrees::coding::{code_compare, hat, matrix_from_word, pi_code, rat_from_matrix, CodeOrdering, Letter, LrWord};
use qtrees::exact::{eval_terms, ContFrac, ExtRat};
use qtrees::maps::{apply, apply_inverse, conjugacy_residual, Diagram, MapId};
use qtrees::minkowski::{qmark, qmark_inv, rho, rho_inv, Dyadic};
use qtrees::operators::{markov_apply, MarkovKind};
use qtrees::stochastic::{cylinder_prob, forced_walk};
use qtrees::{Dyad, Rat};

fn positive() -> impl Strategy<Value = Rat> {
    (0u32..6, prop::collection::vec(1u32..30, 0..8)).prop_map(|(a0, rest)| {
        let mut t: Vec<BigUint> = vec![BigUint::from(a0 + u32::from(rest.is_empty()))];
        t.extend(rest.into_iter().map(BigUint::from));
        eval_terms(&t)
    })
}

fn unit() -> impl Strategy<Value = Rat> {
    prop::collection::vec(1u32..30, 1..8).prop_map(|mut rest| {
        if let Some(l) = rest.last_mut() {
            *l = (*l).max(2);
        }
        let mut t = vec![BigUint::zero()];
        t.extend(rest.into_iter().map(BigUint::from));
        eval_terms(&t)
    })
}

fn word() -> impl Strategy<Value = LrWord> {
    prop::collection::vec(any::<bool>(), 0..40)
        .prop_map(|bits| LrWord(bits.into_iter().map(|b| if b { Letter::R } else { Letter::L }).collect()))
}

fn big(x: &Rat) -> BigRational {
    x.to_big_rational().unwrap()
}

proptest! {
    #[test]
    fn cf_round_trip(x in positive()) {
        let cf = ContFrac::from_rat(&x).unwrap();
        prop_assert_eq!(cf.to_rat(), x.clone());
        let terms = cf.terms();
        prop_assert!(terms.len() == 1 || terms.last().unwrap() > &BigUint::one());
    }

    #[test]
    fn phi_round_trip_and_order(a in positive(), b in positive()) {
        prop_assert_eq!(a.phi().phi_inv().unwrap(), a.clone());
        prop_assert_eq!(a.cmp(&b), a.phi().cmp(&b.phi()));
    }

    #[test]
    fn matrices_are_unimodular(w in word()) {
        let m = matrix_from_word::<BigUint>(&w);
        prop_assert!(m.det().is_one());
        let x = rat_from_matrix(&m).unwrap();
        prop_assert_eq!(x.depth().unwrap(), BigUint::from(w.len() + 1));
    }

    #[test]
    fn hat_reverses_words(w in word()) {
        let x = rat_from_matrix(&matrix_from_word::<BigUint>(&w)).unwrap();
        let y = rat_from_matrix(&matrix_from_word::<BigUint>(&w.reversed())).unwrap();
        prop_assert_eq!(hat(&x).unwrap(), y);
        prop_assert_eq!(hat(&x).unwrap() == x, w.is_palindrome());
    }

    #[test]
    fn codes_order_like_rationals(a in positive(), b in positive()) {
        let c = code_compare(&pi_code(&a).unwrap(), &pi_code(&b).unwrap());
        prop_assert_eq!(c, CodeOrdering::Known(a.cmp(&b)));
    }

    #[test]
    fn qmark_symmetry_and_inverse(x in unit()) {
        let s = qmark(&x).unwrap().add(&qmark(&x.one_minus().unwrap()).unwrap());
        prop_assert_eq!(s, Dyad::one());
        prop_assert_eq!(qmark_inv(&qmark(&x).unwrap()).unwrap(), x);
    }

    #[test]
    fn qmark_is_strictly_monotone(a in unit(), b in unit()) {
        prop_assert_eq!(a.cmp(&b), qmark(&a).unwrap().cmp(&qmark(&b).unwrap()));
    }

    #[test]
    fn rho_reciprocal_and_inverse(x in positive()) {
        let s = rho(&x).unwrap().add(&rho(&x.recip()).unwrap());
        prop_assert_eq!(s, Dyad::one());
        prop_assert_eq!(rho_inv(&rho(&x).unwrap()).unwrap(), x);
    }

    #[test]
    fn dyadic_inverse_round_trip(k in 0u64..(1 << 24), s in 0u64..24) {
        let d: Dyad = Dyadic::new(BigUint::from(k % (1u64 << s).max(1)), s);
        prop_assert_eq!(qmark(&qmark_inv(&d).unwrap()).unwrap(), d);
    }

    #[test]
    fn bijective_maps_invert(x in positive(), u in unit()) {
        prop_assert_eq!(apply_inverse(MapId::R, &apply(MapId::R, &x).unwrap()).unwrap(), x.clone());
        for m in [MapId::S, MapId::T] {
            prop_assert_eq!(apply_inverse(m, &apply(m, &u).unwrap()).unwrap(), u.clone());
        }
    }

    #[test]
    fn diagrams_commute(x in positive(), u in unit()) {
        for d in Diagram::ALL {
            let p = if d.on_half_line() { &x } else { &u };
            prop_assert!(conjugacy_residual(d, p).unwrap().is_zero(), "{} at {}", d.name(), p);
        }
    }

    #[test]
    fn mc1_cylinder_symmetry(x in positive(), bits in prop::collection::vec(0u8..2, 1..16)) {
        let flipped: Vec<u8> = bits.iter().map(|b| 1 - b).collect();
        prop_assert_eq!(
            cylinder_prob(MarkovKind::Mc1, &x, &bits).unwrap(),
            cylinder_prob(MarkovKind::Mc1, &x.recip(), &flipped).unwrap()
        );
    }

    #[test]
    fn forced_walk_states_follow_the_letters(x in positive(), bits in prop::collection::vec(0u8..2, 1..16)) {
        let path = forced_walk(MarkovKind::Mc1, &x, &bits).unwrap();
        prop_assert_eq!(path.states.len(), bits.len() + 1);
        for (i, &b) in bits.iter().enumerate() {
            let (s, t) = (big(&path.states[i]), big(&path.states[i + 1]));
            let want = if b == 0 { &s / (BigRational::one() + &s) } else { BigRational::one() + &s };
            prop_assert_eq!(t, want);
        }
        prop_assert_eq!(path.prob.unwrap(), cylinder_prob(MarkovKind::Mc1, &x, &bits).unwrap());
    }

    #[test]
    fn rows_are_stochastic(x in positive()) {
        for kind in [MarkovKind::Mc0, MarkovKind::Mc1] {
            let v: BigRational = markov_apply(kind, |_: &Rat| Some(BigRational::one()), &x).unwrap();
            prop_assert!(v.is_one());
        }
    }

    #[test]
    fn depth_identity_on_wide_inputs(p in 1u64.., q in 1u64..) {
        let x: ExtRat<u128> = ExtRat::new(u128::from(p), u128::from(q)).unwrap();
        prop_assert_eq!(x.depth().unwrap(), x.depth_from_rank().unwrap());
    }
}
