mod common;

use braidcalc::{cable, words_equal, BraidWord, Certificate, MoveKind};
use common::{artin_equal, relation_walk, CayleyBall};
use proptest::prelude::*;

fn word(max_strands: usize, max_len: usize) -> impl Strategy<Value = BraidWord> {
    (2..=max_strands).prop_flat_map(move |n| {
        let g = n as i32 - 1;
        prop::collection::vec((1..=g, any::<bool>()), 0..=max_len)
            .prop_map(move |ls| BraidWord::new(n, ls.into_iter().map(|(i, p)| if p { i } else { -i }).collect()).unwrap())
    })
}

fn count_letters(w: &BraidWord) -> i64 {
    w.letters().iter().map(|&g| if g > 0 { 1 } else { -1 }).sum()
}

proptest! {
    #[test]
    fn exchange_keeps_strands_and_writhe(w in word(6, 20)) {
        if let Some(site) = w.exchange_site() {
            let out = w.exchange_move(site).unwrap();
            prop_assert_eq!((out.strands(), out.writhe()), (w.strands(), w.writhe()));
            prop_assert_eq!(out.bennequin(), w.bennequin());
        }
    }

    #[test]
    fn destabilization_contract(w in word(6, 20)) {
        if let Some(eps) = w.destabilization_sign() {
            let out = w.destabilize().unwrap();
            prop_assert_eq!(out.strands() + 1, w.strands());
            prop_assert_eq!(out.writhe(), w.writhe() - eps as i64);
            let shift = if eps > 0 { 0 } else { 2 };
            prop_assert_eq!(out.bennequin(), w.bennequin() + shift);
        }
    }

    #[test]
    fn isotopies_keep_bennequin(w in word(6, 20), g in 1i32..5, off in 0usize..20) {
        let g = 1 + (g - 1) % (w.strands() as i32 - 1);
        prop_assert_eq!(w.conjugate(g).unwrap().bennequin(), w.bennequin());
        prop_assert_eq!(w.conjugate(-g).unwrap().bennequin(), w.bennequin());
        let off = off % (w.len() + 1);
        prop_assert_eq!(w.apply(&MoveKind::CyclicShift(off)).unwrap().bennequin(), w.bennequin());
    }

    #[test]
    fn cabling_algebra(w in word(3, 8), p in 2i64..=4, q in -9i64..=9) {
        prop_assume!(num_gcd(p, q) == 1);
        let c = cable(&w, p, q).unwrap();
        prop_assert_eq!(c.strands(), w.strands() * p as usize);
        prop_assert_eq!(count_letters(&c), p * count_letters(&w) + (p - 1) * q);
        if w.closure_components() == 1 {
            prop_assert_eq!(c.closure_components(), 1);
        }
    }

    #[test]
    fn normal_form_agrees_with_artin(a in word(4, 8), steps in 0usize..10, seed in any::<u64>()) {
        let mut rng = braidcalc::random::rng(seed);
        let b = relation_walk(&mut rng, &a, steps, 12);
        prop_assert!(words_equal(&a, &b).unwrap());
        prop_assert!(artin_equal(&a, &b));
        let c = braidcalc::random::random_word(&mut rng, a.strands(), a.len());
        prop_assert_eq!(words_equal(&a, &c).unwrap(), artin_equal(&a, &c));
    }

    #[test]
    fn braid_json_round_trip(w in word(6, 20)) {
        let text = serde_json::to_string(&w).unwrap();
        prop_assert_eq!(serde_json::from_str::<BraidWord>(&text).unwrap(), w);
    }
}

fn num_gcd(a: i64, b: i64) -> i64 {
    if b == 0 { a.abs() } else { num_gcd(b, a % b) }
}

#[test]
fn certificate_round_trip() {
    let w = BraidWord::new(3, vec![1, 1, 1, 2]).unwrap();
    let cert = Certificate { initial: w.clone(), moves: vec![MoveKind::Destabilize(1)], final_word: w.destabilize().unwrap() };
    let back: Certificate = serde_json::from_str(&serde_json::to_string(&cert).unwrap()).unwrap();
    assert_eq!(back, cert);
    braidcalc::verify_certificate(&cert).unwrap();
}

#[test]
fn cayley_ball_sizes() {
    // B_2 is infinite cyclic: the radius-r ball has 2r+1 elements.
    assert_eq!(CayleyBall::new(2, 5).len(), 11);
    let b3 = CayleyBall::new(3, 3);
    let w = |l: Vec<i32>| BraidWord::new(3, l).unwrap();
    assert_eq!(b3.locate(&w(vec![1, 2, 1])), b3.locate(&w(vec![2, 1, 2])));
    assert_ne!(b3.locate(&w(vec![1, 2])), b3.locate(&w(vec![2, 1])));
    assert_eq!(b3.locate(&w(vec![1, -1])), Some(0));
}

#[test]
fn artin_action_is_an_action() {
    let a = BraidWord::new(4, vec![1, -2, 3]).unwrap();
    assert!(artin_equal(&a.concat(&a.inverse()).unwrap(), &BraidWord::identity(4).unwrap()));
    assert!(!artin_equal(&a, &a.inverse()));
}
