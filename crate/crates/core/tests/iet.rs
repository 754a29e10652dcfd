mod common;

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sck1_core::fixtures;
use sck1_core::iet::{iet_compose, random_iet, saf_hat, tau_alpha, Basis, Iet, QLinearReal};

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn pair(x: &QLinearReal) -> (BigRational, BigRational) {
    (x.coords[0].clone(), x.coords[1].clone())
}

fn one() -> QLinearReal {
    QLinearReal::from_ints(&[1, 0])
}

#[test]
fn validate_examples() {
    assert!(Iet::from_json(fixtures::IDENTITY_IET).unwrap().validate().unwrap());
    let half = Iet::from_json(fixtures::SWAP_HALF).unwrap();
    assert!(half.validate().unwrap());
    let mut overlap = half.clone();
    overlap.translations[1] = QLinearReal { coords: vec![q(0, 1)] };
    assert!(!overlap.validate().unwrap());
    assert!(Iet::from_json(fixtures::ROTATION_SQRT2).unwrap().validate().unwrap());
    assert!(!Iet::from_json(fixtures::SWAP_EPS_DELTA).unwrap().validate().unwrap());
}

#[test]
fn anchor_value() {
    let t = Iet::from_json(fixtures::SWAP_EPS_DELTA).unwrap();
    let w = t.saf();
    assert_eq!(w.coefficient(0, 1), q(-1, 1));
    assert_eq!(w.terms.len(), 1);
}

#[test]
fn rotation_saf_hat() {
    let t = Iet::from_json(fixtures::ROTATION_SQRT2).unwrap();
    let lengths: Vec<QLinearReal> = t.intervals().iter().map(|i| i.length()).collect();
    let w = saf_hat(&lengths, &t.translations);
    assert_eq!(w.coefficient(0, 1), q(2, 1));
    let oracle = common::wedge_sum(
        &lengths.iter().zip(&t.translations).map(|(e, x)| (e.coords.clone(), x.coords.clone())).collect::<Vec<_>>(),
        2,
    );
    assert_eq!(oracle, vec![((0, 1), q(2, 1))]);
}

#[test]
fn saf_hat_trivial_cases() {
    let b = Basis::sqrt2();
    let e = QLinearReal::from_ints(&[0, 1]);
    assert!(saf_hat(&[e.clone()], &[b.zero()]).is_zero());
    assert!(saf_hat(&[e.clone()], &[e]).is_zero());
}

#[test]
fn swaps_vanish() {
    let b = Basis::sqrt2();
    for alpha in [QLinearReal::from_ints(&[1, 0]), QLinearReal::from_ints(&[0, 1]), QLinearReal { coords: vec![q(1, 2), q(1, 2)] }] {
        let t = Iet::swap(&b, &alpha);
        assert!(t.validate().unwrap());
        assert!(t.saf().is_zero());
        assert!(tau_alpha(&b, &alpha).saf().is_zero());
    }
}

#[test]
fn compose_matches_pointwise_oracle() {
    let b = Basis::sqrt2();
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for _ in 0..40 {
        let g = random_iet(&b, &one(), 3, &mut rng).unwrap();
        let h = random_iet(&b, &one(), 3, &mut rng).unwrap();
        let gh = iet_compose(&g, &h).unwrap();
        assert!(gh.validate().unwrap());
        let bp = |t: &Iet| t.breakpoints.iter().map(pair).collect::<Vec<_>>();
        let tr = |t: &Iet| t.translations.iter().map(pair).collect::<Vec<_>>();
        for k in 0..60 {
            let p = (q(k, 60), q(0, 1));
            let mid = common::eval_pieces(&bp(&h), &tr(&h), &p).unwrap();
            let want = common::eval_pieces(&bp(&g), &tr(&g), &mid).unwrap();
            assert_eq!(common::eval_pieces(&bp(&gh), &tr(&gh), &p).unwrap(), want);
        }
    }
}

#[test]
fn compose_with_identity_and_inverse() {
    let b = Basis::sqrt2();
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    let id = Iet::identity(&b, one());
    for _ in 0..30 {
        let t = random_iet(&b, &one(), 4, &mut rng).unwrap();
        assert_eq!(iet_compose(&t, &id).unwrap(), t.merged());
        assert_eq!(iet_compose(&id, &t).unwrap(), t.merged());
        let inv = t.inverse().unwrap();
        assert!(inv.validate().unwrap());
        assert_eq!(iet_compose(&inv, &t).unwrap(), id);
        assert!(t.saf().add(&inv.saf()).is_zero());
    }
}

#[test]
fn rational_three_interval_compositions_are_small() {
    let b = Basis::rationals();
    let l = QLinearReal::from_ints(&[1]);
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for _ in 0..30 {
        let g = random_iet(&b, &l, 3, &mut rng).unwrap();
        let h = random_iet(&b, &l, 3, &mut rng).unwrap();
        assert!(iet_compose(&g, &h).unwrap().translations.len() <= 5);
    }
}

#[test]
fn saf_is_a_homomorphism() {
    let b = Basis::sqrt2();
    let mut rng = ChaCha8Rng::seed_from_u64(24);
    for _ in 0..50 {
        let len = if rng.gen_bool(0.5) { one() } else { QLinearReal::from_ints(&[0, 1]) };
        let g = random_iet(&b, &len, 4, &mut rng).unwrap();
        let h = random_iet(&b, &len, 4, &mut rng).unwrap();
        assert_eq!(iet_compose(&g, &h).unwrap().saf(), g.saf().add(&h.saf()));
    }
}

#[test]
fn cut_balance_examples() {
    assert_eq!(Iet::from_json(fixtures::IDENTITY_IET).unwrap().cut_balance().unwrap(), (0, 0));
    assert_eq!(Iet::from_json(fixtures::SWAP_HALF).unwrap().cut_balance().unwrap(), (1, 1));
    let b = Basis::sqrt2();
    let mut rng = ChaCha8Rng::seed_from_u64(25);
    for _ in 0..50 {
        let (d, c) = random_iet(&b, &one(), 4, &mut rng).unwrap().cut_balance().unwrap();
        assert_eq!(d, c);
    }
}

#[test]
fn json_round_trip() {
    let t = Iet::from_json(fixtures::ROTATION_SQRT2).unwrap();
    let text = serde_json::to_string(&t.to_file()).unwrap();
    assert_eq!(Iet::from_json(&text).unwrap(), t);
}

#[test]
fn malformed_files_are_input_errors() {
    assert!(Iet::from_json("{").unwrap_err().is_input_error());
    let bad = r#"{"basis":[{"label":"1","approx_decimal":"1"}],"length":[1],"breakpoints":[[0],[1]],"translations":[["1/0"]]}"#;
    assert!(Iet::from_json(bad).unwrap_err().is_input_error());
}

mod props {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(40))]

        #[test]
        fn saf_of_inverse_cancels(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let t = random_iet(&Basis::sqrt2(), &one(), 4, &mut rng).unwrap();
            let inv = t.inverse().unwrap();
            prop_assert!(inv.validate().unwrap());
            prop_assert!(t.saf().add(&inv.saf()).is_zero());
        }

        #[test]
        fn equal_half_swaps_vanish(a in -5i64..5, b in -5i64..5, d in 1i64..5) {
            prop_assume!(a != 0 || b != 0);
            let alpha = QLinearReal { coords: vec![q(a, d), q(b, d)] };
            let alpha = if Basis::sqrt2().sign(&alpha).unwrap().is_lt() { alpha.neg() } else { alpha };
            prop_assert!(Iet::swap(&Basis::sqrt2(), &alpha).saf().is_zero());
        }

        #[test]
        fn cut_balance_holds(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let t = random_iet(&Basis::sqrt2(), &QLinearReal::from_ints(&[0, 1]), 5, &mut rng).unwrap();
            let (d, c) = t.cut_balance().unwrap();
            prop_assert_eq!(d, c);
        }
    }
}
