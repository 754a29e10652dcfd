use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sck1_core::fixtures;
use sck1_core::nil2::Nil2;
use sck1_core::sqm::{commutator, Generator, Letter, SqmContext, SqmWord, RULES};

fn contexts() -> [SqmContext; 2] {
    [SqmContext::new(fixtures::cofiber_double_cover()), SqmContext::new(fixtures::cofiber_halfsplit_point())]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn sq1_shadow(seed in any::<u64>(), k in 0usize..2) {
        let ctx = &contexts()[k];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let u = ctx.random_degree0_word(&mut rng, 4);
        let v = ctx.random_degree0_word(&mut rng, 4);
        let lhs = ctx.boundary(&ctx.bracket(&u, &v));
        prop_assert_eq!(lhs, Nil2::commutator(&ctx.boundary(&v), &ctx.boundary(&u)));
    }

    #[test]
    fn sq2_shadow(seed in any::<u64>(), k in 0usize..2) {
        let ctx = &contexts()[k];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let c = ctx.random_crossed_word(&mut rng, 3);
        let d = ctx.random_crossed_word(&mut rng, 3);
        let lhs = ctx.bracket(&ctx.boundary_word(&c), &ctx.boundary_word(&d));
        prop_assert_eq!(ctx.shadow(&lhs), ctx.shadow(&commutator(&d, &c)));
    }

    #[test]
    fn sq3_shadow(seed in any::<u64>(), k in 0usize..2) {
        let ctx = &contexts()[k];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let u = ctx.random_degree0_word(&mut rng, 4);
        let v = ctx.random_degree0_word(&mut rng, 4);
        prop_assert!(ctx.shadow(&ctx.bracket(&u, &v).mul(&ctx.bracket(&v, &u))).is_trivial());
    }

    #[test]
    fn normalize_is_idempotent_and_keeps_boundary(seed in any::<u64>(), k in 0usize..2, kind in 0usize..3) {
        let ctx = &contexts()[k];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let w = match kind {
            0 => ctx.random_crossed_word(&mut rng, 6),
            1 => ctx.random_plus_word(&mut rng, 6),
            _ => ctx.random_degree0_word(&mut rng, 6),
        };
        let n = ctx.normalize(&w).unwrap();
        prop_assert_eq!(&ctx.normalize(&n).unwrap(), &n);
        prop_assert_eq!(ctx.boundary(&n), ctx.boundary(&w));
        prop_assert_eq!(ctx.shadow(&n), ctx.shadow(&w));
    }

    #[test]
    fn rules_preserve_shadow(seed in any::<u64>(), k in 0usize..2, r in 0usize..RULES.len()) {
        let ctx = &contexts()[k];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let inst = ctx.rule_instance(RULES[r], &mut rng);
        prop_assert_eq!(ctx.shadow(&inst.lhs), ctx.shadow(&inst.rhs), "{}", inst.rule);
    }
}

#[test]
fn a5_on_enumerated_weak_equivalences() {
    for ctx in contexts() {
        let (_, plus) = ctx.generators(2);
        let mut seen = 0;
        for g in plus {
            let Generator::Weq1(w) = g else { continue };
            seen += 1;
            let lhs = SqmWord::from_letters(vec![
                Letter::new(Generator::Obj1(w.target().clone()), 1),
                Letter::new(Generator::Weq0(ctx.face_weq(1, 1, &w)), 1),
            ]);
            let rhs = SqmWord::from_letters(vec![
                Letter::new(Generator::Weq0(ctx.face_weq(1, 0, &w)), 1),
                Letter::new(Generator::Obj1(w.source().clone()), 1),
            ]);
            assert_eq!(ctx.shadow(&lhs), ctx.shadow(&rhs));
        }
        assert!(seen > 0);
    }
}

#[test]
fn degeneracies_have_trivial_boundary() {
    for ctx in contexts() {
        for x in sck1_core::twist::small_objects(ctx.base(), 2) {
            let w = SqmWord::single(Generator::Obj1(ctx.degen_obj(0, 0, &x)), 1);
            assert!(ctx.boundary(&w).is_identity());
            assert!(ctx.normalize(&w).unwrap().is_empty());
        }
    }
}

#[test]
fn words_equal_semi_decides() {
    let ctx = &contexts()[0];
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..30 {
        let w = ctx.random_crossed_word(&mut rng, 5);
        assert_eq!(ctx.words_equal(&w, &w.mul(&w.inverse()).mul(&w)).unwrap(), Some(true));
        let other = w.mul(&SqmWord::single(Generator::Obj1(ctx.random_object(1, 2, &mut rng)), 1));
        if ctx.shadow(&other) != ctx.shadow(&w) {
            assert_eq!(ctx.words_equal(&w, &other).unwrap(), Some(false));
        }
    }
}

#[test]
fn malformed_words_are_rejected() {
    let ctx = &contexts()[0];
    let bad: SqmWord = serde_json::from_str(r#"[{"tag": "obj0", "payload": {"objects": [1]}, "exponent": 2}]"#).unwrap();
    assert!(ctx.normalize(&bad).unwrap_err().is_input_error());
    assert!(serde_json::from_str::<SqmWord>(r#"[{"tag": "nope", "payload": 1, "exponent": 1}]"#).is_err());
}
