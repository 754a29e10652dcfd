use proptest::prelude::*;
use sck1_core::assembler::{
    check_condition_g, check_simplicial_identities, validate_assembler, wedge_assembler, Assembler, Part, AXIOM_P,
};
use sck1_core::fixtures::{self, CofiberSpec};
use sck1_core::kgroups;

fn cofiber(base: &Assembler, sub: &Assembler, objects: &[(&str, &str)]) -> sck1_core::assembler::SimplicialLevels {
    let spec = CofiberSpec {
        base: base.to_spec(),
        sub: sub.to_spec(),
        map: serde_json::from_value(serde_json::json!({
            "objects": objects.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect::<std::collections::BTreeMap<_, _>>()
        }))
        .unwrap(),
    };
    spec.build().unwrap()
}

#[test]
fn bundled_sites_validate() {
    for (name, site) in fixtures::sites() {
        let r = validate_assembler(&site);
        assert!(r.passed(), "{name}: {r:?}");
    }
}

#[test]
fn bad_pullback_fails_with_witness() {
    let site = Assembler::from_json(fixtures::HALFSPLIT_BAD_PULLBACK).unwrap();
    let r = validate_assembler(&site);
    let p = r.check(AXIOM_P).unwrap();
    assert!(!p.passed);
    assert!(!p.witnesses.is_empty());
    assert_eq!(r.checks.iter().filter(|c| !c.passed).count(), 1);
}

#[test]
fn condition_g_examples() {
    assert!(check_condition_g(&fixtures::halfsplit()));
    assert!(check_condition_g(&fixtures::point()));
    assert!(!check_condition_g(&fixtures::empty_cover()));
}

#[test]
fn disjointness_examples() {
    let s = fixtures::halfsplit();
    let (a, b) = (s.morphism_id("a").unwrap(), s.morphism_id("b").unwrap());
    let id_x = s.identity(s.object_id("X").unwrap());
    assert!(s.are_disjoint(a, b).unwrap());
    assert!(!s.are_disjoint(a, a).unwrap());
    assert!(!s.are_disjoint(id_x, b).unwrap());
}

#[test]
fn unknown_fields_and_dangling_names_are_input_errors() {
    let e = Assembler::from_json(r#"{"objects": ["0"], "initial": "0", "extra": 1}"#).unwrap_err();
    assert!(e.is_input_error());
    let e = Assembler::from_json(r#"{"objects": ["0"], "initial": "Q"}"#).unwrap_err();
    assert!(e.is_input_error());
}

#[test]
fn spec_round_trip() {
    for (name, site) in fixtures::sites() {
        let again = Assembler::from_spec(&site.to_spec()).unwrap();
        assert_eq!(again.to_spec(), site.to_spec(), "{name}");
    }
}

#[test]
fn monomorphism_by_table() {
    for (name, s) in fixtures::sites() {
        let n = s.num_objects();
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    for &h in s.hom(a, b) {
                        for &k in s.hom(a, b) {
                            for &f in s.hom(b, c) {
                                if s.compose(f, h) == s.compose(f, k) {
                                    assert_eq!(h, k, "{name}");
                                }
                            }
                        }
                    }
                }
            }
        }
    }
}

#[test]
fn wedge_examples() {
    let p = fixtures::point();
    let one = wedge_assembler(&[&p]).unwrap();
    assert_eq!(one.num_objects(), p.num_objects());
    let two = wedge_assembler(&[&p, &p]).unwrap();
    assert_eq!(two.num_objects(), 3);
    let objs = two.noninitial_objects();
    assert!(two.hom(objs[0], objs[1]).is_empty() && two.hom(objs[1], objs[0]).is_empty());
    let hp = wedge_assembler(&[&fixtures::halfsplit(), &p]).unwrap();
    assert_eq!(hp.noninitial_objects().len(), 4);
    assert!(validate_assembler(&hp).passed());
    assert_eq!(hp.declared_covers().iter().filter(|c| !hp.is_initial(c.target)).count(), 1);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn wedges_validate_and_k0_adds(i in 0usize..6, j in 0usize..6) {
        let sites = fixtures::sites();
        let (a, b) = (&sites[i].1, &sites[j].1);
        let w = wedge_assembler(&[a, b]).unwrap();
        prop_assert!(validate_assembler(&w).passed());
        let (ka, kb, kw) = (kgroups::k0(a), kgroups::k0(b), kgroups::k0(&w));
        prop_assert_eq!(kw.group.rank, ka.group.rank + kb.group.rank);
        let mut t = [ka.group.torsion.clone(), kb.group.torsion.clone()].concat();
        t.sort();
        let mut tw = kw.group.torsion.clone();
        tw.sort();
        prop_assert_eq!(tw, t);
    }
}

#[test]
fn cofiber_of_identity_on_point() {
    let p = fixtures::point();
    let l = cofiber(&p, &p, &[("P", "P")]);
    let sizes: Vec<_> = (0..3).map(|n| l.level(n).num_objects()).collect();
    assert_eq!(sizes, vec![2, 3, 4]);
    assert!(check_simplicial_identities(&l).is_empty());
}

#[test]
fn cofiber_of_point_in_halfsplit() {
    let l = fixtures::cofiber_halfsplit_point();
    assert_eq!(l.level(1).noninitial_objects().len(), 4);
    for n in 0..3 {
        assert!(validate_assembler(l.level(n)).passed(), "level {n}");
    }
    assert!(check_simplicial_identities(&l).is_empty());
}

#[test]
fn d0_on_the_sub_copy_is_f() {
    for l in [fixtures::cofiber_double_cover(), fixtures::cofiber_halfsplit_point()] {
        for x in l.sub.noninitial_objects() {
            let y = l.embed(1, 1, x);
            assert_eq!(l.part(1, y), Part::Sub(1, x));
            assert_eq!(l.face(1, 0).obj(y), l.embed(0, 0, l.map.obj(x)));
            assert!(l.level(0).is_initial(l.face(1, 1).obj(y)));
        }
    }
}
