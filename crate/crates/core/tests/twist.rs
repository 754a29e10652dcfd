use proptest::prelude::*;
use proptest::sample::Index;
use sck1_core::assembler::Assembler;
use sck1_core::fixtures;
use sck1_core::twist::{self, TwMorphism, TwObject};

fn morphisms(site: &Assembler, max_len: usize) -> Vec<TwMorphism> {
    let objs = twist::small_objects(site, max_len);
    let mut out = Vec::new();
    for a in &objs {
        for b in &objs {
            out.extend(twist::all_morphisms(site, a, b));
        }
    }
    out
}

fn site(k: usize) -> (&'static str, Assembler) {
    fixtures::sites().swap_remove(k)
}

/// Apex entries of the pullback, built fiber by fiber from site pullbacks.
fn fiberwise_apex(site: &Assembler, f: &TwMorphism, g: &TwMorphism) -> Vec<usize> {
    let mut out = Vec::new();
    for j in 0..f.target.len() {
        for i in f.fiber(j) {
            for k in g.fiber(j) {
                let p = site.pullback(f.components[i], g.components[k]).unwrap();
                if !site.is_initial(p.apex) {
                    out.push(p.apex);
                }
            }
        }
    }
    out.sort();
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn pullback_is_fiberwise(k in 0usize..6, i in any::<Index>(), j in any::<Index>()) {
        let (_, s) = site(k);
        let ms = morphisms(&s, 2);
        let f = i.get(&ms);
        let same: Vec<_> = ms.iter().filter(|g| g.target == f.target).collect();
        let g = *j.get(&same);
        let pb = twist::tw_pullback(&s, f, g).unwrap();
        let mut apex = pb.apex.objects.clone();
        apex.sort();
        prop_assert_eq!(apex, fiberwise_apex(&s, f, g));
        prop_assert_eq!(pb.left.then(&s, f), pb.right.then(&s, g));
    }

    #[test]
    fn covering_sub_maps_are_stable_under_pullback(k in 0usize..6, i in any::<Index>(), j in any::<Index>()) {
        let (_, s) = site(k);
        let ms = morphisms(&s, 2);
        let covers: Vec<_> = ms.iter().filter(|m| twist::is_sub_map(&s, m) && twist::is_covering_family(&s, m)).collect();
        let f = *i.get(&covers);
        let along: Vec<_> = ms.iter().filter(|g| g.target == f.target).collect();
        let g = *j.get(&along);
        let pb = twist::tw_pullback(&s, f, g).unwrap();
        prop_assert!(twist::is_sub_map(&s, &pb.right));
        prop_assert!(twist::is_covering_family(&s, &pb.right));
    }

    #[test]
    fn composition_is_associative(k in 0usize..6, i in any::<Index>(), j in any::<Index>(), l in any::<Index>()) {
        let (_, s) = site(k);
        let ms = morphisms(&s, 2);
        let f = i.get(&ms);
        let gs: Vec<_> = ms.iter().filter(|g| g.source == f.target).collect();
        let g = *j.get(&gs);
        let hs: Vec<_> = ms.iter().filter(|h| h.source == g.target).collect();
        let h = *l.get(&hs);
        prop_assert_eq!(f.then(&s, g).then(&s, h), f.then(&s, &g.then(&s, h)));
    }
}

#[test]
fn sub_map_slices_are_preorders() {
    for (name, s) in fixtures::sites() {
        for base in twist::small_objects(&s, 1) {
            let subs: Vec<_> = twist::small_objects(&s, 2)
                .iter()
                .flat_map(|x| twist::sub_maps(&s, x, &base))
                .collect();
            for x in &subs {
                for y in &subs {
                    assert!(twist::hom_set(&s, x, y).len() <= 1, "{name}");
                }
            }
        }
    }
}

#[test]
fn hom_sets_contain_identities() {
    let s = fixtures::halfsplit();
    for x in twist::small_objects(&s, 2) {
        let id = TwMorphism::identity(&s, &x);
        assert!(twist::hom_set(&s, &id, &id).contains(&id));
    }
}

#[test]
fn hom_from_nonempty_to_empty_is_empty() {
    let s = fixtures::halfsplit();
    let a = TwObject::singleton(s.object_id("A").unwrap());
    assert!(twist::all_morphisms(&s, &a, &TwObject::empty()).is_empty());
}

#[test]
fn non_disjoint_family_is_not_a_sub_map() {
    let s = fixtures::halfsplit();
    let (a, x) = (s.object_id("A").unwrap(), s.object_id("X").unwrap());
    let m = TwMorphism::new(
        &s,
        TwObject::new(&s, vec![a, a]).unwrap(),
        TwObject::singleton(x),
        vec![0, 0],
        vec![s.morphism_id("a").unwrap(); 2],
    )
    .unwrap();
    assert!(!twist::is_sub_map(&s, &m));
}

#[test]
fn surjective_iso_fails_for_overlapping_families() {
    // Π_σ σ* q picks up the overlap of the two legs of q.
    let s = fixtures::halfsplit();
    let (a, x) = (s.object_id("A").unwrap(), s.object_id("X").unwrap());
    let xx = TwObject::new(&s, vec![x, x]).unwrap();
    let id_x = s.identity(x);
    let sigma = TwMorphism::new(&s, xx.clone(), TwObject::singleton(x), vec![0, 0], vec![id_x, id_x]).unwrap();
    let q = TwMorphism::new(
        &s,
        TwObject::new(&s, vec![a, x]).unwrap(),
        TwObject::singleton(x),
        vec![0, 0],
        vec![s.morphism_id("a").unwrap(), id_x],
    )
    .unwrap();
    let (dp, _) = twist::unit(&s, &sigma, &q).unwrap();
    assert!(!twist::isomorphic_over(&s, &dp.morphism, &q));
    let sub = TwMorphism::new(&s, TwObject::singleton(a), TwObject::singleton(x), vec![0], vec![s.morphism_id("a").unwrap()])
        .unwrap();
    let (dp, _) = twist::unit(&s, &sigma, &sub).unwrap();
    assert!(twist::isomorphic_over(&s, &dp.morphism, &sub));
}
