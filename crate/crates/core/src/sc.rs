//! Spans `A ← A' → B` with a sub-map on the left and a move on the right,
//! taken up to isomorphism of the apex.

use serde::{Deserialize, Serialize};

use crate::assembler::{check_condition_g, Assembler, MorId};
use crate::error::{Error, Result};
use crate::twist::{self, tw_coproduct, tw_pullback, TwMorphism, TwObject};

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ScSpan {
    pub source: TwObject,
    pub target: TwObject,
    pub apex: TwObject,
    pub sub_leg: TwMorphism,
    pub move_leg: TwMorphism,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScClass {
    pub is_cofibration: bool,
    pub is_weak_equivalence: bool,
}

impl ScSpan {
    pub fn new(site: &Assembler, sub_leg: TwMorphism, move_leg: TwMorphism) -> Result<Self> {
        if sub_leg.source != move_leg.source {
            return Err(Error::Structural("span legs must share an apex".into()));
        }
        sub_leg.check(site)?;
        move_leg.check(site)?;
        if !twist::is_sub_map(site, &sub_leg) {
            return Err(Error::Structural("left leg of a span must be a sub-map".into()));
        }
        if !twist::is_move(site, &move_leg) {
            return Err(Error::Structural("right leg of a span must be a move".into()));
        }
        Ok(Self::from_legs(sub_leg, move_leg))
    }

    pub fn from_legs(sub_leg: TwMorphism, move_leg: TwMorphism) -> Self {
        ScSpan {
            source: sub_leg.target.clone(),
            target: move_leg.target.clone(),
            apex: sub_leg.source.clone(),
            sub_leg,
            move_leg,
        }
    }

    pub fn identity(site: &Assembler, x: &TwObject) -> Self {
        let id = TwMorphism::identity(site, x);
        Self::from_legs(id.clone(), id)
    }

    /// The span `A ← A → B` of a move.
    pub fn from_move(site: &Assembler, m: &TwMorphism) -> Self {
        Self::from_legs(TwMorphism::identity(site, &m.source), m.clone())
    }
}

/// `f` followed by `g`.
pub fn sc_compose(site: &Assembler, f: &ScSpan, g: &ScSpan) -> Result<ScSpan> {
    if f.target != g.source {
        return Err(Error::Precondition("spans are not composable".into()));
    }
    let pb = tw_pullback(site, &f.move_leg, &g.sub_leg)?;
    Ok(ScSpan::from_legs(pb.left.then(site, &f.sub_leg), pb.right.then(site, &g.move_leg)))
}

/// A bijection `source → target` with iso components, each allowed by `ok`.
pub(crate) fn find_iso(
    site: &Assembler,
    source: &TwObject,
    target: &TwObject,
    ok: &dyn Fn(usize, usize, MorId) -> bool,
) -> Option<TwMorphism> {
    fn go(
        site: &Assembler,
        source: &TwObject,
        target: &TwObject,
        ok: &dyn Fn(usize, usize, MorId) -> bool,
        i: usize,
        used: &mut Vec<bool>,
        picks: &mut Vec<(usize, MorId)>,
    ) -> bool {
        if i == source.len() {
            return true;
        }
        for j in 0..target.len() {
            if used[j] {
                continue;
            }
            for &c in site.hom(source.objects[i], target.objects[j]) {
                if site.is_iso(c) && ok(i, j, c) {
                    used[j] = true;
                    picks.push((j, c));
                    if go(site, source, target, ok, i + 1, used, picks) {
                        return true;
                    }
                    picks.pop();
                    used[j] = false;
                }
            }
        }
        false
    }
    if source.len() != target.len() {
        return None;
    }
    let mut used = vec![false; target.len()];
    let mut picks = Vec::new();
    if !go(site, source, target, ok, 0, &mut used, &mut picks) {
        return None;
    }
    Some(TwMorphism {
        source: source.clone(),
        target: target.clone(),
        set_map: picks.iter().map(|p| p.0).collect(),
        components: picks.iter().map(|p| p.1).collect(),
    })
}

pub fn sc_equivalent(site: &Assembler, s1: &ScSpan, s2: &ScSpan) -> bool {
    if s1.source != s2.source || s1.target != s2.target {
        return false;
    }
    find_iso(site, &s1.apex, &s2.apex, &|i, j, c| {
        s1.sub_leg.set_map[i] == s2.sub_leg.set_map[j]
            && s1.move_leg.set_map[i] == s2.move_leg.set_map[j]
            && site.compose(s2.sub_leg.components[j], c) == s1.sub_leg.components[i]
            && site.compose(s2.move_leg.components[j], c) == s1.move_leg.components[i]
    })
    .is_some()
}

pub fn sc_classify(site: &Assembler, s: &ScSpan) -> ScClass {
    let covering = twist::is_covering_family(site, &s.sub_leg) && twist::is_sub_map(site, &s.sub_leg);
    ScClass {
        is_cofibration: covering && s.move_leg.is_injective(),
        is_weak_equivalence: covering && s.move_leg.is_bijective(),
    }
}

/// A weak equivalence `A ⇝ B` in canonical form: a covering sub-map `B → A`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Weq {
    pub cover: TwMorphism,
}

impl Weq {
    pub fn new(site: &Assembler, cover: TwMorphism) -> Result<Self> {
        cover.check(site)?;
        if !(twist::is_sub_map(site, &cover) && twist::is_covering_family(site, &cover)) {
            return Err(Error::Structural("a weak equivalence needs a covering sub-map".into()));
        }
        Ok(Weq { cover })
    }

    pub fn source(&self) -> &TwObject {
        &self.cover.target
    }

    pub fn target(&self) -> &TwObject {
        &self.cover.source
    }

    pub fn identity(site: &Assembler, x: &TwObject) -> Self {
        Weq { cover: TwMorphism::identity(site, x) }
    }

    pub fn is_identity(&self, site: &Assembler) -> bool {
        self.cover == TwMorphism::identity(site, &self.cover.source)
    }

    /// The weak equivalence `A ⇝ A∘π` reordering entries; `perm[k]` is the
    /// source index placed at position `k` of the target.
    pub fn permutation(site: &Assembler, source: &TwObject, perm: &[usize]) -> Self {
        let target = source.sub(perm);
        Weq {
            cover: TwMorphism {
                components: target.objects.iter().map(|&o| site.identity(o)).collect(),
                source: target,
                target: source.clone(),
                set_map: perm.to_vec(),
            },
        }
    }

    /// `τ_{x,y} = y ⊔ x ⇝ x ⊔ y`.
    pub fn tau(site: &Assembler, x: &TwObject, y: &TwObject) -> Self {
        let source = tw_coproduct(y, x);
        let perm: Vec<usize> = (y.len()..y.len() + x.len()).chain(0..y.len()).collect();
        Weq::permutation(site, &source, &perm)
    }

    /// `self` then `next`.
    pub fn then(&self, site: &Assembler, next: &Weq) -> Weq {
        Weq { cover: next.cover.then(site, &self.cover) }
    }

    pub fn coproduct(&self, other: &Weq) -> Weq {
        Weq { cover: self.cover.coproduct(&other.cover) }
    }

    pub fn to_span(&self, site: &Assembler) -> ScSpan {
        ScSpan::from_legs(self.cover.clone(), TwMorphism::identity(site, &self.cover.source))
    }

    /// The canonical representative of a weak-equivalence span.
    pub fn from_span(site: &Assembler, s: &ScSpan) -> Option<Weq> {
        if !sc_classify(site, s).is_weak_equivalence {
            return None;
        }
        let inv = s.move_leg.inverse(site)?;
        Some(Weq { cover: inv.then(site, &s.sub_leg) })
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SaturationReport {
    pub condition_g: bool,
    pub direction_one_checked: usize,
    pub direction_one_failures: Vec<String>,
    pub direction_two_checked: usize,
    /// Pairs with `gf` and `g` weak equivalences but `f` not one.
    pub direction_two_failures: Vec<String>,
}

impl SaturationReport {
    /// Direction two only counts when (G) holds.
    pub fn passed(&self) -> bool {
        self.direction_one_failures.is_empty() && (!self.condition_g || self.direction_two_failures.is_empty())
    }

    pub fn direction_two_guaranteed(&self) -> bool {
        self.condition_g
    }
}

fn describe(site: &Assembler, f: &ScSpan, g: &ScSpan) -> String {
    format!(
        "{:?} <- {:?} -> {:?} <- {:?} -> {:?}",
        f.source.names(site),
        f.apex.names(site),
        f.target.names(site),
        g.apex.names(site),
        g.target.names(site)
    )
}

pub fn check_saturation(site: &Assembler, samples: &[(ScSpan, ScSpan)]) -> Result<SaturationReport> {
    let mut report = SaturationReport { condition_g: check_condition_g(site), ..Default::default() };
    for (f, g) in samples {
        let gf = sc_compose(site, f, g)?;
        if !sc_classify(site, &gf).is_weak_equivalence {
            continue;
        }
        let fw = sc_classify(site, f).is_weak_equivalence;
        let gw = sc_classify(site, g).is_weak_equivalence;
        if fw {
            report.direction_one_checked += 1;
            if !gw {
                report.direction_one_failures.push(describe(site, f, g));
            }
        }
        if gw {
            report.direction_two_checked += 1;
            if !fw {
                report.direction_two_failures.push(describe(site, f, g));
            }
        }
    }
    Ok(report)
}

/// Every span between objects with at most `max_len` entries.
pub fn enumerate_spans(site: &Assembler, max_len: usize) -> Vec<ScSpan> {
    let objs = twist::small_objects(site, max_len);
    let mut out = Vec::new();
    for apex in &objs {
        for a in &objs {
            let subs = twist::sub_maps(site, apex, a);
            if subs.is_empty() {
                continue;
            }
            for b in &objs {
                for m in twist::moves(site, apex, b) {
                    for p in &subs {
                        out.push(ScSpan::from_legs(p.clone(), m.clone()));
                    }
                }
            }
        }
    }
    out
}

/// Composable pairs where at least one side is a weak equivalence.
pub fn saturation_samples(site: &Assembler, max_len: usize) -> Vec<(ScSpan, ScSpan)> {
    let spans = enumerate_spans(site, max_len);
    let weq: Vec<bool> = spans.iter().map(|s| sc_classify(site, s).is_weak_equivalence).collect();
    let mut out = Vec::new();
    for (i, f) in spans.iter().enumerate() {
        for (j, g) in spans.iter().enumerate() {
            if f.target == g.source && (weq[i] || weq[j]) {
                out.push((f.clone(), g.clone()));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn cover_ab(site: &Assembler) -> TwMorphism {
        let (a, b, x) = (site.object_id("A").unwrap(), site.object_id("B").unwrap(), site.object_id("X").unwrap());
        TwMorphism::new(
            site,
            TwObject::new(site, vec![a, b]).unwrap(),
            TwObject::singleton(x),
            vec![0, 0],
            vec![site.morphism_id("a").unwrap(), site.morphism_id("b").unwrap()],
        )
        .unwrap()
    }

    #[test]
    fn identity_span_is_weq() {
        let s = fixtures::halfsplit();
        let x = TwObject::new(&s, vec![1, 3]).unwrap();
        let c = sc_classify(&s, &ScSpan::identity(&s, &x));
        assert!(c.is_cofibration && c.is_weak_equivalence);
    }

    #[test]
    fn relabeled_apex_is_equivalent() {
        let s = fixtures::halfsplit();
        let w = Weq::new(&s, cover_ab(&s)).unwrap();
        let span = w.to_span(&s);
        let swap = Weq::permutation(&s, &span.apex, &[1, 0]).cover;
        let relabeled = ScSpan::new(&s, swap.then(&s, &span.sub_leg), swap.then(&s, &span.move_leg)).unwrap();
        assert_ne!(relabeled, span);
        assert!(sc_equivalent(&s, &span, &relabeled));
        let canon = Weq::from_span(&s, &relabeled).unwrap();
        assert!(sc_equivalent(&s, &canon.to_span(&s), &span));
    }

    #[test]
    fn non_injective_move_is_not_cofibration() {
        let s = fixtures::halfsplit();
        let a = s.object_id("A").unwrap();
        let aa = TwObject::new(&s, vec![a, a]).unwrap();
        let id = TwMorphism::identity(&s, &aa);
        let fold = TwMorphism::new(&s, aa.clone(), TwObject::singleton(a), vec![0, 0], vec![s.identity(a); 2]).unwrap();
        let c = sc_classify(&s, &ScSpan::new(&s, id, fold).unwrap());
        assert_eq!(c, ScClass::default());
    }

    #[test]
    fn empty_cover_breaks_direction_two() {
        let s = fixtures::empty_cover();
        let p = TwObject::singleton(s.object_id("P").unwrap());
        let f = ScSpan::new(&s, TwMorphism::from_empty(&p), TwMorphism::from_empty(&p)).unwrap();
        let g = Weq::new(&s, TwMorphism::from_empty(&p)).unwrap().to_span(&s);
        let report = check_saturation(&s, &[(f, g)]).unwrap();
        assert!(!report.condition_g);
        assert_eq!(report.direction_two_failures.len(), 1);
        assert!(report.passed());
    }
}
