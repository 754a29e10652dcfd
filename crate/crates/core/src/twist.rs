//! The Grothendieck twist of the noninitial part of an assembler.
//!
//! Index sets are `0..n`; a [`TwObject`] is the list of its entries and a
//! [`TwMorphism`] stores its set map as an array. Coproducts concatenate, so
//! they are strictly associative with the empty family as unit.

use serde::{Deserialize, Serialize};

use crate::assembler::{Assembler, MorId, ObjId};
use crate::error::{Error, Result};

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TwObject {
    pub objects: Vec<ObjId>,
}

impl TwObject {
    pub fn new(site: &Assembler, objects: Vec<ObjId>) -> Result<Self> {
        for &x in &objects {
            if x >= site.num_objects() {
                return Err(Error::Structural(format!("object id {x} out of range")));
            }
            if site.is_initial(x) {
                return Err(Error::Structural("twist objects cannot contain the initial object".into()));
            }
        }
        Ok(TwObject { objects })
    }

    pub fn empty() -> Self {
        TwObject { objects: Vec::new() }
    }

    pub fn singleton(x: ObjId) -> Self {
        TwObject { objects: vec![x] }
    }

    pub fn len(&self) -> usize {
        self.objects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.objects.is_empty()
    }

    pub fn names(&self, site: &Assembler) -> Vec<String> {
        self.objects.iter().map(|&x| site.object_name(x).to_string()).collect()
    }

    pub fn sub(&self, indices: &[usize]) -> TwObject {
        TwObject { objects: indices.iter().map(|&i| self.objects[i]).collect() }
    }
}

pub fn tw_coproduct(a: &TwObject, b: &TwObject) -> TwObject {
    let mut objects = a.objects.clone();
    objects.extend_from_slice(&b.objects);
    TwObject { objects }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TwMorphism {
    pub source: TwObject,
    pub target: TwObject,
    pub set_map: Vec<usize>,
    pub components: Vec<MorId>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct MorphismClass {
    pub is_sub: bool,
    pub is_cover: bool,
    pub is_move: bool,
}

impl TwMorphism {
    pub fn new(
        site: &Assembler,
        source: TwObject,
        target: TwObject,
        set_map: Vec<usize>,
        components: Vec<MorId>,
    ) -> Result<Self> {
        let m = TwMorphism { source, target, set_map, components };
        m.check(site)?;
        Ok(m)
    }

    pub fn check(&self, site: &Assembler) -> Result<()> {
        if self.set_map.len() != self.source.len() || self.components.len() != self.source.len() {
            return Err(Error::Structural("set map and components must have one entry per source index".into()));
        }
        for (i, (&j, &c)) in self.set_map.iter().zip(&self.components).enumerate() {
            if j >= self.target.len() {
                return Err(Error::Structural(format!("index {i} maps outside the target")));
            }
            if c >= site.num_morphisms()
                || site.src(c) != self.source.objects[i]
                || site.dst(c) != self.target.objects[j]
            {
                return Err(Error::Structural(format!("component {i} has the wrong source or target")));
            }
        }
        Ok(())
    }

    pub fn identity(site: &Assembler, x: &TwObject) -> Self {
        TwMorphism {
            source: x.clone(),
            target: x.clone(),
            set_map: (0..x.len()).collect(),
            components: x.objects.iter().map(|&o| site.identity(o)).collect(),
        }
    }

    /// The morphism out of the empty family.
    pub fn from_empty(target: &TwObject) -> Self {
        TwMorphism { source: TwObject::empty(), target: target.clone(), set_map: vec![], components: vec![] }
    }

    /// `self` followed by `next`.
    pub fn then(&self, site: &Assembler, next: &TwMorphism) -> TwMorphism {
        debug_assert_eq!(self.target, next.source);
        TwMorphism {
            source: self.source.clone(),
            target: next.target.clone(),
            set_map: self.set_map.iter().map(|&j| next.set_map[j]).collect(),
            components: self
                .set_map
                .iter()
                .zip(&self.components)
                .map(|(&j, &c)| site.compose(next.components[j], c))
                .collect(),
        }
    }

    pub fn fiber(&self, j: usize) -> Vec<usize> {
        (0..self.source.len()).filter(|&i| self.set_map[i] == j).collect()
    }

    pub fn is_injective(&self) -> bool {
        let mut seen = vec![false; self.target.len()];
        self.set_map.iter().all(|&j| !std::mem::replace(&mut seen[j], true))
    }

    pub fn is_surjective(&self) -> bool {
        let mut seen = vec![false; self.target.len()];
        for &j in &self.set_map {
            seen[j] = true;
        }
        seen.into_iter().all(|b| b)
    }

    pub fn is_bijective(&self) -> bool {
        self.source.len() == self.target.len() && self.is_injective()
    }

    /// Inverse of a move with bijective set map.
    pub fn inverse(&self, site: &Assembler) -> Option<TwMorphism> {
        if !self.is_bijective() {
            return None;
        }
        let mut set_map = vec![0; self.target.len()];
        let mut components = vec![0; self.target.len()];
        for (i, &j) in self.set_map.iter().enumerate() {
            set_map[j] = i;
            components[j] = site.inverse(self.components[i])?;
        }
        Some(TwMorphism { source: self.target.clone(), target: self.source.clone(), set_map, components })
    }

    /// Coproduct of morphisms; indices of the right summand follow those of the left.
    pub fn coproduct(&self, other: &TwMorphism) -> TwMorphism {
        let shift = self.target.len();
        let mut set_map = self.set_map.clone();
        set_map.extend(other.set_map.iter().map(|&j| j + shift));
        let mut components = self.components.clone();
        components.extend_from_slice(&other.components);
        TwMorphism {
            source: tw_coproduct(&self.source, &other.source),
            target: tw_coproduct(&self.target, &other.target),
            set_map,
            components,
        }
    }
}

pub fn is_sub_map(site: &Assembler, m: &TwMorphism) -> bool {
    for i in 0..m.source.len() {
        for k in (i + 1)..m.source.len() {
            if m.set_map[i] == m.set_map[k] {
                match site.are_disjoint(m.components[i], m.components[k]) {
                    Ok(true) => {}
                    _ => return false,
                }
            }
        }
    }
    true
}

pub fn is_covering_family(site: &Assembler, m: &TwMorphism) -> bool {
    (0..m.target.len()).all(|j| {
        let fam: Vec<MorId> = m.fiber(j).iter().map(|&i| m.components[i]).collect();
        site.is_covering(m.target.objects[j], &fam)
    })
}

pub fn is_move(site: &Assembler, m: &TwMorphism) -> bool {
    m.components.iter().all(|&c| site.is_iso(c))
}

pub fn classify(site: &Assembler, m: &TwMorphism) -> Result<MorphismClass> {
    m.check(site)?;
    let is_sub = is_sub_map(site, m);
    Ok(MorphismClass { is_sub, is_cover: is_sub && is_covering_family(site, m), is_move: is_move(site, m) })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwPullback {
    pub apex: TwObject,
    /// Projection to the source of the left morphism.
    pub left: TwMorphism,
    /// Projection to the source of the right morphism.
    pub right: TwMorphism,
    /// `(i, k)` for each apex index.
    pub pairs: Vec<(usize, usize)>,
}

/// Fiberwise pullback; pairs whose site pullback is initial are dropped.
pub fn tw_pullback(site: &Assembler, f: &TwMorphism, g: &TwMorphism) -> Result<TwPullback> {
    if f.target != g.target {
        return Err(Error::Structural("pullback of morphisms with different codomains".into()));
    }
    let mut apex = Vec::new();
    let mut pairs = Vec::new();
    let mut lc = Vec::new();
    let mut rc = Vec::new();
    for i in 0..f.source.len() {
        for k in 0..g.source.len() {
            if f.set_map[i] != g.set_map[k] {
                continue;
            }
            let pb = site.pullback(f.components[i], g.components[k])?;
            if site.is_initial(pb.apex) {
                continue;
            }
            apex.push(pb.apex);
            pairs.push((i, k));
            lc.push(pb.left);
            rc.push(pb.right);
        }
    }
    let apex = TwObject { objects: apex };
    Ok(TwPullback {
        left: TwMorphism {
            source: apex.clone(),
            target: f.source.clone(),
            set_map: pairs.iter().map(|p| p.0).collect(),
            components: lc,
        },
        right: TwMorphism {
            source: apex.clone(),
            target: g.source.clone(),
            set_map: pairs.iter().map(|p| p.1).collect(),
            components: rc,
        },
        apex,
        pairs,
    })
}

/// Every morphism `source → target` whose set map respects `allowed`.
fn enumerate_with(
    site: &Assembler,
    source: &TwObject,
    target: &TwObject,
    allowed: &dyn Fn(usize, usize, MorId) -> bool,
) -> Vec<TwMorphism> {
    let options: Vec<Vec<(usize, MorId)>> = source
        .objects
        .iter()
        .enumerate()
        .map(|(i, &a)| {
            let mut opts = Vec::new();
            for (j, &b) in target.objects.iter().enumerate() {
                for &c in site.hom(a, b) {
                    if allowed(i, j, c) {
                        opts.push((j, c));
                    }
                }
            }
            opts
        })
        .collect();
    let sizes: Vec<usize> = options.iter().map(Vec::len).collect();
    crate::assembler::product_indices(&sizes)
        .into_iter()
        .map(|choice| {
            let picks: Vec<(usize, MorId)> = choice.iter().enumerate().map(|(i, &k)| options[i][k]).collect();
            TwMorphism {
                source: source.clone(),
                target: target.clone(),
                set_map: picks.iter().map(|p| p.0).collect(),
                components: picks.iter().map(|p| p.1).collect(),
            }
        })
        .collect()
}

/// All morphisms of the twist between two objects.
pub fn all_morphisms(site: &Assembler, source: &TwObject, target: &TwObject) -> Vec<TwMorphism> {
    enumerate_with(site, source, target, &|_, _, _| true)
}

/// Morphisms `u: dom x → dom y` with `y ∘ u = x`.
pub fn hom_set(site: &Assembler, x: &TwMorphism, y: &TwMorphism) -> Vec<TwMorphism> {
    if x.target != y.target {
        return Vec::new();
    }
    enumerate_with(site, &x.source, &y.source, &|i, j, c| {
        y.set_map[j] == x.set_map[i] && site.compose(y.components[j], c) == x.components[i]
    })
}

/// Whether two objects over the same base are isomorphic over it.
pub fn isomorphic_over(site: &Assembler, x: &TwMorphism, y: &TwMorphism) -> bool {
    x.source.len() == y.source.len()
        && hom_set(site, x, y).iter().any(|u| u.is_bijective() && is_move(site, u))
}

/// `σ*q`: the pullback of `q` along the move `σ`, as an object over `dom σ`.
pub fn pullback_along(site: &Assembler, sigma: &TwMorphism, q: &TwMorphism) -> Result<TwPullback> {
    tw_pullback(site, q, sigma)
}

/// `σ*` on a morphism `u: q1 → q2` over `cod σ`.
pub fn pullback_morphism(
    site: &Assembler,
    sigma: &TwMorphism,
    q1: &TwMorphism,
    q2: &TwMorphism,
    u: &TwMorphism,
) -> Result<TwMorphism> {
    let p1 = pullback_along(site, sigma, q1)?;
    let p2 = pullback_along(site, sigma, q2)?;
    let mut set_map = Vec::new();
    let mut components = Vec::new();
    for (t, &(x, i)) in p1.pairs.iter().enumerate() {
        let target = (u.set_map[x], i);
        let s = p2
            .pairs
            .iter()
            .position(|&p| p == target)
            .ok_or_else(|| Error::Inconsistent("pullback index missing under σ*".into()))?;
        let want_l = site.compose(u.components[x], p1.left.components[t]);
        let want_r = p1.right.components[t];
        let c = site
            .find_morphism(p1.apex.objects[t], p2.apex.objects[s], |c| {
                site.compose(p2.left.components[s], c) == want_l && site.compose(p2.right.components[s], c) == want_r
            })
            .ok_or_else(|| Error::Inconsistent("no comparison map into the pullback".into()))?;
        set_map.push(s);
        components.push(c);
    }
    Ok(TwMorphism { source: p1.apex, target: p2.apex, set_map, components })
}

/// `Π_σ p` for a move `σ: A → B` and `p: A' → A`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DependentProduct {
    /// The structure map `Π_σ p → B`.
    pub morphism: TwMorphism,
    /// For each index: its base index `b` and the chosen `k_j ∈ p⁻¹(i_j)` along the fiber of `σ` over `b`.
    pub tuples: Vec<(usize, Vec<usize>)>,
    /// `legs[t][j]`: the projection from entry `t` to `A'_{k_j}`.
    pub legs: Vec<Vec<MorId>>,
}

pub fn dependent_product(site: &Assembler, sigma: &TwMorphism, p: &TwMorphism) -> Result<DependentProduct> {
    if !is_move(site, sigma) {
        return Err(Error::Precondition("dependent products are taken along moves".into()));
    }
    if p.target != sigma.source {
        return Err(Error::Precondition("p must land in the source of σ".into()));
    }
    let mut objects = Vec::new();
    let mut set_map = Vec::new();
    let mut components = Vec::new();
    let mut tuples = Vec::new();
    let mut legs_all = Vec::new();
    for b in 0..sigma.target.len() {
        let fiber = sigma.fiber(b);
        if fiber.is_empty() {
            objects.push(sigma.target.objects[b]);
            set_map.push(b);
            components.push(site.identity(sigma.target.objects[b]));
            tuples.push((b, Vec::new()));
            legs_all.push(Vec::new());
            continue;
        }
        let choices: Vec<Vec<usize>> = fiber.iter().map(|&i| p.fiber(i)).collect();
        let sizes: Vec<usize> = choices.iter().map(Vec::len).collect();
        'tuple: for pick in crate::assembler::product_indices(&sizes) {
            let ks: Vec<usize> = pick.iter().enumerate().map(|(j, &x)| choices[j][x]).collect();
            let leg_to_b = |j: usize| site.compose(sigma.components[fiber[j]], p.components[ks[j]]);
            let mut obj = p.source.objects[ks[0]];
            let mut h = leg_to_b(0);
            let mut legs = vec![site.identity(obj)];
            for j in 1..ks.len() {
                let pb = site.pullback(h, leg_to_b(j))?;
                if site.is_initial(pb.apex) {
                    continue 'tuple;
                }
                legs = legs.into_iter().map(|l| site.compose(l, pb.left)).collect();
                legs.push(pb.right);
                h = site.compose(h, pb.left);
                obj = pb.apex;
            }
            objects.push(obj);
            set_map.push(b);
            components.push(h);
            tuples.push((b, ks));
            legs_all.push(legs);
        }
    }
    Ok(DependentProduct {
        morphism: TwMorphism { source: TwObject { objects }, target: sigma.target.clone(), set_map, components },
        tuples,
        legs: legs_all,
    })
}

/// The counit `σ*Π_σ p → p`, as a morphism between the sources.
pub fn counit(site: &Assembler, sigma: &TwMorphism, p: &TwMorphism) -> Result<(TwPullback, TwMorphism)> {
    let dp = dependent_product(site, sigma, p)?;
    let pb = pullback_along(site, sigma, &dp.morphism)?;
    let mut set_map = Vec::new();
    let mut components = Vec::new();
    for (s, &(t, i)) in pb.pairs.iter().enumerate() {
        let (b, ks) = &dp.tuples[t];
        let fiber = sigma.fiber(*b);
        let j = fiber.iter().position(|&x| x == i).expect("pair lies over the fiber");
        set_map.push(ks[j]);
        components.push(site.compose(dp.legs[t][j], pb.left.components[s]));
    }
    let eps = TwMorphism { source: pb.apex.clone(), target: p.source.clone(), set_map, components };
    Ok((pb, eps))
}

/// The unit `q → Π_σ σ*q`, as a morphism between the sources.
pub fn unit(site: &Assembler, sigma: &TwMorphism, q: &TwMorphism) -> Result<(DependentProduct, TwMorphism)> {
    let pb = pullback_along(site, sigma, q)?;
    let dp = dependent_product(site, sigma, &pb.right)?;
    let mut set_map = Vec::new();
    let mut components = Vec::new();
    for x in 0..q.source.len() {
        let b = q.set_map[x];
        let fiber = sigma.fiber(b);
        let mut ks = Vec::new();
        for &i in &fiber {
            let k = pb
                .pairs
                .iter()
                .position(|&pr| pr == (x, i))
                .ok_or_else(|| Error::Inconsistent("unit: missing pullback index".into()))?;
            ks.push(k);
        }
        let t = dp
            .tuples
            .iter()
            .position(|(bb, kk)| *bb == b && *kk == ks)
            .ok_or_else(|| Error::Inconsistent("unit: tuple pruned".into()))?;
        let bx = q.source.objects[x];
        let c = site
            .find_morphism(bx, dp.morphism.source.objects[t], |c| {
                site.compose(dp.morphism.components[t], c) == q.components[x]
                    && ks.iter().enumerate().all(|(j, &k)| {
                        site.compose(pb.left.components[k], site.compose(dp.legs[t][j], c)) == site.identity(bx)
                    })
            })
            .ok_or_else(|| Error::Inconsistent("unit: no factorization".into()))?;
        set_map.push(t);
        components.push(c);
    }
    let eta = TwMorphism { source: q.source.clone(), target: dp.morphism.source.clone(), set_map, components };
    Ok((dp, eta))
}

/// `Π_σ` on a morphism `u: p1 → p2` over `dom σ`.
pub fn dependent_product_morphism(
    site: &Assembler,
    sigma: &TwMorphism,
    p1: &TwMorphism,
    p2: &TwMorphism,
    u: &TwMorphism,
) -> Result<TwMorphism> {
    let d1 = dependent_product(site, sigma, p1)?;
    let d2 = dependent_product(site, sigma, p2)?;
    let mut set_map = Vec::new();
    let mut components = Vec::new();
    for (t, (b, ks)) in d1.tuples.iter().enumerate() {
        let image: Vec<usize> = ks.iter().map(|&k| u.set_map[k]).collect();
        let s = d2
            .tuples
            .iter()
            .position(|(bb, kk)| bb == b && *kk == image)
            .ok_or_else(|| Error::Inconsistent("Π on morphisms: tuple pruned".into()))?;
        let c = site
            .find_morphism(d1.morphism.source.objects[t], d2.morphism.source.objects[s], |c| {
                site.compose(d2.morphism.components[s], c) == d1.morphism.components[t]
                    && ks.iter().enumerate().all(|(j, &k)| {
                        site.compose(d2.legs[s][j], c) == site.compose(u.components[k], d1.legs[t][j])
                    })
            })
            .ok_or_else(|| Error::Inconsistent("Π on morphisms: no comparison map".into()))?;
        set_map.push(s);
        components.push(c);
    }
    Ok(TwMorphism { source: d1.morphism.source, target: d2.morphism.source, set_map, components })
}

/// Every twist object with at most `max_len` entries, shortest first.
pub fn small_objects(site: &Assembler, max_len: usize) -> Vec<TwObject> {
    let objs = site.noninitial_objects();
    let mut out = vec![TwObject::empty()];
    let mut frontier = vec![TwObject::empty()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for t in &frontier {
            for &o in &objs {
                let mut v = t.objects.clone();
                v.push(o);
                next.push(TwObject { objects: v });
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

/// Moves `source → target`.
pub fn moves(site: &Assembler, source: &TwObject, target: &TwObject) -> Vec<TwMorphism> {
    enumerate_with(site, source, target, &|_, _, c| site.is_iso(c))
}

/// Sub-maps `source → target`.
pub fn sub_maps(site: &Assembler, source: &TwObject, target: &TwObject) -> Vec<TwMorphism> {
    all_morphisms(site, source, target).into_iter().filter(|m| is_sub_map(site, m)).collect()
}
