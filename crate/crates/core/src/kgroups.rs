//! K₀ of finite assemblers and K₁ representatives.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::assembler::{Assembler, ObjId, Part};
use crate::error::{Error, Result};
use crate::sc::Weq;
use crate::snf::{self, AbelianGroup, Smith};
use crate::sqm::{Generator, Letter, Presentation, SqmContext, SqmWord};
use crate::twist::{tw_coproduct, TwObject};

/// The free abelian group on noninitial objects modulo one relation per declared cover.
#[derive(Clone, Debug)]
pub struct K0Presentation {
    pub generators: Vec<String>,
    pub generator_ids: Vec<ObjId>,
    pub relations: Vec<Vec<BigInt>>,
    pub smith: Smith,
    pub group: AbelianGroup,
}

pub fn k0(site: &Assembler) -> K0Presentation {
    let generator_ids = site.noninitial_objects();
    let generators = generator_ids.iter().map(|&x| site.object_name(x).to_string()).collect();
    let column = |x: ObjId| generator_ids.iter().position(|&g| g == x);
    let mut relations = Vec::new();
    for c in site.declared_covers() {
        let mut row = vec![BigInt::zero(); generator_ids.len()];
        if let Some(t) = column(c.target) {
            row[t] += 1;
        }
        for &m in &c.family {
            if let Some(s) = column(site.src(m)) {
                row[s] -= 1;
            }
        }
        if row.iter().any(|x| !x.is_zero()) {
            relations.push(row);
        }
    }
    let smith = snf::smith(&relations, generator_ids.len());
    let group = snf::cokernel(&smith);
    K0Presentation { generators, generator_ids, relations, smith, group }
}

impl K0Presentation {
    pub fn column(&self, x: ObjId) -> Option<usize> {
        self.generator_ids.iter().position(|&g| g == x)
    }

    /// Vector of multiplicities of the entries of a family.
    pub fn vector_of(&self, objects: &[ObjId]) -> Vec<BigInt> {
        let mut v = vec![BigInt::zero(); self.generator_ids.len()];
        for &x in objects {
            if let Some(c) = self.column(x) {
                v[c] += 1;
            }
        }
        v
    }

    /// Coordinates of a class: torsion coordinates (reduced mod their factor) then free ones.
    pub fn class(&self, v: &[BigInt]) -> Vec<BigInt> {
        let n = self.generator_ids.len();
        let w: Vec<BigInt> = (0..n)
            .map(|j| (0..n).fold(BigInt::zero(), |acc, k| acc + &v[k] * &self.smith.v[k][j]))
            .collect();
        let mut out = Vec::new();
        for (k, wk) in w.iter().enumerate() {
            match self.smith.diagonal.get(k) {
                Some(d) if d.is_one() => {}
                Some(d) => out.push(wk.mod_floor(d)),
                None => out.push(wk.clone()),
            }
        }
        out
    }

    pub fn is_zero(&self, v: &[BigInt]) -> bool {
        self.class(v).iter().all(Zero::is_zero)
    }

    /// Rows of the generator-to-SNF-basis change of coordinates.
    pub fn basis_matrix(&self) -> &Vec<Vec<BigInt>> {
        &self.smith.v
    }
}

/// Renders an integer vector over named generators, e.g. `-[P] + [Q] + [R]`.
pub fn render_vector(names: &[String], v: &[BigInt]) -> String {
    let mut parts = Vec::new();
    for (name, c) in names.iter().zip(v) {
        if c.is_zero() {
            continue;
        }
        let sign = if c.is_negative() { "-" } else { "+" };
        let mag = c.abs();
        let coeff = if mag.is_one() { String::new() } else { format!("{mag}") };
        parts.push(format!("{sign} {coeff}[{name}]"));
    }
    if parts.is_empty() {
        return "0".into();
    }
    let joined = parts.join(" ");
    joined.strip_prefix("+ ").map(str::to_string).unwrap_or_else(|| joined.replacen("- ", "-", 1))
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct K0Report {
    pub group: String,
    pub rank: usize,
    pub torsion: Vec<String>,
    pub generators: Vec<String>,
    pub relations: Vec<Vec<String>>,
    pub basis: Vec<Vec<String>>,
}

impl K0Presentation {
    pub fn report(&self) -> K0Report {
        let s = |m: &Vec<Vec<BigInt>>| m.iter().map(|r| r.iter().map(|x| x.to_string()).collect()).collect();
        K0Report {
            group: self.group.to_string(),
            rank: self.group.rank,
            torsion: self.group.torsion.iter().map(|x| x.to_string()).collect(),
            generators: self.generators.clone(),
            relations: s(&self.relations),
            basis: s(&self.smith.v),
        }
    }
}

// ----- K₁ representatives -----

/// `{f_V, g_W : A₀ ⇝ B₀} = [f]⁻¹[V]⁻¹[W][g]` with `f: A₀ ⇝ B₀ ⊔ d₁V`,
/// `g: A₀ ⇝ B₀ ⊔ d₁W` and `d₀V = d₀W`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct K1Pair {
    pub a0: TwObject,
    pub b0: TwObject,
    pub v1: TwObject,
    pub f: Weq,
    pub w1: TwObject,
    pub g: Weq,
}

impl K1Pair {
    pub fn trivial(ctx: &SqmContext) -> Self {
        let id = Weq::identity(ctx.base(), &TwObject::empty());
        K1Pair {
            a0: TwObject::empty(),
            b0: TwObject::empty(),
            v1: TwObject::empty(),
            f: id.clone(),
            w1: TwObject::empty(),
            g: id,
        }
    }

    /// `{f, f}` on an arbitrary weak equivalence.
    pub fn diagonal(f: &Weq) -> Self {
        K1Pair {
            a0: f.source().clone(),
            b0: f.target().clone(),
            v1: TwObject::empty(),
            f: f.clone(),
            w1: TwObject::empty(),
            g: f.clone(),
        }
    }

    pub fn check(&self, ctx: &SqmContext) -> Result<()> {
        let site = ctx.base();
        for (name, w, v) in [("f", &self.f, &self.v1), ("g", &self.g, &self.w1)] {
            Weq::new(site, w.cover.clone())?;
            if *w.source() != self.a0 {
                return Err(Error::Structural(format!("{name} does not start at A")));
            }
            if *w.target() != tw_coproduct(&self.b0, &ctx.face_obj(1, 1, v)) {
                return Err(Error::Structural(format!("{name} does not end at B ⊔ d₁ of its level-1 object")));
            }
        }
        if ctx.face_obj(1, 0, &self.v1) != ctx.face_obj(1, 0, &self.w1) {
            return Err(Error::Structural("d₀V and d₀W differ".into()));
        }
        Ok(())
    }

    pub fn word(&self) -> SqmWord {
        SqmWord::from_letters(vec![
            Letter::new(Generator::Weq0(self.f.clone()), -1),
            Letter::new(Generator::Obj1(self.v1.clone()), -1),
            Letter::new(Generator::Obj1(self.w1.clone()), 1),
            Letter::new(Generator::Weq0(self.g.clone()), 1),
        ])
    }
}

/// `b ⊔ x ⊔ y ⊔ z ⇝ b ⊔ y ⊔ x ⊔ z` style block reorder of a weak equivalence's target.
fn reorder_target(site: &Assembler, w: &Weq, blocks: &[usize], order: &[usize]) -> Weq {
    let mut starts = vec![0];
    for b in blocks {
        starts.push(starts.last().unwrap() + b);
    }
    let perm: Vec<usize> = order.iter().flat_map(|&k| starts[k]..starts[k + 1]).collect();
    w.then(site, &Weq::permutation(site, w.target(), &perm))
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CurlyProduct {
    pub coproduct: K1Pair,
    /// Present when the target of the second pair is the source of the first.
    pub composite: Option<K1Pair>,
}

/// The product `x · y` of two pairs, in coproduct form and, when `y` ends
/// where `x` starts, in composition form.
pub fn curly_product(ctx: &SqmContext, x: &K1Pair, y: &K1Pair) -> CurlyProduct {
    let site = ctx.base();
    let d1 = |v: &TwObject| ctx.face_obj(1, 1, v);
    // f ⊔ r : A ⊔ C ⇝ B ⊔ d₁V ⊔ D ⊔ d₁X, reordered to B ⊔ D ⊔ d₁V ⊔ d₁X
    let side = |p: &Weq, pv: &TwObject, q: &Weq, qv: &TwObject| {
        let blocks = [x.b0.len(), d1(pv).len(), y.b0.len(), d1(qv).len()];
        reorder_target(site, &p.coproduct(q), &blocks, &[0, 2, 1, 3])
    };
    let coproduct = K1Pair {
        a0: tw_coproduct(&x.a0, &y.a0),
        b0: tw_coproduct(&x.b0, &y.b0),
        v1: tw_coproduct(&x.v1, &y.v1),
        f: side(&x.f, &x.v1, &y.f, &y.v1),
        w1: tw_coproduct(&x.w1, &y.w1),
        g: side(&x.g, &x.w1, &y.g, &y.w1),
    };
    let composite = (y.b0 == x.a0).then(|| {
        // r: C ⇝ A ⊔ d₁X, then f ⊔ 1: A ⊔ d₁X ⇝ B ⊔ d₁V ⊔ d₁X, reordered to B ⊔ d₁X ⊔ d₁V
        let side = |p: &Weq, pv: &TwObject, r: &Weq, rv: &TwObject| {
            let lifted = r.then(site, &p.coproduct(&Weq::identity(site, &d1(rv))));
            reorder_target(site, &lifted, &[x.b0.len(), d1(pv).len(), d1(rv).len()], &[0, 2, 1])
        };
        K1Pair {
            a0: y.a0.clone(),
            b0: x.b0.clone(),
            v1: tw_coproduct(&y.v1, &x.v1),
            f: side(&x.f, &x.v1, &y.f, &y.v1),
            w1: tw_coproduct(&y.w1, &x.w1),
            g: side(&x.g, &x.w1, &y.g, &y.w1),
        }
    });
    CurlyProduct { coproduct, composite }
}

/// Lexicographically least permutation `π` with `source.sub(π) == target`.
fn least_permutation(source: &TwObject, target: &TwObject) -> Option<Vec<usize>> {
    if source.len() != target.len() {
        return None;
    }
    let mut used = vec![false; source.len()];
    let mut perm = Vec::with_capacity(target.len());
    for &t in &target.objects {
        let i = (0..source.len()).find(|&i| !used[i] && source.objects[i] == t)?;
        used[i] = true;
        perm.push(i);
    }
    Some(perm)
}

/// Rewrites a degree-one crossed word with trivial boundary as a single pair.
///
/// Weak equivalences are merged by coproduct (negative ones into `A ⇝ B`,
/// positive ones into `E ⇝ F`), level-one objects likewise into `C` and `D`,
/// and the remaining permutation of level-zero entries is taken lexicographically
/// least. A residual `⟨y, y⟩` term made of diagonal swaps is appended as its own pair.
pub fn canonical_k1(ctx: &SqmContext, w: &SqmWord) -> Result<K1Pair> {
    let site = ctx.base();
    w.check_homogeneous()?;
    if w.degree() == Some(0) || w.presentation() == Some(Presentation::Plus) {
        return Err(Error::Input("canonical_k1 expects a degree-one crossed word".into()));
    }
    if !ctx.boundary(w).is_identity() {
        return Err(Error::Precondition("the word does not lie in the kernel of the boundary".into()));
    }
    let mut ab = Weq::identity(site, &TwObject::empty());
    let mut ef = ab.clone();
    let (mut c, mut d) = (TwObject::empty(), TwObject::empty());
    for l in &w.letters {
        match (&l.generator, l.exponent > 0) {
            (Generator::Weq0(x), true) => ef = ef.coproduct(x),
            (Generator::Weq0(x), false) => ab = ab.coproduct(x),
            (Generator::Obj1(x), true) => d = tw_coproduct(&d, x),
            (Generator::Obj1(x), false) => c = tw_coproduct(&c, x),
            _ => return Err(Error::Input("unexpected generator".into())),
        }
    }
    let s0 = |x: &TwObject| ctx.degen_obj(0, 0, x);
    let v1 = tw_coproduct(&c, &s0(&ctx.face_obj(1, 0, &d)));
    let w1 = tw_coproduct(&s0(&ctx.face_obj(1, 0, &c)), &d);
    let (dv, dw) = (ctx.face_obj(1, 1, &v1), ctx.face_obj(1, 1, &w1));
    let (a, b, e, f) = (ab.source(), ab.target(), ef.source(), ef.target());
    let a0 = tw_coproduct(&tw_coproduct(a, f), &dv);
    let b0 = tw_coproduct(b, f);
    let f_weq = ab.coproduct(&Weq::identity(site, f)).coproduct(&Weq::identity(site, &dv));
    let y = tw_coproduct(&tw_coproduct(b, e), &dw);
    let perm = least_permutation(&a0, &y)
        .ok_or_else(|| Error::Inconsistent("no permutation of level-zero entries matches the boundary".into()))?;
    let g_weq = Weq::permutation(site, &a0, &perm)
        .then(site, &Weq::identity(site, b).coproduct(&ef).coproduct(&Weq::identity(site, &dw)));
    let pair = K1Pair { a0, b0, v1, f: f_weq, w1, g: g_weq };
    pair.check(ctx)?;
    let residual = ctx.normalize(&pair.word().inverse().mul(w))?;
    let diagonal: Option<Vec<ObjId>> = residual
        .letters
        .iter()
        .map(|l| match &l.generator {
            Generator::Weq0(t) if t.source().len() == 2 && t.source().objects[0] == t.source().objects[1] => {
                (Weq::tau(site, &TwObject::singleton(t.source().objects[0]), &TwObject::singleton(t.source().objects[0]))
                    == *t)
                    .then_some(t.source().objects[0])
            }
            _ => None,
        })
        .collect();
    match diagonal {
        Some(objs) if !objs.is_empty() => {
            let mut swaps = Weq::identity(site, &TwObject::empty());
            for &o in &objs {
                let s = TwObject::singleton(o);
                swaps = swaps.coproduct(&Weq::tau(site, &s, &s));
            }
            let id = Weq::identity(site, swaps.source());
            let alpha = K1Pair {
                a0: swaps.source().clone(),
                b0: swaps.target().clone(),
                v1: TwObject::empty(),
                f: id,
                w1: TwObject::empty(),
                g: swaps,
            };
            Ok(curly_product(ctx, &pair, &alpha).coproduct)
        }
        _ => Ok(pair),
    }
}

/// `{f, g : A ⇝ B}` data over the base with level-one parts `C, D` in the subassembler:
/// `f: A ⇝ B ⊔ ι(C)` and `g: A ⇝ B ⊔ ι(D)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelativeK1Quad {
    pub a: TwObject,
    pub b: TwObject,
    /// Objects of the subassembler.
    pub c: TwObject,
    pub d: TwObject,
    pub f: Weq,
    pub g: Weq,
}

impl RelativeK1Quad {
    /// The pair `{f_{ι(C) ⊔ D}, g_{C ⊔ ι(D)}}`.
    pub fn to_pair(&self, ctx: &SqmContext) -> K1Pair {
        let lv = &ctx.levels;
        let base = |x: &TwObject| TwObject { objects: x.objects.iter().map(|&o| lv.embed(1, 0, lv.map.obj(o))).collect() };
        let sub = |x: &TwObject| TwObject { objects: x.objects.iter().map(|&o| lv.embed(1, 1, o)).collect() };
        K1Pair {
            a0: self.a.clone(),
            b0: self.b.clone(),
            v1: tw_coproduct(&base(&self.c), &sub(&self.d)),
            f: self.f.clone(),
            w1: tw_coproduct(&sub(&self.c), &base(&self.d)),
            g: self.g.clone(),
        }
    }
}

/// Strips the parts of a pair where both level-one entries lie in the base or both in
/// the subassembler, leaving a quad.
pub fn relative_k1(ctx: &SqmContext, p: &K1Pair) -> Result<RelativeK1Quad> {
    let lv = &ctx.levels;
    if !lv.map.is_inclusion() {
        return Err(Error::Precondition("relative representatives need an inclusion of a subassembler".into()));
    }
    p.check(ctx)?;
    let site = ctx.base();
    let live = |x: &TwObject| -> Vec<(usize, Part)> {
        x.objects.iter().enumerate().map(|(k, &o)| (k, lv.part(1, o))).filter(|(_, q)| *q != Part::Initial).collect()
    };
    let (vs, ws) = (live(&p.v1), live(&p.w1));
    if vs.len() != ws.len() {
        return Err(Error::Structural("d₀V and d₀W differ".into()));
    }
    // Positions within d₁V (resp. d₁W) are the base entries in order.
    let mut cc = Vec::new();
    let (mut cd, mut dc) = (Vec::new(), Vec::new());
    let (mut v_pos, mut w_pos) = (0, 0);
    let mut v_cd_pos = Vec::new();
    let mut w_dc_pos = Vec::new();
    for (&(_, pv), &(_, pw)) in vs.iter().zip(&ws) {
        match (pv, pw) {
            (Part::Base(x), Part::Base(_)) => {
                cc.push((x, v_pos, w_pos));
                v_pos += 1;
                w_pos += 1;
            }
            (Part::Base(_), Part::Sub(_, y)) => {
                cd.push(y);
                v_cd_pos.push(v_pos);
                v_pos += 1;
            }
            (Part::Sub(_, y), Part::Base(_)) => {
                dc.push(y);
                w_dc_pos.push(w_pos);
                w_pos += 1;
            }
            _ => {}
        }
    }
    let z = TwObject { objects: cc.iter().map(|t| t.0).collect() };
    let b = tw_coproduct(&p.b0, &z);
    let reorder = |w: &Weq, keep_first: Vec<usize>, rest: Vec<usize>| -> Weq {
        let nb = p.b0.len();
        let perm: Vec<usize> =
            (0..nb).chain(keep_first.iter().map(|k| nb + k)).chain(rest.iter().map(|k| nb + k)).collect();
        w.then(site, &Weq::permutation(site, w.target(), &perm))
    };
    let f = reorder(&p.f, cc.iter().map(|t| t.1).collect(), v_cd_pos);
    let g = reorder(&p.g, cc.iter().map(|t| t.2).collect(), w_dc_pos);
    Ok(RelativeK1Quad {
        a: p.a0.clone(),
        b,
        c: TwObject { objects: cd },
        d: TwObject { objects: dc },
        f,
        g,
    })
}

/// `[D] − [C]` in `K₀` of the subassembler, in SNF coordinates.
pub fn boundary_k1(ctx: &SqmContext, q: &RelativeK1Quad) -> Vec<BigInt> {
    boundary_class(&ctx.k0_sub, &q.c.objects, &q.d.objects)
}

/// `[D] − [C]` for families of objects, in SNF coordinates.
pub fn boundary_class(k0: &K0Presentation, c: &[ObjId], d: &[ObjId]) -> Vec<BigInt> {
    k0.class(&boundary_vector(k0, c, d))
}

/// `[D] − [C]` in the generator basis.
pub fn boundary_vector(k0: &K0Presentation, c: &[ObjId], d: &[ObjId]) -> Vec<BigInt> {
    k0.vector_of(d).into_iter().zip(k0.vector_of(c)).map(|(x, y)| x - y).collect()
}

/// A random pair over a cofiber level structure, with indices of every kind.
///
/// Returns `None` when the drawn entries cannot be lifted to the subassembler.
pub fn random_pair<R: Rng>(ctx: &SqmContext, rng: &mut R) -> Option<K1Pair> {
    let site = ctx.base();
    let lv = &ctx.levels;
    let q = ctx.random_object(0, 2, rng);
    let h1 = ctx.random_weq(0, &q, rng);
    let h2 = ctx.random_weq(0, &q, rng);
    let (mut m1, mut m2) = (h1.target().objects.clone(), h2.target().objects.clone());
    let mut b0 = Vec::new();
    let mut cc = Vec::new();
    let mut k = 0;
    while k < m1.len() {
        match m2.iter().position(|&o| o == m1[k]) {
            Some(j) if rng.gen_bool(0.7) => {
                let o = m1.remove(k);
                m2.remove(j);
                if rng.gen_bool(0.7) {
                    b0.push(o);
                } else {
                    cc.push(o);
                }
            }
            _ => k += 1,
        }
    }
    let sub_objs = lv.sub.noninitial_objects();
    let lift = |x: ObjId, rng: &mut R| -> Option<ObjId> {
        let options: Vec<ObjId> = sub_objs.iter().copied().filter(|&y| lv.map.obj(y) == x).collect();
        options.choose(rng).copied()
    };
    let c1 = |x: ObjId| lv.embed(1, 0, x);
    let d1 = |y: ObjId| lv.embed(1, 1, y);
    let mut v = Vec::new();
    let mut w = Vec::new();
    for &o in &cc {
        v.push(c1(o));
        w.push(c1(o));
    }
    for &o in &m1 {
        v.push(c1(o));
        w.push(d1(lift(o, rng)?));
    }
    for &o in &m2 {
        v.push(d1(lift(o, rng)?));
        w.push(c1(o));
    }
    if !sub_objs.is_empty() && rng.gen_bool(0.5) {
        let y = *sub_objs.choose(rng)?;
        v.push(d1(y));
        w.push(d1(y));
    }
    let (v1, w1) = (TwObject { objects: v }, TwObject { objects: w });
    let b0 = TwObject { objects: b0 };
    let finish = |h: &Weq, lv1: &TwObject| -> Option<Weq> {
        let want = tw_coproduct(&b0, &ctx.face_obj(1, 1, lv1));
        let perm = least_permutation(h.target(), &want)?;
        Some(h.then(site, &Weq::permutation(site, h.target(), &perm)))
    };
    let pair = K1Pair { a0: q, b0: b0.clone(), f: finish(&h1, &v1)?, g: finish(&h2, &w1)?, v1, w1 };
    pair.check(ctx).ok()?;
    Some(pair)
}

/// A word in the kernel of the boundary: a product of pair words conjugated by a random word.
pub fn random_kernel_word<R: Rng>(ctx: &SqmContext, rng: &mut R) -> SqmWord {
    let mut w = SqmWord::empty();
    for _ in 0..rng.gen_range(1..=2) {
        let p = (0..1000).find_map(|_| random_pair(ctx, rng)).unwrap_or_else(|| K1Pair::trivial(ctx));
        w = w.mul(&p.word());
    }
    let u = ctx.random_crossed_word(rng, 3);
    SqmWord::product([&u, &w, &u.inverse()])
}
