//! Words in the two presentations of the stable quadratic module of a cofiber
//! simplicial assembler: the crossed presentation (objects of levels 0 and 1,
//! weak equivalences of level 0) and the plus presentation (weak equivalences
//! of level 1, cofiber sequences of level 0).
//!
//! Equality of words is only semi-decided. [`Shadow`] is a homomorphic
//! invariant: the boundary in the free class-two nilpotent group on the
//! singletons of level 0, together with the image under the collapse onto
//! the suspension of `D`, a class in `K₀(D)`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::Zero;
use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::assembler::{Assembler, AssemblerMorphism, ObjId, Part, SimplicialLevels};
use crate::error::{Error, Result};
use crate::kgroups::{k0, K0Presentation};
use crate::nil2::Nil2;
use crate::sc::{self, sc_compose, sc_equivalent, ScSpan, Weq};
use crate::twist::{self, tw_coproduct, TwMorphism, TwObject};

/// A cofiber sequence `A ↣ B ↠ B/A` of level 0, determined by its cofibration.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Cofib {
    pub sub: TwObject,
    pub total: TwObject,
    /// Entries of `total` outside the image of the cofibration, in order.
    pub quotient: TwObject,
    pub cofibration: ScSpan,
}

impl Cofib {
    pub fn new(site: &Assembler, cofibration: ScSpan) -> Result<Self> {
        if !sc::sc_classify(site, &cofibration).is_cofibration {
            return Err(Error::Structural("span is not a cofibration".into()));
        }
        let mut hit = vec![false; cofibration.target.len()];
        for &j in &cofibration.move_leg.set_map {
            hit[j] = true;
        }
        let rest: Vec<usize> = (0..hit.len()).filter(|&j| !hit[j]).collect();
        Ok(Cofib {
            sub: cofibration.source.clone(),
            total: cofibration.target.clone(),
            quotient: cofibration.target.sub(&rest),
            cofibration,
        })
    }

    /// The inclusion `B ↣ A ⊔ B` of the right summand.
    pub fn summand_inclusion(site: &Assembler, a: &TwObject, b: &TwObject) -> Self {
        let total = tw_coproduct(a, b);
        let mv = TwMorphism {
            source: b.clone(),
            target: total,
            set_map: (a.len()..a.len() + b.len()).collect(),
            components: b.objects.iter().map(|&o| site.identity(o)).collect(),
        };
        Cofib::new(site, ScSpan::from_move(site, &mv)).expect("summand inclusions are cofibrations")
    }

    /// `B/A ⊔ A ⇝ B` built from the legs of the cofibration.
    pub fn canonical_splitting(&self, site: &Assembler) -> Weq {
        let c = &self.cofibration;
        let q = self.quotient.len();
        let mut set_map = Vec::new();
        let mut components = Vec::new();
        let mut next_rest = 0;
        for j in 0..self.total.len() {
            match c.move_leg.set_map.iter().position(|&x| x == j) {
                Some(k) => {
                    let back = site.inverse(c.move_leg.components[k]).expect("move components are isomorphisms");
                    set_map.push(q + c.sub_leg.set_map[k]);
                    components.push(site.compose(c.sub_leg.components[k], back));
                }
                None => {
                    set_map.push(next_rest);
                    next_rest += 1;
                    components.push(site.identity(self.total.objects[j]));
                }
            }
        }
        Weq {
            cover: TwMorphism {
                source: self.total.clone(),
                target: tw_coproduct(&self.quotient, &self.sub),
                set_map,
                components,
            },
        }
    }

    pub fn describe(&self, site: &Assembler) -> String {
        format!("{:?} >-> {:?} ->> {:?}", self.sub.names(site), self.total.names(site), self.quotient.names(site))
    }
}

/// Splittings `α: B/A ⊔ A ⇝ B` of cofiber sequences.
#[derive(Clone, Debug, Default)]
pub struct Splittings {
    entries: Vec<(Cofib, Weq)>,
}

impl Splittings {
    /// Records `α` after checking that it restricts to the cofibration on `A`.
    pub fn insert(&mut self, site: &Assembler, cofib: &Cofib, alpha: Weq) -> Result<()> {
        if *alpha.source() != tw_coproduct(&cofib.quotient, &cofib.sub) || *alpha.target() != cofib.total {
            return Err(Error::Input(format!("splitting of {} has the wrong shape", cofib.describe(site))));
        }
        let inc = TwMorphism {
            source: cofib.sub.clone(),
            target: alpha.source().clone(),
            set_map: (cofib.quotient.len()..cofib.quotient.len() + cofib.sub.len()).collect(),
            components: cofib.sub.objects.iter().map(|&o| site.identity(o)).collect(),
        };
        let restricted = sc_compose(site, &ScSpan::from_move(site, &inc), &alpha.to_span(site))?;
        if !sc_equivalent(site, &restricted, &cofib.cofibration) {
            return Err(Error::Input(format!("splitting of {} is not compatible", cofib.describe(site))));
        }
        self.entries.retain(|(c, _)| c != cofib);
        self.entries.push((cofib.clone(), alpha));
        Ok(())
    }

    pub fn get(&self, cofib: &Cofib) -> Option<&Weq> {
        self.entries.iter().find(|(c, _)| c == cofib).map(|(_, w)| w)
    }

    pub fn canonical<'a>(site: &Assembler, cofibs: impl IntoIterator<Item = &'a Cofib>) -> Result<Self> {
        let mut s = Splittings::default();
        for c in cofibs {
            s.insert(site, c, c.canonical_splitting(site))?;
        }
        Ok(s)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "tag", content = "payload", rename_all = "snake_case")]
pub enum Generator {
    Obj0(TwObject),
    Obj1(TwObject),
    Weq0(Weq),
    Weq1(Weq),
    Cof(Cofib),
}

impl Generator {
    pub fn degree(&self) -> u8 {
        match self {
            Generator::Obj0(_) => 0,
            _ => 1,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Presentation {
    Crossed,
    Plus,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Letter {
    #[serde(flatten)]
    pub generator: Generator,
    pub exponent: i8,
}

impl Letter {
    pub fn new(generator: Generator, exponent: i8) -> Self {
        Letter { generator, exponent }
    }

    pub fn inverse(&self) -> Letter {
        Letter { generator: self.generator.clone(), exponent: -self.exponent }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SqmWord {
    pub letters: Vec<Letter>,
}

impl SqmWord {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn from_letters(letters: Vec<Letter>) -> Self {
        SqmWord { letters }
    }

    pub fn single(g: Generator, exponent: i8) -> Self {
        SqmWord { letters: vec![Letter::new(g, exponent)] }
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn inverse(&self) -> SqmWord {
        SqmWord { letters: self.letters.iter().rev().map(Letter::inverse).collect() }
    }

    pub fn mul(&self, other: &SqmWord) -> SqmWord {
        let mut letters = self.letters.clone();
        letters.extend(other.letters.iter().cloned());
        SqmWord { letters }
    }

    pub fn product<'a>(words: impl IntoIterator<Item = &'a SqmWord>) -> SqmWord {
        words.into_iter().fold(SqmWord::empty(), |acc, w| acc.mul(w))
    }

    /// `None` for the empty word.
    pub fn degree(&self) -> Option<u8> {
        self.letters.first().map(|l| l.generator.degree())
    }

    pub fn presentation(&self) -> Option<Presentation> {
        self.letters.iter().find_map(|l| match l.generator {
            Generator::Obj1(_) | Generator::Weq0(_) => Some(Presentation::Crossed),
            Generator::Weq1(_) | Generator::Cof(_) => Some(Presentation::Plus),
            Generator::Obj0(_) => None,
        })
    }

    pub fn check_homogeneous(&self) -> Result<()> {
        if let Some(d) = self.degree() {
            if self.letters.iter().any(|l| l.generator.degree() != d) {
                return Err(Error::Input("word mixes degrees".into()));
            }
        }
        let crossed = self.letters.iter().any(|l| matches!(l.generator, Generator::Obj1(_) | Generator::Weq0(_)));
        let plus = self.letters.iter().any(|l| matches!(l.generator, Generator::Weq1(_) | Generator::Cof(_)));
        if crossed && plus {
            return Err(Error::Input("word mixes the crossed and plus presentations".into()));
        }
        if self.letters.iter().any(|l| l.exponent != 1 && l.exponent != -1) {
            return Err(Error::Input("exponents must be 1 or -1".into()));
        }
        Ok(())
    }
}

/// Boundary and collapse class of a word.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Shadow {
    pub boundary: Nil2,
    pub collapse: Vec<BigInt>,
}

impl Shadow {
    pub fn is_trivial(&self) -> bool {
        self.boundary.is_identity() && self.collapse.iter().all(Zero::is_zero)
    }
}

/// Canonical exponents of `τ_{x,y}` on singletons: `x < y` over ℤ, `x = x` mod 2.
pub type TauBlock = BTreeMap<(ObjId, ObjId), i64>;

fn add_tau(block: &mut TauBlock, x: ObjId, y: ObjId, e: i64) {
    let (key, e) = if x <= y { ((x, y), e) } else { ((y, x), -e) };
    let v = block.entry(key).or_insert(0);
    *v += e;
    if key.0 == key.1 {
        *v = v.rem_euclid(2);
    }
    if *v == 0 {
        block.remove(&key);
    }
}

fn add_tau_objects(block: &mut TauBlock, x: &TwObject, y: &TwObject, e: i64) {
    for &a in &x.objects {
        for &b in &y.objects {
            add_tau(block, a, b, e);
        }
    }
}

pub struct SqmContext {
    pub levels: SimplicialLevels,
    pub k0_sub: K0Presentation,
}

struct Expansion {
    letters: Vec<Letter>,
    taus: TauBlock,
}

impl Expansion {
    fn inverse(self) -> Expansion {
        Expansion {
            letters: self.letters.iter().rev().map(Letter::inverse).collect(),
            taus: self.taus.into_iter().map(|(k, v)| (k, if k.0 == k.1 { v } else { -v })).collect(),
        }
    }
}

/// A relation instance, both sides as words.
#[derive(Clone, Debug)]
pub struct RuleInstance {
    pub rule: &'static str,
    pub lhs: SqmWord,
    pub rhs: SqmWord,
}

impl SqmContext {
    pub fn new(levels: SimplicialLevels) -> Self {
        let k0_sub = k0(&levels.sub);
        SqmContext { levels, k0_sub }
    }

    pub fn level(&self, n: usize) -> &Assembler {
        self.levels.level(n)
    }

    pub fn base(&self) -> &Assembler {
        self.levels.level(0)
    }

    pub fn map_object(&self, f: &AssemblerMorphism, to: usize, x: &TwObject) -> TwObject {
        let dst = self.level(to);
        TwObject { objects: x.objects.iter().map(|&o| f.obj(o)).filter(|&o| !dst.is_initial(o)).collect() }
    }

    pub fn map_weq(&self, f: &AssemblerMorphism, to: usize, w: &Weq) -> Weq {
        let dst = self.level(to);
        let p = &w.cover;
        let keep = |x: &TwObject| -> Vec<Option<usize>> {
            let mut next = 0;
            x.objects
                .iter()
                .map(|&o| {
                    if dst.is_initial(f.obj(o)) {
                        None
                    } else {
                        next += 1;
                        Some(next - 1)
                    }
                })
                .collect()
        };
        let src_idx = keep(&p.source);
        let tgt_idx = keep(&p.target);
        let mut set_map = Vec::new();
        let mut components = Vec::new();
        for (i, idx) in src_idx.iter().enumerate() {
            if idx.is_some() {
                set_map.push(tgt_idx[p.set_map[i]].expect("noninitial entries map to noninitial entries"));
                components.push(f.mor(p.components[i]));
            }
        }
        Weq {
            cover: TwMorphism {
                source: self.map_object(f, to, &p.source),
                target: self.map_object(f, to, &p.target),
                set_map,
                components,
            },
        }
    }

    pub fn face_obj(&self, n: usize, i: usize, x: &TwObject) -> TwObject {
        self.map_object(self.levels.face(n, i), n - 1, x)
    }

    pub fn face_weq(&self, n: usize, i: usize, w: &Weq) -> Weq {
        self.map_weq(self.levels.face(n, i), n - 1, w)
    }

    pub fn degen_obj(&self, n: usize, i: usize, x: &TwObject) -> TwObject {
        self.map_object(self.levels.degeneracy(n, i), n + 1, x)
    }

    pub fn degen_weq(&self, n: usize, i: usize, w: &Weq) -> Weq {
        self.map_weq(self.levels.degeneracy(n, i), n + 1, w)
    }

    /// Entries of a level-1 object lying in the copy of `D`, as objects of `D`.
    pub fn d_part(&self, x: &TwObject) -> Vec<ObjId> {
        x.objects
            .iter()
            .filter_map(|&o| match self.levels.part(1, o) {
                Part::Sub(_, d) => Some(d),
                _ => None,
            })
            .collect()
    }

    pub fn is_base_entry(&self, level: usize, o: ObjId) -> bool {
        matches!(self.levels.part(level, o), Part::Base(_))
    }

    // ----- boundary, bracket, shadow -----

    fn value(x: &TwObject) -> Nil2 {
        let mut v = Nil2::identity();
        for &o in &x.objects {
            v.push(o, 1);
        }
        v
    }

    fn letter_boundary(&self, g: &Generator) -> Nil2 {
        match g {
            Generator::Obj0(x) => Self::value(x),
            Generator::Obj1(x) => {
                Self::value(&self.face_obj(1, 0, x)).inverse().mul(&Self::value(&self.face_obj(1, 1, x)))
            }
            Generator::Weq0(w) => Self::value(w.target()).inverse().mul(&Self::value(w.source())),
            Generator::Weq1(w) => Self::value(&self.face_obj(1, 0, w.target()))
                .inverse()
                .mul(&Self::value(&self.face_obj(1, 1, w.source()))),
            Generator::Cof(c) => Self::value(&c.total).inverse().mul(&Self::value(&c.quotient)).mul(&Self::value(&c.sub)),
        }
    }

    /// The boundary of a degree-one word, or the value of a degree-zero word.
    pub fn boundary(&self, w: &SqmWord) -> Nil2 {
        let mut acc = Nil2::identity();
        for l in &w.letters {
            let b = self.letter_boundary(&l.generator);
            acc = acc.mul(&if l.exponent < 0 { b.inverse() } else { b });
        }
        acc
    }

    /// The boundary as a degree-zero word of singletons.
    pub fn boundary_word(&self, w: &SqmWord) -> SqmWord {
        let obj = |x: &TwObject, e: i8| -> Vec<Letter> {
            let mut v: Vec<Letter> =
                x.objects.iter().map(|&o| Letter::new(Generator::Obj0(TwObject::singleton(o)), 1)).collect();
            if e < 0 {
                v = v.iter().rev().map(Letter::inverse).collect();
            }
            v
        };
        let mut out = Vec::new();
        for l in &w.letters {
            let mut part: Vec<Letter> = match &l.generator {
                Generator::Obj0(x) => obj(x, 1),
                Generator::Obj1(x) => [obj(&self.face_obj(1, 0, x), -1), obj(&self.face_obj(1, 1, x), 1)].concat(),
                Generator::Weq0(w) => [obj(w.target(), -1), obj(w.source(), 1)].concat(),
                Generator::Weq1(w) => {
                    [obj(&self.face_obj(1, 0, w.target()), -1), obj(&self.face_obj(1, 1, w.source()), 1)].concat()
                }
                Generator::Cof(c) => [obj(&c.total, -1), obj(&c.quotient, 1), obj(&c.sub, 1)].concat(),
            };
            if l.exponent < 0 {
                part = part.iter().rev().map(Letter::inverse).collect();
            }
            out.extend(part);
        }
        free_reduce(SqmWord { letters: out })
    }

    fn letter_collapse(&self, g: &Generator) -> Vec<BigInt> {
        match g {
            Generator::Obj1(x) => self.k0_sub.vector_of(&self.d_part(x)),
            Generator::Weq1(w) => self.k0_sub.vector_of(&self.d_part(w.target())),
            _ => vec![BigInt::zero(); self.k0_sub.generator_ids.len()],
        }
    }

    /// The raw collapse vector over the objects of `D`.
    pub fn collapse_vector(&self, w: &SqmWord) -> Vec<BigInt> {
        let mut acc = vec![BigInt::zero(); self.k0_sub.generator_ids.len()];
        for l in &w.letters {
            for (a, b) in acc.iter_mut().zip(self.letter_collapse(&l.generator)) {
                *a += b * BigInt::from(l.exponent);
            }
        }
        acc
    }

    pub fn shadow(&self, w: &SqmWord) -> Shadow {
        Shadow { boundary: self.boundary(w), collapse: self.k0_sub.class(&self.collapse_vector(w)) }
    }

    fn tau_letter(&self, x: ObjId, y: ObjId) -> Generator {
        Generator::Weq0(Weq::tau(self.base(), &TwObject::singleton(x), &TwObject::singleton(y)))
    }

    fn abelianize(w: &SqmWord) -> BTreeMap<ObjId, i64> {
        let mut out = BTreeMap::new();
        for l in &w.letters {
            if let Generator::Obj0(x) = &l.generator {
                for &o in &x.objects {
                    *out.entry(o).or_insert(0) += l.exponent as i64;
                }
            }
        }
        out.retain(|_, v| *v != 0);
        out
    }

    /// `⟨u, v⟩` for degree-zero words, as a product of `τ` on singletons.
    pub fn bracket(&self, u: &SqmWord, v: &SqmWord) -> SqmWord {
        let (a, b) = (Self::abelianize(u), Self::abelianize(v));
        let mut letters = Vec::new();
        for (&x, &m) in &a {
            for (&y, &n) in &b {
                let e = m * n;
                for _ in 0..e.abs() {
                    letters.push(Letter::new(self.tau_letter(x, y), e.signum() as i8));
                }
            }
        }
        SqmWord { letters }
    }

    /// `w1^{w0} = w1 ⟨w0, ∂w1⟩`.
    pub fn act(&self, w1: &SqmWord, w0: &SqmWord) -> SqmWord {
        w1.mul(&self.bracket(w0, &self.boundary_word(w1)))
    }

    // ----- normalization -----

    fn expand_obj1(&self, v: &TwObject) -> Expansion {
        let mut letters = Vec::new();
        let mut taus = TauBlock::new();
        for &e in v.objects.iter().rev() {
            if !self.is_base_entry(1, e) {
                letters.push(Letter::new(Generator::Obj1(TwObject::singleton(e)), 1));
            }
        }
        // [e ⊔ R] = [R][e]⟨[d₁R], ∂[e]⟩
        for k in 0..v.len() {
            let e = TwObject::singleton(v.objects[k]);
            let d1r = self.face_obj(1, 1, &TwObject { objects: v.objects[k + 1..].to_vec() });
            add_tau_objects(&mut taus, &d1r, &self.face_obj(1, 0, &e), -1);
            add_tau_objects(&mut taus, &d1r, &self.face_obj(1, 1, &e), 1);
        }
        Expansion { letters, taus }
    }

    fn expand_weq0(&self, w: &Weq) -> Expansion {
        let site = self.base();
        let p = &w.cover;
        let (a, b) = (&p.target, &p.source);
        let mut order: Vec<usize> = (0..b.len()).collect();
        order.sort_by_key(|&j| p.set_map[j]);
        let mut taus = TauBlock::new();
        for x in 0..order.len() {
            for y in (x + 1)..order.len() {
                let (u, v) = (order[x], order[y]);
                if v < u {
                    add_tau(&mut taus, b.objects[v], b.objects[u], 1);
                }
            }
        }
        let fibers: Vec<Vec<usize>> = (0..a.len()).map(|i| order.iter().copied().filter(|&j| p.set_map[j] == i).collect()).collect();
        let mut letters = Vec::new();
        for (i, fib) in fibers.iter().enumerate() {
            let atom = Weq {
                cover: TwMorphism {
                    source: b.sub(fib),
                    target: TwObject::singleton(a.objects[i]),
                    set_map: vec![0; fib.len()],
                    components: fib.iter().map(|&j| p.components[j]).collect(),
                },
            };
            if !atom.is_identity(site) {
                letters.push(Letter::new(Generator::Weq0(atom), 1));
            }
            let rest: Vec<usize> = fibers[i + 1..].iter().flatten().copied().collect();
            let rb = b.sub(&rest);
            add_tau_objects(&mut taus, &rb, &b.sub(fib), -1);
            add_tau_objects(&mut taus, &TwObject::singleton(a.objects[i]), &rb, -1);
        }
        Expansion { letters, taus }
    }

    fn expand_letter(&self, l: &Letter) -> Result<Expansion> {
        let ex = match &l.generator {
            Generator::Obj0(x) => Expansion {
                letters: x.objects.iter().map(|&o| Letter::new(Generator::Obj0(TwObject::singleton(o)), 1)).collect(),
                taus: TauBlock::new(),
            },
            Generator::Obj1(v) => self.expand_obj1(v),
            Generator::Weq0(w) => self.expand_weq0(w),
            _ => return Err(Error::Input("plus-presentation generator in a crossed word".into())),
        };
        Ok(if l.exponent < 0 { ex.inverse() } else { ex })
    }

    fn emit(&self, letters: Vec<Letter>, taus: &TauBlock) -> SqmWord {
        let mut out = letters;
        for (&(x, y), &e) in taus {
            for _ in 0..e.abs() {
                out.push(Letter::new(self.tau_letter(x, y), e.signum() as i8));
            }
        }
        SqmWord { letters: out }
    }

    fn merge_pass(&self, letters: &mut Vec<Letter>) -> bool {
        let site = self.base();
        for i in 0..letters.len().saturating_sub(1) {
            let (l1, l2) = (&letters[i], &letters[i + 1]);
            if l1.exponent != l2.exponent {
                continue;
            }
            let (Generator::Weq0(w1), Generator::Weq0(w2)) = (&l1.generator, &l2.generator) else { continue };
            let merged = if l1.exponent > 0 && w1.source() == w2.target() {
                w2.then(site, w1)
            } else if l1.exponent < 0 && w2.source() == w1.target() {
                w1.then(site, w2)
            } else {
                continue;
            };
            let e = l1.exponent;
            letters.splice(i..i + 2, std::iter::once(Letter::new(Generator::Weq0(merged), e)));
            return true;
        }
        false
    }

    fn normalize_crossed(&self, w: &SqmWord) -> Result<SqmWord> {
        let site = self.base();
        let mut letters = Vec::new();
        let mut taus = TauBlock::new();
        for l in &w.letters {
            let ex = self.expand_letter(l)?;
            let single = SqmWord { letters: vec![l.clone()] };
            let expanded = self.emit(ex.letters.clone(), &ex.taus);
            if self.shadow(&single) != self.shadow(&expanded) {
                return Err(Error::Inconsistent(format!("expansion of {:?} changes the shadow", l.generator)));
            }
            letters.extend(ex.letters);
            for ((x, y), e) in ex.taus {
                add_tau(&mut taus, x, y, e);
            }
        }
        loop {
            let before = letters.len();
            letters = free_reduce(SqmWord { letters }).letters;
            while self.merge_pass(&mut letters) {}
            letters.retain(|l| !matches!(&l.generator, Generator::Weq0(x) if x.is_identity(site)));
            if letters.len() == before {
                break;
            }
        }
        Ok(self.emit(letters, &taus))
    }

    fn is_r4(&self, w: &Weq) -> bool {
        w.is_identity(self.level(1)) && w.source().objects.iter().all(|&o| self.is_base_entry(1, o))
    }

    fn is_trivial_cof(&self, c: &Cofib) -> bool {
        let site = self.base();
        if c.sub.is_empty() && c.quotient == c.total {
            return true;
        }
        let r5 = c.quotient.is_empty() && sc_equivalent(site, &c.cofibration, &ScSpan::identity(site, &c.total));
        let r10 = c.total == tw_coproduct(&c.quotient, &c.sub)
            && sc_equivalent(site, &c.cofibration, &Cofib::summand_inclusion(site, &c.quotient, &c.sub).cofibration);
        r5 || r10
    }

    fn normalize_plus(&self, w: &SqmWord) -> Result<SqmWord> {
        let mut letters = Vec::new();
        for l in &w.letters {
            match &l.generator {
                Generator::Obj0(x) => {
                    let mut part: Vec<Letter> =
                        x.objects.iter().map(|&o| Letter::new(Generator::Obj0(TwObject::singleton(o)), 1)).collect();
                    if l.exponent < 0 {
                        part = part.iter().rev().map(Letter::inverse).collect();
                    }
                    letters.extend(part);
                }
                Generator::Weq1(x) if self.is_r4(x) => {}
                Generator::Cof(c) if self.is_trivial_cof(c) => {}
                Generator::Weq1(_) | Generator::Cof(_) => letters.push(l.clone()),
                _ => return Err(Error::Input("crossed-presentation generator in a plus word".into())),
            }
        }
        Ok(free_reduce(SqmWord { letters }))
    }

    /// Directed rewriting to a fixpoint; fails if the shadow changes.
    pub fn normalize(&self, w: &SqmWord) -> Result<SqmWord> {
        w.check_homogeneous()?;
        let out = match (w.degree(), w.presentation()) {
            (Some(0), _) => self.render_nil2(&self.boundary(w)),
            (_, Some(Presentation::Plus)) => self.normalize_plus(w)?,
            _ => self.normalize_crossed(w)?,
        };
        if self.shadow(&out) != self.shadow(w) {
            return Err(Error::Inconsistent("normalization changed the shadow".into()));
        }
        Ok(out)
    }

    /// Degree-zero words are normalized to `s_0^{e_0} ⋯ ∏ [s_i, s_j]^{c_ij}`.
    fn render_nil2(&self, v: &Nil2) -> SqmWord {
        let s = |k: usize, e: i8| Letter::new(Generator::Obj0(TwObject::singleton(k)), e);
        let mut letters = Vec::new();
        for (&k, &e) in &v.exponents {
            for _ in 0..e.abs() {
                letters.push(s(k, e.signum() as i8));
            }
        }
        for (&(i, j), &c) in &v.commutators {
            let one = [s(i, -1), s(j, -1), s(i, 1), s(j, 1)];
            for _ in 0..c.abs() {
                if c > 0 {
                    letters.extend(one.iter().cloned());
                } else {
                    letters.extend(one.iter().rev().map(Letter::inverse));
                }
            }
        }
        SqmWord { letters }
    }

    /// Semi-decision of equality: `Some(true)` if the normal forms agree,
    /// `Some(false)` if the shadows differ, `None` otherwise.
    pub fn words_equal(&self, a: &SqmWord, b: &SqmWord) -> Result<Option<bool>> {
        if self.shadow(a) != self.shadow(b) {
            return Ok(Some(false));
        }
        if self.normalize(a)? == self.normalize(b)? {
            return Ok(Some(true));
        }
        Ok(None)
    }

    // ----- translations -----

    /// Plus presentation to crossed presentation.
    pub fn translate_f(&self, w: &SqmWord, splittings: &Splittings) -> Result<SqmWord> {
        let mut out = Vec::new();
        for l in &w.letters {
            let mut part = match &l.generator {
                Generator::Obj0(x) => vec![Letter::new(Generator::Obj0(x.clone()), 1)],
                Generator::Weq1(x) => vec![
                    Letter::new(Generator::Obj1(x.target().clone()), 1),
                    Letter::new(Generator::Weq0(self.face_weq(1, 1, x)), 1),
                ],
                Generator::Cof(c) => {
                    let alpha = splittings.get(c).ok_or_else(|| Error::MissingSplitting(c.describe(self.base())))?;
                    vec![Letter::new(Generator::Weq0(alpha.clone()), 1)]
                }
                _ => return Err(Error::Input("translate_f expects a plus-presentation word".into())),
            };
            if l.exponent < 0 {
                part = part.iter().rev().map(Letter::inverse).collect();
            }
            out.extend(part);
        }
        Ok(SqmWord { letters: out })
    }

    /// Crossed presentation to plus presentation.
    pub fn translate_g(&self, w: &SqmWord) -> Result<SqmWord> {
        let mut out = Vec::new();
        for l in &w.letters {
            let g = match &l.generator {
                Generator::Obj0(x) => Generator::Obj0(x.clone()),
                Generator::Obj1(x) => Generator::Weq1(Weq::identity(self.level(1), x)),
                Generator::Weq0(x) => Generator::Weq1(self.degen_weq(0, 0, x)),
                _ => return Err(Error::Input("translate_g expects a crossed-presentation word".into())),
            };
            out.push(Letter::new(g, l.exponent));
        }
        Ok(SqmWord { letters: out })
    }

    // ----- enumeration and sampling -----

    /// Covering families available to an entry: the identity and the declared covers.
    fn atom_families(&self, level: usize, o: ObjId) -> Vec<(Vec<ObjId>, Vec<usize>)> {
        let site = self.level(level);
        let mut out = vec![(vec![o], vec![site.identity(o)])];
        for c in site.declared_covers() {
            if c.target == o {
                out.push((c.family.iter().map(|&m| site.src(m)).collect(), c.family.clone()));
            }
        }
        out
    }

    fn weq_from_choice(&self, level: usize, source: &TwObject, choice: &[usize], perm: Option<&[usize]>) -> Weq {
        let site = self.level(level);
        let mut objs = Vec::new();
        let mut set_map = Vec::new();
        let mut components = Vec::new();
        for (i, &o) in source.objects.iter().enumerate() {
            let (srcs, mors) = &self.atom_families(level, o)[choice[i]];
            objs.extend(srcs.iter().copied());
            set_map.extend(std::iter::repeat_n(i, srcs.len()));
            components.extend(mors.iter().copied());
        }
        let mono = Weq {
            cover: TwMorphism { source: TwObject { objects: objs }, target: source.clone(), set_map, components },
        };
        match perm {
            Some(p) => mono.then(site, &Weq::permutation(site, mono.target(), p)),
            None => mono,
        }
    }

    /// Weak equivalences out of `source` built from atoms, coproducts and permutations.
    pub fn weqs_from(&self, level: usize, source: &TwObject) -> Vec<Weq> {
        let sizes: Vec<usize> = source.objects.iter().map(|&o| self.atom_families(level, o).len()).collect();
        let mut out = Vec::new();
        for choice in crate::assembler::product_indices(&sizes) {
            let mono = self.weq_from_choice(level, source, &choice, None);
            for perm in permutations(mono.target().len()) {
                let w = self.weq_from_choice(level, source, &choice, Some(&perm));
                if !out.contains(&w) {
                    out.push(w);
                }
            }
        }
        out
    }

    pub fn random_weq<R: Rng>(&self, level: usize, source: &TwObject, rng: &mut R) -> Weq {
        let choice: Vec<usize> =
            source.objects.iter().map(|&o| rng.gen_range(0..self.atom_families(level, o).len())).collect();
        let len = self.weq_from_choice(level, source, &choice, None).target().len();
        let mut perm: Vec<usize> = (0..len).collect();
        perm.shuffle(rng);
        self.weq_from_choice(level, source, &choice, Some(&perm))
    }

    /// First weak equivalence `source ⇝ target` found by exhaustive search.
    pub fn find_weq(&self, level: usize, source: &TwObject, target: &TwObject) -> Option<Weq> {
        let site = self.level(level);
        twist::all_morphisms(site, target, source)
            .into_iter()
            .find(|m| twist::is_sub_map(site, m) && twist::is_covering_family(site, m))
            .map(|cover| Weq { cover })
    }

    pub fn random_object<R: Rng>(&self, level: usize, max_len: usize, rng: &mut R) -> TwObject {
        let objs = self.level(level).noninitial_objects();
        let n = rng.gen_range(0..=max_len);
        TwObject { objects: (0..n).map(|_| *objs.choose(rng).expect("nonempty site")).collect() }
    }

    /// Cofiber sequences of level 0 between objects with at most `max_len` entries.
    pub fn cofibs(&self, max_len: usize) -> Vec<Cofib> {
        let site = self.base();
        sc::enumerate_spans(site, max_len)
            .into_iter()
            .filter(|s| sc::sc_classify(site, s).is_cofibration)
            .filter_map(|s| Cofib::new(site, s).ok())
            .collect()
    }

    /// Every generator on objects with at most `max_len` entries.
    pub fn generators(&self, max_len: usize) -> (Vec<Generator>, Vec<Generator>) {
        let mut crossed = Vec::new();
        let mut plus = Vec::new();
        for x in twist::small_objects(self.base(), max_len) {
            crossed.push(Generator::Obj0(x.clone()));
            plus.push(Generator::Obj0(x.clone()));
            for w in self.weqs_from(0, &x) {
                crossed.push(Generator::Weq0(w));
            }
        }
        for x in twist::small_objects(self.level(1), max_len) {
            crossed.push(Generator::Obj1(x.clone()));
            for w in self.weqs_from(1, &x) {
                plus.push(Generator::Weq1(w));
            }
        }
        for c in self.cofibs(max_len) {
            plus.push(Generator::Cof(c));
        }
        (crossed, plus)
    }

    pub fn random_crossed_letter<R: Rng>(&self, rng: &mut R) -> Letter {
        let g = if rng.gen_bool(0.5) {
            Generator::Obj1(self.random_object(1, 3, rng))
        } else {
            let x = self.random_object(0, 2, rng);
            Generator::Weq0(self.random_weq(0, &x, rng))
        };
        Letter::new(g, if rng.gen_bool(0.5) { 1 } else { -1 })
    }

    pub fn random_crossed_word<R: Rng>(&self, rng: &mut R, max_len: usize) -> SqmWord {
        let n = rng.gen_range(0..=max_len);
        SqmWord { letters: (0..n).map(|_| self.random_crossed_letter(rng)).collect() }
    }

    /// A random cofiber sequence: a weak equivalence followed by an inclusion into a larger object.
    pub fn random_cofib<R: Rng>(&self, rng: &mut R) -> Cofib {
        let site = self.base();
        let a = self.random_object(0, 2, rng);
        let w = self.random_weq(0, &a, rng);
        let apex = w.target().clone();
        let extra = self.random_object(0, 1, rng);
        let n = apex.len() + extra.len();
        let mut slots: Vec<usize> = (0..n).collect();
        slots.shuffle(rng);
        let mut total = vec![usize::MAX; n];
        for (k, &o) in apex.objects.iter().enumerate() {
            total[slots[k]] = o;
        }
        let mut rest = extra.objects.iter();
        for t in total.iter_mut().filter(|t| **t == usize::MAX) {
            *t = *rest.next().expect("sizes agree");
        }
        let mv = TwMorphism {
            source: apex.clone(),
            target: TwObject { objects: total },
            set_map: slots[..apex.len()].to_vec(),
            components: apex.objects.iter().map(|&o| site.identity(o)).collect(),
        };
        let span = ScSpan::new(site, w.cover, mv).expect("legs are a covering sub-map and a move");
        Cofib::new(site, span).expect("injective move over a cover")
    }

    pub fn random_plus_word<R: Rng>(&self, rng: &mut R, max_len: usize) -> SqmWord {
        let n = rng.gen_range(0..=max_len);
        let letters = (0..n)
            .map(|_| {
                let g = if rng.gen_bool(0.5) {
                    let x = self.random_object(1, 2, rng);
                    Generator::Weq1(self.random_weq(1, &x, rng))
                } else {
                    Generator::Cof(self.random_cofib(rng))
                };
                Letter::new(g, if rng.gen_bool(0.5) { 1 } else { -1 })
            })
            .collect();
        SqmWord { letters }
    }

    pub fn random_degree0_word<R: Rng>(&self, rng: &mut R, max_len: usize) -> SqmWord {
        let n = rng.gen_range(0..=max_len);
        SqmWord {
            letters: (0..n)
                .map(|_| {
                    Letter::new(Generator::Obj0(self.random_object(0, 2, rng)), if rng.gen_bool(0.5) { 1 } else { -1 })
                })
                .collect(),
        }
    }

    fn obj0(x: &TwObject) -> SqmWord {
        SqmWord::single(Generator::Obj0(x.clone()), 1)
    }

    fn obj1(x: &TwObject) -> SqmWord {
        SqmWord::single(Generator::Obj1(x.clone()), 1)
    }

    fn weq0(w: &Weq) -> SqmWord {
        SqmWord::single(Generator::Weq0(w.clone()), 1)
    }

    fn tau(&self, a: &TwObject, b: &TwObject) -> SqmWord {
        Self::weq0(&Weq::tau(self.base(), a, b))
    }

    /// One random instance of the named relation.
    pub fn rule_instance<R: Rng>(&self, rule: &'static str, rng: &mut R) -> RuleInstance {
        let s0 = self.base();
        let s1 = self.level(1);
        let o0 = |rng: &mut R| self.random_object(0, 2, rng);
        let o1 = |rng: &mut R| self.random_object(1, 2, rng);
        let (lhs, rhs) = match rule {
            "A1" => {
                let a = o0(rng);
                if rng.gen_bool(0.5) {
                    (Self::obj1(&self.degen_obj(0, 0, &a)), SqmWord::empty())
                } else {
                    (Self::weq0(&Weq::identity(s0, &a)), SqmWord::empty())
                }
            }
            "A2" => {
                let (a, b) = (o0(rng), o0(rng));
                (Self::obj0(&tw_coproduct(&a, &b)), Self::obj0(&a).mul(&Self::obj0(&b)))
            }
            "A3" => {
                let a = o0(rng);
                let f = self.random_weq(0, &a, rng);
                let g = self.random_weq(0, f.target(), rng);
                (Self::weq0(&f.then(s0, &g)), Self::weq0(&g).mul(&Self::weq0(&f)))
            }
            "A4" => {
                let a2 = self.random_object(2, 3, rng);
                (
                    Self::obj1(&self.face_obj(2, 1, &a2)),
                    Self::obj1(&self.face_obj(2, 0, &a2)).mul(&Self::obj1(&self.face_obj(2, 2, &a2))),
                )
            }
            "A5" => {
                let a1 = o1(rng);
                let w = self.random_weq(1, &a1, rng);
                (
                    Self::obj1(w.target()).mul(&Self::weq0(&self.face_weq(1, 1, &w))),
                    Self::weq0(&self.face_weq(1, 0, &w)).mul(&Self::obj1(&a1)),
                )
            }
            "A6" => {
                let c = o0(rng);
                if rng.gen_bool(0.5) {
                    let a = o0(rng);
                    let f = self.random_weq(0, &a, rng);
                    (Self::weq0(&Weq::identity(s0, &c).coproduct(&f)), Self::weq0(&f))
                } else {
                    let a1 = o1(rng);
                    (Self::obj1(&a1), Self::obj1(&tw_coproduct(&self.degen_obj(0, 0, &c), &a1)))
                }
            }
            "A7" => {
                let (a, b) = (o1(rng), o1(rng));
                let pad = self.degen_obj(0, 0, &self.face_obj(1, 1, &b));
                (Self::obj1(&tw_coproduct(&a, &b)), Self::obj1(&b).mul(&Self::obj1(&tw_coproduct(&a, &pad))))
            }
            "B1" => {
                let t = self.tau(&o0(rng), &o0(rng));
                let x = SqmWord { letters: vec![self.random_crossed_letter(rng)] };
                (t.mul(&x), x.mul(&t))
            }
            "B2" => {
                let (a, b, c) = (o0(rng), o0(rng), o0(rng));
                if rng.gen_bool(0.5) {
                    (self.tau(&a, &tw_coproduct(&b, &c)), self.tau(&a, &b).mul(&self.tau(&a, &c)))
                } else {
                    (self.tau(&tw_coproduct(&a, &b), &c), self.tau(&a, &c).mul(&self.tau(&b, &c)))
                }
            }
            "B3" => {
                let c = o0(rng);
                if rng.gen_bool(0.5) {
                    let a = o0(rng);
                    let f = self.random_weq(0, &a, rng);
                    (self.act(&Self::weq0(&f), &Self::obj0(&c)), Self::weq0(&f.coproduct(&Weq::identity(s0, &c))))
                } else {
                    let a1 = o1(rng);
                    (self.act(&Self::obj1(&a1), &Self::obj0(&c)), Self::obj1(&tw_coproduct(&a1, &self.degen_obj(0, 0, &c))))
                }
            }
            "B4" => {
                let (a, c) = (o0(rng), o0(rng));
                let f = self.random_weq(0, &a, rng);
                let g = self.random_weq(0, &c, rng);
                let (b, d) = (f.target().clone(), g.target().clone());
                (
                    Self::weq0(&f).mul(&Self::weq0(&g)),
                    SqmWord::product([&Self::weq0(&f.coproduct(&g)), &self.tau(&d, &b), &self.tau(&a, &d)]),
                )
            }
            "B5" => {
                let (a, b) = (o1(rng), o1(rng));
                (
                    Self::obj1(&a).mul(&Self::obj1(&b)),
                    SqmWord::product([
                        &Self::obj1(&tw_coproduct(&a, &b)),
                        &self.tau(&self.face_obj(1, 0, &b), &self.face_obj(1, 0, &a)),
                        &self.tau(&self.face_obj(1, 1, &a), &self.face_obj(1, 0, &b)),
                    ]),
                )
            }
            "B6" => {
                let (a, b, c) = (o0(rng), o0(rng), o0(rng));
                let t = Weq::tau(s0, &a, &b);
                (Self::weq0(&t.coproduct(&Weq::identity(s0, &c))), Self::weq0(&t))
            }
            "SQ1" => {
                let (c, d) = (self.random_degree0_word(rng, 3), self.random_degree0_word(rng, 3));
                (self.boundary_word(&self.bracket(&c, &d)), commutator(&d, &c))
            }
            "SQ2" => {
                let (c, d) = (self.random_crossed_word(rng, 3), self.random_crossed_word(rng, 3));
                (self.bracket(&self.boundary_word(&c), &self.boundary_word(&d)), commutator(&d, &c))
            }
            "SQ3" => {
                let (c, d) = (self.random_degree0_word(rng, 3), self.random_degree0_word(rng, 3));
                (self.bracket(&c, &d).mul(&self.bracket(&d, &c)), SqmWord::empty())
            }
            "R4" => {
                let a = o0(rng);
                (SqmWord::single(Generator::Weq1(Weq::identity(s1, &self.degen_obj(0, 0, &a))), 1), SqmWord::empty())
            }
            "R5" => {
                let a = o0(rng);
                let c = if rng.gen_bool(0.5) {
                    Cofib::new(s0, ScSpan::identity(s0, &a)).expect("identities are cofibrations")
                } else {
                    Cofib::summand_inclusion(s0, &a, &TwObject::empty())
                };
                (SqmWord::single(Generator::Cof(c), 1), SqmWord::empty())
            }
            "R10" => {
                let (a, b) = (o0(rng), o0(rng));
                (SqmWord::single(Generator::Cof(Cofib::summand_inclusion(s0, &a, &b)), 1), SqmWord::empty())
            }
            other => panic!("unknown rule {other}"),
        };
        RuleInstance { rule, lhs, rhs }
    }
}

pub const RULES: &[&str] = &[
    "A1", "A2", "A3", "A4", "A5", "A6", "A7", "B1", "B2", "B3", "B4", "B5", "B6", "SQ1", "SQ2", "SQ3", "R4", "R5",
    "R10",
];

/// `[x, y] = x⁻¹y⁻¹xy`.
pub fn commutator(x: &SqmWord, y: &SqmWord) -> SqmWord {
    SqmWord::product([&x.inverse(), &y.inverse(), x, y])
}

pub fn free_reduce(w: SqmWord) -> SqmWord {
    let mut out: Vec<Letter> = Vec::with_capacity(w.letters.len());
    for l in w.letters {
        if out.last().is_some_and(|t| t.generator == l.generator && t.exponent == -l.exponent) {
            out.pop();
        } else {
            out.push(l);
        }
    }
    SqmWord { letters: out }
}

/// All permutations of `0..n` in lexicographic order.
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..n).collect();
    loop {
        out.push(cur.clone());
        let Some(i) = (0..n.saturating_sub(1)).rev().find(|&i| cur[i] < cur[i + 1]) else { break };
        let j = (i + 1..n).rev().find(|&j| cur[j] > cur[i]).expect("successor exists");
        cur.swap(i, j);
        cur[i + 1..].reverse();
    }
    out
}
