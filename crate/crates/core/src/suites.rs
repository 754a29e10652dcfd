//! Property suites over the bundled fixtures. Each suite counts the cases it
//! checked and records a description of every failure.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::assembler::Assembler;
use crate::error::Result;
use crate::fixtures;
use crate::iet::{iet_compose, random_iet, tau_alpha, Basis, Iet, QLinearReal};
use crate::kgroups::{self, boundary_k1, boundary_vector, canonical_k1, curly_product, relative_k1, K1Pair};
use crate::sc::{check_saturation, saturation_samples};
use crate::sqm::{Generator, SqmContext, SqmWord, Splittings, RULES};
use crate::twist::{self, TwMorphism, TwObject};

#[derive(Clone, Debug, Default, Serialize)]
pub struct SuiteReport {
    pub name: String,
    pub checked: usize,
    pub failures: Vec<String>,
}

impl SuiteReport {
    pub fn new(name: &str) -> Self {
        SuiteReport { name: name.into(), ..Default::default() }
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty() && self.checked > 0
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok {
            self.failures.push(what());
        }
    }

    fn record<T>(&mut self, r: Result<T>, what: &str) -> Option<T> {
        match r {
            Ok(v) => Some(v),
            Err(e) => {
                self.checked += 1;
                self.failures.push(format!("{what}: {e}"));
                None
            }
        }
    }
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

// ----- criterion 1-3, 9 (IET half) -----

pub fn saf_anchor() -> SuiteReport {
    let mut r = SuiteReport::new("saf anchor");
    if let Some(t) = r.record(Iet::from_json(fixtures::SWAP_EPS_DELTA), "parse") {
        let w = t.saf();
        let one = num_rational::BigRational::from_integer(1.into());
        r.check(w.terms.len() == 1 && w.coefficient(0, 1) == -one, || format!("got {:?}", w.render(&t.basis)));
    }
    r
}

pub fn saf_vanishing(seed: u64, random_cases: usize) -> SuiteReport {
    let mut r = SuiteReport::new("saf vanishing");
    let b = Basis::sqrt2();
    let half = num_rational::BigRational::new(1.into(), 2.into());
    let alphas =
        [QLinearReal::from_ints(&[1, 0]), QLinearReal::from_ints(&[0, 1]), QLinearReal { coords: vec![half.clone(), half] }];
    for a in &alphas {
        let t = Iet::swap(&b, a);
        r.check(t.validate().unwrap_or(false), || format!("swap of {} is not valid", b.render(a)));
        r.check(t.saf().is_zero(), || format!("swap of {} has nonzero saf", b.render(a)));
        r.check(tau_alpha(&b, a).saf().is_zero(), || format!("τ of {} has nonzero saf", b.render(a)));
    }
    let q = Basis::rationals();
    let mut g = rng(seed);
    for _ in 0..random_cases {
        let len = QLinearReal::from_ints(&[g.gen_range(1..=3)]);
        if let Some(t) = r.record(random_iet(&q, &len, 5, &mut g), "random rational IET") {
            r.check(t.saf().is_zero(), || format!("rational IET with nonzero saf: {:?}", t.to_file()));
        }
    }
    r
}

pub fn saf_homomorphism(seed: u64, cases: usize) -> SuiteReport {
    let mut r = SuiteReport::new("saf homomorphism");
    let b = Basis::sqrt2();
    let mut g = rng(seed);
    for _ in 0..cases {
        let len = if g.gen_bool(0.5) { QLinearReal::from_ints(&[1, 0]) } else { QLinearReal::from_ints(&[0, 1]) };
        let (Some(x), Some(y)) =
            (r.record(random_iet(&b, &len, 4, &mut g), "random IET"), r.record(random_iet(&b, &len, 4, &mut g), "random IET"))
        else {
            continue;
        };
        if let Some(xy) = r.record(iet_compose(&x, &y), "compose") {
            r.check(xy.saf() == x.saf().add(&y.saf()), || format!("saf not additive on {:?} and {:?}", x.to_file(), y.to_file()));
        }
    }
    r
}

pub fn cut_balance(seed: u64, cases: usize) -> SuiteReport {
    let mut r = SuiteReport::new("cut balance");
    let b = Basis::sqrt2();
    let mut g = rng(seed);
    for _ in 0..cases {
        if let Some(t) = r.record(random_iet(&b, &QLinearReal::from_ints(&[1, 0]), 5, &mut g), "random IET") {
            if let Some((d, c)) = r.record(t.cut_balance(), "cut balance") {
                r.check(d == c, || format!("{d} domain cuts against {c} codomain cuts"));
            }
        }
    }
    r
}

// ----- criterion 4 -----

pub fn k0_examples() -> SuiteReport {
    let mut r = SuiteReport::new("K0 examples");
    let point = kgroups::k0(&fixtures::point());
    r.check(point.group.to_string() == "Z", || format!("point: {}", point.group));
    let hs = kgroups::k0(&fixtures::halfsplit());
    r.check(hs.group.to_string() == "Z^2", || format!("halfsplit: {}", hs.group));
    let dc = kgroups::k0(&fixtures::double_cover());
    r.check(
        dc.group.rank == 1 && dc.group.torsion.is_empty() && dc.smith.diagonal == vec![1.into()],
        || format!("double cover: {} with diagonal {:?}", dc.group, dc.smith.diagonal),
    );
    r
}

// ----- criterion 5 -----

fn homs(site: &Assembler, objs: &[TwObject]) -> Vec<Vec<Vec<TwMorphism>>> {
    objs.iter().map(|x| objs.iter().map(|y| twist::all_morphisms(site, x, y)).collect()).collect()
}

/// Both clauses of the cancellation lemma for sub-maps and covering sub-maps.
pub fn subcomposition(name: &str, site: &Assembler, max_len: usize) -> SuiteReport {
    let mut r = SuiteReport::new(&format!("subcomposition on {name}"));
    let objs = twist::small_objects(site, max_len);
    let h = homs(site, &objs);
    let sub = |m: &TwMorphism| twist::is_sub_map(site, m);
    let cover = |m: &TwMorphism| sub(m) && twist::is_covering_family(site, m);
    for a in 0..objs.len() {
        for b in 0..objs.len() {
            for f in &h[a][b] {
                let (fs, fc) = (sub(f), cover(f));
                for c in 0..objs.len() {
                    for g in &h[b][c] {
                        let gf = f.then(site, g);
                        let gfs = sub(&gf);
                        r.check(!gfs || fs, || format!("gf sub but f not: {f:?} then {g:?}"));
                        if gfs && cover(&gf) && cover(g) {
                            r.check(fc, || format!("g, gf covering but f not: {f:?} then {g:?}"));
                        }
                    }
                }
            }
        }
    }
    r
}

/// Adjunction `σ* ⊣ Π_σ` along moves: hom-set bijection counts, triangle
/// identities, the two unit/counit isomorphisms and preservation of (covering) sub-maps.
pub fn dependent_products(name: &str, site: &Assembler, max_len: usize) -> SuiteReport {
    let mut r = SuiteReport::new(&format!("dependent products on {name}"));
    let objs = twist::small_objects(site, max_len);
    let over = |base: &TwObject| -> Vec<TwMorphism> {
        objs.iter().filter(|x| x.len() <= 2).flat_map(|x| twist::all_morphisms(site, x, base)).collect()
    };
    for a in &objs {
        for b in &objs {
            for sigma in twist::moves(site, a, b) {
                let xs = over(b);
                let ys = over(a);
                for q in &xs {
                    let Some(pb) = r.record(twist::pullback_along(site, &sigma, q), "σ*") else { continue };
                    for p in &ys {
                        let Some(dp) = r.record(twist::dependent_product(site, &sigma, p), "Π") else { continue };
                        let left = twist::hom_set(site, &pb.right, p).len();
                        let right = twist::hom_set(site, q, &dp.morphism).len();
                        r.check(left == right, || format!("|hom(σ*X, Y)| = {left} but |hom(X, ΠY)| = {right}"));
                    }
                    // ε_{σ*q} ∘ σ*(η_q) = 1
                    if let Some((dpq, eta)) = r.record(twist::unit(site, &sigma, q), "unit") {
                        let lifted = twist::pullback_morphism(site, &sigma, q, &dpq.morphism, &eta);
                        let counit = twist::counit(site, &sigma, &pb.right);
                        if let (Some(l), Some((_, eps))) = (r.record(lifted, "σ*η"), r.record(counit, "counit")) {
                            let id = TwMorphism::identity(site, &pb.apex);
                            r.check(l.then(site, &eps) == id, || "first triangle identity fails".into());
                        }
                        // Overlapping components of q reappear as off-diagonal pieces of the
                        // fiberwise self-product, so the iso needs q to be a sub-map.
                        if sigma.is_surjective() && twist::is_sub_map(site, q) {
                            r.check(twist::isomorphic_over(site, &dpq.morphism, q), || "Π_σ σ* q is not q".into());
                        }
                    }
                }
                for p in &ys {
                    let Some(dp) = r.record(twist::dependent_product(site, &sigma, p), "Π") else { continue };
                    // Π(ε_p) ∘ η_{Πp} = 1
                    let unit = twist::unit(site, &sigma, &dp.morphism);
                    let counit = twist::counit(site, &sigma, p);
                    if let (Some((_, eta)), Some((pbp, eps))) = (r.record(unit, "unit"), r.record(counit, "counit")) {
                        if let Some(pe) =
                            r.record(twist::dependent_product_morphism(site, &sigma, &pbp.right, p, &eps), "Πε")
                        {
                            let id = TwMorphism::identity(site, &dp.morphism.source);
                            r.check(eta.then(site, &pe) == id, || "second triangle identity fails".into());
                        }
                        if sigma.is_injective() {
                            r.check(twist::isomorphic_over(site, &pbp.right, p), || "σ* Π_σ p is not p".into());
                        }
                    }
                    if twist::is_sub_map(site, p) {
                        r.check(twist::is_sub_map(site, &dp.morphism), || "Π_σ does not preserve sub-maps".into());
                        if twist::is_covering_family(site, p) {
                            r.check(twist::is_covering_family(site, &dp.morphism), || {
                                "Π_σ does not preserve covering sub-maps".into()
                            });
                        }
                    }
                }
            }
        }
    }
    r
}

// ----- criterion 6 -----

pub fn saturation(name: &str, site: &Assembler, max_len: usize) -> SuiteReport {
    let mut r = SuiteReport::new(&format!("saturation on {name}"));
    if let Some(rep) = r.record(check_saturation(site, &saturation_samples(site, max_len)), "saturation") {
        r.checked += rep.direction_one_checked;
        r.failures.extend(rep.direction_one_failures.iter().map(|f| format!("direction one: {f}")));
        if rep.condition_g {
            r.checked += rep.direction_two_checked;
            r.failures.extend(rep.direction_two_failures.iter().map(|f| format!("direction two: {f}")));
        }
    }
    r
}

// ----- criterion 7 -----

pub fn cofiber_contexts() -> Vec<(&'static str, SqmContext)> {
    vec![
        ("cofiber_double_cover", SqmContext::new(fixtures::cofiber_double_cover())),
        ("cofiber_halfsplit_point", SqmContext::new(fixtures::cofiber_halfsplit_point())),
    ]
}

/// `f∘g` and `g∘f` on every generator with at most `max_len` entries.
pub fn translation_round_trip(name: &str, ctx: &SqmContext, max_len: usize) -> SuiteReport {
    let mut r = SuiteReport::new(&format!("translation round trip on {name}"));
    let (crossed, plus) = ctx.generators(max_len);
    let cofibs: Vec<_> = plus.iter().filter_map(|g| if let Generator::Cof(c) = g { Some(c) } else { None }).collect();
    let Some(splittings) = r.record(Splittings::canonical(ctx.base(), cofibs), "splittings") else { return r };
    for g in &crossed {
        let w = SqmWord::single(g.clone(), 1);
        let back = ctx.translate_g(&w).and_then(|x| ctx.translate_f(&x, &splittings));
        if let Some(back) = r.record(back, "f∘g") {
            r.check(ctx.shadow(&back) == ctx.shadow(&w), || format!("f∘g changes the shadow of {g:?}"));
            if matches!(g, Generator::Obj1(_) | Generator::Weq0(_)) {
                let same = ctx.normalize(&back).ok() == ctx.normalize(&w).ok();
                r.check(same, || format!("f∘g is not normalize-equal on {g:?}"));
            }
        }
    }
    for g in &plus {
        let w = SqmWord::single(g.clone(), 1);
        let back = ctx.translate_f(&w, &splittings).and_then(|x| ctx.translate_g(&x));
        if let Some(back) = r.record(back, "g∘f") {
            r.check(ctx.shadow(&back) == ctx.shadow(&w), || format!("g∘f changes the shadow of {g:?}"));
        }
    }
    r
}

pub fn normalize_idempotent(name: &str, ctx: &SqmContext, seed: u64, cases: usize) -> SuiteReport {
    let mut r = SuiteReport::new(&format!("normalize idempotent on {name}"));
    let mut g = rng(seed);
    for k in 0..cases {
        let w = match k % 3 {
            0 => ctx.random_crossed_word(&mut g, 6),
            1 => ctx.random_plus_word(&mut g, 6),
            _ => ctx.random_degree0_word(&mut g, 6),
        };
        if let Some(n) = r.record(ctx.normalize(&w), "normalize") {
            let again = ctx.normalize(&n).ok();
            r.check(again.as_ref() == Some(&n), || format!("normalize is not idempotent on {w:?}"));
            r.check(ctx.shadow(&n) == ctx.shadow(&w), || format!("normalize changes the shadow of {w:?}"));
        }
    }
    r
}

pub fn rule_shadows(name: &str, ctx: &SqmContext, seed: u64, cases: usize) -> SuiteReport {
    let mut r = SuiteReport::new(&format!("rule shadows on {name}"));
    let mut g = rng(seed);
    for k in 0..cases {
        let inst = ctx.rule_instance(RULES[k % RULES.len()], &mut g);
        r.check(ctx.shadow(&inst.lhs) == ctx.shadow(&inst.rhs), || {
            format!("{}: {:?} vs {:?}", inst.rule, inst.lhs, inst.rhs)
        });
    }
    r
}

// ----- criterion 8 -----

pub fn canonical_pairs(name: &str, ctx: &SqmContext, seed: u64, cases: usize) -> SuiteReport {
    let mut r = SuiteReport::new(&format!("canonical K1 pairs on {name}"));
    let mut g = rng(seed);
    for _ in 0..cases {
        let w = kgroups::random_kernel_word(ctx, &mut g);
        let Some(p) = r.record(canonical_k1(ctx, &w), "canonical_k1") else { continue };
        r.check(ctx.face_obj(1, 0, &p.v1) == ctx.face_obj(1, 0, &p.w1), || "d₀V ≠ d₀W".into());
        r.check(p.check(ctx).is_ok(), || format!("invalid pair {p:?}"));
        r.check(ctx.boundary(&p.word()).is_identity(), || "output is not in the kernel".into());
        r.check(ctx.shadow(&p.word()) == ctx.shadow(&w), || format!("shadow changed for {w:?}"));
        if let Some(q) = r.record(canonical_k1(ctx, &p.word()), "rerun") {
            r.check(ctx.shadow(&q.word()) == ctx.shadow(&p.word()), || "rerun changes the shadow".into());
        }
    }
    r
}

fn sample_pairs(ctx: &SqmContext, g: &mut ChaCha8Rng, n: usize) -> Vec<K1Pair> {
    let mut out = Vec::new();
    let mut tries = 0;
    while out.len() < n && tries < 100 * n {
        tries += 1;
        if let Some(p) = kgroups::random_pair(ctx, g) {
            out.push(p);
        }
    }
    out
}

/// `{f, f} = 0`, the coproduct relation and the composition relation, under shadow.
pub fn k1_relations(name: &str, ctx: &SqmContext, seed: u64, cases: usize) -> SuiteReport {
    let mut r = SuiteReport::new(&format!("K1 relations on {name}"));
    let mut g = rng(seed);
    let pairs = sample_pairs(ctx, &mut g, cases);
    r.check(pairs.len() == cases, || "could not sample enough pairs".into());
    for (k, x) in pairs.iter().enumerate() {
        r.check(ctx.shadow(&K1Pair::diagonal(&x.f).word()).is_trivial(), || "{f, f} is not trivial".into());
        let y = &pairs[(k + 1) % pairs.len()];
        let prod = curly_product(ctx, x, y);
        let both = x.word().mul(&y.word());
        r.check(prod.coproduct.check(ctx).is_ok(), || "coproduct pair is invalid".into());
        r.check(ctx.shadow(&prod.coproduct.word()) == ctx.shadow(&both), || "coproduct relation fails".into());
        // A pair composable with x: {r, s: C ⇝ A} built from weak equivalences into A.
        let f0 = ctx.random_weq(0, &x.a0, &mut g);
        if let Some(inv) = invert_to_source(ctx, &f0) {
            let y = K1Pair::diagonal(&inv);
            if let Some(c) = curly_product(ctx, x, &y).composite {
                r.check(c.check(ctx).is_ok(), || "composite pair is invalid".into());
                let both = x.word().mul(&y.word());
                r.check(ctx.shadow(&c.word()) == ctx.shadow(&both), || "composition relation fails".into());
            }
        }
    }
    r
}

/// A weak equivalence `C ⇝ A` for some `C`, from one `A ⇝ B` when `B ⇝ A` exists.
fn invert_to_source(ctx: &SqmContext, f: &crate::sc::Weq) -> Option<crate::sc::Weq> {
    ctx.find_weq(0, f.target(), f.source())
}

// ----- criterion 9 (K-theory half) -----

pub fn boundary_suite(name: &str, ctx: &SqmContext, seed: u64, cases: usize) -> SuiteReport {
    let mut r = SuiteReport::new(&format!("boundary on {name}"));
    let mut g = rng(seed);
    let pairs = sample_pairs(ctx, &mut g, cases);
    r.check(pairs.len() == cases, || "could not sample enough pairs".into());
    let k0 = &ctx.k0_sub;
    for (k, p) in pairs.iter().enumerate() {
        let Some(q) = r.record(relative_k1(ctx, p), "relative_k1") else { continue };
        let b = boundary_k1(ctx, &q);
        r.check(b == k0.class(&boundary_vector(k0, &q.c.objects, &q.d.objects)), || "boundary is not [D] - [C]".into());
        let neg: Vec<_> = ctx.collapse_vector(&p.word()).iter().map(|x| -x).collect();
        r.check(b == k0.class(&neg), || "boundary disagrees with the collapse of the pair".into());
        r.check(ctx.shadow(&q.to_pair(ctx).word()) == ctx.shadow(&p.word()), || "stripping changes the shadow".into());
        let other = &pairs[(k + 1) % pairs.len()];
        let prod = curly_product(ctx, p, other).coproduct;
        if let (Some(q1), Some(q2)) = (r.record(relative_k1(ctx, &prod), "relative_k1"), r.record(relative_k1(ctx, other), "relative_k1")) {
            let sum: Vec<_> = boundary_vector(k0, &q.c.objects, &q.d.objects)
                .iter()
                .zip(boundary_vector(k0, &q2.c.objects, &q2.d.objects))
                .map(|(a, b)| a + b)
                .collect();
            r.check(boundary_k1(ctx, &q1) == k0.class(&sum), || "boundary is not additive".into());
        }
    }
    r
}

/// Every suite at the sizes used by the acceptance gate.
pub fn all(seed: u64) -> Vec<SuiteReport> {
    let mut out = vec![saf_anchor(), saf_vanishing(seed, 50), saf_homomorphism(seed + 1, 100), k0_examples()];
    for (name, site) in fixtures::sites() {
        out.push(subcomposition(name, &site, 2));
        out.push(dependent_products(name, &site, 2));
    }
    for (name, site) in fixtures::sites() {
        out.push(saturation(name, &site, 2));
    }
    for (name, ctx) in cofiber_contexts() {
        out.push(translation_round_trip(name, &ctx, 2));
        out.push(normalize_idempotent(name, &ctx, seed + 2, 200));
        out.push(rule_shadows(name, &ctx, seed + 3, 500));
        out.push(canonical_pairs(name, &ctx, seed + 4, 50));
        out.push(k1_relations(name, &ctx, seed + 5, 20));
        out.push(boundary_suite(name, &ctx, seed + 6, 20));
    }
    out.push(cut_balance(seed + 7, 100));
    out
}
