//! Finite closed assemblers stored as explicit tables.
//!
//! Identities (`id_X`) and the maps out of the initial object (`init_X`) are
//! generated automatically, together with every composite that involves them.
//! Covering families are kept as generators; the topology they generate is
//! computed once, at construction, as a fixpoint over sieves.

use std::collections::{BTreeMap, HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type ObjId = usize;
pub type MorId = usize;

const MAX_SIEVE_BASE: usize = 16;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MorphismDecl {
    pub id: String,
    pub src: String,
    pub dst: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoverDecl {
    pub target: String,
    pub family: Vec<String>,
}

/// `left` and `right` share a codomain; the projections may be omitted, in
/// which case any pair making the square commute is used.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PullbackDecl {
    pub left: String,
    pub right: String,
    pub apex: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub proj_left: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub proj_right: Option<String>,
}

/// JSON form of an assembler. Composition triples read `[f, g, g∘f]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AssemblerSpec {
    pub objects: Vec<String>,
    pub initial: String,
    #[serde(default)]
    pub morphisms: Vec<MorphismDecl>,
    #[serde(default)]
    pub composition: Vec<[String; 3]>,
    #[serde(default)]
    pub covers: Vec<CoverDecl>,
    #[serde(default)]
    pub pullbacks: Vec<PullbackDecl>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Morphism {
    pub name: String,
    pub src: ObjId,
    pub dst: ObjId,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Pullback {
    pub apex: ObjId,
    pub left: MorId,
    pub right: MorId,
}

#[derive(Clone, Debug)]
struct DeclaredPullback {
    left: MorId,
    right: MorId,
    apex: ObjId,
    square: Option<Pullback>,
}

#[derive(Clone, Debug)]
pub struct Cover {
    pub target: ObjId,
    pub family: Vec<MorId>,
}

#[derive(Clone, Debug)]
pub struct Assembler {
    objects: Vec<String>,
    initial: ObjId,
    mors: Vec<Morphism>,
    identity: Vec<MorId>,
    from_initial: Vec<MorId>,
    declared_mors: Vec<MorId>,
    comp: HashMap<(MorId, MorId), MorId>,
    hom: HashMap<(ObjId, ObjId), Vec<MorId>>,
    into: Vec<Vec<MorId>>,
    covers: Vec<Cover>,
    declared_pullbacks: Vec<DeclaredPullback>,
    pullbacks: HashMap<(MorId, MorId), Option<Pullback>>,
    topology: Vec<HashSet<u64>>,
    obj_index: HashMap<String, ObjId>,
    mor_index: HashMap<String, MorId>,
}

fn lookup(index: &HashMap<String, usize>, name: &str, what: &str) -> Result<usize> {
    index
        .get(name)
        .copied()
        .ok_or_else(|| Error::Structural(format!("unknown {what} id `{name}`")))
}

impl Assembler {
    pub fn from_json(text: &str) -> Result<Self> {
        let spec: AssemblerSpec = serde_json::from_str(text)?;
        Self::from_spec(&spec)
    }

    pub fn from_spec(spec: &AssemblerSpec) -> Result<Self> {
        let mut obj_index = HashMap::new();
        for (i, name) in spec.objects.iter().enumerate() {
            if obj_index.insert(name.clone(), i).is_some() {
                return Err(Error::Structural(format!("duplicate object id `{name}`")));
            }
        }
        let initial = lookup(&obj_index, &spec.initial, "object")?;
        let n = spec.objects.len();

        let mut mors = Vec::new();
        let mut mor_index = HashMap::new();
        let mut identity = Vec::with_capacity(n);
        for (i, name) in spec.objects.iter().enumerate() {
            let id = format!("id_{name}");
            mor_index.insert(id.clone(), mors.len());
            identity.push(mors.len());
            mors.push(Morphism { name: id, src: i, dst: i });
        }
        let mut from_initial = vec![identity[initial]; n];
        for (i, name) in spec.objects.iter().enumerate() {
            if i == initial {
                continue;
            }
            let id = format!("init_{name}");
            mor_index.insert(id.clone(), mors.len());
            from_initial[i] = mors.len();
            mors.push(Morphism { name: id, src: initial, dst: i });
        }
        let mut declared_mors = Vec::new();
        for m in &spec.morphisms {
            if m.id.starts_with("id_") || m.id.starts_with("init_") {
                return Err(Error::Structural(format!("morphism id `{}` uses a reserved prefix", m.id)));
            }
            let src = lookup(&obj_index, &m.src, "object")?;
            let dst = lookup(&obj_index, &m.dst, "object")?;
            if mor_index.insert(m.id.clone(), mors.len()).is_some() {
                return Err(Error::Structural(format!("duplicate morphism id `{}`", m.id)));
            }
            declared_mors.push(mors.len());
            mors.push(Morphism { name: m.id.clone(), src, dst });
        }

        let mut hom: HashMap<(ObjId, ObjId), Vec<MorId>> = HashMap::new();
        let mut into = vec![Vec::new(); n];
        for (id, m) in mors.iter().enumerate() {
            hom.entry((m.src, m.dst)).or_default().push(id);
            into[m.dst].push(id);
        }
        for x in 0..n {
            if into[x].len() > MAX_SIEVE_BASE {
                return Err(Error::Structural(format!(
                    "object `{}` has {} incoming morphisms; at most {MAX_SIEVE_BASE} are supported",
                    spec.objects[x],
                    into[x].len()
                )));
            }
        }

        let mut comp = HashMap::new();
        for t in &spec.composition {
            let f = lookup(&mor_index, &t[0], "morphism")?;
            let g = lookup(&mor_index, &t[1], "morphism")?;
            let h = lookup(&mor_index, &t[2], "morphism")?;
            if mors[f].dst != mors[g].src || mors[h].src != mors[f].src || mors[h].dst != mors[g].dst {
                return Err(Error::Structural(format!(
                    "composition triple [{}, {}, {}] does not type-check",
                    t[0], t[1], t[2]
                )));
            }
            if let Some(old) = comp.insert((g, f), h) {
                if old != h {
                    return Err(Error::Structural(format!(
                        "composition of `{}` then `{}` declared twice",
                        t[0], t[1]
                    )));
                }
            }
        }
        for (f, mf) in mors.iter().enumerate() {
            for &g in &mors_from(&mors, mf.dst) {
                let mg = &mors[g];
                let auto = if f == identity[mf.src] {
                    Some(g)
                } else if g == identity[mg.dst] {
                    Some(f)
                } else if mf.src == initial {
                    Some(from_initial[mg.dst])
                } else {
                    None
                };
                match (auto, comp.get(&(g, f))) {
                    (Some(a), Some(&h)) if a != h => {
                        return Err(Error::Structural(format!(
                            "composite of `{}` then `{}` contradicts the identity/initial laws",
                            mf.name, mg.name
                        )))
                    }
                    (Some(a), None) => {
                        comp.insert((g, f), a);
                    }
                    (None, None) => {
                        return Err(Error::Structural(format!(
                            "composition of `{}` then `{}` is missing",
                            mf.name, mg.name
                        )))
                    }
                    _ => {}
                }
            }
        }

        let mut covers = Vec::new();
        for c in &spec.covers {
            let target = lookup(&obj_index, &c.target, "object")?;
            let mut family = Vec::new();
            for name in &c.family {
                let m = lookup(&mor_index, name, "morphism")?;
                if mors[m].dst != target {
                    return Err(Error::Structural(format!(
                        "cover of `{}` contains `{name}`, which does not land in it",
                        c.target
                    )));
                }
                family.push(m);
            }
            covers.push(Cover { target, family });
        }

        let mut asm = Assembler {
            objects: spec.objects.clone(),
            initial,
            mors,
            identity,
            from_initial,
            declared_mors,
            comp,
            hom,
            into,
            covers,
            declared_pullbacks: Vec::new(),
            pullbacks: HashMap::new(),
            topology: Vec::new(),
            obj_index,
            mor_index,
        };

        for p in &spec.pullbacks {
            let left = lookup(&asm.mor_index, &p.left, "morphism")?;
            let right = lookup(&asm.mor_index, &p.right, "morphism")?;
            let apex = lookup(&asm.obj_index, &p.apex, "object")?;
            if asm.mors[left].dst != asm.mors[right].dst {
                return Err(Error::Structural(format!(
                    "pullback of `{}` and `{}`: codomains differ",
                    p.left, p.right
                )));
            }
            let pl = p.proj_left.as_deref().map(|s| lookup(&asm.mor_index, s, "morphism")).transpose()?;
            let pr = p.proj_right.as_deref().map(|s| lookup(&asm.mor_index, s, "morphism")).transpose()?;
            for (proj, leg) in [(pl, left), (pr, right)] {
                if let Some(m) = proj {
                    if asm.mors[m].src != apex || asm.mors[m].dst != asm.mors[leg].src {
                        return Err(Error::Structural(format!(
                            "pullback projection `{}` has the wrong type",
                            asm.mors[m].name
                        )));
                    }
                }
            }
            let square = asm.commuting_square(left, right, apex, pl, pr);
            asm.declared_pullbacks.push(DeclaredPullback { left, right, apex, square });
        }
        asm.resolve_pullbacks();
        asm.compute_topology();
        Ok(asm)
    }

    fn commuting_square(
        &self,
        f: MorId,
        g: MorId,
        apex: ObjId,
        pl: Option<MorId>,
        pr: Option<MorId>,
    ) -> Option<Pullback> {
        let lefts = pl.map(|m| vec![m]).unwrap_or_else(|| self.hom(apex, self.mors[f].src).to_vec());
        let rights = pr.map(|m| vec![m]).unwrap_or_else(|| self.hom(apex, self.mors[g].src).to_vec());
        for &p in &lefts {
            for &q in &rights {
                if self.compose(f, p) == self.compose(g, q) {
                    return Some(Pullback { apex, left: p, right: q });
                }
            }
        }
        None
    }

    fn resolve_pullbacks(&mut self) {
        let mut table = HashMap::new();
        let mut declared: HashMap<(MorId, MorId), Pullback> = HashMap::new();
        for d in &self.declared_pullbacks {
            if let Some(sq) = d.square {
                if self.is_limit(d.left, d.right, &sq) {
                    declared.insert((d.left, d.right), sq);
                    declared.insert((d.right, d.left), Pullback { apex: sq.apex, left: sq.right, right: sq.left });
                }
            }
        }
        for c in 0..self.objects.len() {
            for &f in &self.into[c] {
                for &g in &self.into[c] {
                    let entry = declared.get(&(f, g)).copied().or_else(|| self.search_pullback(f, g));
                    table.insert((f, g), entry);
                }
            }
        }
        self.pullbacks = table;
    }

    fn cones(&self, f: MorId, g: MorId) -> Vec<Pullback> {
        let (a, b) = (self.mors[f].src, self.mors[g].src);
        let mut out = Vec::new();
        for p_obj in 0..self.objects.len() {
            for &p in self.hom(p_obj, a) {
                for &q in self.hom(p_obj, b) {
                    if self.compose(f, p) == self.compose(g, q) {
                        out.push(Pullback { apex: p_obj, left: p, right: q });
                    }
                }
            }
        }
        out
    }

    fn is_limit(&self, f: MorId, g: MorId, cand: &Pullback) -> bool {
        if self.compose(f, cand.left) != self.compose(g, cand.right) {
            return false;
        }
        self.cones(f, g).iter().all(|k| {
            self.hom(k.apex, cand.apex)
                .iter()
                .filter(|&&u| self.compose(cand.left, u) == k.left && self.compose(cand.right, u) == k.right)
                .count()
                == 1
        })
    }

    fn search_pullback(&self, f: MorId, g: MorId) -> Option<Pullback> {
        let cones = self.cones(f, g);
        cones.iter().copied().find(|c| self.is_limit(f, g, c))
    }

    fn sieve_of(&self, target: ObjId, family: &[MorId]) -> u64 {
        let mut mask = 0u64;
        for (pos, &m) in self.into[target].iter().enumerate() {
            let src = self.mors[m].src;
            let hit = family
                .iter()
                .any(|&f| self.hom(src, self.mors[f].src).iter().any(|&k| self.compose(f, k) == m));
            if hit {
                mask |= 1 << pos;
            }
        }
        mask
    }

    fn pull_sieve(&self, f: MorId, sieve: u64) -> u64 {
        let x = self.mors[f].dst;
        let y = self.mors[f].src;
        let mut mask = 0u64;
        for (pos, &g) in self.into[y].iter().enumerate() {
            let fg = self.compose(f, g);
            let p = self.into[x].iter().position(|&m| m == fg).expect("composite lands in target");
            if sieve & (1 << p) != 0 {
                mask |= 1 << pos;
            }
        }
        mask
    }

    fn all_sieves(&self, x: ObjId) -> Vec<u64> {
        let base = &self.into[x];
        let below: Vec<u64> = base.iter().map(|&m| self.sieve_of(x, &[m])).collect();
        (0u64..(1u64 << base.len()))
            .filter(|&s| (0..base.len()).all(|i| s & (1 << i) == 0 || below[i] & !s == 0))
            .collect()
    }

    fn compute_topology(&mut self) {
        let n = self.objects.len();
        let mut top: Vec<HashSet<u64>> = vec![HashSet::new(); n];
        for x in 0..n {
            top[x].insert((1u64 << self.into[x].len()) - 1);
        }
        for c in &self.covers {
            let s = self.sieve_of(c.target, &c.family);
            top[c.target].insert(s);
        }
        let sieves: Vec<Vec<u64>> = (0..n).map(|x| self.all_sieves(x)).collect();
        loop {
            let mut changed = false;
            for x in 0..n {
                let current: Vec<u64> = top[x].iter().copied().collect();
                for s in current {
                    for &f in &self.into[x] {
                        let y = self.mors[f].src;
                        if top[y].insert(self.pull_sieve(f, s)) {
                            changed = true;
                        }
                    }
                }
            }
            for x in 0..n {
                for &r in &sieves[x] {
                    if top[x].contains(&r) {
                        continue;
                    }
                    let local = top[x].iter().any(|&s| {
                        self.into[x].iter().enumerate().all(|(pos, &m)| {
                            s & (1 << pos) == 0 || top[self.mors[m].src].contains(&self.pull_sieve(m, r))
                        })
                    });
                    if local {
                        top[x].insert(r);
                        changed = true;
                    }
                }
            }
            if !changed {
                break;
            }
        }
        self.topology = top;
    }

    pub fn num_objects(&self) -> usize {
        self.objects.len()
    }

    pub fn num_morphisms(&self) -> usize {
        self.mors.len()
    }

    pub fn initial(&self) -> ObjId {
        self.initial
    }

    pub fn is_initial(&self, x: ObjId) -> bool {
        x == self.initial
    }

    pub fn noninitial_objects(&self) -> Vec<ObjId> {
        (0..self.objects.len()).filter(|&x| x != self.initial).collect()
    }

    pub fn object_name(&self, x: ObjId) -> &str {
        &self.objects[x]
    }

    pub fn morphism(&self, m: MorId) -> &Morphism {
        &self.mors[m]
    }

    pub fn morphism_name(&self, m: MorId) -> &str {
        &self.mors[m].name
    }

    pub fn object_id(&self, name: &str) -> Result<ObjId> {
        lookup(&self.obj_index, name, "object")
    }

    pub fn morphism_id(&self, name: &str) -> Result<MorId> {
        lookup(&self.mor_index, name, "morphism")
    }

    pub fn src(&self, m: MorId) -> ObjId {
        self.mors[m].src
    }

    pub fn dst(&self, m: MorId) -> ObjId {
        self.mors[m].dst
    }

    pub fn identity(&self, x: ObjId) -> MorId {
        self.identity[x]
    }

    pub fn from_initial(&self, x: ObjId) -> MorId {
        self.from_initial[x]
    }

    pub fn hom(&self, a: ObjId, b: ObjId) -> &[MorId] {
        self.hom.get(&(a, b)).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn morphisms_into(&self, x: ObjId) -> &[MorId] {
        &self.into[x]
    }

    pub fn declared_covers(&self) -> &[Cover] {
        &self.covers
    }

    /// `g ∘ f`; panics if the pair is not composable.
    pub fn compose(&self, g: MorId, f: MorId) -> MorId {
        *self
            .comp
            .get(&(g, f))
            .unwrap_or_else(|| panic!("`{}` and `{}` are not composable", self.mors[f].name, self.mors[g].name))
    }

    pub fn is_iso(&self, m: MorId) -> bool {
        self.inverse(m).is_some()
    }

    pub fn inverse(&self, m: MorId) -> Option<MorId> {
        let (a, b) = (self.mors[m].src, self.mors[m].dst);
        self.hom(b, a)
            .iter()
            .copied()
            .find(|&k| self.compose(k, m) == self.identity[a] && self.compose(m, k) == self.identity[b])
    }

    /// First morphism `src → dst` satisfying `pred`.
    pub fn find_morphism(&self, src: ObjId, dst: ObjId, pred: impl Fn(MorId) -> bool) -> Option<MorId> {
        self.hom(src, dst).iter().copied().find(|&m| pred(m))
    }

    pub fn pullback(&self, f: MorId, g: MorId) -> Result<Pullback> {
        if self.mors[f].dst != self.mors[g].dst {
            return Err(Error::Structural(format!(
                "`{}` and `{}` do not share a codomain",
                self.mors[f].name, self.mors[g].name
            )));
        }
        self.pullbacks.get(&(f, g)).copied().flatten().ok_or_else(|| {
            Error::PullbackMissing(format!("no pullback of `{}` and `{}`", self.mors[f].name, self.mors[g].name))
        })
    }

    /// Whether the family generates a covering sieve of `target`.
    pub fn is_covering(&self, target: ObjId, family: &[MorId]) -> bool {
        self.topology[target].contains(&self.sieve_of(target, family))
    }

    pub fn are_disjoint(&self, f: MorId, g: MorId) -> Result<bool> {
        Ok(self.pullback(f, g)?.apex == self.initial)
    }

    pub fn to_spec(&self) -> AssemblerSpec {
        let name = |m: MorId| self.mors[m].name.clone();
        let declared: HashSet<MorId> = self.declared_mors.iter().copied().collect();
        let mut composition = Vec::new();
        let mut keys: Vec<_> = self.comp.iter().filter(|((g, f), _)| declared.contains(g) && declared.contains(f)).collect();
        keys.sort();
        for (&(g, f), &h) in keys {
            composition.push([name(f), name(g), name(h)]);
        }
        AssemblerSpec {
            objects: self.objects.clone(),
            initial: self.objects[self.initial].clone(),
            morphisms: self
                .declared_mors
                .iter()
                .map(|&m| MorphismDecl {
                    id: name(m),
                    src: self.objects[self.mors[m].src].clone(),
                    dst: self.objects[self.mors[m].dst].clone(),
                })
                .collect(),
            composition,
            covers: self
                .covers
                .iter()
                .map(|c| CoverDecl {
                    target: self.objects[c.target].clone(),
                    family: c.family.iter().map(|&m| name(m)).collect(),
                })
                .collect(),
            pullbacks: self
                .declared_pullbacks
                .iter()
                .map(|d| PullbackDecl {
                    left: name(d.left),
                    right: name(d.right),
                    apex: self.objects[d.apex].clone(),
                    proj_left: d.square.map(|s| name(s.left)),
                    proj_right: d.square.map(|s| name(s.right)),
                })
                .collect(),
        }
    }

    fn resolved_pullback_decls(&self, keep: &dyn Fn(MorId) -> bool) -> Vec<(MorId, MorId, Pullback)> {
        let mut out: Vec<_> = self
            .pullbacks
            .iter()
            .filter_map(|(&(f, g), p)| p.map(|p| (f, g, p)))
            .filter(|&(f, g, _)| f <= g && keep(f) && keep(g))
            .collect();
        out.sort_by_key(|&(f, g, _)| (f, g));
        out
    }
}

fn mors_from(mors: &[Morphism], x: ObjId) -> Vec<MorId> {
    mors.iter().enumerate().filter(|(_, m)| m.src == x).map(|(i, _)| i).collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AxiomCheck {
    pub axiom: String,
    pub passed: bool,
    pub witnesses: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub checks: Vec<AxiomCheck>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, axiom: &str) -> Option<&AxiomCheck> {
        self.checks.iter().find(|c| c.axiom == axiom)
    }
}

fn axiom(name: &str, witnesses: Vec<String>) -> AxiomCheck {
    AxiomCheck { axiom: name.to_string(), passed: witnesses.is_empty(), witnesses }
}

pub const AXIOM_I: &str = "(I) initial object";
pub const AXIOM_P: &str = "(P) pullbacks";
pub const AXIOM_M: &str = "(M) monomorphisms";
pub const AXIOM_CAT: &str = "associativity and units";
pub const AXIOM_SITE: &str = "site closure";

pub fn validate_assembler(a: &Assembler) -> ValidationReport {
    let n = a.num_objects();
    let nm = |m: MorId| a.morphism_name(m).to_string();
    let on = |x: ObjId| a.object_name(x).to_string();

    let mut w_i = Vec::new();
    for x in 0..n {
        let h = a.hom(a.initial, x);
        if h.len() != 1 {
            w_i.push(format!("Hom({}, {}) has {} elements", on(a.initial), on(x), h.len()));
        }
    }
    if !a.is_covering(a.initial, &[]) {
        w_i.push(format!("the empty family does not cover {}", on(a.initial)));
    }

    let mut w_p = Vec::new();
    for d in &a.declared_pullbacks {
        let label = format!("{}×{} declared as {}", nm(d.left), nm(d.right), on(d.apex));
        let found = a.search_pullback(d.left, d.right);
        let found_txt = found.map(|p| on(p.apex)).unwrap_or_else(|| "no limit".into());
        match d.square {
            None => w_p.push(format!("{label}: no commuting square with that apex; cone search finds {found_txt}")),
            Some(sq) if !a.is_limit(d.left, d.right, &sq) => {
                w_p.push(format!("{label}: square is not a limit; cone search finds {found_txt}"))
            }
            _ => {}
        }
    }
    for c in 0..n {
        for &f in a.morphisms_into(c) {
            for &g in a.morphisms_into(c) {
                if f <= g && a.pullbacks.get(&(f, g)).copied().flatten().is_none() {
                    w_p.push(format!("no pullback of {} and {}", nm(f), nm(g)));
                }
            }
        }
    }

    let mut w_m = Vec::new();
    for f in 0..a.num_morphisms() {
        let b = a.src(f);
        for x in 0..n {
            let hs = a.hom(x, b);
            for (i, &h) in hs.iter().enumerate() {
                for &k in &hs[i + 1..] {
                    if a.compose(f, h) == a.compose(f, k) {
                        w_m.push(format!("{}∘{} = {}∘{}", nm(f), nm(h), nm(f), nm(k)));
                    }
                }
            }
        }
    }

    let mut w_c = Vec::new();
    for f in 0..a.num_morphisms() {
        if a.compose(a.identity(a.dst(f)), f) != f || a.compose(f, a.identity(a.src(f))) != f {
            w_c.push(format!("identity law fails at {}", nm(f)));
        }
        for g in mors_from(&a.mors, a.dst(f)) {
            for h in mors_from(&a.mors, a.dst(g)) {
                if a.compose(h, a.compose(g, f)) != a.compose(a.compose(h, g), f) {
                    w_c.push(format!("({}∘{})∘{} ≠ {}∘({}∘{})", nm(h), nm(g), nm(f), nm(h), nm(g), nm(f)));
                }
            }
        }
    }

    let mut w_s = Vec::new();
    for x in 0..n {
        if !a.is_covering(x, &[a.identity(x)]) {
            w_s.push(format!("{{id}} does not cover {}", on(x)));
        }
    }
    for c in &a.covers {
        for &g in a.morphisms_into(c.target) {
            let y = a.src(g);
            let mut pulled = Vec::new();
            let mut ok = true;
            for &f in &c.family {
                match a.pullbacks.get(&(g, f)).copied().flatten() {
                    Some(p) => pulled.push(p.left),
                    None => ok = false,
                }
            }
            if ok && !a.is_covering(y, &pulled) {
                w_s.push(format!("pullback of the cover of {} along {} does not cover {}", on(c.target), nm(g), on(y)));
            }
        }
        let options: Vec<Vec<Vec<MorId>>> = c
            .family
            .iter()
            .map(|&f| {
                let s = a.src(f);
                let mut opts = vec![vec![a.identity(s)]];
                opts.extend(a.covers.iter().filter(|d| d.target == s).map(|d| d.family.clone()));
                opts
            })
            .collect();
        for choice in product_indices(&options.iter().map(Vec::len).collect::<Vec<_>>()) {
            let refined: Vec<MorId> = c
                .family
                .iter()
                .zip(&choice)
                .enumerate()
                .flat_map(|(i, (&f, &k))| options[i][k].iter().map(move |&m| (f, m)).collect::<Vec<_>>())
                .map(|(f, m)| a.compose(f, m))
                .collect();
            if !a.is_covering(c.target, &refined) {
                w_s.push(format!("a refinement of the cover of {} is not a cover", on(c.target)));
            }
        }
    }

    ValidationReport {
        checks: vec![
            axiom(AXIOM_I, w_i),
            axiom(AXIOM_P, w_p),
            axiom(AXIOM_M, w_m),
            axiom(AXIOM_CAT, w_c),
            axiom(AXIOM_SITE, w_s),
        ],
    }
}

/// Every tuple `t` with `t[i] < sizes[i]`, in lexicographic order.
pub(crate) fn product_indices(sizes: &[usize]) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for &s in sizes {
        let mut next = Vec::with_capacity(out.len() * s);
        for prefix in &out {
            for k in 0..s {
                let mut t = prefix.clone();
                t.push(k);
                next.push(t);
            }
        }
        out = next;
    }
    out
}

/// Subsets of `0..n` with at most `max` elements, smallest first.
pub(crate) fn small_subsets(n: usize, max: usize) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = vec![Vec::new()];
    let mut frontier = vec![Vec::new()];
    for _ in 0..max {
        let mut next = Vec::new();
        for s in &frontier {
            let start = s.last().map(|&l: &usize| l + 1).unwrap_or(0);
            for i in start..n {
                let mut t = s.clone();
                t.push(i);
                next.push(t);
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

/// Condition (G): no noninitial object is covered by the empty family, and a
/// family is covering whenever one of its refinements by covering families is.
pub fn check_condition_g(a: &Assembler) -> bool {
    for x in a.noninitial_objects() {
        if a.is_covering(x, &[]) {
            return false;
        }
    }
    for x in a.noninitial_objects() {
        let candidates: Vec<MorId> =
            a.morphisms_into(x).iter().copied().filter(|&m| !a.is_initial(a.src(m))).collect();
        for subset in small_subsets(candidates.len(), 3) {
            let family: Vec<MorId> = subset.iter().map(|&i| candidates[i]).collect();
            if a.is_covering(x, &family) {
                continue;
            }
            let options: Vec<Vec<Vec<MorId>>> = family
                .iter()
                .map(|&f| {
                    let s = a.src(f);
                    let mut opts = vec![vec![a.identity(s)]];
                    opts.extend(a.covers.iter().filter(|d| d.target == s).map(|d| d.family.clone()));
                    opts
                })
                .collect();
            for choice in product_indices(&options.iter().map(Vec::len).collect::<Vec<_>>()) {
                let refined: Vec<MorId> = family
                    .iter()
                    .zip(&choice)
                    .enumerate()
                    .flat_map(|(i, (&f, &k))| options[i][k].iter().map(|&m| a.compose(f, m)).collect::<Vec<_>>())
                    .collect();
                if a.is_covering(x, &refined) {
                    return false;
                }
            }
        }
    }
    true
}

/// A functor between assemblers given on ids.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AssemblerMorphism {
    pub obj_map: Vec<ObjId>,
    pub mor_map: Vec<MorId>,
}

/// JSON form of a morphism of assemblers; identities and maps out of the
/// initial object are mapped automatically.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AssemblerMorphismSpec {
    pub objects: BTreeMap<String, String>,
    #[serde(default)]
    pub morphisms: BTreeMap<String, String>,
}

impl AssemblerMorphism {
    pub fn from_spec(spec: &AssemblerMorphismSpec, source: &Assembler, target: &Assembler) -> Result<Self> {
        let mut obj_map = vec![usize::MAX; source.num_objects()];
        obj_map[source.initial()] = target.initial();
        for (s, t) in &spec.objects {
            obj_map[source.object_id(s)?] = target.object_id(t)?;
        }
        if let Some(x) = obj_map.iter().position(|&o| o == usize::MAX) {
            return Err(Error::Structural(format!("object `{}` is not mapped", source.object_name(x))));
        }
        let mut mor_map = vec![usize::MAX; source.num_morphisms()];
        for x in 0..source.num_objects() {
            mor_map[source.identity(x)] = target.identity(obj_map[x]);
            mor_map[source.from_initial(x)] = target.from_initial(obj_map[x]);
        }
        for (s, t) in &spec.morphisms {
            mor_map[source.morphism_id(s)?] = target.morphism_id(t)?;
        }
        if let Some(m) = mor_map.iter().position(|&o| o == usize::MAX) {
            return Err(Error::Structural(format!("morphism `{}` is not mapped", source.morphism_name(m))));
        }
        Ok(AssemblerMorphism { obj_map, mor_map })
    }

    pub fn obj(&self, x: ObjId) -> ObjId {
        self.obj_map[x]
    }

    pub fn mor(&self, m: MorId) -> MorId {
        self.mor_map[m]
    }

    pub fn then(&self, next: &AssemblerMorphism) -> AssemblerMorphism {
        AssemblerMorphism {
            obj_map: self.obj_map.iter().map(|&x| next.obj(x)).collect(),
            mor_map: self.mor_map.iter().map(|&m| next.mor(m)).collect(),
        }
    }

    /// Injective on objects and morphisms.
    pub fn is_inclusion(&self) -> bool {
        let objs: HashSet<_> = self.obj_map.iter().collect();
        let mors: HashSet<_> = self.mor_map.iter().collect();
        objs.len() == self.obj_map.len() && mors.len() == self.mor_map.len()
    }

    /// Failures of functoriality, initial-object, pullback and cover preservation.
    pub fn check(&self, source: &Assembler, target: &Assembler) -> Vec<String> {
        let mut out = Vec::new();
        if self.obj(source.initial()) != target.initial() {
            out.push("initial object is not preserved".to_string());
        }
        for m in 0..source.num_morphisms() {
            let fm = self.mor(m);
            if target.src(fm) != self.obj(source.src(m)) || target.dst(fm) != self.obj(source.dst(m)) {
                out.push(format!("`{}` is sent to a morphism of the wrong type", source.morphism_name(m)));
            }
        }
        if !out.is_empty() {
            return out;
        }
        for (&(g, f), &h) in &source.comp {
            if target.compose(self.mor(g), self.mor(f)) != self.mor(h) {
                out.push(format!(
                    "composite of `{}` then `{}` is not preserved",
                    source.morphism_name(f),
                    source.morphism_name(g)
                ));
            }
        }
        for (&(f, g), p) in &source.pullbacks {
            if let Some(p) = p {
                let image = Pullback { apex: self.obj(p.apex), left: self.mor(p.left), right: self.mor(p.right) };
                if !target.is_limit(self.mor(f), self.mor(g), &image) {
                    out.push(format!(
                        "pullback of `{}` and `{}` is not preserved",
                        source.morphism_name(f),
                        source.morphism_name(g)
                    ));
                }
            }
        }
        for c in &source.covers {
            let fam: Vec<MorId> = c.family.iter().map(|&m| self.mor(m)).collect();
            if !target.is_covering(self.obj(c.target), &fam) {
                out.push(format!("the cover of `{}` is not sent to a cover", source.object_name(c.target)));
            }
        }
        out.sort();
        out.dedup();
        out
    }
}

/// A wedge together with the embedding of each summand.
#[derive(Clone, Debug)]
pub struct Wedge {
    pub assembler: Assembler,
    pub embeddings: Vec<AssemblerMorphism>,
}

/// Wedge of assemblers; summand `k` has its object names suffixed by `suffixes[k]`.
pub fn wedge_with_suffixes(parts: &[&Assembler], suffixes: &[String]) -> Result<Wedge> {
    let initial = parts.first().map(|p| p.object_name(p.initial()).to_string()).unwrap_or_else(|| "0".into());
    let mut spec = AssemblerSpec {
        objects: vec![initial.clone()],
        initial: initial.clone(),
        morphisms: Vec::new(),
        composition: Vec::new(),
        covers: vec![CoverDecl { target: initial.clone(), family: Vec::new() }],
        pullbacks: Vec::new(),
    };
    let mut obj_names: Vec<Vec<String>> = Vec::new();
    let mut mor_names: Vec<Vec<String>> = Vec::new();
    for (part, suffix) in parts.iter().zip(suffixes) {
        let on: Vec<String> = (0..part.num_objects())
            .map(|x| {
                if part.is_initial(x) {
                    initial.clone()
                } else {
                    format!("{}{}", part.object_name(x), suffix)
                }
            })
            .collect();
        let mn: Vec<String> = (0..part.num_morphisms())
            .map(|m| {
                let (s, d) = (part.src(m), part.dst(m));
                if m == part.identity(s) {
                    format!("id_{}", on[s])
                } else if part.is_initial(s) {
                    format!("init_{}", on[d])
                } else {
                    format!("{}{}", part.morphism_name(m), suffix)
                }
            })
            .collect();
        for x in part.noninitial_objects() {
            spec.objects.push(on[x].clone());
        }
        for &m in &part.declared_mors {
            spec.morphisms.push(MorphismDecl { id: mn[m].clone(), src: on[part.src(m)].clone(), dst: on[part.dst(m)].clone() });
        }
        let declared: HashSet<MorId> = part.declared_mors.iter().copied().collect();
        let mut comps: Vec<_> = part.comp.iter().filter(|((g, f), _)| declared.contains(g) && declared.contains(f)).collect();
        comps.sort();
        for (&(g, f), &h) in comps {
            spec.composition.push([mn[f].clone(), mn[g].clone(), mn[h].clone()]);
        }
        for c in &part.covers {
            if part.is_initial(c.target) {
                continue;
            }
            spec.covers.push(CoverDecl { target: on[c.target].clone(), family: c.family.iter().map(|&m| mn[m].clone()).collect() });
        }
        for (f, g, p) in part.resolved_pullback_decls(&|m| !part.is_initial(part.src(m))) {
            spec.pullbacks.push(PullbackDecl {
                left: mn[f].clone(),
                right: mn[g].clone(),
                apex: on[p.apex].clone(),
                proj_left: Some(mn[p.left].clone()),
                proj_right: Some(mn[p.right].clone()),
            });
        }
        obj_names.push(on);
        mor_names.push(mn);
    }
    let assembler = Assembler::from_spec(&spec)?;
    let mut embeddings = Vec::new();
    for (on, mn) in obj_names.iter().zip(&mor_names) {
        embeddings.push(AssemblerMorphism {
            obj_map: on.iter().map(|s| assembler.object_id(s)).collect::<Result<_>>()?,
            mor_map: mn.iter().map(|s| assembler.morphism_id(s)).collect::<Result<_>>()?,
        });
    }
    Ok(Wedge { assembler, embeddings })
}

/// Wedge of assemblers with summand `k` suffixed by `@k` (1-based).
pub fn wedge_assembler(parts: &[&Assembler]) -> Result<Assembler> {
    let suffixes: Vec<String> = (1..=parts.len()).map(|k| format!("@{k}")).collect();
    Ok(wedge_with_suffixes(parts, &suffixes)?.assembler)
}

/// Which summand of a cofiber level an object or morphism lives in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Part {
    Initial,
    Base(ObjId),
    /// `(copy, object of D)`, copies numbered from 1.
    Sub(usize, ObjId),
}

/// Levels 0..=2 of the cofiber construction for `F: D → C`:
/// level `n` is `C ∨ D ∨ … ∨ D` with `n` copies of `D`.
#[derive(Clone, Debug)]
pub struct SimplicialLevels {
    pub base: Assembler,
    pub sub: Assembler,
    pub map: AssemblerMorphism,
    pub levels: Vec<Assembler>,
    /// `faces[n - 1][i]` is `d_i` from level `n` to level `n - 1`.
    pub faces: Vec<Vec<AssemblerMorphism>>,
    /// `degeneracies[n][i]` is `s_i` from level `n` to level `n + 1`.
    pub degeneracies: Vec<Vec<AssemblerMorphism>>,
    parts: Vec<Vec<Part>>,
    embeddings: Vec<Vec<AssemblerMorphism>>,
}

impl SimplicialLevels {
    pub fn level(&self, n: usize) -> &Assembler {
        &self.levels[n]
    }

    pub fn face(&self, n: usize, i: usize) -> &AssemblerMorphism {
        &self.faces[n - 1][i]
    }

    pub fn degeneracy(&self, n: usize, i: usize) -> &AssemblerMorphism {
        &self.degeneracies[n][i]
    }

    pub fn part(&self, level: usize, x: ObjId) -> Part {
        self.parts[level][x]
    }

    /// Object of level `n` for copy `copy` (0 = base) of an object.
    pub fn embed(&self, level: usize, copy: usize, x: ObjId) -> ObjId {
        self.embeddings[level][copy].obj(x)
    }

    pub fn embed_mor(&self, level: usize, copy: usize, m: MorId) -> MorId {
        self.embeddings[level][copy].mor(m)
    }
}

fn copy_under_face(n: usize, j: usize, i: usize) -> usize {
    if i >= n + 1 - j {
        j - 1
    } else {
        j
    }
}

fn copy_under_degeneracy(n: usize, j: usize, i: usize) -> usize {
    if i >= n + 1 - j {
        j + 1
    } else {
        j
    }
}

pub fn cofiber_assembler(base: &Assembler, sub: &Assembler, map: &AssemblerMorphism) -> Result<SimplicialLevels> {
    let problems = map.check(sub, base);
    if !problems.is_empty() {
        return Err(Error::Input(format!("F is not a morphism of assemblers: {}", problems.join("; "))));
    }
    let mut levels = Vec::new();
    let mut embeddings = Vec::new();
    for n in 0..=2 {
        let mut parts: Vec<&Assembler> = vec![base];
        let mut suffixes = vec![String::new()];
        for j in 1..=n {
            parts.push(sub);
            suffixes.push(format!("@{j}"));
        }
        let w = wedge_with_suffixes(&parts, &suffixes)?;
        levels.push(w.assembler);
        embeddings.push(w.embeddings);
    }

    let mut part_tables = Vec::new();
    for n in 0..=2 {
        let mut table = vec![Part::Initial; levels[n].num_objects()];
        for x in base.noninitial_objects() {
            table[embeddings[n][0].obj(x)] = Part::Base(x);
        }
        for j in 1..=n {
            for x in sub.noninitial_objects() {
                table[embeddings[n][j].obj(x)] = Part::Sub(j, x);
            }
        }
        part_tables.push(table);
    }

    // Builds the functor from level `n` to level `m` given where each copy of D goes.
    let build = |n: usize, m: usize, dest: &dyn Fn(usize) -> usize| -> AssemblerMorphism {
        let src = &levels[n];
        let dst = &levels[m];
        let mut obj_map = vec![dst.initial(); src.num_objects()];
        let mut mor_map = vec![0; src.num_morphisms()];
        for x in 0..base.num_objects() {
            obj_map[embeddings[n][0].obj(x)] = embeddings[m][0].obj(x);
        }
        for mm in 0..base.num_morphisms() {
            mor_map[embeddings[n][0].mor(mm)] = embeddings[m][0].mor(mm);
        }
        for j in 1..=n {
            let k = dest(j);
            for x in 0..sub.num_objects() {
                let target = if k == 0 {
                    dst.initial()
                } else if k > m {
                    embeddings[m][0].obj(map.obj(x))
                } else {
                    embeddings[m][k].obj(x)
                };
                obj_map[embeddings[n][j].obj(x)] = target;
            }
            for mm in 0..sub.num_morphisms() {
                let target = if k == 0 {
                    dst.identity(dst.initial())
                } else if k > m {
                    embeddings[m][0].mor(map.mor(mm))
                } else {
                    embeddings[m][k].mor(mm)
                };
                let id = embeddings[n][j].mor(mm);
                if sub.is_initial(sub.src(mm)) && k != 0 {
                    mor_map[id] = dst.from_initial(obj_map[embeddings[n][j].obj(sub.dst(mm))]);
                } else {
                    mor_map[id] = target;
                }
            }
        }
        for x in 0..src.num_objects() {
            mor_map[src.from_initial(x)] = dst.from_initial(obj_map[x]);
            mor_map[src.identity(x)] = dst.identity(obj_map[x]);
        }
        AssemblerMorphism { obj_map, mor_map }
    };

    let mut faces = Vec::new();
    for n in 1..=2 {
        let mut row = Vec::new();
        for i in 0..=n {
            row.push(build(n, n - 1, &|j| copy_under_face(n, j, i)));
        }
        faces.push(row);
    }
    let mut degeneracies = Vec::new();
    for n in 0..=1 {
        let mut row = Vec::new();
        for i in 0..=n {
            row.push(build(n, n + 1, &|j| copy_under_degeneracy(n, j, i)));
        }
        degeneracies.push(row);
    }

    let levels = SimplicialLevels {
        base: base.clone(),
        sub: sub.clone(),
        map: map.clone(),
        levels,
        faces,
        degeneracies,
        parts: part_tables,
        embeddings,
    };
    let failures = check_simplicial_identities(&levels);
    if !failures.is_empty() {
        return Err(Error::Inconsistent(format!("simplicial identities fail: {}", failures.join("; "))));
    }
    for n in 1..=2 {
        for i in 0..=n {
            let p = levels.face(n, i).check(levels.level(n), levels.level(n - 1));
            if !p.is_empty() {
                return Err(Error::Inconsistent(format!("d_{i} on level {n}: {}", p.join("; "))));
            }
        }
    }
    for n in 0..=1 {
        for i in 0..=n {
            let p = levels.degeneracy(n, i).check(levels.level(n), levels.level(n + 1));
            if !p.is_empty() {
                return Err(Error::Inconsistent(format!("s_{i} on level {n}: {}", p.join("; "))));
            }
        }
    }
    Ok(levels)
}

/// Failures of the simplicial identities on levels ≤ 2, checked on every
/// object and morphism.
pub fn check_simplicial_identities(s: &SimplicialLevels) -> Vec<String> {
    let mut out = Vec::new();
    let eq = |a: &AssemblerMorphism, b: &AssemblerMorphism, what: String, out: &mut Vec<String>| {
        if a != b {
            out.push(what);
        }
    };
    for i in 0..2 {
        for j in (i + 1)..=2 {
            let lhs = s.face(2, j).then(s.face(1, i));
            let rhs = s.face(2, i).then(s.face(1, j - 1));
            eq(&lhs, &rhs, format!("d_{i} d_{j} = d_{} d_{i}", j - 1), &mut out);
        }
    }
    let id0 = AssemblerMorphism {
        obj_map: (0..s.level(0).num_objects()).collect(),
        mor_map: (0..s.level(0).num_morphisms()).collect(),
    };
    let id1 = AssemblerMorphism {
        obj_map: (0..s.level(1).num_objects()).collect(),
        mor_map: (0..s.level(1).num_morphisms()).collect(),
    };
    for i in 0..=1 {
        eq(&s.degeneracy(0, 0).then(s.face(1, i)), &id0, format!("d_{i} s_0 = 1 on level 0"), &mut out);
    }
    for i in 0..=2 {
        for j in 0..=1 {
            let lhs = s.degeneracy(1, j).then(s.face(2, i));
            let rhs = if i < j {
                s.face(1, i).then(s.degeneracy(0, j - 1))
            } else if i == j || i == j + 1 {
                id1.clone()
            } else {
                s.face(1, i - 1).then(s.degeneracy(0, j))
            };
            eq(&lhs, &rhs, format!("d_{i} s_{j} on level 1"), &mut out);
        }
    }
    out
}
