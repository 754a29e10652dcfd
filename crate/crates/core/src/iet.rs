//! Interval exchange transformations with endpoints in a finite-dimensional
//! ℚ-subspace of ℝ, and the invariant into `ℝ ∧_ℚ ℝ`.
//!
//! Reals are rational coordinate vectors over a declared basis. The basis is
//! assumed ℚ-linearly independent; its decimal approximations are only used
//! to order elements.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};

pub const DEFAULT_PRECISION: usize = 64;

/// Significant digits used to order reals, from `SCK1_PRECISION`.
pub fn precision_from_env() -> usize {
    std::env::var("SCK1_PRECISION").ok().and_then(|s| s.parse().ok()).filter(|&p| p > 0).unwrap_or(DEFAULT_PRECISION)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BasisElement {
    pub label: String,
    pub approx_decimal: String,
}

/// Rational enclosure `[lo, hi]` of a basis element.
#[derive(Clone, Debug, PartialEq, Eq)]
struct Enclosure {
    lo: BigRational,
    hi: BigRational,
}

fn parse_decimal(s: &str, digits: usize) -> Result<Enclosure> {
    let t = s.trim();
    let (neg, body) = match t.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, t),
    };
    let (int, frac) = body.split_once('.').unwrap_or((body, ""));
    if int.is_empty() && frac.is_empty() || !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return Err(Error::Input(format!("`{s}` is not a decimal")));
    }
    let all: String = format!("{int}{frac}");
    let lead = all.chars().take_while(|&c| c == '0').count();
    let significant = all.len() - lead;
    // Short decimals are taken as exact; long ones are truncated to `digits` significant digits.
    let (kept_frac, truncated) = if significant <= digits {
        (frac.to_string(), false)
    } else {
        let keep_total = lead + digits;
        if keep_total <= int.len() {
            (String::new(), true)
        } else {
            (frac[..keep_total - int.len()].to_string(), true)
        }
    };
    let int_digits = if truncated && lead + digits < int.len() {
        let keep = lead + digits;
        format!("{}{}", &int[..keep], "0".repeat(int.len() - keep))
    } else {
        int.to_string()
    };
    let scale = BigInt::from(10).pow(kept_frac.len() as u32);
    let numer: BigInt = format!("{}{}", if int_digits.is_empty() { "0" } else { &int_digits }, kept_frac)
        .parse()
        .map_err(|_| Error::Input(format!("`{s}` is not a decimal")))?;
    let value = BigRational::new(numer, scale.clone());
    let ulp = if truncated {
        let pos = (lead + digits) as i64 - int.len() as i64;
        if pos >= 0 {
            BigRational::new(BigInt::one(), BigInt::from(10).pow(pos as u32))
        } else {
            BigRational::from_integer(BigInt::from(10).pow((-pos) as u32))
        }
    } else {
        BigRational::zero()
    };
    let (lo, hi) = (value.clone(), value + ulp);
    Ok(if neg { Enclosure { lo: -hi, hi: -lo } } else { Enclosure { lo, hi } })
}

/// A declared ℚ-basis of a subspace of ℝ.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Basis {
    pub elements: Vec<BasisElement>,
    pub digits: usize,
    enclosures: Vec<Enclosure>,
}

impl Basis {
    pub fn new(elements: Vec<BasisElement>, digits: usize) -> Result<Self> {
        if elements.is_empty() {
            return Err(Error::Input("basis must not be empty".into()));
        }
        let enclosures = elements.iter().map(|e| parse_decimal(&e.approx_decimal, digits)).collect::<Result<_>>()?;
        Ok(Basis { elements, digits, enclosures })
    }

    /// The basis `{1, √2}`.
    pub fn sqrt2() -> Self {
        Basis::new(
            vec![
                BasisElement { label: "1".into(), approx_decimal: "1".into() },
                BasisElement {
                    label: "√2".into(),
                    approx_decimal: "1.41421356237309504880168872420969807856967187537694807317667973799073248".into(),
                },
            ],
            precision_from_env(),
        )
        .expect("valid decimals")
    }

    pub fn rationals() -> Self {
        Basis::new(vec![BasisElement { label: "1".into(), approx_decimal: "1".into() }], precision_from_env())
            .expect("valid decimals")
    }

    pub fn dim(&self) -> usize {
        self.elements.len()
    }

    pub fn labels(&self) -> Vec<&str> {
        self.elements.iter().map(|e| e.label.as_str()).collect()
    }

    pub fn zero(&self) -> QLinearReal {
        QLinearReal { coords: vec![BigRational::zero(); self.dim()] }
    }

    /// `q · b_k`.
    pub fn scaled(&self, k: usize, q: BigRational) -> QLinearReal {
        let mut x = self.zero();
        x.coords[k] = q;
        x
    }

    pub fn sign(&self, x: &QLinearReal) -> Result<Ordering> {
        if x.is_zero() {
            return Ok(Ordering::Equal);
        }
        let (mut lo, mut hi) = (BigRational::zero(), BigRational::zero());
        for (q, e) in x.coords.iter().zip(&self.enclosures) {
            if q.is_negative() {
                lo += q * &e.hi;
                hi += q * &e.lo;
            } else {
                lo += q * &e.lo;
                hi += q * &e.hi;
            }
        }
        if lo.is_positive() {
            Ok(Ordering::Greater)
        } else if hi.is_negative() {
            Ok(Ordering::Less)
        } else {
            Err(Error::Precision { left: self.render(x), right: "0".into(), digits: self.digits })
        }
    }

    pub fn cmp(&self, a: &QLinearReal, b: &QLinearReal) -> Result<Ordering> {
        if a == b {
            return Ok(Ordering::Equal);
        }
        self.sign(&a.sub(b)).map_err(|e| match e {
            Error::Precision { digits, .. } => Error::Precision { left: self.render(a), right: self.render(b), digits },
            other => other,
        })
    }

    pub fn lt(&self, a: &QLinearReal, b: &QLinearReal) -> Result<bool> {
        Ok(self.cmp(a, b)? == Ordering::Less)
    }

    pub fn render(&self, x: &QLinearReal) -> String {
        let mut parts = Vec::new();
        for (q, e) in x.coords.iter().zip(&self.elements) {
            if q.is_zero() {
                continue;
            }
            let term = if e.label == "1" {
                q.to_string()
            } else if q.is_one() {
                e.label.clone()
            } else if *q == -BigRational::one() {
                format!("-{}", e.label)
            } else {
                format!("{q}·{}", e.label)
            };
            parts.push(term);
        }
        if parts.is_empty() {
            "0".into()
        } else {
            parts.join(" + ").replace("+ -", "- ")
        }
    }
}

/// A real number as rational coordinates over a [`Basis`].
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QLinearReal {
    pub coords: Vec<BigRational>,
}

impl QLinearReal {
    pub fn from_ints(v: &[i64]) -> Self {
        QLinearReal { coords: v.iter().map(|&x| BigRational::from_integer(BigInt::from(x))).collect() }
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(Zero::is_zero)
    }

    pub fn add(&self, o: &QLinearReal) -> QLinearReal {
        QLinearReal { coords: self.coords.iter().zip(&o.coords).map(|(a, b)| a + b).collect() }
    }

    pub fn sub(&self, o: &QLinearReal) -> QLinearReal {
        QLinearReal { coords: self.coords.iter().zip(&o.coords).map(|(a, b)| a - b).collect() }
    }

    pub fn neg(&self) -> QLinearReal {
        QLinearReal { coords: self.coords.iter().map(|a| -a).collect() }
    }

    pub fn scale(&self, q: &BigRational) -> QLinearReal {
        QLinearReal { coords: self.coords.iter().map(|a| a * q).collect() }
    }

    /// `self ∧ other` in coordinates on basis pairs `i < j`.
    pub fn wedge(&self, other: &QLinearReal) -> WedgeElement {
        let mut w = WedgeElement::zero();
        let n = self.coords.len();
        for i in 0..n {
            for j in (i + 1)..n {
                let c = &self.coords[i] * &other.coords[j] - &self.coords[j] * &other.coords[i];
                w.add_term(i, j, c);
            }
        }
        w
    }
}

/// An element of `Λ²_ℚ` of the basis span.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct WedgeElement {
    pub terms: BTreeMap<(usize, usize), BigRational>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WedgeTerm {
    pub pair: [String; 2],
    pub coefficient: String,
}

impl WedgeElement {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Adds `c · (b_i ∧ b_j)`, using antisymmetry when `i > j`.
    pub fn add_term(&mut self, i: usize, j: usize, c: BigRational) {
        let (key, c) = match i.cmp(&j) {
            Ordering::Less => ((i, j), c),
            Ordering::Greater => ((j, i), -c),
            Ordering::Equal => return,
        };
        let e = self.terms.entry(key).or_insert_with(BigRational::zero);
        *e += c;
        if e.is_zero() {
            self.terms.remove(&key);
        }
    }

    pub fn add(&self, o: &WedgeElement) -> WedgeElement {
        let mut out = self.clone();
        for (&(i, j), c) in &o.terms {
            out.add_term(i, j, c.clone());
        }
        out
    }

    pub fn neg(&self) -> WedgeElement {
        WedgeElement { terms: self.terms.iter().map(|(&k, c)| (k, -c)).collect() }
    }

    pub fn sub(&self, o: &WedgeElement) -> WedgeElement {
        self.add(&o.neg())
    }

    pub fn coefficient(&self, i: usize, j: usize) -> BigRational {
        let mut w = WedgeElement::zero();
        w.add_term(i, j, BigRational::one());
        let (&key, sign) = w.terms.iter().next().map(|(k, s)| (k, s.clone())).expect("i != j");
        self.terms.get(&key).map(|c| c * sign).unwrap_or_else(BigRational::zero)
    }

    pub fn render(&self, basis: &Basis) -> Vec<WedgeTerm> {
        self.terms
            .iter()
            .map(|(&(i, j), c)| WedgeTerm {
                pair: [basis.elements[i].label.clone(), basis.elements[j].label.clone()],
                coefficient: c.to_string(),
            })
            .collect()
    }
}

/// `Σ ε_i ∧ x_i` over a family of intervals given by their lengths.
pub fn saf_hat(lengths: &[QLinearReal], translations: &[QLinearReal]) -> WedgeElement {
    lengths.iter().zip(translations).fold(WedgeElement::zero(), |acc, (e, x)| acc.add(&e.wedge(x)))
}

/// Half-open interval `[lo, hi)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Interval {
    pub lo: QLinearReal,
    pub hi: QLinearReal,
}

impl Interval {
    pub fn length(&self) -> QLinearReal {
        self.hi.sub(&self.lo)
    }
}

/// Two families of translations out of a common family of intervals into a common target.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntervalPair {
    pub domain: Vec<Interval>,
    pub codomain: Vec<Interval>,
    pub first: Vec<QLinearReal>,
    pub second: Vec<QLinearReal>,
}

impl IntervalPair {
    /// `φ̂(first) − φ̂(second)`.
    pub fn saf(&self) -> WedgeElement {
        let lengths: Vec<QLinearReal> = self.domain.iter().map(Interval::length).collect();
        saf_hat(&lengths, &self.first).sub(&saf_hat(&lengths, &self.second))
    }
}

/// Breakpoints `0 = a₀ < ⋯ < a_n = L` and translations `x_i` of `[a_{i-1}, a_i)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Iet {
    pub basis: Basis,
    pub length: QLinearReal,
    pub breakpoints: Vec<QLinearReal>,
    pub translations: Vec<QLinearReal>,
}

impl Iet {
    pub fn identity(basis: &Basis, length: QLinearReal) -> Self {
        Iet { basis: basis.clone(), breakpoints: vec![basis.zero(), length.clone()], translations: vec![basis.zero()], length }
    }

    pub fn intervals(&self) -> Vec<Interval> {
        self.breakpoints.windows(2).map(|w| Interval { lo: w[0].clone(), hi: w[1].clone() }).collect()
    }

    pub fn images(&self) -> Vec<Interval> {
        self.intervals()
            .into_iter()
            .zip(&self.translations)
            .map(|(iv, x)| Interval { lo: iv.lo.add(x), hi: iv.hi.add(x) })
            .collect()
    }

    /// Indices of the intervals in order of their images.
    fn image_order(&self) -> Result<Vec<usize>> {
        let images = self.images();
        let mut order: Vec<usize> = (0..images.len()).collect();
        let mut err = None;
        order.sort_by(|&a, &b| {
            self.basis.cmp(&images[a].lo, &images[b].lo).unwrap_or_else(|e| {
                err.get_or_insert(e);
                Ordering::Equal
            })
        });
        match err {
            Some(e) => Err(e),
            None => Ok(order),
        }
    }

    fn check_shape(&self) -> Result<()> {
        let d = self.basis.dim();
        let n = self.translations.len();
        if n == 0 || self.breakpoints.len() != n + 1 {
            return Err(Error::Input(format!("{} breakpoints for {} translations", self.breakpoints.len(), n)));
        }
        let all = std::iter::once(&self.length).chain(&self.breakpoints).chain(&self.translations);
        if all.into_iter().any(|x| x.coords.len() != d) {
            return Err(Error::Input(format!("coordinates must have {d} entries")));
        }
        Ok(())
    }

    /// True iff the breakpoints increase from 0 to `L` and the images tile `[0, L)`.
    pub fn validate(&self) -> Result<bool> {
        self.check_shape()?;
        let zero = self.basis.zero();
        if self.breakpoints[0] != zero || *self.breakpoints.last().unwrap() != self.length {
            return Ok(false);
        }
        for w in self.breakpoints.windows(2) {
            if !self.basis.lt(&w[0], &w[1])? {
                return Ok(false);
            }
        }
        let images = self.images();
        let mut at = zero;
        for k in self.image_order()? {
            if images[k].lo != at {
                return Ok(false);
            }
            at = images[k].hi.clone();
        }
        Ok(at == self.length)
    }

    pub fn require_valid(&self) -> Result<()> {
        if self.validate()? {
            Ok(())
        } else {
            Err(Error::Input("images of the intervals do not tile [0, L)".into()))
        }
    }

    /// `t(p)` for `p ∈ [0, L)`.
    pub fn apply(&self, p: &QLinearReal) -> Result<QLinearReal> {
        for (iv, x) in self.intervals().iter().zip(&self.translations) {
            if !self.basis.lt(p, &iv.lo)? && self.basis.lt(p, &iv.hi)? {
                return Ok(p.add(x));
            }
        }
        Err(Error::Precondition(format!("{} is outside [0, L)", self.basis.render(p))))
    }

    /// Joins neighbouring intervals that share a translation.
    pub fn merged(&self) -> Iet {
        let mut breakpoints = vec![self.breakpoints[0].clone()];
        let mut translations: Vec<QLinearReal> = Vec::new();
        for (k, x) in self.translations.iter().enumerate() {
            if translations.last() == Some(x) {
                *breakpoints.last_mut().unwrap() = self.breakpoints[k + 1].clone();
            } else {
                translations.push(x.clone());
                breakpoints.push(self.breakpoints[k + 1].clone());
            }
        }
        Iet { basis: self.basis.clone(), length: self.length.clone(), breakpoints, translations }
    }

    pub fn inverse(&self) -> Result<Iet> {
        let images = self.images();
        let order = self.image_order()?;
        let mut breakpoints = vec![self.basis.zero()];
        breakpoints.extend(order.iter().map(|&k| images[k].hi.clone()));
        Ok(Iet {
            basis: self.basis.clone(),
            length: self.length.clone(),
            breakpoints,
            translations: order.iter().map(|&k| self.translations[k].neg()).collect(),
        })
    }

    /// `(domain cuts, codomain cuts)`: interior points where the map, resp. its inverse,
    /// is discontinuous.
    pub fn cut_balance(&self) -> Result<(usize, usize)> {
        let m = self.merged();
        let domain = m.translations.windows(2).filter(|w| w[0] != w[1]).count();
        let order = m.image_order()?;
        let codomain = order.windows(2).filter(|w| m.translations[w[0]] != m.translations[w[1]]).count();
        Ok((domain, codomain))
    }

    /// `{∪, t}` from the intervals of `t` to `{[0, L)}`.
    pub fn psi(&self) -> IntervalPair {
        IntervalPair {
            domain: self.intervals(),
            codomain: vec![Interval { lo: self.basis.zero(), hi: self.length.clone() }],
            first: vec![self.basis.zero(); self.translations.len()],
            second: self.translations.clone(),
        }
    }

    pub fn saf(&self) -> WedgeElement {
        self.psi().saf()
    }

    /// Swap of `[0, α)` and `[α, 2α)`.
    pub fn swap(basis: &Basis, alpha: &QLinearReal) -> Iet {
        let two = alpha.add(alpha);
        Iet {
            basis: basis.clone(),
            length: two.clone(),
            breakpoints: vec![basis.zero(), alpha.clone(), two],
            translations: vec![alpha.clone(), alpha.neg()],
        }
    }
}

/// `{τ, 1}` from `{[0, α), [0, α)}` to `{[0, 2α)}` with `τ = (α, 0)` and `1 = (0, α)`.
pub fn tau_alpha(basis: &Basis, alpha: &QLinearReal) -> IntervalPair {
    let iv = Interval { lo: basis.zero(), hi: alpha.clone() };
    IntervalPair {
        domain: vec![iv.clone(), iv],
        codomain: vec![Interval { lo: basis.zero(), hi: alpha.add(alpha) }],
        first: vec![alpha.clone(), basis.zero()],
        second: vec![basis.zero(), alpha.clone()],
    }
}

/// `g ∘ h`: apply `h`, then `g`.
pub fn iet_compose(g: &Iet, h: &Iet) -> Result<Iet> {
    if g.basis != h.basis || g.length != h.length {
        return Err(Error::Input("IETs must share basis and length".into()));
    }
    g.require_valid()?;
    h.require_valid()?;
    let basis = &h.basis;
    let mut breakpoints = vec![basis.zero()];
    let mut translations = Vec::new();
    for (iv, x) in h.intervals().iter().zip(&h.translations) {
        let (lo, hi) = (iv.lo.add(x), iv.hi.add(x));
        let mut at = lo;
        for (giv, y) in g.intervals().iter().zip(&g.translations) {
            let start = if basis.lt(&at, &giv.lo)? { giv.lo.clone() } else { at.clone() };
            let end = if basis.lt(&hi, &giv.hi)? { hi.clone() } else { giv.hi.clone() };
            if !basis.lt(&start, &end)? || start != at {
                continue;
            }
            breakpoints.push(end.sub(x));
            translations.push(x.add(y));
            at = end;
        }
        if at != hi {
            return Err(Error::Inconsistent("refinement did not cover an interval".into()));
        }
    }
    Ok(Iet { basis: basis.clone(), length: h.length.clone(), breakpoints, translations }.merged())
}

// ----- JSON -----

fn parse_rational(v: &Value) -> Result<BigRational> {
    let bad = || Error::Input(format!("`{v}` is not an integer or a \"p/q\" string"));
    match v {
        Value::Number(n) => n.as_i64().map(|i| BigRational::from_integer(BigInt::from(i))).ok_or_else(bad),
        Value::String(s) => {
            let s = s.trim();
            match s.split_once('/') {
                Some((p, q)) => {
                    let p: BigInt = p.trim().parse().map_err(|_| bad())?;
                    let q: BigInt = q.trim().parse().map_err(|_| bad())?;
                    if q.is_zero() {
                        return Err(bad());
                    }
                    Ok(BigRational::new(p, q))
                }
                None => Ok(BigRational::from_integer(s.parse().map_err(|_| bad())?)),
            }
        }
        _ => Err(bad()),
    }
}

fn render_rational(q: &BigRational) -> Value {
    if q.is_integer() {
        if let Ok(i) = q.to_integer().to_string().parse::<i64>() {
            return Value::from(i);
        }
    }
    Value::String(q.to_string())
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IetFile {
    pub basis: Vec<BasisElement>,
    pub length: Vec<Value>,
    pub breakpoints: Vec<Vec<Value>>,
    pub translations: Vec<Vec<Value>>,
}

fn real(v: &[Value]) -> Result<QLinearReal> {
    Ok(QLinearReal { coords: v.iter().map(parse_rational).collect::<Result<_>>()? })
}

fn unreal(x: &QLinearReal) -> Vec<Value> {
    x.coords.iter().map(render_rational).collect()
}

impl Iet {
    /// Parses an IET file; shape is checked, tiling is not.
    pub fn from_file(f: &IetFile, digits: usize) -> Result<Iet> {
        let t = Iet {
            basis: Basis::new(f.basis.clone(), digits)?,
            length: real(&f.length)?,
            breakpoints: f.breakpoints.iter().map(|v| real(v)).collect::<Result<_>>()?,
            translations: f.translations.iter().map(|v| real(v)).collect::<Result<_>>()?,
        };
        t.check_shape()?;
        Ok(t)
    }

    pub fn from_json(text: &str) -> Result<Iet> {
        Iet::from_file(&serde_json::from_str(text)?, precision_from_env())
    }

    pub fn to_file(&self) -> IetFile {
        IetFile {
            basis: self.basis.elements.clone(),
            length: unreal(&self.length),
            breakpoints: self.breakpoints.iter().map(unreal).collect(),
            translations: self.translations.iter().map(unreal).collect(),
        }
    }
}

// ----- sampling -----

fn small_rational<R: Rng>(rng: &mut R, den: i64) -> BigRational {
    BigRational::new(BigInt::from(rng.gen_range(-den..=den)), BigInt::from(den))
}

/// A random valid IET on `[0, L)` with at most `max_intervals` pieces.
///
/// Breakpoints have small rational coordinates over every basis element.
pub fn random_iet<R: Rng>(basis: &Basis, length: &QLinearReal, max_intervals: usize, rng: &mut R) -> Result<Iet> {
    let n = rng.gen_range(1..=max_intervals.max(1));
    let mut cuts: Vec<QLinearReal> = Vec::new();
    let mut guard = 0;
    while cuts.len() + 1 < n && guard < 1000 {
        guard += 1;
        let p = QLinearReal { coords: (0..basis.dim()).map(|_| small_rational(rng, 12)).collect() };
        if basis.lt(&basis.zero(), &p)? && basis.lt(&p, length)? && !cuts.contains(&p) {
            cuts.push(p);
        }
    }
    let mut err = None;
    cuts.sort_by(|a, b| {
        basis.cmp(a, b).unwrap_or_else(|e| {
            err.get_or_insert(e);
            Ordering::Equal
        })
    });
    if let Some(e) = err {
        return Err(e);
    }
    let mut breakpoints = vec![basis.zero()];
    breakpoints.extend(cuts);
    breakpoints.push(length.clone());
    let lengths: Vec<QLinearReal> = breakpoints.windows(2).map(|w| w[1].sub(&w[0])).collect();
    let mut perm: Vec<usize> = (0..lengths.len()).collect();
    perm.shuffle(rng);
    // perm lists the intervals in image order.
    let mut translations = vec![basis.zero(); lengths.len()];
    let mut at = basis.zero();
    for &k in &perm {
        translations[k] = at.sub(&breakpoints[k]);
        at = at.add(&lengths[k]);
    }
    Ok(Iet { basis: basis.clone(), length: length.clone(), breakpoints, translations })
}
