//! Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any failure.

mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sck1_core::fixtures;
use sck1_core::iet::{iet_compose, random_iet, Basis, Iet, QLinearReal, WedgeElement};
use sck1_core::kgroups;
use sck1_core::snf;
use sck1_core::suites::{self, SuiteReport};

const SEED: u64 = 20;
/// Per-criterion wall-clock budget.
const BUDGET: Duration = Duration::from_secs(10);
/// All numeric comparisons are exact.
const TOLERANCE: i64 = 0;

/// `-Σ ε_i ∧ x_i` through the antisymmetric-matrix oracle.
fn oracle_saf(t: &Iet) -> WedgeElement {
    let pairs: Vec<_> =
        t.intervals().iter().zip(&t.translations).map(|(i, x)| (i.length().coords, x.coords.clone())).collect();
    let mut w = WedgeElement::zero();
    for ((i, j), c) in common::wedge_sum(&pairs, t.basis.dim()) {
        w.add_term(i, j, -c);
    }
    w
}

fn wedge_diff(a: &WedgeElement, b: &WedgeElement) -> BigRational {
    let d = a.sub(b);
    d.terms.values().map(|c| if c < &BigRational::from_integer(0.into()) { -c } else { c.clone() }).sum()
}

fn exact(a: &WedgeElement, b: &WedgeElement) -> bool {
    wedge_diff(a, b) <= BigRational::from_integer(TOLERANCE.into())
}

fn tick(r: &mut SuiteReport, ok: bool, what: impl FnOnce() -> String) {
    r.checked += 1;
    if !ok {
        r.failures.push(what());
    }
}

fn criterion1() -> Vec<SuiteReport> {
    let mut o = SuiteReport::new("anchor oracle");
    let t = Iet::from_json(fixtures::SWAP_EPS_DELTA).unwrap();
    let one = BigRational::from_integer(1.into());
    tick(&mut o, t.saf().coefficient(0, 1) == -one, || "coefficient on (1,√2) is not -1".into());
    tick(&mut o, exact(&t.saf(), &oracle_saf(&t)), || "oracle disagrees".into());
    vec![suites::saf_anchor(), o]
}

fn criterion2() -> Vec<SuiteReport> {
    vec![suites::saf_vanishing(SEED, 50)]
}

fn criterion3() -> Vec<SuiteReport> {
    let mut o = SuiteReport::new("homomorphism oracle");
    let b = Basis::sqrt2();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 100);
    let one = QLinearReal::from_ints(&[1, 0]);
    for _ in 0..100 {
        let g = random_iet(&b, &one, 4, &mut rng).unwrap();
        let h = random_iet(&b, &one, 4, &mut rng).unwrap();
        let gh = iet_compose(&g, &h).unwrap();
        tick(&mut o, exact(&oracle_saf(&gh), &oracle_saf(&g).add(&oracle_saf(&h))), || "oracle not additive".into());
        tick(&mut o, exact(&gh.saf(), &oracle_saf(&gh)), || "saf disagrees with oracle".into());
    }
    vec![suites::saf_homomorphism(SEED + 1, 100), o]
}

fn criterion4() -> Vec<SuiteReport> {
    let mut o = SuiteReport::new("Smith normal form oracle");
    for (name, site) in fixtures::sites() {
        let p = kgroups::k0(&site);
        if p.relations.len() <= 6 && p.generators.len() <= 6 {
            let want = common::invariant_factors(&p.relations, p.generators.len());
            tick(&mut o, p.smith.diagonal == want, || format!("{name}: {:?} vs {want:?}", p.smith.diagonal));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 200);
    for _ in 0..300 {
        let rows = rng.gen_range(1..=6);
        let cols = rng.gen_range(1..=6);
        let m: Vec<Vec<BigInt>> =
            (0..rows).map(|_| (0..cols).map(|_| BigInt::from(rng.gen_range(-6..=6))).collect()).collect();
        let s = snf::smith(&m, cols);
        let want = common::invariant_factors(&m, cols);
        tick(&mut o, s.diagonal == want, || format!("{m:?}: {:?} vs {want:?}", s.diagonal));
    }
    vec![suites::k0_examples(), o]
}

fn criterion5() -> Vec<SuiteReport> {
    let mut out = Vec::new();
    for (name, site) in fixtures::sites() {
        out.push(suites::subcomposition(name, &site, 2));
        out.push(suites::dependent_products(name, &site, 2));
    }
    out
}

fn criterion6() -> Vec<SuiteReport> {
    fixtures::sites().into_iter().map(|(name, site)| suites::saturation(name, &site, 2)).collect()
}

fn criterion7() -> Vec<SuiteReport> {
    let mut out = Vec::new();
    for (name, ctx) in suites::cofiber_contexts() {
        out.push(suites::translation_round_trip(name, &ctx, 2));
        out.push(suites::normalize_idempotent(name, &ctx, SEED + 2, 200));
        out.push(suites::rule_shadows(name, &ctx, SEED + 3, 500));
    }
    out
}

fn criterion8() -> Vec<SuiteReport> {
    let mut out = Vec::new();
    for (name, ctx) in suites::cofiber_contexts() {
        out.push(suites::canonical_pairs(name, &ctx, SEED + 4, 50));
        out.push(suites::k1_relations(name, &ctx, SEED + 5, 20));
    }
    out
}

fn criterion9() -> Vec<SuiteReport> {
    let mut out: Vec<_> =
        suites::cofiber_contexts().iter().map(|(name, ctx)| suites::boundary_suite(name, ctx, SEED + 6, 20)).collect();
    out.push(suites::cut_balance(SEED + 7, 100));
    out
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Vec<SuiteReport>); 9] = [
        ("saf anchor", criterion1),
        ("saf vanishing", criterion2),
        ("saf homomorphism", criterion3),
        ("K0 and Smith normal form", criterion4),
        ("twist lemmas", criterion5),
        ("saturation", criterion6),
        ("translation round trip and rewriting", criterion7),
        ("canonical K1 pairs", criterion8),
        ("boundary and cut balance", criterion9),
    ];
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let reports = run();
        let elapsed = start.elapsed();
        let checked: usize = reports.iter().map(|r| r.checked).sum();
        let ok = reports.iter().all(|r| r.passed()) && elapsed <= BUDGET;
        println!(
            "{} criterion {}: {name} ({checked} checks, {:.2}s)",
            if ok { "PASS" } else { "FAIL" },
            k + 1,
            elapsed.as_secs_f64()
        );
        if !ok {
            failed += 1;
            if elapsed > BUDGET {
                println!("    over the {}s budget", BUDGET.as_secs());
            }
            for r in reports.iter().filter(|r| !r.passed()) {
                println!("    {}: {} of {} failed", r.name, r.failures.len(), r.checked);
                for f in r.failures.iter().take(3) {
                    println!("      {f}");
                }
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
