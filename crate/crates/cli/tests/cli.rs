use std::path::PathBuf;
use std::process::{Command, Output};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sck1_core::fixtures;
use sck1_core::iet::{iet_compose, Iet};
use sck1_core::kgroups::{self, K1Pair, RelativeK1Quad};
use sck1_core::sqm::{SqmContext, SqmWord};
use serde_json::Value;

fn sck1(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sck1")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn fixture(name: &str) -> String {
    format!("{}/../core/fixtures/{name}.json", env!("CARGO_MANIFEST_DIR"))
}

fn scratch(name: &str, contents: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("sck1-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, contents).unwrap();
    p
}

fn ctx() -> SqmContext {
    SqmContext::new(fixtures::cofiber_double_cover())
}

fn some_pair(ctx: &SqmContext, seed: u64) -> K1Pair {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        if let Some(p) = kgroups::random_pair(ctx, &mut rng) {
            return p;
        }
    }
}

#[test]
fn validate_exit_codes() {
    assert_eq!(sck1(&["validate", &fixture("halfsplit")]).status.code(), Some(0));
    assert_eq!(sck1(&["validate", "--fixture", "halfsplit_bad_pullback"]).status.code(), Some(1));
    assert_eq!(sck1(&["validate", "--fixture", "cofiber_halfsplit_point"]).status.code(), Some(0));
    assert_eq!(sck1(&["validate", "/no/such/file.json"]).status.code(), Some(2));
    let bad = scratch("bad.json", "{\"objects\": [");
    let o = sck1(&["validate", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("bad.json"));
    assert_eq!(sck1(&["validate", "--fixture", "nope"]).status.code(), Some(2));
    assert_eq!(sck1(&[]).status.code(), Some(2));
}

#[test]
fn validate_iet_files() {
    assert_eq!(sck1(&["validate", &fixture("rotation_sqrt2")]).status.code(), Some(0));
    assert_eq!(sck1(&["validate", &fixture("swap_eps_delta")]).status.code(), Some(1));
}

#[test]
fn k0_reports() {
    let o = sck1(&["k0", &fixture("halfsplit")]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().next(), Some("Z^2"));
    assert_eq!(stdout(&sck1(&["k0", "--fixture", "point"])).lines().next(), Some("Z"));
    let v: Value = serde_json::from_str(&stdout(&sck1(&["k0", "--fixture", "double_cover", "--json"]))).unwrap();
    assert_eq!(v["group"], "Z");
    assert_eq!(v["rank"], 1);
}

#[test]
fn saf_anchor_and_note() {
    let o = sck1(&["saf", &fixture("swap_eps_delta")]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert_eq!(out.lines().next(), Some("(1,√2): -1"));
    assert!(out.contains("note:"));
    assert_eq!(stdout(&sck1(&["saf", &fixture("identity")])).trim(), "0");
}

#[test]
fn output_is_deterministic() {
    for args in [
        vec!["k0", "--fixture", "free3", "--json"],
        vec!["saf", "--fixture", "rotation_sqrt2", "--json"],
        vec!["check", "--suite", "saf"],
    ] {
        assert_eq!(sck1(&args).stdout, sck1(&args).stdout);
    }
}

#[test]
fn word_commands_round_trip() {
    let c = ctx();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let w = kgroups::random_kernel_word(&c, &mut rng);
    let wp = scratch("word.json", &serde_json::to_string(&w).unwrap());
    let o = sck1(&["k1-normalize", "--fixture", "cofiber_double_cover", "--word", wp.to_str().unwrap(), "--json"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let n: SqmWord = serde_json::from_value(v["normal_form"].clone()).unwrap();
    assert_eq!(c.shadow(&n), c.shadow(&w));
    let p: K1Pair = serde_json::from_value(v["canonical_pair"].clone()).unwrap();
    p.check(&c).unwrap();
    assert_eq!(c.shadow(&p.word()), c.shadow(&w));

    let text = sck1(&["k1-normalize", "--fixture", "cofiber_double_cover", "--word", wp.to_str().unwrap()]);
    assert!(stdout(&text).starts_with("normal form: "));
}

#[test]
fn relative_and_boundary_agree() {
    let c = ctx();
    let cof = fixture("cofiber_double_cover");
    for seed in 0..4 {
        let p = some_pair(&c, seed);
        let pp = scratch(&format!("pair{seed}.json"), &serde_json::to_string(&p).unwrap());
        let o = sck1(&["relative", &cof, "--pair", pp.to_str().unwrap(), "--json"]);
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
        let q: RelativeK1Quad = serde_json::from_str(&stdout(&o)).unwrap();
        assert_eq!(q, kgroups::relative_k1(&c, &p).unwrap());

        let qp = scratch(&format!("quad{seed}.json"), &stdout(&o));
        let from_pair = sck1(&["boundary", &cof, "--element", pp.to_str().unwrap(), "--json"]);
        let from_quad = sck1(&["boundary", &cof, "--element", qp.to_str().unwrap(), "--json"]);
        let a: Value = serde_json::from_str(&stdout(&from_pair)).unwrap();
        let b: Value = serde_json::from_str(&stdout(&from_quad)).unwrap();
        assert_eq!(a["boundary"], b["boundary"]);
        let want: Vec<String> = kgroups::boundary_k1(&c, &q).iter().map(|x| x.to_string()).collect();
        assert_eq!(a["boundary"], serde_json::to_value(want).unwrap());
    }
}

#[test]
fn malformed_pair_is_an_input_error() {
    let pp = scratch("junk_pair.json", "{\"a0\": 3}");
    let o = sck1(&["relative", "--fixture", "cofiber_double_cover", "--pair", pp.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn iet_compose_matches_library() {
    let g = fixture("rotation_sqrt2");
    let o = sck1(&["iet-compose", &g, &g, "--json"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let got = Iet::from_json(&stdout(&o)).unwrap();
    let t = Iet::from_json(fixtures::ROTATION_SQRT2).unwrap();
    assert_eq!(got, iet_compose(&t, &t).unwrap());
    assert_eq!(sck1(&["iet-compose", &g, &fixture("swap_half")]).status.code(), Some(2));
}

#[test]
fn check_runs_selected_suites() {
    let o = sck1(&["check", "--suite", "K0"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("PASS K0 examples"));
    assert_eq!(sck1(&["check", "--suite", "no such suite"]).status.code(), Some(2));
}
