use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use sck1_core::assembler::{check_condition_g, check_simplicial_identities, validate_assembler, Assembler, SimplicialLevels};
use sck1_core::fixtures;
use sck1_core::iet::{iet_compose, Iet, WedgeElement};
use sck1_core::kgroups::{self, boundary_k1, canonical_k1, relative_k1, K1Pair, RelativeK1Quad};
use sck1_core::nil2::Nil2;
use sck1_core::sc::Weq;
use sck1_core::sqm::{Generator, Shadow, SqmContext, SqmWord};
use sck1_core::suites;
use sck1_core::twist::TwObject;
use sck1_core::Error;

#[derive(Parser)]
#[command(name = "sck1", version, about = "K0, K1 and SAF computations for finite assemblers and interval exchanges")]
struct Cli {
    /// Emit JSON instead of plain text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Input {
    /// Path to a JSON file.
    path: Option<PathBuf>,
    /// Name of a bundled fixture instead of a path.
    #[arg(long, conflicts_with = "path")]
    fixture: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Check the axioms of an assembler, a cofiber or an IET file.
    Validate(Input),
    /// K0 of an assembler as a Smith normal form presentation.
    K0(Input),
    /// Normalize a word over a cofiber and, for kernel words, build the canonical K1 pair.
    K1Normalize {
        #[command(flatten)]
        cofiber: Input,
        /// Word file: a list of {tag, payload, exponent}.
        #[arg(long)]
        word: PathBuf,
    },
    /// Strip a K1 pair over a cofiber of an inclusion to its relative quad.
    Relative {
        #[command(flatten)]
        cofiber: Input,
        #[arg(long)]
        pair: PathBuf,
    },
    /// Boundary in K0 of the subassembler of a K1 pair or relative quad.
    Boundary {
        #[command(flatten)]
        cofiber: Input,
        /// Pair or quad file.
        #[arg(long)]
        element: PathBuf,
    },
    /// SAF invariant of an IET.
    Saf(Input),
    /// The IET `g ∘ h` (h first).
    IetCompose { g: PathBuf, h: PathBuf },
    /// Run the property suites.
    Check {
        /// Only run suites whose name contains this string.
        #[arg(long)]
        suite: Option<String>,
        #[arg(long, default_value_t = 20)]
        seed: u64,
    },
}

enum Failure {
    Math(String),
    Input(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_input_error() {
            Failure::Input(e.to_string())
        } else {
            Failure::Math(e.to_string())
        }
    }
}

type Outcome = std::result::Result<bool, Failure>;

fn read(path: &PathBuf) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn load(input: &Input) -> Result<(String, String), Failure> {
    match (&input.path, &input.fixture) {
        (Some(p), _) => Ok((p.display().to_string(), read(p)?)),
        (None, Some(name)) => fixtures::bundled(name)
            .map(|t| (name.clone(), t.to_string()))
            .ok_or_else(|| {
                let names: Vec<_> = fixtures::ALL.iter().map(|(n, _)| *n).collect();
                Failure::Input(format!("no bundled fixture `{name}`; known: {}", names.join(", ")))
            }),
        (None, None) => Err(Failure::Input("give a path or --fixture".into())),
    }
}

fn parse<T: serde::de::DeserializeOwned>(origin: &str, text: &str) -> Result<T, Failure> {
    serde_json::from_str(text).map_err(|e| Failure::Input(format!("{origin}: {e}")))
}

fn located<T>(origin: &str, r: sck1_core::Result<T>) -> Result<T, Failure> {
    r.map_err(|e| match Failure::from(e) {
        Failure::Input(m) => Failure::Input(format!("{origin}: {m}")),
        f => f,
    })
}

fn cofiber(input: &Input) -> Result<SqmContext, Failure> {
    let (origin, text) = load(input)?;
    Ok(SqmContext::new(located(&origin, fixtures::cofiber_from_json(&text))?))
}

// ----- rendering -----

fn obj(site: &Assembler, x: &TwObject) -> String {
    if x.objects.is_empty() {
        "∅".into()
    } else {
        x.objects.iter().map(|&o| site.object_name(o)).collect::<Vec<_>>().join(" ⊔ ")
    }
}

fn weq(site: &Assembler, w: &Weq) -> String {
    format!("{} ⇝ {}", obj(site, w.source()), obj(site, w.target()))
}

fn letter(ctx: &SqmContext, g: &Generator) -> String {
    match g {
        Generator::Obj0(x) => format!("[{}]", obj(ctx.level(0), x)),
        Generator::Obj1(x) => format!("[{}]₁", obj(ctx.level(1), x)),
        Generator::Weq0(w) => format!("[{}]", weq(ctx.level(0), w)),
        Generator::Weq1(w) => format!("[{}]₁", weq(ctx.level(1), w)),
        Generator::Cof(c) => format!("[{} ↣ {}]", obj(ctx.level(0), &c.sub), obj(ctx.level(0), &c.total)),
    }
}

fn word(ctx: &SqmContext, w: &SqmWord) -> String {
    if w.letters.is_empty() {
        return "1".into();
    }
    w.letters
        .iter()
        .map(|l| if l.exponent == 1 { letter(ctx, &l.generator) } else { format!("{}^{}", letter(ctx, &l.generator), l.exponent) })
        .collect::<Vec<_>>()
        .join(" ")
}

fn nil2_json(site: &Assembler, v: &Nil2) -> Value {
    let exps: serde_json::Map<_, _> = v.exponents.iter().map(|(&x, &e)| (site.object_name(x).to_string(), json!(e))).collect();
    let comms: Vec<_> = v
        .commutators
        .iter()
        .map(|(&(a, b), &e)| json!({"pair": [site.object_name(a), site.object_name(b)], "exponent": e}))
        .collect();
    json!({"exponents": exps, "commutators": comms})
}

fn nil2_text(site: &Assembler, v: &Nil2) -> String {
    let mut parts: Vec<String> = v.exponents.iter().map(|(&x, &e)| format!("[{}]^{e}", site.object_name(x))).collect();
    parts.extend(
        v.commutators.iter().map(|(&(a, b), &e)| format!("[[{}],[{}]]^{e}", site.object_name(a), site.object_name(b))),
    );
    if parts.is_empty() {
        "1".into()
    } else {
        parts.join(" ")
    }
}

fn class_text(ctx: &SqmContext, v: &[num_bigint::BigInt]) -> String {
    kgroups::render_vector(&ctx.k0_sub.generators, v)
}

fn shadow_json(ctx: &SqmContext, s: &Shadow) -> Value {
    json!({
        "boundary": nil2_json(ctx.level(0), &s.boundary),
        "collapse": s.collapse.iter().map(|x| x.to_string()).collect::<Vec<_>>(),
    })
}

fn wedge_text(t: &Iet, w: &WedgeElement) -> Vec<String> {
    w.render(&t.basis).into_iter().map(|term| format!("({},{}): {}", term.pair[0], term.pair[1], term.coefficient)).collect()
}

fn emit(json_mode: bool, value: Value, text: Vec<String>) {
    if json_mode {
        println!("{}", serde_json::to_string_pretty(&value).expect("values serialize"));
    } else {
        for line in text {
            println!("{line}");
        }
    }
}

// ----- commands -----

fn validate(json_mode: bool, input: &Input) -> Outcome {
    let (origin, text) = load(input)?;
    let value: Value = parse(&origin, &text)?;
    if value.get("breakpoints").is_some() {
        let t = located(&origin, Iet::from_json(&text))?;
        let ok = t.validate()?;
        emit(
            json_mode,
            json!({"kind": "iet", "passed": ok}),
            vec![format!("{} IET tiling of [0, {})", if ok { "PASS" } else { "FAIL" }, t.basis.render(&t.length))],
        );
        return Ok(ok);
    }
    let (kind, reports, identities, levels): (_, Vec<_>, _, Option<SimplicialLevels>) = if value.get("base").is_some() {
        let levels = located(&origin, fixtures::cofiber_from_json(&text))?;
        let reports = (0..3).map(|n| (format!("level {n}"), validate_assembler(levels.level(n)))).collect();
        ("cofiber", reports, check_simplicial_identities(&levels), Some(levels))
    } else {
        let site = located(&origin, Assembler::from_json(&text))?;
        ("assembler", vec![("assembler".to_string(), validate_assembler(&site))], Vec::new(), None)
    };
    let mut ok = identities.is_empty();
    let mut lines = Vec::new();
    for (name, r) in &reports {
        ok &= r.passed();
        for c in &r.checks {
            lines.push(format!("{} {name}: {}", if c.passed { "PASS" } else { "FAIL" }, c.axiom));
            lines.extend(c.witnesses.iter().map(|w| format!("    {w}")));
        }
    }
    if levels.is_some() {
        lines.push(format!("{} simplicial identities", if identities.is_empty() { "PASS" } else { "FAIL" }));
        lines.extend(identities.iter().map(|w| format!("    {w}")));
    } else {
        let site = Assembler::from_json(&text)?;
        lines.push(format!("condition (G): {}", if check_condition_g(&site) { "holds" } else { "fails" }));
    }
    let value = json!({
        "kind": kind,
        "passed": ok,
        "reports": reports.iter().map(|(n, r)| json!({"name": n, "report": r})).collect::<Vec<_>>(),
        "simplicial_identities": identities,
    });
    emit(json_mode, value, lines);
    Ok(ok)
}

fn k0(json_mode: bool, input: &Input) -> Outcome {
    let (origin, text) = load(input)?;
    let site = located(&origin, Assembler::from_json(&text))?;
    let p = kgroups::k0(&site);
    let r = p.report();
    let mut lines = vec![r.group.clone(), format!("generators: {}", r.generators.join(", "))];
    lines.push("relations:".into());
    lines.extend(p.relations.iter().map(|row| format!("    {} = 0", kgroups::render_vector(&p.generators, row))));
    lines.push("basis change (columns are the Smith basis):".into());
    lines.extend(r.basis.iter().map(|row| format!("    {}", row.join(" "))));
    emit(json_mode, serde_json::to_value(&r).expect("report serializes"), lines);
    Ok(true)
}

fn k1_normalize(json_mode: bool, cofiber_input: &Input, word_path: &PathBuf) -> Outcome {
    let ctx = cofiber(cofiber_input)?;
    let origin = word_path.display().to_string();
    let w: SqmWord = parse(&origin, &read(word_path)?)?;
    let n = located(&origin, ctx.normalize(&w))?;
    let shadow = ctx.shadow(&n);
    let mut lines = vec![format!("normal form: {}", word(&ctx, &n))];
    lines.push(format!("boundary: {}", nil2_text(ctx.level(0), &shadow.boundary)));
    lines.push(format!("collapse: {}", class_text(&ctx, &shadow.collapse)));
    let mut value = json!({"normal_form": n, "shadow": shadow_json(&ctx, &shadow)});
    if w.degree() == Some(1) && shadow.boundary.is_identity() {
        let p = canonical_k1(&ctx, &w)?;
        lines.push(format!(
            "canonical pair: {{{} ; {} : {} ⇝ {}}} with V = {}, W = {}",
            weq(ctx.level(0), &p.f),
            weq(ctx.level(0), &p.g),
            obj(ctx.level(0), &p.a0),
            obj(ctx.level(0), &p.b0),
            obj(ctx.level(1), &p.v1),
            obj(ctx.level(1), &p.w1)
        ));
        value["canonical_pair"] = serde_json::to_value(&p).expect("pair serializes");
    }
    emit(json_mode, value, lines);
    Ok(true)
}

fn quad_lines(ctx: &SqmContext, q: &RelativeK1Quad) -> Vec<String> {
    let base = ctx.level(0);
    let sub = &ctx.levels.sub;
    vec![
        format!("A = {}, B = {}", obj(base, &q.a), obj(base, &q.b)),
        format!("C = {}, D = {}", obj(sub, &q.c), obj(sub, &q.d)),
        format!("f: {}", weq(base, &q.f)),
        format!("g: {}", weq(base, &q.g)),
    ]
}

fn relative(json_mode: bool, cofiber_input: &Input, pair_path: &PathBuf) -> Outcome {
    let ctx = cofiber(cofiber_input)?;
    let origin = pair_path.display().to_string();
    let p: K1Pair = parse(&origin, &read(pair_path)?)?;
    located(&origin, p.check(&ctx))?;
    let q = relative_k1(&ctx, &p)?;
    emit(json_mode, serde_json::to_value(&q).expect("quad serializes"), quad_lines(&ctx, &q));
    Ok(true)
}

fn boundary(json_mode: bool, cofiber_input: &Input, path: &PathBuf) -> Outcome {
    let ctx = cofiber(cofiber_input)?;
    let origin = path.display().to_string();
    let value: Value = parse(&origin, &read(path)?)?;
    let q: RelativeK1Quad = if value.get("c").is_some() {
        parse(&origin, &value.to_string())?
    } else {
        let p: K1Pair = parse(&origin, &value.to_string())?;
        located(&origin, p.check(&ctx))?;
        relative_k1(&ctx, &p)?
    };
    let b = boundary_k1(&ctx, &q);
    emit(
        json_mode,
        json!({"quad": q, "boundary": b.iter().map(|x| x.to_string()).collect::<Vec<_>>()}),
        vec![format!("boundary: {}", class_text(&ctx, &b))],
    );
    Ok(true)
}

fn saf(json_mode: bool, input: &Input) -> Outcome {
    let (origin, text) = load(input)?;
    let t = located(&origin, Iet::from_json(&text))?;
    let tiles = t.validate()?;
    let w = t.saf();
    let mut lines = wedge_text(&t, &w);
    if lines.is_empty() {
        lines.push("0".into());
    }
    if !tiles {
        lines.push("note: the images do not tile the interval; the value is the formal sum over the pieces".into());
    }
    emit(json_mode, json!({"saf": w.render(&t.basis), "tiles": tiles}), lines);
    Ok(true)
}

fn compose(json_mode: bool, g: &PathBuf, h: &PathBuf) -> Outcome {
    let load_iet = |p: &PathBuf| -> Result<Iet, Failure> {
        let origin = p.display().to_string();
        let t = located(&origin, Iet::from_json(&read(p)?))?;
        located(&origin, t.require_valid())?;
        Ok(t)
    };
    let gh = iet_compose(&load_iet(g)?, &load_iet(h)?)?;
    let file = serde_json::to_value(gh.to_file()).expect("IET serializes");
    let mut lines = Vec::new();
    for (i, iv) in gh.intervals().iter().enumerate() {
        lines.push(format!(
            "[{}, {}) + {}",
            gh.basis.render(&iv.lo),
            gh.basis.render(&iv.hi),
            gh.basis.render(&gh.translations[i])
        ));
    }
    emit(json_mode, file, lines);
    Ok(true)
}

fn check(json_mode: bool, filter: Option<&str>, seed: u64) -> Outcome {
    let reports: Vec<_> =
        suites::all(seed).into_iter().filter(|r| filter.is_none_or(|f| r.name.contains(f))).collect();
    if reports.is_empty() {
        return Err(Failure::Input(format!("no suite matches `{}`", filter.unwrap_or_default())));
    }
    let ok = reports.iter().all(|r| r.passed());
    let mut lines = Vec::new();
    for r in &reports {
        lines.push(format!("{} {} ({} checks)", if r.passed() { "PASS" } else { "FAIL" }, r.name, r.checked));
        lines.extend(r.failures.iter().take(5).map(|f| format!("    {f}")));
    }
    emit(json_mode, json!({"passed": ok, "suites": reports}), lines);
    Ok(ok)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let j = cli.json;
    let outcome = match &cli.command {
        Command::Validate(i) => validate(j, i),
        Command::K0(i) => k0(j, i),
        Command::K1Normalize { cofiber, word } => k1_normalize(j, cofiber, word),
        Command::Relative { cofiber, pair } => relative(j, cofiber, pair),
        Command::Boundary { cofiber, element } => boundary(j, cofiber, element),
        Command::Saf(i) => saf(j, i),
        Command::IetCompose { g, h } => compose(j, g, h),
        Command::Check { suite, seed } => check(j, suite.as_deref(), *seed),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Math(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Input(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
    }
}
