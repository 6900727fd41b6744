use std::io::{IsTerminal, Write};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use hydra::lift::{
    build_domain, build_lifting_fn, check_inequivalence, enumerate_u25, gf5_u25_tuples,
    lifted_pairs_mismatch, local_lift_check, phi_pairs,
};
use hydra::pfield::{
    build_fundamental_table, builtin, Fingerprint, FundamentalTable, PartialFieldSpec,
    BUILTIN_NAMES,
};
use hydra::report::{canonical_json, field_report, verify_specs, Fault, ReportOptions};
use hydra::sieve::{enumerate_candidates, resolve_fingerprint, spec_box};
use hydra::symmetry::{automorphism_group, SymmetryContext};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Parser, Debug)]
#[command(
    name = "hydra",
    version,
    about = "Exact checks of the Hydra-k partial fields"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Output format.
    #[arg(
        long,
        global = true,
        value_enum,
        default_value = "text",
        env = "HYDRA_FORMAT"
    )]
    format: Format,

    /// Worker threads (default: all cores).
    #[arg(long, global = true, env = "HYDRA_WORKERS", value_parser = clap::value_parser!(u32).range(1..))]
    workers: Option<u32>,

    /// Search for an injective fingerprint prime starting here instead of the spec's prime.
    #[arg(long, global = true, env = "HYDRA_PRIME_START")]
    prime_start: Option<u64>,

    /// Spec file replacing the shipped spec of the same name.
    #[arg(long, global = true, env = "HYDRA_SPEC")]
    spec: Option<std::path::PathBuf>,

    /// Shift one sieve residue, to check that the verification notices.
    #[arg(long, global = true, hide = true)]
    inject_fingerprint_fault: Option<usize>,
}

#[derive(clap::Args, Debug, Clone)]
struct FieldArg {
    /// H2, H3, H4 or H5 (or the name in --spec).
    #[arg(value_name = "FIELD", required_unless_present = "field")]
    name: Option<String>,
    #[arg(long = "field", env = "HYDRA_FIELD", hide_env = true)]
    field: Option<String>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// The fundamental elements with fingerprints and GF(5) images.
    Funs(FieldArg),
    /// The automorphism group and the coordinate permutations it induces.
    Auts(FieldArg),
    /// U(2,5) pairs and the inequivalence of their GF(5) projections.
    U25(FieldArg),
    /// Lifting function, local lifts and the pair bijection.
    LiftCheck(FieldArg),
    /// Norm constraint rows and the resulting exponent box.
    Bounds(FieldArg),
    /// Every stage for one field.
    Report(FieldArg),
    /// Triple products and polynomial relations behind H3.
    Genesis,
    /// Every stage for every field, then the H3 relations.
    VerifyAll,
}

struct Usage(String);

struct Outcome {
    text: String,
    json: Value,
    pass: bool,
}

fn load_spec(cli: &Cli, name: Option<&str>) -> Result<PartialFieldSpec, Usage> {
    let from_file = match &cli.spec {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Usage(format!("{}: {e}", path.display())))?;
            Some(
                PartialFieldSpec::parse(&text)
                    .map_err(|e| Usage(format!("{}: {e}", path.display())))?,
            )
        }
        None => None,
    };
    match (name, from_file) {
        (None, Some(s)) => Ok(s),
        (Some(n), Some(s)) if s.name.eq_ignore_ascii_case(n) => Ok(s),
        (Some(n), _) => builtin(n).map_err(|_| {
            Usage(format!(
                "unknown field '{n}' (expected one of {})",
                BUILTIN_NAMES.join(", ")
            ))
        }),
        (None, None) => Err(Usage("no field given".into())),
    }
}

fn field_of(cli: &Cli, f: &FieldArg) -> Result<PartialFieldSpec, Usage> {
    load_spec(cli, f.name.as_deref().or(f.field.as_deref()))
}

fn table_for(
    spec: &PartialFieldSpec,
    prime_start: Option<u64>,
) -> Result<(Fingerprint, FundamentalTable), String> {
    let fp = match prime_start {
        None => Fingerprint::at_prime(spec, spec.mod_map.prime).map_err(|e| e.to_string())?,
        Some(_) => {
            let (_, b) = spec_box(spec).map_err(|e| e.to_string())?;
            let cands = enumerate_candidates(&b, spec.minus_one);
            resolve_fingerprint(spec, &cands, prime_start).map_err(|e| e.to_string())?
        }
    };
    let t = build_fundamental_table(spec, &fp).map_err(|e| e.to_string())?;
    Ok((fp, t))
}

fn failure(field: &str, e: String) -> Outcome {
    Outcome {
        text: format!("{field}: {e}\nverdict: FAIL\n"),
        json: json!({"field": field, "error": e, "verdict": "FAIL"}),
        pass: false,
    }
}

fn show(spec: &PartialFieldSpec, t: &FundamentalTable, k: usize) -> String {
    t.entries[k].value.display(&spec.ground)
}

fn cmd_funs(spec: &PartialFieldSpec, prime_start: Option<u64>) -> Outcome {
    let (fp, t) = match table_for(spec, prime_start) {
        Ok(x) => x,
        Err(e) => return failure(&spec.name, e),
    };
    let mut text = format!(
        "{}: {} fundamental elements (residues mod {})\n",
        spec.name,
        t.len(),
        fp.map.prime()
    );
    let mut rows = Vec::new();
    for e in &t.entries {
        let value = e.value.display(&spec.ground);
        let factored = e.element.display(spec);
        text += &format!(
            "{:>14}  {}  {value}  =  {factored}\n",
            e.fingerprint, e.image
        );
        rows.push(json!({"fingerprint": e.fingerprint, "phi": e.image.0, "value": value, "factored": factored}));
    }
    let pass = spec.expect.fundamentals.is_none_or(|n| n == t.len());
    json_outcome(
        text,
        json!({"field": spec.name, "prime": fp.map.prime(), "count": t.len(), "entries": rows}),
        pass,
    )
}

fn json_outcome(text: String, mut json: Value, pass: bool) -> Outcome {
    json["verdict"] = json!(if pass { "PASS" } else { "FAIL" });
    let text = format!("{text}verdict: {}\n", if pass { "PASS" } else { "FAIL" });
    Outcome { text, json, pass }
}

fn cmd_auts(spec: &PartialFieldSpec, prime_start: Option<u64>) -> Outcome {
    let (fp, t) = match table_for(spec, prime_start) {
        Ok(x) => x,
        Err(e) => return failure(&spec.name, e),
    };
    let ctx = SymmetryContext::new(spec, &fp, &t);
    let name = spec.name.clone();
    let progress = move |d: usize, total: usize| {
        if !std::io::stderr().is_terminal() {
            return;
        }
        eprint!("\r{name} prefilter {d}/{total}");
        if d == total {
            eprintln!();
        }
        let _ = std::io::stderr().flush();
    };
    let g = match automorphism_group(&ctx, Some(&progress)) {
        Ok(g) => g,
        Err(e) => return failure(&spec.name, e.to_string()),
    };
    let symbols = spec.ground.symbol_names();
    let mut text = format!(
        "{}: {} automorphisms ({} candidates, {} passed the prefilter)\n",
        spec.name,
        g.order(),
        g.candidates,
        g.prefiltered
    );
    let mut members = Vec::new();
    for a in &g.members {
        let images: Vec<String> = symbols
            .iter()
            .zip(&a.images)
            .map(|(s, &k)| format!("{s} -> {}", show(spec, &t, k)))
            .collect();
        text += &format!("  {:?}  {}\n", a.permutation, images.join(", "));
        members.push(json!({"images": images, "permutation": a.permutation}));
    }
    let pass = spec.expect.automorphisms.is_none_or(|n| n == g.order());
    json_outcome(
        text,
        json!({"field": spec.name, "order": g.order(), "members": members}),
        pass,
    )
}

fn cmd_u25(spec: &PartialFieldSpec, prime_start: Option<u64>) -> Outcome {
    let (fp, t) = match table_for(spec, prime_start) {
        Ok(x) => x,
        Err(e) => return failure(&spec.name, e),
    };
    let pairs = enumerate_u25(spec, &fp, &t);
    let imgs = phi_pairs(&t, &pairs);
    let bad = check_inequivalence(&imgs);
    let mut text = format!("{}: {} U(2,5) pairs (p, q)\n", spec.name, pairs.len());
    let mut rows = Vec::new();
    for (x, (ip, iq)) in pairs.iter().zip(&imgs) {
        let (p, q) = (show(spec, &t, x.p), show(spec, &t, x.q));
        text += &format!("  {ip} {iq}  {p}, {q}\n");
        rows.push(json!({"p": p, "q": q, "phi_p": ip.0, "phi_q": iq.0}));
    }
    text += &format!("inequivalence violations: {}\n", bad.len());
    let pass = bad.is_empty() && spec.expect.u25.is_none_or(|n| n == pairs.len());
    let json = json!({"field": spec.name, "count": pairs.len(), "pairs": rows, "violations": bad});
    json_outcome(text, json, pass)
}

fn cmd_lift(spec: &PartialFieldSpec, prime_start: Option<u64>) -> Outcome {
    let (fp, t) = match table_for(spec, prime_start) {
        Ok(x) => x,
        Err(e) => return failure(&spec.name, e),
    };
    let lift = match build_lifting_fn(spec, &t) {
        Ok(l) => l,
        Err(e) => return failure(&spec.name, e.to_string()),
    };
    let width = spec.lift_width();
    let domain = build_domain(width).len();
    let tuples = gf5_u25_tuples(width);
    let (lifted, bad) = local_lift_check(spec, &fp, &t, &lift, &tuples);
    let (a, b) = lifted_pairs_mismatch(&lifted, &enumerate_u25(spec, &fp, &t));
    let mut text = format!(
        "{}: lifting function on {domain} tuples of width {width}\n",
        spec.name
    );
    let mut table = Vec::new();
    for (tuple, &k) in lift.tuples() {
        text += &format!("  {tuple} -> {}\n", show(spec, &t, k));
        table.push(json!({"tuple": tuple.0, "lift": show(spec, &t, k)}));
    }
    text += &format!(
        "{} GF(5) pairs, {} lifted with fundamental ratio, {} violations, bijection {}\n",
        tuples.len(),
        lifted.len(),
        bad.len(),
        if a.is_empty() && b.is_empty() {
            "holds"
        } else {
            "fails"
        }
    );
    for v in &bad {
        text += &format!("  ! {v:?}\n");
    }
    let pass = bad.is_empty()
        && a.is_empty()
        && b.is_empty()
        && spec.expect.domain.is_none_or(|n| n == domain);
    let json = json!({
        "field": spec.name,
        "domain": domain,
        "lifting": table,
        "pairs": tuples.len(),
        "lifted": lifted.len(),
        "violations": bad.iter().map(|v| format!("{v:?}")).collect::<Vec<_>>(),
        "bijection": a.is_empty() && b.is_empty(),
    });
    json_outcome(text, json, pass)
}

fn cmd_bounds(spec: &PartialFieldSpec) -> Outcome {
    let (rows, b) = match spec_box(spec) {
        Ok(x) => x,
        Err(e) => return failure(&spec.name, e.to_string()),
    };
    let slots = spec.slot_names();
    let mut text = format!(
        "{}: {} norm rows over ({})\n",
        spec.name,
        rows.len(),
        slots.join(", ")
    );
    let mut jrows = Vec::new();
    for r in &rows {
        let cs: Vec<String> = r.coeffs.iter().map(|c| c.to_string()).collect();
        text += &format!("  -1 <= {{{}}} . e <= 1    [{}]\n", cs.join(", "), r.label);
        jrows.push(json!({"hom": r.label, "coeffs": cs}));
    }
    let mut jbox = serde_json::Map::new();
    text += "box:";
    for (s, (l, h)) in slots.iter().zip(&b.ranges) {
        text += &format!(" {s}[{l},{h}]");
        jbox.insert(s.clone(), json!([l, h]));
    }
    text += &format!("\ncandidates: {}\n", b.count());
    let pass = spec.expect.candidates.is_none_or(|n| n == b.count());
    json_outcome(
        text,
        json!({"field": spec.name, "rows": jrows, "box": jbox, "candidates": b.count()}),
        pass,
    )
}

fn progress_line(stage: &str, done: usize, total: usize) {
    if total > 0 && !std::io::stderr().is_terminal() {
        return;
    }
    if total == 0 {
        eprintln!("[{stage}]");
    } else {
        eprint!("\r[{stage}] {done}/{total}");
        if done == total {
            eprintln!();
        }
    }
    let _ = std::io::stderr().flush();
}

fn options<'a>(cli: &Cli, progress: &'a (dyn Fn(&str, usize, usize) + Sync)) -> ReportOptions<'a> {
    ReportOptions {
        prime_start: cli.prime_start,
        fault: cli
            .inject_fingerprint_fault
            .map(|index| Fault::Fingerprint { index }),
        progress: Some(progress),
        ..Default::default()
    }
}

fn run(cli: &Cli) -> Result<Outcome, Usage> {
    Ok(match &cli.command {
        Command::Funs(f) => cmd_funs(&field_of(cli, f)?, cli.prime_start),
        Command::Auts(f) => cmd_auts(&field_of(cli, f)?, cli.prime_start),
        Command::U25(f) => cmd_u25(&field_of(cli, f)?, cli.prime_start),
        Command::LiftCheck(f) => cmd_lift(&field_of(cli, f)?, cli.prime_start),
        Command::Bounds(f) => cmd_bounds(&field_of(cli, f)?),
        Command::Report(f) => {
            let spec = field_of(cli, f)?;
            let r = field_report(&spec, &options(cli, &progress_line));
            Outcome {
                text: r.to_text(),
                json: r.to_json(),
                pass: r.pass(),
            }
        }
        Command::Genesis => match hydra::genesis::verify_solution() {
            Ok(g) => {
                let mut text = String::from("triples p, q, r with pqr = (1,1,1):\n");
                for (k, t) in g.triples.iter().enumerate() {
                    let ok = !g.bad_triples.contains(&k);
                    text += &format!(
                        "  {}  {}\n",
                        t.join(" "),
                        if ok { "ok" } else { "product differs" }
                    );
                }
                for r in &g.readings {
                    text += &format!("s223 = {}\n", r.s223);
                    for x in r.relation_residuals.iter().chain(&r.basis_residuals) {
                        text += &format!("  residual {x}\n");
                    }
                    text += &format!(
                        "  phi images {}\n",
                        if r.phi_matches { "match" } else { "differ" }
                    );
                }
                if let Some(c) = &g.chosen {
                    text += &format!("solution: s223 = {c}\n");
                }
                for l in &g.fundamental_lifts {
                    text += &format!("  {l}\n");
                }
                let json = serde_json::to_value(&g).expect("plain data");
                json_outcome(text, json, g.pass)
            }
            Err(e) => failure("genesis", e.to_string()),
        },
        Command::VerifyAll => {
            let mut specs = BUILTIN_NAMES
                .iter()
                .map(|n| builtin(n).expect("shipped specs parse"))
                .collect::<Vec<_>>();
            if cli.spec.is_some() {
                let custom = load_spec(cli, None)?;
                match specs
                    .iter_mut()
                    .find(|s| s.name.eq_ignore_ascii_case(&custom.name))
                {
                    Some(slot) => *slot = custom,
                    None => specs.push(custom),
                }
            }
            let v = verify_specs(&specs, &options(cli, &progress_line));
            Outcome {
                text: v.to_text(),
                json: v.to_json(),
                pass: v.pass(),
            }
        }
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.workers {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(n as usize)
            .build_global()
        {
            eprintln!("hydra: {e}");
            return ExitCode::from(2);
        }
    }
    match run(&cli) {
        Ok(out) => {
            let body = match cli.format {
                Format::Text => out.text,
                Format::Json => canonical_json(&out.json) + "\n",
            };
            // a closed pipe downstream is not an error of ours
            let _ = std::io::stdout().write_all(body.as_bytes());
            if out.pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(Usage(msg)) => {
            eprintln!("hydra: {msg}");
            ExitCode::from(2)
        }
    }
}
