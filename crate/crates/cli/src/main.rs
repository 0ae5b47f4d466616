use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use realtopo::dsl::parse_set;
use realtopo::fuzz::{fuzz_run_with, FuzzSpec};
use realtopo::interval::Interval;
use realtopo::par::Mode;
use realtopo::planar::{
    check_xn_in_closure_an, detect_height_collisions, detect_row_overlaps, fixture_verdicts, HeightRule, PlanarConfig,
};
use realtopo::rational::{parse as parse_rational, show};
use realtopo::realset::interval_dsl;
use realtopo::report::{analyze, component_lines, report_consistent, witness, WitnessKind};
use realtopo::surjection::{build_surjection, cantor_eval, eval_surjection, solve_preimage, transversal_set};
use realtopo::{normalize, Error, Rational};

const OK: u8 = 0;
const FAILURE: u8 = 1;
const PARSE: u8 = 2;
const UNNORMALIZABLE: u8 = 3;
const USAGE: u8 = 4;

#[derive(Parser)]
#[command(name = "realtopo", version, about = "GCC/CCC analysis of definable subsets of the real line")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Normalize a set and report components, verdicts, witness and closure.
    Analyze {
        /// DSL expression, or @path to a file holding one.
        expr: String,
        /// Write the JSON report here ("-" for stdout).
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Emit a witness of the given kind as JSON.
    Witness {
        expr: String,
        #[arg(long, value_enum)]
        kind: Kind,
    },
    /// Evaluate or invert the surjection from A × R onto a GCC set.
    Surjection {
        expr: String,
        /// `a,y`: the image of (a, y).
        #[arg(long, group = "op", allow_hyphen_values = true)]
        eval: Option<String>,
        /// A point of the set to find a preimage for.
        #[arg(long, group = "op", allow_hyphen_values = true)]
        preimage: Option<String>,
        /// A bit string addressing a bracket of the Cantor stage.
        #[arg(long, group = "op")]
        cantor: Option<String>,
    },
    /// Built-in fixtures.
    Fixture {
        #[command(subcommand)]
        which: Fixture,
    },
    /// Run the property battery on seeded random sets.
    Fuzz {
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        trials: u64,
        /// Swap in a known-bad decider to exercise failure reporting.
        #[arg(long)]
        mutate: bool,
        #[arg(long)]
        sequential: bool,
    },
}

#[derive(Subcommand)]
enum Fixture {
    /// The planar space that is GCC but not CCC.
    Planar {
        #[arg(long, value_enum, default_value = "collision-free")]
        rule: Rule,
        #[arg(long, value_enum, default_value = "all")]
        check: Check,
        /// Enumeration bound for rows and points.
        #[arg(long, default_value_t = 30)]
        bound: u64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Gcc,
    NonGcc,
    Ccc,
}

#[derive(Clone, Copy, ValueEnum)]
enum Rule {
    Literal,
    CollisionFree,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Check {
    All,
    Verdicts,
    Collisions,
    Closure,
}

/// A failed command: exit code and message for stderr.
struct Fail(u8, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Fail {
        let code = match e {
            Error::Parse { .. } => PARSE,
            Error::Unnormalizable(_) | Error::InvalidSchema(_) => UNNORMALIZABLE,
            _ => FAILURE,
        };
        Fail(code, e.to_string())
    }
}

type Out = Result<u8, Fail>;

fn read_expr(arg: &str) -> Result<String, Fail> {
    match arg.strip_prefix('@') {
        Some(path) => std::fs::read_to_string(path)
            .map(|s| s.trim().to_string())
            .map_err(|e| Fail(USAGE, format!("cannot read {path}: {e}"))),
        None => Ok(arg.to_string()),
    }
}

fn rational_arg(s: &str) -> Result<Rational, Fail> {
    parse_rational(s.trim()).ok_or_else(|| Fail(USAGE, format!("not a rational: {s:?}")))
}

/// println! that tolerates a closed stdout (e.g. piped into `head`).
macro_rules! out {
    ($($t:tt)*) => {{
        let _ = writeln!(std::io::stdout(), $($t)*);
    }};
}

fn print_json(v: &Value) {
    out!("{}", serde_json::to_string_pretty(v).expect("serializable"));
}

fn cmd_analyze(expr: &str, out: Option<PathBuf>) -> Out {
    let text = read_expr(expr)?;
    let r = analyze(&text)?;
    let v = serde_json::to_value(&r).expect("serializable");
    match out.as_deref() {
        Some(p) if p.as_os_str() == "-" => print_json(&v),
        Some(p) => {
            let body = serde_json::to_string_pretty(&v).expect("serializable") + "\n";
            std::fs::write(p, body).map_err(|e| Fail(FAILURE, format!("cannot write {}: {e}", p.display())))?;
        }
        None => {}
    }
    if out.as_deref().map_or(true, |p| p.as_os_str() != "-") {
        let x = normalize(&parse_set(&r.normalized)?)?;
        out!("normalized: {}", r.normalized);
        out!("components: {} finite, {} families", r.components.finite, r.components.families);
        for c in component_lines(&x) {
            out!("  {c}");
        }
        out!("gcc: {}", r.gcc);
        out!("ccc: {}", r.ccc);
        out!("closure: {}", r.closure);
        out!("corollary 1: {}, corollary 2: {}", r.checks.corollary1, r.checks.corollary2);
    }
    let sound = report_consistent(&r)? && r.checks.corollary1 && r.checks.corollary2;
    Ok(if sound { OK } else { FAILURE })
}

fn cmd_witness(expr: &str, kind: Kind) -> Out {
    let text = read_expr(expr)?;
    let kind = match kind {
        Kind::Gcc => WitnessKind::Gcc,
        Kind::NonGcc => WitnessKind::NonGcc,
        Kind::Ccc => WitnessKind::Ccc,
    };
    print_json(&witness(&text, kind)?);
    Ok(OK)
}

fn bracket_json(iv: &Interval) -> Value {
    json!({
        "lo": iv.lo.fin().map(show),
        "hi": iv.hi.fin().map(show),
        "bracket": interval_dsl(iv),
    })
}

fn cmd_surjection(expr: &str, eval: Option<String>, preimage: Option<String>, cantor: Option<String>) -> Out {
    let text = read_expr(expr)?;
    let plan = build_surjection(&parse_set(&text)?)?;
    let v = if let Some(ay) = eval {
        let (a, y) = ay.split_once(',').ok_or_else(|| Fail(USAGE, "--eval expects a,y".into()))?;
        let (a, y) = (rational_arg(a)?, rational_arg(y)?);
        let f = eval_surjection(&plan, &a, &y)?;
        json!({ "a": show(&a), "y": show(&y), "value": show(&f), "member": plan.x.member(&f) })
    } else if let Some(t) = preimage {
        let t = rational_arg(&t)?;
        let (a, y) = solve_preimage(&plan, &t)?;
        let back = eval_surjection(&plan, &a, &y)?;
        json!({ "target": show(&t), "a": show(&a), "y": show(&y), "round_trip": back == t })
    } else if let Some(bits) = cantor {
        let a = transversal_set(&plan)?;
        let b = cantor_eval(&a, &bits).map_err(|e| match e {
            Error::Parse { msg, .. } => Fail(USAGE, msg),
            e => e.into(),
        })?;
        json!({ "domain": a.to_dsl(), "bits": bits, "bracket": bracket_json(&b) })
    } else {
        return Err(Fail(USAGE, "one of --eval, --preimage, --cantor is required".into()));
    };
    print_json(&v);
    Ok(OK)
}

fn cmd_planar(rule: Rule, check: Check, bound: u64) -> Out {
    let rule = match rule {
        Rule::Literal => HeightRule::Literal,
        Rule::CollisionFree => HeightRule::CollisionFree,
    };
    let cfg = PlanarConfig::new(rule, bound)?;
    let mut out = serde_json::Map::new();
    let mut ok = true;
    out.insert("rule".into(), json!(rule));
    out.insert("bound".into(), json!(bound));
    if matches!(check, Check::All | Check::Collisions) {
        let collisions = detect_height_collisions(rule, bound);
        ok &= collisions.is_empty();
        let list: Vec<Value> = collisions.iter().map(|&(n, k, m)| json!({ "n": n, "k": k, "m": m })).collect();
        out.insert("collisions".into(), Value::Array(list));
        out.insert("row_overlaps".into(), json!(detect_row_overlaps(rule, bound).len()));
    }
    if matches!(check, Check::All | Check::Closure) {
        let bad: Vec<u64> = (1..=1000).filter(|&n| !check_xn_in_closure_an(&cfg, n)).collect();
        ok &= bad.is_empty();
        out.insert("xn_in_closure_an".into(), json!({ "checked_up_to": 1000, "failures": bad }));
    }
    if matches!(check, Check::All | Check::Verdicts) {
        match fixture_verdicts(&cfg) {
            Ok(v) => {
                ok &= v.gcc && !v.ccc && v.reasons.iter().all(|s| s.verified);
                out.insert("verdicts".into(), serde_json::to_value(&v).expect("serializable"));
            }
            Err(e @ Error::UnsupportedConfig(_)) => {
                ok = false;
                out.insert("verdicts".into(), json!({ "error": e.to_string() }));
            }
            Err(e) => return Err(e.into()),
        }
    }
    print_json(&Value::Object(out));
    Ok(if ok { OK } else { FAILURE })
}

fn cmd_fuzz(seed: u64, trials: u64, mutate: bool, sequential: bool) -> Out {
    let spec = FuzzSpec { mutate, ..FuzzSpec::new(seed, trials) };
    let mode = if sequential { Mode::Sequential } else { Mode::default() };
    let s = fuzz_run_with(&spec, mode);
    print_json(&serde_json::to_value(&s).expect("serializable"));
    Ok(if s.ok() { OK } else { FAILURE })
}

fn run(cli: Cli) -> Out {
    match cli.cmd {
        Cmd::Analyze { expr, json } => cmd_analyze(&expr, json),
        Cmd::Witness { expr, kind } => cmd_witness(&expr, kind),
        Cmd::Surjection { expr, eval, preimage, cantor } => cmd_surjection(&expr, eval, preimage, cantor),
        Cmd::Fixture { which: Fixture::Planar { rule, check, bound } } => cmd_planar(rule, check, bound),
        Cmd::Fuzz { seed, trials, mutate, sequential } => cmd_fuzz(seed, trials, mutate, sequential),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { USAGE } else { OK });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(Fail(code, msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}
