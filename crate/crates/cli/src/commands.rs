use crate::{CarrierAction, Cli, Command, Lambdas, Mode, SolutionArgs};
use cslab::carrier::{Carrier, Kind, SquareVerdict};
use cslab::classify::classify;
use cslab::families::{
    adjudicate, adjudicate_all, catalog_json, default_lambdas, sample_instance, verify_solution, ErrataMode, FamilyId,
    FamilyInstance, SampleOptions, Solution, Verdict,
};
use cslab::funcspace::{additive_basis, additive_to_json, character_to_json, enumerate_characters};
use cslab::laws::lambda_json;
use cslab::oracles::{run_suite, Suite};
use cslab::scalar::{C64, ZERO};
use cslab::{Error, SCHEMA_VERSION};
use serde_json::{json, Value};
use std::fmt;
use std::path::Path;

/// Errors that end a run with exit status 2.
#[derive(Debug)]
pub enum CliError {
    Io { path: String, message: String },
    Parse { path: String, line: usize, column: usize, message: String },
    Input { path: Option<String>, error: Error },
    Usage(String),
}

impl CliError {
    pub fn io(path: &Path, e: std::io::Error) -> CliError {
        CliError::Io { path: path.display().to_string(), message: e.to_string() }
    }

    fn input(path: &Path) -> impl FnOnce(Error) -> CliError + '_ {
        move |error| CliError::Input { path: Some(path.display().to_string()), error }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Io { path, message } => write!(f, "{path}: {message}"),
            CliError::Parse { path, line, column, message } => write!(f, "{path}:{line}:{column}: {message}"),
            CliError::Input { path: Some(p), error } => write!(f, "{p}: {error}"),
            CliError::Input { path: None, error } => write!(f, "{error}"),
            CliError::Usage(m) => write!(f, "{m}"),
        }
    }
}

/// Result of a command: a summary for the terminal, the JSON report and
/// whether the checked property held.
pub struct Outcome {
    pub summary: String,
    pub report: Value,
    pub passed: bool,
    pub failure: Option<String>,
}

impl Outcome {
    fn ok(summary: String, report: Value) -> Outcome {
        Outcome { summary, report, passed: true, failure: None }
    }

    fn check(summary: String, report: Value, failure: Option<String>) -> Outcome {
        Outcome { summary, report, passed: failure.is_none(), failure }
    }
}

fn read_json(path: &Path) -> Result<Value, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| CliError::Parse {
        path: path.display().to_string(),
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })
}

fn load_carrier(path: &Path) -> Result<Carrier, CliError> {
    Carrier::from_json(&read_json(path)?).map_err(CliError::input(path))
}

fn family(key: &str) -> Result<FamilyId, CliError> {
    key.parse().map_err(|error| CliError::Input { path: None, error })
}

fn report(command: &str, body: Value) -> Value {
    let mut v = json!({"schema": SCHEMA_VERSION, "command": command});
    if let (Value::Object(m), Value::Object(b)) = (&mut v, body) {
        m.extend(b);
    }
    v
}

pub fn dispatch(cli: &Cli) -> Result<Outcome, CliError> {
    if !(cli.tol.is_finite() && cli.tol > 0.0) {
        return Err(CliError::Usage(format!("tolerance must be positive, got {}", cli.tol)));
    }
    match &cli.command {
        Command::Carrier { action: CarrierAction::Check(c) } => carrier_check(&c.carrier),
        Command::Chars(c) => chars(&load_carrier(&c.carrier)?),
        Command::Additive { carrier, domain } => additive(&load_carrier(&carrier.carrier)?, domain.as_deref()),
        Command::Gen { family: key, carrier, seed, lambdas, mode, instance } => {
            gen(cli.tol, family(key)?, &carrier.carrier, *seed, lambdas, *mode, instance.as_deref())
        }
        Command::Verify(args) => verify(cli.tol, args),
        Command::Classify(args) => classify_cmd(cli.tol, args),
        Command::Oracle { suite, seed, draws } => oracle(suite, *seed, *draws),
        Command::Catalog => {
            let v = catalog_json();
            let n = v["templates"].as_array().map_or(0, Vec::len);
            Ok(Outcome::ok(format!("{n} templates"), report("catalog", v)))
        }
        Command::Adjudicate { family: key, all, seeds } => adjudicate_cmd(key.as_deref(), *all, *seeds),
    }
}

fn carrier_check(path: &Path) -> Result<Outcome, CliError> {
    let v = read_json(path)?;
    let carrier = match Carrier::from_json(&v) {
        Ok(c) => c,
        Err(e @ Error::NonAssociative(..)) => {
            let msg = format!("{}: {e}", path.display());
            let body = json!({"valid": false, "error": e.to_string()});
            return Ok(Outcome::check(msg.clone(), report("carrier check", body), Some(msg)));
        }
        Err(e) => return Err(CliError::input(path)(e)),
    };
    let failures = carrier.window_associativity_failures().map_err(CliError::input(path))?;
    let mut body = json!({
        "valid": failures.is_empty(),
        "carrier": carrier.to_json(),
        "window_size": carrier.window().len(),
        "square_generated": carrier.is_square_generated(),
    });
    if carrier.is_finite() {
        let verdicts = carrier.square_generated(None).map_err(CliError::input(path))?;
        body["size"] = json!(carrier.size());
        body["squares"] = Value::Array(
            verdicts
                .iter()
                .zip(carrier.labels())
                .map(|(s, l)| match s {
                    SquareVerdict::Reached(roots) => {
                        json!({"element": l, "roots": roots.iter().map(|&r| carrier.labels()[r].clone()).collect::<Vec<_>>()})
                    }
                    SquareVerdict::Unreachable => json!({"element": l, "roots": null}),
                })
                .collect(),
        );
    }
    let kind = match carrier.kind {
        Kind::Finite => {
            let n = carrier.size().unwrap_or(0);
            format!("finite carrier with {n} element{}", if n == 1 { "" } else { "s" })
        }
        Kind::RatAdd { dim } => format!("rat-add of dimension {dim}"),
        Kind::NonnegRealMul => "nonneg-real-mul".to_string(),
    };
    let summary = format!(
        "{kind}: associative, {}square-generated, window of {}",
        if carrier.is_square_generated() { "" } else { "not " },
        carrier.window().len()
    );
    let failure = (!failures.is_empty()).then(|| format!("{} window triples fail associativity", failures.len()));
    Ok(Outcome::check(summary, report("carrier check", body), failure))
}

fn chars(carrier: &Carrier) -> Result<Outcome, CliError> {
    let body = match carrier.kind {
        Kind::Finite => {
            let list = enumerate_characters(carrier).map_err(|error| CliError::Input { path: None, error })?;
            let items: Vec<Value> = list
                .iter()
                .map(|c| {
                    let ideal: Vec<String> = c.null_ideal_on(carrier).iter().map(|x| carrier.show(x)).collect();
                    json!({"character": character_to_json(carrier, c), "null_ideal": ideal})
                })
                .collect();
            json!({"exhaustive": true, "count": items.len(), "characters": items})
        }
        Kind::RatAdd { dim } => json!({
            "exhaustive": false,
            "family": format!("exp(b.x) with b in C^{dim}, plus the zero character"),
        }),
        Kind::NonnegRealMul => json!({
            "exhaustive": false,
            "family": "x^s (s in C, value 0 at 0), the constant 1, and the zero character",
        }),
    };
    let summary = match body.get("count") {
        Some(n) => format!("{n} characters"),
        None => body["family"].as_str().unwrap_or_default().to_string(),
    };
    Ok(Outcome::ok(summary, report("chars", body)))
}

fn additive(carrier: &Carrier, domain: Option<&[String]>) -> Result<Outcome, CliError> {
    let body = match carrier.kind {
        Kind::Finite => {
            let idx = domain
                .map(|labels| {
                    labels
                        .iter()
                        .map(|l| carrier.index_of(l).ok_or_else(|| CliError::Usage(format!("unknown element {l}"))))
                        .collect::<Result<Vec<_>, _>>()
                })
                .transpose()?;
            let basis =
                additive_basis(carrier, idx.as_deref()).map_err(|error| CliError::Input { path: None, error })?;
            let n = carrier.size().unwrap_or(0);
            json!({
                "domain": basis.domain.iter().map(|&i| carrier.labels()[i].clone()).collect::<Vec<_>>(),
                "dimension": basis.dimension(),
                "basis": basis.functions(n).iter().map(|a| additive_to_json(carrier, a)).collect::<Vec<_>>(),
            })
        }
        Kind::RatAdd { dim } => json!({"domain": "S", "dimension": dim, "family": "alpha.x with alpha in C^dim"}),
        Kind::NonnegRealMul => json!({
            "domain": "(0,inf)",
            "dimension": 1,
            "family": "alpha*ln(x); only the zero function is additive on all of S",
        }),
    };
    let summary = format!("additive dimension {} on {}", body["dimension"], body["domain"]);
    Ok(Outcome::ok(summary, report("additive", body)))
}

fn lambdas_or(l: &Lambdas, default: (C64, C64)) -> (C64, C64) {
    (l.lambda1.unwrap_or(default.0), l.lambda2.unwrap_or(default.1))
}

fn gen(
    tol: f64,
    id: FamilyId,
    carrier_path: &Path,
    seed: u64,
    lambdas: &Lambdas,
    mode: Mode,
    instance_path: Option<&Path>,
) -> Result<Outcome, CliError> {
    let carrier = load_carrier(carrier_path)?;
    let (l1, l2) = lambdas_or(lambdas, default_lambdas(id));
    let modes = match mode {
        Mode::AsPrinted => vec![ErrataMode::AsPrinted],
        Mode::Corrected => vec![ErrataMode::Corrected],
        Mode::Both => vec![ErrataMode::AsPrinted, ErrataMode::Corrected],
    };
    let input = |error| CliError::Input { path: None, error };
    let mut runs = vec![];
    let mut lines = vec![];
    let mut last: Option<(FamilyInstance, bool)> = None;
    for m in modes {
        let opts = SampleOptions { mode: m, ..SampleOptions::default() };
        let inst = sample_instance(id, &carrier, l1, l2, seed, &opts).map_err(input)?;
        let ver = inst.verify(&carrier, tol).map_err(input)?;
        let passes = ver.passes(tol);
        lines.push(format!(
            "{} {} seed {seed}: relative residual {:.3e} ({})",
            id.key(),
            m.name(),
            ver.relative(),
            if passes { "verified" } else { "FAILED" }
        ));
        runs.push(json!({
            "mode": m.name(),
            "instance": inst.to_json(&carrier).map_err(input)?,
            "verification": ver.to_json(&carrier),
            "passes": passes,
        }));
        last = Some((inst, passes));
    }
    let (inst, passes) = last.expect("at least one mode");
    if let Some(p) = instance_path {
        let text = serde_json::to_string_pretty(&inst.to_json(&carrier).map_err(input)?).expect("serializes") + "\n";
        std::fs::write(p, text).map_err(|e| CliError::io(p, e))?;
    }
    let body =
        json!({"family": id.key(), "seed": seed, "tolerance": tol, "lambdas": lambda_json(l1, l2), "runs": runs});
    let failure = (!passes).then(|| format!("{} does not verify within {tol:e}", id.key()));
    Ok(Outcome::check(lines.join("\n"), report("gen", body), failure))
}

struct Loaded {
    carrier: Carrier,
    solution: Solution,
    lambdas: (C64, C64),
    family: Option<FamilyId>,
}

/// A solution file: an instance file (with "family") or a bare solution with
/// optional "carrier", "lambda1", "lambda2" and either "solution" or the
/// components at top level.
fn load_solution(args: &SolutionArgs) -> Result<Loaded, CliError> {
    let path = &args.solution;
    let v = read_json(path)?;
    let file_lambda = |k: &str| v.get(k).and_then(cslab::scalar::complex_from_value);
    if v.get("family").is_some() {
        let (carrier, inst) = FamilyInstance::from_json(&v).map_err(CliError::input(path))?;
        let ls = lambdas_or(&args.lambdas, (inst.lambda1, inst.lambda2));
        return Ok(Loaded { carrier, solution: inst.solution, lambdas: ls, family: Some(inst.id) });
    }
    let carrier = match (&args.carrier, v.get("carrier")) {
        (Some(p), _) => load_carrier(p)?,
        (None, Some(c)) => Carrier::from_json(c).map_err(CliError::input(path))?,
        (None, None) => {
            return Err(CliError::Usage(format!("{}: no carrier in the file; pass --carrier", path.display())))
        }
    };
    let body = v.get("solution").unwrap_or(&v);
    let sol = Solution::from_json(&carrier, body).map_err(CliError::input(path))?;
    let ls =
        lambdas_or(&args.lambdas, (file_lambda("lambda1").unwrap_or(ZERO), file_lambda("lambda2").unwrap_or(ZERO)));
    Ok(Loaded { carrier, solution: sol, lambdas: ls, family: None })
}

fn verify(tol: f64, args: &SolutionArgs) -> Result<Outcome, CliError> {
    let Loaded { carrier, solution: sol, lambdas: (l1, l2), family: id } = load_solution(args)?;
    let ver = verify_solution(&carrier, &sol, l1, l2, tol).map_err(CliError::input(&args.solution))?;
    let dependent = ver.independence.as_ref().is_some_and(|i| !i.independent);
    let failure = if dependent {
        Some("independence hypothesis violated: f and h are linearly dependent".to_string())
    } else if ver.relative() > tol {
        Some(format!("relative residual {:.3e} exceeds {tol:e}", ver.relative()))
    } else {
        None
    };
    let body = json!({
        "family": id.map(FamilyId::key),
        "tolerance": tol,
        "lambdas": lambda_json(l1, l2),
        "verification": ver.to_json(&carrier),
        "passes": failure.is_none(),
        "failure": failure,
    });
    let summary = format!(
        "relative residual {:.3e}{}: {}",
        ver.relative(),
        ver.independence
            .as_ref()
            .map_or(String::new(), |i| format!(", (f,h) {}", if i.independent { "independent" } else { "dependent" })),
        failure.as_deref().unwrap_or("verified")
    );
    Ok(Outcome::check(summary, report("verify", body), failure))
}

fn classify_cmd(tol: f64, args: &SolutionArgs) -> Result<Outcome, CliError> {
    let Loaded { carrier, solution: sol, lambdas: (l1, l2), .. } = load_solution(args)?;
    match classify(&carrier, &sol, l1, l2, tol) {
        Ok(cls) => {
            let mut lines: Vec<String> = cls
                .matches
                .iter()
                .map(|m| {
                    format!(
                        "{} (fit residual {:.2e}, {} alternatives)",
                        m.id.key(),
                        m.fit_residual,
                        m.alternatives.len()
                    )
                })
                .collect();
            if lines.is_empty() {
                lines.push("no template matches".into());
            }
            if !cls.square_generated {
                lines.push("warning: carrier is not generated by its squares".into());
            }
            let body = cls.to_json(&carrier);
            let failure = cls.unmatched().then(|| "no template matches the solution".to_string());
            Ok(Outcome::check(lines.join("\n"), report("classify", body), failure))
        }
        Err(e @ (Error::NotASolution(_) | Error::Hypothesis(_))) => {
            let msg = e.to_string();
            let body = json!({"lambdas": lambda_json(l1, l2), "error": msg});
            Ok(Outcome::check(msg.clone(), report("classify", body), Some(msg)))
        }
        Err(e) => Err(CliError::input(&args.solution)(e)),
    }
}

fn oracle(suite: &str, seed: u64, draws: usize) -> Result<Outcome, CliError> {
    let s = Suite::parse(suite).ok_or_else(|| CliError::Usage(format!("unknown suite {suite}")))?;
    let rep = run_suite(s, seed, draws).map_err(|error| CliError::Input { path: None, error })?;
    let mut lines = vec![];
    for (inst, v) in &rep.verdicts {
        lines.push(format!("{:<60} {}", inst.name, v.status.name()));
    }
    for (s, t) in &rep.tallies {
        lines.push(format!(
            "{} falsification: {} draws, {} premises met, {} not applicable, {} counterexamples",
            s.name(),
            t.draws,
            t.premise_met,
            t.not_applicable,
            t.counterexamples.len()
        ));
    }
    let failure = (!rep.clean()).then(|| "an oracle produced a counterexample".to_string());
    Ok(Outcome::check(lines.join("\n"), report("oracle", rep.to_json()), failure))
}

fn adjudicate_cmd(key: Option<&str>, all: bool, seeds: u64) -> Result<Outcome, CliError> {
    let seed_list: Vec<u64> = (0..seeds).collect();
    let input = |error| CliError::Input { path: None, error };
    let results = if all {
        adjudicate_all(&seed_list).map_err(input)?
    } else {
        let id = family(key.unwrap_or_default())?;
        let carrier = Carrier::rat_add(2, None).map_err(input)?;
        vec![adjudicate(id, &carrier, &seed_list).map_err(input)?]
    };
    let lines: Vec<String> = results
        .iter()
        .map(|a| {
            let worst = |xs: &[f64]| xs.iter().copied().fold(0.0, f64::max);
            let mut s = format!("{:<9} {:<10} as printed {:.2e}", a.id.key(), a.verdict.name(), worst(&a.as_printed));
            if let Some(c) = &a.corrected {
                s += &format!(", corrected {:.2e}", worst(c));
            }
            s
        })
        .collect();
    let unresolved: Vec<&str> =
        results.iter().filter(|a| a.verdict == Verdict::Unresolved).map(|a| a.id.key()).collect();
    let body = json!({
        "carrier": "rat-add dim 2",
        "seeds": seed_list,
        "adjudications": results.iter().map(|a| a.to_json()).collect::<Vec<_>>(),
    });
    let failure = (!unresolved.is_empty()).then(|| format!("unresolved: {}", unresolved.join(", ")));
    Ok(Outcome::check(lines.join("\n"), report("adjudicate", body), failure))
}
