use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use incidence_core::field::FieldDesc;
use incidence_core::gates;
use incidence_core::io;
use incidence_core::poset::Poset;
use incidence_core::preserver::{LinearMap, PreserverSpec};
use incidence_core::verifier::{
    self, all_pass, CensusReport, ClassificationReport, ExampleReport, LemmaVerdict,
    PartialCensus, Sample, VerifyError,
};

#[derive(Parser)]
#[command(name = "incidence", version, about = "Invertibility preservers of incidence algebras")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Emit JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Write the report to this file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Lift the search-space limits of the exhaustive checks.
    #[arg(long, global = true)]
    gate_override: bool,
}

#[derive(Args, Clone)]
struct Context {
    /// Built-in poset (chain:n, antichain:n, v, diamond) or poset file.
    #[arg(long)]
    poset: Option<String>,
    /// Field literal: `Fp 3`, `Fp 2`, `Q`.
    #[arg(long, num_args = 1..=2)]
    field: Vec<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Build the map of a (lambda, psi) spec file.
    Build {
        #[arg(long)]
        spec: PathBuf,
        #[command(flatten)]
        ctx: Context,
    },
    /// Recover the normal form of a map, or name the lemma it violates.
    Classify {
        #[arg(long)]
        map: PathBuf,
        #[command(flatten)]
        ctx: Context,
    },
    /// Run the lemma suite on a single map.
    Check {
        #[arg(long)]
        map: PathBuf,
        #[command(flatten)]
        ctx: Context,
    },
    /// Enumerate every linear map and compare with the classification.
    Census {
        #[command(flatten)]
        ctx: Context,
        /// Resume from and save progress to this file.
        #[arg(long)]
        checkpoint: Option<PathBuf>,
        /// Matrices per checkpoint step.
        #[arg(long, default_value_t = 1_000_000)]
        step: u64,
    },
    /// Lemma suite over all preservers (or a seeded sample).
    Lemmas {
        #[command(flatten)]
        ctx: Context,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        trials: Option<usize>,
        /// Run the inverse-preserver results instead.
        #[arg(long)]
        inverse: bool,
    },
    /// Reproduce the worked examples (all when none are named).
    Examples { ids: Vec<String> },
    /// Strong and bijective criteria for a spec file, or for every spec of an instance.
    Criteria {
        #[arg(long)]
        spec: Option<PathBuf>,
        #[command(flatten)]
        ctx: Context,
    },
}

enum Failure {
    Usage(String),
    Refuted(String),
}

impl From<io::ParseError> for Failure {
    fn from(e: io::ParseError) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<VerifyError> for Failure {
    fn from(e: VerifyError) -> Self {
        match e {
            VerifyError::Refuted { .. } | VerifyError::NotUnital(_) | VerifyError::Inconsistent(_) => {
                Failure::Refuted(e.to_string())
            }
            other => Failure::Usage(other.to_string()),
        }
    }
}

impl From<incidence_core::preserver::PreserverError> for Failure {
    fn from(e: incidence_core::preserver::PreserverError) -> Self {
        Failure::Usage(e.to_string())
    }
}

/// A rendered report and whether everything in it passed.
struct Outcome {
    text: String,
    pass: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.gate_override {
        gates::set_override(true);
        eprintln!("warning: search-space limits lifted; exhaustive checks may run for a long time");
    }
    let result = run(&cli.command, cli.json);
    match result {
        Ok(outcome) => {
            if let Err(e) = emit(&outcome.text, cli.out.as_deref()) {
                eprintln!("error: {e}");
                return ExitCode::from(2);
            }
            ExitCode::from(if outcome.pass { 0 } else { 1 })
        }
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Refuted(m)) => {
            if cli.json {
                let _ = emit(&serde_json::json!({ "pass": false, "error": m }).to_string(), cli.out.as_deref());
            } else {
                let _ = emit(&format!("FAIL {m}\n"), cli.out.as_deref());
            }
            ExitCode::from(1)
        }
    }
}

fn emit(text: &str, out: Option<&Path>) -> std::io::Result<()> {
    match out {
        Some(path) => std::fs::write(path, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("reports serialize") + "\n"
}

impl Context {
    fn field(&self) -> Result<Option<FieldDesc>, Failure> {
        if self.field.is_empty() {
            return Ok(None);
        }
        Ok(Some(io::parse_field(&self.field.join(" ")).map_err(|e| Failure::Usage(e.message))?))
    }

    fn poset(&self) -> Result<Option<Arc<Poset>>, Failure> {
        self.poset
            .as_deref()
            .map(|p| io::resolve_poset(p, None).map(Arc::new).map_err(|e| Failure::Usage(e.to_string())))
            .transpose()
    }

    fn require(&self) -> Result<(Arc<Poset>, FieldDesc), Failure> {
        let poset = self.poset()?.ok_or_else(|| Failure::Usage("--poset is required".into()))?;
        let field = self.field()?.ok_or_else(|| Failure::Usage("--field is required".into()))?;
        Ok((poset, field))
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn load_map(path: &Path, ctx: &Context) -> Result<LinearMap, Failure> {
    let text = read(path)?;
    io::parse_map(&text, ctx.poset()?.as_ref(), ctx.field()?, path.parent())
        .map_err(|e| e.in_file(path).into())
}

fn load_spec(path: &Path, ctx: &Context) -> Result<PreserverSpec, Failure> {
    let text = read(path)?;
    io::parse_spec(&text, ctx.poset()?.as_ref(), ctx.field()?, path.parent())
        .map_err(|e| e.in_file(path).into())
}

fn run(command: &Command, as_json: bool) -> Result<Outcome, Failure> {
    match command {
        Command::Build { spec, ctx } => {
            let reference = match &ctx.poset {
                Some(p) => p.clone(),
                None => poset_header(&read(spec)?).unwrap_or_default(),
            };
            let spec = load_spec(spec, ctx)?;
            let map = spec.build();
            let text = if as_json {
                let rows: Vec<Vec<String>> =
                    map.rows().map(|r| r.iter().map(ToString::to_string).collect()).collect();
                json(&serde_json::json!({ "field": map.field().to_string(), "matrix": rows }))
            } else {
                io::format_map(&map, &reference)
            };
            Ok(Outcome { text, pass: true })
        }
        Command::Classify { map, ctx } => {
            let map = load_map(map, ctx)?;
            let report = verifier::classification_report(&map)?;
            let pass = report.passed();
            let text = if as_json { json(&report) } else { classification_text(&report) };
            Ok(Outcome { text, pass })
        }
        Command::Check { map, ctx } => {
            let map = load_map(map, ctx)?;
            let verdicts = verifier::verify_lemmas_for_map(&map)?;
            Ok(verdict_outcome(&verdicts, as_json))
        }
        Command::Census { ctx, checkpoint, step } => {
            let (poset, field) = ctx.require()?;
            let report = census(&poset, field, checkpoint.as_deref(), (*step).max(1))?;
            let pass = report.passed();
            let text = if as_json { json(&report) } else { census_text(&report) };
            Ok(Outcome { text, pass })
        }
        Command::Lemmas { ctx, seed, trials, inverse } => {
            let (poset, field) = ctx.require()?;
            if *inverse {
                return match verifier::verify_inverse_preserver_results(&poset, field) {
                    Ok(v) => Ok(verdict_outcome(&v, as_json)),
                    Err(VerifyError::NotApplicable(why)) => {
                        let report = verifier::reproduce_example("z2-not-jordan")?;
                        let mut outcome = examples_outcome(&[report], as_json);
                        if !as_json {
                            outcome.text = format!("not applicable: {why}\n{}", outcome.text);
                        }
                        Ok(outcome)
                    }
                    Err(e) => Err(e.into()),
                };
            }
            let sample = match (seed, trials) {
                (None, None) => Sample::Exhaustive,
                (s, t) => Sample::Randomized { seed: s.unwrap_or(0), trials: t.unwrap_or(100) },
            };
            let verdicts = verifier::verify_lemma_suite(&poset, field, sample)?;
            Ok(verdict_outcome(&verdicts, as_json))
        }
        Command::Examples { ids } => {
            let ids: Vec<&str> = if ids.is_empty() {
                verifier::EXAMPLES.to_vec()
            } else {
                ids.iter().map(String::as_str).collect()
            };
            let reports = ids
                .iter()
                .map(|id| verifier::reproduce_example(id))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(examples_outcome(&reports, as_json))
        }
        Command::Criteria { spec, ctx } => {
            let specs = match spec {
                Some(path) => vec![load_spec(path, ctx)?],
                None => {
                    let (poset, field) = ctx.require()?;
                    verifier::enumerate_specs(&poset, field)?
                }
            };
            let mut verdicts = Vec::new();
            for s in &specs {
                verdicts.extend(verifier::verify_criteria(s)?);
            }
            Ok(verdict_outcome(&verdicts, as_json))
        }
    }
}

/// The `poset:` header of a map or spec file.
fn poset_header(text: &str) -> Option<String> {
    text.lines()
        .map(|l| l.split('#').next().unwrap_or("").trim())
        .find_map(|l| l.strip_prefix("poset:"))
        .map(|v| v.trim().to_string())
}

fn census(
    poset: &Arc<Poset>,
    field: FieldDesc,
    checkpoint: Option<&Path>,
    step: u64,
) -> Result<CensusReport, Failure> {
    let start = Instant::now();
    let mut partial = match checkpoint.filter(|p| p.exists()) {
        Some(path) => {
            let saved: PartialCensus = serde_json::from_str(&read(path)?)
                .map_err(|e| Failure::Usage(format!("{}: bad checkpoint: {e}", path.display())))?;
            if !saved.same_instance(&PartialCensus::new(poset, field)?) {
                return Err(Failure::Usage(format!("{}: checkpoint is for another instance", path.display())));
            }
            saved
        }
        None => PartialCensus::new(poset, field)?,
    };
    while !partial.is_complete() {
        let end = partial.next.saturating_add(step);
        partial.advance(poset, end)?;
        if let Some(path) = checkpoint {
            std::fs::write(path, json(&partial))
                .map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
        }
    }
    Ok(verifier::finish_census(poset, partial, start.elapsed().as_millis() as u64)?)
}

fn verdict_line(v: &LemmaVerdict) -> String {
    let mut line = format!("{} {} [{}]", if v.pass { "PASS" } else { "FAIL" }, v.lemma, v.instance);
    if let Some(w) = &v.witness {
        let _ = write!(line, ": {w}");
    }
    line
}

fn verdict_outcome(verdicts: &[LemmaVerdict], as_json: bool) -> Outcome {
    let pass = all_pass(verdicts);
    let text = if as_json {
        json(&serde_json::json!({ "pass": pass, "verdicts": verdicts }))
    } else {
        let failed = verdicts.iter().filter(|v| !v.pass).count();
        let mut text: String = verdicts.iter().map(|v| verdict_line(v) + "\n").collect();
        let _ = writeln!(text, "{} verdicts, {failed} failed", verdicts.len());
        text
    };
    Outcome { text, pass }
}

fn examples_outcome(reports: &[ExampleReport], as_json: bool) -> Outcome {
    let pass = reports.iter().all(|r| r.pass);
    let text = if as_json {
        json(&reports)
    } else {
        let mut text = String::new();
        for r in reports {
            let _ = writeln!(text, "{} {} ({}, {})", if r.pass { "PASS" } else { "FAIL" }, r.example, r.poset, r.field);
            for c in &r.checks {
                let _ = writeln!(text, "  {}", verdict_line(c));
            }
        }
        text
    };
    Outcome { text, pass }
}

fn census_text(r: &CensusReport) -> String {
    let mut t = String::new();
    let _ = writeln!(t, "{} over {}", r.poset, r.field);
    let _ = writeln!(t, "matrices scanned:      {}", r.matrices);
    let _ = writeln!(t, "oracle_count:          {}", r.oracle_count);
    let _ = writeln!(t, "theorem_count:         {}", r.theorem_count);
    if let Some(eq) = r.set_equal {
        let _ = writeln!(t, "set equality:          {eq}");
    }
    let _ = writeln!(t, "strong / injective:    {} / {}", r.strong_count, r.injective_lambda_count);
    let _ = writeln!(t, "bijective:             {} ({} not strong)", r.bijective_count, r.bijective_not_strong);
    let _ = writeln!(t, "elapsed:               {} ms", r.elapsed_ms);
    let _ = writeln!(t, "{}", if r.passed() { "PASS" } else { "FAIL" });
    t
}

fn classification_text(r: &ClassificationReport) -> String {
    let show = |v: Option<bool>| v.map_or("skipped".to_string(), |b| b.to_string());
    let mut t = String::new();
    let _ = writeln!(t, "{} over {}", r.poset, r.field);
    let _ = writeln!(t, "unital:             {}", r.verdicts.unital);
    let _ = writeln!(t, "preserver:          {}", show(r.verdicts.preserver));
    let _ = writeln!(t, "strong:             {}", show(r.verdicts.strong));
    let _ = writeln!(t, "inverse_preserving: {}", show(r.verdicts.inverse_preserving));
    let _ = writeln!(t, "jordan:             {}", r.verdicts.jordan);
    if let Some(l) = &r.lambda {
        let _ = writeln!(t, "{l}");
    }
    if let Some(psi) = &r.psi {
        let _ = writeln!(t, "psi:");
        for row in psi {
            let _ = writeln!(t, "  {}", row.join(" "));
        }
    }
    if let Some(f) = &r.refutation {
        let _ = writeln!(t, "refuted by [{}]: {}", f.lemma, f.detail);
    }
    let w = &r.witnesses;
    for (name, v) in [
        ("unit mapped to non-unit", &w.unit_to_non_unit),
        ("non-unit mapped to unit", &w.non_unit_to_unit),
        ("inverse not preserved at", &w.inverse),
        ("Jordan identity fails on", &w.jordan),
    ] {
        if let Some(v) = v {
            let _ = writeln!(t, "{name}: {v}");
        }
    }
    for s in &r.skipped {
        let _ = writeln!(t, "skipped {s}");
    }
    t
}
