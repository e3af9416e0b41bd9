//! Subcommand definitions and execution.
//!
//! Every command follows the same shape: load and strictly validate the
//! input documents, resolve options (flag > spec-document option > default),
//! run the computation, and package the result as text plus a JSON payload
//! for the structured report. Exit codes: 0 success, 1 usage/input error,
//! 2 budget exhausted, 3 undetermined verdict (classify/compare only).

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value as Json};
use tsirelson::scalar::decimal_string;
use tsirelson::{
    admissible, classify_admissible_seq, classify_finite, compare, enumerate_k, l1_block_witness,
    lambda_table, lambda_table_via_norm, norm, parse_rational, Budget, ComparisonVerdict, FinVec,
    LambdaTable, Rational, Saturation, SpaceSpec, Value,
};

use crate::report::{InputDigest, RunReport, REPORT_SCHEMA_VERSION};
use crate::specdoc::{self, DocOptions, SpecDocument};

/// Default enclosure precision in bits.
pub const DEFAULT_PRECISION: u32 = 64;
/// Default work budget (DP cells for the norm engine, functionals for the
/// dual-ball enumerator).
pub const DEFAULT_BUDGET: u64 = 10_000_000;
/// Default cap on family-index computations.
pub const DEFAULT_INDEX_CAP: u32 = 24;

/// Exact computations in mixed Tsirelson spaces.
#[derive(Debug, Parser)]
#[command(name = "tsirelson", version, about, disable_help_subcommand = true)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compute the norm of a finitely supported vector.
    Norm(NormArgs),
    /// Tabulate the fundamental function lambda_n = ||e_1 + ... + e_n||.
    Lambda(LambdaArgs),
    /// Locate a space among the c0 / lp / l1 prototypes.
    Classify(ClassifyArgs),
    /// Compare two spaces for total incomparability.
    Compare(CompareArgs),
    /// Compute the derived index of a family descriptor.
    Index(IndexArgs),
    /// Decide admissibility of successive finite sets against a family.
    Admissible(AdmissibleArgs),
    /// Enumerate norming functionals on a bounded support.
    Dualball(DualballArgs),
    /// Search for an all-ones block scale witnessing l1-like mass growth.
    Witness(WitnessArgs),
}

impl Command {
    pub fn common(&self) -> &CommonArgs {
        match self {
            Command::Norm(a) => &a.common,
            Command::Lambda(a) => &a.common,
            Command::Classify(a) => &a.common,
            Command::Compare(a) => &a.common,
            Command::Index(a) => &a.common,
            Command::Admissible(a) => &a.common,
            Command::Dualball(a) => &a.common,
            Command::Witness(a) => &a.common,
        }
    }
}

/// Output format for stdout.
#[derive(Debug, Copy, Clone, PartialEq, Eq, ValueEnum)]
pub enum Format {
    /// Human-readable report.
    Text,
    /// Table rows (lambda command only).
    Csv,
    /// Machine-readable report with a stable schema.
    Structured,
}

/// Flags shared by every command.
#[derive(Debug, Args)]
pub struct CommonArgs {
    /// Output format for stdout.
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Also write the machine-readable report to this path.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Enclosure precision in bits (irrational coefficient forms only).
    #[arg(long)]
    pub precision: Option<u32>,
    /// Work budget: DP cells for norm computations, functionals for the
    /// dual-ball enumerator.
    #[arg(long)]
    pub budget: Option<u64>,
    /// Worker threads for independent evaluations (lambda --method norm).
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..=256))]
    pub jobs: u32,
}

#[derive(Debug, Args)]
pub struct NormArgs {
    /// Path to the spec document.
    pub spec: PathBuf,
    /// Inline vector: a {"position": "p/q"} map or "segment a..b".
    #[arg(long, group = "vec")]
    pub vector: Option<String>,
    /// File containing the vector in the same syntax.
    #[arg(long, group = "vec", required_unless_present = "vector")]
    pub vector_file: Option<PathBuf>,
    #[command(flatten)]
    pub common: CommonArgs,
}

/// Which engine produces the lambda table.
#[derive(Debug, Copy, Clone, PartialEq, Eq, ValueEnum)]
pub enum LambdaMethod {
    /// Arity-only weight recursion (fast path; exact for rational weights).
    Weight,
    /// Full norm engine, one evaluation per n (always applicable).
    Norm,
}

#[derive(Debug, Args)]
pub struct LambdaArgs {
    /// Path to the spec document.
    pub spec: PathBuf,
    /// Largest n to tabulate.
    #[arg(long)]
    pub max: u32,
    /// Computation path.
    #[arg(long, value_enum, default_value_t = LambdaMethod::Weight)]
    pub method: LambdaMethod,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Args)]
pub struct ClassifyArgs {
    /// Path to the spec document.
    pub spec: PathBuf,
    /// Cap on family-index computations.
    #[arg(long)]
    pub index_cap: Option<u32>,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    /// Path to the left spec document.
    pub left: PathBuf,
    /// Path to the right spec document.
    pub right: PathBuf,
    /// Cap on family-index computations.
    #[arg(long)]
    pub index_cap: Option<u32>,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Args)]
pub struct IndexArgs {
    /// Family descriptor: inline JSON (starts with '{') or a file path.
    pub family: String,
    /// Cap on the derivative chain length.
    #[arg(long)]
    pub cap: Option<u32>,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Args)]
pub struct AdmissibleArgs {
    /// Family descriptor: inline JSON (starts with '{') or a file path.
    pub family: String,
    /// Successive sets as a JSON array of integer arrays, inline (starts
    /// with '[') or a file path.
    #[arg(long)]
    pub sets: String,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Args)]
pub struct DualballArgs {
    /// Path to the spec document.
    pub spec: PathBuf,
    /// Support bound: functionals live on positions 1..=support (at most 16).
    #[arg(long)]
    pub support: u32,
    /// Maximum tree height.
    #[arg(long, default_value_t = 3)]
    pub depth: u32,
    /// Enumerate signed leaves as well.
    #[arg(long)]
    pub signs: bool,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Args)]
pub struct WitnessArgs {
    /// Path to the spec document.
    pub spec: PathBuf,
    /// Number of blocks n; the witness certifies ||y_1+...+y_n|| >= n - epsilon.
    #[arg(long, default_value_t = 2)]
    pub blocks: u32,
    /// Tolerance epsilon as a rational in (0, 1).
    #[arg(long, default_value = "1/5")]
    pub epsilon: String,
    /// Largest block length scanned (scales with blocks^l <= this bound).
    #[arg(long, default_value_t = 1024)]
    pub max_block: u32,
    #[command(flatten)]
    pub common: CommonArgs,
}

// ---------------------------------------------------------------------------
// Execution
// ---------------------------------------------------------------------------

struct Outcome {
    command: &'static str,
    inputs: Vec<InputDigest>,
    options: Json,
    result: Json,
    text: String,
    csv: Option<String>,
    exit: i32,
}

/// Run a parsed command line; returns the process exit code.
pub fn run(cli: Cli, argv: &[String]) -> i32 {
    let started = Instant::now();
    if cli.command.common().format == Format::Csv && !matches!(cli.command, Command::Lambda(_)) {
        eprintln!("error: csv output is only defined for the lambda table command");
        return 1;
    }
    let outcome = match dispatch(&cli.command) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e:#}");
            return exit_code_for(&e);
        }
    };
    let report = RunReport {
        schema_version: REPORT_SCHEMA_VERSION,
        tool: "tsirelson",
        tool_version: env!("CARGO_PKG_VERSION"),
        command: outcome.command.to_string(),
        argv: argv.iter().skip(1).cloned().collect(),
        inputs: outcome.inputs,
        options: outcome.options,
        result: outcome.result,
    };
    if let Some(path) = &cli.command.common().out {
        if let Err(e) = fs::write(path, report.to_structured()) {
            eprintln!("error: cannot write report to {}: {e}", path.display());
            return 1;
        }
    }
    match cli.command.common().format {
        Format::Text => print!("{}", outcome.text),
        Format::Csv => print!("{}", outcome.csv.expect("csv availability checked above")),
        Format::Structured => print!("{}", report.to_structured()),
    }
    eprintln!("elapsed: {} ms", started.elapsed().as_millis());
    outcome.exit
}

fn dispatch(command: &Command) -> Result<Outcome> {
    match command {
        Command::Norm(a) => run_norm(a),
        Command::Lambda(a) => run_lambda(a),
        Command::Classify(a) => run_classify(a),
        Command::Compare(a) => run_compare(a),
        Command::Index(a) => run_index(a),
        Command::Admissible(a) => run_admissible(a),
        Command::Dualball(a) => run_dualball(a),
        Command::Witness(a) => run_witness(a),
    }
}

/// Budget exhaustion is the only error class with a dedicated exit code.
fn exit_code_for(e: &anyhow::Error) -> i32 {
    for cause in e.chain() {
        if let Some(tsirelson::Error::BudgetExceeded { .. }) =
            cause.downcast_ref::<tsirelson::Error>()
        {
            return 2;
        }
    }
    1
}

fn load_spec(path: &Path, role: &str, inputs: &mut Vec<InputDigest>) -> Result<SpecDocument> {
    let bytes = fs::read(path)
        .with_context(|| format!("cannot read spec file {}", path.display()))?;
    inputs.push(InputDigest::from_file(role, &path.display().to_string(), &bytes));
    let text = String::from_utf8(bytes)
        .with_context(|| format!("spec file {} is not UTF-8", path.display()))?;
    let doc = specdoc::parse_spec_document(&text)
        .with_context(|| format!("in spec file {}", path.display()))?;
    for w in &doc.warnings {
        eprintln!("warning: {w}");
    }
    Ok(doc)
}

/// Accept an argument either inline (JSON literal) or as a file path.
fn load_inline_or_file(arg: &str, role: &str, inputs: &mut Vec<InputDigest>) -> Result<String> {
    let t = arg.trim();
    if t.starts_with('{') || t.starts_with('[') {
        inputs.push(InputDigest::inline(role, arg));
        Ok(arg.to_string())
    } else {
        let bytes =
            fs::read(arg).with_context(|| format!("cannot read {role} file {arg:?}"))?;
        inputs.push(InputDigest::from_file(role, arg, &bytes));
        String::from_utf8(bytes).with_context(|| format!("{role} file {arg:?} is not UTF-8"))
    }
}

fn resolve_precision_budget(common: &CommonArgs, doc: Option<&DocOptions>) -> (u32, u64) {
    let precision = common
        .precision
        .or(doc.and_then(|d| d.precision))
        .unwrap_or(DEFAULT_PRECISION);
    let budget = common.budget.or(doc.and_then(|d| d.budget)).unwrap_or(DEFAULT_BUDGET);
    (precision, budget)
}

fn resolve_index_cap(flag: Option<u32>, doc: Option<&DocOptions>) -> u32 {
    flag.or(doc.and_then(|d| d.index_cap)).unwrap_or(DEFAULT_INDEX_CAP)
}

fn line(out: &mut String, text: impl AsRef<str>) {
    out.push_str(text.as_ref());
    out.push('\n');
}

// ---------------------------------------------------------------------------
// norm
// ---------------------------------------------------------------------------

fn run_norm(a: &NormArgs) -> Result<Outcome> {
    let mut inputs = Vec::new();
    let doc = load_spec(&a.spec, "spec", &mut inputs)?;
    let vector_text = match (&a.vector, &a.vector_file) {
        (Some(v), None) => {
            inputs.push(InputDigest::inline("vector", v));
            v.clone()
        }
        (None, Some(p)) => {
            let bytes = fs::read(p)
                .with_context(|| format!("cannot read vector file {}", p.display()))?;
            inputs.push(InputDigest::from_file("vector", &p.display().to_string(), &bytes));
            String::from_utf8(bytes)
                .with_context(|| format!("vector file {} is not UTF-8", p.display()))?
        }
        _ => bail!("exactly one of --vector and --vector-file is required"),
    };
    let x = specdoc::parse_vector_text(&vector_text)?;
    let (precision, budget) = resolve_precision_budget(&a.common, Some(&doc.options));
    let result = norm(&doc.space, &x, precision, &Budget::new(budget))?;

    let mut text = String::new();
    line(&mut text, format!("space: {}", doc.space));
    line(&mut text, format!("norm: {}", result.value));
    line(&mut text, format!("dp cells: {}", result.dp_cells));
    if let Some(w) = &result.witness {
        line(&mut text, "witness:");
        for l in w.to_string().lines() {
            line(&mut text, format!("  {l}"));
        }
    }
    let payload = json!({
        "space": doc.space.to_string(),
        "value": serde_json::to_value(&result.value)?,
        "dpCells": result.dp_cells,
        "witness": result.witness.as_ref().map(serde_json::to_value).transpose()?,
    });
    Ok(Outcome {
        command: "norm",
        inputs,
        options: json!({ "precision": precision, "budget": budget }),
        result: payload,
        text,
        csv: None,
        exit: 0,
    })
}

// ---------------------------------------------------------------------------
// lambda
// ---------------------------------------------------------------------------

fn csv_value(v: &Value) -> String {
    match v {
        Value::Exact(r) => tsirelson::format_rational(r),
        Value::Enclosure(i) => format!(
            "{}..{}",
            tsirelson::format_rational(&i.lo),
            tsirelson::format_rational(&i.hi)
        ),
    }
}

fn run_lambda(a: &LambdaArgs) -> Result<Outcome> {
    if a.max == 0 {
        bail!("--max must be at least 1");
    }
    let mut inputs = Vec::new();
    let doc = load_spec(&a.spec, "spec", &mut inputs)?;
    let (precision, budget) = resolve_precision_budget(&a.common, Some(&doc.options));
    let table = match a.method {
        LambdaMethod::Weight => {
            lambda_table(&doc.space, a.max, precision, &Budget::new(budget))?
        }
        LambdaMethod::Norm => {
            lambda_by_norm(&doc.space, a.max, precision, budget, a.common.jobs)?
        }
    };

    let mut text = String::new();
    line(&mut text, format!("space: {}", doc.space));
    line(&mut text, format!("method: {}", table.method));
    for (i, v) in table.values.iter().enumerate() {
        line(&mut text, format!("lambda_{} = {v}", i + 1));
    }
    line(&mut text, format!("dp cells: {}", table.dp_cells));

    let mut csv = String::from("n,lambda\n");
    for (i, v) in table.values.iter().enumerate() {
        line(&mut csv, format!("{},{}", i + 1, csv_value(v)));
    }

    let rows: Vec<Json> = table
        .values
        .iter()
        .enumerate()
        .map(|(i, v)| Ok(json!({ "n": i + 1, "lambda": serde_json::to_value(v)? })))
        .collect::<Result<_>>()?;
    let payload = json!({
        "space": doc.space.to_string(),
        "method": table.method,
        "dpCells": table.dp_cells,
        "rows": rows,
    });
    Ok(Outcome {
        command: "lambda",
        inputs,
        options: json!({
            "precision": precision,
            "budget": budget,
            "max": a.max,
            "jobs": a.common.jobs,
        }),
        result: payload,
        text,
        csv: Some(csv),
        exit: 0,
    })
}

/// Norm-engine lambda table; with several jobs the per-n evaluations run on
/// worker threads (each n is an independent computation, so the table is
/// identical to the sequential one).
fn lambda_by_norm(
    spec: &SpaceSpec,
    max: u32,
    precision: u32,
    budget: u64,
    jobs: u32,
) -> Result<LambdaTable> {
    let limit = Budget::new(budget);
    if jobs <= 1 {
        return Ok(lambda_table_via_norm(spec, max, precision, &limit)?);
    }
    let jobs = (jobs as usize).min(max as usize);
    type Slot = Option<std::result::Result<(Value, u64), tsirelson::Error>>;
    let mut slots: Vec<Slot> = Vec::new();
    slots.resize_with(max as usize, || None);
    let chunk = (max as usize).div_ceil(jobs);
    std::thread::scope(|scope| {
        for (c, slice) in slots.chunks_mut(chunk).enumerate() {
            let base = (c * chunk) as u32;
            let limit = &limit;
            scope.spawn(move || {
                for (i, slot) in slice.iter_mut().enumerate() {
                    let n = base + i as u32 + 1;
                    let r = FinVec::segment_ones(1, n)
                        .and_then(|x| norm(spec, &x, precision, limit))
                        .map(|nr| (nr.value, nr.dp_cells));
                    *slot = Some(r);
                }
            });
        }
    });
    let mut values = Vec::with_capacity(max as usize);
    let mut cells = 0u64;
    for slot in slots {
        let (v, c) = slot.expect("every slot is filled by its worker")?;
        values.push(v);
        cells += c;
    }
    Ok(LambdaTable { values, method: "norm-engine", dp_cells: cells })
}

// ---------------------------------------------------------------------------
// classify / compare
// ---------------------------------------------------------------------------

fn run_classify(a: &ClassifyArgs) -> Result<Outcome> {
    let mut inputs = Vec::new();
    let doc = load_spec(&a.spec, "spec", &mut inputs)?;
    let (precision, budget) = resolve_precision_budget(&a.common, Some(&doc.options));
    let cap = resolve_index_cap(a.index_cap, Some(&doc.options));
    let b = Budget::new(budget);
    let report = match &doc.space {
        SpaceSpec::FiniteMixed { .. } => classify_finite(&doc.space, cap, precision, &b)?,
        SpaceSpec::AdmissibleSeq { .. } => classify_admissible_seq(&doc.space, precision, &b)?,
    };
    let exit = if matches!(report.saturation, Saturation::Undetermined) { 3 } else { 0 };
    let text = report.to_string();
    let payload = serde_json::to_value(&report)?;
    Ok(Outcome {
        command: "classify",
        inputs,
        options: json!({ "precision": precision, "budget": budget, "indexCap": cap }),
        result: payload,
        text,
        csv: None,
        exit,
    })
}

fn run_compare(a: &CompareArgs) -> Result<Outcome> {
    let mut inputs = Vec::new();
    let left = load_spec(&a.left, "spec-left", &mut inputs)?;
    let right = load_spec(&a.right, "spec-right", &mut inputs)?;
    let precision = a
        .common
        .precision
        .or(left.options.precision)
        .or(right.options.precision)
        .unwrap_or(DEFAULT_PRECISION);
    let budget = a
        .common
        .budget
        .or(left.options.budget)
        .or(right.options.budget)
        .unwrap_or(DEFAULT_BUDGET);
    let cap = a
        .index_cap
        .or(left.options.index_cap)
        .or(right.options.index_cap)
        .unwrap_or(DEFAULT_INDEX_CAP);
    let report = compare(&left.space, &right.space, cap, precision, &Budget::new(budget))?;
    let exit = if matches!(report.verdict, ComparisonVerdict::EvidenceOnly) { 3 } else { 0 };
    let text = report.to_string();
    let payload = serde_json::to_value(&report)?;
    Ok(Outcome {
        command: "compare",
        inputs,
        options: json!({ "precision": precision, "budget": budget, "indexCap": cap }),
        result: payload,
        text,
        csv: None,
        exit,
    })
}

// ---------------------------------------------------------------------------
// index / admissible
// ---------------------------------------------------------------------------

fn run_index(a: &IndexArgs) -> Result<Outcome> {
    let mut inputs = Vec::new();
    let text_in = load_inline_or_file(&a.family, "family", &mut inputs)?;
    let (family, warnings) = specdoc::parse_family_text(&text_in)?;
    for w in &warnings {
        eprintln!("warning: {w}");
    }
    let cap = a.cap.unwrap_or(DEFAULT_INDEX_CAP);
    let idx = family.index(cap)?;
    let mut text = String::new();
    line(&mut text, format!("family: {family}"));
    line(&mut text, format!("index cap: {cap}"));
    line(&mut text, format!("index: {idx}"));
    let payload = json!({
        "family": family.to_string(),
        "cap": cap,
        "index": serde_json::to_value(idx)?,
    });
    Ok(Outcome {
        command: "index",
        inputs,
        options: json!({ "cap": cap }),
        result: payload,
        text,
        csv: None,
        exit: 0,
    })
}

fn run_admissible(a: &AdmissibleArgs) -> Result<Outcome> {
    let mut inputs = Vec::new();
    let fam_text = load_inline_or_file(&a.family, "family", &mut inputs)?;
    let (family, warnings) = specdoc::parse_family_text(&fam_text)?;
    for w in &warnings {
        eprintln!("warning: {w}");
    }
    let sets_text = load_inline_or_file(&a.sets, "sets", &mut inputs)?;
    let sets = specdoc::parse_sets_text(&sets_text)?;
    let witness = admissible(&family, &sets)?;
    let mut text = String::new();
    line(&mut text, format!("family: {family}"));
    let rendered: Vec<String> = sets.iter().map(|s| s.to_string()).collect();
    line(&mut text, format!("sets: {}", rendered.join(" ")));
    match &witness {
        Some(w) => {
            line(&mut text, "admissible: yes");
            line(&mut text, format!("marks: {}", w.marks));
        }
        None => line(&mut text, "admissible: no"),
    }
    let payload = json!({
        "family": family.to_string(),
        "sets": serde_json::to_value(&sets)?,
        "admissible": witness.is_some(),
        "marks": witness.as_ref().map(|w| serde_json::to_value(&w.marks)).transpose()?,
    });
    Ok(Outcome {
        command: "admissible",
        inputs,
        options: json!({}),
        result: payload,
        text,
        csv: None,
        exit: 0,
    })
}

// ---------------------------------------------------------------------------
// dualball / witness
// ---------------------------------------------------------------------------

fn run_dualball(a: &DualballArgs) -> Result<Outcome> {
    let mut inputs = Vec::new();
    let doc = load_spec(&a.spec, "spec", &mut inputs)?;
    let (precision, budget) = resolve_precision_budget(&a.common, Some(&doc.options));
    let functionals = enumerate_k(
        &doc.space,
        a.support,
        a.depth,
        a.signs,
        precision,
        &Budget::new(budget),
    )?;
    let mut text = String::new();
    line(&mut text, format!("space: {}", doc.space));
    line(&mut text, format!("support: 1..={}", a.support));
    line(&mut text, format!("height: <= {}", a.depth));
    line(&mut text, format!("signs: {}", if a.signs { "on" } else { "off" }));
    line(&mut text, format!("functionals: {}", functionals.len()));
    for f in &functionals {
        line(&mut text, format!("  {f}"));
    }
    let payload = json!({
        "space": doc.space.to_string(),
        "support": a.support,
        "height": a.depth,
        "signs": a.signs,
        "count": functionals.len(),
        "functionals": serde_json::to_value(&functionals)?,
    });
    Ok(Outcome {
        command: "dualball",
        inputs,
        options: json!({ "precision": precision, "budget": budget }),
        result: payload,
        text,
        csv: None,
        exit: 0,
    })
}

fn run_witness(a: &WitnessArgs) -> Result<Outcome> {
    let mut inputs = Vec::new();
    let doc = load_spec(&a.spec, "spec", &mut inputs)?;
    let (precision, budget) = resolve_precision_budget(&a.common, Some(&doc.options));
    let _ = precision; // the dyadic probe has its own fixed-point precision
    let eps: Rational = parse_rational(&a.epsilon)?;
    if eps <= Rational::new(0.into(), 1.into()) || eps >= Rational::new(1.into(), 1.into()) {
        bail!("--epsilon must lie strictly between 0 and 1, got {}", a.epsilon);
    }
    let witness = l1_block_witness(&doc.space, a.blocks, &eps, a.max_block, &Budget::new(budget))?;
    let mut text = String::new();
    line(&mut text, format!("space: {}", doc.space));
    line(
        &mut text,
        format!("blocks: {}, epsilon: {}, max block length: {}", a.blocks, a.epsilon, a.max_block),
    );
    match &witness {
        Some(w) => {
            line(&mut text, format!("witness found: scale {}, block length {}", w.scale, w.block));
            line(
                &mut text,
                format!(
                    "certified ratio {} >= threshold {}",
                    decimal_string(&w.certified_ratio, 6),
                    tsirelson::format_rational(&w.threshold)
                ),
            );
        }
        None => line(&mut text, "no witness within the scanned scales"),
    }
    let payload = json!({
        "space": doc.space.to_string(),
        "blocks": a.blocks,
        "epsilon": a.epsilon,
        "maxBlock": a.max_block,
        "found": witness.is_some(),
        "witness": witness.as_ref().map(serde_json::to_value).transpose()?,
    });
    Ok(Outcome {
        command: "witness",
        inputs,
        options: json!({ "budget": budget }),
        result: payload,
        text,
        csv: None,
        exit: 0,
    })
}

// ---------------------------------------------------------------------------
