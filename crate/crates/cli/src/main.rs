use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use nereval::ingest::layout::{self, corpus_digest, hypothesis_dir, load_corpus, write_set};
use nereval::ingest::{corpus_stats, validate, Diagnostic};
use nereval::model::{Corpus, GOLD};
use nereval::perturb::{expected_counts, perturb_corpus, ErrorModel};
use nereval::report::{diff, evaluate_corpus, render_stats, Format, Layout, MetricReport, Strata};
use serde_json::json;

/// Findings such as validation errors.
const EXIT_FINDINGS: u8 = 1;
/// Bad usage, unreadable input or failed writes.
const EXIT_USAGE: u8 = 2;

#[derive(Parser)]
#[command(name = "nereval", version, about = "Partial-match aware named-entity evaluation")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Corpus directory holding manifest.json, gold/ and hyp/.
    #[arg(long, global = true, default_value = ".")]
    corpus: PathBuf,
    #[arg(long, global = true, value_enum, default_value_t = FormatArg::Markdown)]
    format: FormatArg,
    /// Decimal places in rendered values.
    #[arg(long, global = true, default_value_t = 2, value_parser = clap::value_parser!(u32).range(0..=9))]
    digits: u32,
    /// Treat warnings as findings.
    #[arg(long, global = true)]
    strict: bool,
    /// Worker threads (default: available cores).
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..=1024))]
    jobs: Option<u64>,
    /// Output file, or output directory for `evaluate`. Defaults to stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Check a corpus and report diagnostics.
    Validate,
    /// Documents per category and mentions per type.
    Stats,
    /// Score hypotheses against gold and write spatial and typical reports.
    Evaluate {
        /// Annotator to evaluate; repeat for several (default: all).
        #[arg(long = "annotator")]
        annotators: Vec<String>,
        #[arg(long, value_enum, value_delimiter = ',', default_values_t = [StrataArg::Overall, StrataArg::Types, StrataArg::Categories])]
        strata: Vec<StrataArg>,
    },
    /// Derive a hypothesis annotator from gold by injecting seeded errors.
    Perturb {
        /// Error model JSON.
        #[arg(long)]
        model: PathBuf,
        /// Name of the annotator to create.
        #[arg(long)]
        name: String,
        /// Replace an existing annotator of the same name.
        #[arg(long)]
        overwrite: bool,
    },
    /// Per-cell difference `b - a` between two reports (json or csv).
    Diff { a: PathBuf, b: PathBuf },
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
    Markdown,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Csv => Format::Csv,
            FormatArg::Json => Format::Json,
            FormatArg::Markdown => Format::Markdown,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum StrataArg {
    Overall,
    Types,
    Categories,
}

impl StrataArg {
    fn strata(self) -> Strata {
        match self {
            StrataArg::Overall => Strata::Overall,
            StrataArg::Types => Strata::Types,
            StrataArg::Categories => Strata::Categories,
        }
    }

    fn name(self) -> &'static str {
        match self {
            StrataArg::Overall => "overall",
            StrataArg::Types => "types",
            StrataArg::Categories => "categories",
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}

fn run(cli: &Cli) -> Result<u8> {
    let c = &cli.common;
    match &cli.command {
        Command::Validate => cmd_validate(c),
        Command::Stats => cmd_stats(c),
        Command::Evaluate { annotators, strata } => cmd_evaluate(c, annotators, strata),
        Command::Perturb { model, name, overwrite } => cmd_perturb(c, model, name, *overwrite),
        Command::Diff { a, b } => cmd_diff(c, a, b),
    }
}

/// Loads and validates the corpus, printing every diagnostic. The flag is
/// true when the diagnostics amount to findings.
fn load(c: &Common) -> Result<(Corpus, bool)> {
    let parsed = load_corpus(&c.corpus)?;
    let mut diagnostics = parsed.diagnostics;
    diagnostics.extend(validate(&parsed.value));
    Ok((parsed.value, report_diagnostics(&diagnostics, c.strict)))
}

fn report_diagnostics(diagnostics: &[Diagnostic], strict: bool) -> bool {
    for d in diagnostics {
        eprintln!("{d}");
    }
    let errors = diagnostics.iter().filter(|d| d.is_error()).count();
    let warnings = diagnostics.len() - errors;
    if !diagnostics.is_empty() {
        eprintln!("{errors} error(s), {warnings} warning(s)");
    }
    errors > 0 || (strict && warnings > 0)
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text).with_context(|| format!("cannot write {}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn cmd_validate(c: &Common) -> Result<u8> {
    let (_, findings) = load(c)?;
    Ok(if findings { EXIT_FINDINGS } else { 0 })
}

fn cmd_stats(c: &Common) -> Result<u8> {
    let (corpus, findings) = load(c)?;
    if findings {
        return Ok(EXIT_FINDINGS);
    }
    let stats = corpus_stats(&corpus).map_err(|e| anyhow!("{} validation error(s)", e.diagnostics.len()))?;
    emit(c.out.as_deref(), &render_stats(&stats, c.format.into()))?;
    Ok(0)
}

fn cmd_evaluate(c: &Common, requested: &[String], strata: &[StrataArg]) -> Result<u8> {
    let (corpus, findings) = load(c)?;
    if findings {
        return Ok(EXIT_FINDINGS);
    }
    let available: Vec<String> = corpus.annotators().map(str::to_string).collect();
    let mut annotators = if requested.is_empty() {
        available.clone()
    } else {
        requested.to_vec()
    };
    annotators.sort();
    annotators.dedup();
    if let Some(missing) = annotators.iter().find(|a| !available.contains(a)) {
        bail!(
            "no hypotheses for annotator `{missing}` (available: {})",
            available.join(", ")
        );
    }
    if annotators.is_empty() {
        eprintln!(
            "no hypothesis annotators found under {}",
            c.corpus.join(layout::HYP_DIR).display()
        );
        return Ok(EXIT_FINDINGS);
    }

    let mut selected: Vec<StrataArg> = Vec::new();
    for s in strata {
        if !selected.contains(s) {
            selected.push(*s);
        }
    }
    let jobs = c
        .jobs
        .map(|j| j as usize)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    let table = evaluate_corpus(
        &corpus,
        &annotators,
        &selected.iter().map(|s| s.strata()).collect::<Vec<_>>(),
        jobs,
    )?;
    let report = MetricReport::from_table(&table, c.digits);
    let format: Format = c.format.into();
    let spatial = report.render(Layout::Spatial, format);
    let typical = report.render(Layout::Typical, format);

    let Some(dir) = &c.out else {
        print!("{spatial}\n{typical}");
        return Ok(0);
    };
    fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
    let ext = format.extension();
    let manifest = json!({
        "tool": env!("CARGO_PKG_NAME"),
        "version": env!("CARGO_PKG_VERSION"),
        "command": "evaluate",
        "config": {
            "annotators": annotators,
            "strata": selected.iter().map(|s| s.name()).collect::<Vec<_>>(),
            "digits": c.digits,
            "format": ext,
            "strict": c.strict,
        },
        "corpus_digest": corpus_digest(&c.corpus)?,
        "outputs": [format!("spatial.{ext}"), format!("typical.{ext}")],
    });
    emit(Some(&dir.join(format!("spatial.{ext}"))), &spatial)?;
    emit(Some(&dir.join(format!("typical.{ext}"))), &typical)?;
    let manifest = serde_json::to_string_pretty(&manifest)? + "\n";
    emit(Some(&dir.join("run-manifest.json")), &manifest)?;
    Ok(0)
}

fn cmd_perturb(c: &Common, model_path: &Path, name: &str, overwrite: bool) -> Result<u8> {
    let raw = fs::read_to_string(model_path).with_context(|| format!("cannot read {}", model_path.display()))?;
    let model: ErrorModel =
        serde_json::from_str(&raw).with_context(|| format!("invalid error model {}", model_path.display()))?;
    model.validate()?;
    if name.is_empty() || name == GOLD || name.contains(['/', '\\']) || name.starts_with('.') {
        bail!("`{name}` cannot be used as an annotator name");
    }

    let (corpus, findings) = load(c)?;
    if findings {
        return Ok(EXIT_FINDINGS);
    }
    let dir = hypothesis_dir(&c.corpus, name);
    if dir.exists() {
        if !overwrite {
            bail!(
                "annotator `{name}` already exists at {}; pass --overwrite to replace it",
                dir.display()
            );
        }
        fs::remove_dir_all(&dir).with_context(|| format!("cannot remove {}", dir.display()))?;
    }

    let result = perturb_corpus(&corpus, &model, name)?;
    for set in result.hypotheses.values() {
        write_set(&dir, set)?;
    }
    let ledger_path = match &c.out {
        Some(p) => p.clone(),
        None => c.corpus.join("ledgers").join(format!("{name}.json")),
    };
    if let Some(parent) = ledger_path.parent() {
        fs::create_dir_all(parent).with_context(|| format!("cannot create {}", parent.display()))?;
    }
    let documents: serde_json::Map<String, serde_json::Value> = result
        .ledgers
        .iter()
        .map(|(id, l)| (id.clone(), json!({ "edits": l.edits, "expected": expected_counts(l) })))
        .collect();
    let ledger = json!({ "annotator": name, "model": model, "documents": documents });
    emit(Some(&ledger_path), &(serde_json::to_string_pretty(&ledger)? + "\n"))?;
    eprintln!(
        "wrote {} hypothesis file(s) to {} and the ledger to {}",
        result.hypotheses.len(),
        dir.display(),
        ledger_path.display()
    );
    let findings = report_diagnostics(&result.diagnostics, c.strict);
    Ok(if findings { EXIT_FINDINGS } else { 0 })
}

fn read_report(path: &Path, digits: u32) -> Result<MetricReport> {
    let text = fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    let report = if path.extension().is_some_and(|e| e == "csv") {
        MetricReport::from_csv(&text, digits)
    } else {
        MetricReport::from_json(&text, digits)
    };
    report.with_context(|| format!("in {}", path.display()))
}

fn cmd_diff(c: &Common, a: &Path, b: &Path) -> Result<u8> {
    let (ra, rb) = (read_report(a, c.digits)?, read_report(b, c.digits)?);
    let delta = diff(&ra, &rb)?;
    let layout = delta
        .layout()
        .ok_or_else(|| anyhow!("reports hold neither a complete spatial nor a typical layout"))?;
    emit(c.out.as_deref(), &delta.render(layout, c.format.into()))?;
    Ok(0)
}
