//! Stratified aggregation and table rendering.
//!
//! Counts are pooled within each stratum before any division (micro-averaging).
//! Rows are the whole corpus, then one per entity type, then one per article
//! category; each annotator contributes a group of columns.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::align::{align, exact_counts, spatial_counts, typed_counts, AlignError, SpatialCounts, Tally, TypedCounts};
use crate::ingest::CorpusStats;
use crate::metrics::{format_decimal, parse_decimal, partial_metrics, precision, recall, Rational};
use crate::model::{AnnotationSet, Category, Corpus, Document, EntityType};

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("duplicate counts for annotator `{annotator}` on document `{doc_id}`")]
    DuplicateRecord { annotator: String, doc_id: String },
    #[error("unknown format `{0}` (expected csv, json or markdown)")]
    UnknownFormat(String),
    #[error("unknown layout `{0}` (expected spatial or typical)")]
    UnknownLayout(String),
    #[error("unknown strata selector `{0}` (expected overall, types or categories)")]
    UnknownStrata(String),
    #[error("reports cover different strata: {0}")]
    StratumMismatch(String),
    #[error("document `{doc_id}`: {source}")]
    Align {
        doc_id: String,
        #[source]
        source: AlignError,
    },
    #[error("cannot read report: {0}")]
    Parse(String),
}

/// Row of a report table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Scope {
    Overall,
    ByType(EntityType),
    ByCategory(Category),
}

impl Scope {
    pub fn label(&self) -> &'static str {
        match self {
            Scope::Overall => "Overall",
            Scope::ByType(t) => t.as_str(),
            Scope::ByCategory(c) => c.as_str(),
        }
    }

    pub fn from_label(label: &str) -> Option<Scope> {
        if label == "Overall" {
            return Some(Scope::Overall);
        }
        label
            .parse::<EntityType>()
            .map(Scope::ByType)
            .or_else(|_| label.parse::<Category>().map(Scope::ByCategory))
            .ok()
    }
}

impl fmt::Display for Scope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct StratumKey {
    pub annotator: String,
    pub scope: Scope,
}

/// Which groups of rows to produce.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Strata {
    Overall,
    Types,
    Categories,
}

impl Strata {
    pub const ALL: &'static [Strata] = &[Strata::Overall, Strata::Types, Strata::Categories];

    fn scopes(&self) -> Vec<Scope> {
        match self {
            Strata::Overall => vec![Scope::Overall],
            Strata::Types => EntityType::ALL.iter().map(|&t| Scope::ByType(t)).collect(),
            Strata::Categories => Category::ALL.iter().map(|&c| Scope::ByCategory(c)).collect(),
        }
    }

    /// Parses a comma-separated list such as `overall,types`.
    pub fn parse_list(s: &str) -> Result<Vec<Strata>, ReportError> {
        s.split(',')
            .map(str::trim)
            .filter(|p| !p.is_empty())
            .map(str::parse)
            .collect()
    }
}

impl FromStr for Strata {
    type Err = ReportError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "overall" => Ok(Strata::Overall),
            "types" => Ok(Strata::Types),
            "categories" => Ok(Strata::Categories),
            other => Err(ReportError::UnknownStrata(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct StratumCounts {
    pub spatial: SpatialCounts,
    pub exact: Tally,
    pub typed: TypedCounts,
}

impl std::ops::AddAssign<&StratumCounts> for StratumCounts {
    fn add_assign(&mut self, rhs: &StratumCounts) {
        self.spatial += rhs.spatial;
        self.exact += rhs.exact;
        self.typed += rhs.typed.clone();
    }
}

/// Counts for one annotator on one document.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DocumentCounts {
    pub annotator: String,
    pub doc_id: String,
    pub category: Category,
    pub whole: StratumCounts,
    /// Spatial and exact counts from aligning only mentions of one type on
    /// both sides.
    pub per_type: BTreeMap<EntityType, StratumCounts>,
}

pub fn evaluate_document(
    annotator: &str,
    doc: &Document,
    gold: &AnnotationSet,
    hyp: &AnnotationSet,
) -> Result<DocumentCounts, AlignError> {
    let a = align(&gold.mentions, &hyp.mentions)?;
    let typed = typed_counts(&a, &gold.mentions, &hyp.mentions);
    let mut per_type = BTreeMap::new();
    for &ty in EntityType::ALL {
        let refs = gold.restricted_to(ty);
        let ests = hyp.restricted_to(ty);
        let scoped = align(&refs, &ests)?;
        per_type.insert(
            ty,
            StratumCounts {
                spatial: spatial_counts(&scoped),
                exact: exact_counts(&scoped),
                typed: typed.scoped(ty),
            },
        );
    }
    Ok(DocumentCounts {
        annotator: annotator.to_string(),
        doc_id: doc.id.clone(),
        category: doc.category,
        whole: StratumCounts {
            spatial: spatial_counts(&a),
            exact: exact_counts(&a),
            typed,
        },
        per_type,
    })
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountTable {
    pub cells: BTreeMap<StratumKey, StratumCounts>,
}

impl CountTable {
    pub fn get(&self, annotator: &str, scope: Scope) -> Option<&StratumCounts> {
        self.cells.get(&StratumKey {
            annotator: annotator.to_string(),
            scope,
        })
    }

    pub fn annotators(&self) -> BTreeSet<&str> {
        self.cells.keys().map(|k| k.annotator.as_str()).collect()
    }
}

/// Sums per-document counts into every selected stratum.
pub fn aggregate(records: &[DocumentCounts], strata: &[Strata]) -> Result<CountTable, ReportError> {
    let mut seen = BTreeSet::new();
    let mut table = CountTable::default();
    let scopes: BTreeSet<Scope> = strata.iter().flat_map(Strata::scopes).collect();

    for r in records {
        if !seen.insert((r.annotator.as_str(), r.doc_id.as_str())) {
            return Err(ReportError::DuplicateRecord {
                annotator: r.annotator.clone(),
                doc_id: r.doc_id.clone(),
            });
        }
        for &scope in &scopes {
            let key = StratumKey {
                annotator: r.annotator.clone(),
                scope,
            };
            let cell = table.cells.entry(key).or_default();
            match scope {
                Scope::Overall => *cell += &r.whole,
                Scope::ByType(t) => *cell += &r.per_type[&t],
                Scope::ByCategory(c) if c == r.category => *cell += &r.whole,
                Scope::ByCategory(_) => {}
            }
        }
    }
    Ok(table)
}

/// Evaluates every selected annotator against gold on every document, spread
/// over `jobs` worker threads. A document an annotator has no file for counts
/// as an empty hypothesis.
pub fn evaluate_corpus(
    corpus: &Corpus,
    annotators: &[String],
    strata: &[Strata],
    jobs: usize,
) -> Result<CountTable, ReportError> {
    let work: Vec<(&str, &Document)> = annotators
        .iter()
        .flat_map(|a| corpus.documents.values().map(move |d| (a.as_str(), d)))
        .collect();

    let run = |(annotator, doc): (&str, &Document)| -> Result<DocumentCounts, ReportError> {
        let empty_gold = AnnotationSet::new(&doc.id, crate::model::GOLD);
        let empty_hyp = AnnotationSet::new(&doc.id, annotator);
        let gold = corpus.gold.get(&doc.id).unwrap_or(&empty_gold);
        let hyp = corpus
            .hypotheses
            .get(annotator)
            .and_then(|sets| sets.get(&doc.id))
            .unwrap_or(&empty_hyp);
        evaluate_document(annotator, doc, gold, hyp).map_err(|source| ReportError::Align {
            doc_id: doc.id.clone(),
            source,
        })
    };

    let jobs = jobs.max(1);
    let records: Vec<DocumentCounts> = if jobs == 1 || work.len() < 2 {
        work.into_iter().map(run).collect::<Result<_, _>>()?
    } else {
        let chunk = work.len().div_ceil(jobs);
        std::thread::scope(|s| {
            let handles: Vec<_> = work
                .chunks(chunk)
                .map(|part| s.spawn(|| part.iter().copied().map(run).collect::<Result<Vec<_>, _>>()))
                .collect();
            let mut out = Vec::new();
            for h in handles {
                out.extend(h.join().expect("evaluation worker panicked")?);
            }
            Ok::<_, ReportError>(out)
        })?
    };
    aggregate(&records, strata)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Measure {
    FullPrecision,
    PartialPrecision,
    FullRecall,
    PartialRecall,
    TotalPrecision,
    TotalRecall,
    Precision,
    Recall,
}

impl Measure {
    pub const ALL: &'static [Measure] = &[
        Measure::FullPrecision,
        Measure::PartialPrecision,
        Measure::FullRecall,
        Measure::PartialRecall,
        Measure::TotalPrecision,
        Measure::TotalRecall,
        Measure::Precision,
        Measure::Recall,
    ];

    pub fn key(&self) -> &'static str {
        match self {
            Measure::FullPrecision => "full_precision",
            Measure::PartialPrecision => "partial_precision",
            Measure::FullRecall => "full_recall",
            Measure::PartialRecall => "partial_recall",
            Measure::TotalPrecision => "total_precision",
            Measure::TotalRecall => "total_recall",
            Measure::Precision => "precision",
            Measure::Recall => "recall",
        }
    }

    /// Column heading used in CSV and markdown tables.
    pub fn heading(&self) -> &'static str {
        match self {
            Measure::FullPrecision => "FP",
            Measure::PartialPrecision => "PP",
            Measure::FullRecall => "FR",
            Measure::PartialRecall => "PR",
            Measure::TotalPrecision => "TotalP",
            Measure::TotalRecall => "TotalR",
            Measure::Precision => "Precision",
            Measure::Recall => "Recall",
        }
    }

    fn from_key(key: &str) -> Option<Measure> {
        Measure::ALL.iter().copied().find(|m| m.key() == key)
    }

    fn from_heading(h: &str) -> Option<Measure> {
        Measure::ALL.iter().copied().find(|m| m.heading() == h)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Layout {
    /// Full and partial precision and recall.
    Spatial,
    /// Type-aware precision and recall.
    Typical,
}

impl Layout {
    pub fn measures(&self) -> &'static [Measure] {
        match self {
            Layout::Spatial => &[
                Measure::FullPrecision,
                Measure::PartialPrecision,
                Measure::FullRecall,
                Measure::PartialRecall,
            ],
            Layout::Typical => &[Measure::Precision, Measure::Recall],
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Layout::Spatial => "spatial",
            Layout::Typical => "typical",
        }
    }
}

impl FromStr for Layout {
    type Err = ReportError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "spatial" => Ok(Layout::Spatial),
            "typical" => Ok(Layout::Typical),
            other => Err(ReportError::UnknownLayout(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Format {
    Csv,
    Json,
    Markdown,
}

impl Format {
    pub fn extension(&self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
            Format::Markdown => "md",
        }
    }
}

impl FromStr for Format {
    type Err = ReportError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            "markdown" | "md" => Ok(Format::Markdown),
            other => Err(ReportError::UnknownFormat(other.to_string())),
        }
    }
}

pub const UNDEFINED: &str = "—";

/// `None` is an undefined measure (empty denominator).
pub type Row = BTreeMap<Measure, Option<Rational>>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MetricReport {
    pub digits: u32,
    /// Prefix positive values with `+` when rendering (used for differences).
    pub signed: bool,
    pub values: BTreeMap<String, BTreeMap<Scope, Row>>,
}

impl MetricReport {
    pub fn empty(digits: u32) -> Self {
        MetricReport {
            digits,
            signed: false,
            values: BTreeMap::new(),
        }
    }

    pub fn from_table(table: &CountTable, digits: u32) -> Self {
        let mut report = MetricReport::empty(digits);
        for (key, counts) in &table.cells {
            let m = partial_metrics(&counts.spatial);
            let t = counts.typed.overall;
            let row: Row = [
                (Measure::FullPrecision, m.pre_full.value()),
                (Measure::PartialPrecision, m.pre_partial.value()),
                (Measure::FullRecall, m.rec_full.value()),
                (Measure::PartialRecall, m.rec_partial.value()),
                (Measure::TotalPrecision, m.pre_total.value()),
                (Measure::TotalRecall, m.rec_total.value()),
                (Measure::Precision, precision(t.tp, t.fp).value()),
                (Measure::Recall, recall(t.tp, t.fn_).value()),
            ]
            .into_iter()
            .collect();
            report
                .values
                .entry(key.annotator.clone())
                .or_default()
                .insert(key.scope, row);
        }
        report
    }

    pub fn get(&self, annotator: &str, scope: Scope, measure: Measure) -> Option<Option<Rational>> {
        self.values.get(annotator)?.get(&scope)?.get(&measure).copied()
    }

    /// Union of row scopes over all annotators, in table order.
    pub fn scopes(&self) -> BTreeSet<Scope> {
        self.values.values().flat_map(|rows| rows.keys().copied()).collect()
    }

    /// The layout whose columns this report carries, if any.
    pub fn layout(&self) -> Option<Layout> {
        let present: BTreeSet<Measure> = self
            .values
            .values()
            .flat_map(|rows| rows.values().flat_map(|r| r.keys().copied()))
            .collect();
        [Layout::Spatial, Layout::Typical]
            .into_iter()
            .find(|l| l.measures().iter().all(|m| present.contains(m)))
    }

    /// Keeps only the measures of `layout`, each rounded to `digits`. This is
    /// exactly what survives a render/parse round trip.
    pub fn as_rendered(&self, layout: Layout) -> MetricReport {
        let scale = Rational::from_integer(10i64.pow(self.digits));
        let values = self
            .values
            .iter()
            .map(|(ann, rows)| {
                let rows = rows
                    .iter()
                    .map(|(&scope, row)| {
                        let kept = layout
                            .measures()
                            .iter()
                            .map(|m| {
                                let v = row.get(m).copied().flatten().map(|v| {
                                    let scaled = crate::metrics::round_scaled(v, self.digits) as i64;
                                    Rational::from_integer(scaled) / scale
                                });
                                (*m, v)
                            })
                            .collect();
                        (scope, kept)
                    })
                    .collect();
                (ann.clone(), rows)
            })
            .collect();
        MetricReport {
            digits: self.digits,
            signed: self.signed,
            values,
        }
    }

    fn cell(&self, v: Option<Rational>) -> String {
        match v {
            Some(v) => format_decimal(v, self.digits, self.signed),
            None => UNDEFINED.to_string(),
        }
    }

    fn columns(&self, layout: Layout) -> Vec<(String, Measure)> {
        self.values
            .keys()
            .flat_map(|ann| layout.measures().iter().map(move |&m| (ann.clone(), m)))
            .collect()
    }

    pub fn render(&self, layout: Layout, format: Format) -> String {
        match format {
            Format::Csv => self.render_csv(layout),
            Format::Json => self.render_json(layout),
            Format::Markdown => self.render_markdown(layout),
        }
    }

    fn render_csv(&self, layout: Layout) -> String {
        let columns = self.columns(layout);
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut header = vec!["stratum".to_string()];
        header.extend(columns.iter().map(|(a, m)| format!("{a} {}", m.heading())));
        w.write_record(&header).expect("in-memory write");
        for scope in self.scopes() {
            let mut rec = vec![scope.label().to_string()];
            for (ann, m) in &columns {
                rec.push(self.cell(self.get(ann, scope, *m).flatten()));
            }
            w.write_record(&rec).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 input")
    }

    fn render_markdown(&self, layout: Layout) -> String {
        let columns = self.columns(layout);
        let mut out = String::from("| Stratum |");
        for (a, m) in &columns {
            out.push_str(&format!(" {a} {} |", m.heading()));
        }
        out.push_str("\n|---|");
        for _ in &columns {
            out.push_str("---:|");
        }
        out.push('\n');
        for scope in self.scopes() {
            out.push_str(&format!("| {} |", scope.label()));
            for (ann, m) in &columns {
                out.push_str(&format!(" {} |", self.cell(self.get(ann, scope, *m).flatten())));
            }
            out.push('\n');
        }
        out
    }

    fn render_json(&self, layout: Layout) -> String {
        let mut root = serde_json::Map::new();
        for (ann, rows) in &self.values {
            let mut strata = serde_json::Map::new();
            for (scope, row) in rows {
                let mut cells = serde_json::Map::new();
                for m in layout.measures() {
                    let value = match row.get(m).copied().flatten() {
                        Some(v) => {
                            let text = format_decimal(v, self.digits, false);
                            let f: f64 = text.parse().expect("decimal text");
                            serde_json::Number::from_f64(f)
                                .map(serde_json::Value::Number)
                                .unwrap_or(serde_json::Value::Null)
                        }
                        None => serde_json::Value::Null,
                    };
                    cells.insert(m.key().to_string(), value);
                }
                strata.insert(scope.label().to_string(), serde_json::Value::Object(cells));
            }
            root.insert(ann.clone(), serde_json::Value::Object(strata));
        }
        let mut text = serde_json::to_string_pretty(&serde_json::Value::Object(root)).expect("json values serialize");
        text.push('\n');
        text
    }

    /// Reads a report written by the JSON renderer. Values come back as the
    /// exact decimals that were written.
    pub fn from_json(text: &str, digits: u32) -> Result<MetricReport, ReportError> {
        let bad = |m: String| ReportError::Parse(m);
        let root: serde_json::Value = serde_json::from_str(text).map_err(|e| bad(e.to_string()))?;
        let root = root
            .as_object()
            .ok_or_else(|| bad("top level is not an object".into()))?;
        let mut report = MetricReport::empty(digits);
        for (ann, strata) in root {
            let strata = strata
                .as_object()
                .ok_or_else(|| bad(format!("`{ann}` is not an object")))?;
            let rows = report.values.entry(ann.clone()).or_default();
            for (label, cells) in strata {
                let scope = Scope::from_label(label).ok_or_else(|| bad(format!("unknown stratum `{label}`")))?;
                let cells = cells
                    .as_object()
                    .ok_or_else(|| bad(format!("`{ann}`/`{label}` is not an object")))?;
                let row = rows.entry(scope).or_default();
                for (key, v) in cells {
                    let m = Measure::from_key(key).ok_or_else(|| bad(format!("unknown measure `{key}`")))?;
                    let value = match v {
                        serde_json::Value::Null => None,
                        serde_json::Value::Number(n) => {
                            Some(parse_decimal(&n.to_string()).ok_or_else(|| bad(format!("bad number {n}")))?)
                        }
                        other => return Err(bad(format!("`{key}` is neither a number nor null: {other}"))),
                    };
                    row.insert(m, value);
                }
            }
        }
        Ok(report)
    }

    /// Reads a report written by the CSV renderer.
    pub fn from_csv(text: &str, digits: u32) -> Result<MetricReport, ReportError> {
        let bad = |m: String| ReportError::Parse(m);
        let mut r = csv::Reader::from_reader(text.as_bytes());
        let headers = r.headers().map_err(|e| bad(e.to_string()))?.clone();
        let mut columns = Vec::new();
        for h in headers.iter().skip(1) {
            let (ann, heading) = h.rsplit_once(' ').ok_or_else(|| bad(format!("bad column `{h}`")))?;
            let m = Measure::from_heading(heading).ok_or_else(|| bad(format!("unknown measure `{heading}`")))?;
            columns.push((ann.to_string(), m));
        }
        let mut report = MetricReport::empty(digits);
        for ann in columns.iter().map(|(a, _)| a) {
            report.values.entry(ann.clone()).or_default();
        }
        for rec in r.records() {
            let rec = rec.map_err(|e| bad(e.to_string()))?;
            let label = rec.get(0).unwrap_or_default();
            let scope = Scope::from_label(label).ok_or_else(|| bad(format!("unknown stratum `{label}`")))?;
            for ((ann, m), cell) in columns.iter().zip(rec.iter().skip(1)) {
                let value = if cell == UNDEFINED {
                    None
                } else {
                    Some(parse_decimal(cell).ok_or_else(|| bad(format!("bad value `{cell}`")))?)
                };
                report
                    .values
                    .get_mut(ann)
                    .expect("column annotators registered")
                    .entry(scope)
                    .or_default()
                    .insert(*m, value);
            }
        }
        Ok(report)
    }
}

/// Cell-by-cell `b - a`. Undefined on either side gives an undefined delta.
pub fn diff(a: &MetricReport, b: &MetricReport) -> Result<MetricReport, ReportError> {
    let shape = |r: &MetricReport| -> BTreeSet<(String, Scope, Measure)> {
        r.values
            .iter()
            .flat_map(|(ann, rows)| {
                rows.iter()
                    .flat_map(move |(s, row)| row.keys().map(move |m| (ann.clone(), *s, *m)))
            })
            .collect()
    };
    let (sa, sb) = (shape(a), shape(b));
    if sa != sb {
        let missing: Vec<String> = sa
            .symmetric_difference(&sb)
            .take(3)
            .map(|(ann, s, m)| format!("{ann}/{s}/{}", m.key()))
            .collect();
        return Err(ReportError::StratumMismatch(missing.join(", ")));
    }

    let mut out = MetricReport::empty(a.digits.max(b.digits));
    out.signed = true;
    for (ann, rows) in &a.values {
        let out_rows = out.values.entry(ann.clone()).or_default();
        for (scope, row) in rows {
            let out_row = out_rows.entry(*scope).or_default();
            for (m, va) in row {
                let vb = b.values[ann][scope][m];
                out_row.insert(*m, va.zip(vb).map(|(x, y)| y - x));
            }
        }
    }
    Ok(out)
}

/// Renders corpus statistics: one row per category with per-type mention
/// counts, then a total row.
pub fn render_stats(stats: &CorpusStats, format: Format) -> String {
    let mut header = vec!["category".to_string(), "documents".to_string()];
    header.extend(EntityType::ALL.iter().map(|t| t.as_str().to_string()));
    header.push("mentions".to_string());

    let mut rows: Vec<Vec<String>> = Vec::new();
    for c in Category::ALL {
        let per = &stats.mentions_per_category_type[c];
        let mut row = vec![c.as_str().to_string(), stats.documents_per_category[c].to_string()];
        row.extend(EntityType::ALL.iter().map(|t| per[t].to_string()));
        row.push(per.values().sum::<usize>().to_string());
        rows.push(row);
    }
    let mut total = vec!["Total".to_string(), stats.total_documents.to_string()];
    total.extend(EntityType::ALL.iter().map(|t| stats.mentions_per_type[t].to_string()));
    total.push(stats.total_mentions.to_string());
    rows.push(total);

    match format {
        Format::Json => {
            let mut text = serde_json::to_string_pretty(stats).expect("stats serialize");
            text.push('\n');
            text
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(&header).expect("in-memory write");
            for r in &rows {
                w.write_record(r).expect("in-memory write");
            }
            String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8")
        }
        Format::Markdown => {
            let mut out = format!("| {} |\n|---|", header.join(" | "));
            out.push_str(&"---:|".repeat(header.len() - 1));
            out.push('\n');
            for r in &rows {
                out.push_str(&format!("| {} |\n", r.join(" | ")));
            }
            out
        }
    }
}
