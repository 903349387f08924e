//! Seeded error injection into gold annotations.
//!
//! Every injected error is recorded in an [`EditLedger`], and the operators
//! are constrained so that the ledger alone predicts the spatial counts the
//! alignment will report:
//!
//! * a boundary shift keeps positive overlap with its source mention and never
//!   touches another gold mention, so it is always a partial match;
//! * a merge covers two neighbouring gold mentions and pairs with the longer
//!   one (the earlier one on a tie), leaving the other as a complete miss;
//! * spurious mentions are placed only on text no gold mention covers.

use std::collections::{BTreeMap, HashSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::align::SpatialCounts;
use crate::ingest::{Code, Diagnostic, Location};
use crate::model::{char_len, AnnotationSet, Corpus, Document, EntityType, Mention, Span};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PerturbError {
    #[error("invalid error model: {0}")]
    InvalidModel(String),
    #[error("document `{0}`: gold mentions must be sorted and non-overlapping")]
    InvalidGold(String),
}

/// Row-stochastic matrix: `rows[from][to]` is the probability an estimate of
/// a `from` mention is labelled `to`. Serialized as nested objects keyed by
/// type name; missing rows are identity rows and missing cells are zero.
#[derive(Debug, Clone, PartialEq)]
pub struct Confusion {
    rows: [[f64; 4]; 4],
}

fn type_index(t: EntityType) -> usize {
    EntityType::ALL.iter().position(|&x| x == t).expect("listed type")
}

impl Confusion {
    pub fn identity() -> Self {
        let mut rows = [[0.0; 4]; 4];
        for (i, row) in rows.iter_mut().enumerate() {
            row[i] = 1.0;
        }
        Confusion { rows }
    }

    pub fn set_row(&mut self, from: EntityType, probs: &[(EntityType, f64)]) {
        let row = &mut self.rows[type_index(from)];
        *row = [0.0; 4];
        for &(to, p) in probs {
            row[type_index(to)] = p;
        }
    }

    pub fn probability(&self, from: EntityType, to: EntityType) -> f64 {
        self.rows[type_index(from)][type_index(to)]
    }

    pub fn is_identity(&self) -> bool {
        *self == Confusion::identity()
    }

    fn validate(&self) -> Result<(), String> {
        for (i, row) in self.rows.iter().enumerate() {
            if row.iter().any(|p| !(0.0..=1.0).contains(p)) {
                return Err(format!("{} row has a probability outside [0, 1]", EntityType::ALL[i]));
            }
            let sum: f64 = row.iter().sum();
            if (sum - 1.0).abs() > 1e-9 {
                return Err(format!("{} row sums to {sum}, not 1", EntityType::ALL[i]));
            }
        }
        Ok(())
    }

    fn draw(&self, from: EntityType, u: f64) -> EntityType {
        let row = &self.rows[type_index(from)];
        let mut acc = 0.0;
        for (i, p) in row.iter().enumerate() {
            acc += p;
            if u < acc {
                return EntityType::ALL[i];
            }
        }
        // Rounding left u past the last cumulative sum.
        EntityType::ALL[row.iter().rposition(|&p| p > 0.0).unwrap_or(type_index(from))]
    }
}

impl Default for Confusion {
    fn default() -> Self {
        Confusion::identity()
    }
}

impl Serialize for Confusion {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let map: BTreeMap<EntityType, BTreeMap<EntityType, f64>> = EntityType::ALL
            .iter()
            .map(|&from| {
                let row = EntityType::ALL
                    .iter()
                    .filter(|&&to| self.probability(from, to) > 0.0)
                    .map(|&to| (to, self.probability(from, to)))
                    .collect();
                (from, row)
            })
            .collect();
        map.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Confusion {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let map = BTreeMap::<EntityType, BTreeMap<EntityType, f64>>::deserialize(d)?;
        let mut c = Confusion::identity();
        for (from, row) in map {
            let probs: Vec<_> = row.into_iter().collect();
            c.set_row(from, &probs);
        }
        Ok(c)
    }
}

fn default_max_shift() -> usize {
    3
}

fn default_merge_gap() -> usize {
    5
}

/// Error rates and knobs. Every field is optional in JSON; the defaults leave
/// gold untouched.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ErrorModel {
    #[serde(default)]
    pub miss_rate: f64,
    /// Expected number of spurious mentions per document.
    #[serde(default)]
    pub spurious_rate: f64,
    #[serde(default)]
    pub boundary_rate: f64,
    #[serde(default)]
    pub merge_rate: f64,
    #[serde(default)]
    pub type_confusion: Confusion,
    #[serde(default)]
    pub seed: u64,
    /// Largest boundary move, in characters.
    #[serde(default = "default_max_shift")]
    pub max_shift: usize,
    /// Largest gap, in characters, between two gold mentions that may be merged.
    #[serde(default = "default_merge_gap")]
    pub merge_gap: usize,
}

impl Default for ErrorModel {
    fn default() -> Self {
        ErrorModel {
            miss_rate: 0.0,
            spurious_rate: 0.0,
            boundary_rate: 0.0,
            merge_rate: 0.0,
            type_confusion: Confusion::identity(),
            seed: 0,
            max_shift: default_max_shift(),
            merge_gap: default_merge_gap(),
        }
    }
}

impl ErrorModel {
    pub fn validate(&self) -> Result<(), PerturbError> {
        let unit = |name: &str, v: f64| {
            if (0.0..=1.0).contains(&v) {
                Ok(())
            } else {
                Err(PerturbError::InvalidModel(format!("{name} = {v} is outside [0, 1]")))
            }
        };
        unit("miss_rate", self.miss_rate)?;
        unit("boundary_rate", self.boundary_rate)?;
        unit("merge_rate", self.merge_rate)?;
        if !(self.spurious_rate >= 0.0 && self.spurious_rate.is_finite()) {
            return Err(PerturbError::InvalidModel(format!(
                "spurious_rate = {} must be a non-negative number",
                self.spurious_rate
            )));
        }
        if self.max_shift == 0 {
            return Err(PerturbError::InvalidModel("max_shift must be at least 1".into()));
        }
        self.type_confusion.validate().map_err(PerturbError::InvalidModel)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EditKind {
    Kept,
    Missed,
    BoundaryShifted,
    Merged,
    Retyped,
    Spurious,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Edit {
    pub kind: EditKind,
    /// Gold mention the edit acts on (the one a merged estimate pairs with).
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub gold_index: Option<usize>,
    /// The second gold mention swallowed by a merge.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub absorbed_index: Option<usize>,
    /// Span of the resulting estimated mention.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub span: Option<Span>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub from_type: Option<EntityType>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub to_type: Option<EntityType>,
}

impl Edit {
    fn on(kind: EditKind, gold_index: usize) -> Self {
        Edit {
            kind,
            gold_index: Some(gold_index),
            absorbed_index: None,
            span: None,
            from_type: None,
            to_type: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EditLedger {
    pub doc_id: String,
    pub edits: Vec<Edit>,
}

impl EditLedger {
    pub fn count(&self, kind: EditKind) -> u64 {
        self.edits.iter().filter(|e| e.kind == kind).count() as u64
    }
}

/// Spatial counts the alignment must report for a hypothesis built by [`perturb`].
pub fn expected_counts(ledger: &EditLedger) -> SpatialCounts {
    let merged = ledger.count(EditKind::Merged);
    SpatialCounts {
        fm: ledger.count(EditKind::Kept),
        pm: ledger.count(EditKind::BoundaryShifted) + merged,
        wh: ledger.count(EditKind::Spurious),
        cm: ledger.count(EditKind::Missed) + merged,
    }
}

/// Number of aligned pairs whose types will disagree.
pub fn expected_type_errors(ledger: &EditLedger) -> u64 {
    ledger.count(EditKind::Retyped)
}

/// Stable per-document seed: SHA-256 of the model seed and the document id.
pub fn document_seed(seed: u64, doc_id: &str) -> u64 {
    let mut h = Sha256::new();
    h.update(seed.to_le_bytes());
    h.update(doc_id.as_bytes());
    let digest = h.finalize();
    u64::from_le_bytes(digest[..8].try_into().expect("32-byte digest"))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Perturbed {
    pub hypothesis: AnnotationSet,
    pub ledger: EditLedger,
    pub diagnostics: Vec<Diagnostic>,
}

/// Longest spurious mention, in characters.
const SPURIOUS_MAX_LEN: usize = 12;
const PLACEMENT_ATTEMPTS: usize = 64;

pub fn perturb(
    doc: &Document,
    gold: &AnnotationSet,
    model: &ErrorModel,
    source: &str,
) -> Result<Perturbed, PerturbError> {
    model.validate()?;
    let g = &gold.mentions;
    if g.windows(2).any(|w| w[1].span.start() < w[0].span.end()) {
        return Err(PerturbError::InvalidGold(doc.id.clone()));
    }
    let text = doc.text.as_str();
    let text_len = char_len(text);
    if g.last().is_some_and(|m| m.span.end() > text_len) {
        return Err(PerturbError::InvalidGold(doc.id.clone()));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(document_seed(model.seed, &doc.id));
    let mut hyp: Vec<Mention> = Vec::new();
    let mut edits = Vec::new();

    let mut emit = |rng: &mut ChaCha8Rng, edits: &mut Vec<Edit>, mut edit: Edit, source_type: EntityType| {
        let span = edit.span.expect("estimate span");
        let to = model.type_confusion.draw(source_type, rng.random::<f64>());
        let paired = edit.gold_index.expect("gold index");
        edits.push(edit.clone());
        if to != source_type {
            edit = Edit::on(EditKind::Retyped, paired);
            edit.span = Some(span);
            edit.from_type = Some(source_type);
            edit.to_type = Some(to);
            edits.push(edit);
        }
        hyp.push(Mention::from_text(text, span, to).expect("span within text"));
    };

    let mut i = 0;
    while i < g.len() {
        let m = &g[i];
        let (u_miss, u_shift, u_merge) = (rng.random::<f64>(), rng.random::<f64>(), rng.random::<f64>());

        if u_miss < model.miss_rate {
            let mut e = Edit::on(EditKind::Missed, i);
            e.from_type = Some(m.entity_type);
            edits.push(e);
            i += 1;
            continue;
        }

        if u_shift < model.boundary_rate {
            let candidates = shift_candidates(g, i, text_len, model.max_shift);
            if !candidates.is_empty() {
                let span = candidates[rng.random_range(0..candidates.len())];
                let mut e = Edit::on(EditKind::BoundaryShifted, i);
                e.span = Some(span);
                e.from_type = Some(m.entity_type);
                emit(&mut rng, &mut edits, e, m.entity_type);
                i += 1;
                continue;
            }
        }

        if u_merge < model.merge_rate && i + 1 < g.len() {
            let next = &g[i + 1];
            if next.span.start() - m.span.end() <= model.merge_gap {
                // The covering span overlaps each source by its full length;
                // alignment keeps the longer one, the earlier on a tie.
                let (paired, absorbed) = if next.span.len() > m.span.len() {
                    (i + 1, i)
                } else {
                    (i, i + 1)
                };
                let mut e = Edit::on(EditKind::Merged, paired);
                e.absorbed_index = Some(absorbed);
                e.span = Some(m.span.cover(&next.span));
                e.from_type = Some(g[paired].entity_type);
                emit(&mut rng, &mut edits, e, g[paired].entity_type);
                i += 2;
                continue;
            }
        }

        let mut e = Edit::on(EditKind::Kept, i);
        e.span = Some(m.span);
        e.from_type = Some(m.entity_type);
        emit(&mut rng, &mut edits, e, m.entity_type);
        i += 1;
    }

    let mut diagnostics = Vec::new();
    if model.spurious_rate > 0.0 {
        let wanted = Poisson::new(model.spurious_rate)
            .map(|p| p.sample(&mut rng) as usize)
            .unwrap_or(0);
        let gaps = free_gaps(g, text_len);
        let free: usize = gaps.iter().map(Span::len).sum();
        let mut used: HashSet<Span> = HashSet::new();
        let mut placed = 0;
        for _ in 0..wanted {
            if free == 0 {
                break;
            }
            let mut found = None;
            for _ in 0..PLACEMENT_ATTEMPTS {
                let span = random_gap_span(&mut rng, &gaps, free);
                if !used.contains(&span) {
                    found = Some(span);
                    break;
                }
            }
            let Some(span) = found else { break };
            used.insert(span);
            let ty = EntityType::ALL[rng.random_range(0..EntityType::ALL.len())];
            hyp.push(Mention::from_text(text, span, ty).expect("gap within text"));
            edits.push(Edit {
                kind: EditKind::Spurious,
                gold_index: None,
                absorbed_index: None,
                span: Some(span),
                from_type: None,
                to_type: Some(ty),
            });
            placed += 1;
        }
        if placed < wanted {
            diagnostics.push(Diagnostic::warning(
                &doc.id,
                Location::None,
                Code::SpuriousShortfall,
                format!("placed {placed} of {wanted} spurious mentions; not enough unannotated text"),
            ));
        }
    }

    Ok(Perturbed {
        hypothesis: AnnotationSet::with_mentions(&doc.id, source, hyp),
        ledger: EditLedger {
            doc_id: doc.id.clone(),
            edits,
        },
        diagnostics,
    })
}

/// Every span reachable by moving one boundary of `g[i]` by `1..=max_shift`
/// characters without emptying it or touching a neighbouring gold mention.
fn shift_candidates(g: &[Mention], i: usize, text_len: usize, max_shift: usize) -> Vec<Span> {
    let (s, e) = (g[i].span.start(), g[i].span.end());
    let lower = if i > 0 { g[i - 1].span.end() } else { 0 };
    let upper = g.get(i + 1).map_or(text_len, |m| m.span.start());
    let mut out = Vec::new();
    for a in 1..=max_shift {
        if s + a < e {
            out.push(Span::new(s + a, e).expect("shrunk start"));
            out.push(Span::new(s, e - a).expect("shrunk end"));
        }
        if s >= lower + a {
            out.push(Span::new(s - a, e).expect("grown start"));
        }
        if e + a <= upper {
            out.push(Span::new(s, e + a).expect("grown end"));
        }
    }
    out
}

/// Maximal character ranges covered by no gold mention.
fn free_gaps(g: &[Mention], text_len: usize) -> Vec<Span> {
    let mut gaps = Vec::new();
    let mut cursor = 0;
    for m in g {
        if m.span.start() > cursor {
            gaps.push(Span::new(cursor, m.span.start()).expect("positive gap"));
        }
        cursor = cursor.max(m.span.end());
    }
    if text_len > cursor {
        gaps.push(Span::new(cursor, text_len).expect("positive tail"));
    }
    gaps
}

fn random_gap_span(rng: &mut ChaCha8Rng, gaps: &[Span], free: usize) -> Span {
    let mut k = rng.random_range(0..free);
    for gap in gaps {
        if k < gap.len() {
            let start = gap.start() + k;
            let room = (gap.end() - start).min(SPURIOUS_MAX_LEN);
            let len = rng.random_range(1..=room);
            return Span::new(start, start + len).expect("non-empty");
        }
        k -= gap.len();
    }
    unreachable!("k < total free length")
}

/// Result of perturbing every document of a corpus.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CorpusPerturbation {
    pub hypotheses: BTreeMap<String, AnnotationSet>,
    pub ledgers: BTreeMap<String, EditLedger>,
    pub diagnostics: Vec<Diagnostic>,
}

pub fn perturb_corpus(corpus: &Corpus, model: &ErrorModel, source: &str) -> Result<CorpusPerturbation, PerturbError> {
    let mut out = CorpusPerturbation::default();
    for (id, doc) in &corpus.documents {
        let empty = AnnotationSet::new(id, crate::model::GOLD);
        let gold = corpus.gold.get(id).unwrap_or(&empty);
        let p = perturb(doc, gold, model, source)?;
        out.hypotheses.insert(id.clone(), p.hypothesis);
        out.ledgers.insert(id.clone(), p.ledger);
        out.diagnostics.extend(p.diagnostics);
    }
    Ok(out)
}
