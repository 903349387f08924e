//! Documents, spans, mentions and corpora.
//!
//! All offsets are counted in Unicode scalar values (`char`s) from the start
//! of the document text, and spans are half-open `[start, end)`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModelError {
    #[error("empty or inverted span [{start}, {end})")]
    InvalidSpan { start: usize, end: usize },
    #[error("unknown entity type `{0}`")]
    UnknownEntityType(String),
    #[error("unknown category `{0}`")]
    UnknownCategory(String),
}

/// A half-open character range `[start, end)` with `start < end`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "(usize, usize)", into = "(usize, usize)")]
pub struct Span {
    start: usize,
    end: usize,
}

impl Span {
    pub fn new(start: usize, end: usize) -> Result<Self, ModelError> {
        if start < end {
            Ok(Span { start, end })
        } else {
            Err(ModelError::InvalidSpan { start, end })
        }
    }

    pub fn start(&self) -> usize {
        self.start
    }

    pub fn end(&self) -> usize {
        self.end
    }

    pub fn len(&self) -> usize {
        self.end - self.start
    }

    /// Always false; spans are never empty. Present for API symmetry with `len`.
    pub fn is_empty(&self) -> bool {
        false
    }

    /// Smallest span covering both.
    pub fn cover(&self, other: &Span) -> Span {
        Span {
            start: self.start.min(other.start),
            end: self.end.max(other.end),
        }
    }
}

impl TryFrom<(usize, usize)> for Span {
    type Error = ModelError;

    fn try_from((start, end): (usize, usize)) -> Result<Self, Self::Error> {
        Span::new(start, end)
    }
}

impl From<Span> for (usize, usize) {
    fn from(span: Span) -> Self {
        (span.start, span.end)
    }
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {})", self.start, self.end)
    }
}

/// Number of characters shared by two spans.
pub fn span_overlap(a: Span, b: Span) -> usize {
    let lo = a.start.max(b.start);
    let hi = a.end.min(b.end);
    hi.saturating_sub(lo)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SpanRelation {
    Exact,
    Overlap,
    Disjoint,
}

pub fn span_relation(a: Span, b: Span) -> SpanRelation {
    if a == b {
        SpanRelation::Exact
    } else if span_overlap(a, b) > 0 {
        SpanRelation::Overlap
    } else {
        SpanRelation::Disjoint
    }
}

macro_rules! closed_enum {
    ($(#[$meta:meta])* $name:ident, $err:ident, [$($variant:ident),+ $(,)?]) => {
        $(#[$meta])*
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
        pub enum $name {
            $($variant),+
        }

        impl $name {
            pub const ALL: &'static [$name] = &[$($name::$variant),+];

            pub fn as_str(&self) -> &'static str {
                match self {
                    $($name::$variant => stringify!($variant)),+
                }
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.as_str())
            }
        }

        impl FromStr for $name {
            type Err = ModelError;

            fn from_str(s: &str) -> Result<Self, Self::Err> {
                match s {
                    $(stringify!($variant) => Ok($name::$variant),)+
                    other => Err(ModelError::$err(other.to_string())),
                }
            }
        }
    };
}

closed_enum!(
    /// The four annotated entity classes.
    EntityType,
    UnknownEntityType,
    [Person, Location, Organization, Date]
);

closed_enum!(
    /// Article category a document belongs to.
    Category,
    UnknownCategory,
    [Politics, Science, Military, Art, Sports, Others]
);

/// A typed occurrence of an entity in a document.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Mention {
    pub span: Span,
    pub entity_type: EntityType,
    pub surface: String,
}

impl Mention {
    /// Builds a mention whose surface is read from `text`. Fails if the span
    /// runs past the end of the text.
    pub fn from_text(text: &str, span: Span, entity_type: EntityType) -> Option<Mention> {
        let surface = substring(text, span)?;
        Some(Mention {
            span,
            entity_type,
            surface,
        })
    }

    fn sort_key(&self) -> (usize, usize, EntityType) {
        (self.span.start, self.span.end, self.entity_type)
    }
}

/// Characters `[span.start, span.end)` of `text`, or `None` when out of bounds.
pub fn substring(text: &str, span: Span) -> Option<String> {
    let mut bounds = text.char_indices().map(|(i, _)| i).chain(std::iter::once(text.len()));
    let lo = bounds.nth(span.start)?;
    let hi = bounds.nth(span.len() - 1)?;
    Some(text[lo..hi].to_string())
}

pub fn char_len(text: &str) -> usize {
    text.chars().count()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Document {
    pub id: String,
    pub text: String,
    pub category: Category,
}

/// Source label used for reference annotations.
pub const GOLD: &str = "gold";

/// All mentions of one document from one annotator.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnnotationSet {
    pub doc_id: String,
    pub source: String,
    pub mentions: Vec<Mention>,
}

impl AnnotationSet {
    pub fn new(doc_id: impl Into<String>, source: impl Into<String>) -> Self {
        AnnotationSet {
            doc_id: doc_id.into(),
            source: source.into(),
            mentions: Vec::new(),
        }
    }

    pub fn with_mentions(doc_id: impl Into<String>, source: impl Into<String>, mut mentions: Vec<Mention>) -> Self {
        mentions.sort_by_key(Mention::sort_key);
        AnnotationSet {
            doc_id: doc_id.into(),
            source: source.into(),
            mentions,
        }
    }

    pub fn sort(&mut self) {
        self.mentions.sort_by_key(Mention::sort_key);
    }

    pub fn is_sorted(&self) -> bool {
        self.mentions
            .windows(2)
            .all(|w| (w[0].span.start, w[0].span.end) <= (w[1].span.start, w[1].span.end))
    }

    /// Index pairs `(i, j)`, `i < j`, whose spans overlap. Assumes sorted mentions.
    pub fn overlapping_pairs(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for i in 0..self.mentions.len() {
            for j in i + 1..self.mentions.len() {
                if self.mentions[j].span.start >= self.mentions[i].span.end {
                    break;
                }
                out.push((i, j));
            }
        }
        out
    }

    /// Only the mentions of one type, order preserved.
    pub fn restricted_to(&self, ty: EntityType) -> Vec<Mention> {
        self.mentions.iter().filter(|m| m.entity_type == ty).cloned().collect()
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Corpus {
    pub documents: BTreeMap<String, Document>,
    pub gold: BTreeMap<String, AnnotationSet>,
    /// annotator name -> doc id -> set
    pub hypotheses: BTreeMap<String, BTreeMap<String, AnnotationSet>>,
}

impl Corpus {
    pub fn add_document(&mut self, doc: Document) {
        self.documents.insert(doc.id.clone(), doc);
    }

    pub fn add_gold(&mut self, set: AnnotationSet) {
        self.gold.insert(set.doc_id.clone(), set);
    }

    pub fn add_hypothesis(&mut self, set: AnnotationSet) {
        self.hypotheses
            .entry(set.source.clone())
            .or_default()
            .insert(set.doc_id.clone(), set);
    }

    pub fn annotators(&self) -> impl Iterator<Item = &str> {
        self.hypotheses.keys().map(String::as_str)
    }
}
