//! The Goldbloom biography excerpt: ten reference entities, nine estimated
//! ones, exercising every match class.
//!
//! Reference and estimate are kept as inline markup over the same text and
//! parsed on demand.

use crate::ingest::parse_inline;
use crate::model::{AnnotationSet, Category, Corpus, Document, GOLD};

pub const DOC_ID: &str = "goldbloom";
pub const ANNOTATOR: &str = "tool";

pub const GOLD_MARKUP: &str = "[Person Victor Charles Goldbloom] was born in [Location Montreal], \
the son of [Person Alton Goldbloom] and [Person Annie Ballon]. He studied at \
[Organization Selwyn House] and [Organization Lower Canada College] before attending \
[Organization McGill University], where he received his MD. Dr. [Person Goldbloom] then \
trained at the [Organization Columbia Presbyterian Medical Center] in [Location New York].";

pub const ESTIMATE_MARKUP: &str = "[Person Victor Charles Goldbloom] was born in [Location Montreal], \
the son of Alton Goldbloom and Annie Ballon. He studied at \
[Organization Selwyn House] and Lower [Location Canada] College before attending \
[Organization McGill University], where he received his [Person MD]. [Person Dr. Goldbloom] then \
trained at the Columbia Presbyterian [Organization Medical Center] in [Location New York].";

#[derive(Debug, Clone)]
pub struct Fixture {
    pub document: Document,
    pub gold: AnnotationSet,
    pub estimate: AnnotationSet,
}

pub fn goldbloom() -> Fixture {
    let gold = parse_inline(DOC_ID, GOLD, GOLD_MARKUP);
    let est = parse_inline(DOC_ID, ANNOTATOR, ESTIMATE_MARKUP);
    assert!(gold.diagnostics.is_empty() && est.diagnostics.is_empty());
    assert_eq!(gold.value.text, est.value.text);
    Fixture {
        document: Document {
            id: DOC_ID.to_string(),
            text: gold.value.text,
            category: Category::Politics,
        },
        gold: gold.value.annotations,
        estimate: est.value.annotations,
    }
}

/// Single-document corpus holding the fixture, filed under Politics.
pub fn goldbloom_corpus() -> Corpus {
    let f = goldbloom();
    let mut c = Corpus::default();
    c.add_document(f.document);
    c.add_gold(f.gold);
    c.add_hypothesis(f.estimate);
    c
}
