//! Named-entity evaluation that credits partial matches.
//!
//! Reference and estimated mentions are paired one-to-one ([`align`]), each
//! outcome is classified as a full match, partial match, wrong hit or complete
//! miss, and the counts are turned into full, partial and total precision and
//! recall ([`metrics`]). Typed evaluation compares entity types over the same
//! pairs. [`report`] aggregates counts per annotator, entity type and article
//! category; [`perturb`] injects known errors into gold annotations to check the
//! whole pipeline end to end.

pub mod align;
pub mod fixture;
pub mod ingest;
pub mod metrics;
pub mod model;
pub mod perturb;
pub mod report;
pub mod synth;

pub use align::{
    align, exact_counts, spatial_counts, typed_counts, AlignError, Alignment, ExactCounts, MatchPair, SpatialCounts,
    Tally, TypedCounts,
};
pub use metrics::{f_measure, partial_metrics, precision, recall, PartialMetrics, Ratio};
pub use model::{
    span_overlap, span_relation, AnnotationSet, Category, Corpus, Document, EntityType, Mention, Span, SpanRelation,
};
