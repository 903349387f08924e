//! Annotation formats, corpus validation and corpus statistics.

mod bio;
mod diagnostic;
mod inline;
pub mod layout;
mod standoff;
mod stats;
mod validate;

pub use bio::{parse_bio, BioDocument};
pub use diagnostic::{Code, Diagnostic, Location, Parsed, Severity};
pub use inline::{parse_inline, write_inline, InlineDocument};
pub use standoff::{parse_standoff, parse_standoff_unbound, write_standoff};
pub use stats::{corpus_stats, CorpusStats, StatsError};
pub use validate::validate;
