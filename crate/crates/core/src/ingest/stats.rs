use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{Category, Corpus, EntityType};

use super::diagnostic::Diagnostic;
use super::validate::validate;

/// Gold mention and document tallies, broken down by type and category.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusStats {
    pub documents_per_category: BTreeMap<Category, usize>,
    pub mentions_per_type: BTreeMap<EntityType, usize>,
    pub mentions_per_category_type: BTreeMap<Category, BTreeMap<EntityType, usize>>,
    pub total_documents: usize,
    pub total_mentions: usize,
}

impl CorpusStats {
    pub fn empty() -> Self {
        let types = || EntityType::ALL.iter().map(|&t| (t, 0)).collect::<BTreeMap<_, _>>();
        CorpusStats {
            documents_per_category: Category::ALL.iter().map(|&c| (c, 0)).collect(),
            mentions_per_type: types(),
            mentions_per_category_type: Category::ALL.iter().map(|&c| (c, types())).collect(),
            total_documents: 0,
            total_mentions: 0,
        }
    }
}

#[derive(Debug, Error)]
#[error("corpus has {} validation error(s)", .diagnostics.len())]
pub struct StatsError {
    pub diagnostics: Vec<Diagnostic>,
}

pub fn corpus_stats(corpus: &Corpus) -> Result<CorpusStats, StatsError> {
    let errors: Vec<_> = validate(corpus).into_iter().filter(Diagnostic::is_error).collect();
    if !errors.is_empty() {
        return Err(StatsError { diagnostics: errors });
    }

    let mut stats = CorpusStats::empty();
    for (id, doc) in &corpus.documents {
        stats.total_documents += 1;
        *stats.documents_per_category.entry(doc.category).or_default() += 1;
        for m in &corpus.gold[id].mentions {
            stats.total_mentions += 1;
            *stats.mentions_per_type.entry(m.entity_type).or_default() += 1;
            *stats
                .mentions_per_category_type
                .entry(doc.category)
                .or_default()
                .entry(m.entity_type)
                .or_default() += 1;
        }
    }
    Ok(stats)
}
