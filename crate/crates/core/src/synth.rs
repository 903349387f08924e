//! Seeded synthetic corpora: word-salad documents with non-overlapping gold
//! mentions on word boundaries.

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::model::{AnnotationSet, Category, Corpus, Document, EntityType, Mention, Span, GOLD};

const WORDS: &[&str] = &[
    "the",
    "council",
    "river",
    "north",
    "played",
    "signed",
    "treaty",
    "école",
    "museum",
    "league",
    "army",
    "born",
    "in",
    "of",
    "and",
    "studied",
    "at",
    "Zürich",
    "São",
    "Paulo",
    "company",
    "founded",
    "March",
    "1887",
    "général",
    "orchestra",
    "prize",
    "physics",
    "club",
    "won",
    "cup",
    "Kraków",
];

const CONNECTORS: &[&str] = &["and", "of", "in", "at", ","];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SynthConfig {
    pub documents: usize,
    pub min_words: usize,
    pub max_words: usize,
    /// Probability that a word starts a mention.
    pub mention_rate: f64,
    /// Longest mention, in words.
    pub max_mention_words: usize,
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            documents: 100,
            min_words: 20,
            max_words: 120,
            mention_rate: 0.2,
            max_mention_words: 4,
            seed: 0,
        }
    }
}

pub fn doc_id(i: usize) -> String {
    format!("doc{i:04}")
}

/// Generates documents and gold annotations. Consecutive mentions are always
/// separated by at least one word, so gold is overlap-free.
pub fn corpus(cfg: &SynthConfig) -> Corpus {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut c = Corpus::default();
    for i in 0..cfg.documents {
        let (doc, gold) = document(&mut rng, &doc_id(i), cfg);
        c.add_document(doc);
        c.add_gold(gold);
    }
    c
}

fn document(rng: &mut ChaCha8Rng, id: &str, cfg: &SynthConfig) -> (Document, AnnotationSet) {
    let n = rng.random_range(cfg.min_words..=cfg.max_words.max(cfg.min_words));
    let mut words: Vec<&str> = (0..n).map(|_| *WORDS.choose(rng).expect("words")).collect();

    // (first word, word count, type)
    let mut planned = Vec::new();
    let mut k = 0;
    while k < n {
        if rng.random::<f64>() < cfg.mention_rate {
            let len = rng.random_range(1..=cfg.max_mention_words.max(1)).min(n - k);
            planned.push((k, len, *EntityType::ALL.choose(rng).expect("types")));
            // the next word separates this mention from any following one
            if k + len < n && rng.random_bool(0.5) {
                words[k + len] = CONNECTORS.choose(rng).expect("connectors");
            }
            k += len + 1;
        } else {
            k += 1;
        }
    }

    let mut text = String::new();
    let mut bounds = Vec::with_capacity(n);
    let mut pos = 0;
    for (k, w) in words.iter().enumerate() {
        if k > 0 {
            text.push(' ');
            pos += 1;
        }
        text.push_str(w);
        let len = w.chars().count();
        bounds.push((pos, pos + len));
        pos += len;
    }

    let mentions = planned
        .into_iter()
        .map(|(k, len, ty)| {
            let span = Span::new(bounds[k].0, bounds[k + len - 1].1).expect("non-empty word");
            Mention::from_text(&text, span, ty).expect("span within text")
        })
        .collect();
    let category = *Category::ALL.choose(rng).expect("categories");
    let doc = Document {
        id: id.to_string(),
        text,
        category,
    };
    let gold = AnnotationSet::with_mentions(id, GOLD, mentions);
    (doc, gold)
}
