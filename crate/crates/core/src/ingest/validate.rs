use crate::model::{char_len, substring, AnnotationSet, Corpus};

use super::diagnostic::{Code, Diagnostic, Location};

/// Checks every corpus invariant and reports each violation. An empty result
/// means the corpus is ready for evaluation.
pub fn validate(corpus: &Corpus) -> Vec<Diagnostic> {
    let mut out = Vec::new();

    for (id, doc) in &corpus.documents {
        if doc.text.is_empty() {
            out.push(Diagnostic::error(
                id,
                Location::None,
                Code::EmptySpan,
                "document text is empty",
            ));
        }
        if !corpus.gold.contains_key(id) {
            out.push(Diagnostic::error(
                id,
                Location::None,
                Code::MissingGold,
                "no gold annotation set for document",
            ));
        }
    }

    for set in corpus.gold.values() {
        check_set(corpus, set, true, &mut out);
    }
    for sets in corpus.hypotheses.values() {
        for set in sets.values() {
            check_set(corpus, set, false, &mut out);
        }
    }
    out
}

fn check_set(corpus: &Corpus, set: &AnnotationSet, is_gold: bool, out: &mut Vec<Diagnostic>) {
    let id = set.doc_id.as_str();
    let Some(doc) = corpus.documents.get(id) else {
        out.push(Diagnostic::error(
            id,
            Location::None,
            Code::UnboundSet,
            format!("annotation set from `{}` refers to an unknown document", set.source),
        ));
        return;
    };

    let len = char_len(&doc.text);
    for m in &set.mentions {
        let at = Location::Offset(m.span.start());
        if m.span.end() > len {
            out.push(Diagnostic::error(
                id,
                at,
                Code::OutOfBounds,
                format!("{}: {} ends past text length {len}", set.source, m.span),
            ));
            continue;
        }
        let actual = substring(&doc.text, m.span).unwrap_or_default();
        if actual != m.surface {
            out.push(Diagnostic::error(
                id,
                at,
                Code::SurfaceMismatch,
                format!(
                    "{}: surface `{}` but text at {} is `{actual}`",
                    set.source, m.surface, m.span
                ),
            ));
        }
    }

    if !set.is_sorted() {
        out.push(Diagnostic::error(
            id,
            Location::None,
            Code::Unsorted,
            format!("{}: mentions are not sorted by (start, end)", set.source),
        ));
        return;
    }

    for (i, j) in set.overlapping_pairs() {
        let (a, b) = (&set.mentions[i], &set.mentions[j]);
        let detail = format!(
            "{}: `{}` {} overlaps `{}` {}",
            set.source, a.surface, a.span, b.surface, b.span
        );
        let at = Location::Offset(b.span.start());
        if is_gold {
            out.push(Diagnostic::error(id, at, Code::GoldOverlap, detail));
        } else {
            out.push(Diagnostic::warning(id, at, Code::HypothesisOverlap, detail));
        }
    }
}
