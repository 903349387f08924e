//! Column-format BIO input, one `token<TAB>tag` per line, blank lines between
//! sentences.
//!
//! There are no offsets in this format, so the document text is synthesized by
//! joining every token with a single space (sentences included). Original
//! whitespace is lost.

use std::ops::Range;

use crate::model::{AnnotationSet, EntityType, Mention, Span};

use super::diagnostic::{Code, Diagnostic, Location, Parsed};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BioDocument {
    pub text: String,
    pub annotations: AnnotationSet,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Tag {
    Outside,
    Begin(EntityType),
    Inside(EntityType),
}

struct Run {
    start: usize,
    end: usize,
    entity_type: EntityType,
    bytes: Range<usize>,
}

fn label_type(label: &str) -> Option<EntityType> {
    match label {
        "PER" => Some(EntityType::Person),
        "LOC" => Some(EntityType::Location),
        "ORG" => Some(EntityType::Organization),
        "DATE" => Some(EntityType::Date),
        _ => None,
    }
}

fn type_label(ty: EntityType) -> &'static str {
    match ty {
        EntityType::Person => "PER",
        EntityType::Location => "LOC",
        EntityType::Organization => "ORG",
        EntityType::Date => "DATE",
    }
}

fn parse_tag(tag: &str) -> Option<Tag> {
    if tag == "O" {
        return Some(Tag::Outside);
    }
    let (prefix, label) = tag.split_once('-')?;
    let ty = label_type(label)?;
    match prefix {
        "B" => Some(Tag::Begin(ty)),
        "I" => Some(Tag::Inside(ty)),
        _ => None,
    }
}

pub fn parse_bio(doc_id: &str, source: &str, content: &str) -> Parsed<BioDocument> {
    let mut diagnostics = Vec::new();
    let mut text = String::new();
    let mut pos = 0usize;
    let mut mentions = Vec::new();
    let mut run: Option<Run> = None;

    let close = |run: &mut Option<Run>, mentions: &mut Vec<Mention>, text: &str| {
        if let Some(r) = run.take() {
            mentions.push(Mention {
                span: Span::new(r.start, r.end).expect("token runs are non-empty"),
                entity_type: r.entity_type,
                surface: text[r.bytes.clone()].to_string(),
            });
        }
    };

    for (i, raw) in content.lines().enumerate() {
        let line = raw.strip_suffix('\r').unwrap_or(raw);
        let loc = Location::Line(i + 1);
        if line.trim().is_empty() {
            // Sentence boundary: runs never continue across it.
            close(&mut run, &mut mentions, &text);
            continue;
        }
        let Some((token, tag_str)) = line.split_once('\t') else {
            diagnostics.push(Diagnostic::error(
                doc_id,
                loc,
                Code::MalformedLine,
                "expected `token<TAB>tag`",
            ));
            continue;
        };
        if token.is_empty() {
            diagnostics.push(Diagnostic::error(doc_id, loc, Code::MalformedLine, "empty token"));
            continue;
        }
        let tag = match parse_tag(tag_str.trim()) {
            Some(t) => t,
            None => {
                diagnostics.push(Diagnostic::error(
                    doc_id,
                    loc,
                    Code::UnknownType,
                    format!("unknown tag `{}`; token kept as O", tag_str.trim()),
                ));
                Tag::Outside
            }
        };
        let tag = match (tag, &run) {
            (Tag::Inside(ty), Some(r)) if r.entity_type == ty => Tag::Inside(ty),
            (Tag::Inside(ty), _) => {
                diagnostics.push(Diagnostic::warning(
                    doc_id,
                    loc,
                    Code::RepairedInside,
                    format!("I-{0} does not continue a {0} run; read as B-{0}", type_label(ty)),
                ));
                Tag::Begin(ty)
            }
            (t, _) => t,
        };

        if !text.is_empty() {
            text.push(' ');
            pos += 1;
        }
        let token_start = pos;
        let token_byte = text.len();
        text.push_str(token);
        pos += token.chars().count();

        match tag {
            Tag::Outside => close(&mut run, &mut mentions, &text),
            Tag::Begin(ty) => {
                close(&mut run, &mut mentions, &text);
                run = Some(Run {
                    start: token_start,
                    end: pos,
                    entity_type: ty,
                    bytes: token_byte..text.len(),
                });
            }
            Tag::Inside(_) => {
                if let Some(r) = run.as_mut() {
                    r.end = pos;
                    r.bytes.end = text.len();
                }
            }
        }
    }
    close(&mut run, &mut mentions, &text);

    Parsed {
        value: BioDocument {
            text,
            annotations: AnnotationSet::with_mentions(doc_id, source, mentions),
        },
        diagnostics,
    }
}
