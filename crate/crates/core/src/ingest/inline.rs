//! Bracketed inline markup: `[Person Victor Charles Goldbloom] was born in [Location Montreal]`.
//!
//! Literal brackets and backslashes in the text are written `\[`, `\]` and `\\`.
//! Markup may not nest.

use crate::model::{AnnotationSet, EntityType, Mention, Span};

use super::diagnostic::{Code, Diagnostic, Location, Parsed};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InlineDocument {
    pub text: String,
    pub annotations: AnnotationSet,
}

struct Region {
    marker: usize,
    tag: String,
    reading_tag: bool,
    start_char: usize,
    start_byte: usize,
    entity_type: Option<EntityType>,
    invalid: bool,
}

pub fn parse_inline(doc_id: &str, source: &str, marked: &str) -> Parsed<InlineDocument> {
    let mut diagnostics = Vec::new();
    let mut plain = String::with_capacity(marked.len());
    let mut plain_chars = 0usize;
    let mut mentions = Vec::new();

    let mut open: Option<Region> = None;
    // Depth of brackets nested inside the open region; each one is an error.
    let mut inner_depth = 0usize;
    let mut inner_reading_tag = false;

    let chars: Vec<char> = marked.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let at = Location::Offset(i);
        i += 1;

        if let Some(region) = open.as_mut() {
            if inner_depth > 0 && inner_reading_tag {
                match c {
                    ' ' => inner_reading_tag = false,
                    ']' => {
                        inner_depth -= 1;
                        inner_reading_tag = false;
                    }
                    _ => {}
                }
                continue;
            }
            if region.reading_tag {
                match c {
                    ' ' => {
                        region.reading_tag = false;
                        match region.tag.parse::<EntityType>() {
                            Ok(t) => region.entity_type = Some(t),
                            Err(_) => {
                                diagnostics.push(Diagnostic::error(
                                    doc_id,
                                    Location::Offset(region.marker),
                                    Code::UnknownType,
                                    format!("unknown type tag `{}`", region.tag),
                                ));
                                region.invalid = true;
                            }
                        }
                    }
                    ']' => {
                        diagnostics.push(Diagnostic::error(
                            doc_id,
                            Location::Offset(region.marker),
                            Code::EmptyRegion,
                            format!("region `[{}]` marks no text", region.tag),
                        ));
                        open = None;
                    }
                    '[' => {
                        diagnostics.push(Diagnostic::error(doc_id, at, Code::NestedMarkup, "markup may not nest"));
                        region.invalid = true;
                        region.reading_tag = false;
                        inner_depth = 1;
                        inner_reading_tag = true;
                    }
                    c => region.tag.push(c),
                }
                continue;
            }
            match c {
                '[' => {
                    if !region.invalid || inner_depth == 0 {
                        diagnostics.push(Diagnostic::error(doc_id, at, Code::NestedMarkup, "markup may not nest"));
                    }
                    region.invalid = true;
                    inner_depth += 1;
                    inner_reading_tag = true;
                    continue;
                }
                ']' if inner_depth > 0 => {
                    inner_depth -= 1;
                    continue;
                }
                ']' => {
                    let region = open.take().expect("open region");
                    if region.invalid {
                        continue;
                    }
                    if plain_chars == region.start_char {
                        diagnostics.push(Diagnostic::error(
                            doc_id,
                            Location::Offset(region.marker),
                            Code::EmptyRegion,
                            format!("region `[{} ]` marks no text", region.tag),
                        ));
                        continue;
                    }
                    let span = Span::new(region.start_char, plain_chars).expect("non-empty");
                    mentions.push(Mention {
                        span,
                        entity_type: region.entity_type.expect("validated tag"),
                        surface: plain[region.start_byte..].to_string(),
                    });
                    continue;
                }
                _ => {}
            }
        } else {
            match c {
                '[' => {
                    open = Some(Region {
                        marker: i - 1,
                        tag: String::new(),
                        reading_tag: true,
                        start_char: plain_chars,
                        start_byte: plain.len(),
                        entity_type: None,
                        invalid: false,
                    });
                    inner_depth = 0;
                    continue;
                }
                ']' => {
                    diagnostics.push(Diagnostic::error(
                        doc_id,
                        at,
                        Code::UnbalancedBracket,
                        "`]` without a matching `[`",
                    ));
                    continue;
                }
                _ => {}
            }
        }

        // Ordinary text, possibly escaped.
        let ch = if c == '\\' && i < chars.len() && matches!(chars[i], '[' | ']' | '\\') {
            i += 1;
            chars[i - 1]
        } else {
            c
        };
        plain.push(ch);
        plain_chars += 1;
    }

    if let Some(region) = open {
        diagnostics.push(Diagnostic::error(
            doc_id,
            Location::Offset(region.marker),
            Code::UnbalancedBracket,
            "`[` is never closed",
        ));
    }

    Parsed {
        value: InlineDocument {
            text: plain,
            annotations: AnnotationSet::with_mentions(doc_id, source, mentions),
        },
        diagnostics,
    }
}

/// Renders `text` with `mentions` as inline markup. Returns `None` when two
/// mentions overlap or a span falls outside the text.
pub fn write_inline(text: &str, mentions: &[Mention]) -> Option<String> {
    let mut sorted: Vec<&Mention> = mentions.iter().collect();
    sorted.sort_by_key(|m| (m.span.start(), m.span.end()));
    if sorted.windows(2).any(|w| w[1].span.start() < w[0].span.end()) {
        return None;
    }
    let n = text.chars().count();
    if sorted.last().is_some_and(|m| m.span.end() > n) {
        return None;
    }

    let mut out = String::with_capacity(text.len() + mentions.len() * 16);
    let mut next = sorted.iter().peekable();
    let mut current_end: Option<usize> = None;
    for (pos, c) in text.chars().enumerate() {
        if current_end == Some(pos) {
            out.push(']');
            current_end = None;
        }
        if let Some(m) = next.next_if(|m| m.span.start() == pos) {
            out.push('[');
            out.push_str(m.entity_type.as_str());
            out.push(' ');
            current_end = Some(m.span.end());
        }
        if matches!(c, '[' | ']' | '\\') {
            out.push('\\');
        }
        out.push(c);
    }
    if current_end.is_some() {
        out.push(']');
    }
    Some(out)
}
