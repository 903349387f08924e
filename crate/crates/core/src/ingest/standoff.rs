//! Tab-separated standoff files: `start<TAB>end<TAB>type<TAB>surface`.
//!
//! The surface column escapes `\`, TAB, LF and CR as `\\`, `\t`, `\n`, `\r`
//! so every mention fits on one line.

use std::collections::HashSet;

use crate::model::{char_len, substring, AnnotationSet, EntityType, Mention, Span};

use super::diagnostic::{Code, Diagnostic, Location, Parsed};

pub const HEADER: &str = "# start\tend\ttype\tsurface";

pub fn parse_standoff(doc_id: &str, source: &str, doc_text: &str, content: &str) -> Parsed<AnnotationSet> {
    parse_lines(doc_id, source, Some(doc_text), content)
}

/// Syntactic parse with no document to check offsets and surfaces against.
/// Used for annotation files that reference a document the corpus lacks.
pub fn parse_standoff_unbound(doc_id: &str, source: &str, content: &str) -> Parsed<AnnotationSet> {
    parse_lines(doc_id, source, None, content)
}

fn parse_lines(doc_id: &str, source: &str, doc_text: Option<&str>, content: &str) -> Parsed<AnnotationSet> {
    let text_len = doc_text.map(char_len);
    let mut diagnostics = Vec::new();
    let mut mentions = Vec::new();
    let mut seen = HashSet::new();

    for (i, raw) in content.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.strip_suffix('\r').unwrap_or(raw);
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let loc = Location::Line(line_no);
        let err = |code, detail: String| Diagnostic::error(doc_id, loc, code, detail);

        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != 4 {
            diagnostics.push(err(
                Code::MalformedLine,
                format!("expected 4 tab-separated columns, found {}", cols.len()),
            ));
            continue;
        }
        let (start, end) = match (cols[0].parse::<usize>(), cols[1].parse::<usize>()) {
            (Ok(s), Ok(e)) => (s, e),
            _ => {
                diagnostics.push(err(
                    Code::BadOffset,
                    format!("offsets `{}`/`{}` are not non-negative integers", cols[0], cols[1]),
                ));
                continue;
            }
        };
        let span = match Span::new(start, end) {
            Ok(span) => span,
            Err(_) => {
                diagnostics.push(err(Code::EmptySpan, format!("start {start} >= end {end}")));
                continue;
            }
        };
        if let Some(len) = text_len {
            if end > len {
                diagnostics.push(err(Code::OutOfBounds, format!("end {end} beyond text length {len}")));
                continue;
            }
        }
        let entity_type = match cols[2].parse::<EntityType>() {
            Ok(t) => t,
            Err(e) => {
                diagnostics.push(err(Code::UnknownType, e.to_string()));
                continue;
            }
        };
        let surface = match unescape(cols[3]) {
            Some(s) => s,
            None => {
                diagnostics.push(err(Code::MalformedLine, format!("bad escape in surface `{}`", cols[3])));
                continue;
            }
        };
        if let Some(text) = doc_text {
            let actual = substring(text, span).unwrap_or_default();
            if actual != surface {
                diagnostics.push(err(
                    Code::SurfaceMismatch,
                    format!("surface `{surface}` but text at {span} is `{actual}`"),
                ));
                continue;
            }
        }
        if !seen.insert((span, entity_type)) {
            diagnostics.push(err(
                Code::DuplicateMention,
                format!("{entity_type} {span} listed twice"),
            ));
            continue;
        }
        mentions.push(Mention {
            span,
            entity_type,
            surface,
        });
    }

    Parsed {
        value: AnnotationSet::with_mentions(doc_id, source, mentions),
        diagnostics,
    }
}

/// Canonical standoff serialization: header comment, then one line per mention.
pub fn write_standoff(set: &AnnotationSet) -> String {
    let mut out = String::with_capacity(32 + set.mentions.len() * 32);
    out.push_str(HEADER);
    out.push('\n');
    for m in &set.mentions {
        out.push_str(&format!(
            "{}\t{}\t{}\t{}\n",
            m.span.start(),
            m.span.end(),
            m.entity_type,
            escape(&m.surface)
        ));
    }
    out
}

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '\\' => out.push_str("\\\\"),
            '\t' => out.push_str("\\t"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            c => out.push(c),
        }
    }
    out
}

fn unescape(s: &str) -> Option<String> {
    let mut out = String::with_capacity(s.len());
    let mut chars = s.chars();
    while let Some(c) = chars.next() {
        if c != '\\' {
            out.push(c);
            continue;
        }
        match chars.next()? {
            '\\' => out.push('\\'),
            't' => out.push('\t'),
            'n' => out.push('\n'),
            'r' => out.push('\r'),
            _ => return None,
        }
    }
    Some(out)
}
