use std::fmt;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Location {
    None,
    /// 1-based line number in the source file.
    Line(usize),
    /// Character offset in the source text.
    Offset(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Code {
    MalformedLine,
    BadOffset,
    EmptySpan,
    OutOfBounds,
    UnknownType,
    SurfaceMismatch,
    DuplicateMention,
    UnbalancedBracket,
    NestedMarkup,
    EmptyRegion,
    RepairedInside,
    Unsorted,
    GoldOverlap,
    HypothesisOverlap,
    UnboundSet,
    MissingGold,
    SpuriousShortfall,
    Io,
}

impl Code {
    pub fn as_str(&self) -> &'static str {
        match self {
            Code::MalformedLine => "malformed-line",
            Code::BadOffset => "bad-offset",
            Code::EmptySpan => "empty-span",
            Code::OutOfBounds => "out-of-bounds",
            Code::UnknownType => "unknown-type",
            Code::SurfaceMismatch => "surface-mismatch",
            Code::DuplicateMention => "duplicate-mention",
            Code::UnbalancedBracket => "unbalanced-bracket",
            Code::NestedMarkup => "nested-markup",
            Code::EmptyRegion => "empty-region",
            Code::RepairedInside => "repaired-inside",
            Code::Unsorted => "unsorted",
            Code::GoldOverlap => "gold-overlap",
            Code::HypothesisOverlap => "hypothesis-overlap",
            Code::UnboundSet => "unbound-set",
            Code::MissingGold => "missing-gold",
            Code::SpuriousShortfall => "spurious-shortfall",
            Code::Io => "io",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Diagnostic {
    pub severity: Severity,
    pub doc_id: String,
    pub location: Location,
    pub code: Code,
    pub detail: String,
}

impl Diagnostic {
    pub fn error(doc_id: &str, location: Location, code: Code, detail: impl Into<String>) -> Self {
        Diagnostic {
            severity: Severity::Error,
            doc_id: doc_id.to_string(),
            location,
            code,
            detail: detail.into(),
        }
    }

    pub fn warning(doc_id: &str, location: Location, code: Code, detail: impl Into<String>) -> Self {
        Diagnostic {
            severity: Severity::Warning,
            doc_id: doc_id.to_string(),
            location,
            code,
            detail: detail.into(),
        }
    }

    pub fn is_error(&self) -> bool {
        self.severity == Severity::Error
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sev = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        write!(f, "{sev}[{}] {}", self.code.as_str(), self.doc_id)?;
        match self.location {
            Location::None => {}
            Location::Line(n) => write!(f, ":{n}")?,
            Location::Offset(n) => write!(f, "@{n}")?,
        }
        write!(f, ": {}", self.detail)
    }
}

/// A parse result together with whatever was reported along the way.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Parsed<T> {
    pub value: T,
    pub diagnostics: Vec<Diagnostic>,
}

impl<T> Parsed<T> {
    pub fn has_errors(&self) -> bool {
        self.diagnostics.iter().any(Diagnostic::is_error)
    }
}
