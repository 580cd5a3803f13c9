//! Dialogue data model and the bracketed span markup.
//!
//! A transcript line like
//!
//! ```text
//! seeker	[Contemplation : [goal : Id like to get down to 225]]
//! ```
//!
//! parses into an [`AnnotatedSentence`]: the markup-stripped plain text
//! plus a forest of labeled spans whose ranges index into that text.

mod parse;
mod stats;
mod transcript;
mod validate;

pub use parse::{parse_sentence, serialize_sentence};
pub use stats::{corpus_stats, CorpusStats, Rational};
pub use transcript::{parse_corpus, parse_transcript, render_corpus, render_transcript};
pub use validate::{validate_corpus, IssueKind, Severity, ValidationIssue};

use crate::ttm::Family;
use serde::{Deserialize, Serialize};
use std::fmt;
use thiserror::Error;

/// A labeled span over a sentence's plain text.
///
/// `start..end` is a half-open character interval (not bytes). Children
/// are fully contained in the parent, pairwise disjoint, and sorted.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpanNode {
    pub label: String,
    pub family: Family,
    pub start: usize,
    pub end: usize,
    pub children: Vec<SpanNode>,
}

impl SpanNode {
    pub fn width(&self) -> usize {
        self.end - self.start
    }

    /// The slice of plain text this span covers.
    pub fn covered_text(&self, plain_text: &str) -> String {
        slice_chars(plain_text, self.start, self.end)
    }
}

/// Slice a string by character (not byte) offsets.
pub fn slice_chars(text: &str, start: usize, end: usize) -> String {
    text.chars().skip(start).take(end.saturating_sub(start)).collect()
}

/// A sentence's plain text plus its span forest.
///
/// Parsed sentences are canonical: plain text has no leading/trailing
/// whitespace and no whitespace runs, and no span starts or ends on a
/// whitespace character. Hand-built sentences should keep that form too;
/// serialization round-trips only for canonical sentences.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct AnnotatedSentence {
    pub plain_text: String,
    pub roots: Vec<SpanNode>,
}

impl AnnotatedSentence {
    /// All spans, depth-first pre-order (left to right).
    pub fn spans(&self) -> Vec<&SpanNode> {
        let mut out = Vec::new();
        fn walk<'a>(nodes: &'a [SpanNode], out: &mut Vec<&'a SpanNode>) {
            for node in nodes {
                out.push(node);
                walk(&node.children, out);
            }
        }
        walk(&self.roots, &mut out);
        out
    }
}

/// Who typed the line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Seeker,
    Helper,
}

impl Role {
    pub fn as_str(&self) -> &'static str {
        match self {
            Role::Seeker => "seeker",
            Role::Helper => "helper",
        }
    }
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One speaker turn: at least one sentence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Turn {
    pub role: Role,
    pub sentences: Vec<AnnotatedSentence>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dialogue {
    pub id: String,
    pub turns: Vec<Turn>,
    pub participant_ids: Option<(String, String)>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Corpus {
    pub dialogues: Vec<Dialogue>,
}

impl Corpus {
    /// Interchange JSON with stable field ordering.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("corpus serializes")
    }

    pub fn from_json(text: &str) -> Result<Corpus, serde_json::Error> {
        serde_json::from_str(text)
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum CorpusError {
    #[error("unbalanced bracket at character {pos}")]
    UnbalancedBracket { pos: usize },
    #[error("unknown tag `{tag}` at character {pos}")]
    UnknownTag { tag: String, pos: usize },
    #[error("tag `{tag}` carries family suffix `{{{suffix}}}` but the registry says {family}")]
    FamilyMismatch {
        tag: String,
        suffix: String,
        family: Family,
    },
    #[error("span opened at character {pos} encloses no text")]
    EmptySpan { pos: usize },
    #[error("bad role `{role}`: expected seeker or helper")]
    BadRole { role: String },
    #[error("transcript line needs `role<TAB>markup`")]
    MissingTab,
    #[error("continuation line has no turn to continue or switches roles")]
    BadContinuation,
    #[error("transcript holds no dialogue")]
    EmptyDialogue,
    #[error("line {line}: {source}")]
    AtLine {
        line: usize,
        #[source]
        source: Box<CorpusError>,
    },
}

impl CorpusError {
    pub(crate) fn at_line(self, line: usize) -> CorpusError {
        CorpusError::AtLine {
            line,
            source: Box::new(self),
        }
    }
}
