//! Sentence markup parser and serializer.
//!
//! Grammar: `text := (plain | span)*`, `span := '[' tag ('{' family '}')? ':' text ']'`.
//! Two dialects appear in annotated data, `[Tag : text]` and
//! `[TAG{FAMILY}: text]`; both parse. The serializer emits only the first.

use super::{AnnotatedSentence, CorpusError, SpanNode};
use crate::ttm::{Family, LabelRegistry};

/// Accumulates plain text while normalizing whitespace: runs collapse to a
/// single space, leading/trailing whitespace disappears. Marks are
/// character offsets into the normalized text.
struct PlainBuilder {
    text: String,
    chars: usize,
    pending_space: bool,
}

impl PlainBuilder {
    fn new() -> PlainBuilder {
        PlainBuilder {
            text: String::new(),
            chars: 0,
            pending_space: false,
        }
    }

    /// Append one raw character; returns the plain-text offset it was
    /// written at, or None for whitespace (which only materializes as a
    /// single space once more text follows).
    fn push(&mut self, c: char) -> Option<usize> {
        if c.is_whitespace() {
            if self.chars > 0 {
                self.pending_space = true;
            }
            None
        } else {
            if self.pending_space {
                self.text.push(' ');
                self.chars += 1;
                self.pending_space = false;
            }
            self.text.push(c);
            self.chars += 1;
            Some(self.chars - 1)
        }
    }

    /// Offset one past the last written character.
    fn end_mark(&self) -> usize {
        self.chars
    }
}

struct OpenSpan {
    label: String,
    family: Family,
    /// Set when the first character inside the span is written; a span
    /// that never writes one is empty.
    start: Option<usize>,
    open_pos: usize,
    children: Vec<SpanNode>,
}

/// Parse one sentence of markup. Positions in errors are character
/// offsets into `raw`.
pub fn parse_sentence(
    raw: &str,
    registry: &LabelRegistry,
) -> Result<AnnotatedSentence, CorpusError> {
    let chars: Vec<char> = raw.chars().collect();
    let mut i = 0;
    let mut plain = PlainBuilder::new();
    let mut stack: Vec<OpenSpan> = Vec::new();
    let mut roots: Vec<SpanNode> = Vec::new();

    while i < chars.len() {
        match chars[i] {
            '[' => {
                let open_pos = i;
                i += 1;
                let tag_start = i;
                while i < chars.len() && !matches!(chars[i], ':' | '{' | '}' | '[' | ']') {
                    i += 1;
                }
                if i == chars.len() {
                    return Err(CorpusError::UnbalancedBracket { pos: open_pos });
                }
                let tag: String = chars[tag_start..i].iter().collect::<String>().trim().to_string();

                let mut suffix = None;
                if chars[i] == '{' {
                    let brace_pos = i;
                    i += 1;
                    let fam_start = i;
                    while i < chars.len() && chars[i] != '}' {
                        i += 1;
                    }
                    if i == chars.len() {
                        return Err(CorpusError::UnbalancedBracket { pos: brace_pos });
                    }
                    suffix =
                        Some(chars[fam_start..i].iter().collect::<String>().trim().to_string());
                    i += 1;
                    while i < chars.len() && chars[i].is_whitespace() {
                        i += 1;
                    }
                    if i == chars.len() || chars[i] != ':' {
                        return Err(CorpusError::UnbalancedBracket { pos: open_pos });
                    }
                }
                if chars[i] != ':' {
                    // `[tag]` or stray bracket inside the header
                    return Err(CorpusError::UnbalancedBracket { pos: open_pos });
                }

                let def = registry.resolve(&tag).ok_or(CorpusError::UnknownTag {
                    tag: tag.clone(),
                    pos: tag_start,
                })?;
                if let Some(suffix) = suffix {
                    if Family::parse(&suffix) != Some(def.family) {
                        return Err(CorpusError::FamilyMismatch {
                            tag,
                            suffix,
                            family: def.family,
                        });
                    }
                }

                i += 1; // past ':'
                stack.push(OpenSpan {
                    label: def.name.clone(),
                    family: def.family,
                    start: None,
                    open_pos,
                    children: Vec::new(),
                });
            }
            ']' => {
                let open = stack
                    .pop()
                    .ok_or(CorpusError::UnbalancedBracket { pos: i })?;
                let Some(start) = open.start else {
                    return Err(CorpusError::EmptySpan { pos: open.open_pos });
                };
                let node = SpanNode {
                    label: open.label,
                    family: open.family,
                    start,
                    end: plain.end_mark(),
                    children: open.children,
                };
                match stack.last_mut() {
                    Some(parent) => parent.children.push(node),
                    None => roots.push(node),
                }
                i += 1;
            }
            c => {
                if let Some(written_at) = plain.push(c) {
                    for open in stack.iter_mut().rev() {
                        if open.start.is_some() {
                            break;
                        }
                        open.start = Some(written_at);
                    }
                }
                i += 1;
            }
        }
    }

    if let Some(open) = stack.first() {
        return Err(CorpusError::UnbalancedBracket { pos: open.open_pos });
    }
    Ok(AnnotatedSentence {
        plain_text: plain.text,
        roots,
    })
}

/// Serialize back to canonical `[label : text]` markup.
///
/// The sentence must satisfy its invariants (ranges in bounds, children
/// contained, siblings disjoint and sorted); canonical sentences
/// round-trip through [`parse_sentence`] structurally unchanged.
pub fn serialize_sentence(s: &AnnotatedSentence) -> String {
    let chars: Vec<char> = s.plain_text.chars().collect();
    let mut out = String::new();
    write_nodes(&chars, &s.roots, 0, chars.len(), &mut out);
    out
}

fn write_nodes(chars: &[char], nodes: &[SpanNode], from: usize, to: usize, out: &mut String) {
    let mut cursor = from;
    for node in nodes {
        out.extend(chars[cursor..node.start].iter());
        out.push('[');
        out.push_str(&node.label);
        out.push_str(" : ");
        write_nodes(chars, &node.children, node.start, node.end, out);
        out.push(']');
        cursor = node.end;
    }
    out.extend(chars[cursor..to].iter());
}
