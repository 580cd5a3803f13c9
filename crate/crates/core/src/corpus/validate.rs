//! Structural checks over a parsed corpus. Validation never aborts; it
//! returns every issue it finds.

use super::{Corpus, Role, SpanNode};
use crate::ttm::{Family, LabelRegistry};
use serde::Serialize;
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum IssueKind {
    /// A span and a strict descendant share a family; per-family
    /// flattening cannot segment such a sentence.
    SameFamilyNesting { label: String, ancestor: String },
    /// The (label, family) pair is not in the registry.
    UnknownLabel { label: String },
    /// A sentence whose plain text is empty.
    EmptySentence,
    /// A stage-of-change span in a helper turn; SOC describes the seeker.
    SocOnHelper { label: String },
}

impl IssueKind {
    pub fn severity(&self) -> Severity {
        match self {
            IssueKind::SocOnHelper { .. } => Severity::Warning,
            _ => Severity::Error,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationIssue {
    pub dialogue: String,
    pub turn: usize,
    pub sentence: usize,
    #[serde(flatten)]
    pub kind: IssueKind,
}

impl fmt::Display for ValidationIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let what = match &self.kind {
            IssueKind::SameFamilyNesting { label, ancestor } => {
                format!("span `{label}` nested inside same-family span `{ancestor}`")
            }
            IssueKind::UnknownLabel { label } => format!("unknown label `{label}`"),
            IssueKind::EmptySentence => "empty sentence".to_string(),
            IssueKind::SocOnHelper { label } => {
                format!("stage-of-change span `{label}` in a helper turn")
            }
        };
        write!(
            f,
            "{}: dialogue {} turn {} sentence {}: {}",
            match self.kind.severity() {
                Severity::Error => "error",
                Severity::Warning => "warning",
            },
            self.dialogue,
            self.turn,
            self.sentence,
            what
        )
    }
}

/// Check the corpus against the registry and the structural rules.
pub fn validate_corpus(corpus: &Corpus, registry: &LabelRegistry) -> Vec<ValidationIssue> {
    let mut issues = Vec::new();
    for dialogue in &corpus.dialogues {
        for (turn_idx, turn) in dialogue.turns.iter().enumerate() {
            for (sent_idx, sentence) in turn.sentences.iter().enumerate() {
                let mut push = |kind: IssueKind| {
                    issues.push(ValidationIssue {
                        dialogue: dialogue.id.clone(),
                        turn: turn_idx,
                        sentence: sent_idx,
                        kind,
                    })
                };
                if sentence.plain_text.trim().is_empty() {
                    push(IssueKind::EmptySentence);
                }
                let mut ancestors: Vec<(&str, Family)> = Vec::new();
                walk_spans(&sentence.roots, &mut ancestors, &mut |node, ancestors| {
                    match registry.resolve(&node.label) {
                        Some(def) if def.name == node.label && def.family == node.family => {}
                        _ => push(IssueKind::UnknownLabel {
                            label: node.label.clone(),
                        }),
                    }
                    if let Some((ancestor, _)) = ancestors
                        .iter()
                        .rev()
                        .find(|(_, family)| *family == node.family)
                    {
                        push(IssueKind::SameFamilyNesting {
                            label: node.label.clone(),
                            ancestor: ancestor.to_string(),
                        });
                    }
                    if turn.role == Role::Helper && node.family == Family::Soc {
                        push(IssueKind::SocOnHelper {
                            label: node.label.clone(),
                        });
                    }
                });
            }
        }
    }
    issues
}

fn walk_spans<'a>(
    nodes: &'a [SpanNode],
    ancestors: &mut Vec<(&'a str, Family)>,
    visit: &mut impl FnMut(&'a SpanNode, &[(&'a str, Family)]),
) {
    for node in nodes {
        visit(node, ancestors);
        ancestors.push((&node.label, node.family));
        walk_spans(&node.children, ancestors, visit);
        ancestors.pop();
    }
}
