//! Line-oriented transcript reading and writing.
//!
//! One turn per line: `role<TAB>markup`, role one of `seeker`/`helper`.
//! A `+` appended to the role (e.g. `seeker+`) marks a continuation line:
//! its sentence joins the previous turn instead of opening a new one.
//! `#`-prefixed lines are comments; blank lines separate dialogues when a
//! file holds several.

use super::{parse_sentence, serialize_sentence, Corpus, CorpusError, Dialogue, Role, Turn};
use crate::ttm::LabelRegistry;

fn parse_block(
    lines: &[(usize, &str)],
    id: &str,
    registry: &LabelRegistry,
) -> Result<Dialogue, CorpusError> {
    let mut turns: Vec<Turn> = Vec::new();
    for &(lineno, line) in lines {
        let (role_field, markup) = line
            .split_once('\t')
            .ok_or_else(|| CorpusError::MissingTab.at_line(lineno))?;
        let (role_name, continuation) = match role_field.strip_suffix('+') {
            Some(name) => (name, true),
            None => (role_field, false),
        };
        let role = match role_name {
            "seeker" => Role::Seeker,
            "helper" => Role::Helper,
            other => {
                return Err(CorpusError::BadRole {
                    role: other.to_string(),
                }
                .at_line(lineno))
            }
        };
        let sentence = parse_sentence(markup, registry).map_err(|e| e.at_line(lineno))?;
        if continuation {
            match turns.last_mut() {
                Some(turn) if turn.role == role => turn.sentences.push(sentence),
                _ => return Err(CorpusError::BadContinuation.at_line(lineno)),
            }
        } else {
            turns.push(Turn {
                role,
                sentences: vec![sentence],
            });
        }
    }
    if turns.is_empty() {
        return Err(CorpusError::EmptyDialogue);
    }
    Ok(Dialogue {
        id: id.to_string(),
        turns,
        participant_ids: None,
    })
}

fn content_lines(source: &str) -> Vec<(usize, &str)> {
    source
        .lines()
        .enumerate()
        .map(|(i, raw)| (i + 1, raw.strip_suffix('\r').unwrap_or(raw)))
        .filter(|(_, line)| !line.trim_start().starts_with('#'))
        .collect()
}

/// Parse a transcript holding a single dialogue (blank lines ignored).
pub fn parse_transcript(source: &str, registry: &LabelRegistry) -> Result<Dialogue, CorpusError> {
    let lines: Vec<(usize, &str)> = content_lines(source)
        .into_iter()
        .filter(|(_, line)| !line.trim().is_empty())
        .collect();
    parse_block(&lines, "d1", registry)
}

/// Parse a transcript holding one or more dialogues separated by blank
/// lines. Dialogue ids are assigned `d1`, `d2`, ... in file order.
pub fn parse_corpus(source: &str, registry: &LabelRegistry) -> Result<Corpus, CorpusError> {
    let mut dialogues = Vec::new();
    let mut block: Vec<(usize, &str)> = Vec::new();
    for (lineno, line) in content_lines(source) {
        if line.trim().is_empty() {
            if !block.is_empty() {
                let id = format!("d{}", dialogues.len() + 1);
                dialogues.push(parse_block(&block, &id, registry)?);
                block.clear();
            }
        } else {
            block.push((lineno, line));
        }
    }
    if !block.is_empty() {
        let id = format!("d{}", dialogues.len() + 1);
        dialogues.push(parse_block(&block, &id, registry)?);
    }
    if dialogues.is_empty() {
        return Err(CorpusError::EmptyDialogue);
    }
    Ok(Corpus { dialogues })
}

/// Render a dialogue back to transcript lines in canonical markup.
pub fn render_transcript(dialogue: &Dialogue) -> String {
    let mut out = String::new();
    for turn in &dialogue.turns {
        for (i, sentence) in turn.sentences.iter().enumerate() {
            out.push_str(turn.role.as_str());
            if i > 0 {
                out.push('+');
            }
            out.push('\t');
            out.push_str(&serialize_sentence(sentence));
            out.push('\n');
        }
    }
    out
}

/// Render a corpus as blank-line separated transcripts.
pub fn render_corpus(corpus: &Corpus) -> String {
    let mut out = String::new();
    for (i, dialogue) in corpus.dialogues.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        out.push_str(&render_transcript(dialogue));
    }
    out
}
