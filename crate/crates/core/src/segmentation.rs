//! Flatten annotated sentences into per-family segment sequences and
//! extract labeled training instances.
//!
//! Each family gets its own flattening: spans of that family become
//! labeled segments, and the stretches of plain text they leave uncovered
//! become NULL segments. A sentence like
//!
//! ```text
//! [GREET{OTHER}: Hi there] [ACTION{SOC}: I would like to ... me much]
//! ```
//!
//! therefore yields different segmentations for the SOC, POC, and OTHER
//! classifiers.

use crate::corpus::{slice_chars, AnnotatedSentence, Corpus, SpanNode};
use crate::ttm::Family;
use serde::Serialize;
use std::fmt;
use thiserror::Error;

/// Which kind of instances an extraction produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Segmented,
    Unsegmented,
}

impl Mode {
    pub fn as_str(&self) -> &'static str {
        match self {
            Mode::Segmented => "segmented",
            Mode::Unsegmented => "unsegmented",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Where in the corpus an error was detected.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Location {
    pub dialogue: String,
    pub turn: usize,
    pub sentence: usize,
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "dialogue {} turn {} sentence {}",
            self.dialogue, self.turn, self.sentence
        )
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum SegmentationError {
    #[error(
        "{family} span `{label}` nested inside `{ancestor}`{}",
        location.as_ref().map(|l| format!(" at {l}")).unwrap_or_default()
    )]
    SameFamilyNesting {
        family: Family,
        label: String,
        ancestor: String,
        location: Option<Location>,
    },
}

/// A contiguous slice of one sentence carrying one family's label or NULL.
///
/// `intervals` are the plain-text character intervals the text was taken
/// from: exactly one for a labeled segment (the span's range), and one
/// per uncovered stretch for a NULL segment. Interval boundaries are
/// trimmed so the text never starts or ends with whitespace.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Segment {
    pub text: String,
    pub family: Family,
    pub label: Option<String>,
    pub intervals: Vec<(usize, usize)>,
}

/// One classifier input: a piece of text and its gold label.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    pub text: String,
    pub family: Family,
    pub gold: Option<String>,
    pub origin: Mode,
}

/// Collect the ranges of all family-`f` spans, left to right, erroring if
/// one is nested inside another.
fn family_spans<'a>(
    sentence: &'a AnnotatedSentence,
    family: Family,
) -> Result<Vec<&'a SpanNode>, SegmentationError> {
    fn walk<'a>(
        nodes: &'a [SpanNode],
        family: Family,
        ancestor: Option<&'a str>,
        out: &mut Vec<&'a SpanNode>,
    ) -> Result<(), SegmentationError> {
        for node in nodes {
            let mut enclosing = ancestor;
            if node.family == family {
                if let Some(ancestor) = ancestor {
                    return Err(SegmentationError::SameFamilyNesting {
                        family,
                        label: node.label.clone(),
                        ancestor: ancestor.to_string(),
                        location: None,
                    });
                }
                out.push(node);
                enclosing = Some(&node.label);
            }
            walk(&node.children, family, enclosing, out)?;
        }
        Ok(())
    }
    let mut out = Vec::new();
    walk(&sentence.roots, family, None, &mut out)?;
    Ok(out)
}

/// Trim a character interval to its non-whitespace core; None if nothing
/// is left.
fn trim_interval(chars: &[char], mut start: usize, mut end: usize) -> Option<(usize, usize)> {
    while start < end && chars[start].is_whitespace() {
        start += 1;
    }
    while end > start && chars[end - 1].is_whitespace() {
        end -= 1;
    }
    (start < end).then_some((start, end))
}

/// Flatten one sentence for one family.
///
/// Output alternates between NULL segments (the maximal uncovered gaps,
/// whitespace-only gaps omitted) and labeled segments (the family's span
/// ranges), left to right.
pub fn flatten_family(
    sentence: &AnnotatedSentence,
    family: Family,
) -> Result<Vec<Segment>, SegmentationError> {
    let spans = family_spans(sentence, family)?;
    let chars: Vec<char> = sentence.plain_text.chars().collect();
    let mut segments = Vec::new();
    let mut cursor = 0usize;

    let push_gap = |from: usize, to: usize, segments: &mut Vec<Segment>| {
        if let Some((s, e)) = trim_interval(&chars, from, to) {
            segments.push(Segment {
                text: chars[s..e].iter().collect(),
                family,
                label: None,
                intervals: vec![(s, e)],
            });
        }
    };

    for span in &spans {
        push_gap(cursor, span.start, &mut segments);
        segments.push(Segment {
            text: slice_chars(&sentence.plain_text, span.start, span.end),
            family,
            label: Some(span.label.clone()),
            intervals: vec![(span.start, span.end)],
        });
        cursor = span.end;
    }
    push_gap(cursor, chars.len(), &mut segments);
    Ok(segments)
}

/// The sentence-level gold label for one family: the label of the widest
/// family span (ties broken by earliest start), or NULL when the sentence
/// has no span of that family.
pub fn unsegmented_gold(sentence: &AnnotatedSentence, family: Family) -> Option<String> {
    let mut best: Option<&SpanNode> = None;
    for span in sentence.spans() {
        if span.family != family {
            continue;
        }
        let better = match best {
            None => true,
            Some(b) => {
                span.width() > b.width() || (span.width() == b.width() && span.start < b.start)
            }
        };
        if better {
            best = Some(span);
        }
    }
    best.map(|span| span.label.clone())
}

/// Extract one family's instances from a whole corpus, in corpus order.
///
/// Unsegmented: one instance per sentence, gold from [`unsegmented_gold`].
/// Segmented: one instance per [`flatten_family`] segment, NULL gaps
/// included, so classifiers learn to emit NULL.
pub fn extract_instances(
    corpus: &Corpus,
    family: Family,
    mode: Mode,
) -> Result<Vec<Instance>, SegmentationError> {
    let mut instances = Vec::new();
    for dialogue in &corpus.dialogues {
        for (turn_idx, turn) in dialogue.turns.iter().enumerate() {
            for (sent_idx, sentence) in turn.sentences.iter().enumerate() {
                match mode {
                    Mode::Unsegmented => instances.push(Instance {
                        text: sentence.plain_text.clone(),
                        family,
                        gold: unsegmented_gold(sentence, family),
                        origin: mode,
                    }),
                    Mode::Segmented => {
                        let segments = flatten_family(sentence, family).map_err(|e| match e {
                            SegmentationError::SameFamilyNesting {
                                family,
                                label,
                                ancestor,
                                ..
                            } => SegmentationError::SameFamilyNesting {
                                family,
                                label,
                                ancestor,
                                location: Some(Location {
                                    dialogue: dialogue.id.clone(),
                                    turn: turn_idx,
                                    sentence: sent_idx,
                                }),
                            },
                        })?;
                        instances.extend(segments.into_iter().map(|seg| Instance {
                            text: seg.text,
                            family,
                            gold: seg.label,
                            origin: mode,
                        }));
                    }
                }
            }
        }
    }
    Ok(instances)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{parse_sentence, parse_transcript};
    use crate::fixtures::MIXED_SENTENCE;
    use crate::ttm::builtin_registry;

    fn sentence(raw: &str) -> AnnotatedSentence {
        parse_sentence(raw, &builtin_registry()).unwrap()
    }

    fn texts(segments: &[Segment]) -> Vec<(Option<&str>, &str)> {
        segments
            .iter()
            .map(|s| (s.label.as_deref(), s.text.as_str()))
            .collect()
    }

    #[test]
    fn mixed_sentence_soc_flattening() {
        let s = sentence(MIXED_SENTENCE);
        let segs = flatten_family(&s, Family::Soc).unwrap();
        assert_eq!(
            texts(&segs),
            vec![
                (None, "Hi there"),
                (
                    Some("Action"),
                    "I would like to lose weight but exercising didn't help me much"
                ),
            ]
        );
    }

    #[test]
    fn mixed_sentence_poc_flattening() {
        let s = sentence(MIXED_SENTENCE);
        let segs = flatten_family(&s, Family::Poc).unwrap();
        assert_eq!(
            texts(&segs),
            vec![
                (None, "Hi there I would like to lose weight but"),
                (Some("social-liberation"), "exercising"),
                (None, "didn't help me much"),
            ]
        );
    }

    #[test]
    fn mixed_sentence_other_flattening() {
        let s = sentence(MIXED_SENTENCE);
        let segs = flatten_family(&s, Family::Other).unwrap();
        assert_eq!(
            texts(&segs),
            vec![
                (Some("greeting"), "Hi there"),
                (None, "I would like to"),
                (Some("goal"), "lose weight"),
                (None, "but exercising didn't help me much"),
            ]
        );
    }

    #[test]
    fn unannotated_sentence_single_null_segment() {
        let s = sentence("ok then");
        for family in Family::ALL {
            let segs = flatten_family(&s, family).unwrap();
            assert_eq!(texts(&segs), vec![(None, "ok then")]);
        }
    }

    #[test]
    fn punctuation_stays_in_gap_segments() {
        let s = sentence(
            "[Action : When [Lifestyle-undes : my music was no longer motivating], I found new music]",
        );
        let segs = flatten_family(&s, Family::Other).unwrap();
        assert_eq!(
            texts(&segs),
            vec![
                (None, "When"),
                (Some("lifestyle-undesired"), "my music was no longer motivating"),
                (None, ", I found new music"),
            ]
        );
    }

    #[test]
    fn same_family_nesting_rejected() {
        let s = sentence("[question : How much weight have you lost [TimeFrame : thus far?]]");
        let err = flatten_family(&s, Family::Other).unwrap_err();
        assert_eq!(
            err,
            SegmentationError::SameFamilyNesting {
                family: Family::Other,
                label: "time-frame".into(),
                ancestor: "question".into(),
                location: None,
            }
        );
        // The other families of the same sentence still flatten.
        assert!(flatten_family(&s, Family::Soc).is_ok());
    }

    #[test]
    fn segment_intervals_match_text() {
        let s = sentence(MIXED_SENTENCE);
        for family in Family::ALL {
            for seg in flatten_family(&s, family).unwrap() {
                let joined = seg
                    .intervals
                    .iter()
                    .map(|&(a, b)| slice_chars(&s.plain_text, a, b))
                    .collect::<Vec<_>>()
                    .join(" ");
                assert_eq!(joined, seg.text);
            }
        }
    }

    #[test]
    fn coverage_and_count_law() {
        let s = sentence(MIXED_SENTENCE);
        let chars: Vec<char> = s.plain_text.chars().collect();
        for family in Family::ALL {
            let segs = flatten_family(&s, family).unwrap();
            let spans = s
                .spans()
                .iter()
                .filter(|sp| sp.family == family)
                .count();
            let gaps = segs.iter().filter(|seg| seg.label.is_none()).count();
            assert_eq!(segs.len(), spans + gaps);

            // Every non-whitespace position covered exactly once, in order.
            let mut covered = vec![0u8; chars.len()];
            let mut last_end = 0usize;
            for seg in &segs {
                for &(a, b) in &seg.intervals {
                    assert!(a >= last_end, "segments out of order");
                    last_end = b;
                    for c in covered.iter_mut().take(b).skip(a) {
                        *c += 1;
                    }
                }
            }
            for (i, &c) in covered.iter().enumerate() {
                if chars[i].is_whitespace() {
                    assert!(c <= 1);
                } else {
                    assert_eq!(c, 1, "position {i} covered {c} times");
                }
            }
        }
    }

    #[test]
    fn unsegmented_gold_widest_span() {
        let s = sentence(MIXED_SENTENCE);
        assert_eq!(unsegmented_gold(&s, Family::Soc), Some("Action".into()));
        assert_eq!(
            unsegmented_gold(&s, Family::Poc),
            Some("social-liberation".into())
        );
        // OTHER: greeting [0,8) width 8 vs goal [25,36) width 11.
        assert_eq!(unsegmented_gold(&s, Family::Other), Some("goal".into()));
        assert_eq!(unsegmented_gold(&sentence("plain text"), Family::Soc), None);
    }

    #[test]
    fn unsegmented_gold_tie_breaks_earliest() {
        // Widths 11 and 4: the width-11 span wins regardless of order.
        let s = sentence("[goal : down to 190] then [device : a fi]");
        assert_eq!(unsegmented_gold(&s, Family::Other), Some("goal".into()));
        // Equal widths: earliest start wins.
        let s = sentence("[goal : abcd] then [device : wxyz]");
        assert_eq!(unsegmented_gold(&s, Family::Other), Some("goal".into()));
    }

    #[test]
    fn mode_consistency() {
        for raw in [MIXED_SENTENCE, "no spans here", "[greeting : hi]"] {
            let s = sentence(raw);
            for family in Family::ALL {
                let gold = unsegmented_gold(&s, family);
                let labeled = flatten_family(&s, family)
                    .unwrap()
                    .iter()
                    .any(|seg| seg.label.is_some());
                assert_eq!(gold.is_none(), !labeled);
            }
        }
    }

    #[test]
    fn extract_instances_orders_and_golds() {
        let reg = builtin_registry();
        let d = parse_transcript(&format!("seeker\t{MIXED_SENTENCE}\n"), &reg).unwrap();
        let corpus = Corpus { dialogues: vec![d] };

        let segmented = extract_instances(&corpus, Family::Other, Mode::Segmented).unwrap();
        assert_eq!(
            segmented
                .iter()
                .map(|i| i.gold.as_deref())
                .collect::<Vec<_>>(),
            vec![Some("greeting"), None, Some("goal"), None]
        );

        let unsegmented = extract_instances(&corpus, Family::Soc, Mode::Unsegmented).unwrap();
        assert_eq!(unsegmented.len(), 1);
        assert_eq!(unsegmented[0].gold.as_deref(), Some("Action"));
        assert_eq!(
            unsegmented[0].text,
            "Hi there I would like to lose weight but exercising didn't help me much"
        );

        assert!(extract_instances(&Corpus::default(), Family::Poc, Mode::Segmented)
            .unwrap()
            .is_empty());
    }

    #[test]
    fn extract_instances_reports_location() {
        let reg = builtin_registry();
        let d = parse_transcript(
            "helper\tok\nseeker\t[question : lost how much [TimeFrame : this week]]\n",
            &reg,
        )
        .unwrap();
        let corpus = Corpus { dialogues: vec![d] };
        let err = extract_instances(&corpus, Family::Other, Mode::Segmented).unwrap_err();
        match err {
            SegmentationError::SameFamilyNesting { location, .. } => {
                assert_eq!(
                    location,
                    Some(Location {
                        dialogue: "d1".into(),
                        turn: 1,
                        sentence: 0,
                    })
                );
            }
        }
    }

    #[test]
    fn empty_sentence_yields_no_segments() {
        let s = AnnotatedSentence::default();
        for family in Family::ALL {
            assert!(flatten_family(&s, family).unwrap().is_empty());
        }
    }
}
