//! Parse/serialize round-trip over randomly generated span forests.

use proptest::prelude::*;
use ttmchat::corpus::{parse_sentence, serialize_sentence, AnnotatedSentence, SpanNode};
use ttmchat::ttm::{builtin_registry, Family, LabelRegistry};

/// A sentence blueprint: words and labeled groups over words.
#[derive(Debug, Clone)]
enum Piece {
    Word(String),
    Span(usize, Vec<Piece>),
}

fn piece_strategy(n_labels: usize) -> impl Strategy<Value = Piece> {
    let word = "[a-z][a-z0-9]{0,7}".prop_map(Piece::Word);
    word.prop_recursive(4, 24, 4, move |inner| {
        (0..n_labels, prop::collection::vec(inner, 1..4))
            .prop_map(|(label, children)| Piece::Span(label, children))
    })
}

fn sentence_strategy(n_labels: usize) -> impl Strategy<Value = Vec<Piece>> {
    prop::collection::vec(piece_strategy(n_labels), 1..6)
}

/// Lay pieces out as canonical plain text (single spaces between words)
/// and build the span forest over it.
fn layout(
    pieces: &[Piece],
    labels: &[(String, Family)],
    text: &mut String,
    chars: &mut usize,
    nodes: &mut Vec<SpanNode>,
) {
    for piece in pieces {
        match piece {
            Piece::Word(word) => {
                if *chars > 0 {
                    text.push(' ');
                    *chars += 1;
                }
                text.push_str(word);
                *chars += word.chars().count();
            }
            Piece::Span(label_idx, children) => {
                let start = *chars + usize::from(*chars > 0);
                let mut child_nodes = Vec::new();
                layout(children, labels, text, chars, &mut child_nodes);
                let (label, family) = &labels[*label_idx];
                nodes.push(SpanNode {
                    label: label.clone(),
                    family: *family,
                    start,
                    end: *chars,
                    children: child_nodes,
                });
            }
        }
    }
}

fn build_sentence(pieces: &[Piece], labels: &[(String, Family)]) -> AnnotatedSentence {
    let mut text = String::new();
    let mut chars = 0;
    let mut roots = Vec::new();
    layout(pieces, labels, &mut text, &mut chars, &mut roots);
    AnnotatedSentence {
        plain_text: text,
        roots,
    }
}

fn label_table(registry: &LabelRegistry) -> Vec<(String, Family)> {
    registry
        .labels()
        .map(|def| (def.name.clone(), def.family))
        .collect()
}

proptest! {
    #[test]
    fn random_forest_round_trips(pieces in sentence_strategy(27)) {
        let registry = builtin_registry();
        let labels = label_table(&registry);
        let sentence = build_sentence(&pieces, &labels);

        let markup = serialize_sentence(&sentence);
        let parsed = parse_sentence(&markup, &registry).expect("serialized markup parses");
        prop_assert_eq!(&parsed, &sentence);

        // Serializing again is stable and never alters the plain text.
        prop_assert_eq!(serialize_sentence(&parsed), markup);
        prop_assert_eq!(parsed.plain_text, sentence.plain_text);
    }

    #[test]
    fn parsed_span_offsets_match_covered_text(pieces in sentence_strategy(27)) {
        let registry = builtin_registry();
        let labels = label_table(&registry);
        let sentence = build_sentence(&pieces, &labels);
        let parsed = parse_sentence(&serialize_sentence(&sentence), &registry).unwrap();
        for span in parsed.spans() {
            let covered = span.covered_text(&parsed.plain_text);
            prop_assert!(!covered.trim().is_empty());
            prop_assert!(!covered.starts_with(' '));
            prop_assert!(!covered.ends_with(' '));
        }
    }
}
