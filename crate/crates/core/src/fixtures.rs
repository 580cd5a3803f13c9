//! Shipped example data used in tests, docs, and demos.

/// A sentence annotated in all three families at once, in the
/// `[TAG{FAMILY}: ...]` dialect. Its plain text is
/// "Hi there I would like to lose weight but exercising didn't help me much".
pub const MIXED_SENTENCE: &str = "[GREET{OTHER}: Hi there] [ACTION{SOC}: I would like to \
[GOAL{OTHER}: lose weight] but [SL{POC}: exercising] didn't help me much]";

/// A 20-turn annotated weight-loss chat between a helper and a seeker,
/// in transcript format (`role<TAB>markup`). Spelling and spacing are
/// preserved exactly as annotated, misspellings included.
pub const SAMPLE_DIALOGUE: &str = include_str!("../data/sample_dialogue.txt");
