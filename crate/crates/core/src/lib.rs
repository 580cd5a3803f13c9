//! Corpus toolkit for peer-support weight-management chat dialogues
//! annotated with behavior-change labels.
//!
//! Sentences carry nested bracketed spans from three label families:
//! stages of change (SOC), processes of change (POC), and conversational
//! "other" labels. The crate parses that markup into span trees, validates
//! and serializes it, flattens sentences into per-family segments, runs
//! bag-of-words classification experiments (segmented vs. unsegmented,
//! with a majority baseline), measures inter-annotator agreement, and
//! checks POC suggestions against a stage/process compatibility table.

pub mod agreement;
pub mod corpus;
pub mod experiment;
pub mod features;
pub mod fixtures;
pub mod generate;
pub mod learn;
pub mod segmentation;
pub mod ttm;

pub use corpus::{AnnotatedSentence, Corpus, Dialogue, Role, SpanNode, Turn};
pub use ttm::{CompatibilityMatrix, Family, LabelRegistry};
