//! Sentence-level inter-annotator agreement.
//!
//! Two annotations of the same dialogue reduce to aligned label sequences
//! (one label or NULL per sentence, using the same widest-span rule as
//! unsegmented classification), and Cohen's kappa is computed per family.

use crate::corpus::Dialogue;
use crate::segmentation::unsegmented_gold;
use crate::ttm::Family;
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum AgreementError {
    #[error("annotator sequences differ in length: {a} vs {b}")]
    LengthMismatch { a: usize, b: usize },
    #[error("agreement needs at least one aligned sentence")]
    Empty,
    #[error("degenerate marginals: expected agreement is 1 but sequences differ")]
    DegenerateMarginals,
}

/// Two equal-length label sequences, aligned by sentence.
#[derive(Debug, Clone, PartialEq)]
pub struct LabelSequencePair {
    a: Vec<Option<String>>,
    b: Vec<Option<String>>,
}

impl LabelSequencePair {
    pub fn new(
        a: Vec<Option<String>>,
        b: Vec<Option<String>>,
    ) -> Result<LabelSequencePair, AgreementError> {
        if a.len() != b.len() {
            return Err(AgreementError::LengthMismatch {
                a: a.len(),
                b: b.len(),
            });
        }
        if a.is_empty() {
            return Err(AgreementError::Empty);
        }
        Ok(LabelSequencePair { a, b })
    }

    pub fn len(&self) -> usize {
        self.a.len()
    }

    pub fn is_empty(&self) -> bool {
        false // construction requires length >= 1
    }
}

/// One label (or NULL) per sentence of the dialogue, in order, for one
/// family: the widest-span reduction shared with unsegmented golds.
pub fn sentence_labels(dialogue: &Dialogue, family: Family) -> Vec<Option<String>> {
    dialogue
        .turns
        .iter()
        .flat_map(|turn| &turn.sentences)
        .map(|sentence| unsegmented_gold(sentence, family))
        .collect()
}

/// Cohen's kappa `(p_o - p_e) / (1 - p_e)` with expected agreement from
/// the per-annotator marginals.
///
/// Counting is exact integer arithmetic; the single division happens at
/// the end. When the marginals are degenerate (`p_e = 1`, both annotators
/// constant on one label) the sequences are necessarily identical and
/// kappa is 1; any other degenerate case is reported as an error.
pub fn cohens_kappa(pair: &LabelSequencePair) -> Result<f64, AgreementError> {
    let n = pair.len() as i128;
    let agree = pair
        .a
        .iter()
        .zip(&pair.b)
        .filter(|(x, y)| x == y)
        .count() as i128;

    let mut marginals: BTreeMap<&Option<String>, (i128, i128)> = BTreeMap::new();
    for label in &pair.a {
        marginals.entry(label).or_default().0 += 1;
    }
    for label in &pair.b {
        marginals.entry(label).or_default().1 += 1;
    }
    // p_e = sum_c (a_c/n)(b_c/n), so kappa = (n*agree - S) / (n^2 - S)
    // with S = sum_c a_c * b_c.
    let s: i128 = marginals.values().map(|(a, b)| a * b).sum();

    let numer = n * agree - s;
    let denom = n * n - s;
    if denom == 0 {
        return if agree == n {
            Ok(1.0)
        } else {
            Err(AgreementError::DegenerateMarginals)
        };
    }
    Ok(numer as f64 / denom as f64)
}
