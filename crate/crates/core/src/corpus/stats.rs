//! Corpus-level statistics.

use super::Corpus;
use crate::features;
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use std::fmt;

/// An exact reduced fraction, so `avg * num_dialogues == num_turns` holds
/// without rounding.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rational {
    pub numer: u64,
    pub denom: u64,
}

impl Rational {
    pub fn new(numer: u64, denom: u64) -> Rational {
        if denom == 0 {
            return Rational { numer: 0, denom: 1 };
        }
        let g = gcd(numer, denom);
        Rational {
            numer: numer / g,
            denom: denom / g,
        }
    }

    pub fn as_f64(&self) -> f64 {
        self.numer as f64 / self.denom as f64
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.denom == 1 {
            write!(f, "{}", self.numer)
        } else {
            write!(f, "{}/{}", self.numer, self.denom)
        }
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusStats {
    pub num_users: u64,
    pub num_dialogues: u64,
    pub num_turns: u64,
    pub num_word_tokens: u64,
    pub avg_turns_per_dialogue: Rational,
}

/// Compute corpus statistics. Word tokens are counted on plain text with
/// the preprocessing tokenizer, before stopword removal. Users are the
/// distinct participant ids; a dialogue without ids contributes two
/// anonymous users.
pub fn corpus_stats(corpus: &Corpus) -> CorpusStats {
    let mut named: BTreeSet<&str> = BTreeSet::new();
    let mut anonymous = 0u64;
    let mut turns = 0u64;
    let mut tokens = 0u64;

    for dialogue in &corpus.dialogues {
        match &dialogue.participant_ids {
            Some((a, b)) => {
                named.insert(a);
                named.insert(b);
            }
            None => anonymous += 2,
        }
        turns += dialogue.turns.len() as u64;
        for turn in &dialogue.turns {
            for sentence in &turn.sentences {
                tokens += features::tokenize(&sentence.plain_text).len() as u64;
            }
        }
    }

    let dialogues = corpus.dialogues.len() as u64;
    CorpusStats {
        num_users: named.len() as u64 + anonymous,
        num_dialogues: dialogues,
        num_turns: turns,
        num_word_tokens: tokens,
        avg_turns_per_dialogue: Rational::new(turns, dialogues),
    }
}
