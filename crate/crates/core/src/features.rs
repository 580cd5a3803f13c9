//! Deterministic text preprocessing and bag-of-words vectorization.
//!
//! The pipeline is `tokenize -> lemmatize -> stopword filter`. The
//! lemmatizer is rule-based (an exceptions dictionary plus ordered suffix
//! rules) so results are bit-exact across machines; both the stopword
//! list and the exceptions dictionary ship as data files and can be
//! swapped out.

use std::collections::{HashMap, HashSet};
use thiserror::Error;

const STOPWORDS: &str = include_str!("../data/stopwords.txt");
const LEMMA_EXCEPTIONS: &str = include_str!("../data/lemma_exceptions.tsv");

#[derive(Debug, Error, PartialEq)]
pub enum FeaturesError {
    #[error("stopword list is empty")]
    EmptyStopwords,
    #[error("lemma exceptions line {line} is not `surface<TAB>lemma`")]
    BadExceptionLine { line: usize },
}

/// Stopword set and lemma exceptions used by [`preprocess`].
#[derive(Debug, Clone)]
pub struct TokenPipelineConfig {
    stopwords: HashSet<String>,
    exceptions: HashMap<String, String>,
}

impl Default for TokenPipelineConfig {
    fn default() -> TokenPipelineConfig {
        TokenPipelineConfig::from_files(STOPWORDS, LEMMA_EXCEPTIONS)
            .expect("shipped preprocessing data is valid")
    }
}

impl TokenPipelineConfig {
    /// Build from file contents: stopwords one token per line, exceptions
    /// `surface<TAB>lemma` per line, `#` comments in both.
    pub fn from_files(stopwords: &str, exceptions: &str) -> Result<TokenPipelineConfig, FeaturesError> {
        let stop: HashSet<String> = stopwords
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(|l| l.to_lowercase())
            .collect();
        if stop.is_empty() {
            return Err(FeaturesError::EmptyStopwords);
        }
        let mut map = HashMap::new();
        for (lineno, raw) in exceptions.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (surface, lemma) = line
                .split_once('\t')
                .ok_or(FeaturesError::BadExceptionLine { line: lineno + 1 })?;
            map.insert(surface.trim().to_lowercase(), lemma.trim().to_lowercase());
        }
        Ok(TokenPipelineConfig {
            stopwords: stop,
            exceptions: map,
        })
    }

    /// Replace the stopword list, keeping the lemma exceptions.
    pub fn with_stopwords(mut self, stopwords: &str) -> Result<TokenPipelineConfig, FeaturesError> {
        let other = TokenPipelineConfig::from_files(stopwords, "")?;
        self.stopwords = other.stopwords;
        Ok(self)
    }

    pub fn is_stopword(&self, token: &str) -> bool {
        self.stopwords.contains(token)
    }

    /// Lemmatize one lowercase token: the exceptions dictionary first,
    /// then the first matching suffix rule, repeated until nothing
    /// applies. Iterating makes every output a fixed point, which the
    /// preprocessing idempotence property depends on.
    pub fn lemmatize(&self, token: &str) -> String {
        let mut cur = token.to_string();
        // The iteration bound only matters for user exception files with
        // cycles; each suffix rule strictly shortens the token.
        for _ in 0..=2 * token.len() + 2 {
            if let Some(lemma) = self.exceptions.get(&cur) {
                if *lemma == cur {
                    return cur;
                }
                cur = lemma.clone();
                continue;
            }
            match apply_suffix_rule(&cur) {
                Some(next) => cur = next,
                None => return cur,
            }
        }
        cur
    }

    pub fn exceptions(&self) -> &HashMap<String, String> {
        &self.exceptions
    }
}

/// Suffix rules, longest suffix first. Returns the reduced form, or None
/// when no rule applies.
fn apply_suffix_rule(token: &str) -> Option<String> {
    let n = token.len();
    // ies -> y  (berries -> berry); short words like "dies" are left to
    // the plain s rule.
    if let Some(stem) = token.strip_suffix("ies") {
        if n >= 5 {
            return Some(format!("{stem}y"));
        }
    }
    // ing -> ()  (working -> work)
    if let Some(stem) = token.strip_suffix("ing") {
        if stem.len() >= 3 && !stem.ends_with("ing") {
            return Some(stem.to_string());
        }
    }
    // es -> ()  only after sibilant-like endings (boxes, churches, classes)
    if let Some(stem) = token.strip_suffix("es") {
        if ["x", "z", "ch", "sh", "ss"].iter().any(|s| stem.ends_with(s)) {
            return Some(stem.to_string());
        }
    }
    // ed -> ()  (helped -> help); "eed" and "...eded" stay put
    if let Some(stem) = token.strip_suffix("ed") {
        if stem.len() >= 3 && !token.ends_with("eed") && !stem.ends_with("ed") {
            return Some(stem.to_string());
        }
    }
    // s -> ()  (years -> year)
    if let Some(stem) = token.strip_suffix('s') {
        if n >= 3 && !token.ends_with("ss") && !token.ends_with("us") && !token.ends_with("is") {
            return Some(stem.to_string());
        }
    }
    None
}

/// Lowercase and split on any non-alphanumeric character; digits are
/// tokens too.
pub fn tokenize(text: &str) -> Vec<String> {
    text.to_lowercase()
        .split(|c: char| !c.is_alphanumeric())
        .filter(|piece| !piece.is_empty())
        .map(|piece| piece.to_string())
        .collect()
}

/// tokenize -> lemmatize -> drop stopwords, order preserved.
pub fn preprocess(text: &str, config: &TokenPipelineConfig) -> Vec<String> {
    tokenize(text)
        .iter()
        .map(|t| config.lemmatize(t))
        .filter(|t| !config.is_stopword(t))
        .collect()
}

/// A dense token <-> index bijection, insertion-ordered by first
/// occurrence in the data it was built from.
#[derive(Debug, Clone, PartialEq)]
pub struct Vocabulary {
    tokens: Vec<String>,
    index: HashMap<String, usize>,
}

impl Vocabulary {
    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn index_of(&self, token: &str) -> Option<usize> {
        self.index.get(token).copied()
    }

    pub fn token(&self, index: usize) -> Option<&str> {
        self.tokens.get(index).map(String::as_str)
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn contains(&self, token: &str) -> bool {
        self.index.contains_key(token)
    }

    pub fn from_tokens<I, S>(tokens: I) -> Vocabulary
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut vocab = Vocabulary {
            tokens: Vec::new(),
            index: HashMap::new(),
        };
        for token in tokens {
            let token = token.as_ref();
            if !vocab.index.contains_key(token) {
                vocab.index.insert(token.to_string(), vocab.tokens.len());
                vocab.tokens.push(token.to_string());
            }
        }
        vocab
    }
}

/// Build a vocabulary over training token lists, first occurrence order.
pub fn build_vocabulary<'a, I>(token_lists: I) -> Vocabulary
where
    I: IntoIterator<Item = &'a [String]>,
{
    Vocabulary::from_tokens(token_lists.into_iter().flatten().map(String::as_str))
}

/// Sorted (index, count) pairs; counts are at least 1.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SparseVector(pub Vec<(usize, u32)>);

impl SparseVector {
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, u32)> + '_ {
        self.0.iter().copied()
    }
}

/// Count in-vocabulary tokens; out-of-vocabulary tokens are dropped.
pub fn vectorize(tokens: &[String], vocab: &Vocabulary) -> SparseVector {
    let mut counts: Vec<(usize, u32)> = Vec::new();
    for token in tokens {
        if let Some(idx) = vocab.index_of(token) {
            match counts.binary_search_by_key(&idx, |&(i, _)| i) {
                Ok(pos) => counts[pos].1 += 1,
                Err(pos) => counts.insert(pos, (idx, 1)),
            }
        }
    }
    SparseVector(counts)
}
