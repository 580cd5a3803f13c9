//! Synthetic corpus generation from per-label phrase templates.
//!
//! Stands in for collected chat data at desk scale: dialogues alternate
//! helper/seeker turns, every sentence is composed from labeled phrase
//! templates (so gold spans exist for all three families), and a noise
//! rate swaps individual tokens for tokens from other labels' pools to
//! keep the classification task non-trivial.

use crate::corpus::{parse_transcript, Corpus, CorpusError, Dialogue};
use crate::ttm::{Family, LabelRegistry};
use rand::seq::IndexedRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

const TEMPLATES: &str = include_str!("../data/templates.tsv");

#[derive(Debug, Error, PartialEq)]
pub enum GenerateError {
    #[error("noise rate must satisfy 0 <= epsilon < 1, got {0}")]
    BadEpsilon(f64),
    #[error("template line {line} is not `label<TAB>phrase`")]
    BadTemplateLine { line: usize },
    #[error("template label `{0}` is not in the registry")]
    UnknownLabel(String),
    #[error("registry label `{0}` has no template phrase")]
    MissingTemplates(String),
    #[error("template pool has no filler phrases")]
    MissingFiller,
    #[error("generated markup failed to parse: {0}")]
    Parse(#[from] CorpusError),
}

#[derive(Debug, Clone)]
struct LabelTemplates {
    label: String,
    family: Family,
    phrases: Vec<Vec<String>>,
}

/// Phrase templates per canonical label, plus unlabeled filler phrases.
#[derive(Debug, Clone)]
pub struct TemplatePool {
    entries: Vec<LabelTemplates>,
    filler: Vec<Vec<String>>,
    // flat (label index, token) pairs for noise sampling
    noise_pool: Vec<(usize, String)>,
}

impl TemplatePool {
    /// The shipped templates.
    pub fn builtin(registry: &LabelRegistry) -> TemplatePool {
        TemplatePool::parse(TEMPLATES, registry).expect("shipped templates are valid")
    }

    /// Parse `label<TAB>phrase` lines (`NULL` for filler, `#` comments).
    /// Every registry label must end up with at least one phrase.
    pub fn parse(text: &str, registry: &LabelRegistry) -> Result<TemplatePool, GenerateError> {
        let mut entries: Vec<LabelTemplates> = registry
            .labels()
            .map(|def| LabelTemplates {
                label: def.name.clone(),
                family: def.family,
                phrases: Vec::new(),
            })
            .collect();
        let mut filler = Vec::new();

        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (label, phrase) = line
                .split_once('\t')
                .ok_or(GenerateError::BadTemplateLine { line: lineno + 1 })?;
            let tokens: Vec<String> =
                phrase.split_whitespace().map(str::to_string).collect();
            if tokens.is_empty() {
                return Err(GenerateError::BadTemplateLine { line: lineno + 1 });
            }
            if label.trim() == "NULL" {
                filler.push(tokens);
                continue;
            }
            let def = registry
                .resolve(label)
                .ok_or_else(|| GenerateError::UnknownLabel(label.trim().to_string()))?;
            entries
                .iter_mut()
                .find(|e| e.label == def.name)
                .expect("entries cover the registry")
                .phrases
                .push(tokens);
        }

        if let Some(empty) = entries.iter().find(|e| e.phrases.is_empty()) {
            return Err(GenerateError::MissingTemplates(empty.label.clone()));
        }
        if filler.is_empty() {
            return Err(GenerateError::MissingFiller);
        }

        let noise_pool = entries
            .iter()
            .enumerate()
            .flat_map(|(i, e)| {
                e.phrases
                    .iter()
                    .flatten()
                    .map(move |tok| (i, tok.clone()))
            })
            .collect();
        Ok(TemplatePool {
            entries,
            filler,
            noise_pool,
        })
    }

    fn of_family(&self, family: Family) -> Vec<usize> {
        self.entries
            .iter()
            .enumerate()
            .filter(|(_, e)| e.family == family)
            .map(|(i, _)| i)
            .collect()
    }

    fn named(&self, label: &str) -> usize {
        self.entries
            .iter()
            .position(|e| e.label == label)
            .expect("label exists in pool")
    }
}

/// How synthetic dialogues are shaped.
#[derive(Debug, Clone)]
pub struct GeneratorSpec {
    pub templates: TemplatePool,
    /// Inclusive range of turns per dialogue (one sentence per turn).
    pub turns_per_dialogue: (usize, usize),
    /// Per-token probability of swapping a token for one sampled from
    /// another label's pool.
    pub epsilon: f64,
    pub seed: u64,
}

impl GeneratorSpec {
    pub fn new(registry: &LabelRegistry, epsilon: f64, seed: u64) -> Result<GeneratorSpec, GenerateError> {
        if !(0.0..1.0).contains(&epsilon) {
            return Err(GenerateError::BadEpsilon(epsilon));
        }
        Ok(GeneratorSpec {
            templates: TemplatePool::builtin(registry),
            turns_per_dialogue: (10, 10),
            epsilon,
            seed,
        })
    }
}

struct Composer<'a> {
    pool: &'a TemplatePool,
    epsilon: f64,
    rng: ChaCha8Rng,
    socs: Vec<usize>,
    pocs: Vec<usize>,
    others: Vec<usize>,
    soc_children: Vec<usize>,
    poc_children: Vec<usize>,
    openers: Vec<usize>,
}

impl<'a> Composer<'a> {
    fn new(pool: &'a TemplatePool, epsilon: f64, seed: u64) -> Composer<'a> {
        Composer {
            pool,
            epsilon,
            rng: ChaCha8Rng::seed_from_u64(seed),
            socs: pool.of_family(Family::Soc),
            pocs: pool.of_family(Family::Poc),
            others: pool.of_family(Family::Other),
            soc_children: ["goal", "time-frame", "current-weight", "lifestyle-undesired"]
                .iter()
                .map(|l| pool.named(l))
                .collect(),
            poc_children: ["good-diet", "bad-diet", "device", "frequency", "time-frame"]
                .iter()
                .map(|l| pool.named(l))
                .collect(),
            openers: ["acknowledge", "question", "greeting"]
                .iter()
                .map(|l| pool.named(l))
                .collect(),
        }
    }

    /// A phrase of the given label with token noise applied. Noise swaps
    /// a token for one drawn from a different label's pool.
    fn phrase(&mut self, label_idx: usize) -> Vec<String> {
        let phrases = &self.pool.entries[label_idx].phrases;
        let tokens = phrases.choose(&mut self.rng).expect("phrases nonempty").clone();
        self.noised(tokens, Some(label_idx))
    }

    fn filler(&mut self) -> Vec<String> {
        let tokens = self
            .pool
            .filler
            .choose(&mut self.rng)
            .expect("filler nonempty")
            .clone();
        self.noised(tokens, None)
    }

    fn noised(&mut self, mut tokens: Vec<String>, own_label: Option<usize>) -> Vec<String> {
        if self.epsilon == 0.0 {
            return tokens;
        }
        for token in tokens.iter_mut() {
            if self.rng.random::<f64>() < self.epsilon {
                for _ in 0..16 {
                    let (label, candidate) = self
                        .pool
                        .noise_pool
                        .choose(&mut self.rng)
                        .expect("noise pool nonempty");
                    if Some(*label) != own_label {
                        *token = candidate.clone();
                        break;
                    }
                }
            }
        }
        tokens
    }

    fn span(&mut self, label_idx: usize, extra_child: Option<usize>) -> String {
        let label = self.pool.entries[label_idx].label.clone();
        let mut inner = self.phrase(label_idx).join(" ");
        if let Some(child) = extra_child {
            let child_label = self.pool.entries[child].label.clone();
            let child_text = self.phrase(child).join(" ");
            inner = format!("{inner} [{child_label} : {child_text}]");
        }
        format!("[{label} : {inner}]")
    }

    fn pick(&mut self, from: &[usize]) -> usize {
        *from.choose(&mut self.rng).expect("nonempty label set")
    }

    /// One sentence of markup for the given speaker.
    fn sentence(&mut self, helper: bool) -> String {
        let mut parts: Vec<String> = Vec::new();
        if self.rng.random::<f64>() < 0.5 {
            let opener = self.pick(&self.openers.clone());
            parts.push(self.span(opener, None));
        }
        if self.rng.random::<f64>() < 0.4 {
            parts.push(self.filler().join(" "));
        }

        let core = self.rng.random::<f64>();
        if helper {
            if core < 0.45 {
                let poc = self.pick(&self.pocs.clone());
                let child = (self.rng.random::<f64>() < 0.5)
                    .then(|| self.pick(&self.poc_children.clone()));
                parts.push(self.span(poc, child));
            } else if core < 0.75 {
                let other = self.pick(&self.others.clone());
                parts.push(self.span(other, None));
            } else {
                parts.push(self.filler().join(" "));
            }
        } else if core < 0.4 {
            let soc = self.pick(&self.socs.clone());
            let child = (self.rng.random::<f64>() < 0.6)
                .then(|| self.pick(&self.soc_children.clone()));
            parts.push(self.span(soc, child));
        } else if core < 0.6 {
            let poc = self.pick(&self.pocs.clone());
            parts.push(self.span(poc, None));
        } else if core < 0.85 {
            let other = self.pick(&self.others.clone());
            parts.push(self.span(other, None));
        } else {
            parts.push(self.filler().join(" "));
        }

        parts.join(" ")
    }
}

/// Generate a deterministic synthetic corpus: `n_dialogues` dialogues of
/// alternating helper/seeker turns (helper first), one sentence per turn.
pub fn generate_corpus(
    spec: &GeneratorSpec,
    n_dialogues: usize,
    registry: &LabelRegistry,
) -> Result<Corpus, GenerateError> {
    if !(0.0..1.0).contains(&spec.epsilon) {
        return Err(GenerateError::BadEpsilon(spec.epsilon));
    }
    let mut composer = Composer::new(&spec.templates, spec.epsilon, spec.seed);
    let (lo, hi) = spec.turns_per_dialogue;
    let mut dialogues: Vec<Dialogue> = Vec::with_capacity(n_dialogues);

    for d in 0..n_dialogues {
        let turns = if hi > lo {
            composer.rng.random_range(lo..=hi)
        } else {
            lo
        };
        let mut lines = String::new();
        for t in 0..turns {
            let helper = t % 2 == 0;
            let markup = if t == 0 {
                let greeting = composer.pool.named("greeting");
                composer.span(greeting, None)
            } else if t + 1 == turns && !helper {
                let end = composer.pool.named("end");
                composer.span(end, None)
            } else {
                composer.sentence(helper)
            };
            lines.push_str(if helper { "helper" } else { "seeker" });
            lines.push('\t');
            lines.push_str(&markup);
            lines.push('\n');
        }
        let mut dialogue = parse_transcript(&lines, registry)?;
        dialogue.id = format!("d{}", d + 1);
        dialogues.push(dialogue);
    }

    Ok(Corpus { dialogues })
}
