//! Multinomial logistic regression with L2 regularization, a majority
//! baseline, and stratified k-fold cross-validation.
//!
//! One classifier is trained per label family; NULL ("no label of this
//! family") participates as an ordinary class. Training minimizes the
//! softmax negative log-likelihood plus `lambda/2 * ||W||^2` (biases
//! unregularized) by gradient descent with backtracking line search:
//! simple, deterministic, and monotone in the objective.

mod cv;
mod model_file;
mod objective;

pub use cv::{cross_validate, kfold_plan, Confusion, EvalReport, FoldEval, FoldPlan};
pub use model_file::{load_model, save_model};
pub use objective::{nll_and_gradient, train_logreg};

use crate::features::SparseVector;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum LearnError {
    #[error("dimension mismatch in {what}: expected {expected}, found {found}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("too few instances: n={n} cannot be split into k={k} folds")]
    TooFewInstances { n: usize, k: usize },
    #[error("no training data")]
    EmptyData,
    #[error("model file line {line}: {what}")]
    BadModelFile { line: usize, what: String },
}

/// Display form of a class label; NULL is the absent-label class.
pub fn class_display(class: &Option<String>) -> &str {
    class.as_deref().unwrap_or("NULL")
}

/// A preprocessed training/evaluation item: tokens plus gold class.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub tokens: Vec<String>,
    pub gold: Option<String>,
}

/// Vectorized data ready for the optimizer. `rows` pair a sparse count
/// vector with an index into `classes`.
#[derive(Debug, Clone)]
pub struct EncodedDataset {
    pub n_features: usize,
    pub classes: Vec<Option<String>>,
    pub rows: Vec<(SparseVector, usize)>,
}

/// The distinct classes of a gold sequence: NULL first, then label names
/// in lexicographic order.
pub fn class_list(golds: &[Option<String>]) -> Vec<Option<String>> {
    let mut classes: Vec<Option<String>> = Vec::new();
    let mut names: Vec<&str> = golds.iter().flatten().map(String::as_str).collect();
    names.sort_unstable();
    names.dedup();
    if golds.iter().any(|g| g.is_none()) {
        classes.push(None);
    }
    classes.extend(names.into_iter().map(|n| Some(n.to_string())));
    classes
}

/// Hyperparameters and bookkeeping for training.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrainOptions {
    pub lambda: f64,
    pub seed: u64,
    pub max_iter: usize,
    pub tol: f64,
}

impl Default for TrainOptions {
    fn default() -> TrainOptions {
        TrainOptions {
            lambda: 1e-8,
            seed: 0,
            max_iter: 500,
            tol: 1e-6,
        }
    }
}

/// Training metadata recorded on every model for reproducibility.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrainMeta {
    pub seed: u64,
    pub iterations: usize,
    pub final_objective: f64,
    /// Objective after each accepted step, initial value first.
    #[serde(skip)]
    pub objective_trace: Vec<f64>,
}

/// Per-class weight vectors and biases for one family's classifier.
#[derive(Debug, Clone, PartialEq)]
pub struct LogRegModel {
    pub classes: Vec<Option<String>>,
    pub n_features: usize,
    /// Row-major classes x features.
    pub weights: Vec<f64>,
    pub bias: Vec<f64>,
    pub lambda: f64,
    pub meta: TrainMeta,
}

impl LogRegModel {
    /// Class scores (logits) for one vector.
    pub fn scores(&self, vector: &SparseVector) -> Vec<f64> {
        let v = self.n_features;
        self.bias
            .iter()
            .enumerate()
            .map(|(c, &b)| {
                b + vector
                    .iter()
                    .map(|(j, count)| self.weights[c * v + j] * count as f64)
                    .sum::<f64>()
            })
            .collect()
    }
}

/// Class probabilities: softmax of the scores, summing to 1.
pub fn predict_proba(model: &LogRegModel, vector: &SparseVector) -> Vec<f64> {
    softmax(&model.scores(vector))
}

/// The argmax class; ties go to the class listed first.
pub fn predict<'m>(model: &'m LogRegModel, vector: &SparseVector) -> &'m Option<String> {
    let scores = model.scores(vector);
    let mut best = 0;
    for (i, &score) in scores.iter().enumerate().skip(1) {
        if score > scores[best] {
            best = i;
        }
    }
    &model.classes[best]
}

pub(crate) fn softmax(scores: &[f64]) -> Vec<f64> {
    let max = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = scores.iter().map(|&s| (s - max).exp()).collect();
    let sum: f64 = exps.iter().sum();
    exps.iter().map(|&e| e / sum).collect()
}

/// The constant predictor of the most frequent gold label (ties broken by
/// lexicographically first display name, NULL sorting as "NULL"), and its
/// accuracy on the same golds.
pub fn majority_baseline(golds: &[Option<String>]) -> Result<(Option<String>, f64), LearnError> {
    if golds.is_empty() {
        return Err(LearnError::EmptyData);
    }
    let mut counts: std::collections::BTreeMap<&str, (usize, &Option<String>)> =
        std::collections::BTreeMap::new();
    for gold in golds {
        counts.entry(class_display(gold)).or_insert((0, gold)).0 += 1;
    }
    // BTreeMap iterates name-ascending, so with a strict `>` the first
    // (lexicographically smallest) name wins ties.
    let mut best: Option<(usize, &Option<String>)> = None;
    for (count, class) in counts.values() {
        if best.is_none_or(|(c, _)| *count > c) {
            best = Some((*count, class));
        }
    }
    let (count, class) = best.expect("nonempty counts");
    Ok((class.clone(), count as f64 / golds.len() as f64))
}
