//! Stratified k-fold plans and the cross-validation loop.
//!
//! Each fold builds its vocabulary from the training split only, so no
//! test-fold token can leak into training features.

use super::{
    class_display, class_list, predict, train_logreg, EncodedDataset, LearnError, Sample,
    TrainOptions,
};
use crate::features::{build_vocabulary, vectorize};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::collections::BTreeMap;

/// k disjoint index lists partitioning `0..n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FoldPlan {
    pub folds: Vec<Vec<usize>>,
}

impl FoldPlan {
    /// Indices outside fold `test`, ascending.
    pub fn train_indices(&self, test: usize) -> Vec<usize> {
        let mut out: Vec<usize> = self
            .folds
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != test)
            .flat_map(|(_, fold)| fold.iter().copied())
            .collect();
        out.sort_unstable();
        out
    }
}

/// Stratified fold assignment: fold sizes differ by at most one overall
/// and within every label. Deterministic given the seed.
pub fn kfold_plan(
    n: usize,
    k: usize,
    golds: &[Option<String>],
    seed: u64,
) -> Result<FoldPlan, LearnError> {
    if k < 2 || n < k {
        return Err(LearnError::TooFewInstances { n, k });
    }
    if golds.len() != n {
        return Err(LearnError::DimensionMismatch {
            what: "gold labels",
            expected: n,
            found: golds.len(),
        });
    }

    let mut groups: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
    for (idx, gold) in golds.iter().enumerate() {
        groups.entry(class_display(gold)).or_default().push(idx);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut folds: Vec<Vec<usize>> = vec![Vec::new(); k];
    // Deal each label's (shuffled) members to consecutive folds,
    // continuing around the ring between labels: per-label counts differ
    // by at most one per fold, and so do the overall sizes.
    let mut pointer = 0usize;
    for group in groups.values_mut() {
        group.shuffle(&mut rng);
        for (offset, &idx) in group.iter().enumerate() {
            folds[(pointer + offset) % k].push(idx);
        }
        pointer = (pointer + group.len()) % k;
    }
    for fold in &mut folds {
        fold.sort_unstable();
    }
    Ok(FoldPlan { folds })
}

/// Gold x predicted counts over display names.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Confusion {
    pub labels: Vec<String>,
    /// Row-major gold x predicted.
    pub counts: Vec<Vec<u64>>,
}

impl Confusion {
    fn new(labels: Vec<String>) -> Confusion {
        let n = labels.len();
        Confusion {
            labels,
            counts: vec![vec![0; n]; n],
        }
    }

    fn record(&mut self, gold: &str, predicted: &str) {
        let g = self.labels.iter().position(|l| l == gold).expect("gold label known");
        let p = self
            .labels
            .iter()
            .position(|l| l == predicted)
            .expect("predicted label known");
        self.counts[g][p] += 1;
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }

    pub fn trace(&self) -> u64 {
        (0..self.labels.len()).map(|i| self.counts[i][i]).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FoldEval {
    pub size: usize,
    pub correct: usize,
    pub accuracy: f64,
    pub vocabulary_size: usize,
}

/// Pooled cross-validation results for one (family, mode) task.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalReport {
    /// Micro accuracy pooled over all test predictions.
    pub accuracy: f64,
    pub n_instances: usize,
    pub k: usize,
    pub lambda: f64,
    pub seed: u64,
    pub per_fold: Vec<FoldEval>,
    pub confusion: Confusion,
}

/// Run stratified k-fold cross-validation over preprocessed samples.
///
/// Per fold: vocabulary and model come from the training split only;
/// the report pools test predictions across folds.
pub fn cross_validate(
    samples: &[Sample],
    k: usize,
    lambda: f64,
    seed: u64,
) -> Result<EvalReport, LearnError> {
    let golds: Vec<Option<String>> = samples.iter().map(|s| s.gold.clone()).collect();
    let plan = kfold_plan(samples.len(), k, &golds, seed)?;
    let classes = class_list(&golds);
    let mut confusion = Confusion::new(
        classes
            .iter()
            .map(|c| class_display(c).to_string())
            .collect(),
    );
    let mut per_fold = Vec::with_capacity(k);
    let mut correct_total = 0usize;

    for test_fold in 0..k {
        let train_idx = plan.train_indices(test_fold);
        let vocab = build_vocabulary(train_idx.iter().map(|&i| samples[i].tokens.as_slice()));
        let rows = train_idx
            .iter()
            .map(|&i| {
                let class = classes
                    .iter()
                    .position(|c| *c == samples[i].gold)
                    .expect("gold in class list");
                (vectorize(&samples[i].tokens, &vocab), class)
            })
            .collect();
        let data = EncodedDataset {
            n_features: vocab.len(),
            classes: classes.clone(),
            rows,
        };
        let model = train_logreg(
            &data,
            &TrainOptions {
                lambda,
                seed,
                ..Default::default()
            },
        )?;

        let mut correct = 0usize;
        for &i in &plan.folds[test_fold] {
            let vector = vectorize(&samples[i].tokens, &vocab);
            let predicted = predict(&model, &vector);
            if *predicted == samples[i].gold {
                correct += 1;
            }
            confusion.record(class_display(&samples[i].gold), class_display(predicted));
        }
        let size = plan.folds[test_fold].len();
        per_fold.push(FoldEval {
            size,
            correct,
            accuracy: correct as f64 / size as f64,
            vocabulary_size: vocab.len(),
        });
        correct_total += correct;
    }

    Ok(EvalReport {
        accuracy: correct_total as f64 / samples.len() as f64,
        n_instances: samples.len(),
        k,
        lambda,
        seed,
        per_fold,
        confusion,
    })
}
