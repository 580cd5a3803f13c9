//! The end-to-end experiment driver: instances -> preprocessing ->
//! per-fold vectorization -> cross-validation, for each family in both
//! segmented and unsegmented modes, next to the unsegmented majority
//! baseline.

use crate::corpus::Corpus;
use crate::features::{preprocess, vectorize, TokenPipelineConfig, Vocabulary};
use crate::learn::{
    class_display, cross_validate, load_model, majority_baseline, predict, save_model,
    train_logreg, Confusion, EncodedDataset, EvalReport, FoldEval, LearnError, LogRegModel,
    Sample, TrainOptions,
};
use crate::segmentation::{extract_instances, Instance, Mode, SegmentationError};
use crate::ttm::Family;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("{family} extraction failed: {source}")]
    Segmentation {
        family: Family,
        #[source]
        source: SegmentationError,
    },
    #[error("{family} {mode} task failed: {source}")]
    Learn {
        family: Family,
        mode: Mode,
        #[source]
        source: LearnError,
    },
    #[error("model file does not describe a usable pipeline: {0}")]
    BadPipeline(String),
    #[error(transparent)]
    Model(#[from] LearnError),
}

/// Cross-validation setup shared by every (family, mode) cell.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub k: usize,
    pub lambda: f64,
    pub seed: u64,
}

impl Default for ExperimentConfig {
    fn default() -> ExperimentConfig {
        ExperimentConfig {
            k: 10,
            lambda: 1e-8,
            seed: 7,
        }
    }
}

/// One row of the final report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FamilyResult {
    pub family: Family,
    pub majority_label: String,
    pub majority_accuracy: f64,
    pub unsegmented: EvalReport,
    pub segmented: EvalReport,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentReport {
    pub config: ExperimentConfig,
    pub rows: Vec<FamilyResult>,
}

fn family_row_name(family: Family) -> &'static str {
    match family {
        Family::Soc => "SOC",
        Family::Poc => "POC",
        Family::Other => "other",
    }
}

/// Turn extracted instances into preprocessed samples.
pub fn to_samples(instances: &[Instance], pipeline: &TokenPipelineConfig) -> Vec<Sample> {
    instances
        .iter()
        .map(|inst| Sample {
            tokens: preprocess(&inst.text, pipeline),
            gold: inst.gold.clone(),
        })
        .collect()
}

/// Run the full protocol over a corpus: for each family, the unsegmented
/// majority baseline plus cross-validated unsegmented and segmented
/// classifiers.
pub fn run_experiment(
    corpus: &Corpus,
    config: &ExperimentConfig,
    pipeline: &TokenPipelineConfig,
) -> Result<ExperimentReport, ExperimentError> {
    let mut rows = Vec::new();
    for family in Family::ALL {
        let wrap_seg = |source| ExperimentError::Segmentation { family, source };

        let unseg_instances =
            extract_instances(corpus, family, Mode::Unsegmented).map_err(wrap_seg)?;
        let seg_instances =
            extract_instances(corpus, family, Mode::Segmented).map_err(wrap_seg)?;

        let unseg_samples = to_samples(&unseg_instances, pipeline);
        let seg_samples = to_samples(&seg_instances, pipeline);

        let golds: Vec<Option<String>> =
            unseg_samples.iter().map(|s| s.gold.clone()).collect();
        let (majority_label, majority_accuracy) =
            majority_baseline(&golds).map_err(|source| ExperimentError::Learn {
                family,
                mode: Mode::Unsegmented,
                source,
            })?;

        let unsegmented = cross_validate(&unseg_samples, config.k, config.lambda, config.seed)
            .map_err(|source| ExperimentError::Learn {
                family,
                mode: Mode::Unsegmented,
                source,
            })?;
        let segmented = cross_validate(&seg_samples, config.k, config.lambda, config.seed)
            .map_err(|source| ExperimentError::Learn {
                family,
                mode: Mode::Segmented,
                source,
            })?;

        rows.push(FamilyResult {
            family,
            majority_label: class_display(&majority_label).to_string(),
            majority_accuracy,
            unsegmented,
            segmented,
        });
    }
    Ok(ExperimentReport {
        config: *config,
        rows,
    })
}

/// Aligned text table in the shape of the published results: one row per
/// family, columns majority / unsegmented / segmented.
pub fn render_report(report: &ExperimentReport) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "{:<8}{:>10}{:>14}{:>12}\n",
        "task", "majority", "unsegmented", "segmented"
    ));
    for row in &report.rows {
        out.push_str(&format!(
            "{:<8}{:>10.3}{:>14.3}{:>12.3}\n",
            family_row_name(row.family),
            row.majority_accuracy,
            row.unsegmented.accuracy,
            row.segmented.accuracy,
        ));
    }
    out.push_str(&format!(
        "k={} lambda={} seed={}\n",
        report.config.k, report.config.lambda, report.config.seed
    ));
    out
}

/// A trained classifier bundled with everything needed to apply it.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainedPipeline {
    pub family: Family,
    pub mode: Mode,
    pub vocab: Vocabulary,
    pub model: LogRegModel,
}

impl TrainedPipeline {
    pub fn save(&self) -> String {
        save_model(
            &self.model,
            self.vocab.tokens(),
            &[
                ("family", self.family.as_str()),
                ("mode", self.mode.as_str()),
            ],
        )
    }

    pub fn load(text: &str) -> Result<TrainedPipeline, ExperimentError> {
        let (model, vocab, meta) = load_model(text)?;
        let get = |key: &str| {
            meta.iter()
                .find(|(k, _)| k == key)
                .map(|(_, v)| v.as_str())
                .ok_or_else(|| ExperimentError::BadPipeline(format!("missing meta `{key}`")))
        };
        let family = Family::parse(get("family")?)
            .ok_or_else(|| ExperimentError::BadPipeline("bad family".into()))?;
        let mode = match get("mode")? {
            "segmented" => Mode::Segmented,
            "unsegmented" => Mode::Unsegmented,
            other => return Err(ExperimentError::BadPipeline(format!("bad mode `{other}`"))),
        };
        Ok(TrainedPipeline {
            family,
            mode,
            vocab: Vocabulary::from_tokens(vocab),
            model,
        })
    }
}

/// Fit one family's classifier on a whole corpus.
pub fn train_pipeline(
    corpus: &Corpus,
    family: Family,
    mode: Mode,
    opts: &TrainOptions,
    pipeline: &TokenPipelineConfig,
) -> Result<TrainedPipeline, ExperimentError> {
    let instances = extract_instances(corpus, family, mode)
        .map_err(|source| ExperimentError::Segmentation { family, source })?;
    let samples = to_samples(&instances, pipeline);
    let golds: Vec<Option<String>> = samples.iter().map(|s| s.gold.clone()).collect();
    let classes = crate::learn::class_list(&golds);
    let vocab = crate::features::build_vocabulary(samples.iter().map(|s| s.tokens.as_slice()));
    let rows = samples
        .iter()
        .map(|s| {
            let class = classes
                .iter()
                .position(|c| *c == s.gold)
                .expect("gold in class list");
            (vectorize(&s.tokens, &vocab), class)
        })
        .collect();
    let data = EncodedDataset {
        n_features: vocab.len(),
        classes,
        rows,
    };
    let model = train_logreg(&data, opts).map_err(|source| ExperimentError::Learn {
        family,
        mode,
        source,
    })?;
    Ok(TrainedPipeline {
        family,
        mode,
        vocab,
        model,
    })
}

/// Apply a trained pipeline to a corpus; the report has a single
/// pseudo-fold covering every instance.
pub fn evaluate_pipeline(
    trained: &TrainedPipeline,
    corpus: &Corpus,
    pipeline: &TokenPipelineConfig,
) -> Result<EvalReport, ExperimentError> {
    let instances = extract_instances(corpus, trained.family, trained.mode).map_err(|source| {
        ExperimentError::Segmentation {
            family: trained.family,
            source,
        }
    })?;
    if instances.is_empty() {
        return Err(ExperimentError::Learn {
            family: trained.family,
            mode: trained.mode,
            source: LearnError::EmptyData,
        });
    }
    let samples = to_samples(&instances, pipeline);

    let mut labels: Vec<String> = trained
        .model
        .classes
        .iter()
        .map(|c| class_display(c).to_string())
        .collect();
    for sample in &samples {
        let name = class_display(&sample.gold);
        if !labels.iter().any(|l| l == name) {
            labels.push(name.to_string());
        }
    }
    let mut confusion = Confusion {
        counts: vec![vec![0; labels.len()]; labels.len()],
        labels,
    };
    let mut correct = 0usize;
    for sample in &samples {
        let vector = vectorize(&sample.tokens, &trained.vocab);
        let predicted = predict(&trained.model, &vector);
        if *predicted == sample.gold {
            correct += 1;
        }
        let g = confusion
            .labels
            .iter()
            .position(|l| l == class_display(&sample.gold))
            .expect("gold label present");
        let p = confusion
            .labels
            .iter()
            .position(|l| l == class_display(predicted))
            .expect("predicted label present");
        confusion.counts[g][p] += 1;
    }

    Ok(EvalReport {
        accuracy: correct as f64 / samples.len() as f64,
        n_instances: samples.len(),
        k: 1,
        lambda: trained.model.lambda,
        seed: trained.model.meta.seed,
        per_fold: vec![FoldEval {
            size: samples.len(),
            correct,
            accuracy: correct as f64 / samples.len() as f64,
            vocabulary_size: trained.vocab.len(),
        }],
        confusion,
    })
}

/// Text rendering for a single evaluation report.
pub fn render_eval(report: &EvalReport) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "accuracy {:.4} over {} instances (k={}, lambda={}, seed={})\n",
        report.accuracy, report.n_instances, report.k, report.lambda, report.seed
    ));
    for (i, fold) in report.per_fold.iter().enumerate() {
        out.push_str(&format!(
            "  fold {:>2}: {:>3}/{:<3} = {:.4}  (vocabulary {})\n",
            i + 1,
            fold.correct,
            fold.size,
            fold.accuracy,
            fold.vocabulary_size
        ));
    }
    out.push_str("confusion (rows gold, columns predicted):\n");
    let width = report
        .confusion
        .labels
        .iter()
        .map(|l| l.len())
        .max()
        .unwrap_or(4)
        .max(4);
    out.push_str(&format!("{:>width$} ", ""));
    for label in &report.confusion.labels {
        out.push_str(&format!("{label:>width$} "));
    }
    out.push('\n');
    for (label, row) in report.confusion.labels.iter().zip(&report.confusion.counts) {
        out.push_str(&format!("{label:>width$} "));
        for count in row {
            out.push_str(&format!("{count:>width$} "));
        }
        out.push('\n');
    }
    out
}
