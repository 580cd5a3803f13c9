//! Acceptance suite: one test per release criterion, each printing a
//! PASS line with its measurements (visible with `--nocapture`).
//!
//! Oracles here are intentionally independent of the implementation
//! paths they check: kappa is recomputed from the textbook formula,
//! gradients from central finite differences, and the golden files were
//! hand-counted before being frozen.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::process::Command;
use std::time::Instant;
use ttmchat::agreement::{cohens_kappa, LabelSequencePair};
use ttmchat::corpus::{parse_sentence, parse_transcript, serialize_sentence, AnnotatedSentence, SpanNode};
use ttmchat::experiment::{run_experiment, to_samples, ExperimentConfig};
use ttmchat::features::{build_vocabulary, TokenPipelineConfig};
use ttmchat::generate::{generate_corpus, GeneratorSpec};
use ttmchat::learn::{kfold_plan, nll_and_gradient, EncodedDataset};
use ttmchat::segmentation::{extract_instances, Mode};
use ttmchat::ttm::{builtin_registry, lint_dialogue};
use ttmchat::{CompatibilityMatrix, Family};

fn binary() -> Command {
    Command::new(env!("CARGO_BIN_EXE_ttmchat"))
}

const MIXED: &str = ttmchat::fixtures::MIXED_SENTENCE;

#[test]
fn criterion_1_segmentation_golden() {
    let start = Instant::now();
    let output = binary()
        .args(["segment", "--sentence", MIXED])
        .output()
        .expect("segment runs");
    assert!(output.status.success());
    let expected = include_str!("golden/segment_mixed.tsv");
    assert_eq!(
        String::from_utf8_lossy(&output.stdout),
        expected,
        "segment output must match the golden byte-for-byte"
    );
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 1.0, "took {elapsed:?}, budget 1s");
    println!(
        "acceptance criterion 1 PASS: three-family segmentation golden, byte-exact ({elapsed:?})"
    );
}

/// rand-driven valid span forest generator (canonical sentences: words
/// separated by single spaces, spans on word boundaries).
mod forests {
    use super::*;

    pub fn random_sentence(
        rng: &mut ChaCha8Rng,
        labels: &[(String, Family)],
    ) -> AnnotatedSentence {
        let mut text = String::new();
        let mut chars = 0usize;
        let mut roots = Vec::new();
        let n = rng.random_range(1..6);
        for _ in 0..n {
            grow(rng, labels, 0, &mut text, &mut chars, &mut roots);
        }
        AnnotatedSentence {
            plain_text: text,
            roots,
        }
    }

    fn word(rng: &mut ChaCha8Rng) -> String {
        let len = rng.random_range(1..8);
        (0..len)
            .map(|_| (b'a' + rng.random_range(0..26u8)) as char)
            .collect()
    }

    fn grow(
        rng: &mut ChaCha8Rng,
        labels: &[(String, Family)],
        depth: usize,
        text: &mut String,
        chars: &mut usize,
        nodes: &mut Vec<SpanNode>,
    ) {
        if depth >= 4 || rng.random_range(0..10) < 5 {
            let w = word(rng);
            if *chars > 0 {
                text.push(' ');
                *chars += 1;
            }
            text.push_str(&w);
            *chars += w.len();
            return;
        }
        let start = *chars + usize::from(*chars > 0);
        let mut children = Vec::new();
        let fanout = rng.random_range(1..4);
        for _ in 0..fanout {
            grow(rng, labels, depth + 1, text, chars, &mut children);
        }
        let (label, family) = labels[rng.random_range(0..labels.len())].clone();
        nodes.push(SpanNode {
            label,
            family,
            start,
            end: *chars,
            children,
        });
    }
}

#[test]
fn criterion_2_parser_round_trip() {
    let start = Instant::now();
    let registry = builtin_registry();

    // The full shipped dialogue, nested spans included.
    let first = parse_transcript(ttmchat::fixtures::SAMPLE_DIALOGUE, &registry).unwrap();
    assert_eq!(first.turns.len(), 20);
    for turn in &first.turns {
        for sentence in &turn.sentences {
            let reparsed =
                parse_sentence(&serialize_sentence(sentence), &registry).unwrap();
            assert_eq!(&reparsed, sentence, "fixture sentence must round-trip");
        }
    }

    // 1,000 random valid span forests.
    let labels: Vec<(String, Family)> = registry
        .labels()
        .map(|d| (d.name.clone(), d.family))
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(20_240);
    for case in 0..1000 {
        let sentence = forests::random_sentence(&mut rng, &labels);
        let markup = serialize_sentence(&sentence);
        let reparsed = parse_sentence(&markup, &registry)
            .unwrap_or_else(|e| panic!("case {case}: {e} in {markup}"));
        assert_eq!(reparsed, sentence, "case {case}: {markup}");
    }

    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 5.0, "took {elapsed:?}, budget 5s");
    println!(
        "acceptance criterion 2 PASS: fixture + 1000 random forests round-trip ({elapsed:?})"
    );
}

#[test]
fn criterion_3_kappa_correctness() {
    let name = |i: usize| (i > 0).then(|| format!("k{i}"));

    // Identical sequences with at least two distinct labels.
    let seq: Vec<Option<String>> = (0..40).map(|i| name(i % 3)).collect();
    let pair = LabelSequencePair::new(seq.clone(), seq).unwrap();
    assert!((cohens_kappa(&pair).unwrap() - 1.0).abs() <= 1e-12);

    // The textbook zero case, exactly.
    let a = vec![name(1), name(1), name(2), name(2)];
    let b = vec![name(1), name(2), name(1), name(2)];
    assert_eq!(
        cohens_kappa(&LabelSequencePair::new(a, b).unwrap()).unwrap(),
        0.0
    );

    // 500 randomized cases against the direct-formula oracle.
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for _ in 0..500 {
        let n = rng.random_range(1..80);
        let categories = rng.random_range(1..5usize);
        let a: Vec<Option<String>> =
            (0..n).map(|_| name(rng.random_range(0..=categories))).collect();
        let b: Vec<Option<String>> =
            (0..n).map(|_| name(rng.random_range(0..=categories))).collect();

        let nf = n as f64;
        let p_o = a.iter().zip(&b).filter(|(x, y)| x == y).count() as f64 / nf;
        let mut p_e = 0.0;
        for c in 0..=categories {
            let ca = a.iter().filter(|x| **x == name(c)).count() as f64;
            let cb = b.iter().filter(|y| **y == name(c)).count() as f64;
            p_e += (ca / nf) * (cb / nf);
        }

        let kappa = cohens_kappa(&LabelSequencePair::new(a.clone(), b.clone()).unwrap());
        if (1.0 - p_e).abs() < 1e-12 {
            assert_eq!(a, b, "degenerate marginals imply identical sequences");
            assert_eq!(kappa.unwrap(), 1.0);
        } else {
            let oracle = (p_o - p_e) / (1.0 - p_e);
            let got = kappa.unwrap();
            assert!(
                (got - oracle).abs() < 1e-12,
                "kappa {got} vs oracle {oracle}"
            );
        }
    }

    // Independent uniform labelings: mean kappa near zero.
    let mut sum = 0.0;
    let trials = 200;
    for _ in 0..trials {
        let a: Vec<Option<String>> = (0..1000).map(|_| name(rng.random_range(0..4))).collect();
        let b: Vec<Option<String>> = (0..1000).map(|_| name(rng.random_range(0..4))).collect();
        sum += cohens_kappa(&LabelSequencePair::new(a, b).unwrap()).unwrap();
    }
    let mean = sum / trials as f64;
    assert!(mean.abs() < 0.05, "mean kappa over uniform labelings: {mean}");

    println!(
        "acceptance criterion 3 PASS: kappa exact cases, 500 oracle matches, uniform mean {mean:.4}"
    );
}

#[test]
fn criterion_4_gradient_check() {
    let mut rng = ChaCha8Rng::seed_from_u64(4242);
    let mut worst = 0.0f64;

    for _ in 0..50 {
        let n_classes = rng.random_range(2..=5);
        let n_features = rng.random_range(1..=10);
        let n_rows = rng.random_range(1..=20);
        let rows = (0..n_rows)
            .map(|_| {
                let nnz = rng.random_range(0..=n_features.min(5));
                let mut picks: Vec<usize> = (0..n_features).collect();
                for i in 0..nnz {
                    let j = rng.random_range(i..n_features);
                    picks.swap(i, j);
                }
                let mut entries: Vec<(usize, u32)> = picks[..nnz]
                    .iter()
                    .map(|&j| (j, rng.random_range(1..4)))
                    .collect();
                entries.sort_unstable();
                (
                    ttmchat::features::SparseVector(entries),
                    rng.random_range(0..n_classes),
                )
            })
            .collect();
        let data = EncodedDataset {
            n_features,
            classes: (0..n_classes).map(|c| Some(format!("c{c}"))).collect(),
            rows,
        };
        let weights: Vec<f64> = (0..n_classes * n_features)
            .map(|_| rng.random_range(-1.0..1.0))
            .collect();
        let bias: Vec<f64> = (0..n_classes).map(|_| rng.random_range(-1.0..1.0)).collect();
        let lambda = rng.random_range(0.0..0.5);

        let (_, grad_w, grad_b) = nll_and_gradient(&weights, &bias, &data, lambda).unwrap();

        // Central finite differences, the independent oracle.
        let h = 1e-5;
        let value = |w: &[f64], b: &[f64]| nll_and_gradient(w, b, &data, lambda).unwrap().0;
        let mut check = |analytic: &[f64], w: &mut Vec<f64>, b: &mut Vec<f64>, on_w: bool| {
            let len = if on_w { w.len() } else { b.len() };
            for i in 0..len {
                let orig = if on_w { w[i] } else { b[i] };
                if on_w { w[i] = orig + h } else { b[i] = orig + h };
                let plus = value(w, b);
                if on_w { w[i] = orig - h } else { b[i] = orig - h };
                let minus = value(w, b);
                if on_w { w[i] = orig } else { b[i] = orig };
                let numeric = (plus - minus) / (2.0 * h);
                let rel = (analytic[i] - numeric).abs()
                    / analytic[i].abs().max(numeric.abs()).max(1.0);
                worst = worst.max(rel);
            }
        };
        let mut w = weights.clone();
        let mut b = bias.clone();
        check(&grad_w, &mut w, &mut b, true);
        check(&grad_b, &mut w, &mut b, false);
    }

    assert!(worst < 1e-4, "max relative error {worst}");
    println!(
        "acceptance criterion 4 PASS: 50 random problems, max gradient relative error {worst:.2e}"
    );
}

#[test]
fn criterion_5_segmented_beats_unsegmented_beats_majority() {
    let start = Instant::now();
    let registry = builtin_registry();
    let spec = GeneratorSpec::new(&registry, 0.2, 7).unwrap();
    let corpus = generate_corpus(&spec, 30, &registry).unwrap();
    let sentences: usize = corpus
        .dialogues
        .iter()
        .flat_map(|d| &d.turns)
        .map(|t| t.sentences.len())
        .sum();
    assert_eq!(sentences, 300, "shipped synthetic corpus is 300 sentences");

    let report = run_experiment(
        &corpus,
        &ExperimentConfig {
            k: 10,
            lambda: 1e-8,
            seed: 7,
        },
        &TokenPipelineConfig::default(),
    )
    .unwrap();

    let mut summary = String::new();
    for row in &report.rows {
        assert!(
            row.segmented.accuracy > row.unsegmented.accuracy,
            "{}: segmented {} must beat unsegmented {}",
            row.family,
            row.segmented.accuracy,
            row.unsegmented.accuracy
        );
        assert!(
            row.unsegmented.accuracy > row.majority_accuracy,
            "{}: unsegmented {} must beat majority {}",
            row.family,
            row.unsegmented.accuracy,
            row.majority_accuracy
        );
        summary.push_str(&format!(
            " {}: {:.3} < {:.3} < {:.3}",
            row.family, row.majority_accuracy, row.unsegmented.accuracy, row.segmented.accuracy
        ));
    }

    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 60.0, "took {elapsed:?}, budget 60s");
    println!(
        "acceptance criterion 5 PASS: majority < unsegmented < segmented for all families ({elapsed:?}):{summary}"
    );
}

#[test]
fn criterion_6_cross_validation_hygiene() {
    let registry = builtin_registry();
    let spec = GeneratorSpec::new(&registry, 0.2, 7).unwrap();
    let corpus = generate_corpus(&spec, 10, &registry).unwrap();
    let pipeline = TokenPipelineConfig::default();
    let instances = extract_instances(&corpus, Family::Other, Mode::Segmented).unwrap();
    let samples = to_samples(&instances, &pipeline);
    let golds: Vec<Option<String>> = samples.iter().map(|s| s.gold.clone()).collect();
    let n = samples.len();
    let k = 10;

    let plan = kfold_plan(n, k, &golds, 7).unwrap();

    // Exact partition.
    let mut seen = vec![false; n];
    for fold in &plan.folds {
        for &i in fold {
            assert!(!seen[i], "index {i} assigned twice");
            seen[i] = true;
        }
    }
    assert!(seen.iter().all(|&s| s), "every index assigned");

    // Overall balance.
    let sizes: Vec<usize> = plan.folds.iter().map(Vec::len).collect();
    assert!(sizes.iter().max().unwrap() - sizes.iter().min().unwrap() <= 1);

    // Per-label stratification.
    let mut labels: Vec<&Option<String>> = golds.iter().collect();
    labels.sort();
    labels.dedup();
    for label in labels {
        let per_fold: Vec<usize> = plan
            .folds
            .iter()
            .map(|fold| fold.iter().filter(|&&i| golds[i] == *label).count())
            .collect();
        assert!(
            per_fold.iter().max().unwrap() - per_fold.iter().min().unwrap() <= 1,
            "label {label:?} not stratified: {per_fold:?}"
        );
    }

    // No leakage: the fold vocabulary is built from training tokens only,
    // so tokens appearing only in the test fold must not be in it.
    for test_fold in 0..k {
        let train_idx = plan.train_indices(test_fold);
        let vocab = build_vocabulary(train_idx.iter().map(|&i| samples[i].tokens.as_slice()));
        let train_tokens: std::collections::HashSet<&str> = train_idx
            .iter()
            .flat_map(|&i| samples[i].tokens.iter().map(String::as_str))
            .collect();
        for token in vocab.tokens() {
            assert!(
                train_tokens.contains(token.as_str()),
                "vocabulary token {token} not from the training split"
            );
        }
        for &i in &plan.folds[test_fold] {
            for token in &samples[i].tokens {
                if !train_tokens.contains(token.as_str()) {
                    assert!(
                        !vocab.contains(token),
                        "test-only token {token} leaked into the vocabulary"
                    );
                }
            }
        }
    }

    println!(
        "acceptance criterion 6 PASS: exact stratified partition over {n} instances, no vocabulary leakage"
    );
}

#[test]
fn criterion_7_ttm_lint_anchored_cells() {
    let registry = builtin_registry();
    let matrix = CompatibilityMatrix::default_matrix(&registry);

    let action = parse_transcript(
        "seeker\t[Action : just started my weight loss journey]\n\
         helper\t[CR : strength training is supposed to be great for getting in shape]\n",
        &registry,
    )
    .unwrap();
    let warnings = lint_dialogue(&action, &matrix);
    assert_eq!(warnings.len(), 1, "Action + consciousness-raising warns once");
    assert_eq!(warnings[0].poc, "consciousness-raising");
    assert_eq!(warnings[0].soc, "Action");

    let contemplation = parse_transcript(
        "seeker\t[Contemplation : i keep thinking about dropping some pounds]\n\
         helper\t[CR : strength training is supposed to be great for getting in shape]\n",
        &registry,
    )
    .unwrap();
    assert!(
        lint_dialogue(&contemplation, &matrix).is_empty(),
        "Contemplation + consciousness-raising is compatible"
    );

    println!("acceptance criterion 7 PASS: lint warns exactly on the incompatible stage");
}

#[test]
fn criterion_8_stats_golden_and_additivity() {
    // Golden: hand-counted turns (20) and word tokens (198).
    let fixture = concat!(env!("CARGO_MANIFEST_DIR"), "/../core/data/sample_dialogue.txt");
    let output = binary().args(["stats", fixture]).output().expect("stats runs");
    assert!(output.status.success());
    assert_eq!(
        String::from_utf8_lossy(&output.stdout),
        include_str!("golden/stats_sample.txt")
    );

    // Additivity: stats over two files equals the field-wise sums.
    let dir = tempfile::tempdir().unwrap();
    let second = dir.path().join("second.txt");
    let status = binary()
        .args([
            "generate",
            "--seed",
            "5",
            "--dialogues",
            "3",
            "--out",
            second.to_str().unwrap(),
        ])
        .status()
        .unwrap();
    assert!(status.success());

    let stats_json = |paths: &[&str]| -> serde_json::Value {
        let output = binary()
            .args(["--format", "json", "stats"])
            .args(paths)
            .output()
            .unwrap();
        assert!(output.status.success());
        serde_json::from_slice(&output.stdout).unwrap()
    };
    let a = stats_json(&[fixture]);
    let b = stats_json(&[second.to_str().unwrap()]);
    let both = stats_json(&[fixture, second.to_str().unwrap()]);
    for field in ["num_users", "num_dialogues", "num_turns", "num_word_tokens"] {
        assert_eq!(
            both[field].as_u64().unwrap(),
            a[field].as_u64().unwrap() + b[field].as_u64().unwrap(),
            "{field} must add"
        );
    }
    let turns = both["num_turns"].as_u64().unwrap();
    let dialogues = both["num_dialogues"].as_u64().unwrap();
    let avg = &both["avg_turns_per_dialogue"];
    assert_eq!(
        avg["numer"].as_u64().unwrap() * dialogues,
        turns * avg["denom"].as_u64().unwrap(),
        "avg * dialogues == turns exactly"
    );

    println!("acceptance criterion 8 PASS: stats golden matches and fields add over concatenation");
}
