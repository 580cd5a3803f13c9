//! `ttmchat` — command line front end for the corpus toolkit.
//!
//! Exit codes: 0 success, 1 validation/lint findings, 2 usage error,
//! 3 data error.

use clap::{Parser, Subcommand, ValueEnum};
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use ttmchat::agreement::{cohens_kappa, sentence_labels, LabelSequencePair};
use ttmchat::corpus::{
    corpus_stats, parse_corpus, parse_sentence, parse_transcript, render_corpus,
    validate_corpus,
};
use ttmchat::experiment::{
    evaluate_pipeline, render_eval, render_report, run_experiment, train_pipeline,
    ExperimentConfig, TrainedPipeline,
};
use ttmchat::features::TokenPipelineConfig;
use ttmchat::generate::{generate_corpus, GeneratorSpec};
use ttmchat::learn::TrainOptions;
use ttmchat::segmentation::{flatten_family, Mode};
use ttmchat::ttm::{builtin_registry, lint_dialogue};
use ttmchat::{CompatibilityMatrix, Corpus, Family, LabelRegistry};

#[derive(Parser)]
#[command(
    name = "ttmchat",
    version,
    about = "Parse, validate, segment, and classify span-annotated weight-management chat dialogues"
)]
struct Cli {
    /// RNG seed; required by generate, train, and experiment.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Alias override file (`canonical-label: alias, ...` per line).
    #[arg(long, global = true, value_name = "FILE")]
    registry_overrides: Option<PathBuf>,
    /// Stage/process compatibility file (`poc: soc, ...` per line).
    #[arg(long, global = true, value_name = "FILE")]
    matrix: Option<PathBuf>,
    /// Stopword list, one token per line.
    #[arg(long, global = true, value_name = "FILE")]
    stopwords: Option<PathBuf>,
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum FamilyArg {
    Soc,
    Poc,
    Other,
}

impl From<FamilyArg> for Family {
    fn from(f: FamilyArg) -> Family {
        match f {
            FamilyArg::Soc => Family::Soc,
            FamilyArg::Poc => Family::Poc,
            FamilyArg::Other => Family::Other,
        }
    }
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum ModeArg {
    Segmented,
    Unsegmented,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::Segmented => Mode::Segmented,
            ModeArg::Unsegmented => Mode::Unsegmented,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Parse a transcript; emit canonical markup (text) or interchange JSON.
    Parse { input: PathBuf },
    /// Report structural issues in a transcript.
    Validate { input: PathBuf },
    /// Corpus statistics over one or more transcripts.
    Stats {
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
    },
    /// Per-family oracle segmentation as `family<TAB>label<TAB>text` lines.
    Segment {
        /// Transcript file; omit when using --sentence.
        input: Option<PathBuf>,
        /// Segment a single markup sentence instead of a file.
        #[arg(long, value_name = "MARKUP")]
        sentence: Option<String>,
        /// Restrict output to one family.
        #[arg(long, value_enum)]
        family: Option<FamilyArg>,
    },
    /// Warn about process suggestions atypical for the seeker's stage.
    Lint { input: PathBuf },
    /// Sentence-level Cohen's kappa between two annotations of one dialogue.
    Kappa { first: PathBuf, second: PathBuf },
    /// Generate a synthetic annotated corpus (requires --seed).
    Generate {
        #[arg(long, default_value_t = 30)]
        dialogues: usize,
        #[arg(long, default_value_t = 0.2)]
        epsilon: f64,
        /// Write to a file instead of stdout.
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
    /// Train one family's classifier on a corpus (requires --seed).
    Train {
        input: PathBuf,
        #[arg(long, value_enum)]
        family: FamilyArg,
        #[arg(long, value_enum)]
        mode: ModeArg,
        #[arg(long, default_value_t = 1e-8)]
        lambda: f64,
        /// Model file to write.
        #[arg(long, value_name = "FILE")]
        out: PathBuf,
    },
    /// Apply a trained model file to a corpus and report accuracy.
    Eval {
        input: PathBuf,
        #[arg(long, value_name = "FILE")]
        model: PathBuf,
    },
    /// Cross-validated segmented/unsegmented comparison (requires --seed).
    Experiment {
        /// Transcript file; omit when using --synthetic.
        input: Option<PathBuf>,
        /// Generate this many synthetic dialogues instead of reading a file.
        #[arg(long, value_name = "N")]
        synthetic: Option<usize>,
        #[arg(long, default_value_t = 10)]
        k: usize,
        #[arg(long, default_value_t = 1e-8)]
        lambda: f64,
        /// Noise rate for --synthetic.
        #[arg(long, default_value_t = 0.2)]
        epsilon: f64,
    },
}

enum Failure {
    Usage(String),
    Data(String),
}

impl Failure {
    fn code(&self) -> ExitCode {
        match self {
            Failure::Usage(_) => ExitCode::from(2),
            Failure::Data(_) => ExitCode::from(3),
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Data(m) => m,
        }
    }
}

fn data_err(e: impl std::fmt::Display) -> Failure {
    Failure::Data(e.to_string())
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Data(format!("{}: {e}", path.display())))
}

fn require_seed(seed: Option<u64>) -> Result<u64, Failure> {
    seed.ok_or_else(|| Failure::Usage("this command requires --seed".into()))
}

fn load_registry(overrides: &Option<PathBuf>) -> Result<LabelRegistry, Failure> {
    let mut registry = builtin_registry();
    if let Some(path) = overrides {
        registry
            .add_alias_overrides(&read(path)?)
            .map_err(data_err)?;
    }
    Ok(registry)
}

fn load_matrix(
    path: &Option<PathBuf>,
    registry: &LabelRegistry,
) -> Result<CompatibilityMatrix, Failure> {
    match path {
        Some(path) => CompatibilityMatrix::load(&read(path)?, registry).map_err(data_err),
        None => Ok(CompatibilityMatrix::default_matrix(registry)),
    }
}

fn load_pipeline(stopwords: &Option<PathBuf>) -> Result<TokenPipelineConfig, Failure> {
    let config = TokenPipelineConfig::default();
    match stopwords {
        Some(path) => config.with_stopwords(&read(path)?).map_err(data_err),
        None => Ok(config),
    }
}

fn read_corpus(path: &Path, registry: &LabelRegistry) -> Result<Corpus, Failure> {
    parse_corpus(&read(path)?, registry)
        .map_err(|e| Failure::Data(format!("{}: {e}", path.display())))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(failure) => {
            eprintln!("ttmchat: {}", failure.message());
            failure.code()
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, Failure> {
    let registry = load_registry(&cli.registry_overrides)?;

    match cli.command {
        Command::Parse { input } => {
            let corpus = read_corpus(&input, &registry)?;
            match cli.format {
                Format::Text => print!("{}", render_corpus(&corpus)),
                Format::Json => println!("{}", corpus.to_json()),
            }
            Ok(ExitCode::SUCCESS)
        }

        Command::Validate { input } => {
            let corpus = read_corpus(&input, &registry)?;
            let issues = validate_corpus(&corpus, &registry);
            match cli.format {
                Format::Text => {
                    for issue in &issues {
                        println!("{issue}");
                    }
                    println!("{} issue(s)", issues.len());
                }
                Format::Json => {
                    println!("{}", serde_json::to_string_pretty(&issues).unwrap())
                }
            }
            Ok(if issues.is_empty() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }

        Command::Stats { inputs } => {
            let mut corpus = Corpus::default();
            for input in &inputs {
                corpus
                    .dialogues
                    .extend(read_corpus(input, &registry)?.dialogues);
            }
            let stats = corpus_stats(&corpus);
            match cli.format {
                Format::Text => {
                    println!("users              {}", stats.num_users);
                    println!("dialogues          {}", stats.num_dialogues);
                    println!("turns              {}", stats.num_turns);
                    println!("word tokens        {}", stats.num_word_tokens);
                    println!(
                        "avg turns/dialogue {} ({:.2})",
                        stats.avg_turns_per_dialogue,
                        stats.avg_turns_per_dialogue.as_f64()
                    );
                }
                Format::Json => println!("{}", serde_json::to_string_pretty(&stats).unwrap()),
            }
            Ok(ExitCode::SUCCESS)
        }

        Command::Segment {
            input,
            sentence,
            family,
        } => {
            let sentences = match (&input, &sentence) {
                (None, Some(markup)) => {
                    vec![parse_sentence(markup, &registry).map_err(data_err)?]
                }
                (Some(path), None) => read_corpus(path, &registry)?
                    .dialogues
                    .iter()
                    .flat_map(|d| &d.turns)
                    .flat_map(|t| &t.sentences)
                    .cloned()
                    .collect(),
                _ => {
                    return Err(Failure::Usage(
                        "segment needs exactly one of a transcript file or --sentence".into(),
                    ))
                }
            };
            let families: Vec<Family> = match family {
                Some(f) => vec![f.into()],
                None => Family::ALL.to_vec(),
            };

            let mut rows = Vec::new();
            for sentence in &sentences {
                for &family in &families {
                    let segments = flatten_family(sentence, family).map_err(data_err)?;
                    rows.extend(segments);
                }
            }
            match cli.format {
                Format::Text => {
                    for seg in &rows {
                        println!(
                            "{}\t{}\t{}",
                            seg.family,
                            seg.label.as_deref().unwrap_or("NULL"),
                            seg.text
                        );
                    }
                }
                Format::Json => {
                    let items: Vec<serde_json::Value> = rows
                        .iter()
                        .map(|seg| {
                            serde_json::json!({
                                "family": seg.family,
                                "label": seg.label,
                                "text": seg.text,
                            })
                        })
                        .collect();
                    println!("{}", serde_json::to_string_pretty(&items).unwrap());
                }
            }
            Ok(ExitCode::SUCCESS)
        }

        Command::Lint { input } => {
            let corpus = read_corpus(&input, &registry)?;
            let matrix = load_matrix(&cli.matrix, &registry)?;
            let mut total = 0usize;
            let mut json_items = Vec::new();
            for dialogue in &corpus.dialogues {
                for warning in lint_dialogue(dialogue, &matrix) {
                    total += 1;
                    match cli.format {
                        Format::Text => println!("{}: {warning}", dialogue.id),
                        Format::Json => json_items.push(serde_json::json!({
                            "dialogue": dialogue.id,
                            "turn": warning.turn,
                            "poc": warning.poc,
                            "soc": warning.soc,
                        })),
                    }
                }
            }
            match cli.format {
                Format::Text => println!("{total} warning(s)"),
                Format::Json => {
                    println!("{}", serde_json::to_string_pretty(&json_items).unwrap())
                }
            }
            Ok(if total == 0 {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }

        Command::Kappa { first, second } => {
            let a = parse_transcript(&read(&first)?, &registry)
                .map_err(|e| Failure::Data(format!("{}: {e}", first.display())))?;
            let b = parse_transcript(&read(&second)?, &registry)
                .map_err(|e| Failure::Data(format!("{}: {e}", second.display())))?;
            let mut rows = Vec::new();
            for family in Family::ALL {
                let pair =
                    LabelSequencePair::new(sentence_labels(&a, family), sentence_labels(&b, family))
                        .map_err(data_err)?;
                let kappa = cohens_kappa(&pair).map_err(data_err)?;
                rows.push((family, kappa));
            }
            match cli.format {
                Format::Text => {
                    for (family, kappa) in &rows {
                        println!("{family}\t{kappa:.4}");
                    }
                }
                Format::Json => {
                    let items: Vec<serde_json::Value> = rows
                        .iter()
                        .map(|(f, k)| serde_json::json!({ "family": f, "kappa": k }))
                        .collect();
                    println!("{}", serde_json::to_string_pretty(&items).unwrap());
                }
            }
            Ok(ExitCode::SUCCESS)
        }

        Command::Generate {
            dialogues,
            epsilon,
            out,
        } => {
            let seed = require_seed(cli.seed)?;
            let spec = GeneratorSpec::new(&registry, epsilon, seed).map_err(data_err)?;
            let corpus = generate_corpus(&spec, dialogues, &registry).map_err(data_err)?;
            let rendered = match cli.format {
                Format::Text => render_corpus(&corpus),
                Format::Json => format!("{}\n", corpus.to_json()),
            };
            match out {
                Some(path) => fs::write(&path, rendered)
                    .map_err(|e| Failure::Data(format!("{}: {e}", path.display())))?,
                None => print!("{rendered}"),
            }
            Ok(ExitCode::SUCCESS)
        }

        Command::Train {
            input,
            family,
            mode,
            lambda,
            out,
        } => {
            let seed = require_seed(cli.seed)?;
            let corpus = read_corpus(&input, &registry)?;
            let pipeline = load_pipeline(&cli.stopwords)?;
            let opts = TrainOptions {
                lambda,
                seed,
                ..Default::default()
            };
            let trained =
                train_pipeline(&corpus, family.into(), mode.into(), &opts, &pipeline)
                    .map_err(data_err)?;
            fs::write(&out, trained.save())
                .map_err(|e| Failure::Data(format!("{}: {e}", out.display())))?;
            match cli.format {
                Format::Text => println!(
                    "trained {} {} classifier: {} classes, {} features, {} iterations, objective {:.6}",
                    trained.family,
                    trained.mode,
                    trained.model.classes.len(),
                    trained.model.n_features,
                    trained.model.meta.iterations,
                    trained.model.meta.final_objective
                ),
                Format::Json => println!(
                    "{}",
                    serde_json::json!({
                        "family": trained.family,
                        "mode": trained.mode.as_str(),
                        "classes": trained.model.classes.len(),
                        "features": trained.model.n_features,
                        "iterations": trained.model.meta.iterations,
                        "objective": trained.model.meta.final_objective,
                        "model": out.display().to_string(),
                    })
                ),
            }
            Ok(ExitCode::SUCCESS)
        }

        Command::Eval { input, model } => {
            let corpus = read_corpus(&input, &registry)?;
            let pipeline = load_pipeline(&cli.stopwords)?;
            let trained = TrainedPipeline::load(&read(&model)?).map_err(data_err)?;
            let report = evaluate_pipeline(&trained, &corpus, &pipeline).map_err(data_err)?;
            match cli.format {
                Format::Text => print!("{}", render_eval(&report)),
                Format::Json => println!("{}", serde_json::to_string_pretty(&report).unwrap()),
            }
            Ok(ExitCode::SUCCESS)
        }

        Command::Experiment {
            input,
            synthetic,
            k,
            lambda,
            epsilon,
        } => {
            let seed = require_seed(cli.seed)?;
            let corpus = match (&input, synthetic) {
                (Some(path), None) => read_corpus(path, &registry)?,
                (None, Some(n)) => {
                    let spec = GeneratorSpec::new(&registry, epsilon, seed).map_err(data_err)?;
                    generate_corpus(&spec, n, &registry).map_err(data_err)?
                }
                _ => {
                    return Err(Failure::Usage(
                        "experiment needs exactly one of a transcript file or --synthetic".into(),
                    ))
                }
            };
            let pipeline = load_pipeline(&cli.stopwords)?;
            let config = ExperimentConfig { k, lambda, seed };
            let report = run_experiment(&corpus, &config, &pipeline).map_err(data_err)?;
            match cli.format {
                Format::Text => print!("{}", render_report(&report)),
                Format::Json => println!("{}", serde_json::to_string_pretty(&report).unwrap()),
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}
