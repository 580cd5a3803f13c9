//! Run the full experiment on the default synthetic corpus and print the
//! report table.

use ttmchat::experiment::{render_report, run_experiment, ExperimentConfig};
use ttmchat::features::TokenPipelineConfig;
use ttmchat::generate::{generate_corpus, GeneratorSpec};
use ttmchat::ttm::builtin_registry;

fn main() {
    let registry = builtin_registry();
    let spec = GeneratorSpec::new(&registry, 0.2, 7).unwrap();
    let corpus = generate_corpus(&spec, 30, &registry).unwrap();
    let report = run_experiment(
        &corpus,
        &ExperimentConfig::default(),
        &TokenPipelineConfig::default(),
    )
    .unwrap();
    print!("{}", render_report(&report));
}
