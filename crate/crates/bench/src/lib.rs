//! Shared fixtures for the benchmarks.

use hmlcr_core::hmlcr::Problem;
use hmlcr_core::synthetic::{planted_corpus, PlantedConfig, PlantedCorpus};
use hmlcr_core::{CorpusIndex, Hyperparams, IndexOptions, LanguageProfile};

/// A planted corpus with `labels` labels of four documents each.
pub fn corpus(labels: usize, seed: u64) -> PlantedCorpus {
    planted_corpus(&PlantedConfig {
        labels,
        seed,
        ..PlantedConfig::default()
    })
}

/// Index, full training problem and default hyperparameters with `k` capped
/// by the feature dimensions.
pub fn problem(labels: usize, k: usize) -> (CorpusIndex, Problem, Hyperparams) {
    let c = corpus(labels, 0);
    let index = CorpusIndex::build(c.documents, &LanguageProfile::java(), &IndexOptions::default())
        .expect("planted corpus indexes");
    let problem = index.full_problem().expect("planted corpus has labels");
    let hyper = Hyperparams {
        k: k.min(problem.dx()).min(problem.dy()),
        ..Hyperparams::default()
    };
    (index, problem, hyper)
}
