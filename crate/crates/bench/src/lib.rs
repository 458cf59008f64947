//! Fixtures shared by the benchmarks.

use reltrans_cli::data::toy_models;
use reltrans_cli::formats::parse_nbest;
use reltrans_core::synth::{random_monolingual, random_transfer_instance, LmShape, TransferInstance};
use reltrans_core::{MonolingualModel, RecognitionHypothesis};

pub use reltrans_cli::data::ToyModels;

pub fn toy() -> ToyModels {
    toy_models()
}

pub fn toy_nbest() -> Vec<RecognitionHypothesis> {
    parse_nbest(reltrans_cli::data::TOY_NBEST, "toy.nbest").expect("bundled n-best list parses")
}

/// A random model over five words and three relations.
pub fn random_lm(seed: u64) -> MonolingualModel {
    random_monolingual(&LmShape::new(&["a", "b", "c", "d", "e"], &["r", "s", "t"], 2), seed)
}

pub fn sentence(len: usize) -> Vec<String> {
    ["a", "b", "c", "d", "e"].iter().cycle().take(len).map(|s| s.to_string()).collect()
}

pub fn transfer_instances(count: u64) -> Vec<TransferInstance> {
    (0..count).map(random_transfer_instance).collect()
}
