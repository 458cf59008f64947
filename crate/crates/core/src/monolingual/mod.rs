//! Head-lexicalized monolingual language model over relation trees.

mod content;
mod model;
mod ordering;
mod parse;

pub use content::{
    combinatoric_k, for_each_content_tree, log_score_content, log_score_expansion, score_content, score_expansion,
};
pub use model::{MonolingualModel, NORMALIZATION_TOLERANCE};
pub(crate) use ordering::permutations;
pub use ordering::{
    enumerate_linearizations, induced_sequences, log_score_ordering, occurrence_orders, score_ordering,
    Linearization, LocalSequence, OccurrenceOrder, Realization, DEFAULT_BOUND,
};
pub use parse::{log_score_sentence, parse, parse_all, score_sentence, sentence_occurrences, Parse};
