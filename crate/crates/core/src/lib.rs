//! Statistical dependency translation over relation trees: monolingual
//! language models, graph transfer, n-best decoding, supervised estimation
//! and brute-force reference implementations.

pub mod decoder;
pub mod error;
pub mod estimation;
pub mod graph;
pub mod logprob;
pub mod monolingual;
pub mod oracle;
pub mod synth;
pub mod transfer;

pub use error::{Error, Result};
pub use graph::{
    isomorphisms, sequence_multiset, validate_tree, Alignment, Edge, LabelMultiset, Multiset, Occurrence,
    RelationTree, ShapeEdge, UnlabeledGraph, HEAD_MARKER,
};
pub use monolingual::MonolingualModel;
pub use transfer::{StructuralRule, TransferModel};
pub use decoder::{Hypothesis, Mode, RecognitionHypothesis};
