use thiserror::Error;

use crate::graph::Occurrence;

fn join(occs: &[Occurrence]) -> String {
    occs.iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join(", ")
}

/// Errors produced by the core algorithms.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid word token {0:?}: tokens must be non-empty and contain no whitespace")]
    InvalidWord(String),
    #[error("invalid relation label {0:?}")]
    InvalidLabel(String),
    #[error("relation label \"e\" is reserved for the head marker (edge {0})")]
    ReservedLabel(String),
    #[error("occurrence index {0} is used more than once")]
    DuplicateIndex(u32),
    #[error("edge {0} mentions an occurrence outside the node set")]
    UnknownNode(String),
    #[error("a relation tree needs at least one node")]
    EmptyTree,
    #[error("multiple roots: {}", join(.0))]
    MultipleRoots(Vec<Occurrence>),
    #[error("cycle through {}", join(.0))]
    Cycle(Vec<Occurrence>),
    #[error("node {0} is not connected to the rest of the tree")]
    DisconnectedNode(Occurrence),
    #[error("node {0} has more than one head")]
    MultipleHeads(Occurrence),
    #[error("node {0} is not in the tree")]
    NodeNotInTree(Occurrence),
    #[error("label sequence has no head marker \"e\"")]
    MissingHeadMarker,
    #[error("label sequence has more than one head marker \"e\"")]
    DuplicateHeadMarker,
    #[error("word order is non-projective: the phrase headed by {0} is not contiguous")]
    NonProjective(Occurrence),
    #[error("word string does not match the tree's nodes: {0}")]
    NodeMismatch(String),
    #[error("input of size {size} exceeds the enumeration bound {bound}")]
    TooLarge { size: usize, bound: usize },
    #[error("invalid probability {value} for {what}")]
    InvalidProbability { what: String, value: f64 },
    #[error("table is not normalized: {0}")]
    Unnormalized(String),
    #[error("invalid alignment: {0}")]
    InvalidAlignment(String),
    #[error("invalid structural rule: {0}")]
    InvalidRule(String),
    #[error("invalid recognition hypothesis: {0}")]
    InvalidHypothesis(String),
    #[error("no recognition hypotheses to decode")]
    EmptyInput,
    #[error("training corpus is empty")]
    EmptyCorpus,
    #[error("record {record}: phrase headed by {head} is not contiguous")]
    NonProjectiveRecord { record: usize, head: Occurrence },
    #[error("record {record}: {reason}")]
    InvalidRecord { record: usize, reason: String },
    #[error("record {record}: target edge {edge} cannot be assigned to a source local tree")]
    UndecomposableRecord { record: usize, edge: String },
    #[error("reverse rescoring requires a reverse transfer model")]
    MissingReverseModel,
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
