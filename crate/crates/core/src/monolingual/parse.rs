//! Exhaustive projective parsing and the sentence probability `P(W)`.

use std::collections::HashMap;
use std::rc::Rc;

use crate::error::{Error, Result};
use crate::graph::{is_token, validate_tree, Edge, Occurrence, RelationTree, HEAD_MARKER};
use crate::logprob::LogSum;

use super::{log_score_content, log_score_ordering, MonolingualModel};

/// A relation tree for a sentence with its joint score `P(C) P(W|C)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Parse {
    pub tree: RelationTree,
    pub log_prob: f64,
}

impl Parse {
    pub fn probability(&self) -> f64 {
        self.log_prob.exp()
    }
}

/// Tokens of `words` as occurrences numbered 1..n by position.
pub fn sentence_occurrences<S: AsRef<str>>(words: &[S]) -> Result<Vec<Occurrence>> {
    if words.is_empty() {
        return Err(Error::EmptyInput);
    }
    words
        .iter()
        .enumerate()
        .map(|(i, w)| {
            let w = w.as_ref();
            if is_token(w) {
                Ok(Occurrence::new(w, i as u32 + 1))
            } else {
                Err(Error::InvalidWord(w.to_string()))
            }
        })
        .collect()
}

/// Every projective tree over `words` with nonzero score, best first; ties
/// are broken by tree serialization.
pub fn parse_all<S: AsRef<str>>(words: &[S], model: &MonolingualModel, bound: usize) -> Result<Vec<Parse>> {
    let occs = sentence_occurrences(words)?;
    if occs.len() > bound {
        return Err(Error::TooLarge {
            size: occs.len(),
            bound,
        });
    }
    let mut chart = Chart {
        occs: &occs,
        model,
        memo: HashMap::new(),
    };
    let mut out = Vec::new();
    for (root, occ) in occs.iter().enumerate() {
        if model.top(&occ.word) <= 0.0 {
            continue;
        }
        for edges in chart.subtrees(root, 0, occs.len() - 1).iter() {
            let tree = validate_tree(occs.iter().cloned(), edges.iter().cloned())?;
            let log_prob = log_score_content(&tree, model) + log_score_ordering(&occs, &tree, model)?;
            if log_prob > f64::NEG_INFINITY {
                out.push(Parse { tree, log_prob });
            }
        }
    }
    out.sort_by(|a, b| {
        b.log_prob
            .total_cmp(&a.log_prob)
            .then_with(|| a.tree.serialize().cmp(&b.tree.serialize()))
    });
    Ok(out)
}

/// The `k` best parses of `words`.
pub fn parse<S: AsRef<str>>(words: &[S], model: &MonolingualModel, k: usize, bound: usize) -> Result<Vec<Parse>> {
    let mut all = parse_all(words, model, bound)?;
    all.truncate(k);
    Ok(all)
}

/// `ln P(W)`: the log of [`score_sentence`].
pub fn log_score_sentence<S: AsRef<str>>(words: &[S], model: &MonolingualModel, bound: usize) -> Result<f64> {
    Ok(parse_all(words, model, bound)?
        .iter()
        .map(|p| p.log_prob)
        .collect::<LogSum>()
        .log())
}

/// `P(W) = sum over projective trees C of P(C) P(W|C)`.
pub fn score_sentence<S: AsRef<str>>(words: &[S], model: &MonolingualModel, bound: usize) -> Result<f64> {
    Ok(log_score_sentence(words, model, bound)?.exp())
}

type Subtrees = Rc<Vec<Vec<Edge>>>;

struct Chart<'a> {
    occs: &'a [Occurrence],
    model: &'a MonolingualModel,
    memo: HashMap<(usize, usize, usize), Subtrees>,
}

impl Chart<'_> {
    /// Edge sets of every subtree headed by position `head` spanning exactly
    /// `lo..=hi`, keeping only heads whose dependency and sequencing
    /// parameters are positive.
    fn subtrees(&mut self, head: usize, lo: usize, hi: usize) -> Subtrees {
        if let Some(hit) = self.memo.get(&(head, lo, hi)) {
            return hit.clone();
        }
        let left = self.dependent_runs(head, lo, head);
        let right = self.dependent_runs(head, head + 1, hi + 1);
        let mut out = Vec::new();
        for (llabels, ledges) in &left {
            for (rlabels, redges) in &right {
                let mut seq: Vec<&str> = llabels.iter().map(String::as_str).collect();
                seq.push(HEAD_MARKER);
                seq.extend(rlabels.iter().map(String::as_str));
                if self.model.sequencing(&seq) <= 0.0 {
                    continue;
                }
                let mut edges = ledges.clone();
                edges.extend(redges.iter().cloned());
                out.push(edges);
            }
        }
        let out = Rc::new(out);
        self.memo.insert((head, lo, hi), out.clone());
        out
    }

    /// Ways to fill positions `from..to` with a left-to-right run of
    /// dependent subtrees of `head`: the run's labels and all its edges.
    fn dependent_runs(&mut self, head: usize, from: usize, to: usize) -> Vec<(Vec<String>, Vec<Edge>)> {
        if from == to {
            return vec![(Vec::new(), Vec::new())];
        }
        let mut out = Vec::new();
        for end in from..to {
            let rest = self.dependent_runs(head, end + 1, to);
            if rest.is_empty() {
                continue;
            }
            for dep in from..=end {
                let relations: Vec<String> = self
                    .model
                    .relations_between(&self.occs[head].word, &self.occs[dep].word)
                    .map(str::to_string)
                    .collect();
                if relations.is_empty() {
                    continue;
                }
                let below = self.subtrees(dep, from, end);
                for rel in &relations {
                    let edge = Edge::new(rel.clone(), self.occs[head].clone(), self.occs[dep].clone());
                    for sub in below.iter() {
                        for (labels, edges) in &rest {
                            let mut l = vec![rel.clone()];
                            l.extend(labels.iter().cloned());
                            let mut e = vec![edge.clone()];
                            e.extend(sub.iter().cloned());
                            e.extend(edges.iter().cloned());
                            out.push((l, e));
                        }
                    }
                }
            }
        }
        out
    }
}
