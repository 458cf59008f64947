//! N-best decoding: acoustic scores combined with source analysis,
//! transfer and target generation.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::graph::{is_token, Alignment, RelationTree};
use crate::logprob::LogSum;
use crate::monolingual::{
    enumerate_linearizations, log_score_content, log_score_ordering, parse_all, sentence_occurrences,
    MonolingualModel, Realization,
};
use crate::transfer::{log_score_aligned, log_score_translation, translate_all, TransferModel};

/// One recognizer output: a word string and a log score proportional to
/// `P(A_s | W_s)`.
#[derive(Debug, Clone, PartialEq)]
pub struct RecognitionHypothesis {
    pub words: Vec<String>,
    pub acoustic: f64,
}

impl RecognitionHypothesis {
    pub fn new<S: Into<String>>(words: impl IntoIterator<Item = S>, acoustic: f64) -> Result<Self> {
        let words: Vec<String> = words.into_iter().map(Into::into).collect();
        if words.is_empty() {
            return Err(Error::InvalidHypothesis("no words".into()));
        }
        if let Some(bad) = words.iter().find(|w| !is_token(w)) {
            return Err(Error::InvalidWord(bad.clone()));
        }
        if !acoustic.is_finite() {
            return Err(Error::InvalidHypothesis(format!("acoustic score {acoustic} is not finite")));
        }
        Ok(RecognitionHypothesis { words, acoustic })
    }
}

/// Per-factor log scores of a chain.
///
/// After [`rescore_reverse`], `content` holds `ln P(C_t)` and `transfer`
/// holds `ln P(C_s | C_t)`; otherwise they are `ln P(C_s)` and
/// `ln P(C_t | C_s)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Factors {
    pub acoustic: f64,
    pub source_generation: f64,
    pub content: f64,
    pub transfer: f64,
    pub target_generation: f64,
    pub reversed: bool,
}

impl Factors {
    pub fn total(&self) -> f64 {
        self.acoustic + self.source_generation + self.content + self.transfer + self.target_generation
    }
}

/// A full chain `(W_s, C_s, f, C_t, W_t)`. `target_tree` is the canonical
/// representative of its isomorphism class and `alignment` the single
/// alignment contributing most to the transfer factor.
#[derive(Debug, Clone, PartialEq)]
pub struct Hypothesis {
    pub source_words: Vec<String>,
    pub source_tree: RelationTree,
    pub alignment: Alignment,
    pub target_tree: RelationTree,
    pub target_words: Vec<String>,
    pub factors: Factors,
    pub total: f64,
}

impl Hypothesis {
    pub fn target_string(&self) -> String {
        self.target_words.join(" ")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Mode {
    /// Rank target strings by the probability summed over their chains.
    #[default]
    Sum,
    /// Rank target strings by their best single chain.
    Max,
}

/// A ranked target string with its score and best chain.
#[derive(Debug, Clone, PartialEq)]
pub struct RankedTarget {
    pub words: Vec<String>,
    pub log_score: f64,
    pub best: Hypothesis,
}

impl RankedTarget {
    pub fn string(&self) -> String {
        self.words.join(" ")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Decoding {
    pub mode: Mode,
    /// Ranked target strings, at most `k`.
    pub targets: Vec<RankedTarget>,
    /// The `k` best chains by total.
    pub chains: Vec<Hypothesis>,
}

fn chain_order(a: &Hypothesis, b: &Hypothesis) -> std::cmp::Ordering {
    b.total
        .total_cmp(&a.total)
        .then_with(|| a.target_words.cmp(&b.target_words))
        .then_with(|| a.source_words.cmp(&b.source_words))
        .then_with(|| a.source_tree.serialize().cmp(&b.source_tree.serialize()))
        .then_with(|| a.target_tree.serialize().cmp(&b.target_tree.serialize()))
}

/// Every chain with positive probability, best first.
pub fn chains(
    hyps: &[RecognitionHypothesis],
    src: &MonolingualModel,
    tm: &TransferModel,
    tgt: &MonolingualModel,
    bound: usize,
) -> Result<Vec<Hypothesis>> {
    if hyps.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut realizations: BTreeMap<RelationTree, Vec<Realization>> = BTreeMap::new();
    let mut out = Vec::new();
    for hyp in hyps {
        let occs = sentence_occurrences(&hyp.words)?;
        for parse in parse_all(&hyp.words, src, bound)? {
            let c_s = parse.tree;
            let content = log_score_content(&c_s, src);
            let generation = log_score_ordering(&occs, &c_s, src)?;
            let mut classes: BTreeMap<RelationTree, ()> = BTreeMap::new();
            for t in translate_all(&c_s, tm, bound)?.results {
                classes.insert(t.tree.canonical(), ());
            }
            for c_t in classes.into_keys() {
                let transfer = log_score_translation(&c_t, &c_s, tm, bound)?;
                if transfer == f64::NEG_INFINITY {
                    continue;
                }
                let alignment = best_alignment(&c_t, &c_s, tm)?;
                if !realizations.contains_key(&c_t) {
                    let r = enumerate_linearizations(&c_t, tgt, bound)?;
                    realizations.insert(c_t.clone(), r);
                }
                for r in &realizations[&c_t] {
                    if r.probability <= 0.0 {
                        continue;
                    }
                    let factors = Factors {
                        acoustic: hyp.acoustic,
                        source_generation: generation,
                        content,
                        transfer,
                        target_generation: r.probability.ln(),
                        reversed: false,
                    };
                    out.push(Hypothesis {
                        source_words: hyp.words.clone(),
                        source_tree: c_s.clone(),
                        alignment: alignment.clone(),
                        target_tree: c_t.clone(),
                        target_words: r.words.clone(),
                        factors,
                        total: factors.total(),
                    });
                }
            }
        }
    }
    out.sort_by(chain_order);
    Ok(out)
}

fn best_alignment(c_t: &RelationTree, c_s: &RelationTree, tm: &TransferModel) -> Result<Alignment> {
    let mut best: Option<(f64, Alignment)> = None;
    for f in crate::transfer::lexical_alignments(c_t.nodes(), c_s.nodes(), tm) {
        let p = log_score_aligned(c_t, c_s, &f, tm)?;
        if best.as_ref().is_none_or(|(b, _)| p > *b) {
            best = Some((p, f));
        }
    }
    Ok(best.map(|(_, f)| f).unwrap_or_default())
}

/// Ranks target strings over `chains` by summed or best chain score.
pub fn rank_targets(chains: &[Hypothesis], mode: Mode) -> Vec<RankedTarget> {
    let mut groups: BTreeMap<&[String], (LogSum, &Hypothesis)> = BTreeMap::new();
    for h in chains {
        let entry = groups
            .entry(h.target_words.as_slice())
            .or_insert_with(|| (LogSum::new(), h));
        entry.0.add(h.total);
        if chain_order(h, entry.1).is_lt() {
            entry.1 = h;
        }
    }
    let mut out: Vec<RankedTarget> = groups
        .into_iter()
        .filter(|(_, (_, best))| best.total > f64::NEG_INFINITY)
        .map(|(words, (acc, best))| RankedTarget {
            words: words.to_vec(),
            log_score: match mode {
                Mode::Sum => acc.log(),
                Mode::Max => best.total,
            },
            best: best.clone(),
        })
        .collect();
    out.sort_by(|a, b| b.log_score.total_cmp(&a.log_score).then_with(|| a.words.cmp(&b.words)));
    out
}

/// Decodes an n-best list: ranks target strings by `mode` and keeps the `k`
/// best strings and chains.
pub fn decode(
    hyps: &[RecognitionHypothesis],
    src: &MonolingualModel,
    tm: &TransferModel,
    tgt: &MonolingualModel,
    k: usize,
    mode: Mode,
    bound: usize,
) -> Result<Decoding> {
    let mut all = chains(hyps, src, tm, tgt, bound)?;
    let mut targets = rank_targets(&all, mode);
    targets.truncate(k);
    all.truncate(k);
    Ok(Decoding {
        mode,
        targets,
        chains: all,
    })
}

/// Replaces `P(C_s) P(C_t | C_s)` in every chain with `P(C_t) P(C_s | C_t)`
/// and re-ranks. The remaining factors are left untouched.
pub fn rescore_reverse(
    chains: &[Hypothesis],
    tgt: &MonolingualModel,
    reverse: Option<&TransferModel>,
    bound: usize,
) -> Result<Vec<Hypothesis>> {
    let reverse = reverse.ok_or(Error::MissingReverseModel)?;
    let mut out = Vec::with_capacity(chains.len());
    for h in chains {
        let mut factors = h.factors;
        factors.content = log_score_content(&h.target_tree, tgt);
        factors.transfer = log_score_translation(&h.source_tree, &h.target_tree, reverse, bound)?;
        factors.reversed = true;
        out.push(Hypothesis {
            factors,
            total: factors.total(),
            ..h.clone()
        });
    }
    out.sort_by(chain_order);
    Ok(out)
}

/// Target strings for a source tree, scored by
/// `sum over C_t of P(C_t | C_s) P(W_t | C_t)`, best first.
pub fn translate_strings(
    source: &RelationTree,
    tm: &TransferModel,
    tgt: &MonolingualModel,
    k: usize,
    bound: usize,
) -> Result<Vec<(Vec<String>, f64)>> {
    let mut classes: BTreeMap<RelationTree, ()> = BTreeMap::new();
    for t in translate_all(source, tm, bound)?.results {
        classes.insert(t.tree.canonical(), ());
    }
    let mut by_string: BTreeMap<Vec<String>, LogSum> = BTreeMap::new();
    for c_t in classes.into_keys() {
        let transfer = log_score_translation(&c_t, source, tm, bound)?;
        for r in enumerate_linearizations(&c_t, tgt, bound)? {
            if r.probability > 0.0 {
                by_string
                    .entry(r.words)
                    .or_default()
                    .add(transfer + r.probability.ln());
            }
        }
    }
    let mut out: Vec<(Vec<String>, f64)> = by_string.into_iter().map(|(w, acc)| (w, acc.log())).collect();
    out.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    out.truncate(k);
    Ok(out)
}
