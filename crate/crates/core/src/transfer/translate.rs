//! Generating target trees from a source tree.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::graph::{validate_tree, Alignment, Edge, Multiset, Occurrence, RelationTree};
use crate::logprob::{ln, LogSum};

use super::derive::{applicable_steps, partition_source, Step};
use super::TransferModel;

/// A target tree, the alignment that produced it, and `P(C_t, f | C_s)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Translation {
    pub tree: RelationTree,
    pub alignment: Alignment,
    pub log_prob: f64,
}

impl Translation {
    pub fn probability(&self) -> f64 {
        self.log_prob.exp()
    }
}

/// All translations of a source tree plus the number of derivations whose
/// target edges did not form a tree.
#[derive(Debug, Clone, PartialEq)]
pub struct Translations {
    pub results: Vec<Translation>,
    pub discarded: usize,
}

/// Every `(C_t, f)` derivable from `source` with positive probability,
/// best first. Target occurrences are numbered by source index, then by
/// word.
pub fn translate_all(source: &RelationTree, tm: &TransferModel, bound: usize) -> Result<Translations> {
    if source.len() > bound {
        return Err(Error::TooLarge {
            size: source.len(),
            bound,
        });
    }
    let sources: Vec<&Occurrence> = source.nodes().iter().collect();
    let options: Vec<Vec<(&Multiset, f64)>> = sources.iter().map(|s| tm.lexical_options(&s.word).collect()).collect();
    let partitions = partition_source(source);

    let mut grouped: BTreeMap<(RelationTree, Alignment), LogSum> = BTreeMap::new();
    let mut discarded = 0;
    let mut choice = Vec::with_capacity(sources.len());
    for_each_choice(&options, &mut choice, &mut |picked: &[(&Multiset, f64)]| {
        let (targets, f) = instantiate(&sources, picked);
        let lex: f64 = picked.iter().map(|(_, p)| ln(*p)).sum();
        let steps: Vec<Vec<Step>> = partitions
            .iter()
            .map(|local| {
                applicable_steps(local, &f, &targets, tm)
                    .into_iter()
                    .filter(|s| s.probability > 0.0)
                    .collect()
            })
            .collect();
        let mut used = BTreeSet::new();
        combine(&steps, 0, &mut used, lex, &mut |edges: &BTreeSet<&Edge>, logp: f64| {
            match validate_tree(targets.iter().cloned(), edges.iter().map(|&e| e.clone())) {
                Ok(tree) => grouped.entry((tree, f.clone())).or_default().add(logp),
                Err(_) => discarded += 1,
            }
        });
    });

    let mut results: Vec<Translation> = grouped
        .into_iter()
        .map(|((tree, alignment), acc)| Translation {
            tree,
            alignment,
            log_prob: acc.log(),
        })
        .collect();
    results.sort_by(|a, b| {
        b.log_prob
            .total_cmp(&a.log_prob)
            .then_with(|| a.tree.serialize().cmp(&b.tree.serialize()))
            .then_with(|| a.alignment.to_string().cmp(&b.alignment.to_string()))
    });
    Ok(Translations { results, discarded })
}

/// The `k` best translations of `source`.
pub fn translate(source: &RelationTree, tm: &TransferModel, k: usize, bound: usize) -> Result<Vec<Translation>> {
    let mut all = translate_all(source, tm, bound)?.results;
    all.truncate(k);
    Ok(all)
}

fn for_each_choice<'a, F>(options: &[Vec<(&'a Multiset, f64)>], picked: &mut Vec<(&'a Multiset, f64)>, visit: &mut F)
where
    F: FnMut(&[(&'a Multiset, f64)]),
{
    let i = picked.len();
    if i == options.len() {
        visit(picked);
        return;
    }
    for &opt in &options[i] {
        picked.push(opt);
        for_each_choice(options, picked, visit);
        picked.pop();
    }
}

/// Fresh target occurrences for the chosen multisets, numbered in source
/// order and then by word, with the alignment back to their sources.
fn instantiate(sources: &[&Occurrence], picked: &[(&Multiset, f64)]) -> (BTreeSet<Occurrence>, Alignment) {
    let mut next = 1;
    let mut targets = BTreeSet::new();
    let mut map = BTreeMap::new();
    for (s, (m, _)) in sources.iter().zip(picked) {
        for w in m.items() {
            let t = Occurrence::new(w, next);
            next += 1;
            targets.insert(t.clone());
            map.insert(t, (*s).clone());
        }
    }
    (targets, Alignment::new(map))
}

fn combine<'a, F>(steps: &'a [Vec<Step>], i: usize, used: &mut BTreeSet<&'a Edge>, logp: f64, emit: &mut F)
where
    F: FnMut(&BTreeSet<&'a Edge>, f64),
{
    if i == steps.len() {
        emit(used, logp);
        return;
    }
    for step in &steps[i] {
        if step.edges.iter().any(|e| used.contains(e)) {
            continue;
        }
        used.extend(step.edges.iter());
        combine(steps, i + 1, used, logp + step.probability.ln(), emit);
        for e in &step.edges {
            used.remove(e);
        }
    }
}
