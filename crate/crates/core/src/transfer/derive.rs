//! Scoring target trees against a source tree: alignments, the lexical
//! component and structural derivations.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::graph::{isomorphisms, Alignment, Edge, Multiset, Occurrence, RelationTree};
use crate::logprob::{ln, LogSum};

use super::TransferModel;

/// The source partition: the out-edges of every internal node, by head
/// index.
pub fn partition_source(source: &RelationTree) -> Vec<Vec<Edge>> {
    source
        .internal_nodes()
        .map(|h| source.dependents(h).to_vec())
        .collect()
}

/// Words of the target occurrences aligned to each source occurrence.
fn preimage_words<'a>(f: &Alignment, sources: impl IntoIterator<Item = &'a Occurrence>) -> Vec<(&'a Occurrence, Multiset)> {
    let inv = f.inverse();
    sources
        .into_iter()
        .map(|s| {
            let words = inv
                .get(s)
                .into_iter()
                .flatten()
                .map(|t| t.word.clone())
                .collect();
            (s, words)
        })
        .collect()
}

/// `ln P(N_t, f | N_s)`.
pub fn log_lexical_score<'a>(
    f: &Alignment,
    sources: impl IntoIterator<Item = &'a Occurrence>,
    tm: &TransferModel,
) -> f64 {
    preimage_words(f, sources)
        .iter()
        .map(|(s, m)| ln(tm.lexical(&s.word, m)))
        .sum()
}

/// `P(N_t, f | N_s) = prod over source nodes w of P(words of f^-1(w) | w)`.
pub fn lexical_score<'a>(f: &Alignment, sources: impl IntoIterator<Item = &'a Occurrence>, tm: &TransferModel) -> f64 {
    log_lexical_score(f, sources, tm).exp()
}

/// One way a rule can account for a source local tree: the rule, the
/// source images of its source nodes, and the target edges it produces.
#[derive(Debug, Clone, PartialEq)]
pub struct Step {
    pub rule: usize,
    /// `h_i`: the image of each rule source node, parallel to its nodes.
    pub source_image: Vec<Occurrence>,
    /// `g_i^-1`: the target occurrence of each rule target node.
    pub target_image: Vec<Occurrence>,
    pub edges: BTreeSet<Edge>,
    pub probability: f64,
}

/// Every rule application for the local edge set `local` that is
/// compatible with `f` over `targets`. Applications producing the same
/// target edges with the same rule are reported once.
pub fn applicable_steps(
    local: &[Edge],
    f: &Alignment,
    targets: &BTreeSet<Occurrence>,
    tm: &TransferModel,
) -> Vec<Step> {
    let mut key: Vec<String> = local.iter().map(|e| e.relation.clone()).collect();
    key.sort();
    let mut out: Vec<Step> = Vec::new();
    let mut seen: BTreeSet<(usize, BTreeSet<Edge>)> = BTreeSet::new();
    for &ri in tm.rules_for(&key) {
        let rule = &tm.rules()[ri];
        for h in isomorphisms(rule.source(), local) {
            let tshape = rule.target();
            let candidates: Vec<Vec<&Occurrence>> = (0..tshape.node_count())
                .map(|v| {
                    let want = &h[rule.alignment()[v]];
                    targets.iter().filter(|t| f.get(t) == Some(want)).collect()
                })
                .collect();
            let mut image: Vec<&Occurrence> = Vec::new();
            let mut maps: Vec<Vec<Occurrence>> = Vec::new();
            injective_maps(&candidates, &mut image, &mut maps);
            for phi in maps {
                let edges: BTreeSet<Edge> = tshape
                    .edges()
                    .iter()
                    .map(|e| Edge::new(e.relation.clone(), phi[e.head].clone(), phi[e.dependent].clone()))
                    .collect();
                if seen.insert((ri, edges.clone())) {
                    out.push(Step {
                        rule: ri,
                        source_image: h.clone(),
                        target_image: phi,
                        edges,
                        probability: rule.probability,
                    });
                }
            }
        }
    }
    out
}

fn injective_maps<'a>(candidates: &[Vec<&'a Occurrence>], image: &mut Vec<&'a Occurrence>, out: &mut Vec<Vec<Occurrence>>) {
    let v = image.len();
    if v == candidates.len() {
        out.push(image.iter().map(|&o| o.clone()).collect());
        return;
    }
    for &t in &candidates[v] {
        if !image.contains(&t) {
            image.push(t);
            injective_maps(candidates, image, out);
            image.pop();
        }
    }
}

/// `ln P(E_t | N_t, f, C_s)`: the summed probability of every way to pick
/// one step per source local tree so that the produced edge sets are
/// disjoint and together equal `target_edges`.
pub fn log_structural_score(
    target_edges: &BTreeSet<Edge>,
    targets: &BTreeSet<Occurrence>,
    source: &RelationTree,
    f: &Alignment,
    tm: &TransferModel,
) -> f64 {
    let mut per_partition = Vec::new();
    for local in partition_source(source) {
        let steps: Vec<Step> = applicable_steps(&local, f, targets, tm)
            .into_iter()
            .filter(|s| s.probability > 0.0 && s.edges.is_subset(target_edges))
            .collect();
        if steps.is_empty() {
            return f64::NEG_INFINITY;
        }
        per_partition.push(steps);
    }
    let mut acc = LogSum::new();
    let mut used = BTreeSet::new();
    covers(&per_partition, 0, target_edges, &mut used, 0.0, &mut acc);
    acc.log()
}

fn covers<'a>(
    parts: &'a [Vec<Step>],
    i: usize,
    target_edges: &BTreeSet<Edge>,
    used: &mut BTreeSet<&'a Edge>,
    logp: f64,
    acc: &mut LogSum,
) {
    if i == parts.len() {
        if used.len() == target_edges.len() {
            acc.add(logp);
        }
        return;
    }
    for step in &parts[i] {
        if step.edges.iter().any(|e| used.contains(e)) {
            continue;
        }
        used.extend(step.edges.iter());
        covers(parts, i + 1, target_edges, used, logp + step.probability.ln(), acc);
        for e in &step.edges {
            used.remove(e);
        }
    }
}

/// `ln P(C_t, f | C_s)` for a fixed alignment.
pub fn log_score_aligned(target: &RelationTree, source: &RelationTree, f: &Alignment, tm: &TransferModel) -> Result<f64> {
    f.check(target.nodes(), source.nodes())?;
    let lex = log_lexical_score(f, source.nodes(), tm);
    if lex == f64::NEG_INFINITY {
        return Ok(lex);
    }
    Ok(lex + log_structural_score(target.edges(), target.nodes(), source, f, tm))
}

/// Every alignment of `targets` onto `sources` whose lexical score is
/// positive, in lexicographic order.
pub fn lexical_alignments(
    targets: &BTreeSet<Occurrence>,
    sources: &BTreeSet<Occurrence>,
    tm: &TransferModel,
) -> Vec<Alignment> {
    let targets: Vec<&Occurrence> = targets.iter().collect();
    let sources: Vec<&Occurrence> = sources.iter().collect();
    let options: Vec<Vec<&Multiset>> = sources
        .iter()
        .map(|s| tm.lexical_options(&s.word).map(|(m, _)| m).collect())
        .collect();
    let mut partial: Vec<BTreeMap<&str, usize>> = vec![BTreeMap::new(); sources.len()];
    let mut assignment: Vec<usize> = Vec::new();
    let mut out = Vec::new();
    search_alignments(&targets, &sources, &options, &mut partial, &mut assignment, &mut out);
    out
}

fn fits(partial: &BTreeMap<&str, usize>, m: &Multiset) -> bool {
    partial.iter().all(|(w, &c)| m.count(w) >= c)
}

fn search_alignments<'a>(
    targets: &[&'a Occurrence],
    sources: &[&Occurrence],
    options: &[Vec<&Multiset>],
    partial: &mut Vec<BTreeMap<&'a str, usize>>,
    assignment: &mut Vec<usize>,
    out: &mut Vec<Alignment>,
) {
    let t = assignment.len();
    if t == targets.len() {
        let complete = partial.iter().zip(options).all(|(p, opts)| {
            opts.iter()
                .any(|m| fits(p, m) && m.len() == p.values().sum::<usize>())
        });
        if complete {
            out.push(
                assignment
                    .iter()
                    .enumerate()
                    .map(|(t, &s)| (targets[t].clone(), sources[s].clone()))
                    .collect(),
            );
        }
        return;
    }
    let word = targets[t].word.as_str();
    for s in 0..sources.len() {
        *partial[s].entry(word).or_insert(0) += 1;
        if options[s].iter().any(|m| fits(&partial[s], m)) {
            assignment.push(s);
            search_alignments(targets, sources, options, partial, assignment, out);
            assignment.pop();
        }
        let c = partial[s].get_mut(word).expect("just inserted");
        *c -= 1;
        if *c == 0 {
            partial[s].remove(word);
        }
    }
}

/// `ln P(C_t | C_s)`.
pub fn log_score_translation(
    target: &RelationTree,
    source: &RelationTree,
    tm: &TransferModel,
    bound: usize,
) -> Result<f64> {
    for tree in [target, source] {
        if tree.len() > bound {
            return Err(Error::TooLarge {
                size: tree.len(),
                bound,
            });
        }
    }
    let mut acc = LogSum::new();
    for f in lexical_alignments(target.nodes(), source.nodes(), tm) {
        acc.add(log_score_aligned(target, source, &f, tm)?);
    }
    Ok(acc.log())
}

/// `P(C_t | C_s) = sum over f of P(N_t, f | N_s) P(E_t | N_t, f, C_s)`.
pub fn score_translation(target: &RelationTree, source: &RelationTree, tm: &TransferModel, bound: usize) -> Result<f64> {
    Ok(log_score_translation(target, source, tm, bound)?.exp())
}
