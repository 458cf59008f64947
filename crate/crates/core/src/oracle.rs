//! Brute-force reference implementations.
//!
//! Everything here enumerates literally (head functions, label assignments,
//! permutations, total functions) and reads model parameters through the
//! table lookups only; no scoring routine from the main modules is called.

use std::collections::{BTreeMap, BTreeSet};

use crate::decoder::RecognitionHypothesis;
use crate::error::{Error, Result};
use crate::graph::{validate_tree, Edge, Multiset, Occurrence, RelationTree};
use crate::monolingual::MonolingualModel;
use crate::transfer::TransferModel;

/// Size cap for sentences and trees handled by the oracles.
pub const ORACLE_BOUND: usize = 5;
/// Cap on the number of chains [`oracle_decode`] will evaluate.
pub const ORACLE_CHAIN_BOUND: usize = 1_000_000;

fn too_large(size: usize, bound: usize) -> Result<()> {
    if size > bound {
        Err(Error::TooLarge { size, bound })
    } else {
        Ok(())
    }
}

/// All sequences of length `len` over `0..base`.
fn tuples(base: usize, len: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..len {
        let mut next = Vec::new();
        for t in &out {
            for x in 0..base {
                let mut t = t.clone();
                t.push(x);
                next.push(t);
            }
        }
        out = next;
    }
    out
}

fn all_permutations<T: Clone>(items: &[T]) -> Vec<Vec<T>> {
    if items.is_empty() {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for i in 0..items.len() {
        let mut rest = items.to_vec();
        let first = rest.remove(i);
        for mut p in all_permutations(&rest) {
            p.insert(0, first.clone());
            out.push(p);
        }
    }
    out
}

/// Every rooted tree over `nodes` with every labeling from `labels`.
fn all_trees(nodes: &[Occurrence], labels: &[String]) -> Vec<RelationTree> {
    let n = nodes.len();
    let mut out = Vec::new();
    if labels.is_empty() {
        if n == 1 {
            out.push(RelationTree::single(nodes[0].clone()));
        }
        return out;
    }
    // heads[i] == n marks the root
    for heads in tuples(n + 1, n) {
        if heads.iter().filter(|&&h| h == n).count() != 1 || heads.iter().enumerate().any(|(i, &h)| h == i) {
            continue;
        }
        let reaches_root = (0..n).all(|start| {
            let mut cur = start;
            for _ in 0..=n {
                if heads[cur] == n {
                    return true;
                }
                cur = heads[cur];
            }
            false
        });
        if !reaches_root {
            continue;
        }
        let deps: Vec<usize> = (0..n).filter(|&i| heads[i] != n).collect();
        for labeling in tuples(labels.len(), deps.len()) {
            let edges = deps
                .iter()
                .zip(&labeling)
                .map(|(&d, &l)| Edge::new(labels[l].clone(), nodes[heads[d]].clone(), nodes[d].clone()));
            out.push(validate_tree(nodes.iter().cloned(), edges).expect("head function forms a tree"));
        }
    }
    out
}

/// Number of distinct orderings of `words`, by listing them.
fn distinct_orderings(words: &[String]) -> usize {
    all_permutations(words).into_iter().collect::<BTreeSet<_>>().len()
}

fn children<'a>(tree: &'a RelationTree, head: &Occurrence) -> Vec<&'a Edge> {
    tree.edges().iter().filter(|e| &e.head == head).collect()
}

/// `P(C)` written out directly from the parameter tables.
fn content_prob(tree: &RelationTree, m: &MonolingualModel) -> f64 {
    let mut p = m.top(&tree.root().word);
    for node in tree.nodes() {
        let kids = children(tree, node);
        let mut relations: BTreeSet<&str> = m.relations_of(&node.word).collect();
        relations.extend(kids.iter().map(|e| e.relation.as_str()));
        for r in relations {
            let words: Vec<String> = kids
                .iter()
                .filter(|e| e.relation == r)
                .map(|e| e.dependent.word.clone())
                .collect();
            p *= m.detail(&node.word, r, words.len());
            p *= distinct_orderings(&words) as f64;
            for w in &words {
                p *= m.dependency(&node.word, r, w);
            }
        }
    }
    p
}

fn below(tree: &RelationTree, node: &Occurrence) -> BTreeSet<Occurrence> {
    let mut out = BTreeSet::from([node.clone()]);
    for e in children(tree, node) {
        out.extend(below(tree, &e.dependent));
    }
    out
}

/// Per-head label sequences of `order`, or `None` when some phrase is
/// split.
fn sequences_of(order: &[Occurrence], tree: &RelationTree) -> Option<Vec<(Occurrence, Vec<String>)>> {
    let pos = |o: &Occurrence| order.iter().position(|x| x == o).expect("node in order");
    let mut out = Vec::new();
    for node in tree.nodes() {
        let span: Vec<usize> = below(tree, node).iter().map(pos).collect();
        if span.iter().max().unwrap() - span.iter().min().unwrap() + 1 != span.len() {
            return None;
        }
        let mut slots: Vec<(usize, String)> = vec![(pos(node), "e".to_string())];
        slots.extend(children(tree, node).iter().map(|e| (pos(&e.dependent), e.relation.clone())));
        slots.sort();
        out.push((node.clone(), slots.into_iter().map(|(_, l)| l).collect()));
    }
    Some(out)
}

/// `P(W|C)` for one occurrence order, with the word-multiset constant.
fn ordering_prob(order: &[Occurrence], tree: &RelationTree, m: &MonolingualModel) -> f64 {
    let Some(seqs) = sequences_of(order, tree) else { return 0.0 };
    let mut p = 1.0;
    for (head, seq) in seqs {
        p *= m.sequencing(&seq);
        let mut by_rel: BTreeMap<&str, Vec<String>> = BTreeMap::new();
        for e in children(tree, &head) {
            by_rel.entry(e.relation.as_str()).or_default().push(e.dependent.word.clone());
        }
        for words in by_rel.values() {
            p /= distinct_orderings(words) as f64;
        }
    }
    p
}

/// Probability of each word string a tree can be spoken as: every
/// occurrence permutation contributes `prod P(s_h) / prod n_r!`.
fn string_probs(tree: &RelationTree, m: &MonolingualModel) -> BTreeMap<Vec<String>, f64> {
    let nodes: Vec<Occurrence> = tree.nodes().iter().cloned().collect();
    let mut out: BTreeMap<Vec<String>, f64> = BTreeMap::new();
    for order in all_permutations(&nodes) {
        let Some(seqs) = sequences_of(&order, tree) else { continue };
        let mut p = 1.0;
        for (head, seq) in seqs {
            p *= m.sequencing(&seq);
            let mut by_rel: BTreeMap<&str, usize> = BTreeMap::new();
            for e in children(tree, &head) {
                *by_rel.entry(e.relation.as_str()).or_default() += 1;
            }
            for &n in by_rel.values() {
                p /= (1..=n).product::<usize>() as f64;
            }
        }
        *out.entry(order.iter().map(|o| o.word.clone()).collect()).or_default() += p;
    }
    out
}

fn positions(words: &[String]) -> Vec<Occurrence> {
    words
        .iter()
        .enumerate()
        .map(|(i, w)| Occurrence::new(w.clone(), i as u32 + 1))
        .collect()
}

/// Every tree over the sentence's occurrences with `P(C) P(W|C)`.
fn sentence_trees(words: &[String], m: &MonolingualModel) -> Vec<(RelationTree, f64, f64)> {
    let occs = positions(words);
    let labels: Vec<String> = m.alphabet().into_iter().map(str::to_string).collect();
    all_trees(&occs, &labels)
        .into_iter()
        .map(|t| {
            let c = content_prob(&t, m);
            let g = ordering_prob(&occs, &t, m);
            (t, c, g)
        })
        .collect()
}

/// `P(W)` by summing over every tree on the sentence's occurrences.
pub fn oracle_sentence_prob<S: AsRef<str>>(words: &[S], m: &MonolingualModel) -> Result<f64> {
    too_large(words.len(), ORACLE_BOUND)?;
    let words: Vec<String> = words.iter().map(|w| w.as_ref().to_string()).collect();
    Ok(sentence_trees(&words, m).iter().map(|(_, c, g)| c * g).sum())
}

/// Bijections from rule-side node positions to `nodes` preserving labeled
/// edges in both directions.
fn bijections(
    shape_nodes: usize,
    shape_edges: &BTreeSet<(String, usize, usize)>,
    nodes: &[Occurrence],
    edges: &BTreeSet<Edge>,
) -> Vec<Vec<Occurrence>> {
    if shape_nodes != nodes.len() {
        return Vec::new();
    }
    all_permutations(nodes)
        .into_iter()
        .filter(|img| {
            let mapped: BTreeSet<Edge> = shape_edges
                .iter()
                .map(|(r, a, b)| Edge::new(r.clone(), img[*a].clone(), img[*b].clone()))
                .collect();
            &mapped == edges
        })
        .collect()
}

/// `P(C_t | C_s)` by enumerating every total function from target to
/// source nodes.
pub fn oracle_translation_prob(target: &RelationTree, source: &RelationTree, tm: &TransferModel) -> Result<f64> {
    too_large(target.len(), ORACLE_BOUND)?;
    too_large(source.len(), ORACLE_BOUND)?;
    let tnodes: Vec<Occurrence> = target.nodes().iter().cloned().collect();
    let snodes: Vec<Occurrence> = source.nodes().iter().cloned().collect();
    let locals: Vec<BTreeSet<Edge>> = snodes
        .iter()
        .map(|h| source.edges().iter().filter(|e| &e.head == h).cloned().collect::<BTreeSet<_>>())
        .filter(|s| !s.is_empty())
        .collect();

    let mut total = 0.0;
    for choice in tuples(snodes.len(), tnodes.len()) {
        let f: BTreeMap<&Occurrence, &Occurrence> = tnodes.iter().zip(choice.iter().map(|&s| &snodes[s])).collect();
        let mut lex = 1.0;
        for s in &snodes {
            let m: Multiset = tnodes.iter().filter(|t| f[t] == s).map(|t| t.word.as_str()).collect();
            lex *= tm.lexical(&s.word, &m);
        }
        if lex == 0.0 {
            continue;
        }

        // candidate (rule, produced edges) per local tree
        let mut options: Vec<Vec<(f64, BTreeSet<Edge>)>> = Vec::new();
        for local in &locals {
            let lnodes: Vec<Occurrence> = local
                .iter()
                .flat_map(|e| [e.head.clone(), e.dependent.clone()])
                .collect::<BTreeSet<_>>()
                .into_iter()
                .collect();
            let mut found: BTreeSet<(usize, BTreeSet<Edge>)> = BTreeSet::new();
            for (ri, rule) in tm.rules().iter().enumerate() {
                let s_edges: BTreeSet<(String, usize, usize)> = rule
                    .source()
                    .edges()
                    .iter()
                    .map(|e| (e.relation.clone(), e.head, e.dependent))
                    .collect();
                for h in bijections(rule.source().node_count(), &s_edges, &lnodes, local) {
                    let tcount = rule.target().node_count();
                    for phi in tuples(tnodes.len(), tcount) {
                        if phi.iter().collect::<BTreeSet<_>>().len() != tcount {
                            continue;
                        }
                        let compatible =
                            (0..tcount).all(|v| f[&tnodes[phi[v]]] == &h[rule.alignment()[v]]);
                        if !compatible {
                            continue;
                        }
                        let produced: BTreeSet<Edge> = rule
                            .target()
                            .edges()
                            .iter()
                            .map(|e| {
                                Edge::new(e.relation.clone(), tnodes[phi[e.head]].clone(), tnodes[phi[e.dependent]].clone())
                            })
                            .collect();
                        found.insert((ri, produced));
                    }
                }
            }
            options.push(
                found
                    .into_iter()
                    .map(|(ri, edges)| (tm.rules()[ri].probability, edges))
                    .collect(),
            );
        }

        let mut structural = 0.0;
        for pick in tuples_mixed(&options.iter().map(Vec::len).collect::<Vec<_>>()) {
            let mut union: BTreeSet<Edge> = BTreeSet::new();
            let mut size = 0;
            let mut p = 1.0;
            for (i, &j) in pick.iter().enumerate() {
                let (prob, edges) = &options[i][j];
                p *= prob;
                size += edges.len();
                union.extend(edges.iter().cloned());
            }
            if size == union.len() && &union == target.edges() {
                structural += p;
            }
        }
        total += lex * structural;
    }
    Ok(total)
}

/// All index tuples with `pick[i] < sizes[i]`.
fn tuples_mixed(sizes: &[usize]) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for &n in sizes {
        let mut next = Vec::new();
        for t in &out {
            for x in 0..n {
                let mut t = t.clone();
                t.push(x);
                next.push(t);
            }
        }
        out = next;
    }
    out
}

/// Reference decoding results keyed by target word string.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct OracleDecode {
    /// Summed probability of every chain ending in the string.
    pub marginals: BTreeMap<Vec<String>, f64>,
    /// Probability of the string's best single chain.
    pub best_chain: BTreeMap<Vec<String>, f64>,
}

/// The decoding marginal `sum over W_s, C_s, C_t of P(A_s|W_s) P(W_s|C_s)
/// P(C_s) P(C_t|C_s) P(W_t|C_t)` for every target string, by nested loops.
pub fn oracle_decode(
    hyps: &[RecognitionHypothesis],
    src: &MonolingualModel,
    tm: &TransferModel,
    tgt: &MonolingualModel,
) -> Result<OracleDecode> {
    let mut labels: BTreeSet<String> = tgt.alphabet().into_iter().map(str::to_string).collect();
    for rule in tm.rules() {
        labels.extend(rule.target().edges().iter().map(|e| e.relation.clone()));
    }
    let labels: Vec<String> = labels.into_iter().collect();

    let mut out = OracleDecode::default();
    let mut evaluated = 0usize;
    for hyp in hyps {
        too_large(hyp.words.len(), ORACLE_BOUND)?;
        let acoustic = hyp.acoustic.exp();
        for (c_s, content, generation) in sentence_trees(&hyp.words, src) {
            let source_mass = acoustic * content * generation;
            if source_mass == 0.0 {
                continue;
            }
            // candidate target node sets: one positive lexical multiset per
            // source node, words numbered in sorted order
            let snodes: Vec<&Occurrence> = c_s.nodes().iter().collect();
            let options: Vec<Vec<&Multiset>> = snodes
                .iter()
                .map(|s| tm.lexical_entries().filter(|(w, _, p)| *w == s.word && *p > 0.0).map(|(_, m, _)| m).collect())
                .collect();
            let mut node_sets: BTreeSet<Vec<String>> = BTreeSet::new();
            for pick in tuples_mixed(&options.iter().map(Vec::len).collect::<Vec<_>>()) {
                let mut words: Vec<String> = pick
                    .iter()
                    .enumerate()
                    .flat_map(|(i, &j)| options[i][j].items().into_iter().map(str::to_string).collect::<Vec<_>>())
                    .collect();
                words.sort();
                node_sets.insert(words);
            }
            let mut classes: BTreeSet<RelationTree> = BTreeSet::new();
            for words in node_sets {
                if words.is_empty() {
                    continue;
                }
                too_large(words.len(), ORACLE_BOUND)?;
                for t in all_trees(&positions(&words), &labels) {
                    classes.insert(t.canonical());
                }
            }
            for c_t in classes {
                evaluated += 1;
                too_large(evaluated, ORACLE_CHAIN_BOUND)?;
                let transfer = oracle_translation_prob(&c_t, &c_s, tm)?;
                if transfer == 0.0 {
                    continue;
                }
                for (w_t, gen) in string_probs(&c_t, tgt) {
                    let chain = source_mass * transfer * gen;
                    if chain == 0.0 {
                        continue;
                    }
                    *out.marginals.entry(w_t.clone()).or_default() += chain;
                    let best = out.best_chain.entry(w_t).or_default();
                    if chain > *best {
                        *best = chain;
                    }
                }
            }
        }
    }
    Ok(out)
}
