//! The generation model `P(W|C)`: sequencing parameters over each head's
//! local sequence of relation labels.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::graph::{Occurrence, RelationTree, HEAD_MARKER};
use crate::logprob::{ln, ln_factorial, LogSum};

use super::content::{combinatoric_k, dependents_by_relation};
use super::MonolingualModel;

/// Default cap on tree size for exhaustive enumeration.
pub const DEFAULT_BOUND: usize = 8;

/// One head's left-to-right sequence: relation labels with `e` at the
/// head's own position, and the occurrence filling each slot.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocalSequence {
    pub labels: Vec<String>,
    pub fillers: Vec<Occurrence>,
}

/// The local sequences induced on every node of a tree by a word order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Linearization {
    pub sequences: BTreeMap<Occurrence, LocalSequence>,
}

impl Linearization {
    pub fn sequence(&self, head: &Occurrence) -> Option<&[String]> {
        self.sequences.get(head).map(|s| s.labels.as_slice())
    }
}

/// Derives each head's local sequence from the word order `words`, which
/// must be a projective permutation of the tree's nodes.
pub fn induced_sequences(words: &[Occurrence], tree: &RelationTree) -> Result<Linearization> {
    if words.len() != tree.len() {
        return Err(Error::NodeMismatch(format!(
            "{} words for a tree of {} nodes",
            words.len(),
            tree.len()
        )));
    }
    let mut position: BTreeMap<&Occurrence, usize> = BTreeMap::new();
    for (i, w) in words.iter().enumerate() {
        if !tree.contains(w) {
            return Err(Error::NodeMismatch(format!("{w} is not a node of the tree")));
        }
        if position.insert(w, i).is_some() {
            return Err(Error::NodeMismatch(format!("{w} occurs twice")));
        }
    }

    for node in tree.nodes() {
        let span: Vec<usize> = tree.subtree(node).iter().map(|n| position[n]).collect();
        let lo = *span.iter().min().expect("subtree contains its root");
        let hi = *span.iter().max().expect("subtree contains its root");
        if hi - lo + 1 != span.len() {
            return Err(Error::NonProjective(node.clone()));
        }
    }

    let mut sequences = BTreeMap::new();
    for node in tree.nodes() {
        let mut slots: Vec<(usize, &str, &Occurrence)> = vec![(position[node], HEAD_MARKER, node)];
        for e in tree.dependents(node) {
            slots.push((position[&e.dependent], e.relation.as_str(), &e.dependent));
        }
        slots.sort_by_key(|(p, _, _)| *p);
        sequences.insert(
            node.clone(),
            LocalSequence {
                labels: slots.iter().map(|(_, l, _)| l.to_string()).collect(),
                fillers: slots.iter().map(|(_, _, o)| (*o).clone()).collect(),
            },
        );
    }
    Ok(Linearization { sequences })
}

/// `ln P(W|C)` for the occurrence order `words`.
pub fn log_score_ordering(words: &[Occurrence], tree: &RelationTree, model: &MonolingualModel) -> Result<f64> {
    let lin = induced_sequences(words, tree)?;
    let mut total = 0.0;
    for (head, seq) in &lin.sequences {
        total += ln(model.sequencing(&seq.labels));
        for deps in dependents_by_relation(tree.dependents(head)).values() {
            total -= (combinatoric_k(deps) as f64).ln();
        }
    }
    Ok(total)
}

/// `P(W|C) = prod over heads of P(s | M(s)) * prod_r 1/k(n_r)`, zero when a
/// sequencing parameter is missing.
pub fn score_ordering(words: &[Occurrence], tree: &RelationTree, model: &MonolingualModel) -> Result<f64> {
    Ok(log_score_ordering(words, tree, model)?.exp())
}

/// A projective occurrence order with its generation probability.
#[derive(Debug, Clone, PartialEq)]
pub struct OccurrenceOrder {
    pub order: Vec<Occurrence>,
    pub log_prob: f64,
}

/// A surface word string with its probability under `P(W|C)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Realization {
    pub words: Vec<String>,
    pub probability: f64,
}

/// Every projective occurrence order of `tree`.
///
/// Each order carries the probability of generating it: the sequencing
/// parameter of every head times `1/n_r!` for the uniform assignment of
/// same-label dependents to their slots.
pub fn occurrence_orders(tree: &RelationTree, model: &MonolingualModel, bound: usize) -> Result<Vec<OccurrenceOrder>> {
    if tree.len() > bound {
        return Err(Error::TooLarge {
            size: tree.len(),
            bound,
        });
    }
    Ok(orders_below(tree, tree.root(), model))
}

fn orders_below(tree: &RelationTree, head: &Occurrence, model: &MonolingualModel) -> Vec<OccurrenceOrder> {
    let deps = tree.dependents(head);
    let mut slot_norm = 0.0;
    for group in dependents_by_relation(deps).values() {
        slot_norm += ln_factorial(group.len());
    }
    let child_orders: Vec<Vec<OccurrenceOrder>> = deps.iter().map(|e| orders_below(tree, &e.dependent, model)).collect();

    // slot 0 is the head, slot i+1 is dependent i
    let mut out = Vec::new();
    for perm in permutations(deps.len() + 1) {
        let labels: Vec<&str> = perm
            .iter()
            .map(|&s| if s == 0 { HEAD_MARKER } else { deps[s - 1].relation.as_str() })
            .collect();
        let local = ln(model.sequencing(&labels)) - slot_norm;
        let mut partial: Vec<(Vec<Occurrence>, f64)> = vec![(Vec::new(), local)];
        for &s in &perm {
            partial = if s == 0 {
                partial
                    .into_iter()
                    .map(|(mut o, p)| {
                        o.push(head.clone());
                        (o, p)
                    })
                    .collect()
            } else {
                let mut next = Vec::with_capacity(partial.len() * child_orders[s - 1].len());
                for (o, p) in &partial {
                    for child in &child_orders[s - 1] {
                        let mut joined = o.clone();
                        joined.extend(child.order.iter().cloned());
                        next.push((joined, p + child.log_prob));
                    }
                }
                next
            };
        }
        out.extend(partial.into_iter().map(|(order, log_prob)| OccurrenceOrder { order, log_prob }));
    }
    out
}

/// All permutations of `0..n` in lexicographic order.
pub(crate) fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn go(n: usize, used: &mut Vec<bool>, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == n {
            out.push(cur.clone());
            return;
        }
        for i in 0..n {
            if !used[i] {
                used[i] = true;
                cur.push(i);
                go(n, used, cur, out);
                cur.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    go(n, &mut vec![false; n], &mut Vec::new(), &mut out);
    out
}

/// Every distinct word string `tree` can be realized as, with
/// `P(W|C)` summed over the projective occurrence orders that spell it.
///
/// When no two same-label siblings share a word, each string has a single
/// order and its probability is exactly [`score_ordering`] of that order.
/// Sorted by descending probability, then by string.
pub fn enumerate_linearizations(tree: &RelationTree, model: &MonolingualModel, bound: usize) -> Result<Vec<Realization>> {
    let mut by_string: BTreeMap<Vec<String>, LogSum> = BTreeMap::new();
    for o in occurrence_orders(tree, model, bound)? {
        let words = o.order.iter().map(|occ| occ.word.clone()).collect();
        by_string.entry(words).or_default().add(o.log_prob);
    }
    let mut out: Vec<Realization> = by_string
        .into_iter()
        .map(|(words, acc)| Realization {
            words,
            probability: acc.prob(),
        })
        .collect();
    out.sort_by(|a, b| b.probability.total_cmp(&a.probability).then_with(|| a.words.cmp(&b.words)));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{validate_tree, Edge};

    fn occ(w: &str, i: u32) -> Occurrence {
        Occurrence::new(w, i)
    }

    fn sees_tree() -> RelationTree {
        validate_tree(
            [occ("sees", 1), occ("john", 2), occ("mary", 3)],
            [
                Edge::new("subj", occ("sees", 1), occ("john", 2)),
                Edge::new("obj", occ("sees", 1), occ("mary", 3)),
            ],
        )
        .unwrap()
    }

    #[test]
    fn induced_sequences_svo_and_vso() {
        let t = sees_tree();
        let lin = induced_sequences(&[occ("john", 2), occ("sees", 1), occ("mary", 3)], &t).unwrap();
        assert_eq!(lin.sequence(&occ("sees", 1)).unwrap(), ["subj", "e", "obj"]);
        assert_eq!(lin.sequence(&occ("john", 2)).unwrap(), ["e"]);
        assert_eq!(lin.sequence(&occ("mary", 3)).unwrap(), ["e"]);
        assert_eq!(
            lin.sequences[&occ("sees", 1)].fillers,
            vec![occ("john", 2), occ("sees", 1), occ("mary", 3)]
        );
        let lin = induced_sequences(&[occ("sees", 1), occ("john", 2), occ("mary", 3)], &t).unwrap();
        assert_eq!(lin.sequence(&occ("sees", 1)).unwrap(), ["e", "subj", "obj"]);
    }

    #[test]
    fn split_subtree_is_non_projective() {
        let chain = validate_tree(
            [occ("a", 1), occ("b", 2), occ("c", 3)],
            [
                Edge::new("r", occ("a", 1), occ("b", 2)),
                Edge::new("s", occ("b", 2), occ("c", 3)),
            ],
        )
        .unwrap();
        let err = induced_sequences(&[occ("b", 2), occ("a", 1), occ("c", 3)], &chain).unwrap_err();
        assert_eq!(err, Error::NonProjective(occ("b", 2)));
    }

    #[test]
    fn mismatched_words() {
        let t = sees_tree();
        assert!(matches!(
            induced_sequences(&[occ("john", 2), occ("sees", 1)], &t),
            Err(Error::NodeMismatch(_))
        ));
        assert!(matches!(
            induced_sequences(&[occ("john", 2), occ("sees", 1), occ("bob", 3)], &t),
            Err(Error::NodeMismatch(_))
        ));
    }

    #[test]
    fn ordering_scores() {
        let t = sees_tree();
        let mut m = MonolingualModel::new();
        m.set_sequencing(&["subj", "e", "obj"], 0.7).unwrap();
        m.set_sequencing(&["e"], 1.0).unwrap();
        let p = score_ordering(&[occ("john", 2), occ("sees", 1), occ("mary", 3)], &t, &m).unwrap();
        assert!((p - 0.7).abs() < 1e-15);
        let missing = score_ordering(&[occ("sees", 1), occ("john", 2), occ("mary", 3)], &t, &m).unwrap();
        assert_eq!(missing, 0.0);
    }

    #[test]
    fn identical_siblings() {
        let t = validate_tree(
            [occ("good", 1), occ("very", 2), occ("very", 3)],
            [
                Edge::new("mod", occ("good", 1), occ("very", 2)),
                Edge::new("mod", occ("good", 1), occ("very", 3)),
            ],
        )
        .unwrap();
        let mut m = MonolingualModel::new();
        m.set_sequencing(&["mod", "mod", "e"], 0.6).unwrap();
        m.set_sequencing(&["e"], 1.0).unwrap();
        let p = score_ordering(&[occ("very", 2), occ("very", 3), occ("good", 1)], &t, &m).unwrap();
        assert!((p - 0.6).abs() < 1e-15);
        // both occurrence orders spell the same string, which is produced once
        let strings = enumerate_linearizations(&t, &m, DEFAULT_BOUND).unwrap();
        let vvg: Vec<&Realization> = strings.iter().filter(|r| r.words == ["very", "very", "good"]).collect();
        assert_eq!(vvg.len(), 1);
        assert!((vvg[0].probability - 0.6).abs() < 1e-15);
    }

    #[test]
    fn single_node_and_bound() {
        let single = RelationTree::single(occ("a", 1));
        let mut m = MonolingualModel::new();
        m.set_sequencing(&["e"], 1.0).unwrap();
        let strings = enumerate_linearizations(&single, &m, DEFAULT_BOUND).unwrap();
        assert_eq!(strings.len(), 1);
        assert_eq!(strings[0].probability, 1.0);

        let nodes: Vec<Occurrence> = (1..=9).map(|i| occ("w", i)).collect();
        let edges: Vec<Edge> = (2..=9).map(|i| Edge::new("r", occ("w", 1), occ("w", i))).collect();
        let big = validate_tree(nodes, edges).unwrap();
        assert_eq!(
            enumerate_linearizations(&big, &m, DEFAULT_BOUND).unwrap_err(),
            Error::TooLarge { size: 9, bound: 8 }
        );
    }

    #[test]
    fn full_table_over_depth_one_tree() {
        let t = sees_tree();
        let mut m = MonolingualModel::new();
        let perms = ["subj", "e", "obj"].iter().copied().collect::<crate::graph::Multiset>().distinct_permutations();
        let weights = [0.1, 0.2, 0.3, 0.15, 0.05, 0.2];
        for (p, w) in perms.iter().zip(weights) {
            m.set_sequencing(p, w).unwrap();
        }
        m.set_sequencing(&["e"], 1.0).unwrap();
        let strings = enumerate_linearizations(&t, &m, DEFAULT_BOUND).unwrap();
        assert_eq!(strings.len(), 6);
        let total: f64 = strings.iter().map(|r| r.probability).sum();
        assert!((total - 1.0).abs() < 1e-12);
    }
}
