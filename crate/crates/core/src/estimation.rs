//! Relative-frequency estimation from annotated trees and bitexts, with
//! optional add-λ smoothing over the observed support.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::graph::{Alignment, Edge, Multiset, Occurrence, RelationTree, ShapeEdge, UnlabeledGraph};
use crate::monolingual::{induced_sequences, MonolingualModel, NORMALIZATION_TOLERANCE};
use crate::transfer::{StructuralRule, TransferModel};

/// A sentence with its relation tree. Occurrence indices are surface
/// positions, so the word string is the nodes in index order.
#[derive(Debug, Clone, PartialEq)]
pub struct TreebankRecord {
    pub tree: RelationTree,
}

impl TreebankRecord {
    pub fn new(tree: RelationTree) -> Self {
        TreebankRecord { tree }
    }

    pub fn order(&self) -> Vec<Occurrence> {
        self.tree.nodes().iter().cloned().collect()
    }

    pub fn words(&self) -> Vec<String> {
        self.tree.nodes().iter().map(|o| o.word.clone()).collect()
    }
}

/// A source record, a target record and an alignment from target to
/// source occurrences.
#[derive(Debug, Clone, PartialEq)]
pub struct BitextRecord {
    pub source: TreebankRecord,
    pub target: TreebankRecord,
    pub alignment: Alignment,
}

impl BitextRecord {
    pub fn new(source: TreebankRecord, target: TreebankRecord, alignment: Alignment) -> Result<Self> {
        alignment.check(target.tree.nodes(), source.tree.nodes())?;
        Ok(BitextRecord {
            source,
            target,
            alignment,
        })
    }

    /// The record with sides swapped. Needs a one-to-one alignment.
    pub fn reversed(&self) -> Result<Self> {
        let inv = self.alignment.inverse();
        if inv.len() != self.source.tree.len() || inv.values().any(|ts| ts.len() != 1) {
            return Err(Error::InvalidAlignment(
                "only one-to-one alignments can be reversed".into(),
            ));
        }
        let alignment = inv.into_iter().map(|(s, ts)| (s.clone(), ts[0].clone())).collect();
        Ok(BitextRecord {
            source: self.target.clone(),
            target: self.source.clone(),
            alignment,
        })
    }
}

fn check_lambda(lambda: f64) -> Result<()> {
    if lambda.is_finite() && lambda >= 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidProbability {
            what: "smoothing constant".into(),
            value: lambda,
        })
    }
}

/// `(count + λ) / (total + λ |support|)` for every cell of `support`,
/// skipping cells that end up zero.
fn smoothed<K: Ord + Clone>(counts: &BTreeMap<K, usize>, support: &BTreeSet<K>, lambda: f64) -> Vec<(K, f64)> {
    let total: usize = counts.values().sum();
    let denom = total as f64 + lambda * support.len() as f64;
    support
        .iter()
        .filter_map(|k| {
            let c = counts.get(k).copied().unwrap_or(0) as f64 + lambda;
            (c > 0.0).then(|| (k.clone(), c / denom))
        })
        .collect()
}

/// Estimates a monolingual model. `n_max` widens the detail support used
/// for smoothing beyond the largest observed count.
pub fn estimate_monolingual(corpus: &[TreebankRecord], lambda: f64, n_max: Option<usize>) -> Result<MonolingualModel> {
    check_lambda(lambda)?;
    if corpus.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let mut top: BTreeMap<String, usize> = BTreeMap::new();
    let mut dependency: BTreeMap<(String, String), BTreeMap<String, usize>> = BTreeMap::new();
    let mut sequencing: BTreeMap<Multiset, BTreeMap<Vec<String>, usize>> = BTreeMap::new();
    let mut relations: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
    let mut vocabulary: BTreeSet<String> = BTreeSet::new();

    for (i, record) in corpus.iter().enumerate() {
        let tree = &record.tree;
        let lin = induced_sequences(&record.order(), tree).map_err(|e| match e {
            Error::NonProjective(head) => Error::NonProjectiveRecord { record: i + 1, head },
            other => other,
        })?;
        *top.entry(tree.root().word.clone()).or_default() += 1;
        for node in tree.nodes() {
            vocabulary.insert(node.word.clone());
        }
        for e in tree.edges() {
            *dependency
                .entry((e.head.word.clone(), e.relation.clone()))
                .or_default()
                .entry(e.dependent.word.clone())
                .or_default() += 1;
            relations
                .entry(e.head.word.clone())
                .or_default()
                .insert(e.relation.clone());
        }
        for seq in lin.sequences.values() {
            let m: Multiset = seq.labels.iter().map(String::as_str).collect();
            *sequencing.entry(m).or_default().entry(seq.labels.clone()).or_default() += 1;
        }
    }

    let mut detail: BTreeMap<(String, String), BTreeMap<usize, usize>> = BTreeMap::new();
    for record in corpus {
        let tree = &record.tree;
        for node in tree.nodes() {
            let Some(rels) = relations.get(&node.word) else { continue };
            let deps = tree.local_edges(node)?;
            for r in rels {
                let n = deps.iter().filter(|e| &e.relation == r).count();
                *detail
                    .entry((node.word.clone(), r.clone()))
                    .or_default()
                    .entry(n)
                    .or_default() += 1;
            }
        }
    }
    let observed_max = detail.values().flat_map(|c| c.keys()).copied().max().unwrap_or(0);
    let n_max = n_max.unwrap_or(observed_max).max(observed_max);

    let mut model = MonolingualModel::new();
    for (w, p) in smoothed(&top, &vocabulary, lambda) {
        model.set_top(&w, p)?;
    }
    for ((h, r), counts) in &dependency {
        for (w, p) in smoothed(counts, &vocabulary, lambda) {
            model.set_dependency(h, r, &w, p)?;
        }
    }
    let count_support: BTreeSet<usize> = (0..=n_max).collect();
    for ((h, r), counts) in &detail {
        for (n, p) in smoothed(counts, &count_support, lambda) {
            model.set_detail(h, r, n, p)?;
        }
    }
    for (m, counts) in &sequencing {
        let support: BTreeSet<Vec<String>> = m.distinct_permutations().into_iter().collect();
        for (s, p) in smoothed(counts, &support, lambda) {
            model.set_sequencing(&s, p)?;
        }
    }
    model.check_normalized(NORMALIZATION_TOLERANCE)?;
    Ok(model)
}

/// The source local tree (by head) that accounts for each target edge of
/// `record`; edges grouped by head in index order, every internal source
/// node present.
pub fn decompose(record: &BitextRecord, number: usize) -> Result<BTreeMap<Occurrence, Vec<Edge>>> {
    let source = &record.source.tree;
    let f = &record.alignment;
    let mut groups: BTreeMap<Occurrence, Vec<Edge>> =
        source.internal_nodes().map(|h| (h.clone(), Vec::new())).collect();
    for e in record.target.tree.edges() {
        let u = f.get(&e.head).expect("checked alignment");
        let v = f.get(&e.dependent).expect("checked alignment");
        let parent = |x: &Occurrence| source.parent_edge(x).map(|pe| pe.head.clone());
        let owner = if u == v {
            if groups.contains_key(u) {
                Some(u.clone())
            } else {
                parent(u)
            }
        } else if parent(v).as_ref() == Some(u) {
            Some(u.clone())
        } else if parent(u).as_ref() == Some(v) {
            Some(v.clone())
        } else {
            match (parent(u), parent(v)) {
                (Some(a), Some(b)) if a == b => Some(a),
                _ => None,
            }
        };
        match owner {
            Some(h) => groups.get_mut(&h).expect("owner is internal").push(e.clone()),
            None => {
                return Err(Error::UndecomposableRecord {
                    record: number,
                    edge: e.to_string(),
                })
            }
        }
    }
    Ok(groups)
}

/// The structural rule a source local tree and its target edges induce,
/// in canonical form.
pub fn extract_rule(source: &RelationTree, head: &Occurrence, target_edges: &[Edge], f: &Alignment) -> StructuralRule {
    let deps = source.dependents(head);
    let mut src_nodes = vec![head.clone()];
    src_nodes.extend(deps.iter().map(|e| e.dependent.clone()));
    let src_index = |o: &Occurrence| src_nodes.iter().position(|n| n == o).expect("local node");
    let src_shape = UnlabeledGraph::new(
        (0..src_nodes.len()).map(|i| format!("s{i}")).collect(),
        deps.iter().map(|e| ShapeEdge {
            relation: e.relation.clone(),
            head: 0,
            dependent: src_index(&e.dependent),
        }),
    )
    .expect("local tree shape");
    let tgt_nodes: Vec<&Occurrence> = target_edges
        .iter()
        .flat_map(|e| [&e.head, &e.dependent])
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let tgt_index = |o: &Occurrence| tgt_nodes.iter().position(|n| *n == o).expect("endpoint");
    let tgt_shape = UnlabeledGraph::new(
        (0..tgt_nodes.len()).map(|i| format!("t{i}")).collect(),
        target_edges.iter().map(|e| ShapeEdge {
            relation: e.relation.clone(),
            head: tgt_index(&e.head),
            dependent: tgt_index(&e.dependent),
        }),
    )
    .expect("target shape");
    let alignment = tgt_nodes
        .iter()
        .map(|t| src_index(f.get(t).expect("checked alignment")))
        .collect();
    StructuralRule::new("", src_shape, tgt_shape, alignment, 1.0)
        .expect("extracted rules are well formed")
        .canonical()
}

/// Canonical rule texts to the rule and its count.
type RuleCounts = BTreeMap<(String, String, String), (StructuralRule, usize)>;

/// Estimates lexical multiset parameters and structural rules.
pub fn estimate_transfer(corpus: &[BitextRecord], lambda: f64) -> Result<TransferModel> {
    check_lambda(lambda)?;
    if corpus.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let mut lexical: BTreeMap<String, BTreeMap<Multiset, usize>> = BTreeMap::new();
    let mut inventory: BTreeSet<Multiset> = BTreeSet::new();
    let mut rules: BTreeMap<Vec<String>, RuleCounts> = BTreeMap::new();

    for (i, record) in corpus.iter().enumerate() {
        let source = &record.source.tree;
        let inv = record.alignment.inverse();
        for s in source.nodes() {
            let m: Multiset = inv
                .get(s)
                .into_iter()
                .flatten()
                .map(|t| t.word.as_str())
                .collect();
            inventory.insert(m.clone());
            *lexical.entry(s.word.clone()).or_default().entry(m).or_default() += 1;
        }
        for (head, edges) in decompose(record, i + 1)? {
            let rule = extract_rule(source, &head, &edges, &record.alignment);
            let entry = rules
                .entry(rule.source_key())
                .or_default()
                .entry(rule.texts())
                .or_insert((rule, 0));
            entry.1 += 1;
        }
    }

    let mut model = TransferModel::new();
    for (w, counts) in &lexical {
        for (m, p) in smoothed(counts, &inventory, lambda) {
            model.set_lexical(w, m, p)?;
        }
    }
    let mut next = 1;
    for by_text in rules.values() {
        let counts: BTreeMap<&(String, String, String), usize> = by_text.iter().map(|(t, (_, c))| (t, *c)).collect();
        let support: BTreeSet<&(String, String, String)> = by_text.keys().collect();
        for (text, p) in smoothed(&counts, &support, lambda) {
            let mut rule = by_text[text].0.clone();
            rule.id = format!("r{next}");
            rule.probability = p;
            next += 1;
            model.add_rule(rule);
        }
    }
    model.check_normalized(NORMALIZATION_TOLERANCE)?;
    Ok(model)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::validate_tree;
    use crate::monolingual::{score_sentence, DEFAULT_BOUND};
    use crate::transfer::score_translation;

    fn occ(w: &str, i: u32) -> Occurrence {
        Occurrence::new(w, i)
    }

    /// Subject, verb, object in surface order with the given words.
    fn svo(s: &str, v: &str, o: &str) -> RelationTree {
        validate_tree(
            [occ(s, 1), occ(v, 2), occ(o, 3)],
            [Edge::new("subj", occ(v, 2), occ(s, 1)), Edge::new("obj", occ(v, 2), occ(o, 3))],
        )
        .unwrap()
    }

    #[test]
    fn single_record_is_point_mass() {
        let corpus = [TreebankRecord::new(svo("john", "sees", "mary"))];
        let m = estimate_monolingual(&corpus, 0.0, None).unwrap();
        assert_eq!(m.top("sees"), 1.0);
        assert_eq!(m.sequencing(&["subj", "e", "obj"]), 1.0);
        let p = score_sentence(&["john", "sees", "mary"], &m, DEFAULT_BOUND).unwrap();
        assert!((p - 1.0).abs() < 1e-12);
    }

    #[test]
    fn order_variants_split_sequencing() {
        let ovs = validate_tree(
            [occ("mary", 1), occ("sees", 2), occ("john", 3)],
            [
                Edge::new("subj", occ("sees", 2), occ("john", 3)),
                Edge::new("obj", occ("sees", 2), occ("mary", 1)),
            ],
        )
        .unwrap();
        let corpus = [TreebankRecord::new(svo("john", "sees", "mary")), TreebankRecord::new(ovs)];
        let m = estimate_monolingual(&corpus, 0.0, None).unwrap();
        assert_eq!(m.sequencing(&["subj", "e", "obj"]), 0.5);
        assert_eq!(m.sequencing(&["obj", "e", "subj"]), 0.5);
    }

    #[test]
    fn smoothing_reaches_unseen_pairs() {
        let corpus = [
            TreebankRecord::new(svo("john", "sees", "mary")),
            TreebankRecord::new(svo("mary", "sees", "john")),
            TreebankRecord::new(svo("john", "likes", "mary")),
        ];
        let unseen = ["mary", "likes", "john"];
        let mle = estimate_monolingual(&corpus, 0.0, None).unwrap();
        assert_eq!(score_sentence(&unseen, &mle, DEFAULT_BOUND).unwrap(), 0.0);
        let smooth = estimate_monolingual(&corpus, 0.1, None).unwrap();
        assert!(score_sentence(&unseen, &smooth, DEFAULT_BOUND).unwrap() > 0.0);
    }

    #[test]
    fn non_projective_record_is_named() {
        let tree = validate_tree(
            [occ("a", 1), occ("b", 2), occ("c", 3)],
            [Edge::new("r", occ("b", 2), occ("a", 1)), Edge::new("s", occ("a", 1), occ("c", 3))],
        )
        .unwrap();
        let corpus = [TreebankRecord::new(svo("x", "y", "z")), TreebankRecord::new(tree)];
        assert_eq!(
            estimate_monolingual(&corpus, 0.0, None).unwrap_err(),
            Error::NonProjectiveRecord {
                record: 2,
                head: occ("a", 1)
            }
        );
        assert_eq!(estimate_monolingual(&[], 0.0, None).unwrap_err(), Error::EmptyCorpus);
    }

    fn identity_record(src: RelationTree, tgt: RelationTree) -> BitextRecord {
        let f: Alignment = tgt
            .nodes()
            .iter()
            .zip(src.nodes())
            .map(|(t, s)| (t.clone(), s.clone()))
            .collect();
        BitextRecord::new(TreebankRecord::new(src), TreebankRecord::new(tgt), f).unwrap()
    }

    #[test]
    fn single_bitext_is_point_mass() {
        let rec = identity_record(svo("john", "sees", "mary"), svo("jean", "voit", "marie"));
        let tm = estimate_transfer(std::slice::from_ref(&rec), 0.0).unwrap();
        assert_eq!(tm.rules().len(), 1);
        let p = score_translation(&rec.target.tree, &rec.source.tree, &tm, DEFAULT_BOUND).unwrap();
        assert!((p - 1.0).abs() < 1e-12);
    }

    #[test]
    fn unaligned_source_word_gets_empty_multiset() {
        let with_det = |det: bool| {
            let src = validate_tree(
                [occ("the", 1), occ("cat", 2)],
                [Edge::new("det", occ("cat", 2), occ("the", 1))],
            )
            .unwrap();
            let (tgt, f): (RelationTree, Alignment) = if det {
                (
                    validate_tree([occ("le", 1), occ("chat", 2)], [Edge::new("det", occ("chat", 2), occ("le", 1))])
                        .unwrap(),
                    [(occ("le", 1), occ("the", 1)), (occ("chat", 2), occ("cat", 2))]
                        .into_iter()
                        .collect(),
                )
            } else {
                (
                    RelationTree::single(occ("chat", 1)),
                    [(occ("chat", 1), occ("cat", 2))].into_iter().collect(),
                )
            };
            BitextRecord::new(TreebankRecord::new(src), TreebankRecord::new(tgt), f).unwrap()
        };
        let tm = estimate_transfer(&[with_det(true), with_det(false)], 0.0).unwrap();
        assert_eq!(tm.lexical("the", &Multiset::new()), 0.5);
        assert_eq!(tm.lexical("the", &["le"].into_iter().collect()), 0.5);
        // the dropped edge yields a rule with an empty target side
        assert_eq!(tm.rules().len(), 2);
    }

    #[test]
    fn undecomposable_edge_is_reported() {
        // b and c are not in a common local tree of the source chain
        let src = validate_tree(
            [occ("a", 1), occ("b", 2), occ("c", 3)],
            [Edge::new("r", occ("a", 1), occ("b", 2)), Edge::new("r", occ("b", 2), occ("c", 3))],
        )
        .unwrap();
        let tgt = validate_tree(
            [occ("x", 1), occ("y", 2), occ("z", 3)],
            [Edge::new("r", occ("x", 1), occ("y", 2)), Edge::new("r", occ("x", 1), occ("z", 3))],
        )
        .unwrap();
        let f: Alignment = [
            (occ("x", 1), occ("a", 1)),
            (occ("y", 2), occ("b", 2)),
            (occ("z", 3), occ("c", 3)),
        ]
        .into_iter()
        .collect();
        let rec = BitextRecord::new(TreebankRecord::new(src), TreebankRecord::new(tgt), f).unwrap();
        assert_eq!(
            estimate_transfer(&[rec], 0.0).unwrap_err(),
            Error::UndecomposableRecord {
                record: 1,
                edge: "r(x:1,z:3)".into()
            }
        );
    }

    #[test]
    fn reversal_swaps_sides() {
        let rec = identity_record(svo("john", "sees", "mary"), svo("jean", "voit", "marie"));
        let back = rec.reversed().unwrap();
        assert_eq!(back.source, rec.target);
        assert_eq!(back.alignment.get(&occ("john", 1)), Some(&occ("jean", 1)));
    }
}
