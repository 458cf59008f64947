//! Seeded random models and transfer instances for property checks and
//! benchmarks.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::graph::{validate_tree, Edge, Multiset, Occurrence, RelationTree, ShapeEdge, UnlabeledGraph};
use crate::monolingual::MonolingualModel;
use crate::transfer::{translate_all, StructuralRule, TransferModel};

/// Size parameters of a random monolingual model.
#[derive(Debug, Clone)]
pub struct LmShape {
    pub vocabulary: Vec<String>,
    pub relations: Vec<String>,
    pub n_max: usize,
    /// Number of candidate dependents per (head, relation); the full
    /// vocabulary when `None`.
    pub fan_out: Option<usize>,
}

impl LmShape {
    pub fn new(vocabulary: &[&str], relations: &[&str], n_max: usize) -> Self {
        LmShape {
            vocabulary: vocabulary.iter().map(|s| s.to_string()).collect(),
            relations: relations.iter().map(|s| s.to_string()).collect(),
            n_max,
            fan_out: None,
        }
    }

    pub fn with_fan_out(mut self, fan_out: usize) -> Self {
        self.fan_out = Some(fan_out);
        self
    }
}

/// `n` positive weights summing to one.
pub fn random_distribution<R: Rng>(rng: &mut R, n: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..n).map(|_| rng.gen_range(0.05..1.0)).collect();
    let sum: f64 = raw.iter().sum();
    raw.into_iter().map(|x| x / sum).collect()
}

/// Every label multiset `{e} + counts` with at most `n_max` of each
/// relation.
fn label_multisets(relations: &[String], n_max: usize) -> Vec<Multiset> {
    let mut out = vec![Multiset::from_iter(["e"])];
    for r in relations {
        let mut next = Vec::new();
        for m in &out {
            for n in 0..=n_max {
                let mut m = m.clone();
                for _ in 0..n {
                    m.insert(r.clone());
                }
                next.push(m);
            }
        }
        out = next;
    }
    out
}

/// A normalized model with every table filled over `shape`, including a
/// sequencing distribution for every reachable label multiset.
pub fn random_monolingual(shape: &LmShape, seed: u64) -> MonolingualModel {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut m = MonolingualModel::new();
    let vocab = &shape.vocabulary;
    for (w, p) in vocab.iter().zip(random_distribution(&mut rng, vocab.len())) {
        m.set_top(w, p).expect("valid top entry");
    }
    for h in vocab {
        for r in &shape.relations {
            let mut deps: Vec<&String> = vocab.iter().collect();
            if let Some(k) = shape.fan_out {
                deps.shuffle(&mut rng);
                deps.truncate(k.max(1));
                deps.sort();
            }
            for (w, p) in deps.iter().zip(random_distribution(&mut rng, deps.len())) {
                m.set_dependency(h, r, w, p).expect("valid dependency entry");
            }
            for (n, p) in random_distribution(&mut rng, shape.n_max + 1).into_iter().enumerate() {
                m.set_detail(h, r, n, p).expect("valid detail entry");
            }
        }
    }
    for ms in label_multisets(&shape.relations, shape.n_max) {
        let perms = ms.distinct_permutations();
        for (s, p) in perms.iter().zip(random_distribution(&mut rng, perms.len())) {
            m.set_sequencing(s, p).expect("valid sequencing entry");
        }
    }
    m
}

/// Every word string of length 1..=`max_len` over `vocabulary`.
pub fn all_strings(vocabulary: &[String], max_len: usize) -> Vec<Vec<String>> {
    let mut out = Vec::new();
    let mut layer: Vec<Vec<String>> = vec![Vec::new()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for s in &layer {
            for w in vocabulary {
                let mut s = s.clone();
                s.push(w.clone());
                next.push(s);
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

/// A random tree with `nodes` nodes numbered 1.. over the given words and
/// labels.
pub fn random_tree<R: Rng>(rng: &mut R, nodes: usize, words: &[String], labels: &[String]) -> RelationTree {
    let occs: Vec<Occurrence> = (0..nodes)
        .map(|i| Occurrence::new(words.choose(rng).expect("words").clone(), i as u32 + 1))
        .collect();
    let mut order: Vec<usize> = (0..nodes).collect();
    order.shuffle(rng);
    let edges: Vec<Edge> = (1..nodes)
        .map(|i| {
            let head = order[rng.gen_range(0..i)];
            let label = labels.choose(rng).expect("labels").clone();
            Edge::new(label, occs[head].clone(), occs[order[i]].clone())
        })
        .collect();
    validate_tree(occs, edges).expect("attaching each node to an earlier one forms a tree")
}

/// A source tree, a transfer model and a target tree to score.
#[derive(Debug, Clone)]
pub struct TransferInstance {
    pub source: RelationTree,
    pub target: RelationTree,
    pub model: TransferModel,
}

fn strings(items: &[&str]) -> Vec<String> {
    items.iter().map(|s| s.to_string()).collect()
}

/// A random rule for the local tree shape with the given sorted labels.
fn random_rule<R: Rng>(rng: &mut R, key: &[String], labels: &[String], p: f64) -> StructuralRule {
    let src_nodes = key.len() + 1;
    let source = UnlabeledGraph::new(
        (0..src_nodes).map(|i| format!("s{i}")).collect(),
        key.iter().enumerate().map(|(i, r)| ShapeEdge {
            relation: r.clone(),
            head: 0,
            dependent: i + 1,
        }),
    )
    .expect("local tree");
    let roll: f64 = rng.gen();
    let (tgt_nodes, alignment): (usize, Vec<usize>) = if roll < 0.1 {
        (0, Vec::new())
    } else if roll < 0.7 {
        // one target node per source node, shuffled
        let mut a: Vec<usize> = (0..src_nodes).collect();
        a.shuffle(rng);
        (src_nodes, a)
    } else {
        let n = rng.gen_range(2..=src_nodes + 1);
        (n, (0..n).map(|_| rng.gen_range(0..src_nodes)).collect())
    };
    let mut edges = Vec::new();
    if tgt_nodes > 0 {
        let mut order: Vec<usize> = (0..tgt_nodes).collect();
        order.shuffle(rng);
        for i in 1..tgt_nodes {
            edges.push(ShapeEdge {
                relation: labels.choose(rng).expect("labels").clone(),
                head: order[rng.gen_range(0..i)],
                dependent: order[i],
            });
        }
    }
    let target =
        UnlabeledGraph::new((0..tgt_nodes).map(|i| format!("t{i}")).collect(), edges).expect("target graph");
    StructuralRule::new("", source, target, alignment, p).expect("generated rule is valid")
}

/// A seeded transfer instance: a source tree with at most three edges, at
/// most three rules per source shape, at most two lexical multisets per
/// source word, and a target tree of at most five nodes.
///
/// The target is usually one the model can derive; about one time in
/// five it is a random tree over the target vocabulary instead.
pub fn random_transfer_instance(seed: u64) -> TransferInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let src_words = strings(&["a", "b", "c"]);
    let tgt_words = strings(&["x", "y", "z"]);
    let labels = strings(&["r", "s"]);
    loop {
        let n = rng.gen_range(2..=4);
        let source = random_tree(&mut rng, n, &src_words, &labels);
        let mut tm = TransferModel::new();
        let used: BTreeSet<&str> = source.nodes().iter().map(|o| o.word.as_str()).collect();
        for w in used {
            let count = rng.gen_range(1..=2);
            let mut options: BTreeSet<Multiset> = BTreeSet::new();
            while options.len() < count {
                let size = match rng.gen_range(0..10) {
                    0 => 0,
                    1 => 2,
                    _ => 1,
                };
                options.insert((0..size).map(|_| tgt_words.choose(&mut rng).unwrap().as_str()).collect());
            }
            for (m, p) in options.into_iter().zip(random_distribution(&mut rng, count)) {
                tm.set_lexical(w, m, p).expect("valid lexical entry");
            }
        }
        let keys: BTreeSet<Vec<String>> = source
            .internal_nodes()
            .map(|h| {
                let mut k: Vec<String> = source.local_edges(h).unwrap().iter().map(|e| e.relation.clone()).collect();
                k.sort();
                k
            })
            .collect();
        for key in keys {
            let count = rng.gen_range(1..=3);
            let mut seen = BTreeSet::new();
            let mut rules = Vec::new();
            while rules.len() < count {
                let rule = random_rule(&mut rng, &key, &labels, 1.0).canonical();
                if seen.insert(rule.texts()) {
                    rules.push(rule);
                }
            }
            for (i, (mut rule, p)) in rules.into_iter().zip(random_distribution(&mut rng, count)).enumerate() {
                rule.id = format!("{}-{i}", key.join("."));
                rule.probability = p;
                tm.add_rule(rule);
            }
        }

        let derivable: Vec<RelationTree> = translate_all(&source, &tm, 8)
            .expect("small source")
            .results
            .into_iter()
            .map(|t| t.tree)
            .filter(|t| t.len() <= 5)
            .collect();
        let target = if derivable.is_empty() || rng.gen_bool(0.2) {
            let n = rng.gen_range(1..=4);
            random_tree(&mut rng, n, &tgt_words, &labels)
        } else {
            derivable.choose(&mut rng).unwrap().clone()
        };
        if !derivable.is_empty() {
            return TransferInstance {
                source,
                target,
                model: tm,
            };
        }
    }
}
