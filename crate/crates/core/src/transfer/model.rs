use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::graph::{is_token, Multiset, ShapeEdge, UnlabeledGraph};
use crate::monolingual::permutations;

/// A derivation step `P(T' | S', f_i)`: an unlabeled source local tree, an
/// unlabeled target graph, and a total map from target to source nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct StructuralRule {
    pub id: String,
    source: UnlabeledGraph,
    target: UnlabeledGraph,
    alignment: Vec<usize>,
    pub probability: f64,
}

impl StructuralRule {
    /// `alignment[i]` is the source node that target node `i` maps to.
    pub fn new(
        id: impl Into<String>,
        source: UnlabeledGraph,
        target: UnlabeledGraph,
        alignment: Vec<usize>,
        probability: f64,
    ) -> Result<Self> {
        let id = id.into();
        if source.local_tree_root().is_none() {
            return Err(Error::InvalidRule(format!("{id}: source side is not a local tree")));
        }
        if alignment.len() != target.node_count() {
            return Err(Error::InvalidRule(format!(
                "{id}: node map covers {} of {} target nodes",
                alignment.len(),
                target.node_count()
            )));
        }
        if let Some(bad) = alignment.iter().find(|&&s| s >= source.node_count()) {
            return Err(Error::InvalidRule(format!("{id}: node map refers to missing source node {bad}")));
        }
        let touched: BTreeSet<usize> = target.edges().iter().flat_map(|e| [e.head, e.dependent]).collect();
        if touched.len() != target.node_count() {
            return Err(Error::InvalidRule(format!("{id}: every target node must lie on an edge")));
        }
        if target.edges().iter().any(|e| e.head == e.dependent) {
            return Err(Error::InvalidRule(format!("{id}: target side has a self-loop")));
        }
        if !(probability.is_finite() && (0.0..=1.0).contains(&probability)) {
            return Err(Error::InvalidProbability {
                what: format!("rule {id}"),
                value: probability,
            });
        }
        Ok(StructuralRule {
            id,
            source,
            target,
            alignment,
            probability,
        })
    }

    pub fn source(&self) -> &UnlabeledGraph {
        &self.source
    }

    pub fn target(&self) -> &UnlabeledGraph {
        &self.target
    }

    /// Target node index to source node index.
    pub fn alignment(&self) -> &[usize] {
        &self.alignment
    }

    /// Sorted source labels: rules with equal keys share a source shape.
    pub fn source_key(&self) -> Vec<String> {
        self.source.label_key()
    }

    /// The `(source edges, target edges, node map)` text under the current
    /// node names, e.g. `subj(a,b);obj(a,c)`, `subj(a',b')`, `a'>a,b'>b`.
    pub fn texts(&self) -> (String, String, String) {
        let src = edges_text(&self.source);
        let tgt = edges_text(&self.target);
        let align = if self.alignment.is_empty() {
            "-".to_string()
        } else {
            self.alignment
                .iter()
                .enumerate()
                .map(|(t, &s)| format!("{}>{}", self.target.nodes()[t], self.source.nodes()[s]))
                .collect::<Vec<_>>()
                .join(",")
        };
        (src, tgt, align)
    }

    /// The same rule with nodes renamed `a, b, c, ...` (source, root first)
    /// and `a', b', ...` (target), choosing the renaming whose text is
    /// smallest. Rules equal up to node renaming have equal canonical forms.
    pub fn canonical(&self) -> StructuralRule {
        let root = self.source.local_tree_root().expect("validated local tree");
        let deps: Vec<usize> = (0..self.source.node_count()).filter(|&i| i != root).collect();
        let mut best: Option<((String, String, String), StructuralRule)> = None;
        for sp in permutations(deps.len()) {
            // order[new] = old
            let mut src_order = vec![root];
            src_order.extend(sp.iter().map(|&i| deps[i]));
            for tp in permutations(self.target.node_count()) {
                let candidate = self.renamed(&src_order, &tp);
                let text = candidate.texts();
                if best.as_ref().is_none_or(|(t, _)| text < *t) {
                    best = Some((text, candidate));
                }
            }
        }
        best.expect("at least one renaming").1
    }

    fn renamed(&self, src_order: &[usize], tgt_order: &[usize]) -> StructuralRule {
        let inv = |order: &[usize]| {
            let mut inv = vec![0; order.len()];
            for (new, &old) in order.iter().enumerate() {
                inv[old] = new;
            }
            inv
        };
        let src_new = inv(src_order);
        let tgt_new = inv(tgt_order);
        let source = UnlabeledGraph::new(
            (0..src_order.len()).map(|i| node_name(i, false)).collect(),
            self.source.edges().iter().map(|e| ShapeEdge {
                relation: e.relation.clone(),
                head: src_new[e.head],
                dependent: src_new[e.dependent],
            }),
        )
        .expect("renaming keeps the graph valid");
        let target = UnlabeledGraph::new(
            (0..tgt_order.len()).map(|i| node_name(i, true)).collect(),
            self.target.edges().iter().map(|e| ShapeEdge {
                relation: e.relation.clone(),
                head: tgt_new[e.head],
                dependent: tgt_new[e.dependent],
            }),
        )
        .expect("renaming keeps the graph valid");
        let alignment = tgt_order.iter().map(|&old| src_new[self.alignment[old]]).collect();
        StructuralRule {
            id: self.id.clone(),
            source,
            target,
            alignment,
            probability: self.probability,
        }
    }
}

fn node_name(i: usize, primed: bool) -> String {
    let base = if i < 26 {
        ((b'a' + i as u8) as char).to_string()
    } else {
        format!("n{i}")
    };
    if primed {
        base + "'"
    } else {
        base
    }
}

fn edges_text(g: &UnlabeledGraph) -> String {
    if g.edges().is_empty() {
        return "-".to_string();
    }
    let mut parts: Vec<String> = g
        .edges()
        .iter()
        .map(|e| format!("{}({},{})", e.relation, g.nodes()[e.head], g.nodes()[e.dependent]))
        .collect();
    parts.sort();
    parts.join(";")
}

/// Lexical multiset parameters `P(M | w)` and structural rules.
///
/// The target-to-source direction is a separate `TransferModel`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct TransferModel {
    lexical: BTreeMap<String, BTreeMap<Multiset, f64>>,
    rules: Vec<StructuralRule>,
    by_source: BTreeMap<Vec<String>, Vec<usize>>,
}

impl TransferModel {
    pub fn new() -> Self {
        TransferModel::default()
    }

    pub fn set_lexical(&mut self, word: &str, targets: Multiset, p: f64) -> Result<()> {
        if !is_token(word) {
            return Err(Error::InvalidWord(word.to_string()));
        }
        if let Some((bad, _)) = targets.counts().find(|(w, _)| !is_token(w)) {
            return Err(Error::InvalidWord(bad.to_string()));
        }
        if !(p.is_finite() && (0.0..=1.0).contains(&p)) {
            return Err(Error::InvalidProbability {
                what: format!("lexical({word},{targets})"),
                value: p,
            });
        }
        self.lexical.entry(word.to_string()).or_default().insert(targets, p);
        Ok(())
    }

    /// `P(M | word)`; zero when absent.
    pub fn lexical(&self, word: &str, targets: &Multiset) -> f64 {
        self.lexical
            .get(word)
            .and_then(|opts| opts.get(targets))
            .copied()
            .unwrap_or(0.0)
    }

    /// Target multisets of `word` with positive probability.
    pub fn lexical_options<'a>(&'a self, word: &str) -> impl Iterator<Item = (&'a Multiset, f64)> + 'a {
        self.lexical
            .get(word)
            .into_iter()
            .flatten()
            .filter(|(_, &p)| p > 0.0)
            .map(|(m, &p)| (m, p))
    }

    pub fn lexical_entries(&self) -> impl Iterator<Item = (&str, &Multiset, f64)> {
        self.lexical
            .iter()
            .flat_map(|(w, opts)| opts.iter().map(move |(m, &p)| (w.as_str(), m, p)))
    }

    pub fn add_rule(&mut self, rule: StructuralRule) {
        self.by_source.entry(rule.source_key()).or_default().push(self.rules.len());
        self.rules.push(rule);
    }

    pub fn rules(&self) -> &[StructuralRule] {
        &self.rules
    }

    /// Indices of the rules whose source shape has the given sorted labels.
    pub fn rules_for(&self, key: &[String]) -> &[usize] {
        self.by_source.get(key).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn source_vocabulary(&self) -> BTreeSet<&str> {
        self.lexical.keys().map(String::as_str).collect()
    }

    pub fn target_vocabulary(&self) -> BTreeSet<&str> {
        self.lexical
            .values()
            .flat_map(|opts| opts.keys())
            .flat_map(|m| m.counts().map(|(w, _)| w))
            .collect()
    }

    pub fn is_empty(&self) -> bool {
        self.lexical.is_empty() && self.rules.is_empty()
    }

    /// Lexical options per source word and rules per source shape each sum
    /// to one within `tolerance`.
    pub fn check_normalized(&self, tolerance: f64) -> Result<()> {
        for (w, opts) in &self.lexical {
            let sum: f64 = opts.values().sum();
            if (sum - 1.0).abs() > tolerance {
                return Err(Error::Unnormalized(format!("lexical({w},*) sums to {sum}")));
            }
        }
        for (key, idx) in &self.by_source {
            let sum: f64 = idx.iter().map(|&i| self.rules[i].probability).sum();
            if (sum - 1.0).abs() > tolerance {
                return Err(Error::Unnormalized(format!(
                    "rules for source shape [{}] sum to {sum}",
                    key.join(",")
                )));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn graph(edges: &[(&str, &str, &str)]) -> UnlabeledGraph {
        UnlabeledGraph::from_named_edges(edges).unwrap()
    }

    #[test]
    fn rule_validation() {
        let s = graph(&[("subj", "x", "y")]);
        let t = graph(&[("subj", "x'", "y'")]);
        assert!(StructuralRule::new("r", s.clone(), t.clone(), vec![0, 1], 1.0).is_ok());
        assert!(StructuralRule::new("r", s.clone(), t.clone(), vec![0], 1.0).is_err());
        assert!(StructuralRule::new("r", s.clone(), t.clone(), vec![0, 2], 1.0).is_err());
        let chain = graph(&[("r", "x", "y"), ("s", "y", "z")]);
        assert!(StructuralRule::new("r", chain, t, vec![0, 1], 1.0).is_err());
        let empty = UnlabeledGraph::new(vec![], vec![]).unwrap();
        assert!(StructuralRule::new("drop", s, empty, vec![], 1.0).is_ok());
    }

    #[test]
    fn canonical_form_ignores_node_names() {
        let a = StructuralRule::new(
            "1",
            graph(&[("subj", "x", "y"), ("obj", "x", "z")]),
            graph(&[("subj", "p", "q"), ("obj", "p", "r")]),
            vec![0, 1, 2],
            1.0,
        )
        .unwrap();
        let b = StructuralRule::new(
            "2",
            graph(&[("obj", "h", "o"), ("subj", "h", "s")]),
            graph(&[("obj", "v", "w"), ("subj", "v", "u")]),
            vec![0, 1, 2],
            1.0,
        )
        .unwrap();
        assert_eq!(a.canonical().texts(), b.canonical().texts());
        assert_eq!(
            a.canonical().texts(),
            (
                "obj(a,b);subj(a,c)".to_string(),
                "obj(a',b');subj(a',c')".to_string(),
                "a'>a,b'>b,c'>c".to_string()
            )
        );
    }

    #[test]
    fn lexical_tables() {
        let mut tm = TransferModel::new();
        tm.set_lexical("sees", ["voit"].into_iter().collect(), 0.6).unwrap();
        tm.set_lexical("sees", ["regarde"].into_iter().collect(), 0.4).unwrap();
        tm.set_lexical("the", Multiset::new(), 1.0).unwrap();
        assert_eq!(tm.lexical("sees", &["voit"].into_iter().collect()), 0.6);
        assert_eq!(tm.lexical("sees", &Multiset::new()), 0.0);
        assert_eq!(tm.lexical_options("sees").count(), 2);
        assert!(tm.check_normalized(1e-9).is_ok());
        assert_eq!(tm.target_vocabulary().into_iter().collect::<Vec<_>>(), vec!["regarde", "voit"]);
    }
}
