//! Relation trees, multisets, unlabeled rule graphs and label-respecting
//! graph isomorphism.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;
use std::hash::{Hash, Hasher};

use crate::error::{Error, Result};

/// Label standing for the head itself inside a local sequence.
pub const HEAD_MARKER: &str = "e";

/// True for non-empty tokens without whitespace.
pub fn is_token(s: &str) -> bool {
    !s.is_empty() && !s.chars().any(char::is_whitespace)
}

/// A word occurrence: a word plus an index unique within its utterance.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Occurrence {
    pub word: String,
    pub index: u32,
}

impl Occurrence {
    pub fn new(word: impl Into<String>, index: u32) -> Self {
        Occurrence {
            word: word.into(),
            index,
        }
    }

    /// Builds an occurrence, rejecting words that are empty or contain
    /// whitespace.
    pub fn checked(word: impl Into<String>, index: u32) -> Result<Self> {
        let word = word.into();
        if !is_token(&word) {
            return Err(Error::InvalidWord(word));
        }
        Ok(Occurrence { word, index })
    }
}

impl Ord for Occurrence {
    fn cmp(&self, other: &Self) -> Ordering {
        self.index
            .cmp(&other.index)
            .then_with(|| self.word.cmp(&other.word))
    }
}

impl PartialOrd for Occurrence {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Occurrence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.word, self.index)
    }
}

/// A labeled relation edge `relation(head, dependent)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Edge {
    pub relation: String,
    pub head: Occurrence,
    pub dependent: Occurrence,
}

impl Edge {
    pub fn new(relation: impl Into<String>, head: Occurrence, dependent: Occurrence) -> Self {
        Edge {
            relation: relation.into(),
            head,
            dependent,
        }
    }
}

impl Ord for Edge {
    fn cmp(&self, other: &Self) -> Ordering {
        self.head
            .cmp(&other.head)
            .then_with(|| self.relation.cmp(&other.relation))
            .then_with(|| self.dependent.cmp(&other.dependent))
    }
}

impl PartialOrd for Edge {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({},{})", self.relation, self.head, self.dependent)
    }
}

/// A directed labeled tree of word occurrences with unordered siblings.
///
/// Equality, hashing and ordering look only at the root and the edge set, so
/// the order in which siblings were supplied never matters.
#[derive(Debug, Clone)]
pub struct RelationTree {
    root: Occurrence,
    edges: BTreeSet<Edge>,
    nodes: BTreeSet<Occurrence>,
    children: BTreeMap<Occurrence, Vec<Edge>>,
    parents: BTreeMap<Occurrence, Edge>,
}

impl PartialEq for RelationTree {
    fn eq(&self, other: &Self) -> bool {
        self.root == other.root && self.edges == other.edges
    }
}

impl Eq for RelationTree {}

impl Hash for RelationTree {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.root.hash(state);
        self.edges.hash(state);
    }
}

impl Ord for RelationTree {
    fn cmp(&self, other: &Self) -> Ordering {
        self.root
            .cmp(&other.root)
            .then_with(|| self.edges.cmp(&other.edges))
    }
}

impl PartialOrd for RelationTree {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Checks that `edges` form a single rooted tree over `nodes` and returns it.
pub fn validate_tree<N, E>(nodes: N, edges: E) -> Result<RelationTree>
where
    N: IntoIterator<Item = Occurrence>,
    E: IntoIterator<Item = Edge>,
{
    let mut by_index: BTreeMap<u32, Occurrence> = BTreeMap::new();
    for node in nodes {
        if !is_token(&node.word) {
            return Err(Error::InvalidWord(node.word));
        }
        match by_index.get(&node.index) {
            Some(existing) if *existing != node => return Err(Error::DuplicateIndex(node.index)),
            Some(_) => {}
            None => {
                by_index.insert(node.index, node);
            }
        }
    }
    if by_index.is_empty() {
        return Err(Error::EmptyTree);
    }
    let nodes: BTreeSet<Occurrence> = by_index.into_values().collect();

    let edges: BTreeSet<Edge> = edges.into_iter().collect();
    let mut parents: BTreeMap<Occurrence, Edge> = BTreeMap::new();
    let mut children: BTreeMap<Occurrence, Vec<Edge>> = BTreeMap::new();
    for edge in &edges {
        if !is_token(&edge.relation) {
            return Err(Error::InvalidLabel(edge.relation.clone()));
        }
        if edge.relation == HEAD_MARKER {
            return Err(Error::ReservedLabel(edge.to_string()));
        }
        if !nodes.contains(&edge.head) || !nodes.contains(&edge.dependent) {
            return Err(Error::UnknownNode(edge.to_string()));
        }
        if edge.head == edge.dependent {
            return Err(Error::Cycle(vec![edge.head.clone()]));
        }
        if parents.contains_key(&edge.dependent) {
            return Err(Error::MultipleHeads(edge.dependent.clone()));
        }
        parents.insert(edge.dependent.clone(), edge.clone());
        children
            .entry(edge.head.clone())
            .or_default()
            .push(edge.clone());
    }

    let roots: Vec<&Occurrence> = nodes.iter().filter(|n| !parents.contains_key(*n)).collect();
    if roots.is_empty() {
        let start = nodes.iter().next().expect("non-empty node set");
        return Err(Error::Cycle(find_cycle(start, &parents)));
    }
    if roots.len() > 1 {
        let proper: Vec<&&Occurrence> = roots.iter().filter(|r| children.contains_key(**r)).collect();
        if proper.len() == 1 {
            let isolated = roots
                .iter()
                .find(|r| !children.contains_key(**r))
                .expect("some root is isolated");
            return Err(Error::DisconnectedNode((*isolated).clone()));
        }
        return Err(Error::MultipleRoots(roots.into_iter().cloned().collect()));
    }
    let root = roots[0].clone();

    let mut seen = BTreeSet::new();
    let mut queue = VecDeque::from([&root]);
    while let Some(node) = queue.pop_front() {
        seen.insert(node.clone());
        for edge in children.get(node).into_iter().flatten() {
            queue.push_back(&edge.dependent);
        }
    }
    if let Some(stray) = nodes.iter().find(|n| !seen.contains(*n)) {
        // every node has at most one head, so anything unreachable from the
        // root hangs off a cycle
        return Err(Error::Cycle(find_cycle(stray, &parents)));
    }

    Ok(RelationTree {
        root,
        edges,
        nodes,
        children,
        parents,
    })
}

fn find_cycle(start: &Occurrence, parents: &BTreeMap<Occurrence, Edge>) -> Vec<Occurrence> {
    let mut path: Vec<Occurrence> = Vec::new();
    let mut current = start.clone();
    loop {
        if let Some(pos) = path.iter().position(|n| *n == current) {
            let mut cycle = path.split_off(pos);
            cycle.sort();
            return cycle;
        }
        path.push(current.clone());
        match parents.get(&current) {
            Some(edge) => current = edge.head.clone(),
            None => return path,
        }
    }
}

impl RelationTree {
    /// A tree consisting of a single node.
    pub fn single(root: Occurrence) -> Self {
        RelationTree {
            nodes: BTreeSet::from([root.clone()]),
            root,
            edges: BTreeSet::new(),
            children: BTreeMap::new(),
            parents: BTreeMap::new(),
        }
    }

    pub fn root(&self) -> &Occurrence {
        &self.root
    }

    pub fn edges(&self) -> &BTreeSet<Edge> {
        &self.edges
    }

    pub fn nodes(&self) -> &BTreeSet<Occurrence> {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn contains(&self, node: &Occurrence) -> bool {
        self.nodes.contains(node)
    }

    /// The edges headed by `head`; empty for leaves.
    pub fn local_edges(&self, head: &Occurrence) -> Result<&[Edge]> {
        if !self.nodes.contains(head) {
            return Err(Error::NodeNotInTree(head.clone()));
        }
        Ok(self.dependents(head))
    }

    /// Edges headed by `head` without the membership check.
    pub(crate) fn dependents(&self, head: &Occurrence) -> &[Edge] {
        self.children.get(head).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn parent_edge(&self, node: &Occurrence) -> Option<&Edge> {
        self.parents.get(node)
    }

    /// Nodes that have at least one dependent, in index order.
    pub fn internal_nodes(&self) -> impl Iterator<Item = &Occurrence> {
        self.children.keys()
    }

    /// Nodes of the subtree rooted at `node` (including `node`).
    pub fn subtree(&self, node: &Occurrence) -> Vec<&Occurrence> {
        let mut out = vec![];
        let mut stack = vec![node];
        while let Some(n) = stack.pop() {
            if let Some(own) = self.nodes.get(n) {
                out.push(own);
            }
            for edge in self.dependents(n) {
                stack.push(&edge.dependent);
            }
        }
        out.sort();
        out
    }

    /// Number of edges on the longest root-to-leaf path.
    pub fn depth(&self) -> usize {
        fn go(tree: &RelationTree, node: &Occurrence) -> usize {
            tree.dependents(node)
                .iter()
                .map(|e| 1 + go(tree, &e.dependent))
                .max()
                .unwrap_or(0)
        }
        go(self, &self.root)
    }

    /// A key that identifies the tree up to renumbering of occurrence
    /// indices: two trees share a key iff they are isomorphic as word- and
    /// label-respecting unordered trees.
    pub fn shape_key(&self) -> String {
        self.subtree_key(&self.root)
    }

    fn subtree_key(&self, node: &Occurrence) -> String {
        let mut parts: Vec<String> = self
            .dependents(node)
            .iter()
            .map(|e| format!("{}:{}", e.relation, self.subtree_key(&e.dependent)))
            .collect();
        parts.sort();
        format!("{}({})", node.word, parts.join(" "))
    }

    /// Renumbers occurrences 1..n in a preorder walk whose children are
    /// sorted by (relation, subtree key). Isomorphic trees map to equal
    /// canonical trees.
    pub fn canonical(&self) -> RelationTree {
        let mut renumber: BTreeMap<Occurrence, Occurrence> = BTreeMap::new();
        let mut next = 1u32;
        let mut stack = vec![self.root.clone()];
        while let Some(node) = stack.pop() {
            renumber.insert(node.clone(), Occurrence::new(node.word.clone(), next));
            next += 1;
            let mut kids: Vec<(String, String, Occurrence)> = self
                .dependents(&node)
                .iter()
                .map(|e| {
                    (
                        e.relation.clone(),
                        self.subtree_key(&e.dependent),
                        e.dependent.clone(),
                    )
                })
                .collect();
            kids.sort();
            for (_, _, child) in kids.into_iter().rev() {
                stack.push(child);
            }
        }
        self.relabel(&renumber)
    }

    /// Applies a node renaming. The map must be injective and cover every
    /// node.
    pub fn relabel(&self, map: &BTreeMap<Occurrence, Occurrence>) -> RelationTree {
        let nodes = self.nodes.iter().map(|n| map[n].clone());
        let edges = self
            .edges
            .iter()
            .map(|e| Edge::new(e.relation.clone(), map[&e.head].clone(), map[&e.dependent].clone()));
        validate_tree(nodes, edges).expect("relabeling preserves tree shape")
    }

    pub fn is_isomorphic(&self, other: &RelationTree) -> bool {
        self.len() == other.len() && self.shape_key() == other.shape_key()
    }

    /// Deterministic text form: root, then the sorted edge list.
    pub fn serialize(&self) -> String {
        let edges: Vec<String> = self.edges.iter().map(ToString::to_string).collect();
        format!("{}|{}", self.root, edges.join(" "))
    }
}

impl fmt::Display for RelationTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.serialize())
    }
}

/// A multiset of strings: relation labels for local sequences, target words
/// for lexical transfer parameters.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Multiset(BTreeMap<String, usize>);

pub type LabelMultiset = Multiset;

impl Multiset {
    pub fn new() -> Self {
        Multiset::default()
    }

    pub fn insert(&mut self, item: impl Into<String>) {
        *self.0.entry(item.into()).or_insert(0) += 1;
    }

    pub fn count(&self, item: &str) -> usize {
        self.0.get(item).copied().unwrap_or(0)
    }

    /// Total number of elements, counting repetitions.
    pub fn len(&self) -> usize {
        self.0.values().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// (item, multiplicity) pairs in sorted order.
    pub fn counts(&self) -> impl Iterator<Item = (&str, usize)> {
        self.0.iter().map(|(k, &v)| (k.as_str(), v))
    }

    /// Elements in sorted order, repeated by multiplicity.
    pub fn items(&self) -> Vec<&str> {
        self.0
            .iter()
            .flat_map(|(k, &v)| std::iter::repeat_n(k.as_str(), v))
            .collect()
    }

    /// Every distinct ordering of the elements, in lexicographic order.
    pub fn distinct_permutations(&self) -> Vec<Vec<String>> {
        fn go(
            remaining: &mut BTreeMap<String, usize>,
            left: usize,
            prefix: &mut Vec<String>,
            out: &mut Vec<Vec<String>>,
        ) {
            if left == 0 {
                out.push(prefix.clone());
                return;
            }
            let keys: Vec<String> = remaining
                .iter()
                .filter(|(_, &c)| c > 0)
                .map(|(k, _)| k.clone())
                .collect();
            for key in keys {
                *remaining.get_mut(&key).unwrap() -= 1;
                prefix.push(key.clone());
                go(remaining, left - 1, prefix, out);
                prefix.pop();
                *remaining.get_mut(&key).unwrap() += 1;
            }
        }
        let mut out = Vec::new();
        let mut remaining = self.0.clone();
        go(&mut remaining, self.len(), &mut Vec::new(), &mut out);
        out
    }
}

impl<S: Into<String>> FromIterator<S> for Multiset {
    fn from_iter<I: IntoIterator<Item = S>>(iter: I) -> Self {
        let mut m = Multiset::new();
        for item in iter {
            m.insert(item);
        }
        m
    }
}

impl fmt::Display for Multiset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.items().join(","))
    }
}

/// Label multiset of a local sequence; the sequence must hold exactly one
/// head marker.
pub fn sequence_multiset<S: AsRef<str>>(sequence: &[S]) -> Result<LabelMultiset> {
    let markers = sequence.iter().filter(|s| s.as_ref() == HEAD_MARKER).count();
    match markers {
        0 => Err(Error::MissingHeadMarker),
        1 => Ok(sequence.iter().map(|s| s.as_ref()).collect()),
        _ => Err(Error::DuplicateHeadMarker),
    }
}

/// Edge of an [`UnlabeledGraph`], by node position.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ShapeEdge {
    pub relation: String,
    pub head: usize,
    pub dependent: usize,
}

/// A graph whose nodes are abstract names rather than words; edges keep
/// their relation labels.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct UnlabeledGraph {
    nodes: Vec<String>,
    edges: BTreeSet<ShapeEdge>,
}

impl UnlabeledGraph {
    pub fn new<I>(nodes: Vec<String>, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = ShapeEdge>,
    {
        let distinct: BTreeSet<&String> = nodes.iter().collect();
        if distinct.len() != nodes.len() {
            return Err(Error::InvalidRule(format!("repeated node name in {nodes:?}")));
        }
        let edges: BTreeSet<ShapeEdge> = edges.into_iter().collect();
        for e in &edges {
            if e.head >= nodes.len() || e.dependent >= nodes.len() {
                return Err(Error::InvalidRule(format!("edge {e:?} refers to a missing node")));
            }
            if !is_token(&e.relation) || e.relation == HEAD_MARKER {
                return Err(Error::InvalidLabel(e.relation.clone()));
            }
        }
        Ok(UnlabeledGraph { nodes, edges })
    }

    /// Builds a graph from `(relation, head, dependent)` name triples. Node
    /// order is order of first appearance.
    pub fn from_named_edges<S: AsRef<str>>(edges: &[(S, S, S)]) -> Result<Self> {
        let mut nodes: Vec<String> = Vec::new();
        let index_of = |name: &str, nodes: &mut Vec<String>| -> usize {
            match nodes.iter().position(|n| n == name) {
                Some(i) => i,
                None => {
                    nodes.push(name.to_string());
                    nodes.len() - 1
                }
            }
        };
        let mut shape_edges = Vec::new();
        for (rel, head, dep) in edges {
            let h = index_of(head.as_ref(), &mut nodes);
            let d = index_of(dep.as_ref(), &mut nodes);
            shape_edges.push(ShapeEdge {
                relation: rel.as_ref().to_string(),
                head: h,
                dependent: d,
            });
        }
        UnlabeledGraph::new(nodes, shape_edges)
    }

    pub fn nodes(&self) -> &[String] {
        &self.nodes
    }

    pub fn edges(&self) -> &BTreeSet<ShapeEdge> {
        &self.edges
    }

    pub fn node_index(&self, name: &str) -> Option<usize> {
        self.nodes.iter().position(|n| n == name)
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    /// If the graph is a local tree (every edge leaves one root node, each
    /// dependent appears once, and every node is on an edge), the root.
    pub fn local_tree_root(&self) -> Option<usize> {
        let first = self.edges.iter().next()?;
        let root = first.head;
        let mut deps = BTreeSet::new();
        for e in &self.edges {
            if e.head != root || e.dependent == root || !deps.insert(e.dependent) {
                return None;
            }
        }
        (deps.len() + 1 == self.nodes.len()).then_some(root)
    }

    /// Sorted relation labels, the isomorphism-invariant key of a local tree.
    pub fn label_key(&self) -> Vec<String> {
        let mut labels: Vec<String> = self.edges.iter().map(|e| e.relation.clone()).collect();
        labels.sort();
        labels
    }
}

/// Every bijection from the nodes of `shape` onto the endpoints of `edges`
/// such that `r(a,b)` is in `shape` iff `r(g(a),g(b))` is in `edges`.
///
/// Each result lists images parallel to `shape.nodes()`. Results come in
/// lexicographic order of the image occurrences.
pub fn isomorphisms<'a, I>(shape: &UnlabeledGraph, edges: I) -> Vec<Vec<Occurrence>>
where
    I: IntoIterator<Item = &'a Edge>,
{
    let edges: BTreeSet<&Edge> = edges.into_iter().collect();
    let targets: Vec<&Occurrence> = edges
        .iter()
        .flat_map(|e| [&e.head, &e.dependent])
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    if targets.len() != shape.node_count() || edges.len() != shape.edges.len() {
        return Vec::new();
    }
    let position = |o: &Occurrence| targets.iter().position(|t| *t == o).expect("endpoint");
    let target_edges: BTreeSet<(&str, usize, usize)> = edges
        .iter()
        .map(|e| (e.relation.as_str(), position(&e.head), position(&e.dependent)))
        .collect();

    let n = shape.node_count();
    let mut incident: Vec<Vec<&ShapeEdge>> = vec![Vec::new(); n];
    for e in &shape.edges {
        // checked once the later of the two endpoints is assigned
        incident[e.head.max(e.dependent)].push(e);
    }

    let mut out = Vec::new();
    let mut image = vec![usize::MAX; n];
    let mut used = vec![false; n];
    fn search(
        node: usize,
        incident: &[Vec<&ShapeEdge>],
        target_edges: &BTreeSet<(&str, usize, usize)>,
        image: &mut Vec<usize>,
        used: &mut Vec<bool>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if node == image.len() {
            out.push(image.clone());
            return;
        }
        for t in 0..used.len() {
            if used[t] {
                continue;
            }
            image[node] = t;
            let ok = incident[node].iter().all(|e| {
                target_edges.contains(&(e.relation.as_str(), image[e.head], image[e.dependent]))
            });
            if ok {
                used[t] = true;
                search(node + 1, incident, target_edges, image, used, out);
                used[t] = false;
            }
        }
        image[node] = usize::MAX;
    }
    search(0, &incident, &target_edges, &mut image, &mut used, &mut out);
    // injective and every shape edge lands on a target edge; equal edge
    // counts make the correspondence two-way
    out.into_iter()
        .map(|img| img.into_iter().map(|t| targets[t].clone()).collect())
        .collect()
}

/// A total function from target occurrences to source occurrences.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Alignment {
    map: BTreeMap<Occurrence, Occurrence>,
}

impl Alignment {
    pub fn new(map: BTreeMap<Occurrence, Occurrence>) -> Self {
        Alignment { map }
    }

    pub fn get(&self, target: &Occurrence) -> Option<&Occurrence> {
        self.map.get(target)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Occurrence, &Occurrence)> {
        self.map.iter()
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    /// Target occurrences aligned to `source`, in index order.
    pub fn preimage(&self, source: &Occurrence) -> Vec<&Occurrence> {
        self.map
            .iter()
            .filter(|(_, s)| *s == source)
            .map(|(t, _)| t)
            .collect()
    }

    /// The set-valued inverse, with an entry for every source occurrence
    /// that has a non-empty preimage.
    pub fn inverse(&self) -> BTreeMap<&Occurrence, Vec<&Occurrence>> {
        let mut inv: BTreeMap<&Occurrence, Vec<&Occurrence>> = BTreeMap::new();
        for (t, s) in &self.map {
            inv.entry(s).or_default().push(t);
        }
        inv
    }

    /// Checks totality over `targets` and that every image lies in
    /// `sources`.
    pub fn check(&self, targets: &BTreeSet<Occurrence>, sources: &BTreeSet<Occurrence>) -> Result<()> {
        for t in targets {
            match self.map.get(t) {
                None => return Err(Error::InvalidAlignment(format!("{t} is not aligned"))),
                Some(s) if !sources.contains(s) => {
                    return Err(Error::InvalidAlignment(format!("{t} is aligned to unknown {s}")))
                }
                Some(_) => {}
            }
        }
        if let Some(extra) = self.map.keys().find(|t| !targets.contains(*t)) {
            return Err(Error::InvalidAlignment(format!("{extra} is not a target node")));
        }
        Ok(())
    }
}

impl FromIterator<(Occurrence, Occurrence)> for Alignment {
    fn from_iter<I: IntoIterator<Item = (Occurrence, Occurrence)>>(iter: I) -> Self {
        Alignment {
            map: iter.into_iter().collect(),
        }
    }
}

impl fmt::Display for Alignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.map.iter().map(|(t, s)| format!("{t}>{s}")).collect();
        f.write_str(&parts.join(","))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn occ(w: &str, i: u32) -> Occurrence {
        Occurrence::new(w, i)
    }

    fn edge(r: &str, h: (&str, u32), d: (&str, u32)) -> Edge {
        Edge::new(r, occ(h.0, h.1), occ(d.0, d.1))
    }

    fn sees_tree() -> RelationTree {
        validate_tree(
            [occ("sees", 1), occ("john", 2), occ("mary", 3)],
            [
                edge("subj", ("sees", 1), ("john", 2)),
                edge("obj", ("sees", 1), ("mary", 3)),
            ],
        )
        .unwrap()
    }

    #[test]
    fn smallest_tree() {
        let t = validate_tree(
            [occ("sees", 1), occ("john", 2)],
            [edge("subj", ("sees", 1), ("john", 2))],
        )
        .unwrap();
        assert_eq!(t.root(), &occ("sees", 1));
        assert_eq!(t.len(), 2);
    }

    #[test]
    fn single_node() {
        let t = validate_tree([occ("a", 1)], []).unwrap();
        assert_eq!(t.root(), &occ("a", 1));
        assert!(t.edges().is_empty());
        assert_eq!(t, RelationTree::single(occ("a", 1)));
    }

    #[test]
    fn two_cycle() {
        let err = validate_tree(
            [occ("a", 1), occ("b", 2)],
            [edge("r", ("a", 1), ("b", 2)), edge("r", ("b", 2), ("a", 1))],
        )
        .unwrap_err();
        assert_eq!(err, Error::Cycle(vec![occ("a", 1), occ("b", 2)]));
    }

    #[test]
    fn cycle_beside_a_root() {
        let err = validate_tree(
            [occ("a", 1), occ("b", 2), occ("c", 3), occ("d", 4)],
            [
                edge("r", ("a", 1), ("b", 2)),
                edge("r", ("c", 3), ("d", 4)),
                edge("r", ("d", 4), ("c", 3)),
            ],
        )
        .unwrap_err();
        assert_eq!(err, Error::Cycle(vec![occ("c", 3), occ("d", 4)]));
    }

    #[test]
    fn structural_errors_name_the_offender() {
        let multi_head = validate_tree(
            [occ("a", 1), occ("b", 2), occ("c", 3)],
            [edge("r", ("a", 1), ("c", 3)), edge("s", ("b", 2), ("c", 3))],
        )
        .unwrap_err();
        assert_eq!(multi_head, Error::MultipleHeads(occ("c", 3)));

        let disconnected = validate_tree(
            [occ("a", 1), occ("b", 2), occ("c", 3)],
            [edge("r", ("a", 1), ("b", 2))],
        )
        .unwrap_err();
        assert_eq!(disconnected, Error::DisconnectedNode(occ("c", 3)));

        let roots = validate_tree(
            [occ("a", 1), occ("b", 2), occ("c", 3), occ("d", 4)],
            [edge("r", ("a", 1), ("b", 2)), edge("r", ("c", 3), ("d", 4))],
        )
        .unwrap_err();
        assert_eq!(roots, Error::MultipleRoots(vec![occ("a", 1), occ("c", 3)]));

        let reserved = validate_tree(
            [occ("a", 1), occ("b", 2)],
            [edge("e", ("a", 1), ("b", 2))],
        )
        .unwrap_err();
        assert!(matches!(reserved, Error::ReservedLabel(_)));

        let dup = validate_tree([occ("a", 1), occ("b", 1)], []).unwrap_err();
        assert_eq!(dup, Error::DuplicateIndex(1));

        assert_eq!(validate_tree([], []).unwrap_err(), Error::EmptyTree);
        assert!(matches!(
            validate_tree([occ("a b", 1)], []).unwrap_err(),
            Error::InvalidWord(_)
        ));
    }

    #[test]
    fn local_edges_of_head_leaf_and_stranger() {
        let t = sees_tree();
        assert_eq!(t.local_edges(&occ("sees", 1)).unwrap().len(), 2);
        assert!(t.local_edges(&occ("john", 2)).unwrap().is_empty());
        assert_eq!(
            t.local_edges(&occ("eats", 9)).unwrap_err(),
            Error::NodeNotInTree(occ("eats", 9))
        );
    }

    #[test]
    fn sibling_storage_order_is_irrelevant() {
        let a = sees_tree();
        let b = validate_tree(
            [occ("mary", 3), occ("john", 2), occ("sees", 1)],
            [
                edge("obj", ("sees", 1), ("mary", 3)),
                edge("subj", ("sees", 1), ("john", 2)),
            ],
        )
        .unwrap();
        assert_eq!(a, b);
        assert_eq!(a.serialize(), b.serialize());
    }

    #[test]
    fn canonical_forms_identify_isomorphic_trees() {
        let a = sees_tree();
        let b = validate_tree(
            [occ("sees", 7), occ("john", 3), occ("mary", 5)],
            [
                edge("subj", ("sees", 7), ("john", 3)),
                edge("obj", ("sees", 7), ("mary", 5)),
            ],
        )
        .unwrap();
        assert!(a.is_isomorphic(&b));
        assert_eq!(a.canonical(), b.canonical());
        let c = validate_tree(
            [occ("sees", 1), occ("john", 2), occ("mary", 3)],
            [
                edge("obj", ("sees", 1), ("john", 2)),
                edge("subj", ("sees", 1), ("mary", 3)),
            ],
        )
        .unwrap();
        assert!(!a.is_isomorphic(&c));
    }

    #[test]
    fn multisets_from_sequences() {
        let m = sequence_multiset(&["subj", "e", "obj"]).unwrap();
        assert_eq!(m.count("subj"), 1);
        assert_eq!(m.count("e"), 1);
        assert_eq!(m.count("obj"), 1);
        assert_eq!(m.len(), 3);
        assert_eq!(sequence_multiset(&["e"]).unwrap().len(), 1);
        assert_eq!(
            sequence_multiset(&["subj", "obj"]).unwrap_err(),
            Error::MissingHeadMarker
        );
        assert_eq!(
            sequence_multiset(&["e", "subj", "e"]).unwrap_err(),
            Error::DuplicateHeadMarker
        );
    }

    #[test]
    fn permutations_share_a_multiset() {
        let base = sequence_multiset(&["subj", "e", "obj"]).unwrap();
        let perms = base.distinct_permutations();
        assert_eq!(perms.len(), 6);
        for p in perms {
            assert_eq!(sequence_multiset(&p).unwrap(), base);
        }
        let dup: Multiset = ["mod", "mod", "e"].into_iter().collect();
        assert_eq!(dup.distinct_permutations().len(), 3);
    }

    #[test]
    fn isomorphism_single_edge() {
        let g = UnlabeledGraph::from_named_edges(&[("subj", "x", "y")]).unwrap();
        let h = [edge("subj", ("sees", 1), ("john", 2))];
        assert_eq!(
            isomorphisms(&g, &h),
            vec![vec![occ("sees", 1), occ("john", 2)]]
        );
        let mismatch = [edge("obj", ("sees", 1), ("mary", 3))];
        assert!(isomorphisms(&g, &mismatch).is_empty());
    }

    #[test]
    fn isomorphism_with_interchangeable_dependents() {
        let g = UnlabeledGraph::from_named_edges(&[("r", "x", "y"), ("r", "x", "z")]).unwrap();
        let h = [edge("r", ("a", 1), ("b", 2)), edge("r", ("a", 1), ("c", 3))];
        let isos = isomorphisms(&g, &h);
        assert_eq!(
            isos,
            vec![
                vec![occ("a", 1), occ("b", 2), occ("c", 3)],
                vec![occ("a", 1), occ("c", 3), occ("b", 2)],
            ]
        );
    }

    #[test]
    fn local_tree_detection() {
        let star = UnlabeledGraph::from_named_edges(&[("r", "a", "b"), ("s", "a", "c")]).unwrap();
        assert_eq!(star.local_tree_root(), Some(0));
        assert_eq!(star.label_key(), vec!["r".to_string(), "s".to_string()]);
        let chain = UnlabeledGraph::from_named_edges(&[("r", "a", "b"), ("s", "b", "c")]).unwrap();
        assert_eq!(chain.local_tree_root(), None);
    }

    #[test]
    fn alignment_inverse_and_checks() {
        let f: Alignment = [
            (occ("pomme", 1), occ("potato", 1)),
            (occ("de_terre", 2), occ("potato", 1)),
        ]
        .into_iter()
        .collect();
        let inv = f.inverse();
        assert_eq!(inv[&occ("potato", 1)].len(), 2);
        let targets = BTreeSet::from([occ("pomme", 1), occ("de_terre", 2)]);
        let sources = BTreeSet::from([occ("potato", 1), occ("the", 2)]);
        assert!(f.check(&targets, &sources).is_ok());
        assert!(f.preimage(&occ("the", 2)).is_empty());
        let partial = BTreeSet::from([occ("pomme", 1), occ("de_terre", 2), occ("x", 3)]);
        assert!(f.check(&partial, &sources).is_err());
    }
}
