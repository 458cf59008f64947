//! The content model `P(C)`: a top head followed by independent node
//! expansions.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::Result;
use crate::graph::{validate_tree, Edge, Occurrence, RelationTree};
use crate::logprob::ln;

use super::MonolingualModel;

/// Number of distinct ordered tuples realizing a multiset of dependent
/// words: `n! / prod(mult(w)!)`.
pub fn combinatoric_k<S: AsRef<str>>(words: &[S]) -> u64 {
    let mut counts: BTreeMap<&str, u64> = BTreeMap::new();
    for w in words {
        *counts.entry(w.as_ref()).or_insert(0) += 1;
    }
    // product of binomials C(seen + c, c), which stays integral throughout
    let mut k: u128 = 1;
    let mut seen: u128 = 0;
    for &c in counts.values() {
        for i in 1..=c as u128 {
            k = k * (seen + i) / i;
        }
        seen += c as u128;
    }
    u64::try_from(k).expect("combinatoric constant overflows u64")
}

/// Groups the dependents of `edges` by relation.
pub(crate) fn dependents_by_relation(edges: &[Edge]) -> BTreeMap<&str, Vec<&str>> {
    let mut groups: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
    for e in edges {
        groups
            .entry(e.relation.as_str())
            .or_default()
            .push(e.dependent.word.as_str());
    }
    groups
}

/// `ln P(E(h) | h)`.
pub fn log_score_expansion(head: &Occurrence, edges: &[Edge], model: &MonolingualModel) -> f64 {
    debug_assert!(edges.iter().all(|e| e.head == *head), "edges must be headed by {head}");
    let h = head.word.as_str();
    let groups = dependents_by_relation(edges);
    let relations: BTreeSet<&str> = model.relations_of(h).chain(groups.keys().copied()).collect();
    let mut total = 0.0;
    for r in relations {
        let deps = groups.get(r).map(Vec::as_slice).unwrap_or(&[]);
        total += ln(model.detail(h, r, deps.len()));
        total += (combinatoric_k(deps) as f64).ln();
        for w in deps {
            total += ln(model.dependency(h, r, w));
        }
        if total == f64::NEG_INFINITY {
            break;
        }
    }
    total
}

/// `P(E(h) | h)`: for every relation of `h`, the detail parameter for the
/// number of dependents times the combinatoric constant times the
/// dependency parameters.
pub fn score_expansion(head: &Occurrence, edges: &[Edge], model: &MonolingualModel) -> f64 {
    log_score_expansion(head, edges, model).exp()
}

/// `ln P(C)`.
pub fn log_score_content(tree: &RelationTree, model: &MonolingualModel) -> f64 {
    let mut total = ln(model.top(&tree.root().word));
    for node in tree.nodes() {
        if total == f64::NEG_INFINITY {
            break;
        }
        total += log_score_expansion(node, tree.dependents(node), model);
    }
    total
}

/// `P(C) = P(Top(root)) * prod over nodes h of P(E_C(h) | h)`. Leaves
/// contribute their zero-dependent detail factors.
pub fn score_content(tree: &RelationTree, model: &MonolingualModel) -> f64 {
    log_score_content(tree, model).exp()
}

/// Visits every tree the generative process can produce when nodes at
/// depth `max_depth` are forced to be leaves.
///
/// Each head picks a count per relation and then a multiset of dependent
/// words; every dependent occurrence expands independently. Occurrences are
/// numbered in breadth-first generation order. Trees that would need a
/// zero-probability choice are skipped.
pub fn for_each_content_tree<F>(model: &MonolingualModel, max_depth: usize, mut visit: F) -> Result<()>
where
    F: FnMut(&RelationTree),
{
    let n_max = model.n_max();
    let roots: Vec<&str> = model
        .top_entries()
        .filter(|(_, p)| *p > 0.0)
        .map(|(w, _)| w)
        .collect();
    for root in roots {
        let mut state = Growth {
            nodes: vec![(Occurrence::new(root, 1), 0)],
            edges: Vec::new(),
        };
        grow(model, n_max, max_depth, 0, &mut state, &mut visit)?;
    }
    Ok(())
}

struct Growth {
    nodes: Vec<(Occurrence, usize)>,
    edges: Vec<Edge>,
}

fn grow<F>(
    model: &MonolingualModel,
    n_max: usize,
    max_depth: usize,
    next: usize,
    state: &mut Growth,
    visit: &mut F,
) -> Result<()>
where
    F: FnMut(&RelationTree),
{
    if next == state.nodes.len() {
        let tree = validate_tree(
            state.nodes.iter().map(|(o, _)| o.clone()),
            state.edges.iter().cloned(),
        )?;
        visit(&tree);
        return Ok(());
    }
    let (head, depth) = state.nodes[next].clone();
    let relations: Vec<&str> = model.relations_of(&head.word).collect();
    if depth == max_depth {
        if relations.iter().all(|r| model.detail(&head.word, r, 0) > 0.0) {
            grow(model, n_max, max_depth, next + 1, state, visit)?;
        }
        return Ok(());
    }
    // per relation: every positive-probability multiset of dependent words
    let mut choices: Vec<Vec<(&str, Vec<&str>)>> = Vec::new();
    for &r in &relations {
        let words: Vec<&str> = model
            .dependency_options(&head.word, r)
            .filter(|(_, p)| *p > 0.0)
            .map(|(w, _)| w)
            .collect();
        let mut options = Vec::new();
        for n in 0..=n_max {
            if model.detail(&head.word, r, n) > 0.0 {
                for combo in multisets(&words, n) {
                    options.push((r, combo));
                }
            }
        }
        choices.push(options);
    }
    let mut picked = Vec::with_capacity(choices.len());
    expand_choices(model, n_max, max_depth, next, &head, depth, &choices, &mut picked, state, visit)
}

#[allow(clippy::too_many_arguments)]
fn expand_choices<'a, F>(
    model: &MonolingualModel,
    n_max: usize,
    max_depth: usize,
    next: usize,
    head: &Occurrence,
    depth: usize,
    choices: &'a [Vec<(&'a str, Vec<&'a str>)>],
    picked: &mut Vec<&'a (&'a str, Vec<&'a str>)>,
    state: &mut Growth,
    visit: &mut F,
) -> Result<()>
where
    F: FnMut(&RelationTree),
{
    if picked.len() == choices.len() {
        let (nodes_before, edges_before) = (state.nodes.len(), state.edges.len());
        for (r, words) in picked.iter() {
            for w in words {
                let occ = Occurrence::new(*w, state.nodes.len() as u32 + 1);
                state.edges.push(Edge::new(*r, head.clone(), occ.clone()));
                state.nodes.push((occ, depth + 1));
            }
        }
        grow(model, n_max, max_depth, next + 1, state, visit)?;
        state.nodes.truncate(nodes_before);
        state.edges.truncate(edges_before);
        return Ok(());
    }
    for option in &choices[picked.len()] {
        picked.push(option);
        expand_choices(model, n_max, max_depth, next, head, depth, choices, picked, state, visit)?;
        picked.pop();
    }
    Ok(())
}

/// Size-`n` multisets over `items`, as non-decreasing index sequences.
fn multisets<'a>(items: &[&'a str], n: usize) -> Vec<Vec<&'a str>> {
    fn go<'a>(items: &[&'a str], start: usize, n: usize, cur: &mut Vec<&'a str>, out: &mut Vec<Vec<&'a str>>) {
        if cur.len() == n {
            out.push(cur.clone());
            return;
        }
        for i in start..items.len() {
            cur.push(items[i]);
            go(items, i, n, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(items, 0, n, &mut Vec::new(), &mut out);
    out
}
