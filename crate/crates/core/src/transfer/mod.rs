//! The transfer model `P(C_t | C_s)` over relation trees.

mod derive;
mod model;
mod translate;

pub use derive::{
    applicable_steps, lexical_alignments, lexical_score, log_lexical_score, log_score_aligned, log_score_translation,
    log_structural_score, partition_source, score_translation, Step,
};
pub use model::{StructuralRule, TransferModel};
pub use translate::{translate, translate_all, Translation, Translations};

#[cfg(test)]
mod tests {
    use std::collections::BTreeSet;

    use super::*;
    use crate::graph::{validate_tree, Alignment, Edge, Multiset, Occurrence, RelationTree, UnlabeledGraph};
    use crate::monolingual::DEFAULT_BOUND;

    fn occ(w: &str, i: u32) -> Occurrence {
        Occurrence::new(w, i)
    }

    fn ms(words: &[&str]) -> Multiset {
        words.iter().copied().collect()
    }

    fn svo(v: &str, s: &str, o: &str) -> RelationTree {
        validate_tree(
            [occ(v, 1), occ(s, 2), occ(o, 3)],
            [
                Edge::new("subj", occ(v, 1), occ(s, 2)),
                Edge::new("obj", occ(v, 1), occ(o, 3)),
            ],
        )
        .unwrap()
    }

    fn same_shape_rule(id: &str, labels: &[&str], p: f64) -> StructuralRule {
        let names = ["b", "c", "d"];
        let src: Vec<(&str, &str, &str)> = labels.iter().zip(names).map(|(l, n)| (*l, "a", n)).collect();
        let tnames = ["b'", "c'", "d'"];
        let tgt: Vec<(&str, &str, &str)> = labels.iter().zip(tnames).map(|(l, n)| (*l, "a'", n)).collect();
        let n = labels.len() + 1;
        StructuralRule::new(
            id,
            UnlabeledGraph::from_named_edges(&src).unwrap(),
            UnlabeledGraph::from_named_edges(&tgt).unwrap(),
            (0..n).collect(),
            p,
        )
        .unwrap()
    }

    fn point_mass() -> TransferModel {
        let mut tm = TransferModel::new();
        tm.set_lexical("sees", ms(&["voit"]), 1.0).unwrap();
        tm.set_lexical("john", ms(&["jean"]), 1.0).unwrap();
        tm.set_lexical("mary", ms(&["marie"]), 1.0).unwrap();
        tm.add_rule(same_shape_rule("r1", &["obj", "subj"], 1.0));
        tm
    }

    #[test]
    fn partitions() {
        let t = svo("sees", "john", "mary");
        assert_eq!(partition_source(&t), vec![t.edges().iter().cloned().collect::<Vec<_>>()]);
        let chain = validate_tree(
            [occ("a", 1), occ("b", 2), occ("c", 3)],
            [Edge::new("r", occ("a", 1), occ("b", 2)), Edge::new("s", occ("b", 2), occ("c", 3))],
        )
        .unwrap();
        assert_eq!(
            partition_source(&chain),
            vec![
                vec![Edge::new("r", occ("a", 1), occ("b", 2))],
                vec![Edge::new("s", occ("b", 2), occ("c", 3))]
            ]
        );
        assert!(partition_source(&RelationTree::single(occ("a", 1))).is_empty());
    }

    #[test]
    fn lexical_scores() {
        let tm = point_mass();
        let s = svo("sees", "john", "mary");
        let f: Alignment = [
            (occ("voit", 1), occ("sees", 1)),
            (occ("jean", 2), occ("john", 2)),
            (occ("marie", 3), occ("mary", 3)),
        ]
        .into_iter()
        .collect();
        assert_eq!(lexical_score(&f, s.nodes(), &tm), 1.0);

        let mut tm = TransferModel::new();
        tm.set_lexical("the", Multiset::new(), 0.8).unwrap();
        tm.set_lexical("cat", ms(&["chat"]), 1.0).unwrap();
        let f: Alignment = [(occ("chat", 1), occ("cat", 5))].into_iter().collect();
        let p = lexical_score(&f, [occ("the", 4), occ("cat", 5)].iter(), &tm);
        assert!((p - 0.8).abs() < 1e-15);
    }

    #[test]
    fn single_edge_step() {
        let mut tm = TransferModel::new();
        tm.add_rule(same_shape_rule("r", &["subj"], 1.0));
        let local = [Edge::new("subj", occ("sees", 1), occ("john", 2))];
        let targets: BTreeSet<Occurrence> = [occ("voit", 1), occ("jean", 2)].into_iter().collect();
        let f: Alignment = [(occ("voit", 1), occ("sees", 1)), (occ("jean", 2), occ("john", 2))]
            .into_iter()
            .collect();
        let steps = applicable_steps(&local, &f, &targets, &tm);
        assert_eq!(steps.len(), 1);
        assert_eq!(
            steps[0].edges,
            [Edge::new("subj", occ("voit", 1), occ("jean", 2))].into_iter().collect()
        );

        let f: Alignment = [(occ("voit", 1), occ("sees", 1)), (occ("jean", 2), occ("mary", 3))]
            .into_iter()
            .collect();
        assert!(applicable_steps(&local, &f, &targets, &tm).is_empty());
    }

    #[test]
    fn interchangeable_witnesses_collapse() {
        let mut tm = TransferModel::new();
        tm.add_rule(same_shape_rule("r", &["m", "m"], 1.0));
        let local = [
            Edge::new("m", occ("x", 1), occ("y", 2)),
            Edge::new("m", occ("x", 1), occ("z", 3)),
        ];
        let targets: BTreeSet<Occurrence> = [occ("p", 1), occ("q", 2), occ("r", 3)].into_iter().collect();
        let f: Alignment = [
            (occ("p", 1), occ("x", 1)),
            (occ("q", 2), occ("y", 2)),
            (occ("r", 3), occ("z", 3)),
        ]
        .into_iter()
        .collect();
        // two source isomorphisms, each with one compatible target map,
        // both producing the same edges
        assert_eq!(applicable_steps(&local, &f, &targets, &tm).len(), 1);
    }

    #[test]
    fn point_mass_translation() {
        let tm = point_mass();
        let s = svo("sees", "john", "mary");
        let t = svo("voit", "jean", "marie");
        assert!((score_translation(&t, &s, &tm, DEFAULT_BOUND).unwrap() - 1.0).abs() < 1e-15);
        let odd = validate_tree(
            [occ("voit", 1), occ("jean", 2), occ("marie", 3)],
            [
                Edge::new("subj", occ("voit", 1), occ("jean", 2)),
                Edge::new("mod", occ("voit", 1), occ("marie", 3)),
            ],
        )
        .unwrap();
        assert_eq!(score_translation(&odd, &s, &tm, DEFAULT_BOUND).unwrap(), 0.0);

        let out = translate(&s, &tm, 5, DEFAULT_BOUND).unwrap();
        assert_eq!(out.len(), 1);
        assert_eq!(out[0].tree, t);
        assert!((out[0].probability() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn lexical_choice_splits_mass() {
        let mut tm = point_mass();
        tm.set_lexical("sees", ms(&["voit"]), 0.6).unwrap();
        tm.set_lexical("sees", ms(&["regarde"]), 0.4).unwrap();
        let out = translate(&svo("sees", "john", "mary"), &tm, 5, DEFAULT_BOUND).unwrap();
        assert_eq!(out.len(), 2);
        assert!((out[0].probability() - 0.6).abs() < 1e-15);
        assert_eq!(out[0].tree.root().word, "voit");
        assert!((out[1].probability() - 0.4).abs() < 1e-15);
    }

    #[test]
    fn bounds() {
        let tm = point_mass();
        let nodes: Vec<Occurrence> = (1..=9).map(|i| occ("w", i)).collect();
        let edges: Vec<Edge> = (2..=9).map(|i| Edge::new("r", occ("w", 1), occ("w", i))).collect();
        let big = validate_tree(nodes, edges).unwrap();
        assert!(matches!(translate(&big, &tm, 1, DEFAULT_BOUND), Err(crate::Error::TooLarge { .. })));
    }
}
