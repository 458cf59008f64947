use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::graph::{is_token, sequence_multiset, Multiset, HEAD_MARKER};

/// Tolerance used when checking that parameter tables sum to one.
pub const NORMALIZATION_TOLERANCE: f64 = 1e-9;

fn check_prob(what: impl FnOnce() -> String, value: f64) -> Result<()> {
    if value.is_finite() && (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(Error::InvalidProbability {
            what: what(),
            value,
        })
    }
}

fn check_token(s: &str) -> Result<()> {
    if is_token(s) {
        Ok(())
    } else {
        Err(Error::InvalidWord(s.to_string()))
    }
}

fn check_label(s: &str) -> Result<()> {
    if !is_token(s) {
        Err(Error::InvalidLabel(s.to_string()))
    } else if s == HEAD_MARKER {
        Err(Error::ReservedLabel(s.to_string()))
    } else {
        Ok(())
    }
}

/// A head-lexicalized monolingual model: top-head, dependency, detail and
/// sequencing parameter tables.
///
/// Absent dependency and sequencing entries have probability zero. A
/// relation absent from a head's detail table means the head never takes
/// that relation: `detail(h, r, 0) = 1`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct MonolingualModel {
    top: BTreeMap<String, f64>,
    dependency: BTreeMap<String, BTreeMap<String, BTreeMap<String, f64>>>,
    detail: BTreeMap<String, BTreeMap<String, BTreeMap<usize, f64>>>,
    sequencing: BTreeMap<Vec<String>, f64>,
}

impl MonolingualModel {
    pub fn new() -> Self {
        MonolingualModel::default()
    }

    pub fn set_top(&mut self, word: &str, p: f64) -> Result<()> {
        check_token(word)?;
        check_prob(|| format!("top({word})"), p)?;
        self.top.insert(word.to_string(), p);
        Ok(())
    }

    pub fn set_dependency(&mut self, head: &str, relation: &str, word: &str, p: f64) -> Result<()> {
        check_token(head)?;
        check_label(relation)?;
        check_token(word)?;
        check_prob(|| format!("dependency({head},{relation},{word})"), p)?;
        self.dependency
            .entry(head.to_string())
            .or_default()
            .entry(relation.to_string())
            .or_default()
            .insert(word.to_string(), p);
        Ok(())
    }

    pub fn set_detail(&mut self, head: &str, relation: &str, n: usize, p: f64) -> Result<()> {
        check_token(head)?;
        check_label(relation)?;
        check_prob(|| format!("detail({head},{relation},{n})"), p)?;
        self.detail
            .entry(head.to_string())
            .or_default()
            .entry(relation.to_string())
            .or_default()
            .insert(n, p);
        Ok(())
    }

    pub fn set_sequencing<S: AsRef<str>>(&mut self, sequence: &[S], p: f64) -> Result<()> {
        sequence_multiset(sequence)?;
        for label in sequence {
            let label = label.as_ref();
            if label != HEAD_MARKER {
                check_label(label)?;
            }
        }
        let key: Vec<String> = sequence.iter().map(|s| s.as_ref().to_string()).collect();
        check_prob(|| format!("sequencing({})", key.join(",")), p)?;
        self.sequencing.insert(key, p);
        Ok(())
    }

    /// `P(Top(word))`.
    pub fn top(&self, word: &str) -> f64 {
        self.top.get(word).copied().unwrap_or(0.0)
    }

    /// `P(r(head, word) | head, r)`.
    pub fn dependency(&self, head: &str, relation: &str, word: &str) -> f64 {
        self.dependency
            .get(head)
            .and_then(|rels| rels.get(relation))
            .and_then(|words| words.get(word))
            .copied()
            .unwrap_or(0.0)
    }

    /// Candidate `relation`-dependents of `head` with their probabilities.
    pub fn dependency_options<'a>(
        &'a self,
        head: &str,
        relation: &str,
    ) -> impl Iterator<Item = (&'a str, f64)> + 'a {
        self.dependency
            .get(head)
            .and_then(|rels| rels.get(relation))
            .into_iter()
            .flatten()
            .map(|(w, &p)| (w.as_str(), p))
    }

    /// Relations `r` with `dependency(head, r, word) > 0`.
    pub fn relations_between<'a>(&'a self, head: &str, word: &'a str) -> impl Iterator<Item = &'a str> + 'a {
        self.dependency
            .get(head)
            .into_iter()
            .flatten()
            .filter(move |(_, words)| words.get(word).is_some_and(|&p| p > 0.0))
            .map(|(r, _)| r.as_str())
    }

    /// `P(N(relation, n) | head)`.
    pub fn detail(&self, head: &str, relation: &str, n: usize) -> f64 {
        match self.detail.get(head).and_then(|rels| rels.get(relation)) {
            Some(counts) => counts.get(&n).copied().unwrap_or(0.0),
            None if n == 0 => 1.0,
            None => 0.0,
        }
    }

    /// Relations that appear in `head`'s detail table.
    pub fn relations_of<'a>(&'a self, head: &str) -> impl Iterator<Item = &'a str> + 'a {
        self.detail
            .get(head)
            .into_iter()
            .flat_map(|rels| rels.keys())
            .map(String::as_str)
    }

    /// `P(s | M(s))`.
    pub fn sequencing<S: AsRef<str>>(&self, sequence: &[S]) -> f64 {
        let key: Vec<String> = sequence.iter().map(|s| s.as_ref().to_string()).collect();
        self.sequencing.get(&key).copied().unwrap_or(0.0)
    }

    /// Largest dependent count with a detail entry.
    pub fn n_max(&self) -> usize {
        self.detail
            .values()
            .flat_map(|rels| rels.values())
            .flat_map(|counts| counts.keys())
            .copied()
            .max()
            .unwrap_or(0)
    }

    /// Every word mentioned by any table.
    pub fn vocabulary(&self) -> BTreeSet<&str> {
        let mut words: BTreeSet<&str> = self.top.keys().map(String::as_str).collect();
        for (head, rels) in &self.dependency {
            words.insert(head);
            for deps in rels.values() {
                words.extend(deps.keys().map(String::as_str));
            }
        }
        words.extend(self.detail.keys().map(String::as_str));
        words
    }

    /// Every relation label mentioned by any table.
    pub fn alphabet(&self) -> BTreeSet<&str> {
        let mut labels: BTreeSet<&str> = BTreeSet::new();
        for rels in self.dependency.values() {
            labels.extend(rels.keys().map(String::as_str));
        }
        for rels in self.detail.values() {
            labels.extend(rels.keys().map(String::as_str));
        }
        for seq in self.sequencing.keys() {
            labels.extend(seq.iter().map(String::as_str).filter(|l| *l != HEAD_MARKER));
        }
        labels
    }

    pub fn top_entries(&self) -> impl Iterator<Item = (&str, f64)> {
        self.top.iter().map(|(w, &p)| (w.as_str(), p))
    }

    pub fn dependency_entries(&self) -> impl Iterator<Item = (&str, &str, &str, f64)> {
        self.dependency.iter().flat_map(|(h, rels)| {
            rels.iter().flat_map(move |(r, words)| {
                words
                    .iter()
                    .map(move |(w, &p)| (h.as_str(), r.as_str(), w.as_str(), p))
            })
        })
    }

    pub fn detail_entries(&self) -> impl Iterator<Item = (&str, &str, usize, f64)> {
        self.detail.iter().flat_map(|(h, rels)| {
            rels.iter().flat_map(move |(r, counts)| {
                counts
                    .iter()
                    .map(move |(&n, &p)| (h.as_str(), r.as_str(), n, p))
            })
        })
    }

    pub fn sequencing_entries(&self) -> impl Iterator<Item = (&[String], f64)> {
        self.sequencing.iter().map(|(s, &p)| (s.as_slice(), p))
    }

    pub fn is_empty(&self) -> bool {
        self.top.is_empty() && self.dependency.is_empty() && self.detail.is_empty() && self.sequencing.is_empty()
    }

    /// Checks the four normalization invariants within `tolerance`.
    pub fn check_normalized(&self, tolerance: f64) -> Result<()> {
        let near_one = |sum: f64| (sum - 1.0).abs() <= tolerance;
        let top: f64 = self.top.values().sum();
        if !near_one(top) {
            return Err(Error::Unnormalized(format!("top table sums to {top}")));
        }
        for (h, rels) in &self.dependency {
            for (r, words) in rels {
                let sum: f64 = words.values().sum();
                if !near_one(sum) {
                    return Err(Error::Unnormalized(format!("dependency({h},{r},*) sums to {sum}")));
                }
            }
        }
        for (h, rels) in &self.detail {
            for (r, counts) in rels {
                let sum: f64 = counts.values().sum();
                if !near_one(sum) {
                    return Err(Error::Unnormalized(format!("detail({h},{r},*) sums to {sum}")));
                }
            }
        }
        let mut by_multiset: BTreeMap<Multiset, f64> = BTreeMap::new();
        for (seq, &p) in &self.sequencing {
            *by_multiset.entry(seq.iter().map(String::as_str).collect()).or_default() += p;
        }
        for (m, sum) in by_multiset {
            if !near_one(sum) {
                return Err(Error::Unnormalized(format!("sequencing over {m} sums to {sum}")));
            }
        }
        Ok(())
    }
}
