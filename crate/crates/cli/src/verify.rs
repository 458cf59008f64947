//! Oracle comparisons behind the `verify` command.

use std::fmt;

use reltrans_core::decoder::{decode, Mode};
use reltrans_core::monolingual::{score_sentence, DEFAULT_BOUND};
use reltrans_core::oracle::{oracle_decode, oracle_sentence_prob, oracle_translation_prob};
use reltrans_core::synth::{all_strings, random_monolingual, random_transfer_instance, LmShape};
use reltrans_core::transfer::score_translation;
use reltrans_core::Result;

use crate::data::{toy_models, TOY_NBEST};
use crate::formats::parse_nbest;

/// Agreement tolerance between the fast paths and the oracles.
pub const TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Lm,
    Transfer,
    Decode,
}

impl Suite {
    pub const ALL: [Suite; 3] = [Suite::Lm, Suite::Transfer, Suite::Decode];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Lm => "lm",
            Suite::Transfer => "transfer",
            Suite::Decode => "decode",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub suite: Suite,
    pub cases: usize,
    pub max_deviation: f64,
    /// Disagreements that are not numeric, such as a different argmax.
    pub mismatches: Vec<String>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.max_deviation <= TOLERANCE && self.mismatches.is_empty()
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}\tcases={}\tmax_abs_deviation={:.3e}\t{}",
            self.suite.name(),
            self.cases,
            self.max_deviation,
            if self.passed() { "PASS" } else { "FAIL" }
        )?;
        for m in &self.mismatches {
            write!(f, "\n{}\tmismatch\t{m}", self.suite.name())?;
        }
        Ok(())
    }
}

/// The language-model shape of the `lm` suite: three words, two
/// relations, at most one dependent per relation.
pub fn lm_suite_shape() -> LmShape {
    LmShape::new(&["w1", "w2", "w3"], &["r1", "r2"], 1)
}

pub fn run(suite: Suite, seed: u64) -> Result<Report> {
    match suite {
        Suite::Lm => {
            let shape = lm_suite_shape();
            let model = random_monolingual(&shape, seed);
            let mut worst: f64 = 0.0;
            let strings = all_strings(&shape.vocabulary, 4);
            for s in &strings {
                let fast = score_sentence(s, &model, DEFAULT_BOUND)?;
                let slow = oracle_sentence_prob(s, &model)?;
                worst = worst.max((fast - slow).abs());
            }
            Ok(Report {
                suite,
                cases: strings.len(),
                max_deviation: worst,
                mismatches: Vec::new(),
            })
        }
        Suite::Transfer => {
            let mut worst: f64 = 0.0;
            let cases = 20;
            for i in 0..cases {
                let inst = random_transfer_instance(seed.wrapping_mul(1000).wrapping_add(i));
                let fast = score_translation(&inst.target, &inst.source, &inst.model, DEFAULT_BOUND)?;
                let slow = oracle_translation_prob(&inst.target, &inst.source, &inst.model)?;
                worst = worst.max((fast - slow).abs());
            }
            Ok(Report {
                suite,
                cases: cases as usize,
                max_deviation: worst,
                mismatches: Vec::new(),
            })
        }
        Suite::Decode => {
            let models = toy_models();
            let hyps = parse_nbest(TOY_NBEST, "toy.nbest").expect("bundled n-best parses");
            let oracle = oracle_decode(&hyps, &models.english, &models.forward, &models.french)?;
            let sum = decode(&hyps, &models.english, &models.forward, &models.french, usize::MAX, Mode::Sum, DEFAULT_BOUND)?;
            let mut worst: f64 = 0.0;
            let mut mismatches = Vec::new();
            let fast: std::collections::BTreeMap<Vec<String>, f64> =
                sum.targets.iter().map(|t| (t.words.clone(), t.log_score.exp())).collect();
            for key in oracle.marginals.keys().chain(fast.keys()) {
                let a = fast.get(key).copied().unwrap_or(0.0);
                let b = oracle.marginals.get(key).copied().unwrap_or(0.0);
                worst = worst.max((a - b).abs());
            }
            let max = decode(&hyps, &models.english, &models.forward, &models.french, 1, Mode::Max, DEFAULT_BOUND)?;
            let oracle_best = oracle
                .best_chain
                .iter()
                .max_by(|a, b| a.1.total_cmp(b.1).then_with(|| b.0.cmp(a.0)))
                .map(|(w, _)| w.join(" "));
            let fast_best = max.targets.first().map(|t| t.string());
            if oracle_best != fast_best {
                mismatches.push(format!("max-mode argmax {fast_best:?} but oracle {oracle_best:?}"));
            }
            Ok(Report {
                suite,
                cases: oracle.marginals.len().max(fast.len()),
                max_deviation: worst,
                mismatches,
            })
        }
    }
}
