//! Subcommands of the `reltrans` binary.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use clap::{Parser, Subcommand, ValueEnum};
use reltrans_core::decoder::{chains, decode, rank_targets, rescore_reverse, translate_strings, Mode, RankedTarget};
use reltrans_core::estimation::{estimate_monolingual, estimate_transfer, BitextRecord};
use reltrans_core::monolingual::{log_score_content, log_score_ordering, log_score_sentence, parse, DEFAULT_BOUND};
use reltrans_core::Error;

use crate::formats::{parse_bitext, parse_corpus, parse_model, parse_nbest, write_model, write_record, FormatError, ModelFile};
use crate::verify::{self, Suite};

#[derive(Debug, Parser)]
#[command(name = "reltrans", version, about = "Relation-tree language models, transfer and n-best decoding")]
pub struct Cli {
    /// Largest sentence or tree handled by exhaustive enumeration.
    #[arg(long, global = true, default_value_t = DEFAULT_BOUND)]
    pub bound: usize,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Sum,
    Max,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SuiteArg {
    All,
    Lm,
    Transfer,
    Decode,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Estimate a language model from a treebank file.
    TrainLm {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 0.0)]
        lambda: f64,
        #[arg(long)]
        nmax: Option<usize>,
    },
    /// Estimate a transfer model from a bitext file.
    TrainTransfer {
        #[arg(long)]
        bitext: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 0.0)]
        lambda: f64,
        /// Train the target-to-source direction.
        #[arg(long)]
        reverse: bool,
    },
    /// Print P(W) and ln P(W) for a sentence.
    Score {
        #[arg(long)]
        lm: PathBuf,
        #[arg(long)]
        sentence: String,
    },
    /// Print the k best trees for a sentence.
    Parse {
        #[arg(long)]
        lm: PathBuf,
        #[arg(long)]
        sentence: String,
        #[arg(long, default_value_t = 1)]
        k: usize,
    },
    /// Translate every tree of a treebank file into ranked target strings.
    Translate {
        #[arg(long)]
        lm_src: PathBuf,
        #[arg(long)]
        transfer: PathBuf,
        #[arg(long)]
        lm_tgt: PathBuf,
        #[arg(long)]
        tree: PathBuf,
        #[arg(long, default_value_t = 5)]
        k: usize,
    },
    /// Decode an n-best list into ranked target strings.
    Decode {
        #[arg(long)]
        lm_src: PathBuf,
        #[arg(long)]
        transfer: PathBuf,
        #[arg(long)]
        lm_tgt: PathBuf,
        #[arg(long)]
        nbest: PathBuf,
        #[arg(long, default_value_t = 5)]
        k: usize,
        #[arg(long, value_enum, default_value_t = ModeArg::Sum)]
        mode: ModeArg,
        /// Rescore with a target content model and a reverse transfer model.
        #[arg(long, num_args = 2, value_names = ["TGT_CONTENT", "REVERSE_TRANSFER"])]
        reverse: Option<Vec<PathBuf>>,
    },
    /// Compare fast paths against the brute-force oracles.
    Verify {
        #[arg(long, value_enum, default_value_t = SuiteArg::All)]
        suite: SuiteArg,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

/// Raised when a verification suite disagrees with its oracle.
#[derive(Debug, thiserror::Error)]
#[error("verification failed: {0}")]
pub struct VerifyFailure(pub String);

/// Exit status for an error: 2 for size bounds, 3 for failed
/// verification, 1 for everything else.
pub fn exit_code(err: &anyhow::Error) -> i32 {
    if err.downcast_ref::<VerifyFailure>().is_some() {
        return 3;
    }
    for cause in err.chain() {
        let core = cause
            .downcast_ref::<Error>()
            .or_else(|| cause.downcast_ref::<FormatError>().and_then(|f| f.cause.as_ref()));
        if matches!(core, Some(Error::TooLarge { .. })) {
            return 2;
        }
    }
    1
}

fn read(path: &Path) -> anyhow::Result<String> {
    fs::read_to_string(path).with_context(|| format!("{}: cannot read file", path.display()))
}

fn load_model(path: &Path) -> anyhow::Result<ModelFile> {
    Ok(parse_model(&read(path)?, &path.display().to_string())?)
}

fn tokens(sentence: &str) -> Vec<String> {
    sentence.split_whitespace().map(str::to_string).collect()
}

/// A log probability with 12 decimals, `-inf` for zero.
pub fn format_log(x: f64) -> String {
    if x == f64::NEG_INFINITY {
        "-inf".to_string()
    } else {
        format!("{x:.12}")
    }
}

pub fn run(cli: Cli, out: &mut dyn Write) -> anyhow::Result<()> {
    let bound = cli.bound;
    match cli.command {
        Command::TrainLm {
            corpus,
            out: path,
            lambda,
            nmax,
        } => {
            let records = parse_corpus(&read(&corpus)?, &corpus.display().to_string())?;
            let lm = estimate_monolingual(&records, lambda, nmax)?;
            let text = write_model(&ModelFile {
                lm,
                ..Default::default()
            });
            fs::write(&path, text).with_context(|| format!("{}: cannot write file", path.display()))?;
        }
        Command::TrainTransfer {
            bitext,
            out: path,
            lambda,
            reverse,
        } => {
            let mut records = parse_bitext(&read(&bitext)?, &bitext.display().to_string())?;
            if reverse {
                records = records
                    .iter()
                    .enumerate()
                    .map(|(i, r)| r.reversed().with_context(|| format!("{}: record {}", bitext.display(), i + 1)))
                    .collect::<anyhow::Result<Vec<BitextRecord>>>()?;
            }
            let tm = estimate_transfer(&records, lambda)?;
            let text = write_model(&ModelFile {
                tm,
                ..Default::default()
            });
            fs::write(&path, text).with_context(|| format!("{}: cannot write file", path.display()))?;
        }
        Command::Score { lm, sentence } => {
            let lm = load_model(&lm)?.lm;
            let logp = log_score_sentence(&tokens(&sentence), &lm, bound)?;
            writeln!(out, "{:.12}", logp.exp())?;
            writeln!(out, "{}", format_log(logp))?;
        }
        Command::Parse { lm, sentence, k } => {
            let lm = load_model(&lm)?.lm;
            let parses = parse(&tokens(&sentence), &lm, k, bound)?;
            for (i, p) in parses.iter().enumerate() {
                if i > 0 {
                    writeln!(out)?;
                }
                writeln!(out, "# {}\t{:.12}\t{}", i + 1, p.probability(), format_log(p.log_prob))?;
                write!(out, "{}", write_record(&p.tree))?;
            }
        }
        Command::Translate {
            lm_src,
            transfer,
            lm_tgt,
            tree,
            k,
        } => {
            let src = load_model(&lm_src)?.lm;
            let tm = load_model(&transfer)?.tm;
            let tgt = load_model(&lm_tgt)?.lm;
            let records = parse_corpus(&read(&tree)?, &tree.display().to_string())?;
            for (i, rec) in records.iter().enumerate() {
                if i > 0 {
                    writeln!(out)?;
                }
                let content = log_score_content(&rec.tree, &src);
                let generation = log_score_ordering(&rec.order(), &rec.tree, &src)?;
                writeln!(
                    out,
                    "# {}\tsource_content={}\tsource_generation={}",
                    rec.words().join(" "),
                    format_log(content),
                    format_log(generation)
                )?;
                for (words, logp) in translate_strings(&rec.tree, &tm, &tgt, k, bound)? {
                    writeln!(out, "{}\t{:.12}\t{}", words.join(" "), logp.exp(), format_log(logp))?;
                }
            }
        }
        Command::Decode {
            lm_src,
            transfer,
            lm_tgt,
            nbest,
            k,
            mode,
            reverse,
        } => {
            let src = load_model(&lm_src)?.lm;
            let tm = load_model(&transfer)?.tm;
            let tgt = load_model(&lm_tgt)?.lm;
            let hyps = parse_nbest(&read(&nbest)?, &nbest.display().to_string())?;
            let mode = match mode {
                ModeArg::Sum => Mode::Sum,
                ModeArg::Max => Mode::Max,
            };
            let mut targets = match reverse {
                None => decode(&hyps, &src, &tm, &tgt, k, mode, bound)?.targets,
                Some(paths) => {
                    let [content, back] = paths.as_slice() else {
                        bail!("--reverse takes a target content model and a reverse transfer model");
                    };
                    let content = load_model(content)?.lm;
                    let back = load_model(back)?.tm;
                    let all = chains(&hyps, &src, &tm, &tgt, bound)?;
                    let rescored = rescore_reverse(&all, &content, Some(&back), bound)?;
                    rank_targets(&rescored, mode)
                }
            };
            targets.truncate(k);
            write_targets(out, &targets)?;
        }
        Command::Verify { suite, seed } => {
            let suites: Vec<Suite> = match suite {
                SuiteArg::All => Suite::ALL.to_vec(),
                SuiteArg::Lm => vec![Suite::Lm],
                SuiteArg::Transfer => vec![Suite::Transfer],
                SuiteArg::Decode => vec![Suite::Decode],
            };
            let mut failed = Vec::new();
            for s in suites {
                let report = verify::run(s, seed)?;
                writeln!(out, "{report}")?;
                if !report.passed() {
                    failed.push(s.name());
                }
            }
            if !failed.is_empty() {
                return Err(VerifyFailure(failed.join(", ")).into());
            }
        }
    }
    Ok(())
}

fn write_targets(out: &mut dyn Write, targets: &[RankedTarget]) -> anyhow::Result<()> {
    let reversed = targets.first().is_some_and(|t| t.best.factors.reversed);
    let (content, transfer) = if reversed {
        ("target_content", "reverse_transfer")
    } else {
        ("source_content", "transfer")
    };
    writeln!(
        out,
        "rank\ttarget\tlog_score\tacoustic\tsource_generation\t{content}\t{transfer}\ttarget_generation"
    )?;
    for (i, t) in targets.iter().enumerate() {
        let f = &t.best.factors;
        writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
            i + 1,
            t.string(),
            format_log(t.log_score),
            format_log(f.acoustic),
            format_log(f.source_generation),
            format_log(f.content),
            format_log(f.transfer),
            format_log(f.target_generation)
        )?;
    }
    Ok(())
}
