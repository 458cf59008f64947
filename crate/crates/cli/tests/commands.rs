use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use reltrans_cli::data::{self, MODEL_FILES};
use reltrans_cli::formats::{parse_bitext, parse_corpus, write_model, ModelFile};
use reltrans_core::estimation::{estimate_monolingual, estimate_transfer};
use reltrans_core::transfer::translate_all;

fn data_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data")
}

fn data_file(name: &str) -> String {
    data_dir().join(name).to_string_lossy().into_owned()
}

fn reltrans(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_reltrans")).args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("reltrans-commands-{}-{name}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn bundled_models_match_fresh_training() {
    let en = parse_corpus(data::TOY_EN_CORPUS, "toy.en.corpus").unwrap();
    let fr = parse_corpus(data::TOY_FR_CORPUS, "toy.fr.corpus").unwrap();
    let bitext = parse_bitext(data::TOY_BITEXT, "toy.bitext").unwrap();
    let reversed: Vec<_> = bitext.iter().map(|r| r.reversed().unwrap()).collect();
    let lm = |c| write_model(&ModelFile { lm: estimate_monolingual(c, 0.0, None).unwrap(), ..Default::default() });
    let tm = |c| write_model(&ModelFile { tm: estimate_transfer(c, 0.0).unwrap(), ..Default::default() });
    assert_eq!(lm(&en), data::TOY_EN_MODEL);
    assert_eq!(lm(&fr), data::TOY_FR_MODEL);
    assert_eq!(tm(&bitext), data::TOY_EN_FR_MODEL);
    assert_eq!(tm(&reversed), data::TOY_FR_EN_MODEL);
}

#[test]
fn bitext_sides_match_the_treebanks() {
    let bitext = parse_bitext(data::TOY_BITEXT, "toy.bitext").unwrap();
    let en = parse_corpus(data::TOY_EN_CORPUS, "toy.en.corpus").unwrap();
    let fr = parse_corpus(data::TOY_FR_CORPUS, "toy.fr.corpus").unwrap();
    assert_eq!(bitext.len(), 10);
    for ((b, e), f) in bitext.iter().zip(&en).zip(&fr) {
        assert_eq!(b.source, *e);
        assert_eq!(b.target, *f);
    }
}

#[test]
fn train_lm_writes_the_bundled_model() {
    let dir = scratch("train");
    let out = dir.join("en.model");
    let run = reltrans(&["train-lm", "--corpus", &data_file("toy.en.corpus"), "--out", out.to_str().unwrap()]);
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    assert_eq!(std::fs::read_to_string(&out).unwrap(), data::TOY_EN_MODEL);
    let out = dir.join("fr-en.model");
    let run = reltrans(&[
        "train-transfer",
        "--bitext",
        &data_file("toy.bitext"),
        "--reverse",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(run.status.success());
    assert_eq!(std::fs::read_to_string(&out).unwrap(), data::TOY_FR_EN_MODEL);
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn score_prints_probability_and_log() {
    let run = reltrans(&["score", "--lm", &data_file("toy.en.model"), "--sentence", "john sees mary"]);
    assert!(run.status.success());
    let text = stdout(&run);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 2);
    let p: f64 = lines[0].parse().unwrap();
    let lp: f64 = lines[1].parse().unwrap();
    assert!((p.ln() - lp).abs() < 1e-9);
    assert!(p > 0.0 && p < 1.0);
}

#[test]
fn unknown_sentence_scores_zero() {
    let run = reltrans(&["score", "--lm", &data_file("toy.en.model"), "--sentence", "mary mary"]);
    assert!(run.status.success());
    assert_eq!(stdout(&run), "0.000000000000\n-inf\n");
}

#[test]
fn parse_prints_a_record() {
    let run = reltrans(&["parse", "--lm", &data_file("toy.en.model"), "--sentence", "the cat sleeps", "--k", "3"]);
    assert!(run.status.success());
    let text = stdout(&run);
    assert!(text.starts_with("# 1\t"));
    assert!(text.contains("1\tthe\t2\tdet\n2\tcat\t3\tsubj\n3\tsleeps\t0\te\n"));
}

#[test]
fn translate_ranks_voit_above_regarde() {
    let dir = scratch("translate");
    let tree = dir.join("tree.corpus");
    std::fs::write(&tree, "1\tjohn\t2\tsubj\n2\tsees\t0\te\n3\tmary\t2\tobj\n").unwrap();
    let run = reltrans(&[
        "translate",
        "--lm-src",
        &data_file("toy.en.model"),
        "--transfer",
        &data_file("toy.en-fr.model"),
        "--lm-tgt",
        &data_file("toy.fr.model"),
        "--tree",
        tree.to_str().unwrap(),
    ]);
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    let text = stdout(&run);
    let lines: Vec<&str> = text.lines().collect();
    assert!(lines[0].starts_with("# john sees mary\t"));
    assert!(lines[1].starts_with("jean voit marie\t0.75"));
    assert!(lines[2].starts_with("jean regarde marie\t0.25"));
    std::fs::remove_dir_all(dir).unwrap();
}

fn decode_args(extra: &[&str]) -> Vec<String> {
    let mut args: Vec<String> = [
        "decode",
        "--lm-src",
        &data_file("toy.en.model"),
        "--transfer",
        &data_file("toy.en-fr.model"),
        "--lm-tgt",
        &data_file("toy.fr.model"),
        "--nbest",
        &data_file("toy.nbest"),
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    args.extend(extra.iter().map(|s| s.to_string()));
    args
}

#[test]
fn decode_lists_factors() {
    let args = decode_args(&["--k", "2"]);
    let run = reltrans(&args.iter().map(String::as_str).collect::<Vec<_>>());
    assert!(run.status.success());
    let text = stdout(&run);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 3);
    assert!(lines[0].starts_with("rank\ttarget\tlog_score"));
    assert!(lines[1].starts_with("1\tjean voit marie\t"));
    let fields: Vec<f64> = lines[1].split('\t').skip(3).map(|f| f.parse().unwrap()).collect();
    let total: f64 = lines[1].split('\t').nth(2).unwrap().parse().unwrap();
    // a single chain, so the factors add up to the sum-mode score
    assert!((fields.iter().sum::<f64>() - total).abs() < 1e-9);
}

#[test]
fn decode_with_reverse_rescoring() {
    let fr = data_file("toy.fr.model");
    let back = data_file("toy.fr-en.model");
    let args = decode_args(&["--mode", "max", "--reverse", &fr, &back]);
    let run = reltrans(&args.iter().map(String::as_str).collect::<Vec<_>>());
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    assert!(stdout(&run).lines().next().unwrap().contains("reverse_transfer"));
}

#[test]
fn malformed_input_names_file_and_line() {
    let dir = scratch("malformed");
    let corpus = dir.join("bad.corpus");
    std::fs::write(&corpus, "1\tjohn\t2\tsubj\n2\tsees\t0\n").unwrap();
    let out = dir.join("out.model");
    let run = reltrans(&["train-lm", "--corpus", corpus.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(run.status.code(), Some(1));
    let err = String::from_utf8_lossy(&run.stderr);
    assert!(err.contains("bad.corpus:2:"), "{err}");
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn oversized_input_exits_with_two() {
    let run = reltrans(&[
        "--bound",
        "2",
        "score",
        "--lm",
        &data_file("toy.en.model"),
        "--sentence",
        "john sees mary",
    ]);
    assert_eq!(run.status.code(), Some(2));
}

#[test]
fn verify_passes() {
    let run = reltrans(&["verify", "--suite", "decode"]);
    assert!(run.status.success());
    assert!(stdout(&run).starts_with("decode\tcases="));
    assert!(stdout(&run).trim_end().ends_with("PASS"));
}

#[test]
fn every_bundled_model_is_normalized() {
    for (name, text) in MODEL_FILES {
        let m = reltrans_cli::formats::parse_model(text, name).unwrap();
        assert!(m.lm.is_empty() != m.tm.is_empty(), "{name}");
        if m.tm.is_empty() {
            m.lm.check_normalized(1e-9).unwrap();
        } else {
            m.tm.check_normalized(1e-9).unwrap();
        }
    }
}

#[test]
fn point_mass_translation_round_trips() {
    for rec in parse_bitext(data::TOY_BITEXT, "toy.bitext").unwrap() {
        let forward = estimate_transfer(std::slice::from_ref(&rec), 0.0).unwrap();
        let backward = estimate_transfer(&[rec.reversed().unwrap()], 0.0).unwrap();
        let there = translate_all(&rec.source.tree, &forward, 8).unwrap().results;
        assert_eq!(there.len(), 1);
        assert!((there[0].probability() - 1.0).abs() < 1e-12);
        assert!(there[0].tree.is_isomorphic(&rec.target.tree));
        let back = translate_all(&there[0].tree, &backward, 8).unwrap().results;
        assert_eq!(back.len(), 1);
        assert!(back[0].tree.is_isomorphic(&rec.source.tree));
    }
}
