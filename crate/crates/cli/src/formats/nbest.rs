//! `log_acoustic_score<TAB>w1 w2 ... wn` recognizer output.

use reltrans_core::RecognitionHypothesis;

use super::FormatError;

pub fn parse_nbest(text: &str, file: &str) -> Result<Vec<RecognitionHypothesis>, FormatError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        if raw.trim().is_empty() {
            continue;
        }
        let Some((score, words)) = raw.split_once('\t') else {
            return Err(FormatError::new(file, line, "expected `score<TAB>words`"));
        };
        let score: f64 = score
            .trim()
            .parse()
            .ok()
            .filter(|s: &f64| s.is_finite())
            .ok_or_else(|| FormatError::new(file, line, format!("bad acoustic score {score:?}")))?;
        let hyp = RecognitionHypothesis::new(words.split_whitespace(), score)
            .map_err(|e| FormatError::from_core(file, line, e))?;
        out.push(hyp);
    }
    Ok(out)
}

pub fn write_nbest(hyps: &[RecognitionHypothesis]) -> String {
    hyps.iter()
        .map(|h| format!("{}\t{}\n", h.acoustic, h.words.join(" ")))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_scores_and_words() {
        let hyps = parse_nbest("-1.5\tjohn sees mary\n\n-2\tmary sleeps\n", "n").unwrap();
        assert_eq!(hyps.len(), 2);
        assert_eq!(hyps[1].words, ["mary", "sleeps"]);
        assert_eq!(write_nbest(&hyps), "-1.5\tjohn sees mary\n-2\tmary sleeps\n");
        assert_eq!(parse_nbest("x\ta\n", "n").unwrap_err().line, 1);
        assert_eq!(parse_nbest("0\ta\ninf\tb\n", "n").unwrap_err().line, 2);
        assert_eq!(parse_nbest("0\t \n", "n").unwrap_err().line, 1);
    }
}
