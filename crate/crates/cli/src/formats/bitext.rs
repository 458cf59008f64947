//! Bitext records: source block, `---`, target block, `===`, then
//! `target_index<TAB>source_index` alignment lines.

use reltrans_core::estimation::BitextRecord;
use reltrans_core::Alignment;

use super::corpus::{check_projective, parse_record, write_record};
use super::{blocks, FormatError};

pub fn parse_bitext(text: &str, file: &str) -> Result<Vec<BitextRecord>, FormatError> {
    let mut out = Vec::new();
    for (i, block) in blocks(text).iter().enumerate() {
        let record = i + 1;
        let start = block[0].0;
        let find = |marker: &str| block.iter().position(|(_, l)| l.trim() == marker);
        let (Some(mid), Some(end)) = (find("---"), find("===")) else {
            return Err(FormatError::new(file, start, "record needs `---` and `===` separator lines"));
        };
        if !(0 < mid && mid + 1 < end) {
            return Err(FormatError::new(file, start, "record needs non-empty source and target blocks"));
        }
        let source = parse_record(&block[..mid], file, record)?;
        check_projective(&source, file, block[0].0, record)?;
        let target = parse_record(&block[mid + 1..end], file, record)?;
        check_projective(&target, file, block[mid + 1].0, record)?;

        let src_nodes: Vec<_> = source.order();
        let tgt_nodes: Vec<_> = target.order();
        let mut pairs = Vec::new();
        for &(line, text) in &block[end + 1..] {
            let fields: Vec<&str> = text.split('\t').collect();
            let parsed = match fields.as_slice() {
                [t, s] => t.parse::<usize>().ok().zip(s.parse::<usize>().ok()),
                _ => None,
            };
            let Some((t, s)) = parsed else {
                return Err(FormatError::new(file, line, "expected `target_index<TAB>source_index`"));
            };
            let (Some(t), Some(s)) = (t.checked_sub(1).and_then(|t| tgt_nodes.get(t)), s.checked_sub(1).and_then(|s| src_nodes.get(s))) else {
                return Err(FormatError::new(file, line, "alignment index outside the record"));
            };
            if pairs.iter().any(|(pt, _): &(_, _)| pt == t) {
                return Err(FormatError::new(file, line, format!("target {t} aligned twice")));
            }
            pairs.push((t.clone(), s.clone()));
        }
        let alignment: Alignment = pairs.into_iter().collect();
        let rec = BitextRecord::new(source, target, alignment).map_err(|e| FormatError::from_core(file, start, e))?;
        out.push(rec);
    }
    Ok(out)
}

pub fn write_bitext(records: &[BitextRecord]) -> String {
    records
        .iter()
        .map(|r| {
            let mut s = write_record(&r.source.tree);
            s.push_str("---\n");
            s.push_str(&write_record(&r.target.tree));
            s.push_str("===\n");
            for (t, src) in r.alignment.iter() {
                s.push_str(&format!("{}\t{}\n", t.index, src.index));
            }
            s
        })
        .collect::<Vec<_>>()
        .join("\n")
}

#[cfg(test)]
mod tests {
    use super::*;

    const REC: &str = "1\tjohn\t2\tsubj\n2\tsleeps\t0\te\n---\n1\tjean\t2\tsubj\n2\tdort\t0\te\n===\n1\t1\n2\t2\n";

    #[test]
    fn round_trip() {
        let recs = parse_bitext(&format!("{REC}\n{REC}"), "b").unwrap();
        assert_eq!(recs.len(), 2);
        assert_eq!(recs[0].target.words(), ["jean", "dort"]);
        assert_eq!(write_bitext(&recs), format!("{REC}\n{REC}"));
    }

    #[test]
    fn partial_alignment_is_rejected() {
        let text = REC.replace("2\t2\n", "");
        let err = parse_bitext(&text, "b").unwrap_err();
        assert_eq!(err.line, 1);
        let text = REC.replace("2\t2\n", "2\t7\n");
        assert_eq!(parse_bitext(&text, "b").unwrap_err().line, 8);
    }
}
