//! `index<TAB>word<TAB>head<TAB>relation` treebank records.

use reltrans_core::estimation::TreebankRecord;
use reltrans_core::monolingual::induced_sequences;
use reltrans_core::{validate_tree, Edge, Error, Occurrence, RelationTree, HEAD_MARKER};

use super::{blocks, FormatError};

/// Parses one record's lines into a tree; line order is word order.
pub(crate) fn parse_record(lines: &[(usize, &str)], file: &str, record: usize) -> Result<TreebankRecord, FormatError> {
    let mut occs = Vec::new();
    let mut heads = Vec::new();
    for (pos, &(line, text)) in lines.iter().enumerate() {
        let fields: Vec<&str> = text.split('\t').collect();
        if fields.len() != 4 {
            return Err(FormatError::new(file, line, format!("expected 4 tab-separated fields, found {}", fields.len())));
        }
        let index: u32 = fields[0]
            .parse()
            .map_err(|_| FormatError::new(file, line, format!("bad index {:?}", fields[0])))?;
        if index as usize != pos + 1 {
            return Err(FormatError::new(
                file,
                line,
                format!("index {index} out of sequence, expected {}", pos + 1),
            ));
        }
        let head: u32 = fields[2]
            .parse()
            .map_err(|_| FormatError::new(file, line, format!("bad head index {:?}", fields[2])))?;
        let occ = Occurrence::checked(fields[1], index).map_err(|e| FormatError::from_core(file, line, e))?;
        let rel = fields[3];
        if head == 0 && rel != HEAD_MARKER {
            return Err(FormatError::new(file, line, format!("root must have relation e, found {rel:?}")));
        }
        occs.push(occ);
        heads.push((line, head, rel));
    }
    let mut edges = Vec::new();
    for (pos, &(line, head, rel)) in heads.iter().enumerate() {
        if head == 0 {
            continue;
        }
        let Some(h) = occs.get(head as usize - 1) else {
            return Err(FormatError::new(file, line, format!("head index {head} is outside the record")));
        };
        edges.push(Edge::new(rel, h.clone(), occs[pos].clone()));
    }
    let first = lines.first().map(|l| l.0).unwrap_or(0);
    let tree = validate_tree(occs, edges).map_err(|e| FormatError::from_core(file, first, with_record(e, record)))?;
    Ok(TreebankRecord::new(tree))
}

fn with_record(err: Error, record: usize) -> Error {
    match err {
        Error::NonProjective(head) => Error::NonProjectiveRecord { record, head },
        other => Error::InvalidRecord {
            record,
            reason: other.to_string(),
        },
    }
}

/// Checks that the record's word order is projective.
pub(crate) fn check_projective(
    rec: &TreebankRecord,
    file: &str,
    line: usize,
    record: usize,
) -> Result<(), FormatError> {
    induced_sequences(&rec.order(), &rec.tree)
        .map(|_| ())
        .map_err(|e| FormatError::from_core(file, line, with_record(e, record)))
}

/// Parses and validates a treebank file.
pub fn parse_corpus(text: &str, file: &str) -> Result<Vec<TreebankRecord>, FormatError> {
    let mut out = Vec::new();
    for (i, block) in blocks(text).iter().enumerate() {
        let rec = parse_record(block, file, i + 1)?;
        check_projective(&rec, file, block[0].0, i + 1)?;
        out.push(rec);
    }
    Ok(out)
}

/// A tree as record lines. Occurrence indices must be 1..n.
pub fn write_record(tree: &RelationTree) -> String {
    let mut out = String::new();
    for node in tree.nodes() {
        let (head, rel) = match tree.parent_edge(node) {
            Some(e) => (e.head.index, e.relation.as_str()),
            None => (0, HEAD_MARKER),
        };
        out.push_str(&format!("{}\t{}\t{}\t{}\n", node.index, node.word, head, rel));
    }
    out
}

pub fn write_corpus(records: &[TreebankRecord]) -> String {
    records
        .iter()
        .map(|r| write_record(&r.tree))
        .collect::<Vec<_>>()
        .join("\n")
}
