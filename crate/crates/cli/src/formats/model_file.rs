//! Typed TSV parameter tables: `TOP`, `DEP`, `DET`, `SEQ`, `LEX`, `RULE`.

use reltrans_core::{MonolingualModel, Multiset, ShapeEdge, StructuralRule, TransferModel, UnlabeledGraph};

use super::FormatError;

/// The tables of one model file. Language-model files fill `lm`, transfer
/// files fill `tm`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ModelFile {
    pub lm: MonolingualModel,
    pub tm: TransferModel,
}

/// A probability with 12 significant digits, in the style of C's `%.12g`.
pub fn format_probability(p: f64) -> String {
    if p == 0.0 {
        return "0".to_string();
    }
    let sci = format!("{p:.11e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    let trim = |s: &str| {
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s.to_string()
        }
    };
    if !(-4..12).contains(&exp) {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim(mantissa), exp.abs())
    } else {
        trim(&format!("{:.*}", (11 - exp) as usize, p))
    }
}

fn parse_probability(s: &str, file: &str, line: usize) -> Result<f64, FormatError> {
    s.parse::<f64>()
        .ok()
        .filter(|p| p.is_finite())
        .ok_or_else(|| FormatError::new(file, line, format!("bad probability {s:?}")))
}

fn parse_edges(s: &str, file: &str, line: usize) -> Result<Vec<(String, String, String)>, FormatError> {
    if s == "-" {
        return Ok(Vec::new());
    }
    s.split(';')
        .map(|edge| {
            let parsed = edge.strip_suffix(')').and_then(|e| e.split_once('(')).and_then(|(rel, args)| {
                let (a, b) = args.split_once(',')?;
                (!rel.is_empty() && !a.is_empty() && !b.is_empty()).then(|| (rel.to_string(), a.to_string(), b.to_string()))
            });
            parsed.ok_or_else(|| FormatError::new(file, line, format!("bad edge {edge:?}, expected rel(a,b)")))
        })
        .collect()
}

fn parse_rule(fields: &[&str], file: &str, line: usize) -> Result<StructuralRule, FormatError> {
    let [id, src, tgt, align, p] = fields else {
        return Err(FormatError::new(file, line, "RULE needs id, source edges, target edges, node map and probability"));
    };
    let core = |e| FormatError::from_core(file, line, e);
    let source = UnlabeledGraph::from_named_edges(&parse_edges(src, file, line)?).map_err(core)?;

    let tgt_edges = parse_edges(tgt, file, line)?;
    let mut names: Vec<String> = tgt_edges.iter().flat_map(|(_, a, b)| [a.clone(), b.clone()]).collect();
    names.sort();
    names.dedup();
    let index = |n: &str| names.iter().position(|x| x == n).expect("collected name");
    let shape_edges: Vec<ShapeEdge> = tgt_edges
        .iter()
        .map(|(r, a, b)| ShapeEdge {
            relation: r.clone(),
            head: index(a),
            dependent: index(b),
        })
        .collect();
    let target = UnlabeledGraph::new(names.clone(), shape_edges).map_err(core)?;

    let mut alignment = vec![None; names.len()];
    if *align != "-" {
        for pair in align.split(',') {
            let Some((t, s)) = pair.split_once('>') else {
                return Err(FormatError::new(file, line, format!("bad node map entry {pair:?}")));
            };
            let Some(ti) = names.iter().position(|x| x == t) else {
                return Err(FormatError::new(file, line, format!("node map mentions unknown target node {t:?}")));
            };
            let Some(si) = source.node_index(s) else {
                return Err(FormatError::new(file, line, format!("node map mentions unknown source node {s:?}")));
            };
            if alignment[ti].replace(si).is_some() {
                return Err(FormatError::new(file, line, format!("target node {t:?} mapped twice")));
            }
        }
    }
    let Some(alignment) = alignment.into_iter().collect::<Option<Vec<usize>>>() else {
        return Err(FormatError::new(file, line, "node map must cover every target node"));
    };
    let p = parse_probability(p, file, line)?;
    StructuralRule::new(*id, source, target, alignment, p).map_err(core)
}

pub fn parse_model(text: &str, file: &str) -> Result<ModelFile, FormatError> {
    let mut out = ModelFile::default();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        if raw.trim().is_empty() || raw.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = raw.split('\t').collect();
        let core = |e| FormatError::from_core(file, line, e);
        let arity = |n: usize| {
            if fields.len() == n {
                Ok(())
            } else {
                Err(FormatError::new(
                    file,
                    line,
                    format!("{} line needs {} fields, found {}", fields[0], n, fields.len()),
                ))
            }
        };
        match fields[0] {
            "TOP" => {
                arity(3)?;
                out.lm.set_top(fields[1], parse_probability(fields[2], file, line)?).map_err(core)?;
            }
            "DEP" => {
                arity(5)?;
                let p = parse_probability(fields[4], file, line)?;
                out.lm.set_dependency(fields[1], fields[2], fields[3], p).map_err(core)?;
            }
            "DET" => {
                arity(5)?;
                let n: usize = fields[3]
                    .parse()
                    .map_err(|_| FormatError::new(file, line, format!("bad count {:?}", fields[3])))?;
                let p = parse_probability(fields[4], file, line)?;
                out.lm.set_detail(fields[1], fields[2], n, p).map_err(core)?;
            }
            "SEQ" => {
                arity(3)?;
                let labels: Vec<&str> = fields[1].split(',').collect();
                let p = parse_probability(fields[2], file, line)?;
                out.lm.set_sequencing(&labels, p).map_err(core)?;
            }
            "LEX" => {
                arity(4)?;
                let targets: Multiset = if fields[2] == "-" {
                    Multiset::new()
                } else {
                    fields[2].split(',').collect()
                };
                let p = parse_probability(fields[3], file, line)?;
                out.tm.set_lexical(fields[1], targets, p).map_err(core)?;
            }
            "RULE" => {
                let rule = parse_rule(&fields[1..], file, line)?;
                out.tm.add_rule(rule);
            }
            other => return Err(FormatError::new(file, line, format!("unknown line type {other:?}"))),
        }
    }
    Ok(out)
}

fn multiset_text(m: &Multiset) -> String {
    if m.is_empty() {
        "-".to_string()
    } else {
        m.items().join(",")
    }
}

/// Canonical text: line types in the order above, each sorted by key.
pub fn write_model(model: &ModelFile) -> String {
    let mut out = String::new();
    let lm = &model.lm;
    for (w, p) in lm.top_entries() {
        out.push_str(&format!("TOP\t{w}\t{}\n", format_probability(p)));
    }
    for (h, r, w, p) in lm.dependency_entries() {
        out.push_str(&format!("DEP\t{h}\t{r}\t{w}\t{}\n", format_probability(p)));
    }
    for (h, r, n, p) in lm.detail_entries() {
        out.push_str(&format!("DET\t{h}\t{r}\t{n}\t{}\n", format_probability(p)));
    }
    for (s, p) in lm.sequencing_entries() {
        out.push_str(&format!("SEQ\t{}\t{}\n", s.join(","), format_probability(p)));
    }
    let mut lex: Vec<(&str, String, f64)> = model
        .tm
        .lexical_entries()
        .map(|(w, m, p)| (w, multiset_text(m), p))
        .collect();
    lex.sort_by(|a, b| (a.0, &a.1).cmp(&(b.0, &b.1)));
    for (w, m, p) in lex {
        out.push_str(&format!("LEX\t{w}\t{m}\t{}\n", format_probability(p)));
    }
    let mut rules: Vec<((String, String, String), &StructuralRule)> =
        model.tm.rules().iter().map(|r| (r.texts(), r)).collect();
    rules.sort_by(|a, b| a.0.cmp(&b.0).then_with(|| a.1.id.cmp(&b.1.id)));
    for ((src, tgt, align), rule) in rules {
        out.push_str(&format!(
            "RULE\t{}\t{src}\t{tgt}\t{align}\t{}\n",
            rule.id,
            format_probability(rule.probability)
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(format_probability(1.0), "1");
        assert_eq!(format_probability(0.5), "0.5");
        assert_eq!(format_probability(1.0 / 3.0), "0.333333333333");
        assert_eq!(format_probability(2.0 / 3.0), "0.666666666667");
        assert_eq!(format_probability(0.00012345), "0.00012345");
        assert_eq!(format_probability(1.5e-7), "1.5e-07");
        assert_eq!(format_probability(0.0), "0");
    }

    const TEXT: &str = "TOP\tsees\t1\n\
DEP\tsees\tobj\tmary\t1\n\
DEP\tsees\tsubj\tjohn\t1\n\
DET\tsees\tobj\t1\t1\n\
DET\tsees\tsubj\t1\t1\n\
SEQ\te\t1\n\
SEQ\tsubj,e,obj\t1\n\
LEX\tmary\tmarie\t1\n\
LEX\tthe\t-\t0.25\n\
LEX\tthe\tle\t0.75\n\
RULE\tr2\tdet(a,b)\t-\t-\t1\n\
RULE\tr1\tobj(a,b);subj(a,c)\tobj(a',b');subj(a',c')\ta'>a,b'>b,c'>c\t1\n";

    #[test]
    fn load_then_save_is_canonical() {
        let m = parse_model(TEXT, "m").unwrap();
        assert_eq!(m.tm.rules().len(), 2);
        assert!(m.lm.check_normalized(1e-9).is_ok());
        let saved = write_model(&m);
        assert_eq!(write_model(&parse_model(&saved, "m").unwrap()), saved);
        assert!(saved.contains("RULE\tr2\tdet(a,b)\t-\t-\t1\nRULE\tr1\t"));
    }

    #[test]
    fn errors_name_the_line() {
        let err = parse_model("TOP\ta\t1\nDEP\ta\tr\tb\n", "m.txt").unwrap_err();
        assert_eq!((err.file.as_str(), err.line), ("m.txt", 2));
        let err = parse_model("RULE\tr\tr(a,b)\tr(x,y)\tx>a\t1\n", "m.txt").unwrap_err();
        assert!(err.message.contains("cover"));
        let err = parse_model("SEQ\tsubj,obj\t1\n", "m.txt").unwrap_err();
        assert_eq!(err.line, 1);
    }
}
