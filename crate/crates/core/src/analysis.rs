//! Nearest-neighbour queries over token embeddings and TSV export for
//! external projection tools.

use std::collections::HashSet;
use std::io::{BufRead, Write};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::encoder::{EncoderModel, WindowAutoencoder};
use crate::error::{check_len, Error, Result};
use crate::scalar::Scalar;
use crate::vocab::EmbeddingTable;

/// One token occurrence and its embedding. Positions are 0-based.
#[derive(Debug, Clone, PartialEq)]
pub struct TokenRecord<S> {
    pub sentence_id: usize,
    pub position: usize,
    pub token: String,
    pub embedding: Vec<S>,
    pub tag: Option<String>,
    pub left_context: String,
    pub right_context: String,
    /// The sentence with `[` `]` around the encoder window and around the target.
    pub snippet: String,
}

fn render_snippet(tokens: &[String], position: usize, radius: usize) -> String {
    let lo = position.saturating_sub(radius);
    let hi = (position + radius).min(tokens.len() - 1);
    let mut parts = Vec::with_capacity(tokens.len());
    for (k, t) in tokens.iter().enumerate() {
        let mut s = String::new();
        if k == lo {
            s.push('[');
        }
        if k == position {
            s.push('[');
        }
        s.push_str(t);
        if k == position {
            s.push(']');
        }
        if k == hi {
            s.push(']');
        }
        parts.push(s);
    }
    parts.join(" ")
}

/// Encodes every token whose type is in `filter` (all tokens when `None`).
/// `tags`, when given, must align with `corpus`.
pub fn index_corpus<S: Scalar>(
    encoder: &EncoderModel<S>,
    table: &EmbeddingTable<S>,
    corpus: &[Vec<String>],
    filter: Option<&HashSet<String>>,
    tags: Option<&[Vec<String>]>,
) -> Result<Vec<TokenRecord<S>>> {
    if let Some(tags) = tags {
        check_len("tag sentence count", corpus.len(), tags.len())?;
    }
    let r = encoder.radius();
    let mut out = Vec::new();
    for (sid, sent) in corpus.iter().enumerate() {
        if let Some(tags) = tags {
            check_len("tags per sentence", sent.len(), tags[sid].len())?;
        }
        let ids = table.vocab().ids(sent);
        for (j, tok) in sent.iter().enumerate() {
            if filter.is_some_and(|f| !f.contains(tok)) {
                continue;
            }
            out.push(TokenRecord {
                sentence_id: sid,
                position: j,
                token: tok.clone(),
                embedding: encoder.encode_token(table, &ids, j)?,
                tag: tags.map(|t| t[sid][j].clone()),
                left_context: sent[j.saturating_sub(r)..j].join(" "),
                right_context: sent[j + 1..(j + 1 + r).min(sent.len())].join(" "),
                snippet: render_snippet(sent, j, r),
            });
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    #[default]
    Euclidean,
    /// One minus cosine similarity.
    Cosine,
}

impl FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "euclidean" => Ok(Metric::Euclidean),
            "cosine" => Ok(Metric::Cosine),
            _ => Err(Error::InvalidConfig(format!("unknown metric {s:?}"))),
        }
    }
}

impl Metric {
    /// Distance in `f64`; identical vectors are exactly 0 under both metrics.
    pub fn distance<S: Scalar>(self, a: &[S], b: &[S]) -> f64 {
        match self {
            Metric::Euclidean => a
                .iter()
                .zip(b)
                .map(|(&x, &y)| (x.as_f64() - y.as_f64()).powi(2))
                .sum::<f64>()
                .sqrt(),
            Metric::Cosine => {
                if a == b {
                    return 0.0;
                }
                let (mut ab, mut aa, mut bb) = (0.0, 0.0, 0.0);
                for (&x, &y) in a.iter().zip(b) {
                    let (x, y) = (x.as_f64(), y.as_f64());
                    ab += x * y;
                    aa += x * x;
                    bb += y * y;
                }
                if aa == 0.0 || bb == 0.0 {
                    1.0
                } else {
                    1.0 - ab / (aa.sqrt() * bb.sqrt())
                }
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Neighbor<'a, S> {
    /// Position in the index.
    pub index: usize,
    pub record: &'a TokenRecord<S>,
    pub distance: f64,
}

/// The `k` records closest to `query`, skipping the record with the query's
/// own (sentence, position). Ties keep index order; `k` beyond the index
/// size returns everything.
pub fn nearest_neighbors<'a, S: Scalar>(
    query: &TokenRecord<S>,
    index: &'a [TokenRecord<S>],
    k: usize,
    metric: Metric,
) -> Result<Vec<Neighbor<'a, S>>> {
    if index.is_empty() {
        return Err(Error::InvalidArgument("nearest-neighbour index is empty".into()));
    }
    let mut hits = Vec::with_capacity(index.len());
    for (i, r) in index.iter().enumerate() {
        if r.sentence_id == query.sentence_id && r.position == query.position {
            continue;
        }
        check_len("neighbour embedding", query.embedding.len(), r.embedding.len())?;
        hits.push(Neighbor {
            index: i,
            record: r,
            distance: metric.distance(&query.embedding, &r.embedding),
        });
    }
    hits.sort_by(|a, b| a.distance.total_cmp(&b.distance));
    hits.truncate(k);
    Ok(hits)
}

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '\\' => out.push_str("\\\\"),
            '\t' => out.push_str("\\t"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            c => out.push(c),
        }
    }
    out
}

fn unescape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    let mut chars = s.chars();
    while let Some(c) = chars.next() {
        if c != '\\' {
            out.push(c);
            continue;
        }
        match chars.next() {
            Some('t') => out.push('\t'),
            Some('n') => out.push('\n'),
            Some('r') => out.push('\r'),
            Some(o) => out.push(o),
            None => out.push('\\'),
        }
    }
    out
}

const TSV_COLUMNS: [&str; 6] = ["sentence_id", "position", "token", "left_context", "right_context", "tag"];

/// Header row, then one row per record: metadata columns followed by
/// `e0 .. e{d-1}`. Text fields escape tabs, newlines and backslashes.
pub fn export_embeddings_tsv<S: Scalar, W: Write>(index: &[TokenRecord<S>], mut out: W) -> std::io::Result<()> {
    let dim = index.first().map_or(0, |r| r.embedding.len());
    let mut header: Vec<String> = TSV_COLUMNS.iter().map(|c| c.to_string()).collect();
    header.extend((0..dim).map(|k| format!("e{k}")));
    writeln!(out, "{}", header.join("\t"))?;
    for r in index {
        write!(
            out,
            "{}\t{}\t{}\t{}\t{}\t{}",
            r.sentence_id,
            r.position,
            escape(&r.token),
            escape(&r.left_context),
            escape(&r.right_context),
            r.tag.as_deref().map(escape).unwrap_or_default()
        )?;
        for v in &r.embedding {
            write!(out, "\t{v}")?;
        }
        writeln!(out)?;
    }
    Ok(())
}

/// Reads a file written by [`export_embeddings_tsv`]. Snippets are not stored
/// and come back empty; an empty tag column reads as `None`.
pub fn read_embeddings_tsv<S: Scalar, R: BufRead>(reader: R, source: &str) -> Result<Vec<TokenRecord<S>>> {
    let mut lines = reader.lines().enumerate();
    let header = match lines.next() {
        Some((_, l)) => l.map_err(|e| Error::io(source, e))?,
        None => return Err(Error::parse(source, 1, "missing header")),
    };
    let cols: Vec<&str> = header.split('\t').collect();
    if cols.len() < TSV_COLUMNS.len() || cols[..TSV_COLUMNS.len()] != TSV_COLUMNS {
        return Err(Error::parse(source, 1, "unexpected header"));
    }
    let dim = cols.len() - TSV_COLUMNS.len();
    let mut out = Vec::new();
    for (idx, line) in lines {
        let line = line.map_err(|e| Error::io(source, e))?;
        if line.is_empty() {
            continue;
        }
        let lineno = idx + 1;
        let f: Vec<&str> = line.split('\t').collect();
        if f.len() != cols.len() {
            return Err(Error::parse(
                source,
                lineno,
                format!("expected {} columns, found {}", cols.len(), f.len()),
            ));
        }
        let num = |s: &str, what: &str| -> Result<usize> {
            s.parse()
                .map_err(|_| Error::parse(source, lineno, format!("bad {what} {s:?}")))
        };
        let embedding = f[TSV_COLUMNS.len()..]
            .iter()
            .map(|v| {
                v.parse::<f64>()
                    .map(S::lit)
                    .map_err(|_| Error::parse(source, lineno, format!("bad float {v:?}")))
            })
            .collect::<Result<Vec<S>>>()?;
        debug_assert_eq!(embedding.len(), dim);
        out.push(TokenRecord {
            sentence_id: num(f[0], "sentence id")?,
            position: num(f[1], "position")?,
            token: unescape(f[2]),
            left_context: unescape(f[3]),
            right_context: unescape(f[4]),
            tag: (!f[5].is_empty()).then(|| unescape(f[5])),
            embedding,
            snippet: String::new(),
        });
    }
    Ok(out)
}
