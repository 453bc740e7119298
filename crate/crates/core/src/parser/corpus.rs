use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use crate::error::{Error, Result};

/// Tokens with token-selection flags and 1-based heads (`Some(0)` is the wall).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParsedSentence {
    pub tokens: Vec<String>,
    pub heads: Vec<Option<usize>>,
    pub selected: Vec<bool>,
}

impl ParsedSentence {
    /// A sentence with every token selected and no heads.
    pub fn unparsed<T: Into<String>>(tokens: impl IntoIterator<Item = T>) -> Self {
        let tokens: Vec<String> = tokens.into_iter().map(Into::into).collect();
        let n = tokens.len();
        Self {
            tokens,
            heads: vec![None; n],
            selected: vec![true; n],
        }
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    /// Candidate parents of child `i` (1-based): the wall, then every other
    /// selected token in order.
    pub fn candidates(&self, i: usize) -> Vec<usize> {
        std::iter::once(0)
            .chain((1..=self.len()).filter(|&j| j != i && self.selected[j - 1]))
            .collect()
    }

    /// 1-based positions of selected tokens.
    pub fn selected_positions(&self) -> impl Iterator<Item = usize> + '_ {
        self.selected.iter().enumerate().filter(|(_, &s)| s).map(|(k, _)| k + 1)
    }

    /// Unselected tokens carry no head; heads point to the wall or another
    /// selected token.
    pub fn validate(&self) -> Result<()> {
        let n = self.len();
        if self.heads.len() != n || self.selected.len() != n {
            return Err(Error::InvalidArgument(
                "heads/selection length differs from token count".into(),
            ));
        }
        for (k, (&h, &sel)) in self.heads.iter().zip(&self.selected).enumerate() {
            let i = k + 1;
            match h {
                Some(_) if !sel => return Err(Error::InvalidArgument(format!("unselected token {i} has a head"))),
                Some(h) if h == i => return Err(Error::InvalidArgument(format!("token {i} is its own head"))),
                Some(h) if h > n => return Err(Error::OutOfRange { index: h, len: n + 1 }),
                Some(h) if h > 0 && !self.selected[h - 1] => {
                    return Err(Error::InvalidArgument(format!("head of token {i} is unselected token {h}")))
                }
                _ => {}
            }
        }
        Ok(())
    }
}

/// Reads `index<TAB>token<TAB>head<TAB>selected` lines; head `-1` with
/// selected `0` marks a token outside the structure.
pub fn read_parsed<R: BufRead>(reader: R, source: &str) -> Result<Vec<ParsedSentence>> {
    let mut out = Vec::new();
    let mut cur = ParsedSentence::unparsed(Vec::<String>::new());
    let mut start = 1;
    let finish = |cur: &mut ParsedSentence, out: &mut Vec<ParsedSentence>, start: usize| -> Result<()> {
        if !cur.is_empty() {
            cur.validate().map_err(|e| Error::parse(source, start, e.to_string()))?;
            out.push(std::mem::replace(cur, ParsedSentence::unparsed(Vec::<String>::new())));
        }
        Ok(())
    };
    for (idx, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| Error::io(source, e))?;
        let lineno = idx + 1;
        if line.trim().is_empty() {
            finish(&mut cur, &mut out, start)?;
            continue;
        }
        if cur.is_empty() {
            start = lineno;
        }
        let cols: Vec<&str> = line.trim_end_matches(['\r', '\n']).split('\t').collect();
        if cols.len() != 4 {
            return Err(Error::parse(
                source,
                lineno,
                format!("expected 4 tab-separated columns, found {}", cols.len()),
            ));
        }
        let index: usize = cols[0]
            .parse()
            .map_err(|_| Error::parse(source, lineno, format!("bad index {:?}", cols[0])))?;
        if index != cur.len() + 1 {
            return Err(Error::parse(
                source,
                lineno,
                format!("expected index {}, found {index}", cur.len() + 1),
            ));
        }
        let head: i64 = cols[2]
            .parse()
            .map_err(|_| Error::parse(source, lineno, format!("bad head {:?}", cols[2])))?;
        let selected = match cols[3] {
            "1" => true,
            "0" => false,
            s => {
                return Err(Error::parse(
                    source,
                    lineno,
                    format!("selected flag must be 0 or 1, found {s:?}"),
                ))
            }
        };
        let head = match head {
            -1 => None,
            h if h >= 0 => Some(h as usize),
            h => return Err(Error::parse(source, lineno, format!("bad head {h}"))),
        };
        cur.tokens.push(cols[1].to_string());
        cur.heads.push(head);
        cur.selected.push(selected);
    }
    finish(&mut cur, &mut out, start)?;
    Ok(out)
}

pub fn load_parsed(path: impl AsRef<Path>) -> Result<Vec<ParsedSentence>> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_parsed(BufReader::new(file), &path.display().to_string())
}

pub fn write_parsed<W: Write>(mut out: W, corpus: &[ParsedSentence]) -> std::io::Result<()> {
    for (k, s) in corpus.iter().enumerate() {
        if k > 0 {
            writeln!(out)?;
        }
        for (i, tok) in s.tokens.iter().enumerate() {
            let head = s.heads[i].map_or(-1, |h| h as i64);
            writeln!(out, "{}\t{tok}\t{head}\t{}", i + 1, u8::from(s.selected[i]))?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    const TEXT: &str = "1\tI\t2\t1\n2\tlove\t0\t1\n3\t#yolo\t-1\t0\n\n1\tok\t0\t1\n";

    #[test]
    fn read_write_round_trip() {
        let c = read_parsed(TEXT.as_bytes(), "mem").unwrap();
        assert_eq!(c.len(), 2);
        assert_eq!(c[0].heads, vec![Some(2), Some(0), None]);
        assert_eq!(c[0].selected, vec![true, true, false]);
        let mut buf = Vec::new();
        write_parsed(&mut buf, &c).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), TEXT);
    }

    #[test]
    fn candidates_skip_self_and_unselected() {
        let c = read_parsed(TEXT.as_bytes(), "mem").unwrap();
        assert_eq!(c[0].candidates(1), vec![0, 2]);
        assert_eq!(c[0].selected_positions().collect::<Vec<_>>(), vec![1, 2]);
    }

    #[test]
    fn malformed_lines_name_position() {
        let err = read_parsed("1\ta\t0\n".as_bytes(), "f").unwrap_err().to_string();
        assert!(err.starts_with("f:1:"), "{err}");
        assert!(read_parsed("2\ta\t0\t1\n".as_bytes(), "f").is_err());
        assert!(read_parsed("1\ta\t2\t1\n2\tb\t-1\t0\n".as_bytes(), "f").is_err());
        assert!(read_parsed("1\ta\t0\t0\n".as_bytes(), "f").is_err());
        assert!(read_parsed("1\ta\t1\t1\n".as_bytes(), "f").is_err());
    }
}
