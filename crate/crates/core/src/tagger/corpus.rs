use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use rand::seq::index::sample;

use crate::error::{Error, Result};
use crate::rng::{stream, Stream};

/// Tag inventory; a tag's id is its line number (from 0) in the tagset file.
#[derive(Debug, Clone, PartialEq)]
pub struct Tagset {
    tags: Vec<String>,
    index: HashMap<String, usize>,
}

impl Tagset {
    pub fn new<I, T>(tags: I) -> Result<Self>
    where
        I: IntoIterator<Item = T>,
        T: Into<String>,
    {
        let tags: Vec<String> = tags.into_iter().map(Into::into).collect();
        if tags.is_empty() {
            return Err(Error::InvalidConfig("empty tagset".into()));
        }
        let mut index = HashMap::new();
        for (i, t) in tags.iter().enumerate() {
            if index.insert(t.clone(), i).is_some() {
                return Err(Error::InvalidConfig(format!("duplicate tag {t:?}")));
            }
        }
        Ok(Self { tags, index })
    }

    pub fn read<R: BufRead>(reader: R, source: &str) -> Result<Self> {
        let mut tags = Vec::new();
        for line in reader.lines() {
            let line = line.map_err(|e| Error::io(source, e))?;
            let t = line.trim();
            if !t.is_empty() {
                tags.push(t.to_string());
            }
        }
        Self::new(tags)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        Self::read(BufReader::new(file), &path.display().to_string())
    }

    pub fn len(&self) -> usize {
        self.tags.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tags.is_empty()
    }

    pub fn tags(&self) -> &[String] {
        &self.tags
    }

    pub fn id(&self, tag: &str) -> Option<usize> {
        self.index.get(tag).copied()
    }

    pub fn tag(&self, id: usize) -> Option<&str> {
        self.tags.get(id).map(String::as_str)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TaggedSentence {
    pub tokens: Vec<String>,
    pub tags: Vec<usize>,
}

/// Reads `token<TAB>tag` lines with blank lines between sentences.
pub fn read_tagged<R: BufRead>(reader: R, tagset: &Tagset, source: &str) -> Result<Vec<TaggedSentence>> {
    let mut out = Vec::new();
    let mut cur = TaggedSentence {
        tokens: Vec::new(),
        tags: Vec::new(),
    };
    for (idx, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| Error::io(source, e))?;
        if line.trim().is_empty() {
            if !cur.tokens.is_empty() {
                out.push(std::mem::replace(
                    &mut cur,
                    TaggedSentence {
                        tokens: Vec::new(),
                        tags: Vec::new(),
                    },
                ));
            }
            continue;
        }
        let (tok, tag) = line
            .split_once('\t')
            .ok_or_else(|| Error::parse(source, idx + 1, "expected token<TAB>tag"))?;
        let id = tagset
            .id(tag.trim_end())
            .ok_or_else(|| Error::parse(source, idx + 1, format!("tag {tag:?} not in tagset")))?;
        cur.tokens.push(tok.to_string());
        cur.tags.push(id);
    }
    if !cur.tokens.is_empty() {
        out.push(cur);
    }
    Ok(out)
}

pub fn load_tagged(path: impl AsRef<Path>, tagset: &Tagset) -> Result<Vec<TaggedSentence>> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_tagged(BufReader::new(file), tagset, &path.display().to_string())
}

pub fn write_tagged<W: Write>(mut out: W, corpus: &[TaggedSentence], tagset: &Tagset) -> std::io::Result<()> {
    for (k, s) in corpus.iter().enumerate() {
        if k > 0 {
            writeln!(out)?;
        }
        for (tok, &tag) in s.tokens.iter().zip(&s.tags) {
            writeln!(out, "{tok}\t{}", tagset.tag(tag).unwrap_or("?"))?;
        }
    }
    Ok(())
}

/// A seeded subset holding `fraction` of the sentences, in original order.
pub fn subsample<T: Clone>(corpus: &[T], fraction: f64, seed: u64) -> Result<Vec<T>> {
    if !(fraction > 0.0 && fraction <= 1.0) {
        return Err(Error::InvalidConfig(format!("subsample fraction {fraction} not in (0, 1]")));
    }
    let n = ((corpus.len() as f64 * fraction).round() as usize).clamp(1.min(corpus.len()), corpus.len());
    let mut rng = stream(seed, Stream::Subsample);
    let mut idx = sample(&mut rng, corpus.len(), n).into_vec();
    idx.sort_unstable();
    Ok(idx.into_iter().map(|i| corpus[i].clone()).collect())
}
