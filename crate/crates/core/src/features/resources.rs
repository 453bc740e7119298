use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use super::word::{starts_with_capital, word_features, WORD_FEATURE_DIM};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub const BROWN_PREFIX_LENGTHS: [usize; 4] = [2, 4, 6, 8];
pub const TOP_TAGS: usize = 3;
pub const NGRAM_MIN_COUNT: usize = 3;

/// Brown cluster paths with the observed prefix inventory per prefix length.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct BrownClusters {
    paths: HashMap<String, String>,
    /// For each length in [`BROWN_PREFIX_LENGTHS`], prefix -> slot.
    prefix_slots: Vec<BTreeMap<String, usize>>,
}

impl BrownClusters {
    pub fn new<I: IntoIterator<Item = (String, String)>>(entries: I) -> Self {
        let paths: HashMap<String, String> = entries.into_iter().collect();
        let prefix_slots = BROWN_PREFIX_LENGTHS
            .iter()
            .map(|&len| {
                let set: BTreeSet<String> = paths.values().map(|p| prefix(p, len)).collect();
                set.into_iter().enumerate().map(|(i, p)| (p, i)).collect()
            })
            .collect();
        Self { paths, prefix_slots }
    }

    /// Lines `bitstring<TAB>word<TAB>count`.
    pub fn read<R: BufRead>(reader: R, source: &str) -> Result<Self> {
        let mut entries = Vec::new();
        for (idx, line) in reader.lines().enumerate() {
            let line = line.map_err(|e| Error::io(source, e))?;
            if line.is_empty() {
                continue;
            }
            let cols: Vec<&str> = line.split('\t').collect();
            if cols.len() != 3 {
                return Err(Error::parse(source, idx + 1, "expected bitstring<TAB>word<TAB>count"));
            }
            if cols[0].is_empty() || !cols[0].chars().all(|c| c == '0' || c == '1') {
                return Err(Error::parse(source, idx + 1, format!("bad cluster path {:?}", cols[0])));
            }
            cols[2]
                .parse::<u64>()
                .map_err(|_| Error::parse(source, idx + 1, format!("bad count {:?}", cols[2])))?;
            entries.push((cols[1].to_string(), cols[0].to_string()));
        }
        Ok(Self::new(entries))
    }

    pub fn path(&self, word: &str) -> Option<&str> {
        self.paths.get(word).map(String::as_str)
    }

    pub fn width(&self) -> usize {
        self.prefix_slots.iter().map(BTreeMap::len).sum()
    }

    fn write_into<S: Scalar>(&self, word: Option<&str>, out: &mut Vec<S>) {
        let path = word.and_then(|w| self.path(w));
        for (slots, &len) in self.prefix_slots.iter().zip(&BROWN_PREFIX_LENGTHS) {
            let start = out.len();
            out.extend(std::iter::repeat_n(S::zero(), slots.len()));
            if let Some(slot) = path.and_then(|p| slots.get(&prefix(p, len))) {
                out[start + slot] = S::one();
            }
        }
    }
}

fn prefix(path: &str, len: usize) -> String {
    path.chars().take(len).collect()
}

/// Word -> tag counts, with tags numbered in sorted order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct TagDictionary {
    tags: Vec<String>,
    counts: HashMap<String, BTreeMap<usize, u64>>,
}

impl TagDictionary {
    pub fn new<I: IntoIterator<Item = (String, String, u64)>>(entries: I) -> Self {
        let entries: Vec<_> = entries.into_iter().collect();
        let tags: Vec<String> = entries
            .iter()
            .map(|(_, t, _)| t.clone())
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let tag_id: HashMap<&str, usize> = tags.iter().enumerate().map(|(i, t)| (t.as_str(), i)).collect();
        let mut counts: HashMap<String, BTreeMap<usize, u64>> = HashMap::new();
        for (word, tag, count) in &entries {
            *counts
                .entry(word.clone())
                .or_default()
                .entry(tag_id[tag.as_str()])
                .or_default() += count;
        }
        Self { tags, counts }
    }

    /// Lines `word<TAB>tag<TAB>count`.
    pub fn read<R: BufRead>(reader: R, source: &str) -> Result<Self> {
        let mut entries = Vec::new();
        for (idx, line) in reader.lines().enumerate() {
            let line = line.map_err(|e| Error::io(source, e))?;
            if line.is_empty() {
                continue;
            }
            let cols: Vec<&str> = line.split('\t').collect();
            if cols.len() != 3 {
                return Err(Error::parse(source, idx + 1, "expected word<TAB>tag<TAB>count"));
            }
            let count = cols[2]
                .parse::<u64>()
                .map_err(|_| Error::parse(source, idx + 1, format!("bad count {:?}", cols[2])))?;
            entries.push((cols[0].to_string(), cols[1].to_string(), count));
        }
        Ok(Self::new(entries))
    }

    pub fn tags(&self) -> &[String] {
        &self.tags
    }

    /// Up to three most frequent tag ids, ties broken by lower tag id.
    pub fn top_tags(&self, word: &str) -> Vec<usize> {
        let Some(counts) = self.counts.get(word) else {
            return Vec::new();
        };
        let mut ranked: Vec<(usize, u64)> = counts.iter().map(|(&t, &c)| (t, c)).collect();
        ranked.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
        ranked.into_iter().take(TOP_TAGS).map(|(t, _)| t).collect()
    }

    pub fn width(&self) -> usize {
        TOP_TAGS * self.tags.len()
    }

    fn write_into<S: Scalar>(&self, word: Option<&str>, out: &mut Vec<S>) {
        let start = out.len();
        out.extend(std::iter::repeat_n(S::zero(), self.width()));
        if let Some(w) = word {
            for (rank, tag) in self.top_tags(w).into_iter().enumerate() {
                out[start + rank * self.tags.len() + tag] = S::one();
            }
        }
    }
}

/// A named word list. Membership is case-insensitive.
#[derive(Debug, Clone, PartialEq)]
pub struct NameList {
    pub name: String,
    words: HashSet<String>,
}

impl NameList {
    pub fn new<I: IntoIterator<Item = String>>(name: impl Into<String>, words: I) -> Self {
        Self {
            name: name.into(),
            words: words.into_iter().map(|w| w.to_lowercase()).collect(),
        }
    }

    /// One word per line.
    pub fn read<R: BufRead>(name: impl Into<String>, reader: R, source: &str) -> Result<Self> {
        let mut words = Vec::new();
        for line in reader.lines() {
            let line = line.map_err(|e| Error::io(source, e))?;
            let w = line.trim();
            if !w.is_empty() {
                words.push(w.to_string());
            }
        }
        Ok(Self::new(name, words))
    }

    pub fn contains(&self, word: &str) -> bool {
        self.words.contains(&word.to_lowercase())
    }
}

/// Character bi/trigrams selected from training tokens, each with a feature slot.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct NgramIndex {
    slots: HashMap<String, usize>,
}

/// Character n-grams of `token` for `n` in {2, 3}, without boundary markers.
pub fn char_ngrams(token: &str) -> Vec<String> {
    let chars: Vec<char> = token.chars().collect();
    let mut out = Vec::new();
    for n in [2, 3] {
        if chars.len() >= n {
            out.extend(chars.windows(n).map(|w| w.iter().collect::<String>()));
        }
    }
    out
}

impl NgramIndex {
    /// Keeps n-grams occurring at least [`NGRAM_MIN_COUNT`] times over all
    /// token occurrences; slots follow lexicographic order.
    pub fn build<'a, I: IntoIterator<Item = &'a str>>(tokens: I) -> Self {
        let mut counts: HashMap<String, usize> = HashMap::new();
        for tok in tokens {
            for g in char_ngrams(tok) {
                *counts.entry(g).or_default() += 1;
            }
        }
        let kept: BTreeSet<String> = counts
            .into_iter()
            .filter(|(_, c)| *c >= NGRAM_MIN_COUNT)
            .map(|(g, _)| g)
            .collect();
        Self {
            slots: kept.into_iter().enumerate().map(|(i, g)| (g, i)).collect(),
        }
    }

    pub fn from_slots(slots: HashMap<String, usize>) -> Result<Self> {
        let mut seen = vec![false; slots.len()];
        for (g, &s) in &slots {
            let n = g.chars().count();
            if !(2..=3).contains(&n) {
                return Err(Error::InvalidArgument(format!("n-gram {g:?} is not a bi/trigram")));
            }
            match seen.get_mut(s) {
                Some(flag) if !*flag => *flag = true,
                _ => {
                    return Err(Error::InvalidArgument(format!(
                        "n-gram slots must be a permutation of 0..{}",
                        slots.len()
                    )))
                }
            }
        }
        Ok(Self { slots })
    }

    /// Lines `ngram<TAB>slot`.
    pub fn read<R: BufRead>(reader: R, source: &str) -> Result<Self> {
        let mut slots = HashMap::new();
        for (idx, line) in reader.lines().enumerate() {
            let line = line.map_err(|e| Error::io(source, e))?;
            if line.is_empty() {
                continue;
            }
            let (g, s) = line
                .rsplit_once('\t')
                .ok_or_else(|| Error::parse(source, idx + 1, "expected ngram<TAB>slot"))?;
            let s: usize = s
                .parse()
                .map_err(|_| Error::parse(source, idx + 1, format!("bad slot {s:?}")))?;
            if slots.insert(g.to_string(), s).is_some() {
                return Err(Error::parse(source, idx + 1, format!("duplicate n-gram {g:?}")));
            }
        }
        Self::from_slots(slots)
    }

    pub fn write<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        let mut by_slot: Vec<(&String, &usize)> = self.slots.iter().collect();
        by_slot.sort_by_key(|(_, &s)| s);
        for (g, s) in by_slot {
            writeln!(out, "{g}\t{s}")?;
        }
        Ok(())
    }

    pub fn slot(&self, ngram: &str) -> Option<usize> {
        self.slots.get(ngram).copied()
    }

    pub fn len(&self) -> usize {
        self.slots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slots.is_empty()
    }

    fn write_into<S: Scalar>(&self, word: &str, out: &mut Vec<S>) {
        let start = out.len();
        out.extend(std::iter::repeat_n(S::zero(), self.len()));
        for g in char_ngrams(word) {
            if let Some(s) = self.slot(&g) {
                out[start + s] += S::one();
            }
        }
    }
}

/// External lexical resources for the extended tagger feature stack.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ResourceBundle {
    pub brown_clusters: BrownClusters,
    pub tag_dictionary: TagDictionary,
    pub name_lists: Vec<NameList>,
    pub ngrams: NgramIndex,
}

impl ResourceBundle {
    /// Width of the per-word block repeated for the left neighbour, the
    /// centre and the right neighbour.
    pub fn neighbor_block_width(&self) -> usize {
        self.brown_clusters.width() + self.tag_dictionary.width() + WORD_FEATURE_DIM + 1
    }

    pub fn width(&self) -> usize {
        3 * self.neighbor_block_width() + self.name_lists.len() + self.ngrams.len()
    }

    fn neighbor_block<S: Scalar>(&self, word: Option<&str>, out: &mut Vec<S>) {
        self.brown_clusters.write_into(word, out);
        self.tag_dictionary.write_into(word, out);
        match word {
            Some(w) => {
                word_features(w).write_into(out);
                out.push(if starts_with_capital(w) { S::one() } else { S::zero() });
            }
            None => out.extend(std::iter::repeat_n(S::zero(), WORD_FEATURE_DIM + 1)),
        }
    }

    /// Extended features for token `position`: Brown prefixes, top tags,
    /// surface indicators and capitalization for the left neighbour, the
    /// token and the right neighbour (zeros past the sentence edge), then
    /// name-list membership and character n-gram counts of the token itself.
    pub fn extended_features<S: Scalar, T: AsRef<str>>(&self, sentence: &[T], position: usize) -> Result<Vec<S>> {
        if position >= sentence.len() {
            return Err(Error::OutOfRange {
                index: position,
                len: sentence.len(),
            });
        }
        let mut out = Vec::with_capacity(self.width());
        for offset in [-1isize, 0, 1] {
            let p = position as isize + offset;
            let word = (p >= 0 && (p as usize) < sentence.len()).then(|| sentence[p as usize].as_ref());
            self.neighbor_block(word, &mut out);
        }
        let center = sentence[position].as_ref();
        out.extend(
            self.name_lists
                .iter()
                .map(|l| if l.contains(center) { S::one() } else { S::zero() }),
        );
        self.ngrams.write_into(center, &mut out);
        Ok(out)
    }
}

pub fn extended_features<S: Scalar, T: AsRef<str>>(
    resources: &ResourceBundle,
    sentence: &[T],
    position: usize,
) -> Result<Vec<S>> {
    resources.extended_features(sentence, position)
}

fn open(path: &Path) -> Result<BufReader<File>> {
    File::open(path).map(BufReader::new).map_err(|e| Error::io(path, e))
}

pub fn load_brown_clusters(path: impl AsRef<Path>) -> Result<BrownClusters> {
    let path = path.as_ref();
    BrownClusters::read(open(path)?, &path.display().to_string())
}

pub fn load_tag_dictionary(path: impl AsRef<Path>) -> Result<TagDictionary> {
    let path = path.as_ref();
    TagDictionary::read(open(path)?, &path.display().to_string())
}

/// The list is named after the file stem.
pub fn load_name_list(path: impl AsRef<Path>) -> Result<NameList> {
    let path = path.as_ref();
    let name = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    NameList::read(name, open(path)?, &path.display().to_string())
}

pub fn load_ngram_index(path: impl AsRef<Path>) -> Result<NgramIndex> {
    let path = path.as_ref();
    NgramIndex::read(open(path)?, &path.display().to_string())
}

pub fn save_ngram_index(index: &NgramIndex, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = BufWriter::new(file);
    index
        .write(&mut out)
        .and_then(|_| out.flush())
        .map_err(|e| Error::io(path, e))
}
