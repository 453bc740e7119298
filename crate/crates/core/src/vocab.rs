//! Vocabulary, fixed type embeddings and word2vec text IO.
//!
//! Corpus words get ids `0..n` in file order; the three reserved symbols
//! follow as `n` (BOS), `n + 1` (EOS) and `n + 2` (UNK). Reserved rows are
//! zero and are never looked up by string: a corpus word spelled `<unk>` is an
//! ordinary word.

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::error::{check_len, Error, Result};
use crate::nn::Matrix;
use crate::scalar::Scalar;

pub const BOS_SYMBOL: &str = "<s>";
pub const EOS_SYMBOL: &str = "</s>";
pub const UNK_SYMBOL: &str = "<unk>";

#[derive(Debug, Clone, PartialEq)]
pub struct Vocabulary {
    words: Vec<String>,
    index: HashMap<String, usize>,
}

impl Vocabulary {
    pub fn new<I, W>(words: I) -> Result<Self>
    where
        I: IntoIterator<Item = W>,
        W: Into<String>,
    {
        let mut vocab = Self {
            words: Vec::new(),
            index: HashMap::new(),
        };
        for w in words {
            let w = w.into();
            if vocab.index.contains_key(&w) {
                return Err(Error::InvalidArgument(format!("duplicate word {w:?}")));
            }
            vocab.index.insert(w.clone(), vocab.words.len());
            vocab.words.push(w);
        }
        Ok(vocab)
    }

    /// Number of ids including the three reserved symbols.
    pub fn len(&self) -> usize {
        self.words.len() + 3
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn num_words(&self) -> usize {
        self.words.len()
    }

    pub fn words(&self) -> &[String] {
        &self.words
    }

    pub fn bos(&self) -> usize {
        self.words.len()
    }

    pub fn eos(&self) -> usize {
        self.words.len() + 1
    }

    pub fn unk(&self) -> usize {
        self.words.len() + 2
    }

    pub fn get(&self, word: &str) -> Option<usize> {
        self.index.get(word).copied()
    }

    /// Id of `word`, or UNK.
    pub fn id(&self, word: &str) -> usize {
        self.get(word).unwrap_or_else(|| self.unk())
    }

    pub fn ids<S: AsRef<str>>(&self, sentence: &[S]) -> Vec<usize> {
        sentence.iter().map(|w| self.id(w.as_ref())).collect()
    }

    pub fn word(&self, id: usize) -> Option<&str> {
        match id {
            i if i < self.words.len() => Some(&self.words[i]),
            i if i == self.bos() => Some(BOS_SYMBOL),
            i if i == self.eos() => Some(EOS_SYMBOL),
            i if i == self.unk() => Some(UNK_SYMBOL),
            _ => None,
        }
    }

    pub fn is_reserved(&self, id: usize) -> bool {
        id >= self.words.len()
    }
}

/// Vocabulary plus one fixed `dim`-length vector per id.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingTable<S> {
    vocab: Vocabulary,
    vectors: Matrix<S>,
}

impl<S: Scalar> EmbeddingTable<S> {
    /// Builds a table from `(word, vector)` pairs; reserved rows are zero.
    pub fn from_pairs<I, W>(dim: usize, pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (W, Vec<S>)>,
        W: Into<String>,
    {
        let mut words = Vec::new();
        let mut data = Vec::new();
        for (w, v) in pairs {
            check_len("embedding row", dim, v.len())?;
            words.push(w.into());
            data.extend(v);
        }
        let vocab = Vocabulary::new(words)?;
        data.extend(std::iter::repeat_n(S::zero(), 3 * dim));
        let vectors = Matrix::from_vec(vocab.len(), dim, data)?;
        Ok(Self { vocab, vectors })
    }

    pub fn from_matrix(vocab: Vocabulary, vectors: Matrix<S>) -> Result<Self> {
        check_len("embedding rows", vocab.len(), vectors.rows())?;
        Ok(Self { vocab, vectors })
    }

    pub fn vocab(&self) -> &Vocabulary {
        &self.vocab
    }

    pub fn dim(&self) -> usize {
        self.vectors.cols()
    }

    pub fn vectors(&self) -> &Matrix<S> {
        &self.vectors
    }

    pub fn row(&self, id: usize) -> &[S] {
        self.vectors.row(id)
    }

    /// Row for `word`, or the UNK row when it is out of vocabulary.
    pub fn lookup(&self, word: &str) -> &[S] {
        self.vectors.row(self.vocab.id(word))
    }

    /// Parses the word2vec text format: a `<count> <dim>` header, then one
    /// `<word> <dim floats>` line per word.
    pub fn read_word2vec<R: BufRead>(reader: R, source: &str) -> Result<Self> {
        let mut lines = reader.lines().enumerate();
        let (count, dim) = match lines.next() {
            Some((_, line)) => {
                let line = line.map_err(|e| Error::io(source, e))?;
                let mut parts = line.split_whitespace();
                let parsed = match (parts.next(), parts.next(), parts.next()) {
                    (Some(c), Some(d), None) => c.parse::<usize>().ok().zip(d.parse::<usize>().ok()),
                    _ => None,
                };
                parsed.ok_or_else(|| Error::parse(source, 1, format!("malformed header {line:?}, expected \"<count> <dim>\"")))?
            }
            None => return Err(Error::parse(source, 1, "empty file, expected \"<count> <dim>\" header")),
        };
        let mut words = Vec::with_capacity(count);
        let mut seen = HashMap::with_capacity(count);
        let mut data = Vec::with_capacity((count + 3) * dim);
        for (idx, line) in lines {
            let lineno = idx + 1;
            let line = line.map_err(|e| Error::io(source, e))?;
            if line.trim().is_empty() {
                continue;
            }
            if words.len() == count {
                return Err(Error::parse(
                    source,
                    lineno,
                    format!("more entries than the {count} declared in the header"),
                ));
            }
            let mut parts = line.split(' ').filter(|p| !p.is_empty());
            let word = parts.next().unwrap_or_default().to_string();
            let mut n = 0;
            for p in parts {
                let v: f64 = p
                    .parse()
                    .map_err(|_| Error::parse(source, lineno, format!("invalid float {p:?}")))?;
                data.push(S::lit(v));
                n += 1;
            }
            if n != dim {
                return Err(Error::parse(
                    source,
                    lineno,
                    format!("expected {dim} floats for {word:?}, found {n}"),
                ));
            }
            if let Some(first) = seen.insert(word.clone(), lineno) {
                return Err(Error::parse(
                    source,
                    lineno,
                    format!("duplicate word {word:?} (first on line {first})"),
                ));
            }
            words.push(word);
        }
        if words.len() != count {
            return Err(Error::parse(
                source,
                1,
                format!("header declares {count} entries, file has {}", words.len()),
            ));
        }
        data.extend(std::iter::repeat_n(S::zero(), 3 * dim));
        let vocab = Vocabulary::new(words)?;
        let vectors = Matrix::from_vec(vocab.len(), dim, data)?;
        Ok(Self { vocab, vectors })
    }

    /// Writes corpus words only; reserved symbols are implicit.
    pub fn write_word2vec<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "{} {}", self.vocab.num_words(), self.dim())?;
        for (id, word) in self.vocab.words().iter().enumerate() {
            write!(out, "{word}")?;
            for v in self.row(id) {
                write!(out, " {v}")?;
            }
            writeln!(out)?;
        }
        Ok(())
    }
}

pub fn load_word2vec_text<S: Scalar>(path: impl AsRef<Path>) -> Result<EmbeddingTable<S>> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    EmbeddingTable::read_word2vec(BufReader::new(file), &path.display().to_string())
}

pub fn save_word2vec_text<S: Scalar>(table: &EmbeddingTable<S>, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = BufWriter::new(file);
    table
        .write_word2vec(&mut out)
        .and_then(|_| out.flush())
        .map_err(|e| Error::io(path, e))
}

/// One sentence per line, tokens separated by spaces; blank lines are skipped.
pub fn read_corpus(path: impl AsRef<Path>) -> Result<Vec<Vec<String>>> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut out = Vec::new();
    for line in BufReader::new(file).lines() {
        let line = line.map_err(|e| Error::io(path, e))?;
        let toks: Vec<String> = line.split(' ').filter(|t| !t.is_empty()).map(str::to_string).collect();
        if !toks.is_empty() {
            out.push(toks);
        }
    }
    Ok(out)
}
