//! Seeded synthetic corpora shared by the integration tests.
#![allow(dead_code)]

use rand::seq::SliceRandom;
use rand::Rng as _;
use tokembed::nn::random_vec;
use tokembed::parser::ParsedSentence;
use tokembed::rng::{stream, Rng, Stream};
use tokembed::tagger::{TaggedSentence, Tagset};
use tokembed::vocab::EmbeddingTable;
use tokembed::Scalar;

pub fn rng(seed: u64) -> Rng {
    stream(seed, Stream::Synthetic)
}

/// Uniform random vectors in `[-1, 1]` for each word.
pub fn random_table<S: Scalar>(words: &[String], dim: usize, seed: u64) -> EmbeddingTable<S> {
    let mut r = rng(seed);
    EmbeddingTable::from_pairs(dim, words.iter().map(|w| (w.clone(), random_vec(dim, 1.0, &mut r)))).unwrap()
}

pub fn words(prefix: &str, n: usize) -> Vec<String> {
    (0..n).map(|i| format!("{prefix}{i}")).collect()
}

/// Sentences of 5 to 10 words over `w0 .. w{types-1}`: a random first word,
/// then each word is followed by its successor modulo `types`.
pub fn successor_corpus(sentences: usize, types: usize, seed: u64) -> Vec<Vec<String>> {
    let mut r = rng(seed);
    (0..sentences)
        .map(|_| {
            let len = r.gen_range(5..=10);
            let start = r.gen_range(0..types);
            (0..len).map(|k| format!("w{}", (start + k) % types)).collect()
        })
        .collect()
}

/// A sentence containing the pivot `p` once, in template `t`.
#[derive(Debug, Clone)]
pub struct PivotSentence {
    pub tokens: Vec<String>,
    pub position: usize,
    pub template: usize,
}

pub const PIVOT: &str = "p";

/// Template 0 surrounds the pivot with `al*` / `ar*` words, template 1 with
/// `bl*` / `br*` words; filler words `f*` pad both sides. Templates
/// alternate so each one covers exactly half of the sentences.
pub fn pivot_corpus(sentences: usize, seed: u64) -> Vec<PivotSentence> {
    pivot_sentences(sentences, seed, false)
}

/// Like [`pivot_corpus`], but the right neighbour comes from a shared `r*`
/// pool, so only the left neighbour tells the templates apart.
pub fn left_neighbour_corpus(sentences: usize, seed: u64) -> Vec<PivotSentence> {
    pivot_sentences(sentences, seed, true)
}

fn pivot_sentences(sentences: usize, seed: u64, shared_right: bool) -> Vec<PivotSentence> {
    let mut r = rng(seed);
    (0..sentences)
        .map(|k| {
            let template = k % 2;
            let (l, rr) = match (template, shared_right) {
                (_, true) => (["al", "bl"][template], "r"),
                (0, false) => ("al", "ar"),
                _ => ("bl", "br"),
            };
            let mut tokens: Vec<String> = (0..r.gen_range(0..3)).map(|_| format!("f{}", r.gen_range(0..6))).collect();
            tokens.push(format!("{l}{}", r.gen_range(0..4)));
            let position = tokens.len();
            tokens.push(PIVOT.to_string());
            tokens.push(format!("{rr}{}", r.gen_range(0..4)));
            tokens.extend((0..r.gen_range(0..3)).map(|_| format!("f{}", r.gen_range(0..6))));
            PivotSentence {
                tokens,
                position,
                template,
            }
        })
        .collect()
}

pub fn pivot_vocabulary() -> Vec<String> {
    let mut v = vec![PIVOT.to_string()];
    for p in ["al", "ar", "bl", "br", "r"] {
        v.extend(words(p, 4));
    }
    v.extend(words("f", 6));
    v
}

/// Tags for the left-neighbour corpus: `X`/`Y` for the pivot by template,
/// `L` for template words, `F` for fillers.
pub fn pivot_tagset() -> Tagset {
    Tagset::new(["X", "Y", "L", "F"]).unwrap()
}

pub fn pivot_tagged(corpus: &[PivotSentence]) -> Vec<TaggedSentence> {
    let ts = pivot_tagset();
    corpus
        .iter()
        .map(|s| TaggedSentence {
            tokens: s.tokens.clone(),
            tags: s
                .tokens
                .iter()
                .enumerate()
                .map(|(k, t)| {
                    let tag = if k == s.position {
                        ["X", "Y"][s.template]
                    } else if t.starts_with('f') {
                        "F"
                    } else {
                        "L"
                    };
                    ts.id(tag).unwrap()
                })
                .collect(),
        })
        .collect()
}

/// Tokens 1..n of length 1 to `max_len`; token 1 attaches to the wall and
/// token i to token i - 1. Every token is selected.
pub fn chain_corpus(sentences: usize, max_len: usize, vocab: &[String], seed: u64) -> Vec<ParsedSentence> {
    let mut r = rng(seed);
    (0..sentences)
        .map(|_| {
            let n = r.gen_range(1..=max_len);
            let tokens: Vec<String> = (0..n).map(|_| vocab.choose(&mut r).unwrap().clone()).collect();
            ParsedSentence {
                tokens,
                heads: (0..n).map(Some).collect(),
                selected: vec![true; n],
            }
        })
        .collect()
}

/// A random sentence of `n` tokens with random selection and random valid
/// heads for the selected tokens.
pub fn random_parsed(n: usize, vocab: &[String], r: &mut Rng) -> ParsedSentence {
    let tokens: Vec<String> = (0..n).map(|_| vocab.choose(r).unwrap().clone()).collect();
    let mut selected: Vec<bool> = (0..n).map(|_| r.gen_bool(0.8)).collect();
    if !selected.iter().any(|&s| s) {
        selected[0] = true;
    }
    let mut s = ParsedSentence {
        tokens,
        heads: vec![None; n],
        selected,
    };
    for i in 1..=n {
        if s.selected[i - 1] {
            s.heads[i - 1] = Some(*s.candidates(i).choose(r).unwrap());
        }
    }
    s
}
