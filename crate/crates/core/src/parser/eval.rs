use std::collections::HashSet;
use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use super::corpus::ParsedSentence;
use super::model::ParserModel;
use crate::error::{check_len, Error, Result};
use crate::input::InputSources;
use crate::scalar::Scalar;

/// Precision, recall and F1, all in percent.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AttachmentScores {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

fn arcs(corpus: &[ParsedSentence]) -> HashSet<(usize, usize, usize)> {
    corpus
        .iter()
        .enumerate()
        .flat_map(|(s, sent)| {
            sent.heads
                .iter()
                .zip(&sent.selected)
                .enumerate()
                .filter_map(move |(k, (h, &sel))| h.filter(|_| sel).map(|h| (s, k + 1, h)))
        })
        .collect()
}

/// Compares (sentence, child, head) arc sets over each side's own token
/// selection. An empty side scores 0 for the ratio it divides.
pub fn attachment_f1(predicted: &[ParsedSentence], gold: &[ParsedSentence]) -> Result<AttachmentScores> {
    check_len("parsed sentence count", gold.len(), predicted.len())?;
    for (p, g) in predicted.iter().zip(gold) {
        check_len("parsed sentence length", g.len(), p.len())?;
    }
    let p = arcs(predicted);
    let g = arcs(gold);
    let hit = p.intersection(&g).count() as f64;
    let ratio = |den: usize| if den == 0 { 0.0 } else { 100.0 * hit / den as f64 };
    let precision = ratio(p.len());
    let recall = ratio(g.len());
    let f1 = if precision + recall == 0.0 {
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    };
    Ok(AttachmentScores { precision, recall, f1 })
}

/// One line per (child, candidate) pair: `sentence_id<TAB>i<TAB>j<TAB>score`
/// with 0-based sentence ids and six decimals.
pub fn export_arc_scores<S: Scalar, W: Write>(
    model: &ParserModel<S>,
    sources: &InputSources<'_, S>,
    corpus: &[ParsedSentence],
    mut out: W,
) -> Result<usize> {
    model.check_sources(sources)?;
    let mut lines = 0;
    for (sid, sent) in corpus.iter().enumerate() {
        let prep = model.prepare(sources, sent)?;
        for i in sent.selected_positions() {
            let (cands, scores) = model.candidate_scores(sources, sent, &prep, i)?;
            for (j, s) in cands.into_iter().zip(scores) {
                writeln!(out, "{sid}\t{i}\t{j}\t{:.6}", s.as_f64()).map_err(|e| Error::io("arc score output", e))?;
                lines += 1;
            }
        }
    }
    Ok(lines)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArcScoreLine {
    pub sentence: usize,
    pub child: usize,
    pub parent: usize,
    pub score: f64,
}

pub fn read_arc_scores<R: BufRead>(reader: R, source: &str) -> Result<Vec<ArcScoreLine>> {
    let mut out = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| Error::io(source, e))?;
        if line.is_empty() {
            continue;
        }
        let bad = || Error::parse(source, idx + 1, "expected sentence<TAB>child<TAB>parent<TAB>score");
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != 4 {
            return Err(bad());
        }
        out.push(ArcScoreLine {
            sentence: cols[0].parse().map_err(|_| bad())?,
            child: cols[1].parse().map_err(|_| bad())?,
            parent: cols[2].parse().map_err(|_| bad())?,
            score: cols[3].parse().map_err(|_| bad())?,
        });
    }
    Ok(out)
}
