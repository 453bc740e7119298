//! Input assembly shared by the tagger and the parser.

use serde::{Deserialize, Serialize};

use crate::encoder::{Architecture, EncoderModel, WindowAutoencoder};
use crate::error::{check_len, Error, Result};
use crate::features::{word_features, ResourceBundle, WORD_FEATURE_DIM};
use crate::nn::Matrix;
use crate::scalar::Scalar;
use crate::vocab::EmbeddingTable;

/// The frozen inputs a predictor reads from: type embeddings, token
/// encoders (never updated by predictor training) and optional resources.
#[derive(Debug, Clone, Copy)]
pub struct InputSources<'a, S> {
    pub table: &'a EmbeddingTable<S>,
    pub encoders: &'a [EncoderModel<S>],
    pub resources: Option<&'a ResourceBundle>,
}

impl<'a, S: Scalar> InputSources<'a, S> {
    pub fn new(table: &'a EmbeddingTable<S>) -> Self {
        Self {
            table,
            encoders: &[],
            resources: None,
        }
    }

    pub fn with_encoders(mut self, encoders: &'a [EncoderModel<S>]) -> Self {
        self.encoders = encoders;
        self
    }

    pub fn with_resources(mut self, resources: &'a ResourceBundle) -> Self {
        self.resources = Some(resources);
        self
    }

    pub fn encoder_specs(&self) -> Vec<EncoderSpec> {
        self.encoders.iter().map(EncoderSpec::of).collect()
    }

    pub fn token_embedding_width(&self) -> usize {
        self.encoders.iter().map(|e| e.embedding_dim()).sum()
    }
}

/// What a predictor records about each encoder it was trained with.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EncoderSpec {
    pub architecture: Architecture,
    pub radius: usize,
    pub type_dim: usize,
    pub embedding_dim: usize,
}

impl EncoderSpec {
    pub fn of<S: Scalar>(encoder: &EncoderModel<S>) -> Self {
        Self {
            architecture: encoder.architecture(),
            radius: encoder.radius(),
            type_dim: encoder.type_dim(),
            embedding_dim: encoder.embedding_dim(),
        }
    }
}

pub(crate) fn check_encoders<S: Scalar>(expected: &[EncoderSpec], sources: &InputSources<'_, S>) -> Result<()> {
    if expected.len() != sources.encoders.len() {
        return Err(Error::InvalidConfig(format!(
            "model expects {} token encoders, {} supplied",
            expected.len(),
            sources.encoders.len()
        )));
    }
    for (k, (spec, enc)) in expected.iter().zip(sources.encoders).enumerate() {
        let got = EncoderSpec::of(enc);
        if *spec != got {
            return Err(Error::InvalidConfig(format!(
                "token encoder {k}: model expects {spec:?}, supplied {got:?}"
            )));
        }
        check_len("encoder type embedding width", sources.table.dim(), enc.type_dim())?;
    }
    Ok(())
}

/// Per-token quantities that do not change during predictor training.
#[derive(Debug, Clone)]
pub struct PreparedSentence<S> {
    pub tokens: Vec<String>,
    pub ids: Vec<usize>,
    /// Concatenated token embeddings of every encoder, per token.
    pub token_embeddings: Vec<Vec<S>>,
    /// Surface indicators and, when enabled, the extended stack, per token.
    pub word_features: Vec<Vec<S>>,
}

impl<S> PreparedSentence<S> {
    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }
}

pub fn prepare_sentence<S: Scalar, T: AsRef<str>>(
    sources: &InputSources<'_, S>,
    tokens: &[T],
    surface_features: bool,
    extended_features: bool,
) -> Result<PreparedSentence<S>> {
    let table = sources.table;
    let tokens: Vec<String> = tokens.iter().map(|t| t.as_ref().to_string()).collect();
    let ids = table.vocab().ids(&tokens);
    let resources = match (extended_features, sources.resources) {
        (true, None) => {
            return Err(Error::InvalidConfig(
                "extended features enabled but no resources loaded".into(),
            ))
        }
        (true, Some(r)) => Some(r),
        (false, _) => None,
    };
    let mut token_embeddings = Vec::with_capacity(tokens.len());
    let mut feats = Vec::with_capacity(tokens.len());
    for j in 0..tokens.len() {
        let mut te = Vec::with_capacity(sources.token_embedding_width());
        for enc in sources.encoders {
            te.extend(enc.encode_token(table, &ids, j)?);
        }
        token_embeddings.push(te);
        let mut f = Vec::new();
        if surface_features {
            word_features(&tokens[j]).write_into(&mut f);
        }
        if let Some(r) = resources {
            f.extend(r.extended_features::<S, _>(&tokens, j)?);
        }
        feats.push(f);
    }
    Ok(PreparedSentence {
        tokens,
        ids,
        token_embeddings,
        word_features: feats,
    })
}

/// Width of the per-token feature block produced by [`prepare_sentence`].
pub fn feature_width(surface: bool, extended: Option<&ResourceBundle>) -> usize {
    (if surface { WORD_FEATURE_DIM } else { 0 }) + extended.map_or(0, ResourceBundle::width)
}

/// Type-embedding rows, either the fixed table or a predictor's tuned copy.
#[derive(Debug, Clone, Copy)]
pub(crate) struct EmbeddingView<'a, S> {
    pub table: &'a EmbeddingTable<S>,
    pub tuned: Option<&'a Matrix<S>>,
}

impl<'a, S: Scalar> EmbeddingView<'a, S> {
    pub fn row(&self, id: usize) -> &'a [S] {
        match self.tuned {
            Some(m) => m.row(id),
            None => self.table.row(id),
        }
    }
}

/// Ids of positions `center - w ..= center + w`, BOS/EOS padded, optionally
/// without the centre itself.
pub(crate) fn type_window_ids(
    ids: &[usize],
    center: usize,
    radius: usize,
    omit_center: bool,
    bos: usize,
    eos: usize,
) -> Vec<usize> {
    let mut out = Vec::with_capacity(2 * radius + 1);
    for k in 0..2 * radius + 1 {
        if omit_center && k == radius {
            continue;
        }
        let p = center as isize + k as isize - radius as isize;
        out.push(if p < 0 {
            bos
        } else if p as usize >= ids.len() {
            eos
        } else {
            ids[p as usize]
        });
    }
    out
}

/// Tuned copy of the type embeddings plus the rows that may move: ids seen in
/// the training data, excluding the reserved symbols.
pub(crate) struct EmbeddingUpdater<S> {
    pub anchor: Vec<Vec<S>>,
    pub active: Vec<usize>,
    slot: std::collections::HashMap<usize, usize>,
    pub grads: Vec<Vec<S>>,
    dirty: Vec<bool>,
    opt: crate::nn::SgdMomentum<S>,
}

impl<S: Scalar> EmbeddingUpdater<S> {
    pub fn new(table: &EmbeddingTable<S>, seen: impl IntoIterator<Item = usize>, opt: crate::nn::SgdMomentum<S>) -> Self {
        let mut active: Vec<usize> = seen.into_iter().filter(|&id| !table.vocab().is_reserved(id)).collect();
        active.sort_unstable();
        active.dedup();
        let slot = active.iter().enumerate().map(|(s, &id)| (id, s)).collect();
        let anchor = active.iter().map(|&id| table.row(id).to_vec()).collect();
        let grads = vec![vec![S::zero(); table.dim()]; active.len()];
        let dirty = vec![false; active.len()];
        Self {
            anchor,
            active,
            slot,
            grads,
            dirty,
            opt,
        }
    }

    pub fn accumulate(&mut self, id: usize, grad: &[S]) {
        if let Some(&s) = self.slot.get(&id) {
            for (a, &g) in self.grads[s].iter_mut().zip(grad) {
                *a += g;
            }
            self.dirty[s] = true;
        }
    }

    pub fn zero_grads(&mut self) {
        for (g, d) in self.grads.iter_mut().zip(self.dirty.iter_mut()) {
            if *d {
                g.fill(S::zero());
                *d = false;
            }
        }
    }

    pub fn grads_finite(&self) -> bool {
        self.grads.iter().all(|g| g.iter().all(|v| v.is_finite()))
    }

    /// Applies `grad / batch + 2 lambda (theta - anchor)` with momentum.
    /// Returns the anchored penalty before the step.
    pub fn step(&mut self, tuned: &mut Matrix<S>, batch: usize, lambda: S) -> Result<S> {
        let inv = S::one() / S::lit(batch as f64);
        let mut penalty = S::zero();
        for (s, &id) in self.active.iter().enumerate() {
            let (p, g) = crate::nn::anchored_l2(tuned.row(id), &self.anchor[s], lambda)?;
            penalty += p;
            for (a, b) in self.grads[s].iter_mut().zip(g) {
                *a = *a * inv + b;
            }
            self.dirty[s] = true;
        }
        let dim = tuned.cols();
        let mut rows: Vec<&mut [S]> = Vec::with_capacity(self.active.len());
        let mut next = self.active.iter().peekable();
        for (id, row) in tuned.as_mut_slice().chunks_mut(dim.max(1)).enumerate() {
            if next.peek() == Some(&&id) {
                rows.push(row);
                next.next();
            }
        }
        let grads: Vec<&[S]> = self.grads.iter().map(Vec::as_slice).collect();
        self.opt.step_tensors(rows, grads)?;
        Ok(penalty)
    }
}
