use serde::{Deserialize, Serialize};

use super::corpus::ParsedSentence;
use crate::error::{check_len, Error, Result};
use crate::features::{pair_features, PAIR_FEATURE_DIM};
use crate::input::{
    check_encoders, feature_width, prepare_sentence, type_window_ids, EmbeddingView, EncoderSpec, InputSources, PreparedSentence,
};
use crate::nn::{softmax_logloss, Activation, Matrix, Mlp, Params};
use crate::rng::Rng;
use crate::scalar::{argmax, Scalar};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParserConfig {
    /// Type-embedding context around child and parent; `-1` drops type
    /// embeddings altogether.
    pub window: i32,
    pub omit_center: bool,
    /// Ten surface indicators for child and parent.
    pub word_features: bool,
    pub update_embeddings: bool,
    pub anchor_lambda: f64,
    pub hidden: usize,
}

impl Default for ParserConfig {
    fn default() -> Self {
        Self {
            window: 1,
            omit_center: false,
            word_features: true,
            update_embeddings: false,
            anchor_lambda: 0.01,
            hidden: 1024,
        }
    }
}

impl ParserConfig {
    fn type_slots(&self) -> usize {
        match usize::try_from(self.window) {
            Ok(w) => 2 * w + 1 - usize::from(self.omit_center),
            Err(_) => 0,
        }
    }

    /// Network input width for the given sources.
    pub fn input_width<S: Scalar>(&self, sources: &InputSources<'_, S>) -> usize {
        2 * (self.type_slots() * sources.table.dim() + sources.token_embedding_width() + feature_width(self.word_features, None))
            + PAIR_FEATURE_DIM
    }
}

/// Scores a (child, parent) arc with two relu layers and a scalar output.
#[derive(Debug, Clone, PartialEq)]
pub struct ParserModel<S> {
    pub config: ParserConfig,
    pub encoders: Vec<EncoderSpec>,
    pub type_dim: usize,
    pub vocab_size: usize,
    pub net: Mlp<S>,
    pub tuned_embeddings: Option<Matrix<S>>,
}

/// Gradient of the network input, split back onto type-embedding rows.
pub(crate) struct ArcInput<S> {
    pub x: Vec<S>,
    pub child_ids: Vec<usize>,
    pub parent_ids: Vec<usize>,
}

impl<S: Scalar> ParserModel<S> {
    pub fn new(config: ParserConfig, sources: &InputSources<'_, S>, rng: &mut Rng) -> Result<Self> {
        if config.window < -1 {
            return Err(Error::InvalidConfig(format!("parser window {} below -1", config.window)));
        }
        if config.type_slots() == 0 && sources.encoders.is_empty() {
            return Err(Error::InvalidConfig(
                "parser needs type embeddings or at least one token encoder".into(),
            ));
        }
        let width = config.input_width(sources);
        let net = Mlp::init(&[width, config.hidden, config.hidden, 1], Activation::Linear, rng);
        let tuned_embeddings = (config.update_embeddings && config.type_slots() > 0).then(|| sources.table.vectors().clone());
        Ok(Self {
            encoders: sources.encoder_specs(),
            type_dim: sources.table.dim(),
            vocab_size: sources.table.vocab().len(),
            config,
            net,
            tuned_embeddings,
        })
    }

    pub fn check_sources(&self, sources: &InputSources<'_, S>) -> Result<()> {
        check_encoders(&self.encoders, sources)?;
        check_len("parser type embedding width", self.type_dim, sources.table.dim())?;
        check_len("parser vocabulary size", self.vocab_size, sources.table.vocab().len())
    }

    pub fn prepare(&self, sources: &InputSources<'_, S>, sentence: &ParsedSentence) -> Result<PreparedSentence<S>> {
        prepare_sentence(sources, &sentence.tokens, self.config.word_features, false)
    }

    fn window(&self, sources: &InputSources<'_, S>, prep: &PreparedSentence<S>, pos: usize) -> Vec<usize> {
        match usize::try_from(self.config.window) {
            Ok(w) => {
                let v = sources.table.vocab();
                type_window_ids(&prep.ids, pos - 1, w, self.config.omit_center, v.bos(), v.eos())
            }
            Err(_) => Vec::new(),
        }
    }

    /// Child blocks, parent blocks (zero for the wall), then pair features.
    pub(crate) fn arc_input(
        &self,
        sources: &InputSources<'_, S>,
        prep: &PreparedSentence<S>,
        i: usize,
        j: usize,
    ) -> Result<ArcInput<S>> {
        let n = prep.len();
        let pair = pair_features::<S>(i, j, n)?;
        let view = EmbeddingView {
            table: sources.table,
            tuned: self.tuned_embeddings.as_ref(),
        };
        let child_ids = self.window(sources, prep, i);
        let parent_ids = if j == 0 { Vec::new() } else { self.window(sources, prep, j) };
        let slots = self.config.type_slots();
        let d = self.type_dim;
        let te = prep.token_embeddings[i - 1].len();
        let fw = prep.word_features[i - 1].len();

        let mut x = Vec::with_capacity(self.net.input_size());
        for &id in &child_ids {
            x.extend_from_slice(view.row(id));
        }
        for &id in &parent_ids {
            x.extend_from_slice(view.row(id));
        }
        if j == 0 {
            x.resize(x.len() + slots * d, S::zero());
        }
        x.extend_from_slice(&prep.token_embeddings[i - 1]);
        match j {
            0 => x.resize(x.len() + te, S::zero()),
            _ => x.extend_from_slice(&prep.token_embeddings[j - 1]),
        }
        x.extend_from_slice(&prep.word_features[i - 1]);
        match j {
            0 => x.resize(x.len() + fw, S::zero()),
            _ => x.extend_from_slice(&prep.word_features[j - 1]),
        }
        x.extend_from_slice(&pair);
        check_len("parser input", self.net.input_size(), x.len())?;
        Ok(ArcInput {
            x,
            child_ids,
            parent_ids,
        })
    }

    fn check_arc(sentence: &ParsedSentence, i: usize, j: usize) -> Result<()> {
        let n = sentence.len();
        if i == 0 || i > n {
            return Err(Error::OutOfRange { index: i, len: n + 1 });
        }
        if j > n {
            return Err(Error::OutOfRange { index: j, len: n + 1 });
        }
        if i == j {
            return Err(Error::InvalidArgument(format!("child and parent are both {i}")));
        }
        if !sentence.selected[i - 1] {
            return Err(Error::InvalidArgument(format!("child {i} is not selected")));
        }
        if j > 0 && !sentence.selected[j - 1] {
            return Err(Error::InvalidArgument(format!("parent {j} is not selected")));
        }
        Ok(())
    }

    /// Score of the arc from child `i` to parent `j` (both 1-based, `j = 0`
    /// is the wall).
    pub fn arc_score_prepared(
        &self,
        sources: &InputSources<'_, S>,
        sentence: &ParsedSentence,
        prep: &PreparedSentence<S>,
        i: usize,
        j: usize,
    ) -> Result<S> {
        Self::check_arc(sentence, i, j)?;
        Ok(self.net.forward(&self.arc_input(sources, prep, i, j)?.x)?[0])
    }

    /// Scores of every candidate parent of child `i`, in
    /// [`ParsedSentence::candidates`] order.
    pub fn candidate_scores(
        &self,
        sources: &InputSources<'_, S>,
        sentence: &ParsedSentence,
        prep: &PreparedSentence<S>,
        i: usize,
    ) -> Result<(Vec<usize>, Vec<S>)> {
        let cands = sentence.candidates(i);
        let scores = cands
            .iter()
            .map(|&j| self.arc_score_prepared(sources, sentence, prep, i, j))
            .collect::<Result<Vec<_>>>()?;
        Ok((cands, scores))
    }

    /// Per-token argmax over candidates; ties go to the wall, then lower
    /// indices. Unselected tokens get `None`.
    pub fn predict_prepared(
        &self,
        sources: &InputSources<'_, S>,
        sentence: &ParsedSentence,
        prep: &PreparedSentence<S>,
    ) -> Result<Vec<Option<usize>>> {
        let mut heads = vec![None; sentence.len()];
        for i in sentence.selected_positions() {
            let (cands, scores) = self.candidate_scores(sources, sentence, prep, i)?;
            heads[i - 1] = Some(cands[argmax(&scores)]);
        }
        Ok(heads)
    }

    fn gold_index(sentence: &ParsedSentence, i: usize, cands: &[usize]) -> Result<usize> {
        let gold = sentence.heads[i - 1].ok_or_else(|| Error::InvalidArgument(format!("selected token {i} has no gold head")))?;
        cands
            .iter()
            .position(|&c| c == gold)
            .ok_or_else(|| Error::InvalidArgument(format!("gold head {gold} of token {i} is not a candidate")))
    }

    pub fn sentence_loss_prepared(
        &self,
        sources: &InputSources<'_, S>,
        sentence: &ParsedSentence,
        prep: &PreparedSentence<S>,
    ) -> Result<S> {
        let mut total = S::zero();
        for i in sentence.selected_positions() {
            let (cands, scores) = self.candidate_scores(sources, sentence, prep, i)?;
            total += arc_loss(&scores, Self::gold_index(sentence, i, &cands)?)?.0;
        }
        Ok(total)
    }

    /// Sentence loss with network gradients added to `net_grads` and
    /// type-embedding row gradients passed to `emb_grad(id, g)`.
    pub(crate) fn sentence_loss_grad(
        &self,
        sources: &InputSources<'_, S>,
        sentence: &ParsedSentence,
        prep: &PreparedSentence<S>,
        net_grads: &mut Mlp<S>,
        mut emb_grad: impl FnMut(usize, &[S]),
    ) -> Result<S> {
        let mut total = S::zero();
        let d = self.type_dim;
        for i in sentence.selected_positions() {
            let cands = sentence.candidates(i);
            let gold = Self::gold_index(sentence, i, &cands)?;
            let mut inputs = Vec::with_capacity(cands.len());
            let mut traces = Vec::with_capacity(cands.len());
            for &j in &cands {
                let inp = self.arc_input(sources, prep, i, j)?;
                traces.push(self.net.forward_trace(&inp.x)?);
                inputs.push(inp);
            }
            let scores: Vec<S> = traces.iter().map(|t| t.output()[0]).collect();
            let (loss, g) = arc_loss(&scores, gold)?;
            total += loss;
            for ((trace, inp), &gk) in traces.iter().zip(&inputs).zip(&g) {
                let gx = self.net.backward(trace, &[gk], net_grads);
                if self.tuned_embeddings.is_some() {
                    for (k, &id) in inp.child_ids.iter().chain(&inp.parent_ids).enumerate() {
                        emb_grad(id, &gx[k * d..(k + 1) * d]);
                    }
                }
            }
        }
        Ok(total)
    }

    /// Sentence loss and its full gradient in model shape.
    pub fn loss_and_gradient(&self, sources: &InputSources<'_, S>, sentence: &ParsedSentence) -> Result<(S, Self)> {
        let prep = self.prepare(sources, sentence)?;
        let mut grads = self.zeros_like();
        let mut emb = grads.tuned_embeddings.take();
        let loss = self.sentence_loss_grad(sources, sentence, &prep, &mut grads.net, |id, g| {
            if let Some(m) = emb.as_mut() {
                for (a, &b) in m.row_mut(id).iter_mut().zip(g) {
                    *a += b;
                }
            }
        })?;
        grads.tuned_embeddings = emb;
        Ok((loss, grads))
    }
}

impl<S: Scalar> Params<S> for ParserModel<S> {
    fn tensors(&self) -> Vec<&[S]> {
        let mut t = self.net.tensors();
        if let Some(m) = &self.tuned_embeddings {
            t.push(m.as_slice());
        }
        t
    }

    fn tensors_mut(&mut self) -> Vec<&mut [S]> {
        let mut t = self.net.tensors_mut();
        if let Some(m) = &mut self.tuned_embeddings {
            t.push(m.as_mut_slice());
        }
        t
    }
}

/// Negative gold score plus the log-sum-exp over all candidate scores.
pub fn arc_loss<S: Scalar>(scores: &[S], gold: usize) -> Result<(S, Vec<S>)> {
    softmax_logloss(scores, gold)
}

pub fn arc_score<S: Scalar>(
    model: &ParserModel<S>,
    sources: &InputSources<'_, S>,
    sentence: &ParsedSentence,
    i: usize,
    j: usize,
) -> Result<S> {
    model.check_sources(sources)?;
    let prep = model.prepare(sources, sentence)?;
    model.arc_score_prepared(sources, sentence, &prep, i, j)
}

/// Network input for one arc, as fed to the scorer.
pub fn compose_arc_input<S: Scalar>(
    model: &ParserModel<S>,
    sources: &InputSources<'_, S>,
    sentence: &ParsedSentence,
    i: usize,
    j: usize,
) -> Result<Vec<S>> {
    model.check_sources(sources)?;
    ParserModel::<S>::check_arc(sentence, i, j)?;
    let prep = model.prepare(sources, sentence)?;
    Ok(model.arc_input(sources, &prep, i, j)?.x)
}

pub fn sentence_loss<S: Scalar>(model: &ParserModel<S>, sources: &InputSources<'_, S>, sentence: &ParsedSentence) -> Result<S> {
    model.check_sources(sources)?;
    let prep = model.prepare(sources, sentence)?;
    model.sentence_loss_prepared(sources, sentence, &prep)
}

pub fn predict_heads<S: Scalar>(
    model: &ParserModel<S>,
    sources: &InputSources<'_, S>,
    sentence: &ParsedSentence,
) -> Result<Vec<Option<usize>>> {
    model.check_sources(sources)?;
    let prep = model.prepare(sources, sentence)?;
    model.predict_prepared(sources, sentence, &prep)
}
