use serde::{Deserialize, Serialize};

use super::corpus::{TaggedSentence, Tagset};
use crate::error::{check_len, Error, Result};
use crate::input::{
    check_encoders, feature_width, prepare_sentence, type_window_ids, EmbeddingView, EncoderSpec, InputSources, PreparedSentence,
};
use crate::nn::{softmax_logloss, Activation, DropoutSpec, Matrix, Mlp, Params};
use crate::rng::Rng;
use crate::scalar::{argmax, Scalar};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaggerConfig {
    /// Type-embedding context `w` on each side of the tagged word.
    pub window: usize,
    /// Leave out the tagged word's own type embedding.
    pub omit_center: bool,
    /// Ten surface indicators of the tagged word.
    pub word_features: bool,
    /// Brown prefixes, tag dictionary, name lists, character n-grams.
    pub extended_features: bool,
    pub update_embeddings: bool,
    pub anchor_lambda: f64,
    pub hidden: usize,
    pub dropout: DropoutSpec,
}

impl Default for TaggerConfig {
    fn default() -> Self {
        Self {
            window: 1,
            omit_center: false,
            word_features: false,
            extended_features: false,
            update_embeddings: false,
            anchor_lambda: 0.01,
            hidden: 512,
            dropout: DropoutSpec::none(),
        }
    }
}

impl TaggerConfig {
    /// Network input width for the given sources.
    pub fn input_width<S: Scalar>(&self, sources: &InputSources<'_, S>) -> usize {
        let slots = 2 * self.window + 1 - usize::from(self.omit_center);
        let ext = if self.extended_features { sources.resources } else { None };
        slots * sources.table.dim() + sources.token_embedding_width() + feature_width(self.word_features, ext)
    }
}

/// Local classifier: two relu hidden layers and a softmax over the tagset.
#[derive(Debug, Clone, PartialEq)]
pub struct TaggerModel<S> {
    pub config: TaggerConfig,
    pub tagset: Tagset,
    pub encoders: Vec<EncoderSpec>,
    pub type_dim: usize,
    pub vocab_size: usize,
    pub feature_width: usize,
    pub net: Mlp<S>,
    /// Present when type embeddings are updated during training.
    pub tuned_embeddings: Option<Matrix<S>>,
}

impl<S: Scalar> TaggerModel<S> {
    pub fn new(config: TaggerConfig, tagset: Tagset, sources: &InputSources<'_, S>, rng: &mut Rng) -> Result<Self> {
        if config.extended_features && sources.resources.is_none() {
            return Err(Error::InvalidConfig(
                "extended features enabled but no resources loaded".into(),
            ));
        }
        let width = config.input_width(sources);
        if width == 0 {
            return Err(Error::InvalidConfig("tagger input is empty".into()));
        }
        let ext = if config.extended_features { sources.resources } else { None };
        let net = Mlp::init(&[width, config.hidden, config.hidden, tagset.len()], Activation::Linear, rng);
        let tuned_embeddings = config.update_embeddings.then(|| sources.table.vectors().clone());
        Ok(Self {
            feature_width: feature_width(config.word_features, ext),
            encoders: sources.encoder_specs(),
            type_dim: sources.table.dim(),
            vocab_size: sources.table.vocab().len(),
            config,
            tagset,
            net,
            tuned_embeddings,
        })
    }

    pub fn check_sources(&self, sources: &InputSources<'_, S>) -> Result<()> {
        check_encoders(&self.encoders, sources)?;
        check_len("tagger type embedding width", self.type_dim, sources.table.dim())?;
        check_len("tagger vocabulary size", self.vocab_size, sources.table.vocab().len())?;
        let ext = if self.config.extended_features {
            sources.resources
        } else {
            None
        };
        if self.config.extended_features && ext.is_none() {
            return Err(Error::InvalidConfig(
                "model uses extended features but no resources were supplied".into(),
            ));
        }
        check_len(
            "tagger feature width",
            self.feature_width,
            feature_width(self.config.word_features, ext),
        )
    }

    pub fn prepare<T: AsRef<str>>(&self, sources: &InputSources<'_, S>, tokens: &[T]) -> Result<PreparedSentence<S>> {
        prepare_sentence(sources, tokens, self.config.word_features, self.config.extended_features)
    }

    fn view<'a>(&'a self, sources: &InputSources<'a, S>) -> EmbeddingView<'a, S> {
        EmbeddingView {
            table: sources.table,
            tuned: self.tuned_embeddings.as_ref(),
        }
    }

    fn window_ids(&self, sources: &InputSources<'_, S>, prep: &PreparedSentence<S>, j: usize) -> Vec<usize> {
        let v = sources.table.vocab();
        type_window_ids(&prep.ids, j, self.config.window, self.config.omit_center, v.bos(), v.eos())
    }

    /// Type-embedding window, token embeddings, then word features.
    pub fn compose_input(&self, sources: &InputSources<'_, S>, prep: &PreparedSentence<S>, j: usize) -> Result<Vec<S>> {
        if j >= prep.len() {
            return Err(Error::OutOfRange {
                index: j,
                len: prep.len(),
            });
        }
        let view = self.view(sources);
        let mut x = Vec::with_capacity(self.net.input_size());
        for id in self.window_ids(sources, prep, j) {
            x.extend_from_slice(view.row(id));
        }
        x.extend_from_slice(&prep.token_embeddings[j]);
        x.extend_from_slice(&prep.word_features[j]);
        check_len("tagger input", self.net.input_size(), x.len())?;
        Ok(x)
    }

    pub fn logits(&self, sources: &InputSources<'_, S>, prep: &PreparedSentence<S>, j: usize) -> Result<Vec<S>> {
        self.net.forward(&self.compose_input(sources, prep, j)?)
    }

    pub fn token_loss(&self, sources: &InputSources<'_, S>, prep: &PreparedSentence<S>, j: usize, gold: usize) -> Result<S> {
        Ok(softmax_logloss(&self.logits(sources, prep, j)?, gold)?.0)
    }

    /// Log loss of one token. Network gradients go to `net_grads`; when
    /// embeddings are tuned, `emb_grad(id, g)` receives each window row's gradient.
    #[allow(clippy::too_many_arguments)]
    pub(crate) fn token_loss_grad(
        &self,
        sources: &InputSources<'_, S>,
        prep: &PreparedSentence<S>,
        j: usize,
        gold: usize,
        dropout: Option<&mut Rng>,
        net_grads: &mut Mlp<S>,
        mut emb_grad: impl FnMut(usize, &[S]),
    ) -> Result<S> {
        let x = self.compose_input(sources, prep, j)?;
        let trace = match dropout {
            Some(rng) if self.config.dropout.is_active() => self.net.forward_trace_dropout(&x, &self.config.dropout, rng)?,
            _ => self.net.forward_trace(&x)?,
        };
        let (loss, g) = softmax_logloss(trace.output(), gold)?;
        let gx = self.net.backward(&trace, &g, net_grads);
        if self.tuned_embeddings.is_some() {
            let d = self.type_dim;
            for (k, id) in self.window_ids(sources, prep, j).into_iter().enumerate() {
                emb_grad(id, &gx[k * d..(k + 1) * d]);
            }
        }
        Ok(loss)
    }

    /// Loss and full gradient in model shape, without dropout. Training
    /// never moves the reserved rows, but their gradient is reported here.
    pub fn loss_and_gradient(
        &self,
        sources: &InputSources<'_, S>,
        prep: &PreparedSentence<S>,
        j: usize,
        gold: usize,
    ) -> Result<(S, Self)> {
        let mut grads = self.zeros_like();
        let mut emb = grads.tuned_embeddings.take();
        let loss = self.token_loss_grad(sources, prep, j, gold, None, &mut grads.net, |id, g| {
            if let Some(m) = emb.as_mut() {
                for (a, &b) in m.row_mut(id).iter_mut().zip(g) {
                    *a += b;
                }
            }
        })?;
        grads.tuned_embeddings = emb;
        Ok((loss, grads))
    }

    /// Most probable tag per token; ties go to the lowest tag id.
    pub fn tag_prepared(&self, sources: &InputSources<'_, S>, prep: &PreparedSentence<S>) -> Result<Vec<usize>> {
        (0..prep.len()).map(|j| Ok(argmax(&self.logits(sources, prep, j)?))).collect()
    }
}

impl<S: Scalar> Params<S> for TaggerModel<S> {
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

pub fn compose_tagger_input<S: Scalar, T: AsRef<str>>(
    model: &TaggerModel<S>,
    sources: &InputSources<'_, S>,
    tokens: &[T],
    j: usize,
) -> Result<Vec<S>> {
    model.check_sources(sources)?;
    let prep = model.prepare(sources, tokens)?;
    model.compose_input(sources, &prep, j)
}

pub fn tag_sentence<S: Scalar, T: AsRef<str>>(
    model: &TaggerModel<S>,
    sources: &InputSources<'_, S>,
    tokens: &[T],
) -> Result<Vec<usize>> {
    model.check_sources(sources)?;
    let prep = model.prepare(sources, tokens)?;
    model.tag_prepared(sources, &prep)
}

/// Percentage of tokens whose predicted tag equals the gold tag.
pub fn tagging_accuracy(predicted: &[Vec<usize>], gold: &[TaggedSentence]) -> Result<f64> {
    check_len("tagged sentence count", gold.len(), predicted.len())?;
    let mut correct = 0usize;
    let mut total = 0usize;
    for (p, g) in predicted.iter().zip(gold) {
        check_len("tagged sentence length", g.tags.len(), p.len())?;
        correct += p.iter().zip(&g.tags).filter(|(a, b)| a == b).count();
        total += p.len();
    }
    if total == 0 {
        return Err(Error::InvalidArgument("accuracy over zero tokens".into()));
    }
    Ok(100.0 * correct as f64 / total as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{stream, Stream};
    use crate::vocab::EmbeddingTable;

    fn table(dim: usize) -> EmbeddingTable<f64> {
        let mut rng = stream(0, Stream::Synthetic);
        EmbeddingTable::from_pairs(dim, ["a", "b", "c"].map(|w| (w, crate::nn::random_vec(dim, 1.0, &mut rng)))).unwrap()
    }

    fn gold(tags: Vec<usize>) -> TaggedSentence {
        TaggedSentence {
            tokens: tags.iter().map(|t| t.to_string()).collect(),
            tags,
        }
    }

    #[test]
    fn accuracy_examples() {
        let g = vec![gold(vec![1, 2]), gold(vec![3, 4])];
        assert_eq!(tagging_accuracy(&[vec![1, 2], vec![3, 4]], &g).unwrap(), 100.0);
        assert_eq!(tagging_accuracy(&[vec![1, 2], vec![3, 0]], &g).unwrap(), 75.0);
        assert!(tagging_accuracy(&[vec![1, 2]], &g).is_err());
        assert!(tagging_accuracy(&[vec![1, 2], vec![3]], &g).is_err());
    }

    #[test]
    fn argmax_prefers_lowest_on_ties() {
        assert_eq!(argmax(&[1.0f32, 3.0, 3.0, 0.0]), 1);
        assert_eq!(argmax(&[0.0f32; 4]), 0);
    }

    #[test]
    fn input_width_examples() {
        let t = table(100);
        let sources = InputSources::new(&t);
        let cfg = TaggerConfig {
            window: 1,
            ..TaggerConfig::default()
        };
        assert_eq!(cfg.input_width(&sources), 300);
    }

    #[test]
    fn empty_input_rejected() {
        let t = table(4);
        let sources = InputSources::new(&t);
        let cfg = TaggerConfig {
            window: 0,
            omit_center: true,
            ..TaggerConfig::default()
        };
        let mut rng = stream(0, Stream::Init);
        assert!(TaggerModel::new(cfg, Tagset::new(["X"]).unwrap(), &sources, &mut rng).is_err());
    }

    #[test]
    fn tagging_is_deterministic() {
        let t = table(4);
        let sources = InputSources::new(&t);
        let cfg = TaggerConfig {
            hidden: 6,
            word_features: true,
            ..TaggerConfig::default()
        };
        let mut rng = stream(0, Stream::Init);
        let model = TaggerModel::new(cfg, Tagset::new(["X", "Y", "Z"]).unwrap(), &sources, &mut rng).unwrap();
        let s = ["a", "b", "zz", "c"];
        assert_eq!(
            tag_sentence(&model, &sources, &s).unwrap(),
            tag_sentence(&model, &sources, &s).unwrap()
        );
    }
}
