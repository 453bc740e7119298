use serde::{Deserialize, Serialize};

use super::{weighted_reconstruction_error, window_targets, ContextWindow, WeightScheme, WindowAutoencoder};
use crate::error::{check_len, Result};
use crate::nn::{Activation, Mlp, Params};
use crate::rng::Rng;
use crate::scalar::Scalar;
use crate::vocab::EmbeddingTable;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FfnConfig {
    pub type_dim: usize,
    pub radius: usize,
    pub hidden: usize,
    pub embedding_dim: usize,
    pub scheme: WeightScheme,
}

impl Default for FfnConfig {
    fn default() -> Self {
        Self {
            type_dim: 100,
            radius: 1,
            hidden: 512,
            embedding_dim: 256,
            scheme: WeightScheme::default(),
        }
    }
}

/// Feedforward window autoencoder.
///
/// The encoder maps the concatenated window embeddings (`d (2r + 1)` wide) to
/// the token embedding; the decoder maps it back to `d (2r + 1)` values,
/// read as `2r + 1` slices of width `d`.
#[derive(Debug, Clone, PartialEq)]
pub struct FfnEncoderModel<S> {
    pub encoder: Mlp<S>,
    pub decoder: Mlp<S>,
    type_dim: usize,
    radius: usize,
    scheme: WeightScheme,
}

impl<S: Scalar> FfnEncoderModel<S> {
    /// Relu hidden layers, linear output layers on both sides.
    pub fn new(config: &FfnConfig, rng: &mut Rng) -> Self {
        let width = config.type_dim * (2 * config.radius + 1);
        let encoder = Mlp::init(&[width, config.hidden, config.embedding_dim], Activation::Linear, rng);
        let decoder = Mlp::init(&[config.embedding_dim, config.hidden, width], Activation::Linear, rng);
        Self {
            encoder,
            decoder,
            type_dim: config.type_dim,
            radius: config.radius,
            scheme: config.scheme,
        }
    }

    /// Arbitrary layer stacks, e.g. for tests with a single encoder layer.
    pub fn from_parts(encoder: Mlp<S>, decoder: Mlp<S>, type_dim: usize, radius: usize, scheme: WeightScheme) -> Result<Self> {
        let width = type_dim * (2 * radius + 1);
        check_len("ffn encoder input", width, encoder.input_size())?;
        check_len("ffn decoder input", encoder.output_size(), decoder.input_size())?;
        check_len("ffn decoder output", width, decoder.output_size())?;
        Ok(Self {
            encoder,
            decoder,
            type_dim,
            radius,
            scheme,
        })
    }

    pub fn set_scheme(&mut self, scheme: WeightScheme) {
        self.scheme = scheme;
    }

    fn concat_window(&self, table: &EmbeddingTable<S>, window: &ContextWindow) -> Result<Vec<S>> {
        self.check_inputs(table, window)?;
        let mut x = Vec::with_capacity(self.type_dim * window.len());
        for &id in window.ids() {
            x.extend_from_slice(table.row(id));
        }
        Ok(x)
    }
}

impl<S: Scalar> Params<S> for FfnEncoderModel<S> {
    fn tensors(&self) -> Vec<&[S]> {
        let mut t = self.encoder.tensors();
        t.extend(self.decoder.tensors());
        t
    }

    fn tensors_mut(&mut self) -> Vec<&mut [S]> {
        let mut t = self.encoder.tensors_mut();
        t.extend(self.decoder.tensors_mut());
        t
    }
}

impl<S: Scalar> WindowAutoencoder<S> for FfnEncoderModel<S> {
    fn radius(&self) -> usize {
        self.radius
    }

    fn type_dim(&self) -> usize {
        self.type_dim
    }

    fn embedding_dim(&self) -> usize {
        self.encoder.output_size()
    }

    fn scheme(&self) -> WeightScheme {
        self.scheme
    }

    fn encode(&self, table: &EmbeddingTable<S>, window: &ContextWindow) -> Result<Vec<S>> {
        self.encoder.forward(&self.concat_window(table, window)?)
    }

    fn decode(&self, embedding: &[S]) -> Result<Vec<Vec<S>>> {
        let out = self.decoder.forward(embedding)?;
        Ok(out.chunks(self.type_dim.max(1)).map(<[S]>::to_vec).collect())
    }

    fn wre_loss_grad(&self, table: &EmbeddingTable<S>, window: &ContextWindow, weights: &[S], grads: &mut Self) -> Result<S> {
        let x = self.concat_window(table, window)?;
        let enc = self.encoder.forward_trace(&x)?;
        let dec = self.decoder.forward_trace(enc.output())?;
        let recon: Vec<Vec<S>> = dec.output().chunks(self.type_dim.max(1)).map(<[S]>::to_vec).collect();
        let (loss, g) = weighted_reconstruction_error(&recon, &window_targets(table, window), weights)?;
        let g: Vec<S> = g.into_iter().flatten().collect();
        let g_emb = self.decoder.backward(&dec, &g, &mut grads.decoder);
        self.encoder.backward(&enc, &g_emb, &mut grads.encoder);
        Ok(loss)
    }
}
