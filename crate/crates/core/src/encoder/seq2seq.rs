use serde::{Deserialize, Serialize};

use super::{weighted_reconstruction_error, window_targets, ContextWindow, WeightScheme, WindowAutoencoder};
use crate::error::{check_len, Result};
use crate::nn::{Activation, Dense, LstmCell, Params};
use crate::rng::Rng;
use crate::scalar::Scalar;
use crate::vocab::EmbeddingTable;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Seq2SeqConfig {
    pub type_dim: usize,
    pub radius: usize,
    pub embedding_dim: usize,
    pub scheme: WeightScheme,
}

/// LSTM encoder/decoder pair over a context window.
///
/// The encoder reads the window left to right from a zero state; its final
/// hidden vector is the token embedding. The decoder starts from that hidden
/// vector and a zero cell, receives a zero input at every step, and its
/// hidden vector at step `t` is projected to the reconstruction of position
/// `t` in original order.
#[derive(Debug, Clone, PartialEq)]
pub struct Seq2SeqEncoderModel<S> {
    pub encoder: LstmCell<S>,
    pub decoder: LstmCell<S>,
    pub projection: Dense<S>,
    radius: usize,
    scheme: WeightScheme,
}

impl<S: Scalar> Seq2SeqEncoderModel<S> {
    pub fn new(config: &Seq2SeqConfig, rng: &mut Rng) -> Self {
        let encoder = LstmCell::init(config.type_dim, config.embedding_dim, rng);
        let decoder = LstmCell::init(config.type_dim, config.embedding_dim, rng);
        let projection = Dense::init(config.embedding_dim, config.type_dim, Activation::Linear, rng);
        Self {
            encoder,
            decoder,
            projection,
            radius: config.radius,
            scheme: config.scheme,
        }
    }

    pub fn from_parts(
        encoder: LstmCell<S>,
        decoder: LstmCell<S>,
        projection: Dense<S>,
        radius: usize,
        scheme: WeightScheme,
    ) -> Result<Self> {
        check_len("seq2seq decoder input", encoder.input_size(), decoder.input_size())?;
        check_len("seq2seq decoder hidden", encoder.hidden_size(), decoder.hidden_size())?;
        check_len("seq2seq projection input", decoder.hidden_size(), projection.input_size())?;
        check_len("seq2seq projection output", encoder.input_size(), projection.output_size())?;
        Ok(Self {
            encoder,
            decoder,
            projection,
            radius,
            scheme,
        })
    }

    pub fn set_scheme(&mut self, scheme: WeightScheme) {
        self.scheme = scheme;
    }

    fn steps(&self) -> usize {
        2 * self.radius + 1
    }
}

impl<S: Scalar> Params<S> for Seq2SeqEncoderModel<S> {
    fn tensors(&self) -> Vec<&[S]> {
        let mut t = self.encoder.tensors();
        t.extend(self.decoder.tensors());
        t.extend(self.projection.tensors());
        t
    }

    fn tensors_mut(&mut self) -> Vec<&mut [S]> {
        let mut t = self.encoder.tensors_mut();
        t.extend(self.decoder.tensors_mut());
        t.extend(self.projection.tensors_mut());
        t
    }
}

impl<S: Scalar> WindowAutoencoder<S> for Seq2SeqEncoderModel<S> {
    fn radius(&self) -> usize {
        self.radius
    }

    fn type_dim(&self) -> usize {
        self.encoder.input_size()
    }

    fn embedding_dim(&self) -> usize {
        self.encoder.hidden_size()
    }

    fn scheme(&self) -> WeightScheme {
        self.scheme
    }

    fn encode(&self, table: &EmbeddingTable<S>, window: &ContextWindow) -> Result<Vec<S>> {
        self.check_inputs(table, window)?;
        let n = self.embedding_dim();
        let (mut h, mut c) = (vec![S::zero(); n], vec![S::zero(); n]);
        for &id in window.ids() {
            (h, c) = self.encoder.step(table.row(id), &h, &c)?;
        }
        Ok(h)
    }

    fn decode(&self, embedding: &[S]) -> Result<Vec<Vec<S>>> {
        check_len("seq2seq decoder initial state", self.embedding_dim(), embedding.len())?;
        let zero_in = vec![S::zero(); self.type_dim()];
        let mut h = embedding.to_vec();
        let mut c = vec![S::zero(); self.embedding_dim()];
        let mut out = Vec::with_capacity(self.steps());
        for _ in 0..self.steps() {
            (h, c) = self.decoder.step(&zero_in, &h, &c)?;
            out.push(self.projection.forward(&h)?);
        }
        Ok(out)
    }

    fn wre_loss_grad(&self, table: &EmbeddingTable<S>, window: &ContextWindow, weights: &[S], grads: &mut Self) -> Result<S> {
        self.check_inputs(table, window)?;
        let n = self.embedding_dim();
        let zeros = vec![S::zero(); n];

        let mut enc_caches = Vec::with_capacity(window.len());
        let (mut h, mut c) = (zeros.clone(), zeros.clone());
        for &id in window.ids() {
            let (h2, c2, cache) = self.encoder.step_cached(table.row(id), &h, &c)?;
            enc_caches.push(cache);
            (h, c) = (h2, c2);
        }

        let zero_in = vec![S::zero(); self.type_dim()];
        let mut dec_caches = Vec::with_capacity(self.steps());
        let mut hiddens = Vec::with_capacity(self.steps());
        let mut recon = Vec::with_capacity(self.steps());
        let mut c = zeros.clone();
        for _ in 0..self.steps() {
            let (h2, c2, cache) = self.decoder.step_cached(&zero_in, &h, &c)?;
            recon.push(self.projection.forward(&h2)?);
            dec_caches.push(cache);
            hiddens.push(h2.clone());
            (h, c) = (h2, c2);
        }

        let (loss, grad_recon) = weighted_reconstruction_error(&recon, &window_targets(table, window), weights)?;

        let (mut dh, mut dc) = (zeros.clone(), zeros.clone());
        for t in (0..self.steps()).rev() {
            let from_proj = self
                .projection
                .backward(&hiddens[t], &recon[t], &grad_recon[t], &mut grads.projection);
            for (a, b) in dh.iter_mut().zip(&from_proj) {
                *a += *b;
            }
            let (_, dh_prev, dc_prev) = self.decoder.step_backward(&dec_caches[t], &dh, &dc, &mut grads.decoder);
            dh = dh_prev;
            dc = dc_prev;
        }
        // decoder initial cell is a constant zero, only dh reaches the encoder
        let mut dc = zeros;
        for cache in enc_caches.iter().rev() {
            let (_, dh_prev, dc_prev) = self.encoder.step_backward(cache, &dh, &dc, &mut grads.encoder);
            dh = dh_prev;
            dc = dc_prev;
        }
        Ok(loss)
    }
}
