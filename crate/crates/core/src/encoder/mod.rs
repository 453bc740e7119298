//! Token encoders: window autoencoders trained with a weighted reconstruction
//! error over fixed type embeddings.

mod ffn;
mod seq2seq;
mod train;
mod weights;
mod window;

pub use ffn::{FfnConfig, FfnEncoderModel};
pub use seq2seq::{Seq2SeqConfig, Seq2SeqEncoderModel};
pub use train::{mean_wre, train_encoder, Checkpoint, EncoderTrainConfig, EncoderTrainOutcome};
pub use weights::{weights_for, WeightScheme};
pub use window::{extract_window, ContextWindow};

use serde::{Deserialize, Serialize};

use crate::error::{check_len, Error, Result};
use crate::nn::Params;
use crate::scalar::Scalar;
use crate::vocab::EmbeddingTable;

/// Weighted reconstruction error `sum_i w_i ||recon_i - target_i||^2`.
///
/// Returns the loss and, for each position, the gradient with respect to the
/// reconstruction.
pub fn weighted_reconstruction_error<S: Scalar>(
    reconstructions: &[Vec<S>],
    targets: &[&[S]],
    weights: &[S],
) -> Result<(S, Vec<Vec<S>>)> {
    check_len("reconstruction weights", reconstructions.len(), weights.len())?;
    check_len("reconstruction targets", reconstructions.len(), targets.len())?;
    let two = S::lit(2.0);
    let mut loss = S::zero();
    let mut grads = Vec::with_capacity(reconstructions.len());
    for ((r, t), &w) in reconstructions.iter().zip(targets).zip(weights) {
        check_len("reconstruction width", t.len(), r.len())?;
        let mut g = Vec::with_capacity(r.len());
        for (&ri, &ti) in r.iter().zip(t.iter()) {
            let diff = ri - ti;
            loss += w * diff * diff;
            g.push(two * w * diff);
        }
        grads.push(g);
    }
    Ok((loss, grads))
}

/// Type-embedding rows for every position of `window`.
pub fn window_targets<'a, S: Scalar>(table: &'a EmbeddingTable<S>, window: &ContextWindow) -> Vec<&'a [S]> {
    window.ids().iter().map(|&id| table.row(id)).collect()
}

/// Behaviour shared by the feedforward and seq2seq window autoencoders.
pub trait WindowAutoencoder<S: Scalar>: Params<S> + Clone {
    fn radius(&self) -> usize;

    /// Width `d` of the input type embeddings.
    fn type_dim(&self) -> usize;

    /// Width `d'` of the token embedding.
    fn embedding_dim(&self) -> usize;

    fn scheme(&self) -> WeightScheme;

    fn encode(&self, table: &EmbeddingTable<S>, window: &ContextWindow) -> Result<Vec<S>>;

    /// Reconstructs the `2r + 1` type embeddings of a window from its encoding.
    fn decode(&self, embedding: &[S]) -> Result<Vec<Vec<S>>>;

    /// Loss of one window, accumulating parameter gradients into `grads`.
    fn wre_loss_grad(&self, table: &EmbeddingTable<S>, window: &ContextWindow, weights: &[S], grads: &mut Self) -> Result<S>;

    fn wre_loss(&self, table: &EmbeddingTable<S>, window: &ContextWindow, weights: &[S]) -> Result<S> {
        let recon = self.decode(&self.encode(table, window)?)?;
        Ok(weighted_reconstruction_error(&recon, &window_targets(table, window), weights)?.0)
    }

    fn check_inputs(&self, table: &EmbeddingTable<S>, window: &ContextWindow) -> Result<()> {
        check_len("type embedding width", self.type_dim(), table.dim())?;
        check_len("window radius", self.radius(), window.radius())
    }

    /// Convenience: encode the token at `position` of an id sentence.
    fn encode_token(&self, table: &EmbeddingTable<S>, sentence: &[usize], position: usize) -> Result<Vec<S>> {
        let vocab = table.vocab();
        let window = ContextWindow::extract(sentence, position, self.radius(), vocab.bos(), vocab.eos())?;
        self.encode(table, &window)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Architecture {
    Ffn,
    Seq2seq,
}

impl std::str::FromStr for Architecture {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ffn" | "dnn" | "feedforward" => Ok(Architecture::Ffn),
            "seq2seq" | "lstm" => Ok(Architecture::Seq2seq),
            _ => Err(Error::InvalidConfig(format!("unknown encoder architecture {s:?}"))),
        }
    }
}

/// Either encoder architecture; what model files and downstream predictors hold.
#[derive(Debug, Clone, PartialEq)]
pub enum EncoderModel<S> {
    Ffn(FfnEncoderModel<S>),
    Seq2Seq(Seq2SeqEncoderModel<S>),
}

impl<S: Scalar> EncoderModel<S> {
    pub fn architecture(&self) -> Architecture {
        match self {
            EncoderModel::Ffn(_) => Architecture::Ffn,
            EncoderModel::Seq2Seq(_) => Architecture::Seq2seq,
        }
    }

    /// Forward pass of the decoder from an encoding.
    pub fn decode_window(&self, embedding: &[S]) -> Result<Vec<Vec<S>>> {
        self.decode(embedding)
    }
}

impl<S: Scalar> From<FfnEncoderModel<S>> for EncoderModel<S> {
    fn from(m: FfnEncoderModel<S>) -> Self {
        EncoderModel::Ffn(m)
    }
}

impl<S: Scalar> From<Seq2SeqEncoderModel<S>> for EncoderModel<S> {
    fn from(m: Seq2SeqEncoderModel<S>) -> Self {
        EncoderModel::Seq2Seq(m)
    }
}

impl<S: Scalar> Params<S> for EncoderModel<S> {
    fn tensors(&self) -> Vec<&[S]> {
        match self {
            EncoderModel::Ffn(m) => m.tensors(),
            EncoderModel::Seq2Seq(m) => m.tensors(),
        }
    }

    fn tensors_mut(&mut self) -> Vec<&mut [S]> {
        match self {
            EncoderModel::Ffn(m) => m.tensors_mut(),
            EncoderModel::Seq2Seq(m) => m.tensors_mut(),
        }
    }
}

impl<S: Scalar> WindowAutoencoder<S> for EncoderModel<S> {
    fn radius(&self) -> usize {
        match self {
            EncoderModel::Ffn(m) => m.radius(),
            EncoderModel::Seq2Seq(m) => m.radius(),
        }
    }

    fn type_dim(&self) -> usize {
        match self {
            EncoderModel::Ffn(m) => m.type_dim(),
            EncoderModel::Seq2Seq(m) => m.type_dim(),
        }
    }

    fn embedding_dim(&self) -> usize {
        match self {
            EncoderModel::Ffn(m) => m.embedding_dim(),
            EncoderModel::Seq2Seq(m) => m.embedding_dim(),
        }
    }

    fn scheme(&self) -> WeightScheme {
        match self {
            EncoderModel::Ffn(m) => m.scheme(),
            EncoderModel::Seq2Seq(m) => m.scheme(),
        }
    }

    fn encode(&self, table: &EmbeddingTable<S>, window: &ContextWindow) -> Result<Vec<S>> {
        match self {
            EncoderModel::Ffn(m) => m.encode(table, window),
            EncoderModel::Seq2Seq(m) => m.encode(table, window),
        }
    }

    fn decode(&self, embedding: &[S]) -> Result<Vec<Vec<S>>> {
        match self {
            EncoderModel::Ffn(m) => m.decode(embedding),
            EncoderModel::Seq2Seq(m) => m.decode(embedding),
        }
    }

    fn wre_loss_grad(&self, table: &EmbeddingTable<S>, window: &ContextWindow, weights: &[S], grads: &mut Self) -> Result<S> {
        match (self, grads) {
            (EncoderModel::Ffn(m), EncoderModel::Ffn(g)) => m.wre_loss_grad(table, window, weights, g),
            (EncoderModel::Seq2Seq(m), EncoderModel::Seq2Seq(g)) => m.wre_loss_grad(table, window, weights, g),
            _ => Err(Error::InvalidArgument("gradient buffer has a different architecture".into())),
        }
    }
}
