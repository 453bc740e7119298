use log::{debug, info};
use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::{ContextWindow, WindowAutoencoder};
use crate::error::{Error, Result};
use crate::nn::SgdMomentum;
use crate::rng::{stream, Stream};
use crate::scalar::Scalar;
use crate::vocab::EmbeddingTable;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EncoderTrainConfig {
    pub epochs: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
    pub momentum: f64,
    /// Validate every this many minibatches (plus at each epoch end).
    pub cadence: usize,
    pub seed: u64,
}

impl Default for EncoderTrainConfig {
    fn default() -> Self {
        Self {
            epochs: 1,
            batch_size: 64,
            learning_rate: 0.1,
            momentum: 0.9,
            cadence: 1000,
            seed: 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub epoch: usize,
    pub minibatch: usize,
    pub val_loss: f64,
}

#[derive(Debug, Clone)]
pub struct EncoderTrainOutcome<A> {
    pub model: A,
    pub initial_val_loss: f64,
    pub best_val_loss: f64,
    /// Every validation, starting with the untrained model (epoch 0, minibatch 0).
    pub history: Vec<Checkpoint>,
}

/// Mean weighted reconstruction error over every token of `corpus`.
pub fn mean_wre<S: Scalar, A: WindowAutoencoder<S>>(model: &A, table: &EmbeddingTable<S>, corpus: &[Vec<usize>]) -> Result<f64> {
    let weights = model.scheme().weights::<S>(model.radius());
    let vocab = table.vocab();
    let mut total = 0.0;
    let mut count = 0usize;
    for sent in corpus {
        for j in 0..sent.len() {
            let w = ContextWindow::extract(sent, j, model.radius(), vocab.bos(), vocab.eos())?;
            total += model.wre_loss(table, &w, &weights)?.as_f64();
            count += 1;
        }
    }
    if count == 0 {
        return Err(Error::InvalidArgument("corpus has no tokens".into()));
    }
    Ok(total / count as f64)
}

/// Minibatch SGD with momentum on the weighted reconstruction error.
///
/// Every token of every training sentence is one instance; instances are
/// reshuffled each epoch. The type embeddings are read-only. The model with
/// the lowest mean validation loss seen at any checkpoint is returned.
pub fn train_encoder<S, A>(
    model: A,
    table: &EmbeddingTable<S>,
    train: &[Vec<usize>],
    validation: &[Vec<usize>],
    config: &EncoderTrainConfig,
) -> Result<EncoderTrainOutcome<A>>
where
    S: Scalar,
    A: WindowAutoencoder<S>,
{
    if config.batch_size == 0 || config.cadence == 0 {
        return Err(Error::InvalidConfig(
            "batch size and validation cadence must be positive".into(),
        ));
    }
    let mut instances: Vec<(usize, usize)> = train
        .iter()
        .enumerate()
        .flat_map(|(s, sent)| (0..sent.len()).map(move |j| (s, j)))
        .collect();
    if instances.is_empty() {
        return Err(Error::InvalidArgument("training corpus has no tokens".into()));
    }
    let weights = model.scheme().weights::<S>(model.radius());
    let vocab = table.vocab();
    let mut rng = stream(config.seed, Stream::Shuffle);
    let mut opt = SgdMomentum::new(S::lit(config.learning_rate), S::lit(config.momentum));

    let mut model = model;
    let mut grads = model.zeros_like();
    let initial = finite_or_err(mean_wre(&model, table, validation)?, "encoder validation")?;
    let mut best = (initial, model.clone());
    let mut history = vec![Checkpoint {
        epoch: 0,
        minibatch: 0,
        val_loss: initial,
    }];
    info!("encoder: initial validation loss {initial:.6}");

    let mut step = 0usize;
    for epoch in 1..=config.epochs {
        instances.shuffle(&mut rng);
        let batches = instances.chunks(config.batch_size);
        let n_batches = batches.len();
        for (b, batch) in batches.enumerate() {
            grads.fill_zero();
            let mut batch_loss = S::zero();
            for &(s, j) in batch {
                let w = ContextWindow::extract(&train[s], j, model.radius(), vocab.bos(), vocab.eos())?;
                batch_loss += model.wre_loss_grad(table, &w, &weights, &mut grads)?;
            }
            if !batch_loss.is_finite() || !grads.all_finite() {
                return Err(Error::NonFinite(format!(
                    "encoder training, epoch {epoch}, minibatch {}",
                    step + 1
                )));
            }
            grads.scale(S::one() / S::lit(batch.len() as f64));
            opt.step(&mut model, &grads)?;
            step += 1;
            debug!(
                "encoder: epoch {epoch} step {step} loss {:.6}",
                batch_loss.as_f64() / batch.len() as f64
            );

            let epoch_end = b + 1 == n_batches;
            if step.is_multiple_of(config.cadence) || epoch_end {
                let val = finite_or_err(mean_wre(&model, table, validation)?, "encoder validation")?;
                history.push(Checkpoint {
                    epoch,
                    minibatch: step,
                    val_loss: val,
                });
                info!("encoder: epoch {epoch} step {step} validation loss {val:.6}");
                if val < best.0 {
                    best = (val, model.clone());
                }
            }
        }
    }
    Ok(EncoderTrainOutcome {
        model: best.1,
        initial_val_loss: initial,
        best_val_loss: best.0,
        history,
    })
}

fn finite_or_err(v: f64, what: &str) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::NonFinite(what.to_string()))
    }
}
