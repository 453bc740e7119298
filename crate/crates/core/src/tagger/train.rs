use log::info;
use rand::seq::SliceRandom;

use super::corpus::{TaggedSentence, Tagset};
use super::model::{TaggerConfig, TaggerModel};
use crate::error::{check_len, Error, Result};
use crate::input::{EmbeddingUpdater, InputSources, PreparedSentence};
use crate::nn::{Params, SgdMomentum};
use crate::rng::{stream, Stream};
use crate::scalar::Scalar;
use crate::training::{EpochRecord, SupervisedConfig};

#[derive(Debug, Clone)]
pub struct TaggerTrainOutcome<S> {
    /// Snapshot with the best validation accuracy.
    pub model: TaggerModel<S>,
    pub initial_val_accuracy: f64,
    pub best_val_accuracy: f64,
    pub best_epoch: usize,
    pub history: Vec<EpochRecord>,
}

fn prepare_all<S: Scalar>(
    model: &TaggerModel<S>,
    sources: &InputSources<'_, S>,
    corpus: &[TaggedSentence],
) -> Result<Vec<PreparedSentence<S>>> {
    corpus
        .iter()
        .map(|s| {
            check_len("tags per sentence", s.tokens.len(), s.tags.len())?;
            if let Some(&t) = s.tags.iter().find(|&&t| t >= model.tagset.len()) {
                return Err(Error::OutOfRange {
                    index: t,
                    len: model.tagset.len(),
                });
            }
            model.prepare(sources, &s.tokens)
        })
        .collect()
}

fn accuracy<S: Scalar>(
    model: &TaggerModel<S>,
    sources: &InputSources<'_, S>,
    prepared: &[PreparedSentence<S>],
    gold: &[TaggedSentence],
) -> Result<f64> {
    let predicted = prepared
        .iter()
        .map(|p| model.tag_prepared(sources, p))
        .collect::<Result<Vec<_>>>()?;
    super::tagging_accuracy(&predicted, gold)
}

/// Minibatch SGD on per-token log loss with early stopping on validation
/// accuracy. Encoders in `sources` are only read.
pub fn train_tagger<S: Scalar>(
    train: &[TaggedSentence],
    validation: &[TaggedSentence],
    config: TaggerConfig,
    tagset: Tagset,
    sources: &InputSources<'_, S>,
    opts: &SupervisedConfig,
) -> Result<TaggerTrainOutcome<S>> {
    opts.validate()?;
    let mut init_rng = stream(opts.seed, Stream::Init);
    let mut model = TaggerModel::new(config, tagset, sources, &mut init_rng)?;
    let train_prep = prepare_all(&model, sources, train)?;
    let val_prep = prepare_all(&model, sources, validation)?;

    let mut instances: Vec<(usize, usize)> = train
        .iter()
        .enumerate()
        .flat_map(|(s, sent)| (0..sent.tags.len()).map(move |j| (s, j)))
        .collect();
    if instances.is_empty() {
        return Err(Error::InvalidArgument("training corpus has no tokens".into()));
    }

    let lr = S::lit(opts.learning_rate);
    let mu = S::lit(opts.momentum);
    let mut opt = SgdMomentum::new(lr, mu);
    let mut updater = model.tuned_embeddings.is_some().then(|| {
        let seen = train_prep.iter().flat_map(|p| p.ids.iter().copied());
        EmbeddingUpdater::new(sources.table, seen, SgdMomentum::new(lr, mu))
    });
    let lambda = S::lit(model.config.anchor_lambda);
    let mut shuffle_rng = stream(opts.seed, Stream::Shuffle);
    let mut dropout_rng = stream(opts.seed, Stream::Dropout);
    let mut grads = model.net.zeros_like();

    let initial = accuracy(&model, sources, &val_prep, validation)?;
    let mut history = vec![EpochRecord {
        epoch: 0,
        train_loss: f64::NAN,
        val_score: initial,
    }];
    let mut best = (initial, 0usize, model.clone());
    info!("tagger epoch 0: val accuracy {initial:.2}");

    for epoch in 1..=opts.epochs {
        instances.shuffle(&mut shuffle_rng);
        let mut total = 0.0;
        for batch in instances.chunks(opts.batch_size) {
            grads.fill_zero();
            if let Some(u) = updater.as_mut() {
                u.zero_grads();
            }
            for &(s, j) in batch {
                let loss = model.token_loss_grad(
                    sources,
                    &train_prep[s],
                    j,
                    train[s].tags[j],
                    Some(&mut dropout_rng),
                    &mut grads,
                    |id, g| {
                        if let Some(u) = updater.as_mut() {
                            u.accumulate(id, g)
                        }
                    },
                )?;
                total += loss.as_f64();
            }
            if !grads.all_finite() || !updater.as_ref().is_none_or(|u| u.grads_finite()) {
                return Err(Error::NonFinite(format!("tagger gradient in epoch {epoch}")));
            }
            grads.scale(S::one() / S::lit(batch.len() as f64));
            opt.step(&mut model.net, &grads)?;
            if let (Some(u), Some(m)) = (updater.as_mut(), model.tuned_embeddings.as_mut()) {
                u.step(m, batch.len(), lambda)?;
            }
        }
        if !model.all_finite() {
            return Err(Error::NonFinite(format!("tagger parameters after epoch {epoch}")));
        }
        let train_loss = total / instances.len() as f64;
        let val = accuracy(&model, sources, &val_prep, validation)?;
        info!("tagger epoch {epoch}: train loss {train_loss:.4}, val accuracy {val:.2}");
        history.push(EpochRecord {
            epoch,
            train_loss,
            val_score: val,
        });
        if val > best.0 {
            best = (val, epoch, model.clone());
        } else if epoch - best.1 >= opts.patience {
            info!("tagger early stop after epoch {epoch}");
            break;
        }
    }

    let (best_val_accuracy, best_epoch, model) = best;
    Ok(TaggerTrainOutcome {
        model,
        initial_val_accuracy: initial,
        best_val_accuracy,
        best_epoch,
        history,
    })
}
