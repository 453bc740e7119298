use log::info;
use rand::seq::SliceRandom;

use super::corpus::ParsedSentence;
use super::eval::attachment_f1;
use super::model::{ParserConfig, ParserModel};
use crate::error::{Error, Result};
use crate::input::{EmbeddingUpdater, InputSources, PreparedSentence};
use crate::nn::{Params, SgdMomentum};
use crate::rng::{stream, Stream};
use crate::scalar::Scalar;
use crate::training::{EpochRecord, SupervisedConfig};

#[derive(Debug, Clone)]
pub struct ParserTrainOutcome<S> {
    /// Snapshot with the best validation F1.
    pub model: ParserModel<S>,
    pub initial_val_f1: f64,
    pub best_val_f1: f64,
    pub best_epoch: usize,
    pub history: Vec<EpochRecord>,
}

/// Heads predicted under each sentence's own selection flags.
pub(crate) fn parse_prepared<S: Scalar>(
    model: &ParserModel<S>,
    sources: &InputSources<'_, S>,
    corpus: &[ParsedSentence],
    prepared: &[PreparedSentence<S>],
) -> Result<Vec<ParsedSentence>> {
    corpus
        .iter()
        .zip(prepared)
        .map(|(s, p)| {
            Ok(ParsedSentence {
                heads: model.predict_prepared(sources, s, p)?,
                ..s.clone()
            })
        })
        .collect()
}

/// Heads for every sentence, using its selection flags.
pub fn parse_corpus<S: Scalar>(
    model: &ParserModel<S>,
    sources: &InputSources<'_, S>,
    corpus: &[ParsedSentence],
) -> Result<Vec<ParsedSentence>> {
    model.check_sources(sources)?;
    let prepared = corpus.iter().map(|s| model.prepare(sources, s)).collect::<Result<Vec<_>>>()?;
    parse_prepared(model, sources, corpus, &prepared)
}

fn val_f1<S: Scalar>(
    model: &ParserModel<S>,
    sources: &InputSources<'_, S>,
    corpus: &[ParsedSentence],
    prepared: &[PreparedSentence<S>],
) -> Result<f64> {
    Ok(attachment_f1(&parse_prepared(model, sources, corpus, prepared)?, corpus)?.f1)
}

/// Minibatch SGD over sentences on the summed arc loss, keeping the snapshot
/// with the best validation F1.
pub fn train_parser<S: Scalar>(
    train: &[ParsedSentence],
    validation: &[ParsedSentence],
    config: ParserConfig,
    sources: &InputSources<'_, S>,
    opts: &SupervisedConfig,
) -> Result<ParserTrainOutcome<S>> {
    opts.validate()?;
    for s in train.iter().chain(validation) {
        s.validate()?;
    }
    let mut model = ParserModel::new(config, sources, &mut stream(opts.seed, Stream::Init))?;
    let prepare = |c: &[ParsedSentence]| c.iter().map(|s| model.prepare(sources, s)).collect::<Result<Vec<_>>>();
    let train_prep = prepare(train)?;
    let val_prep = prepare(validation)?;
    let arcs: usize = train.iter().map(|s| s.selected_positions().count()).sum();
    if arcs == 0 {
        return Err(Error::InvalidArgument("training corpus has no selected tokens".into()));
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
    let mut grads = model.net.zeros_like();
    let mut order: Vec<usize> = (0..train.len()).collect();

    let initial = val_f1(&model, sources, validation, &val_prep)?;
    let mut history = vec![EpochRecord {
        epoch: 0,
        train_loss: f64::NAN,
        val_score: initial,
    }];
    let mut best = (initial, 0usize, model.clone());
    info!("parser epoch 0: val F1 {initial:.2}");

    for epoch in 1..=opts.epochs {
        order.shuffle(&mut shuffle_rng);
        let mut total = 0.0;
        for batch in order.chunks(opts.batch_size) {
            grads.fill_zero();
            if let Some(u) = updater.as_mut() {
                u.zero_grads();
            }
            for &s in batch {
                let loss = model.sentence_loss_grad(sources, &train[s], &train_prep[s], &mut grads, |id, g| {
                    if let Some(u) = updater.as_mut() {
                        u.accumulate(id, g)
                    }
                })?;
                total += loss.as_f64();
            }
            if !grads.all_finite() || !updater.as_ref().is_none_or(|u| u.grads_finite()) {
                return Err(Error::NonFinite(format!("parser gradient in epoch {epoch}")));
            }
            grads.scale(S::one() / S::lit(batch.len() as f64));
            opt.step(&mut model.net, &grads)?;
            if let (Some(u), Some(m)) = (updater.as_mut(), model.tuned_embeddings.as_mut()) {
                u.step(m, batch.len(), lambda)?;
            }
        }
        if !model.all_finite() {
            return Err(Error::NonFinite(format!("parser parameters after epoch {epoch}")));
        }
        let train_loss = total / arcs as f64;
        let val = val_f1(&model, sources, validation, &val_prep)?;
        info!("parser epoch {epoch}: train loss {train_loss:.4}, val F1 {val:.2}");
        history.push(EpochRecord {
            epoch,
            train_loss,
            val_score: val,
        });
        if val > best.0 {
            best = (val, epoch, model.clone());
        } else if epoch - best.1 >= opts.patience {
            info!("parser early stop after epoch {epoch}");
            break;
        }
    }

    let (best_val_f1, best_epoch, model) = best;
    Ok(ParserTrainOutcome {
        model,
        initial_val_f1: initial,
        best_val_f1,
        best_epoch,
        history,
    })
}
