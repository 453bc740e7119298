use std::collections::HashSet;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};

use log::{info, warn};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::config::string_list;
use crate::analysis::{export_embeddings_tsv, index_corpus, nearest_neighbors, Metric, TokenRecord};
use crate::encoder::{
    mean_wre, train_encoder, Architecture, EncoderModel, EncoderTrainConfig, FfnConfig, FfnEncoderModel, Seq2SeqConfig,
    Seq2SeqEncoderModel, WeightScheme,
};
use crate::error::{Error, Result};
use crate::features::{
    load_brown_clusters, load_name_list, load_ngram_index, load_tag_dictionary, save_ngram_index, NgramIndex, ResourceBundle,
};
use crate::input::InputSources;
use crate::model_io::{load_encoder, load_parser, load_tagger, save_encoder, save_parser, save_tagger};
use crate::nn::DropoutSpec;
use crate::parser::{attachment_f1, export_arc_scores, load_parsed, parse_corpus, train_parser, write_parsed, ParserConfig};
use crate::rng::{stream, Stream};
use crate::tagger::{load_tagged, subsample, tag_sentence, tagging_accuracy, train_tagger, TaggedSentence, TaggerConfig, Tagset};
use crate::training::SupervisedConfig;
use crate::vocab::{load_word2vec_text, read_corpus, EmbeddingTable};

/// What a command reports on stdout besides its config echo.
pub struct Outcome {
    pub metrics: Value,
    pub model_path: Option<String>,
}

fn required<'a>(value: &'a Option<String>, key: &str) -> Result<&'a str> {
    value
        .as_deref()
        .ok_or_else(|| Error::InvalidConfig(format!("missing required setting `{key}`")))
}

fn create(path: &str) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path).map_err(|e| Error::io(path, e))?))
}

fn finish(mut w: BufWriter<File>, path: &str) -> Result<()> {
    w.flush().map_err(|e| Error::io(path, e))
}

fn load_table(path: &str) -> Result<EmbeddingTable<f32>> {
    info!("loading type embeddings from {path}");
    load_word2vec_text(path)
}

fn load_encoders(paths: &[String]) -> Result<Vec<EncoderModel<f32>>> {
    paths.iter().map(load_encoder).collect()
}

fn to_ids(table: &EmbeddingTable<f32>, corpus: &[Vec<String>]) -> Vec<Vec<usize>> {
    corpus.iter().map(|s| table.vocab().ids(s)).collect()
}

type TokenLines = (Vec<Vec<String>>, Vec<Vec<String>>);

/// Sentences of one-token-per-line input; the first tab-separated column is
/// the token and the second, when present, its tag.
fn read_token_lines(path: &str) -> Result<TokenLines> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut tokens = vec![Vec::new()];
    let mut tags = vec![Vec::new()];
    for line in BufReader::new(file).lines() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            if !tokens.last().unwrap().is_empty() {
                tokens.push(Vec::new());
                tags.push(Vec::new());
            }
            continue;
        }
        let mut cols = line.split('\t');
        tokens.last_mut().unwrap().push(cols.next().unwrap_or_default().to_string());
        tags.last_mut()
            .unwrap()
            .push(cols.next().unwrap_or_default().trim_end().to_string());
    }
    if tokens.last().unwrap().is_empty() {
        tokens.pop();
        tags.pop();
    }
    Ok((tokens, tags))
}

fn io_err(path: &str) -> impl Fn(std::io::Error) -> Error + '_ {
    move |e| Error::io(path, e)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainEncoderConfig {
    pub embeddings: Option<String>,
    pub train: Option<String>,
    pub validation: Option<String>,
    pub output: Option<String>,
    pub architecture: String,
    pub radius: usize,
    pub hidden: usize,
    pub embedding_dim: usize,
    pub scheme: String,
    pub cadence: usize,
    pub epochs: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
    pub momentum: f64,
    pub seed: u64,
}

impl Default for TrainEncoderConfig {
    fn default() -> Self {
        let t = EncoderTrainConfig::default();
        let f = FfnConfig::default();
        Self {
            embeddings: None,
            train: None,
            validation: None,
            output: None,
            architecture: "ffn".into(),
            radius: f.radius,
            hidden: f.hidden,
            embedding_dim: f.embedding_dim,
            scheme: f.scheme.to_string(),
            cadence: t.cadence,
            epochs: t.epochs,
            batch_size: t.batch_size,
            learning_rate: t.learning_rate,
            momentum: t.momentum,
            seed: t.seed,
        }
    }
}

pub fn train_encoder_cmd(c: &TrainEncoderConfig) -> Result<Outcome> {
    let architecture: Architecture = c.architecture.parse()?;
    let scheme: WeightScheme = c.scheme.parse()?;
    let output = required(&c.output, "output")?;
    let table = load_table(required(&c.embeddings, "embeddings")?)?;
    let train = to_ids(&table, &read_corpus(required(&c.train, "train")?)?);
    let validation = match &c.validation {
        Some(p) => to_ids(&table, &read_corpus(p)?),
        None => {
            warn!("no validation corpus given; validating on the training corpus");
            train.clone()
        }
    };
    let mut rng = stream(c.seed, Stream::Init);
    let model: EncoderModel<f32> = match architecture {
        Architecture::Ffn => FfnEncoderModel::new(
            &FfnConfig {
                type_dim: table.dim(),
                radius: c.radius,
                hidden: c.hidden,
                embedding_dim: c.embedding_dim,
                scheme,
            },
            &mut rng,
        )
        .into(),
        Architecture::Seq2seq => Seq2SeqEncoderModel::new(
            &Seq2SeqConfig {
                type_dim: table.dim(),
                radius: c.radius,
                embedding_dim: c.embedding_dim,
                scheme,
            },
            &mut rng,
        )
        .into(),
    };
    let opts = EncoderTrainConfig {
        epochs: c.epochs,
        batch_size: c.batch_size,
        learning_rate: c.learning_rate,
        momentum: c.momentum,
        cadence: c.cadence,
        seed: c.seed,
    };
    let out = train_encoder(model, &table, &train, &validation, &opts)?;
    save_encoder(&out.model, output)?;
    info!("saved encoder to {output}");
    Ok(Outcome {
        metrics: json!({
            "initial_val_wre": out.initial_val_loss,
            "best_val_wre": out.best_val_loss,
            "final_val_wre": mean_wre(&out.model, &table, &validation)?,
            "checkpoints": out.history,
        }),
        model_path: Some(output.to_string()),
    })
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct EmbedConfig {
    pub embeddings: Option<String>,
    pub encoder: Option<String>,
    pub corpus: Option<String>,
    pub tagged: bool,
    #[serde(deserialize_with = "string_list")]
    pub types: Vec<String>,
    pub output: Option<String>,
}

fn build_index(
    table: &EmbeddingTable<f32>,
    encoder: &EncoderModel<f32>,
    corpus_path: &str,
    tagged: bool,
    types: &[String],
) -> Result<Vec<TokenRecord<f32>>> {
    let (corpus, tags) = if tagged {
        let (c, t) = read_token_lines(corpus_path)?;
        (c, Some(t))
    } else {
        (read_corpus(corpus_path)?, None)
    };
    let filter: HashSet<String> = types.iter().cloned().collect();
    index_corpus(
        encoder,
        table,
        &corpus,
        (!filter.is_empty()).then_some(&filter),
        tags.as_deref(),
    )
}

pub fn embed_cmd(c: &EmbedConfig) -> Result<Outcome> {
    let output = required(&c.output, "output")?;
    let table = load_table(required(&c.embeddings, "embeddings")?)?;
    let encoder = load_encoder(required(&c.encoder, "encoder")?)?;
    let index = build_index(&table, &encoder, required(&c.corpus, "corpus")?, c.tagged, &c.types)?;
    let mut w = create(output)?;
    export_embeddings_tsv(&index, &mut w).map_err(io_err(output))?;
    finish(w, output)?;
    Ok(Outcome {
        metrics: json!({ "records": index.len(), "output": output }),
        model_path: None,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct KnnConfig {
    pub embeddings: Option<String>,
    pub encoder: Option<String>,
    pub corpus: Option<String>,
    pub queries: Option<String>,
    #[serde(deserialize_with = "string_list")]
    pub types: Vec<String>,
    pub k: usize,
    pub metric: String,
    pub same_type: bool,
    pub output: Option<String>,
}

impl Default for KnnConfig {
    fn default() -> Self {
        Self {
            embeddings: None,
            encoder: None,
            corpus: None,
            queries: None,
            types: Vec::new(),
            k: 4,
            metric: "euclidean".into(),
            same_type: true,
            output: None,
        }
    }
}

pub fn knn_cmd(c: &KnnConfig) -> Result<Outcome> {
    let metric: Metric = c.metric.parse()?;
    if c.types.is_empty() {
        return Err(Error::InvalidConfig("`types` must name at least one query word type".into()));
    }
    let table = load_table(required(&c.embeddings, "embeddings")?)?;
    let encoder = load_encoder(required(&c.encoder, "encoder")?)?;
    let corpus = required(&c.corpus, "corpus")?;
    let index = build_index(&table, &encoder, corpus, false, if c.same_type { &c.types } else { &[] })?;
    let queries = build_index(&table, &encoder, c.queries.as_deref().unwrap_or(corpus), false, &c.types)?;

    let mut report = String::new();
    let mut results = Vec::new();
    for q in &queries {
        let pool: Vec<TokenRecord<f32>> = if c.same_type {
            index.iter().filter(|r| r.token == q.token).cloned().collect()
        } else {
            index.clone()
        };
        let hits = if pool.is_empty() {
            Vec::new()
        } else {
            nearest_neighbors(q, &pool, c.k, metric)?
        };
        report.push_str(&format!("{}\n", q.snippet));
        for (rank, h) in hits.iter().enumerate() {
            report.push_str(&format!("  {}. {:.6}  {}\n", rank + 1, h.distance, h.record.snippet));
        }
        results.push(json!({
            "sentence_id": q.sentence_id,
            "position": q.position,
            "snippet": q.snippet,
            "neighbors": hits.iter().map(|h| json!({
                "sentence_id": h.record.sentence_id,
                "position": h.record.position,
                "snippet": h.record.snippet,
                "distance": h.distance,
            })).collect::<Vec<_>>(),
        }));
    }
    match &c.output {
        Some(path) => std::fs::write(path, &report).map_err(io_err(path))?,
        None => eprint!("{report}"),
    }
    Ok(Outcome {
        metrics: json!({ "queries": queries.len(), "results": results }),
        model_path: None,
    })
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct ResourceConfig {
    pub brown_clusters: Option<String>,
    pub tag_dictionary: Option<String>,
    #[serde(deserialize_with = "string_list")]
    pub name_lists: Vec<String>,
    pub ngrams: Option<String>,
}

impl ResourceConfig {
    /// `ngrams` falls back to `fallback_ngrams`, then to building an index
    /// from `build_from` (which is then written to `fallback_ngrams`).
    fn load(&self, fallback_ngrams: &str, build_from: Option<&[TaggedSentence]>) -> Result<ResourceBundle> {
        let ngrams = match (&self.ngrams, build_from) {
            (Some(p), _) => load_ngram_index(p)?,
            (None, Some(train)) => {
                let idx = NgramIndex::build(train.iter().flat_map(|s| s.tokens.iter().map(String::as_str)));
                save_ngram_index(&idx, fallback_ngrams)?;
                info!("wrote {} character n-gram slots to {fallback_ngrams}", idx.len());
                idx
            }
            (None, None) => load_ngram_index(fallback_ngrams)?,
        };
        Ok(ResourceBundle {
            brown_clusters: self
                .brown_clusters
                .as_ref()
                .map(load_brown_clusters)
                .transpose()?
                .unwrap_or_default(),
            tag_dictionary: self
                .tag_dictionary
                .as_ref()
                .map(load_tag_dictionary)
                .transpose()?
                .unwrap_or_default(),
            name_lists: self.name_lists.iter().map(load_name_list).collect::<Result<_>>()?,
            ngrams,
        })
    }
}

fn ngram_sidecar(model: &str) -> String {
    format!("{model}.ngrams")
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainTaggerConfig {
    pub embeddings: Option<String>,
    #[serde(deserialize_with = "string_list")]
    pub encoders: Vec<String>,
    pub tagset: Option<String>,
    pub train: Option<String>,
    pub validation: Option<String>,
    pub output: Option<String>,
    pub train_fraction: f64,
    pub window: usize,
    pub omit_center: bool,
    pub word_features: bool,
    pub extended_features: bool,
    pub update_embeddings: bool,
    pub anchor_lambda: f64,
    pub hidden: usize,
    pub input_dropout: f64,
    pub hidden_dropout: f64,
    pub epochs: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
    pub momentum: f64,
    pub patience: usize,
    pub seed: u64,
    #[serde(flatten)]
    pub resources: ResourceConfig,
}

impl Default for TrainTaggerConfig {
    fn default() -> Self {
        let t = TaggerConfig::default();
        let s = SupervisedConfig::default();
        Self {
            embeddings: None,
            encoders: Vec::new(),
            tagset: None,
            train: None,
            validation: None,
            output: None,
            train_fraction: 1.0,
            window: t.window,
            omit_center: t.omit_center,
            word_features: t.word_features,
            extended_features: t.extended_features,
            update_embeddings: t.update_embeddings,
            anchor_lambda: t.anchor_lambda,
            hidden: t.hidden,
            input_dropout: 0.0,
            hidden_dropout: 0.0,
            epochs: s.epochs,
            batch_size: s.batch_size,
            learning_rate: s.learning_rate,
            momentum: s.momentum,
            patience: s.patience,
            seed: s.seed,
            resources: ResourceConfig::default(),
        }
    }
}

pub fn train_tagger_cmd(c: &TrainTaggerConfig) -> Result<Outcome> {
    let output = required(&c.output, "output")?;
    let tagset = Tagset::load(required(&c.tagset, "tagset")?)?;
    let table = load_table(required(&c.embeddings, "embeddings")?)?;
    let encoders = load_encoders(&c.encoders)?;
    let mut train = load_tagged(required(&c.train, "train")?, &tagset)?;
    if c.train_fraction < 1.0 {
        train = subsample(&train, c.train_fraction, c.seed)?;
        info!("subsampled {} training sentences", train.len());
    }
    let validation = load_tagged(required(&c.validation, "validation")?, &tagset)?;
    let resources = if c.extended_features {
        Some(c.resources.load(&ngram_sidecar(output), Some(&train))?)
    } else {
        None
    };
    let mut sources = InputSources::new(&table).with_encoders(&encoders);
    if let Some(r) = &resources {
        sources = sources.with_resources(r);
    }
    let config = TaggerConfig {
        window: c.window,
        omit_center: c.omit_center,
        word_features: c.word_features,
        extended_features: c.extended_features,
        update_embeddings: c.update_embeddings,
        anchor_lambda: c.anchor_lambda,
        hidden: c.hidden,
        dropout: DropoutSpec::new(c.input_dropout, c.hidden_dropout)?,
    };
    let opts = SupervisedConfig {
        epochs: c.epochs,
        batch_size: c.batch_size,
        learning_rate: c.learning_rate,
        momentum: c.momentum,
        patience: c.patience,
        seed: c.seed,
    };
    let out = train_tagger(&train, &validation, config, tagset, &sources, &opts)?;
    save_tagger(&out.model, output)?;
    info!("saved tagger to {output}");
    Ok(Outcome {
        metrics: json!({
            "initial_val_accuracy": out.initial_val_accuracy,
            "best_val_accuracy": out.best_val_accuracy,
            "best_epoch": out.best_epoch,
            "history": out.history,
        }),
        model_path: Some(output.to_string()),
    })
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct TagConfig {
    pub embeddings: Option<String>,
    #[serde(deserialize_with = "string_list")]
    pub encoders: Vec<String>,
    pub model: Option<String>,
    pub input: Option<String>,
    pub output: Option<String>,
    #[serde(flatten)]
    pub resources: ResourceConfig,
}

pub fn tag_cmd(c: &TagConfig) -> Result<Outcome> {
    let model_path = required(&c.model, "model")?;
    let output = required(&c.output, "output")?;
    let model = load_tagger::<f32>(model_path)?;
    let table = load_table(required(&c.embeddings, "embeddings")?)?;
    let encoders = load_encoders(&c.encoders)?;
    let resources = if model.config.extended_features {
        Some(c.resources.load(&ngram_sidecar(model_path), None)?)
    } else {
        None
    };
    let mut sources = InputSources::new(&table).with_encoders(&encoders);
    if let Some(r) = &resources {
        sources = sources.with_resources(r);
    }
    let (sentences, _) = read_token_lines(required(&c.input, "input")?)?;
    let mut w = create(output)?;
    let mut tokens = 0;
    for (k, s) in sentences.iter().enumerate() {
        let tags = tag_sentence(&model, &sources, s)?;
        if k > 0 {
            writeln!(w).map_err(io_err(output))?;
        }
        for (tok, t) in s.iter().zip(tags) {
            writeln!(w, "{tok}\t{}", model.tagset.tag(t).unwrap_or("?")).map_err(io_err(output))?;
        }
        tokens += s.len();
    }
    finish(w, output)?;
    Ok(Outcome {
        metrics: json!({ "sentences": sentences.len(), "tokens": tokens, "output": output }),
        model_path: None,
    })
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct EvalTagsConfig {
    pub tagset: Option<String>,
    pub predicted: Option<String>,
    pub gold: Option<String>,
}

pub fn eval_tags_cmd(c: &EvalTagsConfig) -> Result<Outcome> {
    let tagset = Tagset::load(required(&c.tagset, "tagset")?)?;
    let pred = load_tagged(required(&c.predicted, "predicted")?, &tagset)?;
    let gold = load_tagged(required(&c.gold, "gold")?, &tagset)?;
    let pred: Vec<Vec<usize>> = pred.into_iter().map(|s| s.tags).collect();
    let accuracy = tagging_accuracy(&pred, &gold)?;
    Ok(Outcome {
        metrics: json!({ "accuracy": accuracy, "tokens": gold.iter().map(|s| s.tags.len()).sum::<usize>() }),
        model_path: None,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainParserConfig {
    pub embeddings: Option<String>,
    #[serde(deserialize_with = "string_list")]
    pub encoders: Vec<String>,
    pub train: Option<String>,
    pub validation: Option<String>,
    pub output: Option<String>,
    pub window: i32,
    pub omit_center: bool,
    pub word_features: bool,
    pub update_embeddings: bool,
    pub anchor_lambda: f64,
    pub hidden: usize,
    pub epochs: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
    pub momentum: f64,
    pub patience: usize,
    pub seed: u64,
}

impl Default for TrainParserConfig {
    fn default() -> Self {
        let p = ParserConfig::default();
        let s = SupervisedConfig::default();
        Self {
            embeddings: None,
            encoders: Vec::new(),
            train: None,
            validation: None,
            output: None,
            window: p.window,
            omit_center: p.omit_center,
            word_features: p.word_features,
            update_embeddings: p.update_embeddings,
            anchor_lambda: p.anchor_lambda,
            hidden: p.hidden,
            epochs: s.epochs,
            batch_size: s.batch_size,
            learning_rate: s.learning_rate,
            momentum: s.momentum,
            patience: s.patience,
            seed: s.seed,
        }
    }
}

pub fn train_parser_cmd(c: &TrainParserConfig) -> Result<Outcome> {
    let output = required(&c.output, "output")?;
    let table = load_table(required(&c.embeddings, "embeddings")?)?;
    let encoders = load_encoders(&c.encoders)?;
    let train = load_parsed(required(&c.train, "train")?)?;
    let validation = load_parsed(required(&c.validation, "validation")?)?;
    let sources = InputSources::new(&table).with_encoders(&encoders);
    let config = ParserConfig {
        window: c.window,
        omit_center: c.omit_center,
        word_features: c.word_features,
        update_embeddings: c.update_embeddings,
        anchor_lambda: c.anchor_lambda,
        hidden: c.hidden,
    };
    let opts = SupervisedConfig {
        epochs: c.epochs,
        batch_size: c.batch_size,
        learning_rate: c.learning_rate,
        momentum: c.momentum,
        patience: c.patience,
        seed: c.seed,
    };
    let out = train_parser(&train, &validation, config, &sources, &opts)?;
    save_parser(&out.model, output)?;
    info!("saved parser to {output}");
    Ok(Outcome {
        metrics: json!({
            "initial_val_f1": out.initial_val_f1,
            "best_val_f1": out.best_val_f1,
            "best_epoch": out.best_epoch,
            "history": out.history,
        }),
        model_path: Some(output.to_string()),
    })
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct ParseConfig {
    pub embeddings: Option<String>,
    #[serde(deserialize_with = "string_list")]
    pub encoders: Vec<String>,
    pub model: Option<String>,
    pub input: Option<String>,
    pub output: Option<String>,
}

pub fn parse_cmd(c: &ParseConfig) -> Result<Outcome> {
    let output = required(&c.output, "output")?;
    let model = load_parser::<f32>(required(&c.model, "model")?)?;
    let table = load_table(required(&c.embeddings, "embeddings")?)?;
    let encoders = load_encoders(&c.encoders)?;
    let sources = InputSources::new(&table).with_encoders(&encoders);
    let mut corpus = load_parsed(required(&c.input, "input")?)?;
    for s in &mut corpus {
        s.heads.iter_mut().for_each(|h| *h = None);
    }
    let parsed = parse_corpus(&model, &sources, &corpus)?;
    let mut w = create(output)?;
    write_parsed(&mut w, &parsed).map_err(io_err(output))?;
    finish(w, output)?;
    Ok(Outcome {
        metrics: json!({ "sentences": parsed.len(), "output": output }),
        model_path: None,
    })
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct EvalParseConfig {
    pub predicted: Option<String>,
    pub gold: Option<String>,
}

pub fn eval_parse_cmd(c: &EvalParseConfig) -> Result<Outcome> {
    let pred = load_parsed(required(&c.predicted, "predicted")?)?;
    let gold = load_parsed(required(&c.gold, "gold")?)?;
    let s = attachment_f1(&pred, &gold)?;
    Ok(Outcome {
        metrics: json!({ "precision": s.precision, "recall": s.recall, "f1": s.f1 }),
        model_path: None,
    })
}

pub fn export_arc_scores_cmd(c: &ParseConfig) -> Result<Outcome> {
    let output = required(&c.output, "output")?;
    let model = load_parser::<f32>(required(&c.model, "model")?)?;
    let table = load_table(required(&c.embeddings, "embeddings")?)?;
    let encoders = load_encoders(&c.encoders)?;
    let sources = InputSources::new(&table).with_encoders(&encoders);
    let corpus = load_parsed(required(&c.input, "input")?)?;
    let mut w = create(output)?;
    let lines = export_arc_scores(&model, &sources, &corpus, &mut w)?;
    finish(w, output)?;
    Ok(Outcome {
        metrics: json!({ "lines": lines, "output": output }),
        model_path: None,
    })
}
