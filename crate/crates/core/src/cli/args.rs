use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

#[derive(Debug, Parser)]
#[command(
    name = "tokembed",
    version,
    about = "Token embeddings from window autoencoders, with a tagger and parser that use them"
)]
pub struct Cli {
    /// Config file (`key = value` lines or a JSON object); flags override it.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Train a token encoder on a plain-text corpus.
    TrainEncoder(TrainEncoderArgs),
    /// Export token embeddings of a corpus as TSV.
    Embed(EmbedArgs),
    /// Nearest-neighbour report for query tokens.
    Knn(KnnArgs),
    /// Train the tagger.
    TrainTagger(TrainTaggerArgs),
    /// Tag a corpus with a trained tagger.
    Tag(TagArgs),
    /// Tagging accuracy of predicted against gold tags.
    EvalTags(EvalTagsArgs),
    /// Train the parser.
    TrainParser(TrainParserArgs),
    /// Predict heads for a dependency corpus.
    Parse(ParseArgs),
    /// Attachment precision, recall and F1.
    EvalParse(EvalParseArgs),
    /// Write the arc score of every candidate arc.
    ExportArcScores(ExportArcScoresArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::TrainEncoder(_) => "train-encoder",
            Command::Embed(_) => "embed",
            Command::Knn(_) => "knn",
            Command::TrainTagger(_) => "train-tagger",
            Command::Tag(_) => "tag",
            Command::EvalTags(_) => "eval-tags",
            Command::TrainParser(_) => "train-parser",
            Command::Parse(_) => "parse",
            Command::EvalParse(_) => "eval-parse",
            Command::ExportArcScores(_) => "export-arc-scores",
        }
    }
}

#[derive(Debug, Args, Serialize, Default)]
pub struct OptimArgs {
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epochs: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub batch_size: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub learning_rate: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub momentum: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

#[derive(Debug, Args, Serialize, Default)]
pub struct TrainEncoderArgs {
    /// Type embeddings in word2vec text format.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub embeddings: Option<String>,
    /// Training corpus, one space-separated sentence per line.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub train: Option<String>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub validation: Option<String>,
    /// Model output path.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output: Option<String>,
    /// `ffn` or `seq2seq`.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub architecture: Option<String>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub radius: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hidden: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub embedding_dim: Option<usize>,
    /// `uniform`, `tapered`, `focused` or `focused:<center weight>`.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scheme: Option<String>,
    /// Validate every this many minibatches.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cadence: Option<usize>,
    #[command(flatten)]
    #[serde(flatten)]
    pub optim: OptimArgs,
}

#[derive(Debug, Args, Serialize, Default)]
pub struct EmbedArgs {
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub embeddings: Option<String>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub encoder: Option<String>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub corpus: Option<String>,
    /// Read the corpus as `token<TAB>tag` lines and keep the tags.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tagged: Option<bool>,
    /// Only these word types (comma-separated).
    #[arg(long, value_delimiter = ',')]
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub types: Vec<String>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output: Option<String>,
}

#[derive(Debug, Args, Serialize, Default)]
pub struct KnnArgs {
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub embeddings: Option<String>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub encoder: Option<String>,
    /// Corpus searched for neighbours.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub corpus: Option<String>,
    /// Corpus holding the query tokens; defaults to `corpus`.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub queries: Option<String>,
    /// Word types to query (comma-separated).
    #[arg(long, value_delimiter = ',')]
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub types: Vec<String>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    /// `euclidean` or `cosine`.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub metric: Option<String>,
    /// Restrict neighbours to the query's word type.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub same_type: Option<bool>,
    /// Text report path.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output: Option<String>,
}

#[derive(Debug, Args, Serialize, Default)]
pub struct SupervisedArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub optim: OptimArgs,
    /// Epochs without validation improvement before stopping.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub patience: Option<usize>,
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub update_embeddings: Option<bool>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub anchor_lambda: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hidden: Option<usize>,
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omit_center: Option<bool>,
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub word_features: Option<bool>,
}

#[derive(Debug, Args, Serialize, Default)]
pub struct ResourceArgs {
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub brown_clusters: Option<String>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tag_dictionary: Option<String>,
    #[arg(long, value_delimiter = ',')]
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub name_lists: Vec<String>,
    /// Character n-gram slot file.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ngrams: Option<String>,
}

#[derive(Debug, Args, Serialize, Default)]
pub struct TrainTaggerArgs {
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub embeddings: Option<String>,
    /// Token encoder model files (comma-separated or repeated).
    #[arg(long, value_delimiter = ',')]
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub encoders: Vec<String>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tagset: Option<String>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub train: Option<String>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub validation: Option<String>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output: Option<String>,
    /// Use this fraction of the training sentences.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub train_fraction: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub window: Option<usize>,
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub extended_features: Option<bool>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub input_dropout: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hidden_dropout: Option<f64>,
    #[command(flatten)]
    #[serde(flatten)]
    pub supervised: SupervisedArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub resources: ResourceArgs,
}

#[derive(Debug, Args, Serialize, Default)]
pub struct TagArgs {
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub embeddings: Option<String>,
    #[arg(long, value_delimiter = ',')]
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub encoders: Vec<String>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub model: Option<String>,
    /// One token per line (extra tab-separated columns are ignored), blank
    /// line between sentences.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub input: Option<String>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output: Option<String>,
    #[command(flatten)]
    #[serde(flatten)]
    pub resources: ResourceArgs,
}

#[derive(Debug, Args, Serialize, Default)]
pub struct EvalTagsArgs {
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tagset: Option<String>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub predicted: Option<String>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gold: Option<String>,
}

#[derive(Debug, Args, Serialize, Default)]
pub struct TrainParserArgs {
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub embeddings: Option<String>,
    #[arg(long, value_delimiter = ',')]
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub encoders: Vec<String>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub train: Option<String>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub validation: Option<String>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output: Option<String>,
    /// Type-embedding window; -1 leaves type embeddings out.
    #[arg(long, allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub window: Option<i32>,
    #[command(flatten)]
    #[serde(flatten)]
    pub supervised: SupervisedArgs,
}

#[derive(Debug, Args, Serialize, Default)]
pub struct ParseArgs {
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub embeddings: Option<String>,
    #[arg(long, value_delimiter = ',')]
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub encoders: Vec<String>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub model: Option<String>,
    /// Dependency corpus; its selection flags choose the tokens to attach.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub input: Option<String>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output: Option<String>,
}

#[derive(Debug, Args, Serialize, Default)]
pub struct EvalParseArgs {
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub predicted: Option<String>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gold: Option<String>,
}

pub type ExportArcScoresArgs = ParseArgs;
