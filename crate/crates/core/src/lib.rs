//! Context-sensitive token embeddings from window autoencoders over fixed
//! type embeddings, and a tagger and dependency parser that consume them.
//!
//! Everything numeric is generic over [`Scalar`] (`f32` or `f64`). The
//! aliases below fix the scalar: training and the CLI use `f32`, gradient
//! checks use the `*64` variants.

pub mod analysis;
pub mod cli;
pub mod encoder;
pub mod error;
pub mod features;
pub mod input;
pub mod model_io;
pub mod nn;
pub mod parser;
pub mod rng;
pub mod scalar;
pub mod tagger;
pub mod training;
pub mod vocab;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub type Embeddings = vocab::EmbeddingTable<f32>;
pub type Embeddings64 = vocab::EmbeddingTable<f64>;
pub type Encoder = encoder::EncoderModel<f32>;
pub type Encoder64 = encoder::EncoderModel<f64>;
pub type FfnEncoder = encoder::FfnEncoderModel<f32>;
pub type FfnEncoder64 = encoder::FfnEncoderModel<f64>;
pub type Seq2SeqEncoder = encoder::Seq2SeqEncoderModel<f32>;
pub type Seq2SeqEncoder64 = encoder::Seq2SeqEncoderModel<f64>;
pub type Tagger = tagger::TaggerModel<f32>;
pub type Tagger64 = tagger::TaggerModel<f64>;
pub type Parser = parser::ParserModel<f32>;
pub type Parser64 = parser::ParserModel<f64>;
