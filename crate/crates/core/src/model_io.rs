//! Binary model files.
//!
//! Layout, all integers little-endian:
//!
//! | bytes        | content                                                  |
//! |--------------|----------------------------------------------------------|
//! | 8            | magic `TOKEMBED`                                         |
//! | 4 (u32)      | format version, currently 1                              |
//! | 1 (u8)       | kind: 1 ffn encoder, 2 seq2seq encoder, 3 tagger, 4 parser |
//! | 4 (u32)      | header length `h`                                        |
//! | `h`          | UTF-8 JSON header describing shapes and configuration    |
//! | 4 (u32)      | tensor count `t`                                         |
//! | per tensor   | u32 element count, then that many f32 values             |
//!
//! Tensors appear in declaration order: for each dense layer its row-major
//! weight matrix then its bias; for an LSTM cell its `4h x (m + h)` weight
//! (gate rows in the order input, forget, output, candidate) then its bias.
//! FFN encoders store encoder layers then decoder layers; seq2seq encoders
//! store the encoder cell, decoder cell, then the projection layer. Taggers
//! and parsers store their network layers followed by the tuned type
//! embedding matrix when the header's `tuned_embeddings` is true.
//!
//! Values are stored as `f32`, so `f32` models round-trip bit for bit.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::encoder::{EncoderModel, FfnEncoderModel, Seq2SeqEncoderModel, WeightScheme, WindowAutoencoder};
use crate::error::{Error, Result};
use crate::input::EncoderSpec;
use crate::nn::{Activation, Dense, LstmCell, Matrix, Mlp, Params};
use crate::parser::{ParserConfig, ParserModel};
use crate::scalar::Scalar;
use crate::tagger::{TaggerConfig, TaggerModel, Tagset};

pub const MAGIC: &[u8; 8] = b"TOKEMBED";
pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u8)]
pub enum ModelKind {
    FfnEncoder = 1,
    Seq2SeqEncoder = 2,
    Tagger = 3,
    Parser = 4,
}

impl ModelKind {
    fn from_byte(b: u8) -> Result<Self> {
        Ok(match b {
            1 => ModelKind::FfnEncoder,
            2 => ModelKind::Seq2SeqEncoder,
            3 => ModelKind::Tagger,
            4 => ModelKind::Parser,
            _ => return Err(Error::Format(format!("unknown model kind {b}"))),
        })
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct LayerShape {
    input: usize,
    output: usize,
    activation: Activation,
}

fn mlp_shape<S: Scalar>(m: &Mlp<S>) -> Vec<LayerShape> {
    m.layers
        .iter()
        .map(|l| LayerShape {
            input: l.input_size(),
            output: l.output_size(),
            activation: l.activation,
        })
        .collect()
}

fn mlp_from_shape<S: Scalar>(shape: &[LayerShape]) -> Result<Mlp<S>> {
    Mlp::new(shape.iter().map(|l| Dense::zeros(l.input, l.output, l.activation)).collect())
}

#[derive(Debug, Serialize, Deserialize)]
struct FfnHeader {
    type_dim: usize,
    radius: usize,
    embedding_dim: usize,
    scheme: WeightScheme,
    encoder: Vec<LayerShape>,
    decoder: Vec<LayerShape>,
}

#[derive(Debug, Serialize, Deserialize)]
struct Seq2SeqHeader {
    type_dim: usize,
    radius: usize,
    embedding_dim: usize,
    scheme: WeightScheme,
}

#[derive(Debug, Serialize, Deserialize)]
struct TaggerHeader {
    config: TaggerConfig,
    tags: Vec<String>,
    encoders: Vec<EncoderSpec>,
    type_dim: usize,
    vocab_size: usize,
    feature_width: usize,
    network: Vec<LayerShape>,
    tuned_embeddings: bool,
}

#[derive(Debug, Serialize, Deserialize)]
struct ParserHeader {
    config: ParserConfig,
    encoders: Vec<EncoderSpec>,
    type_dim: usize,
    vocab_size: usize,
    network: Vec<LayerShape>,
    tuned_embeddings: bool,
}

fn write_container<W: Write, H: Serialize>(mut out: W, kind: ModelKind, header: &H, tensors: Vec<&[impl Scalar]>) -> Result<()> {
    let io = |e| Error::io("model output", e);
    let json = serde_json::to_vec(header).map_err(|e| Error::Format(e.to_string()))?;
    out.write_all(MAGIC).map_err(io)?;
    out.write_all(&FORMAT_VERSION.to_le_bytes()).map_err(io)?;
    out.write_all(&[kind as u8]).map_err(io)?;
    out.write_all(&u32_len(json.len())?.to_le_bytes()).map_err(io)?;
    out.write_all(&json).map_err(io)?;
    out.write_all(&u32_len(tensors.len())?.to_le_bytes()).map_err(io)?;
    for t in tensors {
        out.write_all(&u32_len(t.len())?.to_le_bytes()).map_err(io)?;
        let mut buf = Vec::with_capacity(4 * t.len());
        for v in t {
            buf.extend_from_slice(&(v.as_f64() as f32).to_le_bytes());
        }
        out.write_all(&buf).map_err(io)?;
    }
    out.flush().map_err(io)
}

fn u32_len(n: usize) -> Result<u32> {
    u32::try_from(n).map_err(|_| Error::Format(format!("length {n} exceeds u32")))
}

struct Container {
    kind: ModelKind,
    header: Vec<u8>,
    tensors: Vec<Vec<f32>>,
}

impl Container {
    fn header<H: DeserializeOwned>(&self) -> Result<H> {
        serde_json::from_slice(&self.header).map_err(|e| Error::Format(format!("bad header: {e}")))
    }

    /// Copies the stored tensors into `model`, which must already have the
    /// right shapes.
    fn fill<S: Scalar, M: Params<S>>(&self, model: &mut M) -> Result<()> {
        let mut dst = model.tensors_mut();
        if dst.len() != self.tensors.len() {
            return Err(Error::Format(format!(
                "expected {} tensors, found {}",
                dst.len(),
                self.tensors.len()
            )));
        }
        for (k, (d, s)) in dst.iter_mut().zip(&self.tensors).enumerate() {
            if d.len() != s.len() {
                return Err(Error::Format(format!(
                    "tensor {k}: expected {} values, found {}",
                    d.len(),
                    s.len()
                )));
            }
            for (a, &b) in d.iter_mut().zip(s) {
                *a = S::lit(f64::from(b));
            }
        }
        Ok(())
    }
}

fn read_u32<R: Read>(r: &mut R) -> Result<u32> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b).map_err(truncated)?;
    Ok(u32::from_le_bytes(b))
}

fn truncated(e: std::io::Error) -> Error {
    Error::Format(format!("truncated model file: {e}"))
}

fn read_container<R: Read>(mut r: R) -> Result<Container> {
    let mut magic = [0u8; 8];
    r.read_exact(&mut magic).map_err(truncated)?;
    if &magic != MAGIC {
        return Err(Error::Format("not a model file (bad magic)".into()));
    }
    let version = read_u32(&mut r)?;
    if version != FORMAT_VERSION {
        return Err(Error::Format(format!("unsupported format version {version}")));
    }
    let mut kind = [0u8; 1];
    r.read_exact(&mut kind).map_err(truncated)?;
    let kind = ModelKind::from_byte(kind[0])?;
    let mut header = vec![0u8; read_u32(&mut r)? as usize];
    r.read_exact(&mut header).map_err(truncated)?;
    let count = read_u32(&mut r)? as usize;
    let mut tensors = Vec::with_capacity(count.min(1024));
    for _ in 0..count {
        let len = read_u32(&mut r)? as usize;
        let mut bytes = vec![0u8; 4 * len];
        r.read_exact(&mut bytes).map_err(truncated)?;
        tensors.push(
            bytes
                .chunks_exact(4)
                .map(|c| f32::from_le_bytes([c[0], c[1], c[2], c[3]]))
                .collect(),
        );
    }
    let mut rest = [0u8; 1];
    if r.read(&mut rest).map_err(truncated)? != 0 {
        return Err(Error::Format("trailing bytes after last tensor".into()));
    }
    Ok(Container { kind, header, tensors })
}

fn expect_kind(c: &Container, kinds: &[ModelKind]) -> Result<()> {
    if kinds.contains(&c.kind) {
        Ok(())
    } else {
        Err(Error::Format(format!("expected {kinds:?} model, found {:?}", c.kind)))
    }
}

pub fn write_encoder<S: Scalar, W: Write>(model: &EncoderModel<S>, out: W) -> Result<()> {
    match model {
        EncoderModel::Ffn(m) => {
            let header = FfnHeader {
                type_dim: m.type_dim(),
                radius: m.radius(),
                embedding_dim: m.embedding_dim(),
                scheme: m.scheme(),
                encoder: mlp_shape(&m.encoder),
                decoder: mlp_shape(&m.decoder),
            };
            write_container(out, ModelKind::FfnEncoder, &header, model.tensors())
        }
        EncoderModel::Seq2Seq(m) => {
            let header = Seq2SeqHeader {
                type_dim: m.type_dim(),
                radius: m.radius(),
                embedding_dim: m.embedding_dim(),
                scheme: m.scheme(),
            };
            write_container(out, ModelKind::Seq2SeqEncoder, &header, model.tensors())
        }
    }
}

pub fn read_encoder<S: Scalar, R: Read>(r: R) -> Result<EncoderModel<S>> {
    let c = read_container(r)?;
    expect_kind(&c, &[ModelKind::FfnEncoder, ModelKind::Seq2SeqEncoder])?;
    let mut model: EncoderModel<S> = if c.kind == ModelKind::FfnEncoder {
        let h: FfnHeader = c.header()?;
        let m = FfnEncoderModel::from_parts(
            mlp_from_shape(&h.encoder)?,
            mlp_from_shape(&h.decoder)?,
            h.type_dim,
            h.radius,
            h.scheme,
        )?;
        if m.embedding_dim() != h.embedding_dim {
            return Err(Error::Format("ffn header embedding_dim disagrees with layer shapes".into()));
        }
        m.into()
    } else {
        let h: Seq2SeqHeader = c.header()?;
        Seq2SeqEncoderModel::from_parts(
            LstmCell::zeros(h.type_dim, h.embedding_dim),
            LstmCell::zeros(h.type_dim, h.embedding_dim),
            Dense::zeros(h.embedding_dim, h.type_dim, Activation::Linear),
            h.radius,
            h.scheme,
        )?
        .into()
    };
    c.fill(&mut model)?;
    Ok(model)
}

pub fn write_tagger<S: Scalar, W: Write>(model: &TaggerModel<S>, out: W) -> Result<()> {
    let header = TaggerHeader {
        config: model.config.clone(),
        tags: model.tagset.tags().to_vec(),
        encoders: model.encoders.clone(),
        type_dim: model.type_dim,
        vocab_size: model.vocab_size,
        feature_width: model.feature_width,
        network: mlp_shape(&model.net),
        tuned_embeddings: model.tuned_embeddings.is_some(),
    };
    write_container(out, ModelKind::Tagger, &header, model.tensors())
}

pub fn read_tagger<S: Scalar, R: Read>(r: R) -> Result<TaggerModel<S>> {
    let c = read_container(r)?;
    expect_kind(&c, &[ModelKind::Tagger])?;
    let h: TaggerHeader = c.header()?;
    let mut model = TaggerModel {
        tagset: Tagset::new(h.tags)?,
        net: mlp_from_shape(&h.network)?,
        tuned_embeddings: h.tuned_embeddings.then(|| Matrix::zeros(h.vocab_size, h.type_dim)),
        config: h.config,
        encoders: h.encoders,
        type_dim: h.type_dim,
        vocab_size: h.vocab_size,
        feature_width: h.feature_width,
    };
    c.fill(&mut model)?;
    Ok(model)
}

pub fn write_parser<S: Scalar, W: Write>(model: &ParserModel<S>, out: W) -> Result<()> {
    let header = ParserHeader {
        config: model.config.clone(),
        encoders: model.encoders.clone(),
        type_dim: model.type_dim,
        vocab_size: model.vocab_size,
        network: mlp_shape(&model.net),
        tuned_embeddings: model.tuned_embeddings.is_some(),
    };
    write_container(out, ModelKind::Parser, &header, model.tensors())
}

pub fn read_parser<S: Scalar, R: Read>(r: R) -> Result<ParserModel<S>> {
    let c = read_container(r)?;
    expect_kind(&c, &[ModelKind::Parser])?;
    let h: ParserHeader = c.header()?;
    let mut model = ParserModel {
        net: mlp_from_shape(&h.network)?,
        tuned_embeddings: h.tuned_embeddings.then(|| Matrix::zeros(h.vocab_size, h.type_dim)),
        config: h.config,
        encoders: h.encoders,
        type_dim: h.type_dim,
        vocab_size: h.vocab_size,
    };
    c.fill(&mut model)?;
    Ok(model)
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path).map_err(|e| Error::io(path, e))?))
}

fn open(path: &Path) -> Result<BufReader<File>> {
    Ok(BufReader::new(File::open(path).map_err(|e| Error::io(path, e))?))
}

fn with_path<T>(path: &Path, r: Result<T>) -> Result<T> {
    r.map_err(|e| match e {
        Error::Format(m) => Error::Format(format!("{}: {m}", path.display())),
        e => e,
    })
}

pub fn save_encoder<S: Scalar>(model: &EncoderModel<S>, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    with_path(path, write_encoder(model, create(path)?))
}

pub fn load_encoder<S: Scalar>(path: impl AsRef<Path>) -> Result<EncoderModel<S>> {
    let path = path.as_ref();
    with_path(path, read_encoder(open(path)?))
}

pub fn save_tagger<S: Scalar>(model: &TaggerModel<S>, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    with_path(path, write_tagger(model, create(path)?))
}

pub fn load_tagger<S: Scalar>(path: impl AsRef<Path>) -> Result<TaggerModel<S>> {
    let path = path.as_ref();
    with_path(path, read_tagger(open(path)?))
}

pub fn save_parser<S: Scalar>(model: &ParserModel<S>, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    with_path(path, write_parser(model, create(path)?))
}

pub fn load_parser<S: Scalar>(path: impl AsRef<Path>) -> Result<ParserModel<S>> {
    let path = path.as_ref();
    with_path(path, read_parser(open(path)?))
}
