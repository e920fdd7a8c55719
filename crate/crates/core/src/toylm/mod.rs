//! A small decoder-only transformer used as a desk-scale stand-in for a
//! production LLM.
//!
//! Architecture: learned token embedding plus sinusoidal positions, `L`
//! pre-norm blocks (LayerNorm → causal multi-head attention → residual,
//! LayerNorm → GELU MLP with 4H inner width → residual), a final LayerNorm,
//! and an output projection of shape `|V| × H`. With tied embeddings the
//! output projection is the embedding matrix itself.
//!
//! All arithmetic is `f32`. Every matrix-vector product computes each output
//! row as an independent left-to-right dot product, so slicing rows out of the
//! output layer leaves the remaining logits bit-for-bit unchanged.

mod config;
mod decode;
mod format;
mod tensor;
mod weights;

use std::io;

pub use config::ModelConfig;
pub use decode::{forward_logits, greedy_decode, remap_output, DecodeResult, DecodeSession};
pub use format::{FORMAT_VERSION, MAGIC};
pub use tensor::Matrix;
pub use weights::{init_random, trim_model, Layer, Linear, ModelWeights, Norm};

#[derive(Debug, thiserror::Error)]
pub enum ModelError {
    #[error("invalid model config: {0}")]
    InvalidConfig(String),
    #[error("model dimensions overflow")]
    DimensionOverflow,
    #[error("token id {id} is out of range for a model vocabulary of size {size}")]
    IdOutOfRange { id: u32, size: usize },
    #[error("context is empty")]
    EmptyContext,
    #[error("context of length {len} exceeds max_context {max}")]
    ContextTooLong { len: usize, max: usize },
    #[error("sub-vocabulary covers {sub} tokens but the model has {model}")]
    VocabMismatch { model: usize, sub: usize },
    #[error("cannot trim to an empty sub-vocabulary")]
    EmptySubVocabulary,
    #[error("model is already trimmed")]
    AlreadyTrimmed,
    #[error("token id {0} is not in the model's sub-vocabulary")]
    NotInSubVocabulary(u32),
    #[error("I/O error: {0}")]
    Io(#[from] io::Error),
    #[error("not a model file (bad magic bytes)")]
    BadMagic,
    #[error("unsupported model format version {0}")]
    UnsupportedVersion(u32),
    #[error("malformed model file: {0}")]
    Format(String),
    #[error("tensor {0} contains non-finite values")]
    NonFinite(String),
}

pub type Result<T, E = ModelError> = std::result::Result<T, E>;
