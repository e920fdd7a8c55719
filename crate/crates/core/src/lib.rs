//! Language-targeted vocabulary trimming for decoder-only language models.
//!
//! The crate is organised around the pipeline it supports:
//!
//! - [`bpe`]: byte-level BPE vocabularies, merges, encoding and decoding.
//! - [`subvocab`]: sub-vocabulary selection (script filtering, corpus hits,
//!   oracle collection) and the old/new id mappings used for trimming.
//! - [`toylm`]: a small decoder-only transformer with a binary weight format,
//!   embedding/output slicing and greedy decoding.
//! - [`metrics`]: miss counting, BLEU and chrF against full-vocabulary output,
//!   and memory footprint arithmetic.
//! - [`bench`]: end-to-end and output-layer timing harnesses.
//! - [`synth`]: deterministic synthetic vocabularies for fixtures and tests.

pub mod bench;
pub mod bpe;
pub mod metrics;
pub mod subvocab;
pub mod synth;
pub mod toylm;

pub use bpe::{decode, encode, load_vocab, token_codepoints, ByteUnicodeTable, Merges, Vocabulary};
pub use subvocab::{
    build_mapping, corpus_select, oracle_select, script_filter, with_input_tokens, Method,
    ScriptSpec, SubVocabulary, DEFAULT_BASE_K,
};
pub use toylm::{
    forward_logits, greedy_decode, init_random, remap_output, trim_model, DecodeResult,
    ModelConfig, ModelWeights,
};
