//! Output-drift and memory metrics.
//!
//! Quality is always measured against the full-vocabulary output of the same
//! model: a miss is any prompt whose trimmed output differs byte-for-byte,
//! and BLEU/chrF use the full output as the reference.

mod bleu;
mod chrf;
mod memory;

use serde::{Deserialize, Serialize};

pub use bleu::{o_bleu, tokenize as bleu_tokenize, BleuStats};
pub use chrf::{o_chrf, ChrfStats};
pub use memory::{
    embedding_fraction, footprint_table, memory_footprint, round2, ModelShape, VocabRow,
    MODEL_SHAPES, VOCAB_ROWS,
};

#[derive(Debug, thiserror::Error)]
pub enum MetricsError {
    #[error("corpora differ in length ({hypotheses} hypotheses, {references} references)")]
    LengthMismatch {
        hypotheses: usize,
        references: usize,
    },
    #[error("corpus is empty")]
    EmptyCorpus,
    #[error("memory footprint inputs must be positive")]
    NonPositive,
    #[error("memory footprint overflows")]
    Overflow,
}

pub type Result<T> = std::result::Result<T, MetricsError>;

fn check_corpus(hypotheses: usize, references: usize) -> Result<()> {
    if hypotheses != references {
        return Err(MetricsError::LengthMismatch {
            hypotheses,
            references,
        });
    }
    if hypotheses == 0 {
        return Err(MetricsError::EmptyCorpus);
    }
    Ok(())
}

/// Number of positions where the outputs differ (exact byte comparison).
pub fn miss_count<F, V>(full_outputs: &[F], vt_outputs: &[V]) -> Result<usize>
where
    F: AsRef<str>,
    V: AsRef<str>,
{
    if full_outputs.len() != vt_outputs.len() {
        return Err(MetricsError::LengthMismatch {
            hypotheses: vt_outputs.len(),
            references: full_outputs.len(),
        });
    }
    Ok(full_outputs
        .iter()
        .zip(vt_outputs)
        .filter(|(f, v)| f.as_ref().as_bytes() != v.as_ref().as_bytes())
        .count())
}

/// Run metadata carried alongside the scores.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ReportMeta {
    pub model_id: String,
    pub language: String,
    pub method: String,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    #[serde(flatten)]
    pub meta: ReportMeta,
    pub n_prompts: usize,
    pub miss: usize,
    pub o_bleu: f64,
    pub o_chrf: f64,
    pub wall_time_seconds: Option<f64>,
    pub subvocab_size: Option<usize>,
    pub memory_gib: Option<f64>,
}

impl EvalReport {
    /// Scores `vt_outputs` against `full_outputs`. Timing and size fields
    /// start empty.
    pub fn score<F, V>(meta: ReportMeta, full_outputs: &[F], vt_outputs: &[V]) -> Result<Self>
    where
        F: AsRef<str>,
        V: AsRef<str>,
    {
        let miss = miss_count(full_outputs, vt_outputs)?;
        let o_bleu = o_bleu(vt_outputs, full_outputs, &meta.language)?;
        let o_chrf = o_chrf(vt_outputs, full_outputs)?;
        Ok(Self {
            meta,
            n_prompts: full_outputs.len(),
            miss,
            o_bleu,
            o_chrf,
            wall_time_seconds: None,
            subvocab_size: None,
            memory_gib: None,
        })
    }
}
