use super::{MetricsError, Result};
use crate::toylm::ModelConfig;

const GIB: f64 = (1u64 << 30) as f64;

/// Size in GiB of a `vocab_size × hidden` matrix at `bytes_per_param`.
///
/// Returns the unrounded value; use [`round2`] for display.
pub fn memory_footprint(vocab_size: usize, hidden: usize, bytes_per_param: usize) -> Result<f64> {
    if vocab_size == 0 || hidden == 0 || bytes_per_param == 0 {
        return Err(MetricsError::NonPositive);
    }
    let bytes = (vocab_size as u128)
        .checked_mul(hidden as u128)
        .and_then(|v| v.checked_mul(bytes_per_param as u128))
        .filter(|&b| b <= u64::MAX as u128)
        .ok_or(MetricsError::Overflow)?;
    Ok(bytes as f64 / GIB)
}

/// Half-up rounding to two decimals.
pub fn round2(x: f64) -> f64 {
    // The 1e-9 nudge keeps values like 0.125 (stored as 0.12499999…) from
    // rounding down.
    (x * 100.0 + 0.5 + 1e-9).floor() / 100.0
}

/// Share of parameters in the embedding and output matrices.
pub fn embedding_fraction(config: &ModelConfig) -> f64 {
    config.vocab_parameters() as f64 / config.parameter_count() as f64
}

/// One model column of the memory table.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ModelShape {
    pub family: &'static str,
    pub name: &'static str,
    pub hidden: usize,
}

/// One row of the memory table: sub-vocabulary sizes per model family.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VocabRow {
    pub label: &'static str,
    pub bloom: usize,
    pub llama: usize,
}

pub const MODEL_SHAPES: [ModelShape; 4] = [
    ModelShape {
        family: "bloom",
        name: "BLOOM-560M",
        hidden: 1024,
    },
    ModelShape {
        family: "bloom",
        name: "BLOOM-1B7",
        hidden: 2048,
    },
    ModelShape {
        family: "bloom",
        name: "BLOOM-7B1",
        hidden: 4096,
    },
    ModelShape {
        family: "llama",
        name: "LLaMA-7B",
        hidden: 4096,
    },
];

pub const VOCAB_ROWS: [VocabRow; 9] = [
    VocabRow {
        label: "full vocab",
        bloom: 250680,
        llama: 32000,
    },
    VocabRow {
        label: "bg Unicode",
        bloom: 22912,
        llama: 4736,
    },
    VocabRow {
        label: "bg corpus",
        bloom: 58642,
        llama: 26496,
    },
    VocabRow {
        label: "en Unicode",
        bloom: 186752,
        llama: 27520,
    },
    VocabRow {
        label: "en corpus",
        bloom: 113024,
        llama: 30720,
    },
    VocabRow {
        label: "es Unicode",
        bloom: 187008,
        llama: 27648,
    },
    VocabRow {
        label: "es corpus",
        bloom: 112128,
        llama: 30336,
    },
    VocabRow {
        label: "zh Unicode",
        bloom: 51584,
        llama: 2688,
    },
    VocabRow {
        label: "zh corpus",
        bloom: 104320,
        llama: 28160,
    },
];

impl VocabRow {
    pub fn vocab_for(&self, shape: &ModelShape) -> usize {
        if shape.family == "llama" {
            self.llama
        } else {
            self.bloom
        }
    }
}

/// Footprint of every (row, model) cell, unrounded.
pub fn footprint_table(
    rows: &[VocabRow],
    shapes: &[ModelShape],
    bytes_per_param: usize,
) -> Result<Vec<Vec<f64>>> {
    rows.iter()
        .map(|row| {
            shapes
                .iter()
                .map(|s| memory_footprint(row.vocab_for(s), s.hidden, bytes_per_param))
                .collect()
        })
        .collect()
}
