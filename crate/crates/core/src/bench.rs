//! Timing harnesses.
//!
//! [`time_end_to_end`] measures the whole trimmed-inference pipeline from
//! opening the model file to the last generated token, trimming included.
//! [`output_layer_scaling`] times the `|V| × H` output projection alone.

use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bpe::{encode, BpeError, Merges, Vocabulary};
use crate::subvocab::SubVocabulary;
use crate::toylm::{greedy_decode, Matrix, ModelError, ModelWeights};

#[derive(Debug, thiserror::Error)]
pub enum BenchError {
    #[error("repeats must be at least 1")]
    NoRepeats,
    #[error("trials must be at least 3 (got {0})")]
    TooFewTrials(usize),
    #[error("hidden size and vocabulary sizes must be positive")]
    EmptyShape,
    #[error("cannot allocate a {rows} x {cols} matrix")]
    Allocation { rows: usize, cols: usize },
    #[error("model {}: {source}", path.display())]
    Model {
        path: PathBuf,
        #[source]
        source: ModelError,
    },
    #[error("prompt {index}: {source}")]
    Decode {
        index: usize,
        #[source]
        source: ModelError,
    },
    #[error("prompt {index}: {source}")]
    Tokenize {
        index: usize,
        #[source]
        source: BpeError,
    },
    #[error("decoded outputs differ between repeats")]
    NonDeterministic,
}

pub type Result<T, E = BenchError> = std::result::Result<T, E>;

/// Prompts to decode, either pre-tokenized or as text plus tokenizer.
#[derive(Debug, Clone, Copy)]
pub enum Prompts<'a> {
    Ids(&'a [Vec<u32>]),
    Text {
        texts: &'a [String],
        vocab: &'a Vocabulary,
        merges: &'a Merges,
    },
}

impl Prompts<'_> {
    fn len(&self) -> usize {
        match self {
            Prompts::Ids(p) => p.len(),
            Prompts::Text { texts, .. } => texts.len(),
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct EndToEndPlan<'a> {
    pub model_path: &'a Path,
    /// `None` decodes with the full vocabulary.
    pub subvocab: Option<&'a SubVocabulary>,
    pub prompts: Prompts<'a>,
    pub max_new: usize,
    pub eos: Option<u32>,
    pub repeats: usize,
}

/// Per-phase wall time of one run, in seconds.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Phases {
    pub load: f64,
    pub slice: f64,
    pub tokenize: f64,
    pub decode: f64,
}

impl Phases {
    pub fn total(&self) -> f64 {
        self.load + self.slice + self.tokenize + self.decode
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchResult {
    /// Median end-to-end time over repeats.
    pub end_to_end_seconds: f64,
    /// Phase breakdown of the median repeat.
    pub phases: Phases,
    /// End-to-end time of every repeat in run order.
    pub repeat_seconds: Vec<f64>,
    pub tokens_generated: usize,
    pub vocab_size_used: usize,
    pub repeats: usize,
    /// Generated ids per prompt (original-id space), identical across repeats.
    #[serde(skip)]
    pub outputs: Vec<Vec<u32>>,
}

struct Run {
    total: Duration,
    phases: Phases,
    vocab_size: usize,
    outputs: Vec<Vec<u32>>,
}

fn run_once(plan: &EndToEndPlan<'_>) -> Result<Run> {
    let start = Instant::now();
    let model = ModelWeights::load(plan.model_path).map_err(|source| BenchError::Model {
        path: plan.model_path.to_path_buf(),
        source,
    })?;
    let loaded = Instant::now();
    let model = match plan.subvocab {
        Some(sub) => model
            .into_trimmed(sub)
            .map_err(|source| BenchError::Model {
                path: plan.model_path.to_path_buf(),
                source,
            })?,
        None => model,
    };
    let sliced = Instant::now();

    let tokenized: Vec<Vec<u32>>;
    let prompts: &[Vec<u32>] = match plan.prompts {
        Prompts::Ids(p) => p,
        Prompts::Text {
            texts,
            vocab,
            merges,
        } => {
            tokenized = texts
                .iter()
                .enumerate()
                .map(|(index, t)| {
                    encode(t, vocab, merges)
                        .map_err(|source| BenchError::Tokenize { index, source })
                })
                .collect::<Result<_>>()?;
            &tokenized
        }
    };
    let tokenized_at = Instant::now();

    let mut outputs = Vec::with_capacity(prompts.len());
    for (index, prompt) in prompts.iter().enumerate() {
        let result = greedy_decode(&model, prompt, plan.max_new, plan.eos)
            .map_err(|source| BenchError::Decode { index, source })?;
        outputs.push(result.generated().to_vec());
    }
    let end = Instant::now();

    Ok(Run {
        total: end - start,
        phases: Phases {
            load: (loaded - start).as_secs_f64(),
            slice: (sliced - loaded).as_secs_f64(),
            tokenize: (tokenized_at - sliced).as_secs_f64(),
            decode: (end - tokenized_at).as_secs_f64(),
        },
        vocab_size: model.vocab_size(),
        outputs,
    })
}

/// Runs the plan `repeats` times and reports the median run.
///
/// Each repeat loads the model from disk again and re-applies the trim, so
/// both costs are inside the measured window. With an even number of
/// repeats the lower middle run is reported.
pub fn time_end_to_end(plan: &EndToEndPlan<'_>) -> Result<BenchResult> {
    if plan.repeats == 0 {
        return Err(BenchError::NoRepeats);
    }
    let mut runs = Vec::with_capacity(plan.repeats);
    for _ in 0..plan.repeats {
        let run = run_once(plan)?;
        if runs
            .first()
            .is_some_and(|first: &Run| first.outputs != run.outputs)
        {
            return Err(BenchError::NonDeterministic);
        }
        runs.push(run);
    }
    let repeat_seconds: Vec<f64> = runs.iter().map(|r| r.total.as_secs_f64()).collect();
    let mut order: Vec<usize> = (0..runs.len()).collect();
    order.sort_by(|&a, &b| runs[a].total.cmp(&runs[b].total));
    let median = runs.swap_remove(order[(order.len() - 1) / 2]);
    debug_assert_eq!(plan.prompts.len(), median.outputs.len());
    Ok(BenchResult {
        end_to_end_seconds: median.total.as_secs_f64(),
        phases: median.phases,
        repeat_seconds,
        tokens_generated: median.outputs.iter().map(Vec::len).sum(),
        vocab_size_used: median.vocab_size,
        repeats: plan.repeats,
        outputs: median.outputs,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalingPoint {
    pub vocab_size: usize,
    /// Median seconds per projection.
    pub seconds: f64,
}

/// Times `out = W[..v] · x` for each `v` in `vocab_sizes`.
///
/// One random `max(v) × hidden` matrix is allocated and every size uses its
/// leading rows, so all sizes run the same kernel on the same memory. Each
/// size gets one untimed warm-up projection, then `trials` timed ones.
pub fn output_layer_scaling(
    hidden: usize,
    vocab_sizes: &[usize],
    trials: usize,
    seed: u64,
) -> Result<Vec<ScalingPoint>> {
    if trials < 3 {
        return Err(BenchError::TooFewTrials(trials));
    }
    let max = vocab_sizes.iter().copied().max().unwrap_or(0);
    if hidden == 0 || vocab_sizes.contains(&0) {
        return Err(BenchError::EmptyShape);
    }
    if vocab_sizes.is_empty() {
        return Ok(Vec::new());
    }
    let alloc_err = || BenchError::Allocation {
        rows: max,
        cols: hidden,
    };
    let len = max.checked_mul(hidden).ok_or_else(alloc_err)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut data: Vec<f32> = Vec::new();
    data.try_reserve_exact(len).map_err(|_| alloc_err())?;
    data.extend((0..len).map(|_| rng.gen_range(-1.0f32..1.0)));
    let weight = Matrix::from_vec(max, hidden, data);
    let x: Vec<f32> = (0..hidden).map(|_| rng.gen_range(-1.0f32..1.0)).collect();
    let mut out = vec![0.0f32; max];

    let mut points = Vec::with_capacity(vocab_sizes.len());
    for &v in vocab_sizes {
        weight.matvec_prefix_into(v, &x, &mut out);
        let mut times: Vec<f64> = (0..trials)
            .map(|_| {
                let start = Instant::now();
                weight.matvec_prefix_into(v, &x, &mut out);
                std::hint::black_box(&out);
                start.elapsed().as_secs_f64()
            })
            .collect();
        times.sort_by(f64::total_cmp);
        points.push(ScalingPoint {
            vocab_size: v,
            seconds: median_sorted(&times),
        });
    }
    Ok(points)
}

fn median_sorted(sorted: &[f64]) -> f64 {
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        (sorted[n / 2 - 1] + sorted[n / 2]) / 2.0
    }
}
