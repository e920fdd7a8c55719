use rand::distributions::{Distribution, Uniform};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{Matrix, ModelConfig, ModelError, Result};
use crate::subvocab::SubVocabulary;

/// LayerNorm gain and bias.
#[derive(Debug, Clone, PartialEq)]
pub struct Norm {
    pub gain: Vec<f32>,
    pub bias: Vec<f32>,
}

/// `y = W x + b`, with `W` stored as `out × in`.
#[derive(Debug, Clone, PartialEq)]
pub struct Linear {
    pub weight: Matrix,
    pub bias: Vec<f32>,
}

impl Linear {
    pub fn forward_into(&self, x: &[f32], out: &mut [f32]) {
        self.weight.matvec_into(x, out);
        for (o, b) in out.iter_mut().zip(&self.bias) {
            *o += b;
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Layer {
    pub attn_norm: Norm,
    /// Fused projection producing `[q; k; v]`, each of width `H`.
    pub qkv: Linear,
    pub attn_out: Linear,
    pub ffn_norm: Norm,
    pub ffn_up: Linear,
    pub ffn_down: Linear,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModelWeights {
    pub(crate) config: ModelConfig,
    pub(crate) embedding: Matrix,
    pub(crate) layers: Vec<Layer>,
    pub(crate) final_norm: Norm,
    /// `None` when tied to `embedding`.
    pub(crate) output: Option<Matrix>,
    /// Present on trimmed models: row `j` holds original token `kept[j]`.
    pub(crate) row_map: Option<SubVocabulary>,
}

impl ModelWeights {
    pub fn config(&self) -> &ModelConfig {
        &self.config
    }

    pub fn embedding(&self) -> &Matrix {
        &self.embedding
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    pub fn final_norm(&self) -> &Norm {
        &self.final_norm
    }

    /// The `|V| × H` output projection (the embedding when tied).
    pub fn output_layer(&self) -> &Matrix {
        self.output.as_ref().unwrap_or(&self.embedding)
    }

    /// The sub-vocabulary this model was trimmed to, if any.
    pub fn row_map(&self) -> Option<&SubVocabulary> {
        self.row_map.as_ref()
    }

    pub fn vocab_size(&self) -> usize {
        self.config.vocab_size
    }

    /// Calls `f(name, dims, data)` for every tensor in serialization order.
    pub fn for_each_tensor(&self, mut f: impl FnMut(&str, &[usize], &[f32])) {
        let h = self.config.hidden;
        f(
            "embedding",
            &[self.embedding.rows(), h],
            self.embedding.data(),
        );
        for (i, layer) in self.layers.iter().enumerate() {
            for (name, dims, data) in layer.tensors() {
                f(&format!("layers.{i}.{name}"), &dims, data);
            }
        }
        f("final_norm.gain", &[h], &self.final_norm.gain);
        f("final_norm.bias", &[h], &self.final_norm.bias);
        if let Some(out) = &self.output {
            f("output", &[out.rows(), h], out.data());
        }
    }

    /// Total scalar count over all stored tensors.
    pub fn stored_parameters(&self) -> usize {
        let mut n = 0;
        self.for_each_tensor(|_, _, data| n += data.len());
        n
    }

    /// Trims this model, consuming it so non-vocabulary tensors are moved
    /// rather than copied.
    pub fn into_trimmed(self, sub: &SubVocabulary) -> Result<ModelWeights> {
        check_trim(&self, sub)?;
        let embedding = self.embedding.gather_rows(sub.kept());
        let output = self.output.as_ref().map(|m| m.gather_rows(sub.kept()));
        Ok(ModelWeights {
            config: self.config.with_vocab_size(sub.len()),
            embedding,
            layers: self.layers,
            final_norm: self.final_norm,
            output,
            row_map: Some(sub.clone()),
        })
    }
}

impl Layer {
    pub(crate) fn tensors(&self) -> Vec<(&'static str, Vec<usize>, &[f32])> {
        let lin = |m: &Matrix| vec![m.rows(), m.cols()];
        let vec_dims = |v: &[f32]| vec![v.len()];
        vec![
            (
                "attn_norm.gain",
                vec_dims(&self.attn_norm.gain),
                &self.attn_norm.gain[..],
            ),
            (
                "attn_norm.bias",
                vec_dims(&self.attn_norm.bias),
                &self.attn_norm.bias[..],
            ),
            ("qkv.weight", lin(&self.qkv.weight), self.qkv.weight.data()),
            ("qkv.bias", vec_dims(&self.qkv.bias), &self.qkv.bias[..]),
            (
                "attn_out.weight",
                lin(&self.attn_out.weight),
                self.attn_out.weight.data(),
            ),
            (
                "attn_out.bias",
                vec_dims(&self.attn_out.bias),
                &self.attn_out.bias[..],
            ),
            (
                "ffn_norm.gain",
                vec_dims(&self.ffn_norm.gain),
                &self.ffn_norm.gain[..],
            ),
            (
                "ffn_norm.bias",
                vec_dims(&self.ffn_norm.bias),
                &self.ffn_norm.bias[..],
            ),
            (
                "ffn_up.weight",
                lin(&self.ffn_up.weight),
                self.ffn_up.weight.data(),
            ),
            (
                "ffn_up.bias",
                vec_dims(&self.ffn_up.bias),
                &self.ffn_up.bias[..],
            ),
            (
                "ffn_down.weight",
                lin(&self.ffn_down.weight),
                self.ffn_down.weight.data(),
            ),
            (
                "ffn_down.bias",
                vec_dims(&self.ffn_down.bias),
                &self.ffn_down.bias[..],
            ),
        ]
    }
}

fn check_trim(model: &ModelWeights, sub: &SubVocabulary) -> Result<()> {
    if model.row_map.is_some() {
        return Err(ModelError::AlreadyTrimmed);
    }
    if sub.vocab_size() != model.config.vocab_size {
        return Err(ModelError::VocabMismatch {
            model: model.config.vocab_size,
            sub: sub.vocab_size(),
        });
    }
    if sub.is_empty() {
        return Err(ModelError::EmptySubVocabulary);
    }
    Ok(())
}

/// Gathers the kept rows of the embedding (and untied output layer) into a
/// new model. Rows are copied bit-for-bit; every other tensor is unchanged.
pub fn trim_model(model: &ModelWeights, sub: &SubVocabulary) -> Result<ModelWeights> {
    check_trim(model, sub)?;
    model.clone().into_trimmed(sub)
}

/// Random weights from a seeded ChaCha8 stream.
///
/// Tensors are drawn in serialization order, one `f32` sample per element:
/// - embedding and untied output rows: uniform in `[-1, 1)`;
/// - linear weights: uniform in `[-s, s)` with `s = 2 sqrt(3 / fan_in)`
///   (gain 2, which keeps greedy outputs of a random model from collapsing
///   onto a single repeated token);
/// - linear biases and LayerNorm biases: uniform in `[-0.1, 0.1)`;
/// - LayerNorm gains: `1 +` uniform in `[-0.1, 0.1)`.
///
/// The same `(config, seed)` always yields bit-identical weights.
pub fn init_random(config: &ModelConfig, seed: u64) -> Result<ModelWeights> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let h = config.hidden;

    let matrix = |rng: &mut ChaCha8Rng, rows: usize, cols: usize, scale: f32| {
        let dist = Uniform::new(-scale, scale);
        Matrix::from_vec(
            rows,
            cols,
            (0..rows * cols).map(|_| dist.sample(rng)).collect(),
        )
    };
    let small = Uniform::new(-0.1f32, 0.1);
    let bias = |rng: &mut ChaCha8Rng, n: usize| -> Vec<f32> {
        (0..n).map(|_| small.sample(rng)).collect()
    };
    let norm = |rng: &mut ChaCha8Rng| Norm {
        gain: (0..h).map(|_| 1.0 + small.sample(rng)).collect(),
        bias: (0..h).map(|_| small.sample(rng)).collect(),
    };
    let gain_scale = |fan_in: usize| 2.0 * (3.0 / fan_in as f32).sqrt();

    let embedding = matrix(&mut rng, config.vocab_size, h, 1.0);
    let mut layers = Vec::with_capacity(config.layers);
    for _ in 0..config.layers {
        let attn_norm = norm(&mut rng);
        let qkv = Linear {
            weight: matrix(&mut rng, 3 * h, h, gain_scale(h)),
            bias: bias(&mut rng, 3 * h),
        };
        let attn_out = Linear {
            weight: matrix(&mut rng, h, h, gain_scale(h)),
            bias: bias(&mut rng, h),
        };
        let ffn_norm = norm(&mut rng);
        let ffn_up = Linear {
            weight: matrix(&mut rng, 4 * h, h, gain_scale(h)),
            bias: bias(&mut rng, 4 * h),
        };
        let ffn_down = Linear {
            weight: matrix(&mut rng, h, 4 * h, gain_scale(4 * h)),
            bias: bias(&mut rng, h),
        };
        layers.push(Layer {
            attn_norm,
            qkv,
            attn_out,
            ffn_norm,
            ffn_up,
            ffn_down,
        });
    }
    let final_norm = norm(&mut rng);
    let output = (!config.tied_embeddings).then(|| matrix(&mut rng, config.vocab_size, h, 1.0));

    Ok(ModelWeights {
        config: *config,
        embedding,
        layers,
        final_norm,
        output,
        row_map: None,
    })
}
