use super::{ModelError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ModelConfig {
    pub vocab_size: usize,
    pub hidden: usize,
    pub layers: usize,
    pub heads: usize,
    pub max_context: usize,
    pub tied_embeddings: bool,
}

impl ModelConfig {
    /// Checks divisibility and that every tensor size fits in memory
    /// arithmetic and in the file format's `u32` dimensions. `layers = 0` is
    /// allowed (embedding and output only).
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("vocab_size", self.vocab_size),
            ("hidden", self.hidden),
            ("heads", self.heads),
            ("max_context", self.max_context),
        ] {
            if v == 0 {
                return Err(ModelError::InvalidConfig(format!(
                    "{name} must be at least 1"
                )));
            }
        }
        if !self.hidden.is_multiple_of(self.heads) {
            return Err(ModelError::InvalidConfig(format!(
                "hidden {} is not divisible by heads {}",
                self.hidden, self.heads
            )));
        }
        let dims = [
            self.vocab_size,
            self.hidden,
            self.layers,
            self.heads,
            self.max_context,
        ];
        if dims.iter().any(|&d| u32::try_from(d).is_err()) {
            return Err(ModelError::DimensionOverflow);
        }
        self.vocab_size
            .checked_mul(self.hidden)
            .and_then(|_| self.hidden.checked_mul(4 * self.hidden))
            .and_then(|_| self.checked_parameter_count())
            .ok_or(ModelError::DimensionOverflow)?;
        Ok(())
    }

    pub fn head_dim(&self) -> usize {
        self.hidden / self.heads
    }

    /// Parameters in one transformer block: two LayerNorms, the fused QKV
    /// projection, the attention output projection and the two MLP
    /// projections, all with biases. Independent of the head count.
    pub fn per_layer_parameters(&self) -> usize {
        let h = self.hidden;
        let norms = 2 * (2 * h);
        let qkv = 3 * h * h + 3 * h;
        let attn_out = h * h + h;
        let up = 4 * h * h + 4 * h;
        let down = 4 * h * h + h;
        norms + qkv + attn_out + up + down
    }

    /// Embedding plus (if untied) output-layer parameters.
    pub fn vocab_parameters(&self) -> usize {
        let one = self.vocab_size * self.hidden;
        if self.tied_embeddings {
            one
        } else {
            2 * one
        }
    }

    pub fn final_norm_parameters(&self) -> usize {
        2 * self.hidden
    }

    pub fn parameter_count(&self) -> usize {
        self.checked_parameter_count()
            .expect("validated config does not overflow")
    }

    fn checked_parameter_count(&self) -> Option<usize> {
        let h = self.hidden;
        let per_layer = h
            .checked_mul(h)?
            .checked_mul(12)?
            .checked_add(h.checked_mul(13)?)?;
        let vocab = self
            .vocab_size
            .checked_mul(h)?
            .checked_mul(if self.tied_embeddings { 1 } else { 2 })?;
        vocab
            .checked_add(self.layers.checked_mul(per_layer)?)?
            .checked_add(2 * h)
    }

    /// Copy of this config with a different vocabulary size.
    pub fn with_vocab_size(&self, vocab_size: usize) -> Self {
        Self {
            vocab_size,
            ..*self
        }
    }
}
