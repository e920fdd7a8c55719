use std::time::{Duration, Instant};

use super::tensor::dot;
use super::{ModelError, ModelWeights, Norm, Result};
use crate::subvocab::SubVocabulary;

const LAYER_NORM_EPS: f32 = 1e-5;

/// Incremental forward pass with a private key/value cache.
///
/// Token ids are in the model's own id space (new ids for a trimmed model).
pub struct DecodeSession<'m> {
    model: &'m ModelWeights,
    keys: Vec<Vec<f32>>,
    values: Vec<Vec<f32>>,
    hidden: Vec<f32>,
    len: usize,
}

impl<'m> DecodeSession<'m> {
    pub fn new(model: &'m ModelWeights) -> Self {
        let layers = model.config.layers;
        Self {
            model,
            keys: vec![Vec::new(); layers],
            values: vec![Vec::new(); layers],
            hidden: Vec::new(),
            len: 0,
        }
    }

    /// Number of tokens consumed so far.
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Runs one token through every block at the next position.
    pub fn push(&mut self, token: u32) -> Result<()> {
        let cfg = &self.model.config;
        if token as usize >= cfg.vocab_size {
            return Err(ModelError::IdOutOfRange {
                id: token,
                size: cfg.vocab_size,
            });
        }
        if self.len >= cfg.max_context {
            return Err(ModelError::ContextTooLong {
                len: self.len + 1,
                max: cfg.max_context,
            });
        }
        let h = cfg.hidden;
        let heads = cfg.heads;
        let head_dim = cfg.head_dim();
        let pos = self.len;

        let mut x: Vec<f32> = self.model.embedding.row(token as usize).to_vec();
        add_positions(&mut x, pos);

        let mut normed = vec![0.0f32; h];
        let mut qkv = vec![0.0f32; 3 * h];
        let mut attended = vec![0.0f32; h];
        let mut proj = vec![0.0f32; h];
        let mut inner = vec![0.0f32; 4 * h];
        let mut scores = vec![0.0f32; pos + 1];
        let scale = 1.0 / (head_dim as f32).sqrt();

        for (l, layer) in self.model.layers.iter().enumerate() {
            layer_norm(&x, &layer.attn_norm, &mut normed);
            layer.qkv.forward_into(&normed, &mut qkv);
            let (q, kv) = qkv.split_at(h);
            let (k, v) = kv.split_at(h);
            self.keys[l].extend_from_slice(k);
            self.values[l].extend_from_slice(v);
            let keys = &self.keys[l];
            let values = &self.values[l];

            for head in 0..heads {
                let span = head * head_dim..(head + 1) * head_dim;
                let qh = &q[span.clone()];
                for (t, s) in scores.iter_mut().enumerate() {
                    *s = dot(qh, &keys[t * h + span.start..t * h + span.end]) * scale;
                }
                softmax_in_place(&mut scores);
                let out = &mut attended[span.clone()];
                out.fill(0.0);
                for (t, &p) in scores.iter().enumerate() {
                    let vt = &values[t * h + span.start..t * h + span.end];
                    for (o, &vv) in out.iter_mut().zip(vt) {
                        *o += p * vv;
                    }
                }
            }
            layer.attn_out.forward_into(&attended, &mut proj);
            add_assign(&mut x, &proj);

            layer_norm(&x, &layer.ffn_norm, &mut normed);
            layer.ffn_up.forward_into(&normed, &mut inner);
            inner.iter_mut().for_each(|v| *v = gelu(*v));
            layer.ffn_down.forward_into(&inner, &mut proj);
            add_assign(&mut x, &proj);
        }

        self.hidden.resize(h, 0.0);
        layer_norm(&x, &self.model.final_norm, &mut self.hidden);
        self.len += 1;
        Ok(())
    }

    /// Next-token logits after the last pushed token.
    pub fn logits_into(&self, out: &mut [f32]) -> Result<()> {
        if self.len == 0 {
            return Err(ModelError::EmptyContext);
        }
        self.model.output_layer().matvec_into(&self.hidden, out);
        Ok(())
    }

    pub fn logits(&self) -> Result<Vec<f32>> {
        let mut out = vec![0.0; self.model.config.vocab_size];
        self.logits_into(&mut out)?;
        Ok(out)
    }
}

/// Sinusoidal position code: dimension `2i` gets `sin(pos / 10000^(2i/H))`,
/// dimension `2i+1` the matching cosine. Computed in `f64`, rounded to `f32`.
fn add_positions(x: &mut [f32], pos: usize) {
    let h = x.len() as f64;
    for (d, v) in x.iter_mut().enumerate() {
        let pair = (d / 2 * 2) as f64;
        let angle = pos as f64 / 10000f64.powf(pair / h);
        let code = if d % 2 == 0 { angle.sin() } else { angle.cos() };
        *v += code as f32;
    }
}

fn layer_norm(x: &[f32], norm: &Norm, out: &mut [f32]) {
    let n = x.len() as f32;
    let mut sum = 0.0f32;
    for &v in x {
        sum += v;
    }
    let mean = sum / n;
    let mut var = 0.0f32;
    for &v in x {
        let d = v - mean;
        var += d * d;
    }
    let inv = 1.0 / (var / n + LAYER_NORM_EPS).sqrt();
    for (((o, &v), &g), &b) in out.iter_mut().zip(x).zip(&norm.gain).zip(&norm.bias) {
        *o = (v - mean) * inv * g + b;
    }
}

fn softmax_in_place(v: &mut [f32]) {
    let max = v.iter().copied().fold(f32::NEG_INFINITY, f32::max);
    let mut sum = 0.0f32;
    for x in v.iter_mut() {
        *x = (*x - max).exp();
        sum += *x;
    }
    for x in v.iter_mut() {
        *x /= sum;
    }
}

// tanh approximation
fn gelu(x: f32) -> f32 {
    const C: f32 = 0.797_884_6; // sqrt(2/pi)
    0.5 * x * (1.0 + (C * (x + 0.044_715 * x * x * x)).tanh())
}

fn add_assign(x: &mut [f32], y: &[f32]) {
    for (a, &b) in x.iter_mut().zip(y) {
        *a += b;
    }
}

/// Logits for the token following `context` (ids in the model's id space).
pub fn forward_logits(model: &ModelWeights, context: &[u32]) -> Result<Vec<f32>> {
    if context.is_empty() {
        return Err(ModelError::EmptyContext);
    }
    let max = model.config.max_context;
    if context.len() > max {
        return Err(ModelError::ContextTooLong {
            len: context.len(),
            max,
        });
    }
    let mut session = DecodeSession::new(model);
    for &t in context {
        session.push(t)?;
    }
    session.logits()
}

/// Index of the largest value; ties go to the lowest index.
pub(crate) fn argmax(values: &[f32]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v > values[best] {
            best = i;
        }
    }
    best
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecodeResult {
    /// Prompt followed by generated tokens, in original-id space.
    pub ids: Vec<u32>,
    pub prompt_len: usize,
    /// Wall time of each generation step (the first includes the prompt
    /// prefill).
    pub step_times: Vec<Duration>,
}

impl DecodeResult {
    pub fn generated(&self) -> &[u32] {
        &self.ids[self.prompt_len..]
    }

    pub fn steps(&self) -> usize {
        self.step_times.len()
    }
}

/// Beam-1 decoding: append the argmax token until `eos` is produced or
/// `max_new` tokens have been generated.
///
/// `prompt` and `eos` are original ids. On a trimmed model they are mapped
/// into the trimmed id space, decoding runs there, and the output is mapped
/// back. A prompt token outside the sub-vocabulary is an error; an `eos`
/// outside it simply never fires.
pub fn greedy_decode(
    model: &ModelWeights,
    prompt: &[u32],
    max_new: usize,
    eos: Option<u32>,
) -> Result<DecodeResult> {
    let (context, eos) = match model.row_map() {
        None => (prompt.to_vec(), eos),
        Some(sub) => {
            let context = prompt
                .iter()
                .map(|&id| sub.to_new(id).ok_or(ModelError::NotInSubVocabulary(id)))
                .collect::<Result<Vec<u32>>>()?;
            (context, eos.and_then(|e| sub.to_new(e)))
        }
    };

    let mut ids = prompt.to_vec();
    let mut step_times = Vec::with_capacity(max_new);
    if max_new == 0 {
        return Ok(DecodeResult {
            ids,
            prompt_len: prompt.len(),
            step_times,
        });
    }
    if context.is_empty() {
        return Err(ModelError::EmptyContext);
    }

    let mut session = DecodeSession::new(model);
    let mut logits = vec![0.0f32; model.config.vocab_size];
    let mut last = 0u32;
    for step in 0..max_new {
        let start = Instant::now();
        if step == 0 {
            for &t in &context {
                session.push(t)?;
            }
        } else {
            session.push(last)?;
        }
        session.logits_into(&mut logits)?;
        last = argmax(&logits) as u32;
        step_times.push(start.elapsed());
        ids.push(match model.row_map() {
            Some(sub) => sub.to_old(last).expect("argmax is a valid new id"),
            None => last,
        });
        if Some(last) == eos {
            break;
        }
    }
    Ok(DecodeResult {
        ids,
        prompt_len: prompt.len(),
        step_times,
    })
}

/// Maps new ids back to original ids.
pub fn remap_output(ids: &[u32], sub: &SubVocabulary) -> Result<Vec<u32>> {
    ids.iter()
        .map(|&id| {
            sub.to_old(id).ok_or(ModelError::IdOutOfRange {
                id,
                size: sub.len(),
            })
        })
        .collect()
}
