use std::collections::HashMap;

use super::{check_corpus, Result};

pub const MAX_ORDER: usize = 4;

/// Sufficient statistics for corpus BLEU, summed over segments.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct BleuStats {
    pub hyp_len: usize,
    pub ref_len: usize,
    pub correct: [usize; MAX_ORDER],
    pub total: [usize; MAX_ORDER],
}

impl BleuStats {
    pub fn add_segment(&mut self, hyp: &[&str], reference: &[&str]) {
        self.hyp_len += hyp.len();
        self.ref_len += reference.len();
        for n in 1..=MAX_ORDER {
            let h = ngram_counts(hyp, n);
            let r = ngram_counts(reference, n);
            self.total[n - 1] += hyp.len().saturating_sub(n - 1);
            self.correct[n - 1] += h
                .iter()
                .map(|(g, &c)| c.min(r.get(g).copied().unwrap_or(0)))
                .sum::<usize>();
        }
    }

    pub fn merge(&mut self, other: &BleuStats) {
        self.hyp_len += other.hyp_len;
        self.ref_len += other.ref_len;
        for n in 0..MAX_ORDER {
            self.correct[n] += other.correct[n];
            self.total[n] += other.total[n];
        }
    }

    /// BLEU in `[0, 100]`.
    ///
    /// Orders with no hypothesis n-grams are dropped from the geometric mean.
    /// A zero match count at order `n` is replaced by `1 / (2^k · total)`
    /// where `k` counts the zero orders seen so far. No matches at any order
    /// gives 0; an empty hypothesis and reference corpus gives 100.
    pub fn score(&self) -> f64 {
        if self.hyp_len == 0 && self.ref_len == 0 {
            return 100.0;
        }
        if self.correct.iter().all(|&c| c == 0) {
            return 0.0;
        }
        let mut log_sum = 0.0f64;
        let mut order = 0usize;
        let mut smooth = 1.0f64;
        for n in 0..MAX_ORDER {
            if self.total[n] == 0 {
                break;
            }
            order = n + 1;
            let p = if self.correct[n] == 0 {
                smooth *= 2.0;
                1.0 / (smooth * self.total[n] as f64)
            } else {
                self.correct[n] as f64 / self.total[n] as f64
            };
            log_sum += p.ln();
        }
        let bp = if self.hyp_len < self.ref_len {
            (1.0 - self.ref_len as f64 / self.hyp_len as f64).exp()
        } else {
            1.0
        };
        (100.0 * bp * (log_sum / order as f64).exp()).clamp(0.0, 100.0)
    }
}

fn ngram_counts<'t, 'a>(tokens: &'t [&'a str], n: usize) -> HashMap<&'t [&'a str], usize> {
    let mut counts = HashMap::new();
    if tokens.len() >= n {
        for g in tokens.windows(n) {
            *counts.entry(g).or_insert(0) += 1;
        }
    }
    counts
}

/// Word tokens for BLEU: whitespace split, and for `zh` every CJK character
/// becomes its own token.
pub fn tokenize<'a>(text: &'a str, lang: &str) -> Vec<&'a str> {
    if lang != "zh" {
        return text.split_whitespace().collect();
    }
    let mut out = Vec::new();
    for word in text.split_whitespace() {
        let mut start = 0;
        for (i, c) in word.char_indices() {
            if is_cjk(c) {
                if start < i {
                    out.push(&word[start..i]);
                }
                let end = i + c.len_utf8();
                out.push(&word[i..end]);
                start = end;
            }
        }
        if start < word.len() {
            out.push(&word[start..]);
        }
    }
    out
}

fn is_cjk(c: char) -> bool {
    matches!(c as u32,
        0x3000..=0x303F
        | 0x3400..=0x4DBF
        | 0x4E00..=0x9FFF
        | 0xF900..=0xFAFF
        | 0xFF00..=0xFFEF
        | 0x20000..=0x2FA1F)
}

/// Corpus BLEU of `hypotheses` against `references`.
pub fn o_bleu<H, R>(hypotheses: &[H], references: &[R], lang: &str) -> Result<f64>
where
    H: AsRef<str>,
    R: AsRef<str>,
{
    check_corpus(hypotheses.len(), references.len())?;
    let mut stats = BleuStats::default();
    for (h, r) in hypotheses.iter().zip(references) {
        stats.add_segment(&tokenize(h.as_ref(), lang), &tokenize(r.as_ref(), lang));
    }
    Ok(stats.score())
}
