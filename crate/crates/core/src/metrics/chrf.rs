use std::collections::HashMap;

use super::{check_corpus, Result};

pub const CHAR_ORDER: usize = 6;
pub const BETA: f64 = 2.0;

const EPS: f64 = 1e-16;

/// Per-order character n-gram counts summed over segments:
/// hypothesis n-grams, reference n-grams, matches.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ChrfStats {
    pub hyp: [usize; CHAR_ORDER],
    pub reference: [usize; CHAR_ORDER],
    pub matched: [usize; CHAR_ORDER],
}

impl ChrfStats {
    pub fn add_segment(&mut self, hyp: &str, reference: &str) {
        let h: Vec<char> = hyp.chars().filter(|c| !c.is_whitespace()).collect();
        let r: Vec<char> = reference.chars().filter(|c| !c.is_whitespace()).collect();
        for n in 1..=CHAR_ORDER {
            let hc = char_ngrams(&h, n);
            let rc = char_ngrams(&r, n);
            self.hyp[n - 1] += h.len().saturating_sub(n - 1);
            self.reference[n - 1] += r.len().saturating_sub(n - 1);
            self.matched[n - 1] += hc
                .iter()
                .map(|(g, &c)| c.min(rc.get(g).copied().unwrap_or(0)))
                .sum::<usize>();
        }
    }

    /// chrF in `[0, 100]`: precision and recall are averaged over the orders
    /// where both sides have n-grams, then combined into F-beta. Two empty
    /// corpora score 100.
    pub fn score(&self) -> f64 {
        if self.hyp[0] == 0 && self.reference[0] == 0 {
            return 100.0;
        }
        let mut precision = 0.0;
        let mut recall = 0.0;
        let mut order = 0;
        for n in 0..CHAR_ORDER {
            if self.hyp[n] > 0 && self.reference[n] > 0 {
                precision += self.matched[n] as f64 / self.hyp[n] as f64;
                recall += self.matched[n] as f64 / self.reference[n] as f64;
                order += 1;
            }
        }
        if order == 0 {
            return 0.0;
        }
        precision /= order as f64;
        recall /= order as f64;
        let b2 = BETA * BETA;
        let denom = b2 * precision + recall;
        if denom < EPS {
            return 0.0;
        }
        (100.0 * (1.0 + b2) * precision * recall / denom).clamp(0.0, 100.0)
    }
}

fn char_ngrams(chars: &[char], n: usize) -> HashMap<&[char], usize> {
    let mut counts = HashMap::new();
    if chars.len() >= n {
        for g in chars.windows(n) {
            *counts.entry(g).or_insert(0) += 1;
        }
    }
    counts
}

/// Corpus chrF of `hypotheses` against `references`.
pub fn o_chrf<H, R>(hypotheses: &[H], references: &[R]) -> Result<f64>
where
    H: AsRef<str>,
    R: AsRef<str>,
{
    check_corpus(hypotheses.len(), references.len())?;
    let mut stats = ChrfStats::default();
    for (h, r) in hypotheses.iter().zip(references) {
        stats.add_segment(h.as_ref(), r.as_ref());
    }
    Ok(stats.score())
}
