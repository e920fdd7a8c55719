//! Generators and independent reference implementations shared by the
//! integration tests. Nothing here calls into the code under test except to
//! build its input types.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, HashMap};

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use vocab_trim::{Merges, Vocabulary};

pub use rand::SeedableRng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// The GPT-2 byte-to-symbol table, built from its published definition.
pub fn byte_symbols() -> [char; 256] {
    let mut printable: Vec<u32> = (0x21..=0x7E)
        .chain(0xA1..=0xAC)
        .chain(0xAE..=0xFF)
        .collect();
    let mut symbols: Vec<u32> = printable.clone();
    let mut next = 0u32;
    for b in 0..256u32 {
        if !printable.contains(&b) {
            printable.push(b);
            symbols.push(256 + next);
            next += 1;
        }
    }
    let mut out = ['\0'; 256];
    for (b, s) in printable.iter().zip(&symbols) {
        out[*b as usize] = char::from_u32(*s).unwrap();
    }
    out
}

pub fn symbols_to_bytes(surface: &str) -> Option<Vec<u8>> {
    let table = byte_symbols();
    surface
        .chars()
        .map(|c| table.iter().position(|&t| t == c).map(|b| b as u8))
        .collect()
}

pub fn bytes_to_symbols(bytes: &[u8]) -> String {
    let table = byte_symbols();
    bytes.iter().map(|&b| table[b as usize]).collect()
}

/// Encoder that replays merges in rank order, each over the whole sequence.
/// For merge lists where every merge's inputs are produced by earlier merges
/// (as in trained BPE) this equals lowest-rank-first greedy merging.
pub fn replay_encode(text: &str, vocab: &Vocabulary, merges: &[(String, String)]) -> Vec<u32> {
    let mut seq: Vec<String> = bytes_to_symbols(text.as_bytes())
        .chars()
        .map(String::from)
        .collect();
    for (left, right) in merges {
        let mut out = Vec::with_capacity(seq.len());
        let mut i = 0;
        while i < seq.len() {
            if i + 1 < seq.len() && &seq[i] == left && &seq[i + 1] == right {
                out.push(format!("{left}{right}"));
                i += 2;
            } else {
                out.push(seq[i].clone());
                i += 1;
            }
        }
        seq = out;
    }
    seq.iter()
        .map(|s| vocab.id(s).expect("symbol in vocabulary"))
        .collect()
}

/// Random well-formed BPE tokenizer over a small alphabet: 256 byte symbols
/// followed by `n_merges` merges of previously existing tokens.
pub struct TinyBpe {
    pub vocab: Vocabulary,
    pub merges: Merges,
    pub pairs: Vec<(String, String)>,
    pub alphabet: Vec<char>,
}

pub fn tiny_bpe(rng: &mut ChaCha8Rng, n_merges: usize) -> TinyBpe {
    let pool = ['a', 'b', 'c', 'd', ' ', 'ж', 'ф', '中', 'é'];
    let k = rng.gen_range(3..=pool.len());
    let alphabet: Vec<char> = pool.choose_multiple(rng, k).copied().collect();

    let mut surfaces: Vec<String> = byte_symbols().iter().map(|c| c.to_string()).collect();
    let mut known: Vec<String> = Vec::new();
    for c in &alphabet {
        let mut buf = [0u8; 4];
        let bytes = c.encode_utf8(&mut buf).as_bytes().to_vec();
        for b in bytes {
            let s = bytes_to_symbols(&[b]);
            if !known.contains(&s) {
                known.push(s);
            }
        }
    }
    let mut pairs = Vec::new();
    let mut seen: BTreeSet<String> = surfaces.iter().cloned().collect();
    let mut attempts = 0;
    while pairs.len() < n_merges && attempts < n_merges * 50 {
        attempts += 1;
        let l = known.choose(rng).unwrap().clone();
        let r = known.choose(rng).unwrap().clone();
        let joined = format!("{l}{r}");
        // A second merge producing an existing token would break the
        // rank-order replay equivalence.
        if !seen.insert(joined.clone()) {
            continue;
        }
        surfaces.push(joined.clone());
        known.push(joined);
        pairs.push((l, r));
    }
    let vocab = Vocabulary::from_surfaces(surfaces).unwrap();
    let merges = Merges::new(pairs.clone(), &vocab).unwrap();
    TinyBpe {
        vocab,
        merges,
        pairs,
        alphabet,
    }
}

pub fn random_line(rng: &mut ChaCha8Rng, alphabet: &[char], max_len: usize) -> String {
    let len = rng.gen_range(0..=max_len);
    (0..len).map(|_| *alphabet.choose(rng).unwrap()).collect()
}

/// Random string mixing ASCII, Latin-1, Cyrillic, CJK, emoji, combining
/// marks, whitespace and arbitrary scalar values.
pub fn random_multilingual(rng: &mut ChaCha8Rng, max_chars: usize) -> String {
    let len = rng.gen_range(0..=max_chars);
    (0..len)
        .map(|_| {
            let cp = match rng.gen_range(0..9) {
                0 => rng.gen_range(0x20..0x7F),
                1 => rng.gen_range(0xA0..0x180),
                2 => rng.gen_range(0x400..0x500),
                3 => rng.gen_range(0x4E00..0xA000),
                4 => rng.gen_range(0x1F300..0x1FAFF),
                5 => rng.gen_range(0x300..0x370),
                6 => *[0x20u32, 0x0A, 0x09, 0x3000, 0xA0, 0x2028]
                    .choose(rng)
                    .unwrap(),
                7 => rng.gen_range(0..0x20),
                _ => rng.gen_range(0..=0x10FFFF),
            };
            char::from_u32(cp).unwrap_or('\u{FFFD}')
        })
        .collect()
}

fn word_ngrams(tokens: &[String], n: usize) -> BTreeMap<Vec<String>, usize> {
    let mut out = BTreeMap::new();
    if tokens.len() >= n {
        for i in 0..=tokens.len() - n {
            *out.entry(tokens[i..i + n].to_vec()).or_insert(0) += 1;
        }
    }
    out
}

/// Corpus BLEU written directly from its definition: clipped n-gram counts,
/// geometric mean of precisions over the orders that have hypothesis
/// n-grams, zero counts replaced by 1/(2^k total), brevity penalty.
pub fn reference_bleu(hyps: &[&str], refs: &[&str]) -> f64 {
    let mut matches = [0usize; 4];
    let mut totals = [0usize; 4];
    let (mut c, mut r) = (0usize, 0usize);
    for (h, rf) in hyps.iter().zip(refs) {
        let ht: Vec<String> = h.split_whitespace().map(String::from).collect();
        let rt: Vec<String> = rf.split_whitespace().map(String::from).collect();
        c += ht.len();
        r += rt.len();
        for n in 1..=4 {
            let hc = word_ngrams(&ht, n);
            let rc = word_ngrams(&rt, n);
            for (g, k) in hc {
                totals[n - 1] += k;
                matches[n - 1] += k.min(*rc.get(&g).unwrap_or(&0));
            }
        }
    }
    if matches.iter().sum::<usize>() == 0 {
        return 0.0;
    }
    let mut logs = Vec::new();
    let mut k = 0;
    for n in 0..4 {
        if totals[n] == 0 {
            break;
        }
        let p = if matches[n] == 0 {
            k += 1;
            1.0 / (2f64.powi(k) * totals[n] as f64)
        } else {
            matches[n] as f64 / totals[n] as f64
        };
        logs.push(p.ln());
    }
    let bp = if c < r {
        (1.0 - r as f64 / c as f64).exp()
    } else {
        1.0
    };
    100.0 * bp * (logs.iter().sum::<f64>() / logs.len() as f64).exp()
}

fn char_ngrams(chars: &[char], n: usize) -> HashMap<String, usize> {
    let mut out = HashMap::new();
    if chars.len() >= n {
        for i in 0..=chars.len() - n {
            *out.entry(chars[i..i + n].iter().collect::<String>())
                .or_insert(0) += 1;
        }
    }
    out
}

/// chrF (n = 1..6, beta = 2) from its definition, whitespace removed,
/// statistics summed over the corpus.
pub fn reference_chrf(hyps: &[&str], refs: &[&str]) -> f64 {
    let mut stats = [[0usize; 3]; 6];
    for (h, rf) in hyps.iter().zip(refs) {
        let hc: Vec<char> = h.chars().filter(|c| !c.is_whitespace()).collect();
        let rc: Vec<char> = rf.chars().filter(|c| !c.is_whitespace()).collect();
        for n in 1..=6 {
            let hg = char_ngrams(&hc, n);
            let rg = char_ngrams(&rc, n);
            stats[n - 1][0] += hg.values().sum::<usize>();
            stats[n - 1][1] += rg.values().sum::<usize>();
            stats[n - 1][2] += hg
                .iter()
                .map(|(g, k)| (*k).min(*rg.get(g).unwrap_or(&0)))
                .sum::<usize>();
        }
    }
    let (mut p, mut r, mut orders) = (0.0, 0.0, 0);
    for [hyp, rf, m] in stats {
        if hyp > 0 && rf > 0 {
            p += m as f64 / hyp as f64;
            r += m as f64 / rf as f64;
            orders += 1;
        }
    }
    if orders == 0 {
        return 0.0;
    }
    p /= orders as f64;
    r /= orders as f64;
    if p + r == 0.0 {
        return 0.0;
    }
    100.0 * 5.0 * p * r / (4.0 * p + r)
}
