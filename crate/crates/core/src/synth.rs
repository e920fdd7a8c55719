//! Deterministic synthetic byte-level vocabularies.
//!
//! Layout of a generated vocabulary: the special tokens first, then the 256
//! byte symbols in byte order, then merged tokens. Merges build each
//! multi-byte character from its bytes, then each word from its characters
//! left to right. Merges are sorted by the length of the token they produce,
//! so every merge's inputs exist before it fires.

use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bpe::{BpeError, ByteUnicodeTable, Merges, Vocabulary};

/// Builds a vocabulary covering `words` (each also with a leading space).
///
/// With `max_size`, merges are cut so the vocabulary holds at most that many
/// tokens (never fewer than the specials plus the byte symbols).
pub fn build_vocabulary(
    specials: &[&str],
    words: &[&str],
    max_size: Option<usize>,
) -> Result<(Vocabulary, Merges), BpeError> {
    let table = ByteUnicodeTable::get();
    let mut surfaces: Vec<String> = specials.iter().map(|s| s.to_string()).collect();
    surfaces.extend((0..=255u8).map(|b| table.byte_to_char(b).to_string()));

    let mut seen: HashSet<String> = surfaces.iter().cloned().collect();
    // (left, right, result) with result lengths counted in symbols.
    let mut merges: Vec<(String, String, String)> = Vec::new();
    let mut push = |left: String, right: String, seen: &mut HashSet<String>| {
        let result = format!("{left}{right}");
        if seen.insert(result.clone()) {
            merges.push((left, right, result));
        }
    };

    let mut spaced: Vec<String> = Vec::with_capacity(words.len() * 2);
    for w in words {
        if w.is_empty() {
            continue;
        }
        spaced.push(w.to_string());
        spaced.push(format!(" {w}"));
    }

    for word in &spaced {
        for c in word.chars() {
            let mut buf = [0u8; 4];
            let symbols: Vec<String> = c
                .encode_utf8(&mut buf)
                .bytes()
                .map(|b| table.byte_to_char(b).to_string())
                .collect();
            let mut acc = symbols[0].clone();
            for s in &symbols[1..] {
                push(acc.clone(), s.clone(), &mut seen);
                acc.push_str(s);
            }
        }
        let chars: Vec<String> = word
            .chars()
            .map(|c| table.encode_bytes(c.encode_utf8(&mut [0u8; 4]).as_bytes()))
            .collect();
        let mut acc = chars[0].clone();
        for c in &chars[1..] {
            push(acc.clone(), c.clone(), &mut seen);
            acc.push_str(c);
        }
    }

    merges.sort_by_key(|(_, _, result)| result.chars().count());
    if let Some(max) = max_size {
        merges.truncate(max.saturating_sub(surfaces.len()));
    }
    let mut pairs = Vec::with_capacity(merges.len());
    for (left, right, result) in merges {
        surfaces.push(result);
        pairs.push((left, right));
    }
    let vocab = Vocabulary::from_surfaces(surfaces)?;
    let merges = Merges::new(pairs, &vocab)?;
    Ok((vocab, merges))
}

/// `count` distinct pseudo-words of 2 to 7 characters drawn from `alphabet`.
///
/// Panics if `alphabet` is empty.
pub fn random_words(alphabet: &[char], count: usize, seed: u64) -> Vec<String> {
    assert!(!alphabet.is_empty(), "alphabet must not be empty");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut seen = HashSet::new();
    let mut out = Vec::with_capacity(count);
    let mut attempts = 0usize;
    while out.len() < count && attempts < count * 100 + 1000 {
        attempts += 1;
        let len = rng.gen_range(2..=7);
        let w: String = (0..len)
            .map(|_| *alphabet.choose(&mut rng).expect("non-empty"))
            .collect();
        if seen.insert(w.clone()) {
            out.push(w);
        }
    }
    out
}

/// Space-joined sentences of 3 to 12 words sampled from `words`.
pub fn random_sentences(words: &[String], count: usize, seed: u64) -> Vec<String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let len = rng.gen_range(3..=12);
            (0..len)
                .filter_map(|_| words.choose(&mut rng).map(String::as_str))
                .collect::<Vec<_>>()
                .join(" ")
        })
        .collect()
}

/// Characters of each bundled language's synthetic alphabet.
pub fn alphabet(lang: &str) -> Option<Vec<char>> {
    let chars: Vec<char> = match lang {
        "en" => ('a'..='z').collect(),
        "es" => ('a'..='z').chain("áéíóúñü".chars()).collect(),
        "bg" => ('а'..='я')
            .filter(|&c| c != 'ё' && c != 'ы' && c != 'э')
            .collect(),
        "zh" => "的一是不了人我在有他这中大来上国个到说们为子和你地出道也时年"
            .chars()
            .collect(),
        _ => return None,
    };
    Some(chars)
}
