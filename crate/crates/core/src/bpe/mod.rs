//! Byte-level BPE tokenization.
//!
//! Text is converted to bytes, each byte is replaced by its printable symbol
//! from [`ByteUnicodeTable`], and merges are applied greedily by ascending rank
//! over the whole byte stream. There is no pre-tokenizer: a merge may cross
//! what a regex splitter would treat as a word boundary.

mod byte_table;
mod vocab;

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

pub use byte_table::ByteUnicodeTable;
pub use vocab::{Merges, Vocabulary};

#[derive(Debug, thiserror::Error)]
pub enum BpeError {
    #[error("failed to read {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("malformed vocabulary file: {0}")]
    Json(#[from] serde_json::Error),
    #[error("token id {0} is assigned more than once")]
    DuplicateId(u32),
    #[error("token {0:?} appears more than once")]
    DuplicateSurface(String),
    #[error("vocabulary ids are not dense: id {missing} is missing from 0..{size}")]
    NonDenseIds { missing: usize, size: usize },
    #[error("merges line {line}: expected \"LEFT RIGHT\", got {text:?}")]
    MalformedMerge { line: usize, text: String },
    #[error("merge ({left:?}, {right:?}) is listed more than once")]
    DuplicateMerge { left: String, right: String },
    #[error("merge ({left:?}, {right:?}) produces a token that is not in the vocabulary")]
    MergeNotInVocab { left: String, right: String },
    #[error("symbol {0:?} is not in the vocabulary (vocabulary and merges do not match)")]
    UnknownSymbol(String),
    #[error("token id {id} is out of range for a vocabulary of size {size}")]
    IdOutOfRange { id: u32, size: usize },
    #[error("token {0:?} contains characters outside the byte-level alphabet")]
    UnmappableSymbol(String),
    #[error("decoded bytes are not valid UTF-8 (partial multi-byte sequence?)")]
    InvalidUtf8(#[source] std::string::FromUtf8Error),
}

pub type Result<T, E = BpeError> = std::result::Result<T, E>;

/// Loads a `token -> id` JSON vocabulary and a ranked merges file.
pub fn load_vocab(vocab_path: &Path, merges_path: &Path) -> Result<(Vocabulary, Merges)> {
    let read = |path: &Path| {
        fs::read_to_string(path).map_err(|source| BpeError::Io {
            path: path.to_path_buf(),
            source,
        })
    };
    let vocab = Vocabulary::from_json(&read(vocab_path)?)?;
    let merges = Merges::parse(&read(merges_path)?, &vocab)?;
    Ok((vocab, merges))
}

/// Encodes UTF-8 text into token ids.
pub fn encode(text: &str, vocab: &Vocabulary, merges: &Merges) -> Result<Vec<u32>> {
    let symbols = merge_symbols(text, merges);
    symbols
        .into_iter()
        .map(|s| vocab.id(&s).ok_or(BpeError::UnknownSymbol(s)))
        .collect()
}

/// Applies merges to the byte-level symbols of `text` and returns the final
/// symbol strings.
///
/// Each round finds the lowest-ranked adjacent pair and merges every
/// non-overlapping occurrence of it, scanning left to right.
pub fn merge_symbols(text: &str, merges: &Merges) -> Vec<String> {
    let table = ByteUnicodeTable::get();
    let mut symbols: Vec<String> = text
        .bytes()
        .map(|b| table.byte_to_char(b).to_string())
        .collect();

    while symbols.len() > 1 {
        let best = symbols
            .windows(2)
            .filter_map(|w| merges.rank(&w[0], &w[1]))
            .min();
        let Some(rank) = best else { break };
        let (left, right) = merges.pair(rank);

        let mut merged = Vec::with_capacity(symbols.len());
        let mut i = 0;
        while i < symbols.len() {
            if i + 1 < symbols.len() && symbols[i] == left && symbols[i + 1] == right {
                merged.push(format!("{left}{right}"));
                i += 2;
            } else {
                merged.push(std::mem::take(&mut symbols[i]));
                i += 1;
            }
        }
        symbols = merged;
    }
    symbols
}

fn token_bytes(ids: &[u32], vocab: &Vocabulary) -> Result<Vec<u8>> {
    let table = ByteUnicodeTable::get();
    let mut bytes = Vec::new();
    for &id in ids {
        let surface = vocab.surface(id).ok_or(BpeError::IdOutOfRange {
            id,
            size: vocab.len(),
        })?;
        for c in surface.chars() {
            let b = table
                .char_to_byte(c)
                .ok_or_else(|| BpeError::UnmappableSymbol(surface.to_string()))?;
            bytes.push(b);
        }
    }
    Ok(bytes)
}

/// Decodes token ids back into text. Fails if the concatenated bytes are not
/// valid UTF-8.
pub fn decode(ids: &[u32], vocab: &Vocabulary) -> Result<String> {
    String::from_utf8(token_bytes(ids, vocab)?).map_err(BpeError::InvalidUtf8)
}

/// Like [`decode`], but replaces invalid UTF-8 with U+FFFD instead of failing.
pub fn decode_lossy(ids: &[u32], vocab: &Vocabulary) -> Result<String> {
    Ok(String::from_utf8_lossy(&token_bytes(ids, vocab)?).into_owned())
}

/// Codepoints of a single token, or `None` if its bytes are not
/// self-contained valid UTF-8 (or it uses characters outside the byte
/// alphabet).
pub fn token_codepoints(surface: &str) -> Option<Vec<char>> {
    let bytes = ByteUnicodeTable::get().decode_symbols(surface)?;
    let text = String::from_utf8(bytes).ok()?;
    Some(text.chars().collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny() -> (Vocabulary, Merges) {
        let vocab = Vocabulary::from_json(r#"{"a":0,"b":1,"ab":2}"#).unwrap();
        let merges = Merges::parse("a b\n", &vocab).unwrap();
        (vocab, merges)
    }

    fn sym(text: &str) -> String {
        ByteUnicodeTable::get().encode_bytes(text.as_bytes())
    }

    #[test]
    fn encode_tiny_examples() {
        let (vocab, merges) = tiny();
        assert_eq!(encode("ab", &vocab, &merges).unwrap(), vec![2]);
        assert_eq!(encode("", &vocab, &merges).unwrap(), Vec::<u32>::new());
        assert_eq!(encode("ba", &vocab, &merges).unwrap(), vec![1, 0]);
        assert_eq!(encode("abab", &vocab, &merges).unwrap(), vec![2, 2]);
    }

    #[test]
    fn encode_unknown_symbol_is_an_error() {
        let (vocab, merges) = tiny();
        let err = encode("abc", &vocab, &merges).unwrap_err();
        assert!(matches!(err, BpeError::UnknownSymbol(s) if s == "c"));
    }

    #[test]
    fn lowest_rank_wins_over_position() {
        // "abc": (b,c) has rank 0, so "a" + "bc" even though (a,b) comes first.
        let vocab = Vocabulary::from_json(r#"{"a":0,"b":1,"c":2,"bc":3,"ab":4}"#).unwrap();
        let merges = Merges::parse("b c\na b\n", &vocab).unwrap();
        assert_eq!(encode("abc", &vocab, &merges).unwrap(), vec![0, 3]);
    }

    #[test]
    fn overlapping_sites_merge_left_to_right() {
        let vocab = Vocabulary::from_json(r#"{"a":0,"aa":1}"#).unwrap();
        let merges = Merges::parse("a a\n", &vocab).unwrap();
        assert_eq!(encode("aaa", &vocab, &merges).unwrap(), vec![1, 0]);
        assert_eq!(encode("aaaa", &vocab, &merges).unwrap(), vec![1, 1]);
    }

    #[test]
    fn token_codepoints_examples() {
        assert_eq!(token_codepoints("ab"), Some(vec!['a', 'b']));
        let space_cat = sym(" кот");
        assert!(space_cat.starts_with('\u{120}'));
        assert_eq!(
            token_codepoints(&space_cat),
            Some(vec!['\u{20}', '\u{43A}', '\u{43E}', '\u{442}'])
        );
        // 0xBA is the continuation byte of "к" (D0 BA)
        let lone = ByteUnicodeTable::get().byte_to_char(0xBA).to_string();
        assert_eq!(token_codepoints(&lone), None);
        assert_eq!(token_codepoints("\u{4E00}"), None);
    }

    #[test]
    fn decode_errors() {
        let (vocab, _) = tiny();
        assert!(matches!(
            decode(&[3], &vocab),
            Err(BpeError::IdOutOfRange { id: 3, size: 3 })
        ));

        let table = ByteUnicodeTable::get();
        let lead = table.byte_to_char(0xD0).to_string();
        let vocab = Vocabulary::from_surfaces(vec![lead]).unwrap();
        assert!(matches!(
            decode(&[0], &vocab),
            Err(BpeError::InvalidUtf8(_))
        ));
        assert_eq!(decode_lossy(&[0], &vocab).unwrap(), "\u{FFFD}");
    }

    #[test]
    fn byte_level_round_trip_without_merges() {
        let table = ByteUnicodeTable::get();
        let surfaces: Vec<String> = (0..=255u8)
            .map(|b| table.byte_to_char(b).to_string())
            .collect();
        let vocab = Vocabulary::from_surfaces(surfaces).unwrap();
        let merges = Merges::new(Vec::new(), &vocab).unwrap();
        for text in [
            "Здравей",
            "你好，世界",
            "¡Hola! señor",
            "🙂 emoji\n\ttabs",
            "",
        ] {
            let ids = encode(text, &vocab, &merges).unwrap();
            assert_eq!(ids.len(), text.len());
            assert_eq!(decode(&ids, &vocab).unwrap(), text);
        }
    }

    #[test]
    fn load_vocab_from_files() {
        let dir = tempfile::tempdir().unwrap();
        let v = dir.path().join("vocab.json");
        let m = dir.path().join("merges.txt");
        fs::write(&v, r#"{"a":0,"b":1,"ab":2}"#).unwrap();
        fs::write(&m, "#version: 0.2\na b\n").unwrap();
        let (vocab, merges) = load_vocab(&v, &m).unwrap();
        assert_eq!(vocab.len(), 3);
        assert_eq!(merges.len(), 1);

        let missing = dir.path().join("nope.json");
        assert!(matches!(load_vocab(&missing, &m), Err(BpeError::Io { .. })));
    }
}
