//! Sub-vocabulary construction.
//!
//! Every strategy produces a [`SubVocabulary`]: an ascending list of kept
//! original ids with order-preserving dense re-indexing. The first `base_k`
//! ids (special tokens, raw bytes) are always kept.

mod script;
mod select;

use std::fmt;
use std::io;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use script::{script_filter, CodepointRange, ScriptSpec};
pub use select::{corpus_select, corpus_select_reader, oracle_select};

use crate::bpe::BpeError;

pub const DEFAULT_BASE_K: usize = 300;

const NOT_KEPT: u32 = u32::MAX;

#[derive(Debug, thiserror::Error)]
pub enum SubVocabError {
    #[error("token id {id} is out of range for a vocabulary of size {size}")]
    IdOutOfRange { id: u32, size: usize },
    #[error("corpus line {line}: {source}")]
    Encode {
        line: usize,
        #[source]
        source: BpeError,
    },
    #[error("I/O error on {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("corpus read failed at line {line}: {source}")]
    CorpusRead {
        line: usize,
        #[source]
        source: io::Error,
    },
    #[error("malformed sub-vocabulary file: {0}")]
    Json(#[from] serde_json::Error),
    #[error("kept ids must be strictly ascending (found {prev} before {next})")]
    NotAscending { prev: u32, next: u32 },
    #[error("kept ids do not include retained prefix id {0}")]
    MissingPrefix(u32),
    #[error("method \"full\" requires every id to be kept ({kept} of {size} kept)")]
    IncompleteFull { kept: usize, size: usize },
    #[error("unknown method {0:?} (expected unicode, corpus, oracle or full)")]
    UnknownMethod(String),
    #[error("invalid script spec: {0}")]
    InvalidScript(String),
}

pub type Result<T, E = SubVocabError> = std::result::Result<T, E>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Unicode,
    Corpus,
    Oracle,
    Full,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Unicode => "unicode",
            Method::Corpus => "corpus",
            Method::Oracle => "oracle",
            Method::Full => "full",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = SubVocabError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "unicode" => Ok(Method::Unicode),
            "corpus" => Ok(Method::Corpus),
            "oracle" => Ok(Method::Oracle),
            "full" => Ok(Method::Full),
            other => Err(SubVocabError::UnknownMethod(other.to_string())),
        }
    }
}

/// A kept-id set over a vocabulary of `vocab_size` tokens.
///
/// New id `j` corresponds to original id `kept[j]`; the mapping is dense and
/// order-preserving.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubVocabulary {
    method: Method,
    base_k: usize,
    vocab_size: usize,
    kept: Vec<u32>,
    old_to_new: Vec<u32>,
}

#[derive(Serialize, Deserialize)]
struct SubVocabularyFile {
    method: Method,
    base_k: usize,
    vocab_size: usize,
    kept: Vec<u32>,
}

/// Builds a [`SubVocabulary`] from an unordered id collection.
///
/// `base_k` is clamped to `vocab_size` and the prefix `0..base_k` is unioned
/// into the kept set. Duplicate ids are allowed.
pub fn build_mapping(
    kept_set: impl IntoIterator<Item = u32>,
    vocab_size: usize,
    method: Method,
    base_k: usize,
) -> Result<SubVocabulary> {
    let base_k = base_k.min(vocab_size);
    let mut mask = vec![false; vocab_size];
    mask[..base_k].fill(true);
    for id in kept_set {
        match mask.get_mut(id as usize) {
            Some(slot) => *slot = true,
            None => {
                return Err(SubVocabError::IdOutOfRange {
                    id,
                    size: vocab_size,
                })
            }
        }
    }
    SubVocabulary::from_mask(&mask, method, base_k)
}

impl SubVocabulary {
    /// Keeps every id.
    pub fn full(vocab_size: usize) -> Self {
        Self::from_mask(&vec![true; vocab_size], Method::Full, vocab_size)
            .expect("complete mask is a valid full sub-vocabulary")
    }

    fn from_mask(mask: &[bool], method: Method, base_k: usize) -> Result<Self> {
        let vocab_size = mask.len();
        let mut kept = Vec::new();
        let mut old_to_new = vec![NOT_KEPT; vocab_size];
        for (old, _) in mask.iter().enumerate().filter(|(_, &k)| k) {
            old_to_new[old] = kept.len() as u32;
            kept.push(old as u32);
        }
        if method == Method::Full && kept.len() != vocab_size {
            return Err(SubVocabError::IncompleteFull {
                kept: kept.len(),
                size: vocab_size,
            });
        }
        Ok(Self {
            method,
            base_k,
            vocab_size,
            kept,
            old_to_new,
        })
    }

    pub fn method(&self) -> Method {
        self.method
    }

    /// Retained prefix length, already clamped to the vocabulary size.
    pub fn base_k(&self) -> usize {
        self.base_k
    }

    /// Size of the original vocabulary.
    pub fn vocab_size(&self) -> usize {
        self.vocab_size
    }

    /// Kept original ids, strictly ascending. Doubles as the new-to-old map.
    pub fn kept(&self) -> &[u32] {
        &self.kept
    }

    pub fn len(&self) -> usize {
        self.kept.len()
    }

    pub fn is_empty(&self) -> bool {
        self.kept.is_empty()
    }

    pub fn contains(&self, old: u32) -> bool {
        self.to_new(old).is_some()
    }

    pub fn to_new(&self, old: u32) -> Option<u32> {
        self.old_to_new
            .get(old as usize)
            .copied()
            .filter(|&n| n != NOT_KEPT)
    }

    pub fn to_old(&self, new: u32) -> Option<u32> {
        self.kept.get(new as usize).copied()
    }

    /// Fraction of the vocabulary removed, in percent.
    pub fn reduction_percent(&self) -> f64 {
        if self.vocab_size == 0 {
            return 0.0;
        }
        100.0 * (1.0 - self.kept.len() as f64 / self.vocab_size as f64)
    }

    /// Same method and base, with extra ids unioned in.
    pub fn union(&self, ids: impl IntoIterator<Item = u32>) -> Result<Self> {
        build_mapping(
            self.kept.iter().copied().chain(ids),
            self.vocab_size,
            self.method,
            self.base_k,
        )
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&SubVocabularyFile {
            method: self.method,
            base_k: self.base_k,
            vocab_size: self.vocab_size,
            kept: self.kept.clone(),
        })
        .expect("sub-vocabulary serializes")
    }

    /// Parses the JSON artifact and recomputes the mappings. The kept list
    /// must be strictly ascending, in range, and contain the retained prefix.
    pub fn from_json(text: &str) -> Result<Self> {
        let file: SubVocabularyFile = serde_json::from_str(text)?;
        for w in file.kept.windows(2) {
            if w[0] >= w[1] {
                return Err(SubVocabError::NotAscending {
                    prev: w[0],
                    next: w[1],
                });
            }
        }
        let base_k = file.base_k.min(file.vocab_size);
        let mut mask = vec![false; file.vocab_size];
        for &id in &file.kept {
            match mask.get_mut(id as usize) {
                Some(slot) => *slot = true,
                None => {
                    return Err(SubVocabError::IdOutOfRange {
                        id,
                        size: file.vocab_size,
                    })
                }
            }
        }
        if let Some(missing) = mask[..base_k].iter().position(|&k| !k) {
            return Err(SubVocabError::MissingPrefix(missing as u32));
        }
        Self::from_mask(&mask, file.method, base_k)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()).map_err(|source| SubVocabError::Io {
            path: path.to_path_buf(),
            source,
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| SubVocabError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_json(&text)
    }
}

/// Adds every token of every batch prompt to the kept set.
pub fn with_input_tokens(sub: &SubVocabulary, batch_prompts: &[Vec<u32>]) -> Result<SubVocabulary> {
    sub.union(batch_prompts.iter().flatten().copied())
}
