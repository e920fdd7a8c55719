use std::collections::BTreeSet;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{build_mapping, Method, Result, SubVocabError, SubVocabulary};
use crate::bpe::{token_codepoints, Vocabulary};

/// Inclusive codepoint interval.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct CodepointRange {
    pub lo: u32,
    pub hi: u32,
}

impl CodepointRange {
    pub fn contains(&self, cp: u32) -> bool {
        self.lo <= cp && cp <= self.hi
    }
}

/// A writing script, described as allowed codepoint ranges plus codepoints
/// tolerated alongside them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScriptSpec {
    name: String,
    ranges: Vec<CodepointRange>,
    tolerated: BTreeSet<u32>,
}

#[derive(Serialize, Deserialize)]
struct ScriptSpecFile {
    name: String,
    ranges: Vec<[u32; 2]>,
    tolerated: Vec<u32>,
}

/// Every codepoint with the Unicode `White_Space` property.
pub fn whitespace_codepoints() -> BTreeSet<u32> {
    // U+3000 is the highest White_Space codepoint.
    (0..=0x3000u32)
        .filter_map(char::from_u32)
        .filter(|c| c.is_whitespace())
        .map(u32::from)
        .collect()
}

impl ScriptSpec {
    /// Sorts and merges `ranges`, rejecting empty (`lo > hi`) or non-scalar
    /// intervals.
    pub fn new(
        name: impl Into<String>,
        ranges: impl IntoIterator<Item = (u32, u32)>,
        tolerated: impl IntoIterator<Item = u32>,
    ) -> Result<Self> {
        let mut raw: Vec<CodepointRange> = Vec::new();
        for (lo, hi) in ranges {
            if lo > hi {
                return Err(SubVocabError::InvalidScript(format!(
                    "empty range [{lo:#X}, {hi:#X}]"
                )));
            }
            if hi > 0x10FFFF {
                return Err(SubVocabError::InvalidScript(format!(
                    "range end {hi:#X} is beyond U+10FFFF"
                )));
            }
            raw.push(CodepointRange { lo, hi });
        }
        if raw.is_empty() {
            return Err(SubVocabError::InvalidScript("no ranges given".into()));
        }
        raw.sort();
        let mut ranges: Vec<CodepointRange> = Vec::with_capacity(raw.len());
        for r in raw {
            match ranges.last_mut() {
                Some(last) if r.lo <= last.hi.saturating_add(1) => last.hi = last.hi.max(r.hi),
                _ => ranges.push(r),
            }
        }
        Ok(Self {
            name: name.into(),
            ranges,
            tolerated: tolerated.into_iter().collect(),
        })
    }

    /// Cyrillic block.
    pub fn bulgarian() -> Self {
        Self::new("bg", [(0x0400, 0x04FF)], whitespace_codepoints()).expect("valid preset")
    }

    /// Basic Latin (ASCII).
    pub fn english() -> Self {
        Self::new("en", [(0x0000, 0x007F)], whitespace_codepoints()).expect("valid preset")
    }

    /// Basic Latin, Latin-1 Supplement and Latin Extended-A.
    pub fn spanish() -> Self {
        Self::new("es", [(0x0000, 0x017F)], whitespace_codepoints()).expect("valid preset")
    }

    /// CJK Unified Ideographs, CJK Symbols and Punctuation, and
    /// Halfwidth/Fullwidth Forms.
    pub fn chinese() -> Self {
        Self::new(
            "zh",
            [(0x4E00, 0x9FFF), (0x3000, 0x303F), (0xFF00, 0xFFEF)],
            whitespace_codepoints(),
        )
        .expect("valid preset")
    }

    /// Built-in preset for `bg`, `en`, `es` or `zh`.
    pub fn preset(lang: &str) -> Option<Self> {
        match lang {
            "bg" => Some(Self::bulgarian()),
            "en" => Some(Self::english()),
            "es" => Some(Self::spanish()),
            "zh" => Some(Self::chinese()),
            _ => None,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn ranges(&self) -> &[CodepointRange] {
        &self.ranges
    }

    pub fn tolerated(&self) -> &BTreeSet<u32> {
        &self.tolerated
    }

    pub fn is_allowed(&self, cp: u32) -> bool {
        let idx = self.ranges.partition_point(|r| r.hi < cp);
        self.ranges.get(idx).is_some_and(|r| r.contains(cp))
    }

    pub fn is_tolerated(&self, cp: u32) -> bool {
        self.tolerated.contains(&cp)
    }

    /// True iff at least one codepoint is allowed and none falls outside
    /// allowed ∪ tolerated.
    pub fn accepts(&self, codepoints: &[char]) -> bool {
        let mut any_allowed = false;
        for &c in codepoints {
            let cp = u32::from(c);
            if self.is_allowed(cp) {
                any_allowed = true;
            } else if !self.is_tolerated(cp) {
                return false;
            }
        }
        any_allowed
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: ScriptSpecFile = serde_json::from_str(text)?;
        Self::new(
            file.name,
            file.ranges.into_iter().map(|[lo, hi]| (lo, hi)),
            file.tolerated,
        )
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&ScriptSpecFile {
            name: self.name.clone(),
            ranges: self.ranges.iter().map(|r| [r.lo, r.hi]).collect(),
            tolerated: self.tolerated.iter().copied().collect(),
        })
        .expect("script spec serializes")
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| SubVocabError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_json(&text)
    }
}

/// Keeps ids below `base_k` plus every token whose codepoints the script spec
/// accepts. Tokens that are not self-contained UTF-8 are dropped.
pub fn script_filter(vocab: &Vocabulary, spec: &ScriptSpec, base_k: usize) -> SubVocabulary {
    let kept = vocab.iter().filter_map(|(id, surface)| {
        let keep = (id as usize) < base_k
            || token_codepoints(surface).is_some_and(|cps| spec.accepts(&cps));
        keep.then_some(id)
    });
    build_mapping(kept, vocab.len(), Method::Unicode, base_k).expect("vocabulary ids are in range")
}
