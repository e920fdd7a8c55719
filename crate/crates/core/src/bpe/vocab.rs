use std::collections::HashMap;
use std::fmt;

use serde::de::{MapAccess, Visitor};
use serde::{Deserialize, Deserializer};

use super::{BpeError, Result};

/// Dense id <-> byte-level surface string mapping.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vocabulary {
    surfaces: Vec<String>,
    ids: HashMap<String, u32>,
}

impl Vocabulary {
    /// Builds a vocabulary where each surface's id is its position.
    pub fn from_surfaces(surfaces: Vec<String>) -> Result<Self> {
        let mut ids = HashMap::with_capacity(surfaces.len());
        for (id, s) in surfaces.iter().enumerate() {
            if ids.insert(s.clone(), id as u32).is_some() {
                return Err(BpeError::DuplicateSurface(s.clone()));
            }
        }
        Ok(Self { surfaces, ids })
    }

    /// Builds a vocabulary from `(surface, id)` pairs in any order.
    pub fn from_entries(entries: impl IntoIterator<Item = (String, u32)>) -> Result<Self> {
        let entries: Vec<(String, u32)> = entries.into_iter().collect();
        let size = entries.len();
        let mut slots: Vec<Option<String>> = vec![None; size];
        for (surface, id) in entries {
            match slots.get_mut(id as usize) {
                Some(slot @ None) => *slot = Some(surface),
                Some(Some(_)) => return Err(BpeError::DuplicateId(id)),
                // An id beyond the size leaves some lower slot empty.
                None => {}
            }
        }
        if let Some(missing) = slots.iter().position(Option::is_none) {
            return Err(BpeError::NonDenseIds { missing, size });
        }
        Self::from_surfaces(slots.into_iter().flatten().collect())
    }

    /// Parses a JSON object mapping surface strings to ids.
    pub fn from_json(text: &str) -> Result<Self> {
        let Entries(entries) = serde_json::from_str(text)?;
        Self::from_entries(entries)
    }

    /// Serializes as a JSON object in id order.
    pub fn to_json(&self) -> String {
        let mut out = String::from("{\n");
        for (id, s) in self.surfaces.iter().enumerate() {
            let key = serde_json::to_string(s).expect("strings serialize");
            let sep = if id + 1 == self.surfaces.len() {
                ""
            } else {
                ","
            };
            out.push_str(&format!("  {key}: {id}{sep}\n"));
        }
        out.push('}');
        out
    }

    pub fn len(&self) -> usize {
        self.surfaces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.surfaces.is_empty()
    }

    pub fn surface(&self, id: u32) -> Option<&str> {
        self.surfaces.get(id as usize).map(String::as_str)
    }

    pub fn id(&self, surface: &str) -> Option<u32> {
        self.ids.get(surface).copied()
    }

    pub fn contains(&self, surface: &str) -> bool {
        self.ids.contains_key(surface)
    }

    /// `(id, surface)` in ascending id order.
    pub fn iter(&self) -> impl Iterator<Item = (u32, &str)> + '_ {
        self.surfaces
            .iter()
            .enumerate()
            .map(|(id, s)| (id as u32, s.as_str()))
    }
}

// serde_json collapses duplicate object keys; collect raw pairs instead so
// duplicates can be reported.
struct Entries(Vec<(String, u32)>);

impl<'de> Deserialize<'de> for Entries {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        struct EntriesVisitor;

        impl<'de> Visitor<'de> for EntriesVisitor {
            type Value = Entries;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("an object mapping token strings to integer ids")
            }

            fn visit_map<A: MapAccess<'de>>(
                self,
                mut map: A,
            ) -> std::result::Result<Entries, A::Error> {
                let mut out = Vec::with_capacity(map.size_hint().unwrap_or(0));
                while let Some((k, v)) = map.next_entry::<String, u32>()? {
                    out.push((k, v));
                }
                Ok(Entries(out))
            }
        }

        deserializer.deserialize_map(EntriesVisitor)
    }
}

/// Ranked merge list. Rank is list position; lower ranks apply first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Merges {
    pairs: Vec<(String, String)>,
    ranks: HashMap<String, HashMap<String, u32>>,
}

impl Merges {
    pub fn new(pairs: Vec<(String, String)>, vocab: &Vocabulary) -> Result<Self> {
        let mut ranks: HashMap<String, HashMap<String, u32>> = HashMap::new();
        for (rank, (left, right)) in pairs.iter().enumerate() {
            if !vocab.contains(&format!("{left}{right}")) {
                return Err(BpeError::MergeNotInVocab {
                    left: left.clone(),
                    right: right.clone(),
                });
            }
            let slot = ranks.entry(left.clone()).or_default();
            if slot.insert(right.clone(), rank as u32).is_some() {
                return Err(BpeError::DuplicateMerge {
                    left: left.clone(),
                    right: right.clone(),
                });
            }
        }
        Ok(Self { pairs, ranks })
    }

    /// Parses a merges file: an optional leading `#` comment line, then one
    /// `LEFT RIGHT` pair per line. Blank lines are skipped.
    pub fn parse(text: &str, vocab: &Vocabulary) -> Result<Self> {
        let mut pairs = Vec::new();
        for (idx, line) in text.lines().enumerate() {
            if idx == 0 && line.starts_with('#') {
                continue;
            }
            if line.is_empty() {
                continue;
            }
            match line.split_once(' ') {
                Some((l, r)) if !l.is_empty() && !r.is_empty() && !r.contains(' ') => {
                    pairs.push((l.to_string(), r.to_string()));
                }
                _ => {
                    return Err(BpeError::MalformedMerge {
                        line: idx + 1,
                        text: line.to_string(),
                    })
                }
            }
        }
        Self::new(pairs, vocab)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::from("#version: 0.2\n");
        for (l, r) in &self.pairs {
            out.push_str(l);
            out.push(' ');
            out.push_str(r);
            out.push('\n');
        }
        out
    }

    pub fn rank(&self, left: &str, right: &str) -> Option<u32> {
        self.ranks.get(left)?.get(right).copied()
    }

    /// The pair at `rank`. Panics if out of range.
    pub fn pair(&self, rank: u32) -> (&str, &str) {
        let (l, r) = &self.pairs[rank as usize];
        (l, r)
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &str)> + '_ {
        self.pairs.iter().map(|(l, r)| (l.as_str(), r.as_str()))
    }
}
