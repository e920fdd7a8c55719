use std::io::BufRead;

use super::{build_mapping, Method, Result, SubVocabError, SubVocabulary};
use crate::bpe::{encode, Merges, Vocabulary};

/// Keeps `0..base_k` plus every id produced by encoding any corpus line.
///
/// Lines are encoded one at a time, so memory stays bounded by the longest
/// line and the vocabulary-sized hit mask. Encode errors carry the 1-based
/// line number.
pub fn corpus_select<I, S>(
    vocab: &Vocabulary,
    merges: &Merges,
    corpus: I,
    base_k: usize,
) -> Result<SubVocabulary>
where
    I: IntoIterator<Item = S>,
    S: AsRef<str>,
{
    let mut hits = HitSet::new(vocab.len());
    for (idx, line) in corpus.into_iter().enumerate() {
        hits.add_line(line.as_ref(), idx + 1, vocab, merges)?;
    }
    hits.finish(base_k)
}

/// [`corpus_select`] over a reader, one line per document.
pub fn corpus_select_reader<R: BufRead>(
    vocab: &Vocabulary,
    merges: &Merges,
    reader: R,
    base_k: usize,
) -> Result<SubVocabulary> {
    let mut hits = HitSet::new(vocab.len());
    for (idx, line) in reader.lines().enumerate() {
        let line = line.map_err(|source| SubVocabError::CorpusRead {
            line: idx + 1,
            source,
        })?;
        hits.add_line(&line, idx + 1, vocab, merges)?;
    }
    hits.finish(base_k)
}

struct HitSet {
    mask: Vec<bool>,
}

impl HitSet {
    fn new(size: usize) -> Self {
        Self {
            mask: vec![false; size],
        }
    }

    fn add_line(
        &mut self,
        line: &str,
        number: usize,
        vocab: &Vocabulary,
        merges: &Merges,
    ) -> Result<()> {
        let ids = encode(line, vocab, merges).map_err(|source| SubVocabError::Encode {
            line: number,
            source,
        })?;
        for id in ids {
            self.mask[id as usize] = true;
        }
        Ok(())
    }

    fn finish(self, base_k: usize) -> Result<SubVocabulary> {
        let size = self.mask.len();
        let ids = self
            .mask
            .into_iter()
            .enumerate()
            .filter_map(|(id, hit)| hit.then_some(id as u32));
        build_mapping(ids, size, Method::Corpus, base_k)
    }
}

/// Keeps `0..base_k` plus every id that occurs in a full-vocabulary decode
/// output.
pub fn oracle_select(
    full_outputs: &[Vec<u32>],
    vocab_size: usize,
    base_k: usize,
) -> Result<SubVocabulary> {
    build_mapping(
        full_outputs.iter().flatten().copied(),
        vocab_size,
        Method::Oracle,
        base_k,
    )
}
