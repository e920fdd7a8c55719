pub mod bench;
pub mod build;
pub mod decode;
pub mod eval;
pub mod fixtures;
pub mod init;
pub mod memory;
pub mod trim;

use std::path::Path;

use anyhow::{Context, Result};
use vocab_trim::{load_vocab, Merges, SubVocabulary, Vocabulary};

use crate::records::{read_jsonl, Prompt};
use crate::TokenizerArgs;

pub fn load_tokenizer(args: &TokenizerArgs) -> Result<(Vocabulary, Merges)> {
    load_vocab(&args.vocab, &args.merges).context("cannot load tokenizer")
}

pub fn load_prompts(path: &Path) -> Result<Vec<Prompt>> {
    read_jsonl(path).context("cannot load prompts")
}

pub fn load_subvocab(path: &Path) -> Result<SubVocabulary> {
    SubVocabulary::load(path).context("cannot load sub-vocabulary")
}
