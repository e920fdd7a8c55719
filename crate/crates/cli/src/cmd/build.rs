use std::fs::File;
use std::io::BufReader;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use vocab_trim::subvocab::corpus_select_reader;
use vocab_trim::{
    encode, oracle_select, script_filter, with_input_tokens, Method, ScriptSpec, SubVocabulary,
};

use super::{load_prompts, load_tokenizer};
use crate::records::read_outputs;
use crate::BuildArgs;

pub fn run(args: BuildArgs) -> Result<ExitCode> {
    let (vocab, merges) = load_tokenizer(&args.tokenizer)?;
    let sub = match args.method {
        Method::Unicode => {
            let spec = match (&args.script, &args.lang) {
                (Some(path), _) => ScriptSpec::load(path)?,
                (None, Some(lang)) => ScriptSpec::preset(lang)
                    .ok_or_else(|| anyhow!("no script preset for language {lang:?}"))?,
                (None, None) => bail!("--method unicode needs --lang or --script"),
            };
            script_filter(&vocab, &spec, args.base_k)
        }
        Method::Corpus => {
            let path = args
                .corpus
                .as_ref()
                .context("--method corpus needs --corpus")?;
            let file =
                File::open(path).with_context(|| format!("cannot open {}", path.display()))?;
            corpus_select_reader(&vocab, &merges, BufReader::new(file), args.base_k)?
        }
        Method::Oracle => {
            let path = args
                .full_outputs
                .as_ref()
                .context("--method oracle needs --full-outputs")?;
            let outputs: Vec<Vec<u32>> = read_outputs(path)?
                .into_iter()
                .map(|(_, ids, _)| ids)
                .collect();
            oracle_select(&outputs, vocab.len(), args.base_k)?
        }
        Method::Full => SubVocabulary::full(vocab.len()),
    };
    let sub = match (&args.prompts, args.include_inputs) {
        (Some(path), true) if sub.method() != Method::Full => {
            let prompts = load_prompts(path)?
                .iter()
                .map(|p| encode(&p.text, &vocab, &merges))
                .collect::<Result<Vec<_>, _>>()?;
            with_input_tokens(&sub, &prompts)?
        }
        _ => sub,
    };
    sub.save(&args.out)?;
    println!(
        "method {}  |V| = {}  |V'| = {}  reduction = {:.2}%",
        sub.method(),
        vocab.len(),
        sub.len(),
        sub.reduction_percent()
    );
    Ok(ExitCode::SUCCESS)
}
