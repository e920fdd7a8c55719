use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use vocab_trim::bpe::decode_lossy;
use vocab_trim::{encode, greedy_decode, ModelWeights};

use super::{load_prompts, load_subvocab, load_tokenizer};
use crate::records::{write_jsonl, OutputRecord};
use crate::DecodeArgs;

pub fn run(args: DecodeArgs) -> Result<ExitCode> {
    let mut model = ModelWeights::load(&args.model)
        .with_context(|| format!("cannot load model {}", args.model.display()))?;
    if let Some(path) = &args.subvocab {
        model = model.into_trimmed(&load_subvocab(path)?)?;
    }
    let (vocab, merges) = load_tokenizer(&args.tokenizer)?;
    let original_size = model
        .row_map()
        .map_or(model.vocab_size(), |sub| sub.vocab_size());
    if original_size != vocab.len() {
        bail!(
            "model covers {original_size} tokens but the tokenizer has {}",
            vocab.len()
        );
    }
    let prompts = load_prompts(&args.prompts)?;

    let mut records = Vec::with_capacity(prompts.len());
    let mut errors = 0usize;
    for prompt in &prompts {
        let result = encode(&prompt.text, &vocab, &merges)
            .map_err(anyhow::Error::from)
            .and_then(|ids| {
                greedy_decode(&model, &ids, args.max_new, args.eos).map_err(anyhow::Error::from)
            })
            .and_then(|r| {
                let generated = r.generated().to_vec();
                let text = decode_lossy(&generated, &vocab)?;
                Ok((generated, text))
            });
        records.push(match result {
            Ok((output_ids, text)) => OutputRecord::Output {
                id: prompt.id,
                output_ids,
                text,
            },
            Err(err) => {
                errors += 1;
                eprintln!("prompt {}: {err:#}", prompt.id);
                OutputRecord::Error {
                    id: prompt.id,
                    error: format!("{err:#}"),
                }
            }
        });
    }
    write_jsonl(&args.out, &records)?;
    println!(
        "decoded {} prompts with |V'| = {} ({} errors)",
        prompts.len(),
        model.vocab_size(),
        errors
    );
    Ok(if errors == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    })
}
