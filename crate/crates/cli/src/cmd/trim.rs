use std::process::ExitCode;

use anyhow::{Context, Result};
use vocab_trim::{trim_model, ModelWeights};

use super::load_subvocab;
use crate::TrimArgs;

pub fn run(args: TrimArgs) -> Result<ExitCode> {
    let model = ModelWeights::load(&args.model)
        .with_context(|| format!("cannot load model {}", args.model.display()))?;
    let sub = load_subvocab(&args.subvocab)?;
    let trimmed = trim_model(&model, &sub)?;
    trimmed
        .save(&args.out)
        .with_context(|| format!("cannot write {}", args.out.display()))?;
    println!(
        "trimmed {} -> {} rows  parameters {} -> {}",
        model.vocab_size(),
        trimmed.vocab_size(),
        model.stored_parameters(),
        trimmed.stored_parameters()
    );
    Ok(ExitCode::SUCCESS)
}
