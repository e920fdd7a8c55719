use std::process::ExitCode;

use anyhow::Result;
use vocab_trim::bench::{output_layer_scaling, time_end_to_end, EndToEndPlan, Prompts};
use vocab_trim::bpe::decode_lossy;
use vocab_trim::metrics::miss_count;

use super::{load_prompts, load_subvocab, load_tokenizer};
use crate::records::{read_outputs, write_json};
use crate::{EndToEndArgs, ScalingArgs};

pub fn end_to_end(args: EndToEndArgs) -> Result<ExitCode> {
    let (vocab, merges) = load_tokenizer(&args.tokenizer)?;
    let texts: Vec<String> = load_prompts(&args.prompts)?
        .into_iter()
        .map(|p| p.text)
        .collect();
    let sub = args.subvocab.as_deref().map(load_subvocab).transpose()?;
    let result = time_end_to_end(&EndToEndPlan {
        model_path: &args.model,
        subvocab: sub.as_ref(),
        prompts: Prompts::Text {
            texts: &texts,
            vocab: &vocab,
            merges: &merges,
        },
        max_new: args.max_new,
        eos: args.eos,
        repeats: args.repeats,
    })?;

    let miss = match &args.reference {
        Some(path) => {
            let reference: Vec<String> =
                read_outputs(path)?.into_iter().map(|(_, _, t)| t).collect();
            let ours = result
                .outputs
                .iter()
                .map(|ids| decode_lossy(ids, &vocab))
                .collect::<Result<Vec<_>, _>>()?;
            Some(miss_count(&reference, &ours)?)
        }
        None => None,
    };

    println!(
        "{:>8}  {:>10}  {:>6}  {:>8}  {:>8}  {:>8}  {:>8}",
        "|V'|", "time (s)", "miss", "load", "slice", "tokenize", "decode"
    );
    let p = result.phases;
    println!(
        "{:>8}  {:>10.3}  {:>6}  {:>8.3}  {:>8.3}  {:>8.3}  {:>8.3}",
        result.vocab_size_used,
        result.end_to_end_seconds,
        miss.map_or_else(|| "-".to_string(), |m| m.to_string()),
        p.load,
        p.slice,
        p.tokenize,
        p.decode
    );
    println!(
        "median of {} repeats, {} tokens generated",
        result.repeats, result.tokens_generated
    );
    if let Some(out) = &args.out {
        write_json(out, &result)?;
    }
    Ok(ExitCode::SUCCESS)
}

pub fn scaling(args: ScalingArgs) -> Result<ExitCode> {
    let points = output_layer_scaling(args.hidden, &args.sizes, args.trials, args.seed)?;
    println!(
        "{:>8}  {:>12}  {:>10}  {:>10}",
        "|V|", "ms/proj", "time ratio", "size ratio"
    );
    if let Some(first) = points.first() {
        for p in &points {
            println!(
                "{:>8}  {:>12.3}  {:>10.2}  {:>10.2}",
                p.vocab_size,
                p.seconds * 1e3,
                p.seconds / first.seconds,
                p.vocab_size as f64 / first.vocab_size as f64
            );
        }
    }
    if let Some(out) = &args.out {
        write_json(out, &points)?;
    }
    Ok(ExitCode::SUCCESS)
}
