use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use vocab_trim::bench::BenchResult;
use vocab_trim::metrics::{memory_footprint, round2, EvalReport, ReportMeta};

use super::load_subvocab;
use crate::records::{read_outputs, write_json};
use crate::EvalArgs;

pub fn run(args: EvalArgs) -> Result<ExitCode> {
    let full = read_outputs(&args.full)?;
    let vt = read_outputs(&args.vt)?;
    if full.len() != vt.len() {
        bail!(
            "{} has {} outputs but {} has {}",
            args.full.display(),
            full.len(),
            args.vt.display(),
            vt.len()
        );
    }
    for (i, (f, v)) in full.iter().zip(&vt).enumerate() {
        if f.0 != v.0 {
            bail!(
                "record {i}: prompt id {} in full outputs but {} in trimmed outputs",
                f.0,
                v.0
            );
        }
    }
    let full_texts: Vec<&str> = full.iter().map(|(_, _, t)| t.as_str()).collect();
    let vt_texts: Vec<&str> = vt.iter().map(|(_, _, t)| t.as_str()).collect();
    let meta = ReportMeta {
        model_id: args.model_id,
        language: args.lang,
        method: args.method,
        seed: args.seed,
    };
    let mut report = EvalReport::score(meta, &full_texts, &vt_texts)?;
    if let Some(path) = &args.subvocab {
        let sub = load_subvocab(path)?;
        report.subvocab_size = Some(sub.len());
        if let Some(h) = args.hidden {
            report.memory_gib = Some(memory_footprint(sub.len(), h, 4)?);
        }
    }
    if let Some(path) = &args.bench {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read {}", path.display()))?;
        let bench: BenchResult = serde_json::from_str(&text)
            .with_context(|| format!("{}: malformed bench result", path.display()))?;
        report.wall_time_seconds = Some(bench.end_to_end_seconds);
    }
    write_json(&args.out, &report)?;

    println!(
        "prompts {}  miss {}  o-BLEU {:.2}  o-chrF {:.2}",
        report.n_prompts,
        report.miss,
        round2(report.o_bleu),
        round2(report.o_chrf)
    );
    if let Some(v) = report.subvocab_size {
        print!("|V'| {v}");
        if let Some(m) = report.memory_gib {
            print!("  memory {:.2} GiB", round2(m));
        }
        println!();
    }
    if let Some(t) = report.wall_time_seconds {
        println!("time {t:.3} s");
    }
    Ok(ExitCode::SUCCESS)
}
