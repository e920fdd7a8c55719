use std::process::ExitCode;

use anyhow::{bail, Result};
use vocab_trim::metrics::{footprint_table, memory_footprint, round2, MODEL_SHAPES, VOCAB_ROWS};

use crate::MemoryArgs;

pub fn run(args: MemoryArgs) -> Result<ExitCode> {
    let table = if args.vocab_sizes.is_empty() && args.hidden.is_empty() {
        default_table(args.bytes_per_param)?
    } else if args.vocab_sizes.is_empty() || args.hidden.is_empty() {
        bail!("--vocab-sizes and --hidden must be given together");
    } else {
        custom_table(&args.vocab_sizes, &args.hidden, args.bytes_per_param)?
    };
    print!("{table}");
    Ok(ExitCode::SUCCESS)
}

fn default_table(bytes: usize) -> Result<String> {
    let cells = footprint_table(&VOCAB_ROWS, &MODEL_SHAPES, bytes)?;
    let mut out = format!("{:<12}{:>8}", "", "|V|");
    for s in &MODEL_SHAPES[..3] {
        out += &format!("{:>12}", s.name);
    }
    out += &format!("{:>8}{:>12}\n", "|V|", MODEL_SHAPES[3].name);
    for (row, values) in VOCAB_ROWS.iter().zip(&cells) {
        out += &format!("{:<12}{:>8}", row.label, row.bloom);
        for v in &values[..3] {
            out += &format!("{:>12.2}", round2(*v));
        }
        out += &format!("{:>8}{:>12.2}\n", row.llama, round2(values[3]));
    }
    Ok(out)
}

fn custom_table(vocab_sizes: &[usize], hidden: &[usize], bytes: usize) -> Result<String> {
    let mut out = format!("{:>10}", "|V| \\ H");
    for h in hidden {
        out += &format!("{h:>10}");
    }
    out.push('\n');
    for &v in vocab_sizes {
        out += &format!("{v:>10}");
        for &h in hidden {
            out += &format!("{:>10.2}", round2(memory_footprint(v, h, bytes)?));
        }
        out.push('\n');
    }
    Ok(out)
}
