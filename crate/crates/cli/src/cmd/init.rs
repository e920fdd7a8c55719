use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use vocab_trim::metrics::embedding_fraction;
use vocab_trim::{init_random, ModelConfig, Vocabulary};

use crate::InitArgs;

pub fn run(args: InitArgs) -> Result<ExitCode> {
    let vocab_size = match (args.vocab_size, &args.vocab) {
        (Some(v), _) => v,
        (None, Some(path)) => {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("cannot read {}", path.display()))?;
            Vocabulary::from_json(&text)?.len()
        }
        (None, None) => bail!("give --vocab-size or --vocab"),
    };
    let config = ModelConfig {
        vocab_size,
        hidden: args.hidden,
        layers: args.layers,
        heads: args.heads,
        max_context: args.max_context,
        tied_embeddings: !args.untied,
    };
    let model = init_random(&config, args.seed)?;
    model
        .save(&args.out)
        .with_context(|| format!("cannot write {}", args.out.display()))?;
    println!(
        "|V| {}  H {}  L {}  parameters {}  embedding share {:.3}",
        config.vocab_size,
        config.hidden,
        config.layers,
        config.parameter_count(),
        embedding_fraction(&config)
    );
    Ok(ExitCode::SUCCESS)
}
