//! `vtrim`: build sub-vocabularies, trim toy models, decode, evaluate and
//! benchmark.

mod cmd;
mod records;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use vocab_trim::{Method, DEFAULT_BASE_K};

#[derive(Parser)]
#[command(name = "vtrim", version, about = "Vocabulary trimming experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Select a sub-vocabulary and write it as JSON.
    Build(BuildArgs),
    /// Slice a model file down to a sub-vocabulary.
    Trim(TrimArgs),
    /// Greedy-decode a prompts file.
    Decode(DecodeArgs),
    /// Compare trimmed outputs against full-vocabulary outputs.
    Eval(EvalArgs),
    /// Timing benchmarks.
    #[command(subcommand)]
    Bench(BenchCommand),
    /// Print the embedding memory footprint table.
    Memory(MemoryArgs),
    /// Write a randomly initialised toy model.
    Init(InitArgs),
    /// Write the synthetic tokenizer, prompts and corpora.
    Fixtures(FixturesArgs),
}

#[derive(Args)]
struct TokenizerArgs {
    /// `token -> id` JSON vocabulary.
    #[arg(long)]
    vocab: PathBuf,
    /// Ranked merges file.
    #[arg(long)]
    merges: PathBuf,
}

#[derive(Args)]
struct BuildArgs {
    #[arg(long)]
    method: Method,
    /// Language tag (bg, en, es, zh) selecting the script preset.
    #[arg(long)]
    lang: Option<String>,
    #[command(flatten)]
    tokenizer: TokenizerArgs,
    #[arg(long, default_value_t = DEFAULT_BASE_K)]
    base_k: usize,
    /// Custom script spec JSON (unicode method), overriding --lang.
    #[arg(long)]
    script: Option<PathBuf>,
    /// Corpus text file, one document per line (corpus method).
    #[arg(long)]
    corpus: Option<PathBuf>,
    /// Full-vocabulary decode outputs (oracle method).
    #[arg(long)]
    full_outputs: Option<PathBuf>,
    /// Prompts file whose tokens are added to the sub-vocabulary.
    #[arg(long)]
    prompts: Option<PathBuf>,
    /// Add the tokens of --prompts to the sub-vocabulary.
    #[arg(long, default_value_t = true, action = clap::ArgAction::Set)]
    include_inputs: bool,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct TrimArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    subvocab: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct DecodeArgs {
    #[arg(long)]
    model: PathBuf,
    #[command(flatten)]
    tokenizer: TokenizerArgs,
    #[arg(long)]
    prompts: PathBuf,
    /// Trim the model to this sub-vocabulary before decoding.
    #[arg(long)]
    subvocab: Option<PathBuf>,
    #[arg(long, default_value_t = 128)]
    max_new: usize,
    /// Stop token (original id).
    #[arg(long)]
    eos: Option<u32>,
    /// Recorded for reproducibility; greedy decoding draws no randomness.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct EvalArgs {
    /// Full-vocabulary decode outputs.
    #[arg(long)]
    full: PathBuf,
    /// Trimmed decode outputs.
    #[arg(long)]
    vt: PathBuf,
    #[arg(long, default_value = "en")]
    lang: String,
    #[arg(long, default_value = "")]
    method: String,
    #[arg(long, default_value = "")]
    model_id: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Sub-vocabulary used for the trimmed run (fills subvocab_size).
    #[arg(long)]
    subvocab: Option<PathBuf>,
    /// Hidden size for memory_gib (needs --subvocab).
    #[arg(long)]
    hidden: Option<usize>,
    /// Bench result JSON for wall_time_seconds.
    #[arg(long)]
    bench: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Subcommand)]
enum BenchCommand {
    /// Time load + slice + tokenize + decode of a prompts file.
    EndToEnd(EndToEndArgs),
    /// Time the output projection alone at several vocabulary sizes.
    Scaling(ScalingArgs),
}

#[derive(Args)]
struct EndToEndArgs {
    #[arg(long)]
    model: PathBuf,
    #[command(flatten)]
    tokenizer: TokenizerArgs,
    #[arg(long)]
    prompts: PathBuf,
    #[arg(long)]
    subvocab: Option<PathBuf>,
    /// Full-vocabulary outputs for the miss column.
    #[arg(long)]
    reference: Option<PathBuf>,
    #[arg(long, default_value_t = 128)]
    max_new: usize,
    #[arg(long)]
    eos: Option<u32>,
    #[arg(long, default_value_t = 5)]
    repeats: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ScalingArgs {
    #[arg(long, default_value_t = 1024)]
    hidden: usize,
    #[arg(long, value_delimiter = ',', default_values_t = [22912, 58642, 104320, 250680])]
    sizes: Vec<usize>,
    #[arg(long, default_value_t = 5)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct MemoryArgs {
    /// Vocabulary sizes; with --hidden, prints a custom table instead of the
    /// built-in one.
    #[arg(long, value_delimiter = ',')]
    vocab_sizes: Vec<usize>,
    #[arg(long, value_delimiter = ',')]
    hidden: Vec<usize>,
    #[arg(long, default_value_t = 4)]
    bytes_per_param: usize,
}

#[derive(Args)]
struct InitArgs {
    /// Vocabulary size; defaults to the size of --vocab.
    #[arg(long)]
    vocab_size: Option<usize>,
    #[arg(long)]
    vocab: Option<PathBuf>,
    #[arg(long, default_value_t = 128)]
    hidden: usize,
    #[arg(long, default_value_t = 2)]
    layers: usize,
    #[arg(long, default_value_t = 4)]
    heads: usize,
    #[arg(long, default_value_t = 512)]
    max_context: usize,
    #[arg(long)]
    untied: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct FixturesArgs {
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Build(a) => cmd::build::run(a),
        Command::Trim(a) => cmd::trim::run(a),
        Command::Decode(a) => cmd::decode::run(a),
        Command::Eval(a) => cmd::eval::run(a),
        Command::Bench(BenchCommand::EndToEnd(a)) => cmd::bench::end_to_end(a),
        Command::Bench(BenchCommand::Scaling(a)) => cmd::bench::scaling(a),
        Command::Memory(a) => cmd::memory::run(a),
        Command::Init(a) => cmd::init::run(a),
        Command::Fixtures(a) => cmd::fixtures::run(a),
    };
    match result {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::FAILURE
        }
    }
}
