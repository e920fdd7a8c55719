use std::fs;
use std::process::ExitCode;

use anyhow::{Context, Result};
use vocab_trim::synth::{alphabet, build_vocabulary, random_sentences, random_words};

use crate::records::{write_jsonl, Prompt};
use crate::FixturesArgs;

const LANGS: [&str; 4] = ["bg", "en", "es", "zh"];
const SPECIALS: [&str; 4] = ["<unk>", "<s>", "</s>", "<pad>"];
const WORDS_PER_LANG: usize = 150;
const PROMPTS: usize = 50;
const CORPUS_LINES: usize = 400;
// English words mixed into the other corpora.
const MIXED_WORDS: usize = 15;

pub fn run(args: FixturesArgs) -> Result<ExitCode> {
    fs::create_dir_all(&args.out)
        .with_context(|| format!("cannot create {}", args.out.display()))?;
    let words: Vec<Vec<String>> = LANGS
        .iter()
        .enumerate()
        .map(|(i, lang)| {
            let chars = alphabet(lang).expect("bundled language");
            random_words(&chars, WORDS_PER_LANG, args.seed.wrapping_add(i as u64))
        })
        .collect();
    let all: Vec<&str> = words.iter().flatten().map(String::as_str).collect();
    let (vocab, merges) = build_vocabulary(&SPECIALS, &all, None)?;
    fs::write(args.out.join("vocab.json"), vocab.to_json())?;
    fs::write(args.out.join("merges.txt"), merges.to_text())?;

    let english = &words[1];
    for (i, lang) in LANGS.iter().enumerate() {
        let seed = args.seed.wrapping_add(100 + i as u64);
        let prompts: Vec<Prompt> = random_sentences(&words[i], PROMPTS, seed)
            .into_iter()
            .enumerate()
            .map(|(id, text)| Prompt {
                id: id as u64,
                text,
            })
            .collect();
        write_jsonl(&args.out.join(format!("prompts.{lang}.jsonl")), &prompts)?;

        let mut pool = words[i].clone();
        if *lang != "en" {
            pool.extend(english.iter().take(MIXED_WORDS).cloned());
        }
        let corpus = random_sentences(&pool, CORPUS_LINES, seed.wrapping_add(1000));
        fs::write(
            args.out.join(format!("corpus.{lang}.txt")),
            corpus.join("\n") + "\n",
        )?;
    }
    println!(
        "wrote {} tokens, {} merges, {} prompts and {} corpus lines per language to {}",
        vocab.len(),
        merges.len(),
        PROMPTS,
        CORPUS_LINES,
        args.out.display()
    );
    Ok(ExitCode::SUCCESS)
}
