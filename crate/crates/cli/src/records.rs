//! JSON Lines records exchanged between commands.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Prompt {
    pub id: u64,
    pub text: String,
}

/// One line of a decode outputs file: either an output or an error.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum OutputRecord {
    Output {
        id: u64,
        output_ids: Vec<u32>,
        text: String,
    },
    Error {
        id: u64,
        error: String,
    },
}

pub fn read_jsonl<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>> {
    let file = File::open(path).with_context(|| format!("cannot open {}", path.display()))?;
    let mut out = Vec::new();
    for (idx, line) in BufReader::new(file).lines().enumerate() {
        let line = line.with_context(|| format!("{}: read failed", path.display()))?;
        if line.trim().is_empty() {
            continue;
        }
        let record = serde_json::from_str(&line)
            .with_context(|| format!("{}:{}: malformed record", path.display(), idx + 1))?;
        out.push(record);
    }
    Ok(out)
}

pub fn write_jsonl<T: Serialize>(path: &Path, records: &[T]) -> Result<()> {
    let file = File::create(path).with_context(|| format!("cannot create {}", path.display()))?;
    let mut w = BufWriter::new(file);
    for r in records {
        serde_json::to_writer(&mut w, r)?;
        w.write_all(b"\n")?;
    }
    w.flush()
        .with_context(|| format!("cannot write {}", path.display()))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    std::fs::write(path, text + "\n").with_context(|| format!("cannot write {}", path.display()))
}

/// Successful outputs of a decode file, in file order. Error records fail.
pub fn read_outputs(path: &Path) -> Result<Vec<(u64, Vec<u32>, String)>> {
    let mut out = Vec::new();
    for r in read_jsonl::<OutputRecord>(path)? {
        match r {
            OutputRecord::Output {
                id,
                output_ids,
                text,
            } => out.push((id, output_ids, text)),
            OutputRecord::Error { id, error } => {
                bail!(
                    "{}: prompt {id} has an error record: {error}",
                    path.display()
                )
            }
        }
    }
    Ok(out)
}
