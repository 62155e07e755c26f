//! Report envelopes, input hashing, atomic file output and console tables.

use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::Context;
use serde::Serialize;
use sha2::{Digest, Sha256};
use touchauth_core::evaluate::BoxplotStats;

use crate::config::RunConfig;

#[derive(Debug, Clone, Serialize)]
pub struct InputDigest {
    pub path: PathBuf,
    pub sha256: String,
}

/// Reads an input file and records its digest.
pub fn read_input(path: &Path, digests: &mut Vec<InputDigest>) -> anyhow::Result<Vec<u8>> {
    let raw = std::fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    digests.push(InputDigest {
        path: path.to_path_buf(),
        sha256: hex::encode(Sha256::digest(&raw)),
    });
    Ok(raw)
}

/// Every structured output: what ran, on what, and the result.
#[derive(Debug, Serialize)]
pub struct Envelope<'a, T: Serialize> {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub config: &'a RunConfig,
    pub inputs: &'a [InputDigest],
    pub result: &'a T,
}

/// Writes `bytes` to `path` through a temporary file in the same directory.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> anyhow::Result<()> {
    let dir = path
        .parent()
        .filter(|p| !p.as_os_str().is_empty())
        .unwrap_or(Path::new("."));
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)
        .with_context(|| format!("creating a temporary file in {}", dir.display()))?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path)
        .with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

/// Renders into a buffer, then writes atomically.
pub fn write_with(
    path: &Path,
    render: impl FnOnce(&mut Vec<u8>) -> touchauth_core::Result<()>,
) -> anyhow::Result<()> {
    let mut buf = Vec::new();
    render(&mut buf)?;
    write_atomic(path, &buf)
}

pub fn write_report<T: Serialize>(
    path: &Path,
    command: &'static str,
    config: &RunConfig,
    inputs: &[InputDigest],
    result: &T,
) -> anyhow::Result<()> {
    let envelope = Envelope {
        tool: "touchauth",
        version: env!("CARGO_PKG_VERSION"),
        command,
        config,
        inputs,
        result,
    };
    let mut json = serde_json::to_vec_pretty(&envelope)?;
    json.push(b'\n');
    write_atomic(path, &json)
}

/// One row per labelled distribution, as percentages.
pub fn boxplot_table(rows: &[(String, Option<&BoxplotStats>)]) -> String {
    let width = rows.iter().map(|(l, _)| l.len()).max().unwrap_or(0).max(5);
    let mut out = format!(
        "{:<width$} {:>5} {:>8} {:>8} {:>8} {:>8} {:>8} {:>8}\n",
        "", "n", "min", "q25", "median", "q75", "max", "mean"
    );
    for (label, stats) in rows {
        match stats {
            Some(s) => {
                let lo = s
                    .outliers
                    .first()
                    .copied()
                    .unwrap_or(s.lower_whisker)
                    .min(s.lower_whisker);
                let hi = s
                    .outliers
                    .last()
                    .copied()
                    .unwrap_or(s.upper_whisker)
                    .max(s.upper_whisker);
                out += &format!(
                    "{label:<width$} {:>5} {:>7.2}% {:>7.2}% {:>7.2}% {:>7.2}% {:>7.2}% {:>7.2}%\n",
                    s.n,
                    100.0 * lo,
                    100.0 * s.q25,
                    100.0 * s.median,
                    100.0 * s.q75,
                    100.0 * hi,
                    100.0 * s.mean
                );
            }
            None => out += &format!("{label:<width$} {:>5}  (no users evaluated)\n", 0),
        }
    }
    out
}
