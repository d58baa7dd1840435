//! The run store: one directory per run holding CSVs, JSON and figures.

use std::io::Write;
use std::path::{Path, PathBuf};

use macrosim::RunResult;
use serde::Serialize;

use crate::manifest::Manifest;
use crate::report::{self, Report};
use crate::CliError;

/// `<root>/<UTC timestamp>-<first 12 hex chars of the config hash>`, with a
/// numeric suffix if that directory already exists.
pub fn new_run_dir(root: &Path, config_hash: &str) -> Result<PathBuf, CliError> {
    let stamp = chrono::Utc::now().format("%Y%m%dT%H%M%SZ");
    let base = format!("{stamp}-{}", &config_hash[..12.min(config_hash.len())]);
    let mut dir = root.join(&base);
    let mut n = 1;
    while dir.exists() {
        n += 1;
        dir = root.join(format!("{base}-{n}"));
    }
    std::fs::create_dir_all(&dir)?;
    Ok(dir)
}

pub fn write_csv<T: Serialize>(path: &Path, rows: &[T]) -> Result<(), CliError> {
    let mut w = csv::Writer::from_path(path)?;
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    std::fs::write(path, text)?;
    Ok(())
}

/// Writes every artifact of a finished run into `dir` (created if needed).
pub fn write_run(dir: &Path, result: &RunResult, manifest: &Manifest) -> Result<Report, CliError> {
    std::fs::create_dir_all(dir)?;
    write_csv(&dir.join("months.csv"), &result.months)?;
    write_csv(&dir.join("agents.csv"), &result.agents)?;
    write_json(&dir.join("manifest.json"), manifest)?;
    let report = report::build_report(&result.months)?;
    write_json(&dir.join("report.json"), &report)?;
    if let Some(dump) = &result.memory_dump {
        std::fs::write(dir.join("memory.jsonl"), dump)?;
    }
    if !result.transcripts.is_empty() {
        let mut f = std::io::BufWriter::new(std::fs::File::create(dir.join("transcripts.jsonl"))?);
        for t in &result.transcripts {
            serde_json::to_writer(&mut f, t)?;
            f.write_all(b"\n")?;
        }
        f.flush()?;
    }
    if result.config.output.charts {
        report::write_charts(dir, &result.months, &report)?;
    }
    Ok(report)
}
