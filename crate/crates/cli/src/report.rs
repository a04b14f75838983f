//! `report`: CSV tables for every stored record, without re-running anything.

use std::fs;
use std::path::{Path, PathBuf};

use serde_json::json;

use bellmzi_core::store;

use crate::tables::tables;
use crate::{CliError, CliResult};

/// All `*.json` files below `dir`, sorted, skipping `exclude`.
fn record_files(dir: &Path, exclude: &Path, out: &mut Vec<PathBuf>) -> CliResult<()> {
    let entries = fs::read_dir(dir).map_err(CliError::io(dir))?;
    for entry in entries {
        let path = entry.map_err(CliError::io(dir))?.path();
        if path == exclude {
            continue;
        }
        if path.is_dir() {
            record_files(&path, exclude, out)?;
        } else if path.extension().is_some_and(|e| e == "json") {
            out.push(path);
        }
    }
    out.sort();
    Ok(())
}

pub fn run(input: &Path, out: Option<PathBuf>) -> CliResult<()> {
    if !input.is_dir() {
        return Err(CliError::Usage(format!("{} is not a directory", input.display())));
    }
    let out = out.unwrap_or_else(|| input.join("report"));
    let mut files = Vec::new();
    record_files(input, &out, &mut files)?;
    let mut written = Vec::new();
    let mut unreadable = Vec::new();
    for file in &files {
        let record = match store::load(file) {
            Ok(r) => r,
            Err(e) => {
                eprintln!("skipping {}: {e}", file.display());
                unreadable.push(file.display().to_string());
                continue;
            }
        };
        let stem = file.file_stem().unwrap_or_default().to_string_lossy();
        for table in tables(&record) {
            let path = out.join(format!("{}_{stem}_{}.csv", record.kind.name(), table.name));
            table.write(&path)?;
            println!("{}", path.display());
            written.push(path.display().to_string());
        }
    }
    println!(
        "{}",
        json!({"command": "report", "records": files.len(), "tables": written.len(), "unreadable": unreadable})
    );
    if unreadable.is_empty() {
        Ok(())
    } else {
        Err(CliError::Validation(format!("{} unreadable record(s)", unreadable.len())))
    }
}
