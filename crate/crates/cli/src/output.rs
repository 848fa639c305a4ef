use anyhow::{Context, Result};
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::RunConfig;

pub const SCHEMA: &str = "finsler-pl/1";

/// What a command produced: a JSON result, a verdict, and optional extra files.
pub struct Report {
    pub command: &'static str,
    pub pass: bool,
    pub result: Value,
    /// (file name, contents) written next to the report when `--out` is given.
    pub files: Vec<(String, String)>,
    /// Printed instead of the JSON envelope.
    pub raw: Option<String>,
}

impl Report {
    pub fn new(command: &'static str, pass: bool, result: impl Serialize) -> Result<Self> {
        Ok(Self {
            command,
            pass,
            result: serde_json::to_value(result).context("serializing result")?,
            files: Vec::new(),
            raw: None,
        })
    }

    pub fn file(mut self, name: impl Into<String>, contents: String) -> Self {
        self.files.push((name.into(), contents));
        self
    }
}

pub fn csv_table(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    w.write_record(header).expect("csv header");
    for r in rows {
        w.write_record(&r).expect("csv row");
    }
    String::from_utf8(w.into_inner().expect("csv flush")).expect("utf-8")
}

pub fn emit(cfg: &RunConfig, report: Report) -> Result<bool> {
    let envelope = json!({
        "schema": SCHEMA,
        "command": report.command,
        "verdict": if report.pass { "pass" } else { "fail" },
        "seed": cfg.seed,
        "result": report.result,
    });
    let text = serde_json::to_string_pretty(&envelope)? + "\n";
    match &report.raw {
        Some(raw) => print!("{raw}"),
        None => print!("{text}"),
    }
    if let Some(dir) = &cfg.out {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        std::fs::write(dir.join("report.json"), &text)?;
        for (name, contents) in &report.files {
            std::fs::write(dir.join(name), contents).with_context(|| format!("writing {name}"))?;
        }
    }
    if cfg.verbose {
        eprintln!("{}: {}", report.command, if report.pass { "pass" } else { "fail" });
    }
    Ok(report.pass)
}
