//! Run reports and deterministic output files.

use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;
use serde_json::Value;

use crate::config::RunConfig;
use crate::error::CliError;

#[derive(Debug, Clone, Serialize)]
pub struct ErrorInfo {
    pub kind: &'static str,
    pub message: String,
}

/// Everything needed to reproduce and audit a run. Wall-clock timings go
/// to a separate file so that this one is byte-identical across reruns.
#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub command: String,
    pub version: &'static str,
    pub config: Option<RunConfig>,
    pub results: Value,
    pub warnings: Vec<String>,
    pub outputs: Vec<String>,
    pub error: Option<ErrorInfo>,
}

/// Collects warnings once each, in order of first appearance, plus the
/// files written and phase timings.
pub struct Run {
    pub out: PathBuf,
    pub warnings: Vec<String>,
    pub outputs: Vec<String>,
    phases: Vec<(String, f64)>,
    started: Instant,
}

impl Run {
    pub fn new(out: &Path) -> Self {
        Run { out: out.to_path_buf(), warnings: Vec::new(), outputs: Vec::new(), phases: Vec::new(), started: Instant::now() }
    }

    pub fn warn(&mut self, w: impl Into<String>) {
        let w = w.into();
        if !self.warnings.contains(&w) {
            self.warnings.push(w);
        }
    }

    pub fn phase<T>(&mut self, name: &str, f: impl FnOnce() -> T) -> T {
        let t0 = Instant::now();
        let r = f();
        self.phases.push((name.to_string(), t0.elapsed().as_secs_f64()));
        r
    }

    fn path(&mut self, name: &str) -> Result<PathBuf, CliError> {
        std::fs::create_dir_all(&self.out)?;
        self.outputs.push(name.to_string());
        Ok(self.out.join(name))
    }

    pub fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<(), CliError> {
        let path = self.path(name)?;
        let mut text = serde_json::to_string_pretty(value)?;
        text.push('\n');
        std::fs::write(path, text)?;
        Ok(())
    }

    pub fn write_with(&mut self, name: &str, f: impl FnOnce(&Path) -> Result<(), CliError>) -> Result<(), CliError> {
        let path = self.path(name)?;
        f(&path)
    }

    pub fn finish(mut self, command: &str, config: Option<RunConfig>, results: Value, error: Option<&CliError>) -> Result<(), CliError> {
        let timings = serde_json::json!({
            "command": command,
            "total_seconds": self.started.elapsed().as_secs_f64(),
            "phases": self.phases.iter().map(|(n, s)| serde_json::json!({"name": n, "seconds": s})).collect::<Vec<_>>(),
        });
        self.write_json("timings.json", &timings)?;
        self.outputs.push("report.json".to_string());
        let report = RunReport {
            command: command.to_string(),
            version: env!("CARGO_PKG_VERSION"),
            config,
            results,
            warnings: self.warnings.clone(),
            outputs: self.outputs.clone(),
            error: error.map(|e| ErrorInfo { kind: e.kind(), message: e.to_string() }),
        };
        let mut text = serde_json::to_string_pretty(&report)?;
        text.push('\n');
        std::fs::create_dir_all(&self.out)?;
        std::fs::write(self.out.join("report.json"), text)?;
        Ok(())
    }
}
