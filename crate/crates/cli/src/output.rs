use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use kerrjunction::Error;

use crate::config::RunConfig;

/// `#`-prefixed header naming the tool, subcommand and every input.
pub fn provenance(command: &str, cfg: &RunConfig) -> String {
    let mut s = String::new();
    writeln!(s, "# kerrjunction {} {command}", env!("CARGO_PKG_VERSION")).unwrap();
    writeln!(s, "# model: {}", serde_json::to_string(&cfg.model).unwrap()).unwrap();
    writeln!(s, "# controls: {}", serde_json::to_string(&cfg.controls).unwrap()).unwrap();
    s
}

pub struct Table {
    text: String,
}

impl Table {
    pub fn new(provenance: &str, extra: &[String], columns: &str) -> Self {
        let mut text = provenance.to_string();
        for line in extra {
            writeln!(text, "# {line}").unwrap();
        }
        writeln!(text, "{columns}").unwrap();
        Self { text }
    }

    pub fn row(&mut self, values: &[f64]) {
        let cells: Vec<String> = values.iter().map(|v| v.to_string()).collect();
        writeln!(self.text, "{}", cells.join(",")).unwrap();
    }

    pub fn write(&self, dir: &Path, name: &str) -> Result<PathBuf, Error> {
        write_file(dir, name, self.text.as_bytes())
    }
}

pub fn write_file(dir: &Path, name: &str, bytes: &[u8]) -> Result<PathBuf, Error> {
    let path = dir.join(name);
    std::fs::write(&path, bytes).map_err(|e| with_path(e, &path))?;
    Ok(path)
}

pub fn with_path(e: std::io::Error, path: &Path) -> Error {
    Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display())))
}
