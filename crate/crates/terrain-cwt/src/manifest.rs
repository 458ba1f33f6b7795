//! Plain-text `key=value` run manifests.
//!
//! The first line names the command. Every other key is the long name of a
//! command-line flag, so [`Manifest::to_args`] rebuilds an invocation that
//! reproduces the run. `true`/`false` values stand for switches.

use std::fmt;
use std::path::Path;

use crate::atomic::write_atomic;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Manifest {
    command: String,
    entries: Vec<(String, String)>,
}

impl Manifest {
    pub fn new(command: &str) -> Self {
        Self {
            command: command.to_string(),
            entries: Vec::new(),
        }
    }

    pub fn command(&self) -> &str {
        &self.command
    }

    pub fn entries(&self) -> &[(String, String)] {
        &self.entries
    }

    pub fn set(&mut self, key: &str, value: impl fmt::Display) -> &mut Self {
        let value = value.to_string();
        match self.entries.iter_mut().find(|(k, _)| k == key) {
            Some(entry) => entry.1 = value,
            None => self.entries.push((key.to_string(), value)),
        }
        self
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    /// Command-line arguments (without the program name) for this run.
    pub fn to_args(&self) -> Vec<String> {
        let mut args = vec![self.command.clone()];
        for (key, value) in &self.entries {
            match value.as_str() {
                "false" => {}
                "true" => args.push(format!("--{key}")),
                _ => {
                    args.push(format!("--{key}"));
                    args.push(value.clone());
                }
            }
        }
        args
    }

    pub fn parse(text: &str) -> std::result::Result<Self, (usize, String)> {
        let mut manifest: Option<Manifest> = None;
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| (i + 1, format!("expected key=value, found `{line}`")))?;
            match manifest.as_mut() {
                None if key == "command" => manifest = Some(Manifest::new(value)),
                None => return Err((i + 1, "the first entry must be `command`".into())),
                Some(m) => {
                    m.set(key, value);
                }
            }
        }
        manifest.ok_or((1, "empty manifest".into()))
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text).map_err(|(line, message)| Error::Manifest {
            path: path.to_path_buf(),
            line,
            message,
        })
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        write_atomic(path, self.to_string().as_bytes())
    }
}

impl fmt::Display for Manifest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "command={}", self.command)?;
        for (k, v) in &self.entries {
            writeln!(f, "{k}={v}")?;
        }
        Ok(())
    }
}
