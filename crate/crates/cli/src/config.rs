use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

use anyhow::{anyhow, bail, Context, Result};

/// Flat `key = value` settings; `#` starts a comment line.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Config {
    entries: BTreeMap<String, (usize, String)>,
}

fn norm(key: &str) -> String {
    let k = key.trim();
    match k.strip_prefix("model.") {
        Some(slot) => format!("model.{}", slot.trim()),
        None => k.replace('_', "-").to_ascii_lowercase(),
    }
}

impl Config {
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| anyhow!("config line {}: expected key = value", i + 1))?;
            if entries.insert(norm(k), (i + 1, v.trim().to_string())).is_some() {
                bail!("config line {}: `{}` set twice", i + 1, k.trim());
            }
        }
        Ok(Self { entries })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Self::parse(&text).with_context(|| format!("in {}", path.display()))
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.entries.get(&norm(key)).map(|(_, v)| v.as_str())
    }

    /// Command-line value if given, else the config value parsed as `T`.
    pub fn pick<T>(&self, cli: Option<T>, key: &str) -> Result<Option<T>>
    where
        T: FromStr,
        T::Err: std::fmt::Display,
    {
        if cli.is_some() {
            return Ok(cli);
        }
        self.entries
            .get(&norm(key))
            .map(|(line, v)| v.parse::<T>().map_err(|e| anyhow!("config line {line}: `{key}`: {e}")))
            .transpose()
    }

    pub fn flag(&self, cli: bool, key: &str) -> Result<bool> {
        Ok(cli || self.pick::<bool>(None, key)?.unwrap_or(false))
    }

    /// `model.<slot> = <family>[…] …` entries as spec strings.
    pub fn models(&self) -> Vec<String> {
        self.entries
            .iter()
            .filter_map(|(k, v)| k.strip_prefix("model.").map(|s| format!("{s}={}", v.1)))
            .collect()
    }
}
