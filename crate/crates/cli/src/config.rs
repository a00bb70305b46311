//! Key-value configuration files; command-line flags override file entries.
//!
//! Format: one `key = value` per line, `#` comments, keys in kebab-case
//! matching the long flag names.

use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

pub struct FileConfig {
    entries: BTreeMap<String, String>,
}

impl FileConfig {
    pub fn empty() -> Self {
        FileConfig { entries: BTreeMap::new() }
    }

    pub fn load(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| format!("cannot read config file {}: {e}", path.display()))?;
        let mut entries = BTreeMap::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| format!("line {}: expected key = value", lineno + 1))?;
            entries.insert(k.trim().to_string(), v.trim().to_string());
        }
        Ok(FileConfig { entries })
    }

    /// Flag value if given, else file entry, else default.
    pub fn resolve<T: FromStr + Copy>(&self, flag: Option<T>, key: &str, default: T) -> Result<T, String>
    where
        T::Err: std::fmt::Display,
    {
        if let Some(v) = flag {
            return Ok(v);
        }
        match self.entries.get(key) {
            Some(s) => s.parse::<T>().map_err(|e| format!("config key {key}: {e}")),
            None => Ok(default),
        }
    }

    /// Comma-separated list from flag or file.
    pub fn resolve_list(
        &self,
        flag: &Option<String>,
        key: &str,
        default: &[f64],
    ) -> Result<Vec<f64>, String> {
        let text = match flag {
            Some(t) => t.clone(),
            None => match self.entries.get(key) {
                Some(t) => t.clone(),
                None => return Ok(default.to_vec()),
            },
        };
        text.split(',')
            .map(|s| {
                s.trim()
                    .parse::<f64>()
                    .map_err(|e| format!("list {key}: bad entry '{s}': {e}"))
            })
            .collect()
    }
}
