//! Flat `key = value` configuration with command-line overrides.

use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

use crate::CliError;

/// Known keys. Dashes in keys are read as underscores.
const KEYS: &[&str] = &[
    "noise", "energy", "photons", "cutoff", "out", "format", "threads", "var", "start", "stop", "points",
    "x", "order", "epsilon", "kvec", "lvec", "c_re", "c_im", "seed", "oracle",
];

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Params {
    values: BTreeMap<String, String>,
}

fn normalize(key: &str) -> String {
    key.trim().replace('-', "_")
}

impl Params {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut p = Params::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| CliError::Usage(format!("config line {}: expected key = value", i + 1)))?;
            p.set(k, v.trim())
                .map_err(|e| CliError::Usage(format!("config line {}: {e}", i + 1)))?;
        }
        Ok(p)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("reading {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn set(&mut self, key: &str, value: impl Into<String>) -> Result<(), String> {
        let key = normalize(key);
        if !KEYS.contains(&key.as_str()) {
            return Err(format!("unknown key `{key}`"));
        }
        self.values.insert(key, value.into());
        Ok(())
    }

    /// Flag values win over the config file.
    pub fn override_with(&mut self, key: &str, value: Option<impl ToString>) {
        if let Some(v) = value {
            self.values.insert(normalize(key), v.to_string());
        }
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    pub fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>, CliError> {
        self.raw(key)
            .map(|s| {
                s.parse::<T>()
                    .map_err(|_| CliError::Usage(format!("cannot parse `{s}` for `{key}`")))
            })
            .transpose()
    }

    pub fn require<T: FromStr>(&self, key: &str) -> Result<T, CliError> {
        self.get(key)?
            .ok_or_else(|| CliError::Usage(format!("missing required parameter `{key}`")))
    }

    pub fn get_or<T: FromStr>(&self, key: &str, default: T) -> Result<T, CliError> {
        Ok(self.get(key)?.unwrap_or(default))
    }

    pub fn list(&self, key: &str) -> Result<Option<Vec<usize>>, CliError> {
        self.raw(key)
            .map(|s| {
                s.split(',')
                    .map(|t| {
                        t.trim()
                            .parse::<usize>()
                            .map_err(|_| CliError::Usage(format!("cannot parse `{s}` for `{key}`")))
                    })
                    .collect()
            })
            .transpose()
    }

    pub fn flag(&self, key: &str) -> Result<bool, CliError> {
        match self.raw(key) {
            None => Ok(false),
            Some("true" | "1" | "yes") => Ok(true),
            Some("false" | "0" | "no") => Ok(false),
            Some(s) => Err(CliError::Usage(format!("cannot parse `{s}` for `{key}` as a boolean"))),
        }
    }
}
