//! `key = value` run configuration.
//!
//! One setting per line; `#` starts a comment; keys may use `-` or `_`.
//! Command-line flags override file values, which override built-in
//! defaults.

use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

use crate::error::{read_to_string, IoError, IoResult};

pub const KEYS: [&str; 8] = [
    "seed",
    "jobs",
    "strict",
    "repeats",
    "folds",
    "trees",
    "lexicon",
    "no_timestamp",
];

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FileConfig {
    path: String,
    values: BTreeMap<String, (usize, String)>,
}

impl FileConfig {
    pub fn parse(text: &str, path: &Path) -> IoResult<Self> {
        let mut values = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let n = i + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| IoError::line(path, n, "expected key = value"))?;
            let key = k.trim().replace('-', "_");
            if !KEYS.contains(&key.as_str()) {
                return Err(IoError::line(path, n, format!("unknown key \"{}\"", k.trim())));
            }
            if values.insert(key, (n, v.trim().to_string())).is_some() {
                return Err(IoError::line(path, n, format!("duplicate key \"{}\"", k.trim())));
            }
        }
        Ok(FileConfig {
            path: path.display().to_string(),
            values,
        })
    }

    pub fn read(path: &Path) -> IoResult<Self> {
        Self::parse(&read_to_string(path)?, path)
    }

    pub fn get<T: FromStr>(&self, key: &str) -> IoResult<Option<T>>
    where
        T::Err: std::fmt::Display,
    {
        match self.values.get(key) {
            None => Ok(None),
            Some((n, v)) => v
                .parse()
                .map(Some)
                .map_err(|e| IoError::line(Path::new(&self.path), *n, format!("{key}: {e}"))),
        }
    }

    pub fn get_str(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(|(_, v)| v.as_str())
    }
}

/// Flag value if given, else the config value, else `default`.
pub fn resolve<T: FromStr>(flag: Option<T>, config: &FileConfig, key: &str, default: T) -> IoResult<T>
where
    T::Err: std::fmt::Display,
{
    match flag {
        Some(v) => Ok(v),
        None => Ok(config.get(key)?.unwrap_or(default)),
    }
}
