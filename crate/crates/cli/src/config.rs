//! Flat `key = value` config files and flag/file/default resolution.
//!
//! ```text
//! # experiment grid
//! n = 64,128,256
//! t = 2
//! seeds = 10
//! algorithm = greedy
//! ```
//!
//! Keys use the long flag name with `-` or `_`. Blank lines and `#` comments
//! are ignored. A flag given on the command line always wins over the file.

use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

use crate::error::{read_file, CliError, Result};

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ConfigFile {
    entries: BTreeMap<String, String>,
}

fn normalize(key: &str) -> String {
    key.trim().replace('-', "_")
}

impl ConfigFile {
    pub fn parse(text: &str) -> std::result::Result<Self, String> {
        let mut entries = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| format!("line {}: expected key = value", i + 1))?;
            let key = normalize(k);
            if key.is_empty() {
                return Err(format!("line {}: empty key", i + 1));
            }
            if entries.insert(key.clone(), v.trim().to_string()).is_some() {
                return Err(format!("line {}: duplicate key {key}", i + 1));
            }
        }
        Ok(ConfigFile { entries })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = read_file(path)?;
        Self::parse(&text).map_err(|message| CliError::Malformed {
            path: path.to_path_buf(),
            message,
        })
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.entries.get(&normalize(key)).map(String::as_str)
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    pub fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>>
    where
        T::Err: std::fmt::Display,
    {
        self.raw(key)
            .map(|v| {
                v.parse::<T>()
                    .map_err(|e| CliError::Usage(format!("config key {key}: {e}")))
            })
            .transpose()
    }

    /// Comma-separated list value.
    pub fn get_list<T: FromStr>(&self, key: &str) -> Result<Option<Vec<T>>>
    where
        T::Err: std::fmt::Display,
    {
        self.raw(key).map(|v| parse_list(key, v)).transpose()
    }

    /// Fails on keys outside `known`, so typos do not pass silently.
    pub fn ensure_known(&self, known: &[&str]) -> Result<()> {
        match self.keys().find(|k| !known.contains(k)) {
            Some(k) => Err(CliError::Usage(format!("unknown config key {k}"))),
            None => Ok(()),
        }
    }
}

pub fn parse_list<T: FromStr>(key: &str, v: &str) -> Result<Vec<T>>
where
    T::Err: std::fmt::Display,
{
    v.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse::<T>()
                .map_err(|e| CliError::Usage(format!("{key}: {s}: {e}")))
        })
        .collect()
}

/// Flag, then file, then default.
pub fn resolve<T: FromStr>(flag: Option<T>, file: &ConfigFile, key: &str, default: T) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    Ok(match flag {
        Some(v) => v,
        None => file.get(key)?.unwrap_or(default),
    })
}

/// Like [`resolve`] but without a default.
pub fn resolve_opt<T: FromStr>(flag: Option<T>, file: &ConfigFile, key: &str) -> Result<Option<T>>
where
    T::Err: std::fmt::Display,
{
    match flag {
        Some(v) => Ok(Some(v)),
        None => file.get(key),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_comments_and_dashes() {
        let c = ConfigFile::parse("# grid\nn = 64, 128\nbandwidth-multiplier=3 # inline\n\n").unwrap();
        assert_eq!(c.get_list::<usize>("n").unwrap(), Some(vec![64, 128]));
        assert_eq!(c.get::<u32>("bandwidth_multiplier").unwrap(), Some(3));
        assert!(c.ensure_known(&["n"]).is_err());
    }

    #[test]
    fn rejects_duplicates_and_garbage() {
        assert!(ConfigFile::parse("n=1\nn=2").is_err());
        assert!(ConfigFile::parse("just words").is_err());
    }

    #[test]
    fn precedence() {
        let c = ConfigFile::parse("t = 3").unwrap();
        assert_eq!(resolve(Some(4u32), &c, "t", 2).unwrap(), 4);
        assert_eq!(resolve(None, &c, "t", 2).unwrap(), 3);
        assert_eq!(resolve(None, &ConfigFile::default(), "t", 2).unwrap(), 2);
        assert!(resolve::<u32>(None, &ConfigFile::parse("t = x").unwrap(), "t", 2).is_err());
    }
}
