//! Flat `key=value` settings file. Keys are the long flag names without the
//! leading dashes; command-line flags take precedence.

use std::collections::HashMap;
use std::path::Path;
use std::str::FromStr;

use anyhow::{anyhow, bail, Context, Result};

pub const KNOWN_KEYS: &[&str] = &[
    "input",
    "out",
    "n",
    "distribution",
    "clusters",
    "sigma",
    "seed",
    "k",
    "cluster-size",
    "interval-width",
    "queries",
    "xi",
    "depth-l",
    "grid-g",
    "spatial-region",
    "mbr-pruning",
    "x-max",
    "y-max",
    "t-max",
    "x",
    "y",
    "t-start",
    "t-end",
];

#[derive(Debug, Default, Clone)]
pub struct ConfigFile {
    values: HashMap<String, String>,
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self> {
        let mut values = HashMap::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| anyhow!("config line {}: expected key=value", i + 1))?;
            let key = key.trim().trim_start_matches("--");
            if !KNOWN_KEYS.contains(&key) {
                bail!("config line {}: unknown key {key:?}", i + 1);
            }
            values.insert(key.to_string(), value.trim().to_string());
        }
        Ok(Self { values })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        Self::parse(&text)
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    /// Flag value if given, else the file's value, else `None`.
    pub fn get<T>(&self, flag: Option<T>, key: &str) -> Result<Option<T>>
    where
        T: FromStr,
        T::Err: std::fmt::Display,
    {
        match (flag, self.raw(key)) {
            (Some(v), _) => Ok(Some(v)),
            (None, Some(s)) => s.parse().map(Some).map_err(|e| anyhow!("config key {key}: {e}")),
            (None, None) => Ok(None),
        }
    }

    pub fn get_or<T>(&self, flag: Option<T>, key: &str, default: T) -> Result<T>
    where
        T: FromStr,
        T::Err: std::fmt::Display,
    {
        Ok(self.get(flag, key)?.unwrap_or(default))
    }
}

/// Comma-separated list such as `10,20,50`.
pub fn parse_list<T>(s: &str) -> Result<Vec<T>>
where
    T: FromStr,
    T::Err: std::fmt::Display,
{
    let items = s
        .split(',')
        .map(str::trim)
        .filter(|x| !x.is_empty())
        .map(|x| x.parse::<T>().map_err(|e| anyhow!("bad list item {x:?}: {e}")))
        .collect::<Result<Vec<T>>>()?;
    if items.is_empty() {
        bail!("empty list {s:?}");
    }
    Ok(items)
}
