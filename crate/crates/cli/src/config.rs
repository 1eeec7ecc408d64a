use std::fs;
use std::path::Path;
use std::str::FromStr;

use anyhow::{anyhow, Context, Result};

/// Defaults read from a `key = value` file; command-line flags take precedence.
#[derive(Debug, Default)]
pub struct Config(toml::Table);

impl Config {
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        let table = text
            .parse::<toml::Table>()
            .with_context(|| format!("parsing config {}", path.display()))?;
        Ok(Self(table))
    }

    /// The flag value if given, else the config value for `key`.
    pub fn pick<T>(&self, flag: Option<T>, key: &str) -> Result<Option<T>>
    where
        T: FromStr,
        T::Err: std::fmt::Display,
    {
        if flag.is_some() {
            return Ok(flag);
        }
        let Some(value) = self
            .0
            .get(key)
            .or_else(|| self.0.get(&key.replace('-', "_")))
        else {
            return Ok(None);
        };
        let text = match value {
            toml::Value::String(s) => s.clone(),
            toml::Value::Integer(i) => i.to_string(),
            toml::Value::Float(f) => f.to_string(),
            toml::Value::Boolean(b) => b.to_string(),
            other => return Err(anyhow!("config key {key}: unsupported value {other}")),
        };
        text.parse::<T>()
            .map(Some)
            .map_err(|e| anyhow!("config key {key}: {e}"))
    }

    pub fn pick_or<T>(&self, flag: Option<T>, key: &str, default: T) -> Result<T>
    where
        T: FromStr,
        T::Err: std::fmt::Display,
    {
        Ok(self.pick(flag, key)?.unwrap_or(default))
    }
}
