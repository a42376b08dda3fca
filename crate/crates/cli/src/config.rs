//! `key = value` settings files merged with command-line overrides.

use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

use crate::error::CliError;

/// Keys accepted by one subcommand, with values as raw text until read.
#[derive(Debug, Clone)]
pub struct Settings {
    allowed: &'static [&'static str],
    values: BTreeMap<String, String>,
}

fn normalise(key: &str) -> String {
    key.trim().replace('-', "_")
}

impl Settings {
    pub fn new(allowed: &'static [&'static str]) -> Self {
        Settings { allowed, values: BTreeMap::new() }
    }

    /// Parses settings text. Blank lines and `#` comments are skipped.
    pub fn parse_into(&mut self, text: &str, origin: &str) -> Result<(), CliError> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((k, v)) = line.split_once('=') else {
                return Err(CliError::Usage(format!("{origin}:{}: expected `key = value`", i + 1)));
            };
            self.set(k, v.trim()).map_err(|e| CliError::Usage(format!("{origin}:{}: {e}", i + 1)))?;
        }
        Ok(())
    }

    pub fn load(&mut self, path: &Path) -> Result<(), CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        self.parse_into(&text, &path.display().to_string())
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<(), CliError> {
        let key = normalise(key);
        if !self.allowed.contains(&key.as_str()) {
            return Err(CliError::Usage(format!("unknown key `{key}`; expected one of {}", self.allowed.join(", "))));
        }
        self.values.insert(key, value.to_string());
        Ok(())
    }

    /// Applies flag values that were given, on top of whatever the file set.
    pub fn override_with<'a>(&mut self, flags: impl IntoIterator<Item = (&'a str, Option<&'a String>)>) -> Result<(), CliError> {
        for (k, v) in flags {
            if let Some(v) = v {
                self.set(k, v)?;
            }
        }
        Ok(())
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    pub fn get<T: FromStr>(&self, key: &str, default: T) -> Result<T, CliError>
    where
        T::Err: std::fmt::Display,
    {
        match self.raw(key) {
            None => Ok(default),
            Some(v) => v.parse().map_err(|e| CliError::Usage(format!("bad value `{v}` for `{key}`: {e}"))),
        }
    }

    pub fn get_opt<T: FromStr>(&self, key: &str) -> Result<Option<T>, CliError>
    where
        T::Err: std::fmt::Display,
    {
        match self.raw(key) {
            None | Some("") => Ok(None),
            Some(v) => v.parse().map(Some).map_err(|e| CliError::Usage(format!("bad value `{v}` for `{key}`: {e}"))),
        }
    }

    /// Comma-separated list.
    pub fn get_list<T: FromStr>(&self, key: &str, default: Vec<T>) -> Result<Vec<T>, CliError>
    where
        T::Err: std::fmt::Display,
    {
        match self.raw(key) {
            None => Ok(default),
            Some(v) => v
                .split(',')
                .map(str::trim)
                .filter(|s| !s.is_empty())
                .map(|s| s.parse().map_err(|e| CliError::Usage(format!("bad entry `{s}` in `{key}`: {e}"))))
                .collect(),
        }
    }

    pub fn get_bool(&self, key: &str, default: bool) -> Result<bool, CliError> {
        match self.raw(key) {
            None => Ok(default),
            Some("true" | "yes" | "1" | "on") => Ok(true),
            Some("false" | "no" | "0" | "off") => Ok(false),
            Some(v) => Err(CliError::Usage(format!("bad value `{v}` for `{key}`: expected true or false"))),
        }
    }
}

pub fn check(cond: bool, msg: impl Into<String>) -> Result<(), CliError> {
    if cond {
        Ok(())
    } else {
        Err(CliError::Usage(msg.into()))
    }
}
