//! Flat `key = value` configuration with optional `[command]` sections.
//! Keys outside any section apply to every command; keys inside a section
//! apply only to that command and take precedence over global ones.

use std::collections::BTreeMap;
use std::fmt::Display;
use std::path::Path;
use std::str::FromStr;

use crate::UsageError;

#[derive(Debug, Default, Clone)]
pub struct Config {
    global: BTreeMap<String, String>,
    sections: BTreeMap<String, BTreeMap<String, String>>,
}

impl Config {
    pub fn parse(text: &str) -> Result<Self, UsageError> {
        let mut cfg = Config::default();
        let mut section: Option<String> = None;
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split(['#', ';']).next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
                section = Some(name.trim().to_string());
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| UsageError(format!("config line {}: expected key = value", i + 1)))?;
            let (k, v) = (k.trim().to_string(), v.trim().to_string());
            if k.is_empty() {
                return Err(UsageError(format!("config line {}: empty key", i + 1)));
            }
            match &section {
                Some(s) => cfg.sections.entry(s.clone()).or_default().insert(k, v),
                None => cfg.global.insert(k, v),
            };
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, UsageError> {
        let text = std::fs::read_to_string(path).map_err(|e| UsageError(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// View of the keys visible to one command.
    pub fn scope<'a>(&'a self, command: &str) -> Scope<'a> {
        Scope { cfg: self, command: command.to_string() }
    }
}

pub struct Scope<'a> {
    cfg: &'a Config,
    command: String,
}

impl Scope<'_> {
    fn raw(&self, key: &str) -> Option<&str> {
        self.cfg
            .sections
            .get(&self.command)
            .and_then(|s| s.get(key))
            .or_else(|| self.cfg.global.get(key))
            .map(String::as_str)
    }

    /// The flag value if given, else the config value, else None.
    pub fn opt<T>(&self, flag: Option<T>, key: &str) -> Result<Option<T>, UsageError>
    where
        T: FromStr,
        T::Err: Display,
    {
        if flag.is_some() {
            return Ok(flag);
        }
        match self.raw(key) {
            None => Ok(None),
            Some(v) => v.parse().map(Some).map_err(|e| UsageError(format!("config key {key} = {v}: {e}"))),
        }
    }

    pub fn get<T>(&self, flag: Option<T>, key: &str, default: T) -> Result<T, UsageError>
    where
        T: FromStr,
        T::Err: Display,
    {
        Ok(self.opt(flag, key)?.unwrap_or(default))
    }

    pub fn req<T>(&self, flag: Option<T>, key: &str) -> Result<T, UsageError>
    where
        T: FromStr,
        T::Err: Display,
    {
        self.opt(flag, key)?.ok_or_else(|| UsageError(format!("missing required parameter --{key}")))
    }

    /// Boolean switch: set by the flag or by `key = true` in the config.
    pub fn switch(&self, flag: bool, key: &str) -> Result<bool, UsageError> {
        Ok(flag || self.opt::<bool>(None, key)?.unwrap_or(false))
    }
}

/// Comma-separated list of numbers.
pub fn parse_list(v: &str) -> Result<Vec<f64>, UsageError> {
    v.split(',')
        .map(|s| s.trim().parse::<f64>().map_err(|e| UsageError(format!("bad number {s:?} in list: {e}"))))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sections_override_global_and_flags_override_both() {
        let cfg = Config::parse("T = 100\n# note\n[theorem21]\nT = 5000 ; inline\ny1 = 1\n").unwrap();
        let s = cfg.scope("theorem21");
        assert_eq!(s.req::<f64>(None, "T").unwrap(), 5000.0);
        assert_eq!(s.req(Some(7.0), "T").unwrap(), 7.0);
        assert_eq!(cfg.scope("sum").req::<f64>(None, "T").unwrap(), 100.0);
        assert!(cfg.scope("sum").req::<f64>(None, "y1").is_err());
    }

    #[test]
    fn malformed_lines_rejected() {
        assert!(Config::parse("just words\n").is_err());
        assert!(Config::parse("= 3\n").is_err());
        let cfg = Config::parse("x = abc\n").unwrap();
        assert!(cfg.scope("sum").opt::<u64>(None, "x").is_err());
    }

    #[test]
    fn lists() {
        assert_eq!(parse_list("1, 2.5,3e2").unwrap(), vec![1.0, 2.5, 300.0]);
        assert!(parse_list("1,,2").is_err());
    }
}
