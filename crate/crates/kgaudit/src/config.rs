//! `key = value` configuration files. Every key mirrors a command-line flag;
//! flags given on the command line take precedence.

use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::io::read_text;

pub const KNOWN_KEYS: &[&str] = &[
    "budget",
    "k",
    "kernels",
    "theta",
    "seed",
    "format",
    "full",
    "average-prolific",
    "sigma",
    "tau",
    "prolific-multiplier",
    "subsumption-predicate",
    "similarity",
    "rate",
    "kinds",
    "per-type",
    "fraction",
    "dim",
    "margin",
    "epochs",
    "learning-rate",
    "test-fraction",
];

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ConfigFile {
    values: BTreeMap<String, String>,
}

impl ConfigFile {
    pub fn parse(text: &str, origin: &Path) -> Result<Self> {
        let mut values = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |message: String| Error::Parse {
                path: origin.to_path_buf(),
                line: i + 1,
                message,
            };
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| err(format!("expected key = value, got {line:?}")))?;
            let key = key.trim().to_ascii_lowercase().replace('_', "-");
            if !KNOWN_KEYS.contains(&key.as_str()) {
                return Err(err(format!("unknown key {key:?}")));
            }
            values.insert(key, value.trim().to_string());
        }
        Ok(ConfigFile { values })
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&read_text(path)?, path)
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    pub fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>>
    where
        T::Err: std::fmt::Display,
    {
        match self.raw(key) {
            None => Ok(None),
            Some(v) => v
                .parse()
                .map(Some)
                .map_err(|e| Error::Usage(format!("config key {key}: {e}"))),
        }
    }

    /// Command-line value, else file value, else `default`.
    pub fn resolve<T: FromStr>(&self, flag: Option<T>, key: &str, default: T) -> Result<T>
    where
        T::Err: std::fmt::Display,
    {
        match flag {
            Some(v) => Ok(v),
            None => Ok(self.get(key)?.unwrap_or(default)),
        }
    }

    pub fn flag(&self, set_on_command_line: bool, key: &str) -> Result<bool> {
        Ok(set_on_command_line || self.get::<bool>(key)?.unwrap_or(false))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_file() {
        let cfg = ConfigFile::parse("budget = 50 # inspect fifty\n\ntheta=0.4\n", Path::new("c"))
            .unwrap();
        assert_eq!(cfg.resolve(None, "budget", 100usize).unwrap(), 50);
        assert_eq!(cfg.resolve(Some(7), "budget", 100usize).unwrap(), 7);
        assert_eq!(cfg.resolve(None, "seed", 3u64).unwrap(), 3);
        assert_eq!(cfg.resolve(None, "theta", 0.5f64).unwrap(), 0.4);
    }

    #[test]
    fn rejects_unknown_and_malformed() {
        assert!(matches!(
            ConfigFile::parse("bugdet = 3", Path::new("c")),
            Err(Error::Parse { line: 1, .. })
        ));
        assert!(ConfigFile::parse("budget", Path::new("c")).is_err());
        let cfg = ConfigFile::parse("budget = many", Path::new("c")).unwrap();
        assert!(cfg.resolve(None, "budget", 1usize).is_err());
    }
}
