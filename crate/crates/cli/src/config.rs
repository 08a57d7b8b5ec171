//! `key=value` parameter files.

use std::collections::HashMap;
use std::path::Path;
use std::str::FromStr;

use crate::error::{CliError, CliResult};

/// Parsed file contents, keyed by canonical (dashed) key.
#[derive(Debug, Default)]
pub struct ConfigValues {
    values: HashMap<String, String>,
}

impl ConfigValues {
    pub fn parse(text: &str, valid: &[&str]) -> CliResult<(Self, Vec<String>)> {
        let mut values = HashMap::new();
        let mut warnings = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| CliError::Validation(format!("config line {}: expected key=value", lineno + 1)))?;
            let key = key.trim().replace('_', "-");
            if !valid.contains(&key.as_str()) {
                return Err(CliError::Validation(format!(
                    "unknown config key '{key}'; valid keys: {}",
                    valid.join(", ")
                )));
            }
            if values.insert(key.clone(), value.trim().to_string()).is_some() {
                warnings.push(format!("config line {}: duplicate key '{key}', last value wins", lineno + 1));
            }
        }
        Ok((Self { values }, warnings))
    }

    pub fn get<T: FromStr>(&self, key: &str) -> CliResult<Option<T>> {
        self.values
            .get(key)
            .map(|v| v.parse::<T>().map_err(|_| CliError::Validation(format!("config key '{key}': cannot parse '{v}'"))))
            .transpose()
    }
}

/// Reads `path` if given, printing duplicate-key warnings to stderr.
pub fn load_config(path: Option<&Path>, valid: &[&str]) -> CliResult<ConfigValues> {
    let Some(path) = path else {
        return Ok(ConfigValues::default());
    };
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Read { path: path.into(), source })?;
    let (values, warnings) = ConfigValues::parse(&text, valid)?;
    for w in warnings {
        eprintln!("warning: {w}");
    }
    Ok(values)
}

/// Flag value if given, else file value, else `default`.
pub fn pick<T: FromStr>(flag: Option<T>, file: &ConfigValues, key: &str, default: T) -> CliResult<T> {
    match flag {
        Some(v) => Ok(v),
        None => Ok(file.get(key)?.unwrap_or(default)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const KEYS: &[&str] = &["d", "delta", "t-max"];

    #[test]
    fn comments_and_underscores() {
        let (c, w) = ConfigValues::parse("# header\nd = 1e-4 # inline\n\nt_max=2\n", KEYS).unwrap();
        assert!(w.is_empty());
        assert_eq!(c.get::<f64>("d").unwrap(), Some(1e-4));
        assert_eq!(c.get::<f64>("t-max").unwrap(), Some(2.0));
        assert_eq!(c.get::<f64>("delta").unwrap(), None);
    }

    #[test]
    fn duplicate_key_last_wins_with_warning() {
        let (c, w) = ConfigValues::parse("d=1\nd=2\n", KEYS).unwrap();
        assert_eq!(c.get::<f64>("d").unwrap(), Some(2.0));
        assert_eq!(w.len(), 1);
    }

    #[test]
    fn unknown_key_lists_valid_keys() {
        let err = ConfigValues::parse("dd=1\n", KEYS).unwrap_err();
        assert_eq!(err.exit_code(), 2);
        assert!(err.to_string().contains("d, delta, t-max"));
    }

    #[test]
    fn flag_beats_file() {
        let (c, _) = ConfigValues::parse("d=1\ndelta=0.5", KEYS).unwrap();
        assert_eq!(pick(Some(3.0), &c, "d", 0.0).unwrap(), 3.0);
        assert_eq!(pick(None, &c, "delta", 0.0).unwrap(), 0.5);
        assert_eq!(pick(None, &c, "t-max", 4.0).unwrap(), 4.0);
    }

    #[test]
    fn bad_value_is_a_validation_error() {
        let (c, _) = ConfigValues::parse("d=abc", KEYS).unwrap();
        assert_eq!(c.get::<f64>("d").unwrap_err().exit_code(), 2);
    }
}
