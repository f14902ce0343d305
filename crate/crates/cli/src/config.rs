use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

/// Why a run did not succeed; maps onto the process exit code.
#[derive(Debug)]
pub enum CliError {
    /// Bad flags, config, inputs or a library error (exit 2).
    Usage(String),
    /// The campaign ran and failed its criterion (exit 1).
    Failed,
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Failed => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "{m}"),
            CliError::Failed => write!(f, "campaign failed"),
        }
    }
}

impl From<fdim::Error> for CliError {
    fn from(e: fdim::Error) -> Self {
        CliError::Usage(e.to_string())
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

pub fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

/// Merged `key=value` settings for one command: config file first, flags on top.
#[derive(Debug, Clone)]
pub struct Settings {
    command: String,
    values: BTreeMap<String, String>,
}

impl Settings {
    /// `valid` lists the keys the command understands; `seed` is always accepted.
    pub fn build(
        command: &str,
        valid: &[&str],
        file: Option<&Path>,
        flags: Vec<(&str, Option<String>)>,
    ) -> CliResult<Self> {
        let mut values = BTreeMap::new();
        let known = |k: &str| k == "seed" || valid.contains(&k);
        let list = || {
            let mut keys: Vec<&str> = valid.to_vec();
            keys.push("seed");
            keys.sort_unstable();
            keys.dedup();
            keys.join(", ")
        };
        if let Some(path) = file {
            let text = std::fs::read_to_string(path)
                .map_err(|e| usage(format!("cannot read config {}: {e}", path.display())))?;
            for (i, raw) in text.lines().enumerate() {
                let line = raw.trim();
                if line.is_empty() || line.starts_with('#') {
                    continue;
                }
                let (k, v) = line
                    .split_once('=')
                    .ok_or_else(|| usage(format!("config line {}: expected key=value", i + 1)))?;
                let (k, v) = (k.trim(), v.trim());
                if k == "command" {
                    if v != command {
                        return Err(usage(format!("config is for `{v}`, not `{command}`")));
                    }
                    continue;
                }
                if !known(k) {
                    return Err(usage(format!(
                        "unknown key `{k}` for {command}; valid keys: {}",
                        list()
                    )));
                }
                values.insert(k.to_string(), v.to_string());
            }
        }
        for (k, v) in flags {
            debug_assert!(known(k), "flag {k} missing from the valid keys");
            if let Some(v) = v {
                values.insert(k.to_string(), v);
            }
        }
        values.entry("seed".into()).or_insert_with(|| "0".into());
        Ok(Self {
            command: command.into(),
            values,
        })
    }

    pub fn command(&self) -> &str {
        &self.command
    }

    pub fn get<T: FromStr>(&self, key: &str) -> CliResult<Option<T>> {
        match self.values.get(key) {
            None => Ok(None),
            Some(v) => v
                .parse()
                .map(Some)
                .map_err(|_| usage(format!("invalid value `{v}` for {key}"))),
        }
    }

    pub fn get_or<T: FromStr>(&self, key: &str, default: T) -> CliResult<T> {
        Ok(self.get(key)?.unwrap_or(default))
    }

    pub fn require<T: FromStr>(&self, key: &str) -> CliResult<T> {
        self.get(key)?
            .ok_or_else(|| usage(format!("{} needs `{key}` (flag or config)", self.command)))
    }

    pub fn flag(&self, key: &str) -> CliResult<bool> {
        self.get_or(key, false)
    }

    pub fn seed(&self) -> CliResult<u64> {
        self.require("seed")
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &str)> {
        self.values.iter().map(|(k, v)| (k.as_str(), v.as_str()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    #[test]
    fn flags_override_file() {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        writeln!(f, "# campaign\ncommand=intersect\ncount = 40\nr_min=2").unwrap();
        let s = Settings::build(
            "intersect",
            &["count", "r_min"],
            Some(f.path()),
            vec![("count", Some("60".into())), ("r_min", None)],
        )
        .unwrap();
        assert_eq!(s.get::<usize>("count").unwrap(), Some(60));
        assert_eq!(s.get::<u32>("r_min").unwrap(), Some(2));
        assert_eq!(s.seed().unwrap(), 0);
    }

    #[test]
    fn unknown_key_lists_valid_ones() {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        writeln!(f, "depth=3").unwrap();
        let err = Settings::build("boxdim", &["in", "r_min"], Some(f.path()), vec![]).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("unknown key `depth`"), "{msg}");
        assert!(msg.contains("in, r_min, seed"), "{msg}");
    }

    #[test]
    fn wrong_command_and_bad_value() {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        writeln!(f, "command=motion").unwrap();
        assert!(Settings::build("intersect", &[], Some(f.path()), vec![]).is_err());
        let s = Settings::build("x", &["count"], None, vec![("count", Some("many".into()))]).unwrap();
        assert_eq!(s.get::<usize>("count").unwrap_err().exit_code(), 2);
    }
}
