//! Run configuration: an optional plain-text `key = value` file plus the
//! precedence rules between it and explicit flags.
//!
//! Every long flag can also be given in a config file under the same name
//! (`h = 0.2,0.1` for `--h 0.2,0.1`). Explicit flags win over file entries,
//! which win over built-in defaults. The output directory additionally
//! honors the `CORNERHODGE_OUT_DIR` environment variable, which sits
//! between the flag and the file.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

/// Keys accepted in a config file, shared across subcommands so a single
/// file can drive `all`. Unknown keys are rejected to surface typos.
const KNOWN_KEYS: &[&str] = &[
    "alpha-series",
    "bc",
    "beta",
    "count",
    "degree",
    "domain",
    "eps-series",
    "expect-kernel",
    "expected-index",
    "grading",
    "h",
    "notch-size",
    "num-eigenvalues",
    "out-dir",
    "pentagon-circumradius",
    "quad-points",
    "radius",
    "rho",
    "scale",
    "schedule-alphas",
    "seed",
    "structured",
    "theta",
    "tol",
    "triangle-side",
];

/// A run failure that is not a verdict: either bad usage/configuration or
/// an error propagated from the verification modules. Both exit with
/// status 1; verdicts use 0/2/3.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Run(cornerhodge::Error),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(msg) => write!(f, "{msg}"),
            CliError::Run(err) => write!(f, "{err}"),
        }
    }
}

impl From<cornerhodge::Error> for CliError {
    fn from(err: cornerhodge::Error) -> Self {
        CliError::Run(err)
    }
}

/// Parsed `key = value` file contents.
#[derive(Debug, Default)]
pub struct FileConfig {
    entries: BTreeMap<String, String>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<FileConfig, CliError> {
        let text = fs::read_to_string(path).map_err(|e| {
            CliError::Usage(format!("cannot read config {}: {e}", path.display()))
        })?;
        let mut entries = BTreeMap::new();
        for (ln, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(CliError::Usage(format!(
                    "{}:{}: expected `key = value`, got `{raw}`",
                    path.display(),
                    ln + 1
                )));
            };
            let key = key.trim().to_string();
            if !KNOWN_KEYS.contains(&key.as_str()) {
                return Err(CliError::Usage(format!(
                    "{}:{}: unknown key `{key}`",
                    path.display(),
                    ln + 1
                )));
            }
            entries.insert(key, value.trim().to_string());
        }
        Ok(FileConfig { entries })
    }

    fn raw(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(String::as_str)
    }

    pub fn out_dir(&self) -> Option<PathBuf> {
        self.raw("out-dir").map(PathBuf::from)
    }
}

/// Comma-separated floats, e.g. `0.2,0.1,0.05`.
pub fn parse_f64_list(text: &str) -> Result<Vec<f64>, String> {
    let values: Vec<f64> = text
        .split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<f64>().map_err(|_| format!("`{t}` is not a number")))
        .collect::<Result<_, _>>()?;
    if values.is_empty() {
        return Err("empty list".to_string());
    }
    Ok(values)
}

/// Resolved run context: the config file (possibly empty) and the output
/// directory every artifact lands in.
pub struct Ctx {
    pub file: FileConfig,
    pub out_dir: PathBuf,
}

impl Ctx {
    pub fn out_path(&self, name: &str) -> PathBuf {
        self.out_dir.join(name)
    }

    /// A float list from the flag, then the file, then the default.
    pub fn list(&self, flag: Option<&str>, key: &str, default: &[f64]) -> Result<Vec<f64>, CliError> {
        match flag.or_else(|| self.file.raw(key)) {
            Some(text) => {
                parse_f64_list(text).map_err(|e| CliError::Usage(format!("{key}: {e}")))
            }
            None => Ok(default.to_vec()),
        }
    }

    /// A scalar from the flag, then the file, then the default.
    pub fn scalar<T: FromStr + Copy>(
        &self,
        flag: Option<T>,
        key: &str,
        default: T,
    ) -> Result<T, CliError> {
        if let Some(v) = flag {
            return Ok(v);
        }
        match self.file.raw(key) {
            Some(text) => text
                .parse::<T>()
                .map_err(|_| CliError::Usage(format!("{key}: cannot parse `{text}`"))),
            None => Ok(default),
        }
    }

    /// Like [`Ctx::scalar`] but with no default.
    pub fn scalar_opt<T: FromStr + Copy>(
        &self,
        flag: Option<T>,
        key: &str,
    ) -> Result<Option<T>, CliError> {
        if flag.is_some() {
            return Ok(flag);
        }
        match self.file.raw(key) {
            Some(text) => text
                .parse::<T>()
                .map(Some)
                .map_err(|_| CliError::Usage(format!("{key}: cannot parse `{text}`"))),
            None => Ok(None),
        }
    }

    pub fn string(&self, flag: Option<&str>, key: &str, default: &str) -> String {
        flag.or_else(|| self.file.raw(key)).unwrap_or(default).to_string()
    }

    /// Like [`Ctx::string`] but with no default: `None` when neither the
    /// flag nor the file provides the key.
    pub fn string_opt(&self, flag: Option<&str>, key: &str) -> Option<String> {
        flag.or_else(|| self.file.raw(key)).map(str::to_string)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn list_parsing_accepts_spaces_and_rejects_junk() {
        assert_eq!(parse_f64_list("0.2, 0.1 ,0.05").unwrap(), vec![0.2, 0.1, 0.05]);
        assert!(parse_f64_list("0.2,abc").is_err());
        assert!(parse_f64_list(" , ").is_err());
    }

    #[test]
    fn flags_win_over_file_entries() {
        let dir = std::env::temp_dir().join(format!("cornerhodge-cfg-{}", std::process::id()));
        fs::create_dir_all(&dir).unwrap();
        let path = dir.join("run.conf");
        fs::write(&path, "# comment\nh = 0.4\nseed = 7\n").unwrap();
        let ctx = Ctx { file: FileConfig::load(&path).unwrap(), out_dir: dir.clone() };
        assert_eq!(ctx.list(Some("0.2,0.1"), "h", &[1.0]).unwrap(), vec![0.2, 0.1]);
        assert_eq!(ctx.list(None, "h", &[1.0]).unwrap(), vec![0.4]);
        assert_eq!(ctx.scalar(None, "seed", 0u64).unwrap(), 7);
        assert_eq!(ctx.scalar(Some(3u64), "seed", 0).unwrap(), 3);
        fs::remove_dir_all(&dir).ok();
    }

    #[test]
    fn unknown_keys_are_rejected_with_the_line_number() {
        let dir = std::env::temp_dir().join(format!("cornerhodge-cfg2-{}", std::process::id()));
        fs::create_dir_all(&dir).unwrap();
        let path = dir.join("bad.conf");
        fs::write(&path, "h = 0.4\nhh = 1\n").unwrap();
        let err = FileConfig::load(&path).unwrap_err();
        assert!(matches!(err, CliError::Usage(ref m) if m.contains(":2") && m.contains("hh")));
        fs::remove_dir_all(&dir).ok();
    }
}
