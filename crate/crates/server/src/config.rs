//! Service configuration: a flat `key = value` file, overridden by
//! `ONTOHUB_*` environment variables.

use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::time::Duration;

use ontohub_core::registry::DEFAULT_BASE_IRI;
use ontohub_core::validator::{DEFAULT_PAGE_SIZE, DEFAULT_TIMEOUT};
use ontohub_core::Iri;
use thiserror::Error;

pub const ENV_PREFIX: &str = "ONTOHUB_";

/// Recognised keys, in file spelling. The environment form is upper case
/// with `_` for `-`, behind [`ENV_PREFIX`].
pub const KEYS: [&str; 6] = [
    "store-root",
    "archive-root",
    "base-iri",
    "listen-address",
    "default-timeout",
    "page-size",
];

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config file {}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{}:{line}: {message}", path.display())]
    Syntax {
        path: PathBuf,
        line: usize,
        message: String,
    },
    #[error("invalid {key}: {message}")]
    Invalid { key: String, message: String },
}

impl ConfigError {
    pub fn code(&self) -> &'static str {
        match self {
            ConfigError::Io { .. } => "io-error",
            ConfigError::Syntax { .. } | ConfigError::Invalid { .. } => "invalid-config",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ServiceConfig {
    pub store_root: PathBuf,
    pub archive_root: PathBuf,
    pub base_iri: String,
    pub listen_address: SocketAddr,
    pub default_timeout: Duration,
    pub page_size: usize,
}

impl Default for ServiceConfig {
    fn default() -> Self {
        ServiceConfig {
            store_root: PathBuf::from("ontohub-data/store"),
            archive_root: PathBuf::from("ontohub-data/archive"),
            base_iri: DEFAULT_BASE_IRI.to_owned(),
            listen_address: SocketAddr::from(([127, 0, 0, 1], 8080)),
            default_timeout: DEFAULT_TIMEOUT,
            page_size: DEFAULT_PAGE_SIZE,
        }
    }
}

/// `30`, `30s`, `500ms` or `2m`.
pub fn parse_duration(text: &str) -> Result<Duration, String> {
    let text = text.trim();
    let (digits, unit) = match text.find(|c: char| !c.is_ascii_digit()) {
        Some(i) => text.split_at(i),
        None => (text, "s"),
    };
    let n: u64 = digits
        .parse()
        .map_err(|_| format!("expected a duration, got {text:?}"))?;
    match unit.trim() {
        "ms" => Ok(Duration::from_millis(n)),
        "s" => Ok(Duration::from_secs(n)),
        "m" => Ok(Duration::from_secs(n * 60)),
        _ => Err(format!("unknown duration unit in {text:?}")),
    }
}

impl ServiceConfig {
    /// Defaults, then the file (if any), then the environment.
    pub fn load(
        file: Option<&Path>,
        env: impl IntoIterator<Item = (String, String)>,
    ) -> Result<ServiceConfig, ConfigError> {
        let mut config = ServiceConfig::default();
        if let Some(path) = file {
            let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
                path: path.to_path_buf(),
                source,
            })?;
            let dir = path.parent().unwrap_or(Path::new(""));
            config.apply_file(path, dir, &text)?;
        }
        for (name, value) in env {
            let Some(rest) = name.strip_prefix(ENV_PREFIX) else {
                continue;
            };
            let key = rest.to_ascii_lowercase().replace('_', "-");
            if KEYS.contains(&key.as_str()) {
                config.set(&key, &value, Path::new(""))?;
            }
        }
        config.check()?;
        Ok(config)
    }

    fn apply_file(&mut self, path: &Path, dir: &Path, text: &str) -> Result<(), ConfigError> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let syntax = |message: String| ConfigError::Syntax {
                path: path.to_path_buf(),
                line: i + 1,
                message,
            };
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| syntax(format!("expected key = value, got {line:?}")))?;
            let key = key.trim().replace('_', "-");
            if !KEYS.contains(&key.as_str()) {
                return Err(syntax(format!("unknown key {key:?}")));
            }
            self.set(&key, value.trim(), dir)?;
        }
        Ok(())
    }

    /// Relative paths resolve against `dir`.
    pub fn set(&mut self, key: &str, value: &str, dir: &Path) -> Result<(), ConfigError> {
        let invalid = |message: String| ConfigError::Invalid {
            key: key.to_owned(),
            message,
        };
        match key {
            "store-root" => self.store_root = dir.join(value),
            "archive-root" => self.archive_root = dir.join(value),
            "base-iri" => self.base_iri = value.trim_end_matches('/').to_owned(),
            "listen-address" => self.listen_address = value.parse().map_err(|e| invalid(format!("{value:?}: {e}")))?,
            "default-timeout" => self.default_timeout = parse_duration(value).map_err(invalid)?,
            "page-size" => {
                self.page_size = value
                    .parse()
                    .map_err(|_| invalid(format!("expected a positive integer, got {value:?}")))?
            }
            other => return Err(invalid(format!("unknown key {other:?}"))),
        }
        Ok(())
    }

    pub fn check(&self) -> Result<(), ConfigError> {
        Iri::parse(&self.base_iri).map_err(|e| ConfigError::Invalid {
            key: "base-iri".into(),
            message: e.to_string(),
        })?;
        if self.page_size == 0 {
            return Err(ConfigError::Invalid {
                key: "page-size".into(),
                message: "must be at least 1".into(),
            });
        }
        if self.default_timeout.is_zero() {
            return Err(ConfigError::Invalid {
                key: "default-timeout".into(),
                message: "must be positive".into(),
            });
        }
        Ok(())
    }
}
