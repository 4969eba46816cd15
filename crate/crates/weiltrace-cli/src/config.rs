//! Run configuration: flags > config file > environment > defaults.
//!
//! The config file is flat `key = value` text, one setting per line, `#`
//! starting a comment. Keys: `zeros`, `cache`, `precision`, `tolerance`,
//! `format`, `output`.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use weiltrace::special::PrecisionConfig;
use weiltrace::{Error, Result};

pub const ENV_CACHE: &str = "APP_CACHE";
pub const ENV_PRECISION: &str = "APP_PRECISION";

const KEYS: [&str; 6] = ["zeros", "cache", "precision", "tolerance", "format", "output"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

impl Format {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            other => Err(Error::Parameter(format!("unknown format '{other}' (json | csv)"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ZeroSourceSpec {
    File(PathBuf),
    Compute(f64),
}

impl ZeroSourceSpec {
    /// `compute:<t_max>` or a path.
    pub fn parse(s: &str) -> Result<Self> {
        match s.strip_prefix("compute:") {
            Some(t) => {
                let t: f64 = t.trim().parse().map_err(|_| Error::Parameter(format!("bad height in zero source '{s}'")))?;
                if !(t > 0.0) {
                    return Err(Error::Parameter(format!("zero height must be positive, got {t}")));
                }
                Ok(ZeroSourceSpec::Compute(t))
            }
            None if s.trim().is_empty() => Err(Error::Parameter("empty zero source".into())),
            None => Ok(ZeroSourceSpec::File(PathBuf::from(s.trim()))),
        }
    }

    pub fn describe(&self) -> String {
        match self {
            ZeroSourceSpec::File(p) => format!("file:{}", p.display()),
            ZeroSourceSpec::Compute(t) => format!("compute:{t}"),
        }
    }
}

/// Settings given on the command line; `None` falls through to the file,
/// then the environment, then the command's default.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub config: Option<PathBuf>,
    pub zeros: Option<String>,
    pub cache: Option<PathBuf>,
    pub precision: Option<f64>,
    pub tolerance: Option<f64>,
    pub format: Option<String>,
    pub output: Option<PathBuf>,
}

/// Per-command fallbacks.
#[derive(Debug, Clone)]
pub struct Defaults {
    pub zeros: ZeroSourceSpec,
    pub tolerance: f64,
    pub format: Format,
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub zeros: ZeroSourceSpec,
    pub cache: Option<PathBuf>,
    pub precision: PrecisionConfig,
    pub tolerance: f64,
    pub format: Format,
    pub output: Option<PathBuf>,
}

pub fn parse_config_file(text: &str) -> Result<BTreeMap<String, String>> {
    let mut map = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::Parse { line: i + 1, msg: format!("expected key = value, got '{line}'") })?;
        let k = k.trim();
        if !KEYS.contains(&k) {
            return Err(Error::Parse { line: i + 1, msg: format!("unknown key '{k}'") });
        }
        map.insert(k.to_string(), v.trim().to_string());
    }
    Ok(map)
}

fn load_config_file(path: &Path) -> Result<BTreeMap<String, String>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_config_file(&text)
}

fn parse_f64(key: &str, v: &str) -> Result<f64> {
    v.trim().parse().map_err(|_| Error::Parameter(format!("{key}: cannot parse '{v}' as a number")))
}

impl RunConfig {
    pub fn resolve(flags: &Overrides, env: &dyn Fn(&str) -> Option<String>, defaults: Defaults) -> Result<Self> {
        let file = match &flags.config {
            Some(p) => load_config_file(p)?,
            None => BTreeMap::new(),
        };
        let from_file = |k: &str| file.get(k).cloned();

        let zeros = match flags.zeros.clone().or_else(|| from_file("zeros")) {
            Some(s) => ZeroSourceSpec::parse(&s)?,
            None => defaults.zeros,
        };
        let cache = flags
            .cache
            .clone()
            .or_else(|| from_file("cache").map(PathBuf::from))
            .or_else(|| env(ENV_CACHE).filter(|s| !s.is_empty()).map(PathBuf::from));
        let precision = match flags.precision {
            Some(p) => Some(p),
            None => match from_file("precision").or_else(|| env(ENV_PRECISION)) {
                Some(s) => Some(parse_f64("precision", &s)?),
                None => None,
            },
        };
        let precision = match precision {
            Some(p) => {
                if p < f64::EPSILON {
                    return Err(Error::Parameter(format!("precision {p:e} is below double-precision resolution")));
                }
                PrecisionConfig::with_target(p)?
            }
            None => PrecisionConfig::default(),
        };
        let tolerance = match flags.tolerance {
            Some(t) => t,
            None => match from_file("tolerance") {
                Some(s) => parse_f64("tolerance", &s)?,
                None => defaults.tolerance,
            },
        };
        if !(tolerance > 0.0) {
            return Err(Error::Parameter(format!("tolerance must be positive, got {tolerance}")));
        }
        let format = match flags.format.clone().or_else(|| from_file("format")) {
            Some(s) => Format::parse(&s)?,
            None => defaults.format,
        };
        let output = flags.output.clone().or_else(|| from_file("output").map(PathBuf::from));
        Ok(RunConfig { zeros, cache, precision, tolerance, format, output })
    }
}
