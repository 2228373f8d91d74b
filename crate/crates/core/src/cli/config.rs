use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::rational::{self, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CommandKind {
    Series,
    Counts,
    Enumerate,
    Exact,
    Mc,
    Compare,
    Bounds,
    Selfcheck,
}

impl CommandKind {
    pub const ALL: [CommandKind; 8] = [
        CommandKind::Series,
        CommandKind::Counts,
        CommandKind::Enumerate,
        CommandKind::Exact,
        CommandKind::Mc,
        CommandKind::Compare,
        CommandKind::Bounds,
        CommandKind::Selfcheck,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CommandKind::Series => "series",
            CommandKind::Counts => "counts",
            CommandKind::Enumerate => "enumerate",
            CommandKind::Exact => "exact",
            CommandKind::Mc => "mc",
            CommandKind::Compare => "compare",
            CommandKind::Bounds => "bounds",
            CommandKind::Selfcheck => "selfcheck",
        }
    }

    /// Keys a command accepts, on the command line or in its config section.
    pub fn keys(self) -> &'static [&'static str] {
        match self {
            CommandKind::Series => &["order", "u", "kind"],
            CommandKind::Counts => &["s-max", "check"],
            CommandKind::Enumerate => &["s", "filter", "dump", "profile", "enum-max"],
            CommandKind::Exact => &["n", "rho", "s", "moments", "rose", "enum-max"],
            CommandKind::Mc => &["n", "rho", "dist", "q", "samples", "seed", "s-max", "study", "eps", "chi", "lambda-dump"],
            CommandKind::Compare => &["n", "rho", "dist", "q", "samples", "seed", "s-max", "no-mc"],
            CommandKind::Bounds => &["order", "u-grid", "which", "s-max"],
            CommandKind::Selfcheck => &["depth", "inject-fault"],
        }
    }
}

impl FromStr for CommandKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown command {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            _ => Err(Error::Config(format!("format must be csv or json, got {s:?}"))),
        }
    }
}

/// Keys valid in the `[global]` section or before any section.
pub const GLOBAL_KEYS: [&str; 3] = ["output", "format", "threads"];

/// Fully resolved invocation: flags first, then the config file, then
/// defaults applied by each command.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: CommandKind,
    pub params: BTreeMap<String, String>,
    pub output_format: OutputFormat,
    pub output_path: Option<PathBuf>,
    pub threads: usize,
}

impl fmt::Display for RunConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "command={}", self.command.name())?;
        for (k, v) in &self.params {
            write!(f, " {k}={v}")?;
        }
        write!(f, " format={:?} threads={}", self.output_format, self.threads)?;
        if let Some(p) = &self.output_path {
            write!(f, " output={}", p.display())?;
        }
        Ok(())
    }
}

/// Sections of a `key = value` file. Keys before the first header belong
/// to `global`.
pub fn parse_config_text(text: &str) -> Result<BTreeMap<String, BTreeMap<String, String>>> {
    let mut sections: BTreeMap<String, BTreeMap<String, String>> = BTreeMap::new();
    let mut current = "global".to_string();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let lineno = i + 1;
        if let Some(name) = line.strip_prefix('[') {
            let name = name
                .strip_suffix(']')
                .ok_or_else(|| Error::Config(format!("config line {lineno}: unterminated section header")))?
                .trim();
            if name != "global" && name.parse::<CommandKind>().is_err() {
                return Err(Error::Config(format!("config line {lineno}: unknown section [{name}]")));
            }
            current = name.to_string();
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("config line {lineno}: expected key = value")))?;
        let key = k.trim().replace('_', "-");
        let allowed = if current == "global" {
            GLOBAL_KEYS.contains(&key.as_str())
        } else {
            current.parse::<CommandKind>()?.keys().contains(&key.as_str())
        };
        if !allowed {
            return Err(Error::Config(format!("config line {lineno}: unknown key {key:?} in [{current}]")));
        }
        let v = v.trim().trim_matches('"').to_string();
        if sections.entry(current.clone()).or_default().insert(key.clone(), v).is_some() {
            return Err(Error::Config(format!("config line {lineno}: duplicate key {key:?}")));
        }
    }
    Ok(sections)
}

/// Values given on the command line, before merging.
#[derive(Debug, Clone, Default)]
pub struct CliValues {
    pub global: BTreeMap<String, String>,
    pub params: BTreeMap<String, String>,
}

/// Merges command-line values over the config file.
pub fn parse_config(command: CommandKind, cli: CliValues, config_file: Option<&Path>) -> Result<RunConfig> {
    let mut sections = match config_file {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::Config(format!("cannot read config {}: {e}", path.display())))?;
            parse_config_text(&text)?
        }
        None => BTreeMap::new(),
    };
    let mut global = sections.remove("global").unwrap_or_default();
    global.extend(cli.global);
    let mut params = sections.remove(command.name()).unwrap_or_default();
    for (k, v) in cli.params {
        if !command.keys().contains(&k.as_str()) {
            return Err(Error::Config(format!("{} does not take --{k}", command.name())));
        }
        params.insert(k, v);
    }
    let output_format = global.get("format").map(|s| s.parse()).transpose()?.unwrap_or(OutputFormat::Csv);
    let threads = match global.get("threads") {
        Some(t) => t.parse().map_err(|_| Error::Config(format!("threads must be a non-negative integer, got {t:?}")))?,
        None => 0,
    };
    Ok(RunConfig { command, params, output_format, output_path: global.get("output").map(PathBuf::from), threads })
}

impl RunConfig {
    pub fn has(&self, key: &str) -> bool {
        self.params.contains_key(key)
    }

    pub fn get<T: FromStr>(&self, key: &str, default: T) -> Result<T> {
        match self.params.get(key) {
            Some(v) => v.parse().map_err(|_| Error::Config(format!("--{key}: cannot parse {v:?}"))),
            None => Ok(default),
        }
    }

    pub fn require<T: FromStr>(&self, key: &str) -> Result<T> {
        let v = self.params.get(key).ok_or_else(|| Error::Config(format!("--{key} is required")))?;
        v.parse().map_err(|_| Error::Config(format!("--{key}: cannot parse {v:?}")))
    }

    pub fn flag(&self, key: &str) -> Result<bool> {
        match self.params.get(key).map(String::as_str) {
            None | Some("false") => Ok(false),
            Some("true") | Some("") => Ok(true),
            Some(v) => Err(Error::Config(format!("--{key}: expected true or false, got {v:?}"))),
        }
    }

    pub fn rational(&self, key: &str) -> Result<Option<Rational>> {
        self.params.get(key).map(|v| rational::parse(v)).transpose()
    }

    pub fn rational_list(&self, key: &str) -> Result<Option<Vec<Rational>>> {
        self.params
            .get(key)
            .map(|v| v.split(',').map(rational::parse).collect::<Result<Vec<_>>>())
            .transpose()
    }

    pub fn float_list(&self, key: &str) -> Result<Option<Vec<f64>>> {
        self.params
            .get(key)
            .map(|v| {
                v.split(',')
                    .map(|x| x.trim().parse::<f64>().map_err(|_| Error::Config(format!("--{key}: bad number {x:?}"))))
                    .collect::<Result<Vec<_>>>()
            })
            .transpose()
    }
}
