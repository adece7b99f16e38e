//! Layered run configuration: built-in defaults, then environment
//! variables, then an optional key=value file, then command-line flags.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::Serialize;
use serde_json::{Map, Value};
use smallstate::QuadratureConfig;

use crate::CliError;

pub const ENV_REL_TOL: &str = "SMALLSTATE_REL_TOL";
pub const ENV_ABS_TOL: &str = "SMALLSTATE_ABS_TOL";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
    Svg,
}

impl FromStr for Format {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        match s.trim().to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            "svg" => Ok(Format::Svg),
            other => Err(CliError::validation(format!("unknown format `{other}` (expected csv, json or svg)"))),
        }
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Format::Csv => "csv",
            Format::Json => "json",
            Format::Svg => "svg",
        })
    }
}

/// Settings that are not specific to one command.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Settings {
    pub quadrature: QuadratureConfig,
    pub threads: Option<usize>,
    pub format: Option<Format>,
    pub output: Option<PathBuf>,
}

/// Overrides collected from flags; `None` leaves the lower layer in place.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub rel_tol: Option<f64>,
    pub abs_tol: Option<f64>,
    pub seed: Option<u64>,
    pub threads: Option<usize>,
    pub format: Option<String>,
    pub output: Option<PathBuf>,
    /// Extra quadrature settings given as key=value.
    pub set: Vec<String>,
}

fn parse_scalar(key: &str, raw: &str) -> Result<Value, CliError> {
    let raw = raw.trim();
    if raw.eq_ignore_ascii_case("none") || raw.eq_ignore_ascii_case("auto") {
        return Ok(Value::Null);
    }
    if let Ok(i) = raw.parse::<u64>() {
        return Ok(Value::from(i));
    }
    raw.parse::<f64>()
        .ok()
        .and_then(serde_json::Number::from_f64)
        .map(Value::Number)
        .ok_or_else(|| CliError::validation(format!("`{key}` needs a finite number, got `{raw}`")))
}

/// Apply `key = value` assignments to the settings. Quadrature keys use the
/// field names of [`QuadratureConfig`]; `threads`, `format` and `output` are
/// also accepted.
pub fn apply_assignments<'a>(settings: &mut Settings, lines: impl IntoIterator<Item = (&'a str, usize)>, origin: &str) -> Result<(), CliError> {
    let mut quad = match serde_json::to_value(&settings.quadrature).expect("config serializes") {
        Value::Object(m) => m,
        _ => Map::new(),
    };
    for (line, number) in lines {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| CliError::validation(format!("{origin}:{number}: expected key=value, got `{line}`")))?;
        let (key, value) = (key.trim(), value.trim());
        match key {
            "threads" => settings.threads = Some(parse_count(key, value)?),
            "format" => settings.format = Some(value.parse()?),
            "output" => settings.output = Some(PathBuf::from(value)),
            _ if quad.contains_key(key) => {
                quad.insert(key.to_string(), parse_scalar(key, value)?);
            }
            _ => {
                let known: Vec<&str> = quad.keys().map(String::as_str).collect();
                return Err(CliError::validation(format!(
                    "{origin}:{number}: unknown key `{key}` (expected threads, format, output or one of {})",
                    known.join(", ")
                )));
            }
        }
    }
    settings.quadrature = serde_json::from_value(Value::Object(quad)).map_err(|e| CliError::validation(format!("{origin}: {e}")))?;
    Ok(())
}

fn parse_count(key: &str, raw: &str) -> Result<usize, CliError> {
    raw.parse::<usize>()
        .ok()
        .filter(|&t| t > 0)
        .ok_or_else(|| CliError::validation(format!("`{key}` needs a positive integer, got `{raw}`")))
}

fn env_tolerance(name: &str) -> Result<Option<f64>, CliError> {
    match std::env::var(name) {
        Ok(v) => v
            .trim()
            .parse::<f64>()
            .map(Some)
            .map_err(|_| CliError::validation(format!("environment variable {name} must be a number, got `{v}`"))),
        Err(_) => Ok(None),
    }
}

/// Resolve the layered settings and validate them.
pub fn resolve(config_file: Option<&Path>, flags: &Overrides) -> Result<Settings, CliError> {
    let mut settings = Settings::default();
    if let Some(v) = env_tolerance(ENV_REL_TOL)? {
        settings.quadrature.rel_tol = v;
    }
    if let Some(v) = env_tolerance(ENV_ABS_TOL)? {
        settings.quadrature.abs_tol = v;
    }
    if let Some(path) = config_file {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::validation(format!("cannot read config file {}: {e}", path.display())))?;
        let origin = path.display().to_string();
        apply_assignments(&mut settings, text.lines().zip(1..), &origin)?;
    }
    apply_assignments(&mut settings, flags.set.iter().map(String::as_str).zip(1..), "--set")?;
    if let Some(v) = flags.rel_tol {
        settings.quadrature.rel_tol = v;
    }
    if let Some(v) = flags.abs_tol {
        settings.quadrature.abs_tol = v;
    }
    if let Some(v) = flags.seed {
        settings.quadrature.seed = v;
    }
    if let Some(t) = flags.threads {
        settings.threads = Some(parse_count("threads", &t.to_string())?);
    }
    if let Some(f) = &flags.format {
        settings.format = Some(f.parse()?);
    }
    if let Some(o) = &flags.output {
        settings.output = Some(o.clone());
    }
    settings.quadrature.validate()?;
    Ok(settings)
}

/// Everything needed to reproduce an output file; embedded in every file.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub program: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub params: Value,
    pub quadrature: QuadratureConfig,
    pub format: Format,
    pub output: Option<String>,
    pub threads: Option<usize>,
}

impl RunConfig {
    pub fn new(command: &'static str, params: Value, settings: &Settings, format: Format) -> Self {
        RunConfig {
            program: "smallstate",
            version: env!("CARGO_PKG_VERSION"),
            command,
            params,
            quadrature: settings.quadrature.clone(),
            format,
            output: settings.output.as_ref().map(|p| p.display().to_string()),
            threads: settings.threads,
        }
    }

    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("run config serializes")
    }

    /// Metadata lines for a CSV header (the caller adds the `# ` prefix).
    pub fn csv_lines(&self) -> Vec<String> {
        vec![format!("run_config = {}", self.to_json_line())]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn assignments_override_quadrature_fields() {
        let mut s = Settings::default();
        let lines = ["# comment", "rel_tol = 1e-8", "radial_nodes=600  # trailing", "p_max = none", "threads = 2", "format = svg"];
        apply_assignments(&mut s, lines.iter().copied().zip(1..), "test").unwrap();
        assert_eq!(s.quadrature.rel_tol, 1e-8);
        assert_eq!(s.quadrature.radial_nodes, 600);
        assert_eq!(s.quadrature.p_max, None);
        assert_eq!(s.threads, Some(2));
        assert_eq!(s.format, Some(Format::Svg));
    }

    #[test]
    fn bad_assignments_are_validation_errors() {
        for line in ["bogus = 1", "rel_tol", "rel_tol = abc", "radial_nodes = 1.5", "threads = 0", "format = png"] {
            let mut s = Settings::default();
            let err = apply_assignments(&mut s, [(line, 1)], "test").unwrap_err();
            assert!(err.is_validation(), "{line}");
        }
    }

    #[test]
    fn flags_beat_config_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.conf");
        std::fs::write(&path, "rel_tol = 1e-7\nabs_tol = 1e-12\n").unwrap();
        let flags = Overrides {
            rel_tol: Some(1e-9),
            ..Default::default()
        };
        let s = resolve(Some(&path), &flags).unwrap();
        assert_eq!(s.quadrature.rel_tol, 1e-9);
        assert_eq!(s.quadrature.abs_tol, 1e-12);
    }
}
