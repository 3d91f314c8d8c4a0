//! Flat `key = value` configuration with `[section]` headers.
//!
//! Keys are addressed as `section.key`; keys before the first header are
//! top-level. `#` and `;` start comments. Values may be double-quoted.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

use fermi_chart::scalefactor::{GridSpec, Spacing};
use fermi_chart::{ChartGrid, Curvature, ScaleFactorModel, Tolerances, TraceOptions};

/// A configuration error anchored at a source position; line 0 marks a
/// command-line override.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub origin: String,
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}: {}", self.origin, self.line, self.column, self.message)
    }
}

impl std::error::Error for ConfigError {}

#[derive(Debug, Clone, PartialEq)]
struct Entry {
    value: String,
    origin: String,
    line: usize,
    /// Column of the first value character.
    column: usize,
}

#[derive(Debug, Clone, Default)]
pub struct RawConfig {
    entries: BTreeMap<String, Entry>,
    base_dir: Option<PathBuf>,
}

const KNOWN_KEYS: &[&str] = &[
    "k",
    "output",
    "model.family",
    "model.alpha",
    "model.lambda",
    "model.gamma",
    "model.amplitude",
    "model.expression",
    "model.table",
    "grid.tau_min",
    "grid.tau_max",
    "grid.n_tau",
    "grid.rho_fraction_max",
    "grid.n_rho",
    "tolerances.quad_abs",
    "tolerances.quad_rel",
    "tolerances.root_tol",
    "tolerances.fd_step",
    "tolerances.boundary_eps",
    "tolerances.rho_max_samples",
    "tolerances.max_panels",
    "geodesic.tau0",
    "geodesic.rho_end",
    "geodesic.rho_end_fraction",
    "geodesic.steps",
    "geodesic.initial_slope",
    "geodesic.resolution_tol",
    "regularity.t_min",
    "regularity.t_max",
    "regularity.points",
    "regularity.spacing",
];

fn unquote(raw: &str) -> Result<&str, String> {
    if let Some(rest) = raw.strip_prefix('"') {
        rest.strip_suffix('"').ok_or_else(|| "unterminated quoted value".to_string())
    } else {
        Ok(raw)
    }
}

// Strips a trailing comment that is not inside quotes.
fn strip_comment(line: &str) -> &str {
    let mut quoted = false;
    for (i, c) in line.char_indices() {
        match c {
            '"' => quoted = !quoted,
            '#' | ';' if !quoted => return &line[..i],
            _ => {}
        }
    }
    line
}

fn char_column(line: &str, byte: usize) -> usize {
    line[..byte].chars().count() + 1
}

impl RawConfig {
    pub fn parse(text: &str, origin: &str) -> Result<Self, ConfigError> {
        let mut cfg = RawConfig::default();
        let mut section = String::new();
        for (idx, full) in text.split('\n').enumerate() {
            let line_no = idx + 1;
            let full = full.strip_suffix('\r').unwrap_or(full);
            let body = strip_comment(full);
            let trimmed = body.trim();
            if trimmed.is_empty() {
                continue;
            }
            let lead = body.len() - body.trim_start().len();
            let err = |byte: usize, message: String| ConfigError {
                origin: origin.to_string(),
                line: line_no,
                column: char_column(full, byte),
                message,
            };
            if let Some(rest) = trimmed.strip_prefix('[') {
                let name = rest
                    .strip_suffix(']')
                    .ok_or_else(|| err(lead, "section header missing ']'".into()))?
                    .trim();
                if name.is_empty() || !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
                    return Err(err(lead + 1, format!("invalid section name '{name}'")));
                }
                section = name.to_string();
                continue;
            }
            let eq = body
                .find('=')
                .ok_or_else(|| err(lead, "expected 'key = value'".into()))?;
            let key = body[..eq].trim();
            if key.is_empty() || !key.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
                return Err(err(lead, format!("invalid key '{key}'")));
            }
            let value_part = &body[eq + 1..];
            let value_start = eq + 1 + (value_part.len() - value_part.trim_start().len());
            let value = unquote(value_part.trim()).map_err(|m| err(value_start, m))?;
            let full_key = if section.is_empty() {
                key.to_string()
            } else {
                format!("{section}.{key}")
            };
            if !KNOWN_KEYS.contains(&full_key.as_str()) {
                return Err(err(lead, format!("unknown key '{full_key}'")));
            }
            if cfg.entries.contains_key(&full_key) {
                return Err(err(lead, format!("duplicate key '{full_key}'")));
            }
            cfg.entries.insert(
                full_key,
                Entry {
                    value: value.to_string(),
                    origin: origin.to_string(),
                    line: line_no,
                    column: char_column(full, value_start),
                },
            );
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let origin = path.display().to_string();
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError {
            origin: origin.clone(),
            line: 0,
            column: 0,
            message: format!("cannot read config: {e}"),
        })?;
        let mut cfg = Self::parse(&text, &origin)?;
        cfg.base_dir = path.parent().map(Path::to_path_buf);
        Ok(cfg)
    }

    /// Applies a `section.key=value` override.
    pub fn set(&mut self, assignment: &str) -> Result<(), ConfigError> {
        let err = |message: String| ConfigError {
            origin: "--set".into(),
            line: 0,
            column: 0,
            message,
        };
        let (key, value) = assignment
            .split_once('=')
            .ok_or_else(|| err(format!("expected key=value, got '{assignment}'")))?;
        let key = key.trim();
        if !KNOWN_KEYS.contains(&key) {
            return Err(err(format!("unknown key '{key}'")));
        }
        let value = unquote(value.trim()).map_err(err)?;
        self.entries.insert(
            key.to_string(),
            Entry {
                value: value.to_string(),
                origin: "--set".into(),
                line: 0,
                column: 0,
            },
        );
        Ok(())
    }

    fn entry_error(&self, key: &str, message: String) -> ConfigError {
        match self.entries.get(key) {
            Some(e) => ConfigError {
                origin: e.origin.clone(),
                line: e.line,
                column: e.column,
                message,
            },
            None => ConfigError {
                origin: "config".into(),
                line: 0,
                column: 0,
                message,
            },
        }
    }

    fn str(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(|e| e.value.as_str())
    }

    fn parsed<T: std::str::FromStr>(&self, key: &str, default: T) -> Result<T, ConfigError> {
        match self.entries.get(key) {
            None => Ok(default),
            Some(e) => e
                .value
                .parse()
                .map_err(|_| self.entry_error(key, format!("cannot parse '{}' for {key}", e.value))),
        }
    }

    fn required<T: std::str::FromStr>(&self, key: &str, why: &str) -> Result<T, ConfigError> {
        match self.entries.get(key) {
            None => Err(self.entry_error(key, format!("{key} is required {why}"))),
            Some(e) => e
                .value
                .parse()
                .map_err(|_| self.entry_error(key, format!("cannot parse '{}' for {key}", e.value))),
        }
    }

    pub fn resolve(&self) -> Result<RunConfig, ConfigError> {
        let k_index: i64 = self.parsed("k", 0)?;
        let curvature =
            Curvature::from_index(k_index).map_err(|e| self.entry_error("k", e.to_string()))?;
        let output = self.str("output").map(|p| self.relative(p));
        let model = self.model()?;

        let grid = ChartGrid {
            tau_min: self.parsed("grid.tau_min", 0.5)?,
            tau_max: self.parsed("grid.tau_max", 2.0)?,
            n_tau: self.parsed("grid.n_tau", 16)?,
            rho_fraction_max: self.parsed("grid.rho_fraction_max", 1.5)?,
            n_rho: self.parsed("grid.n_rho", 16)?,
        };
        grid.validate().map_err(|e| self.entry_error("grid.n_tau", e.to_string()))?;

        let d = Tolerances::default();
        let tolerances = Tolerances {
            quad_abs: self.parsed("tolerances.quad_abs", d.quad_abs)?,
            quad_rel: self.parsed("tolerances.quad_rel", d.quad_rel)?,
            root_tol: self.parsed("tolerances.root_tol", d.root_tol)?,
            fd_step: self.parsed("tolerances.fd_step", d.fd_step)?,
            boundary_eps: self.parsed("tolerances.boundary_eps", d.boundary_eps)?,
            rho_max_samples: self.parsed("tolerances.rho_max_samples", d.rho_max_samples)?,
            max_panels: self.parsed("tolerances.max_panels", d.max_panels)?,
        };
        tolerances
            .validate()
            .map_err(|e| self.entry_error("tolerances.quad_abs", e.to_string()))?;

        let t = TraceOptions::default();
        let rho_end = match (self.str("geodesic.rho_end"), self.str("geodesic.rho_end_fraction")) {
            (Some(_), Some(_)) => {
                return Err(self.entry_error(
                    "geodesic.rho_end_fraction",
                    "set either geodesic.rho_end or geodesic.rho_end_fraction".into(),
                ))
            }
            (Some(_), None) => RhoEnd::Absolute(self.parsed("geodesic.rho_end", 0.0)?),
            _ => RhoEnd::FractionOfMax(self.parsed("geodesic.rho_end_fraction", 0.9)?),
        };
        if let RhoEnd::FractionOfMax(f) = rho_end {
            if !(f > 0.0 && f < 1.0) {
                return Err(self.entry_error(
                    "geodesic.rho_end_fraction",
                    format!("rho_end_fraction must lie in (0, 1), got {f}"),
                ));
            }
        }
        let geodesic = GeodesicConfig {
            tau0: self.parsed("geodesic.tau0", 1.0)?,
            rho_end,
            options: TraceOptions {
                steps: self.parsed("geodesic.steps", t.steps)?,
                initial_slope: self.parsed("geodesic.initial_slope", t.initial_slope)?,
                resolution_tol: self.parsed("geodesic.resolution_tol", t.resolution_tol)?,
            },
        };

        let g = GridSpec::default();
        let spacing = match self.str("regularity.spacing").unwrap_or("log") {
            "log" | "logarithmic" => Spacing::Logarithmic,
            "linear" => Spacing::Linear,
            other => {
                return Err(self.entry_error(
                    "regularity.spacing",
                    format!("spacing must be 'log' or 'linear', got '{other}'"),
                ))
            }
        };
        let regularity = GridSpec {
            t_min: self.parsed("regularity.t_min", g.t_min)?,
            t_max: self.parsed("regularity.t_max", g.t_max)?,
            points: self.parsed("regularity.points", g.points)?,
            spacing,
        };
        regularity
            .times()
            .map_err(|e| self.entry_error("regularity.t_min", e.to_string()))?;

        Ok(RunConfig {
            model,
            curvature,
            grid,
            tolerances,
            geodesic,
            regularity,
            output,
        })
    }

    fn relative(&self, p: &str) -> PathBuf {
        let path = PathBuf::from(p);
        match &self.base_dir {
            Some(base) if path.is_relative() => base.join(path),
            _ => path,
        }
    }

    fn model(&self) -> Result<ScaleFactorModel, ConfigError> {
        let family = self.str("model.family").unwrap_or("power");
        let fail = |key: &str, e: fermi_chart::FermiError| self.entry_error(key, e.to_string());
        match family {
            "power" => {
                let alpha: f64 = self.required("model.alpha", "for family=power")?;
                ScaleFactorModel::power(alpha).map_err(|e| fail("model.alpha", e))
            }
            "milne" => Ok(ScaleFactorModel::milne()),
            "sinh" => Ok(ScaleFactorModel::sinh()),
            "lambda_gamma" => {
                let lambda = self.required("model.lambda", "for family=lambda_gamma")?;
                let gamma = self.required("model.gamma", "for family=lambda_gamma")?;
                let amplitude = self.parsed("model.amplitude", 1.0)?;
                ScaleFactorModel::lambda_gamma(lambda, gamma, amplitude).map_err(|e| fail("model.lambda", e))
            }
            "expression" => {
                let src: String = self.required("model.expression", "for family=expression")?;
                ScaleFactorModel::user_expression(&src).map_err(|e| fail("model.expression", e))
            }
            "table" => {
                let file: String = self.required("model.table", "for family=table")?;
                let path = self.relative(&file);
                let (t, a) = read_table(&path).map_err(|m| self.entry_error("model.table", m))?;
                ScaleFactorModel::user_table(t, a).map_err(|e| fail("model.table", e))
            }
            other => Err(self.entry_error(
                "model.family",
                format!("unknown family '{other}' (power, milne, sinh, lambda_gamma, expression, table)"),
            )),
        }
    }
}

// Two comma-separated columns t,a; a non-numeric first line is a header.
fn read_table(path: &Path) -> Result<(Vec<f64>, Vec<f64>), String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    let (mut t, mut a) = (Vec::new(), Vec::new());
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut cols = line.split(',').map(str::trim);
        let (x, y) = (cols.next(), cols.next());
        match (x.and_then(|v| v.parse().ok()), y.and_then(|v| v.parse().ok())) {
            (Some(x), Some(y)) => {
                t.push(x);
                a.push(y);
            }
            _ if i == 0 => {}
            _ => return Err(format!("{}:{}: expected 't,a'", path.display(), i + 1)),
        }
    }
    Ok((t, a))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RhoEnd {
    Absolute(f64),
    FractionOfMax(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeodesicConfig {
    pub tau0: f64,
    pub rho_end: RhoEnd,
    pub options: TraceOptions,
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub model: ScaleFactorModel,
    pub curvature: Curvature,
    pub grid: ChartGrid,
    pub tolerances: Tolerances,
    pub geodesic: GeodesicConfig,
    pub regularity: GridSpec,
    pub output: Option<PathBuf>,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_sections_comments_and_quotes() {
        let text = "k = -1\n# comment\n[model]\nfamily = expression ; trailing\nexpression = \"t^2 + 0*t\" # comment\n[grid]\nn_tau = 3\n";
        let raw = RawConfig::parse(text, "t.ini").unwrap();
        assert_eq!(raw.str("model.expression"), Some("t^2 + 0*t"));
        let quoted = RawConfig::parse("output = \"a#b.csv\"\n", "t.ini").unwrap();
        assert_eq!(quoted.str("output"), Some("a#b.csv"));
        let cfg = raw.resolve().unwrap();
        assert_eq!(cfg.curvature, Curvature::Open);
        assert_eq!(cfg.grid.n_tau, 3);
    }

    #[test]
    fn errors_carry_line_and_column() {
        let e = RawConfig::parse("[model]\nfamily = power\n  bogus = 1\n", "c.ini").unwrap_err();
        assert_eq!((e.line, e.column), (3, 3));
        let e = RawConfig::parse("[model\n", "c.ini").unwrap_err();
        assert_eq!((e.line, e.column), (1, 1));
        let raw = RawConfig::parse("[model]\nalpha = two\n", "c.ini").unwrap();
        let e = raw.resolve().unwrap_err();
        assert_eq!((e.line, e.column), (2, 9));
    }

    #[test]
    fn overrides_replace_values() {
        let mut raw = RawConfig::parse("[model]\nalpha = 2\n", "c.ini").unwrap();
        raw.set("model.alpha=3").unwrap();
        raw.set("grid.rho_fraction_max = 1.2").unwrap();
        let cfg = raw.resolve().unwrap();
        assert_eq!(cfg.model.describe(), "power(alpha=3)");
        assert_eq!(cfg.grid.rho_fraction_max, 1.2);
        assert!(raw.set("model.beta=1").is_err());
    }

    #[test]
    fn rejects_invalid_plumbing() {
        for text in [
            "k = 2\n[model]\nalpha = 2\n",
            "[model]\nalpha = 2\n[grid]\nn_rho = 1\n",
            "[model]\nalpha = 2\n[grid]\nrho_fraction_max = 2\n",
            "[model]\nfamily = cubic\n",
            "[model]\nfamily = power\n",
        ] {
            assert!(RawConfig::parse(text, "c.ini").unwrap().resolve().is_err(), "{text}");
        }
    }
}
