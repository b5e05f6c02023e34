//! Experiment configuration documents.
//!
//! A document is TOML with the sections `[model]`, `[numerics]`, `[initial]`
//! and an optional `[sweep]`; `seed` and `output_dir` sit at the top level.
//! Exactly one profile family is selected as a sub-table of `[initial]`:
//!
//! ```toml
//! [model]
//! dim = 3
//! support_radius = 1.0
//!
//! [initial.polynomial_bump]
//! vel_amplitude = 1.0
//! ```

use std::collections::HashMap;
use std::path::PathBuf;

use radial_euler_core::{Error as CoreError, ModelConfig, NumericsConfig};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("syntax error at line {line}: {message}")]
    Syntax { line: usize, message: String },

    #[error("duplicate key `{key}` at line {second_line} (first defined at line {first_line})")]
    DuplicateKey {
        key: String,
        first_line: usize,
        second_line: usize,
    },

    #[error("unknown key `{0}`")]
    UnknownKey(String),

    #[error("invalid value for `{field}`: {reason}")]
    Invalid { field: String, reason: String },
}

impl ConfigError {
    fn invalid(field: impl Into<String>, reason: impl Into<String>) -> Self {
        ConfigError::Invalid {
            field: field.into(),
            reason: reason.into(),
        }
    }

    fn from_core(section: &str, err: CoreError) -> Self {
        match err {
            CoreError::InvalidConfig { field, reason } => Self::invalid(format!("{section}.{field}"), reason),
            CoreError::UnsupportedDimension(n) => {
                Self::invalid(format!("{section}.dim"), format!("dim must be 1, 2 or 3 (got {n})"))
            }
            other => Self::invalid(section, other.to_string()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PolynomialBump {
    /// `ρ₀ = rho_amplitude · (1 - (r/R)²)^rho_power`
    pub rho_amplitude: f64,
    pub rho_power: i32,
    /// `V₀ = vel_amplitude · r (1 - r/R)`
    pub vel_amplitude: f64,
}

impl Default for PolynomialBump {
    fn default() -> Self {
        Self {
            rho_amplitude: 1.0,
            rho_power: 2,
            vel_amplitude: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GaussianTruncated {
    pub rho_amplitude: f64,
    pub vel_amplitude: f64,
    /// Gaussian width relative to `R`.
    pub width: f64,
    /// Support radius relative to `R`.
    pub support_fraction: f64,
}

impl Default for GaussianTruncated {
    fn default() -> Self {
        Self {
            rho_amplitude: 1.0,
            vel_amplitude: 1.0,
            width: 0.4,
            support_fraction: 0.9,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RandomSmooth {
    pub rho_amplitude: f64,
    pub vel_amplitude: f64,
    /// Number of Fourier modes.
    pub modes: usize,
    pub support_fraction: f64,
}

impl Default for RandomSmooth {
    fn default() -> Self {
        Self {
            rho_amplitude: 1.0,
            vel_amplitude: 1.0,
            modes: 4,
            support_fraction: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitialProfile {
    PolynomialBump(PolynomialBump),
    GaussianTruncated(GaussianTruncated),
    RandomSmooth(RandomSmooth),
}

impl InitialProfile {
    pub fn family(&self) -> &'static str {
        match self {
            InitialProfile::PolynomialBump(_) => "polynomial_bump",
            InitialProfile::GaussianTruncated(_) => "gaussian_truncated",
            InitialProfile::RandomSmooth(_) => "random_smooth",
        }
    }

    fn validate(&self) -> Result<(), ConfigError> {
        let field = |name: &str| format!("initial.{}.{name}", self.family());
        let finite_nonneg = |name: &str, x: f64| {
            if x.is_finite() && x >= 0.0 {
                Ok(())
            } else {
                Err(ConfigError::invalid(
                    field(name),
                    format!("{name} must be finite and ≥ 0"),
                ))
            }
        };
        let fraction = |x: f64| {
            if x > 0.0 && x <= 1.0 {
                Ok(())
            } else {
                Err(ConfigError::invalid(
                    field("support_fraction"),
                    "support_fraction must lie in (0, 1]",
                ))
            }
        };
        match self {
            InitialProfile::PolynomialBump(p) => {
                finite_nonneg("rho_amplitude", p.rho_amplitude)?;
                if !p.vel_amplitude.is_finite() {
                    return Err(ConfigError::invalid(
                        field("vel_amplitude"),
                        "vel_amplitude must be finite",
                    ));
                }
                if p.rho_power < 1 {
                    return Err(ConfigError::invalid(field("rho_power"), "rho_power must be ≥ 1"));
                }
            }
            InitialProfile::GaussianTruncated(p) => {
                finite_nonneg("rho_amplitude", p.rho_amplitude)?;
                if !p.vel_amplitude.is_finite() {
                    return Err(ConfigError::invalid(
                        field("vel_amplitude"),
                        "vel_amplitude must be finite",
                    ));
                }
                if !(p.width > 0.0) {
                    return Err(ConfigError::invalid(field("width"), "width must be > 0"));
                }
                fraction(p.support_fraction)?;
            }
            InitialProfile::RandomSmooth(p) => {
                finite_nonneg("rho_amplitude", p.rho_amplitude)?;
                if !p.vel_amplitude.is_finite() {
                    return Err(ConfigError::invalid(
                        field("vel_amplitude"),
                        "vel_amplitude must be finite",
                    ));
                }
                if p.modes == 0 {
                    return Err(ConfigError::invalid(field("modes"), "modes must be ≥ 1"));
                }
                fraction(p.support_fraction)?;
            }
        }
        Ok(())
    }
}

/// Parameter lists expanded as a Cartesian product.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SweepSpec {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta: Option<Vec<i32>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pressure_const: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_cells: Option<Vec<usize>>,
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("out")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    #[serde(default)]
    pub model: ModelConfig,
    #[serde(default)]
    pub numerics: NumericsConfig,
    pub initial: InitialProfile,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSpec>,
}

/// One concrete run of an experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct RunSpec {
    pub id: String,
    pub config: ExperimentConfig,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        self.model.validate().map_err(|e| ConfigError::from_core("model", e))?;
        self.numerics
            .validate()
            .map_err(|e| ConfigError::from_core("numerics", e))?;
        self.initial.validate()?;
        if let Some(sweep) = &self.sweep {
            let lists = [
                ("sweep.delta", sweep.delta.as_ref().map(Vec::len)),
                ("sweep.pressure_const", sweep.pressure_const.as_ref().map(Vec::len)),
                ("sweep.gamma", sweep.gamma.as_ref().map(Vec::len)),
                ("sweep.n_cells", sweep.n_cells.as_ref().map(Vec::len)),
            ];
            for (name, len) in lists {
                if len == Some(0) {
                    return Err(ConfigError::invalid(name, "sweep lists must not be empty"));
                }
            }
            for run in self.expand() {
                run.config
                    .model
                    .validate()
                    .map_err(|e| ConfigError::from_core("sweep", e))?;
                run.config
                    .numerics
                    .validate()
                    .map_err(|e| ConfigError::from_core("sweep", e))?;
            }
        }
        Ok(())
    }

    /// Concrete runs, ids `run-000`, `run-001`, … in sweep order (δ outermost,
    /// then K, γ, n_cells).
    pub fn expand(&self) -> Vec<RunSpec> {
        let base = ExperimentConfig {
            sweep: None,
            ..self.clone()
        };
        let sweep = self.sweep.clone().unwrap_or_default();
        let deltas = sweep.delta.unwrap_or_else(|| vec![base.model.delta]);
        let ks = sweep.pressure_const.unwrap_or_else(|| vec![base.model.pressure_const]);
        let gammas = sweep.gamma.unwrap_or_else(|| vec![base.model.gamma]);
        let cells = sweep.n_cells.unwrap_or_else(|| vec![base.numerics.n_cells]);

        let mut runs = Vec::new();
        for &delta in &deltas {
            for &k in &ks {
                for &gamma in &gammas {
                    for &n in &cells {
                        let mut config = base.clone();
                        config.model.delta = delta;
                        config.model.pressure_const = k;
                        config.model.gamma = gamma;
                        config.numerics.n_cells = n;
                        runs.push(RunSpec {
                            id: format!("run-{:03}", runs.len()),
                            config,
                        });
                    }
                }
            }
        }
        runs
    }

    /// Fully resolved document; parses back to an equal configuration.
    pub fn to_document(&self) -> String {
        toml::to_string(self).expect("configuration serialises to TOML")
    }
}

/// Parses and validates a configuration document. In strict mode unknown keys
/// are errors; otherwise they are returned for the caller to report.
pub fn parse_config(text: &str, strict: bool) -> Result<(ExperimentConfig, Vec<String>), ConfigError> {
    check_duplicate_keys(text)?;
    let mut unknown = Vec::new();
    let de = toml::Deserializer::new(text);
    let cfg: ExperimentConfig =
        serde_ignored::deserialize(de, |path| unknown.push(path.to_string())).map_err(|e| syntax_error(text, &e))?;
    if strict {
        if let Some(key) = unknown.first() {
            return Err(ConfigError::UnknownKey(key.clone()));
        }
    }
    cfg.validate()?;
    Ok((cfg, unknown))
}

fn syntax_error(text: &str, err: &toml::de::Error) -> ConfigError {
    let line = err
        .span()
        .map(|s| text[..s.start.min(text.len())].matches('\n').count() + 1)
        .unwrap_or(0);
    ConfigError::Syntax {
        line,
        message: err.message().to_string(),
    }
}

/// Line-level scan for keys defined twice in the same table, so both
/// locations can be reported.
fn check_duplicate_keys(text: &str) -> Result<(), ConfigError> {
    let mut seen: HashMap<String, usize> = HashMap::new();
    let mut table = String::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = strip_comment(raw).trim();
        if line.is_empty() {
            continue;
        }
        if line.starts_with("[[") {
            // array-of-tables entries may legitimately repeat
            table = format!("{}#{line_no}", line.trim_matches(|c| c == '[' || c == ']').trim());
            continue;
        }
        if line.starts_with('[') {
            table = line.trim_matches(|c| c == '[' || c == ']').trim().to_string();
            let key = format!("[{table}]");
            if let Some(&first) = seen.get(&key) {
                return Err(ConfigError::DuplicateKey {
                    key,
                    first_line: first,
                    second_line: line_no,
                });
            }
            seen.insert(key, line_no);
            continue;
        }
        let Some(eq) = line.find('=') else { continue };
        let key = line[..eq].trim().trim_matches('"');
        if key.is_empty() || key.contains(['[', ']', ',']) {
            continue;
        }
        let full = if table.is_empty() {
            key.to_string()
        } else {
            format!("{table}.{key}")
        };
        if let Some(&first) = seen.get(&full) {
            return Err(ConfigError::DuplicateKey {
                key: full,
                first_line: first,
                second_line: line_no,
            });
        }
        seen.insert(full, line_no);
    }
    Ok(())
}

fn strip_comment(line: &str) -> &str {
    let mut in_str = false;
    for (i, c) in line.char_indices() {
        match c {
            '"' => in_str = !in_str,
            '#' if !in_str => return &line[..i],
            _ => {}
        }
    }
    line
}
