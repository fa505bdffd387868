//! Run configuration: defaults, flat `key=value` files and overrides.
//!
//! Every setting has one textual key. Config files and command-line flags go
//! through the same [`RunConfig::set`], so a value parses identically from
//! either source, and [`RunConfig::emit`] writes text that parses back to the
//! same configuration.

use std::f64::consts::PI;
use std::fmt::Write as _;

use thiserror::Error;

use crate::localization::Thresholds;
use crate::spectrum::Coupling;
use crate::sweep::{tan_spaced_grid, CutoffPolicy, ExperimentParams, DEFAULT_POSITION_RATIO};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error("unknown key `{0}`")]
    UnknownKey(String),
    #[error("malformed value for `{key}`: {value:?}")]
    Malformed { key: String, value: String },
    #[error("invalid value for `{key}`: {reason}")]
    Constraint { key: String, reason: String },
    #[error("line {line}: expected key=value, got {text:?}")]
    Syntax { line: usize, text: String },
}

impl ConfigError {
    /// Key the error refers to, if any.
    pub fn key(&self) -> Option<&str> {
        match self {
            ConfigError::UnknownKey(key) => Some(key),
            ConfigError::Malformed { key, .. } | ConfigError::Constraint { key, .. } => Some(key),
            ConfigError::Syntax { .. } => None,
        }
    }
}

/// Coupling grid for alpha scans.
#[derive(Debug, Clone, PartialEq)]
pub enum AlphaGrid {
    /// `samples` tan-spaced values clipped to `[-clip, clip]`.
    Tan { samples: usize, clip: f64 },
    List(Vec<f64>),
}

impl AlphaGrid {
    pub fn values(&self) -> Vec<f64> {
        match self {
            AlphaGrid::Tan { samples, clip } => tan_spaced_grid(*samples, *clip),
            AlphaGrid::List(values) => values.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub eccentricity: f64,
    pub alpha: Coupling,
    pub count: usize,
    pub x0_ratio: f64,
    pub y0_ratio: f64,
    /// `None` means automatic sizing.
    pub basis_cutoff: Option<f64>,
    /// `None` means the basis cutoff.
    pub amplitude_cutoff: Option<f64>,
    pub thresholds: Thresholds,
    pub grid: (usize, usize),
    pub mode: usize,
    pub alpha_grid: AlphaGrid,
    pub eccentricity_grid: Vec<f64>,
    pub modes: Vec<usize>,
    pub alpha_range: (f64, f64),
    pub samples: usize,
    pub include_unperturbed: bool,
    pub tail_correction: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            eccentricity: 10.0 * PI,
            alpha: Coupling::Dirichlet,
            count: 500,
            x0_ratio: DEFAULT_POSITION_RATIO,
            y0_ratio: DEFAULT_POSITION_RATIO,
            basis_cutoff: None,
            amplitude_cutoff: None,
            thresholds: Thresholds::default(),
            grid: (256, 256),
            mode: 1,
            alpha_grid: AlphaGrid::Tan {
                samples: 101,
                clip: 50.0,
            },
            eccentricity_grid: vec![PI / 3.0, 10.0 * PI],
            modes: vec![1, 2, 3, 4],
            alpha_range: (-5.0, 5.0),
            samples: 41,
            include_unperturbed: false,
            tail_correction: true,
        }
    }
}

/// Keys in emission order.
pub const KEYS: &[&str] = &[
    "E",
    "alpha",
    "count",
    "x0_ratio",
    "y0_ratio",
    "basis_cutoff",
    "amplitude_cutoff",
    "threshold_low",
    "threshold_high",
    "grid",
    "mode",
    "alphas",
    "alpha_samples",
    "alpha_clip",
    "E_grid",
    "modes",
    "alpha_range",
    "samples",
    "include_unperturbed",
    "tail_correction",
];

fn malformed(key: &str, value: &str) -> ConfigError {
    ConfigError::Malformed {
        key: key.to_string(),
        value: value.to_string(),
    }
}

fn constraint(key: &str, reason: impl Into<String>) -> ConfigError {
    ConfigError::Constraint {
        key: key.to_string(),
        reason: reason.into(),
    }
}

fn parse_real(key: &str, value: &str) -> Result<f64, ConfigError> {
    let parsed: f64 = value.trim().parse().map_err(|_| malformed(key, value))?;
    if parsed.is_nan() {
        return Err(malformed(key, value));
    }
    Ok(parsed)
}

fn parse_finite(key: &str, value: &str) -> Result<f64, ConfigError> {
    let parsed = parse_real(key, value)?;
    if !parsed.is_finite() {
        return Err(constraint(key, "must be finite"));
    }
    Ok(parsed)
}

fn parse_count(key: &str, value: &str) -> Result<usize, ConfigError> {
    value.trim().parse().map_err(|_| malformed(key, value))
}

fn parse_bool(key: &str, value: &str) -> Result<bool, ConfigError> {
    match value.trim() {
        "true" | "1" | "yes" => Ok(true),
        "false" | "0" | "no" => Ok(false),
        _ => Err(malformed(key, value)),
    }
}

fn parse_list<T>(
    key: &str,
    value: &str,
    item: impl Fn(&str, &str) -> Result<T, ConfigError>,
) -> Result<Vec<T>, ConfigError> {
    let value = value.trim();
    if value.is_empty() {
        return Ok(Vec::new());
    }
    value.split(',').map(|v| item(key, v)).collect()
}

fn parse_ratio(key: &str, value: &str) -> Result<f64, ConfigError> {
    let ratio = parse_real(key, value)?;
    if !(ratio > 0.0 && ratio < 1.0) {
        return Err(constraint(key, format!("{ratio} must lie strictly inside (0, 1)")));
    }
    Ok(ratio)
}

fn parse_positive(key: &str, value: &str) -> Result<f64, ConfigError> {
    let parsed = parse_finite(key, value)?;
    if parsed <= 0.0 {
        return Err(constraint(key, format!("{parsed} must be positive")));
    }
    Ok(parsed)
}

fn join<T: ToString>(items: &[T]) -> String {
    items.iter().map(T::to_string).collect::<Vec<_>>().join(",")
}

impl RunConfig {
    /// Applies one `key=value` setting.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        match key {
            "E" => self.eccentricity = parse_positive(key, value)?,
            "alpha" => {
                let alpha = parse_real(key, value)?;
                self.alpha = Coupling::new(alpha)
                    .map_err(|_| constraint(key, "must lie in (-inf, +inf]"))?;
            }
            "count" => {
                self.count = parse_count(key, value)?;
                if self.count == 0 {
                    return Err(constraint(key, "must be at least 1"));
                }
            }
            "x0_ratio" => self.x0_ratio = parse_ratio(key, value)?,
            "y0_ratio" => self.y0_ratio = parse_ratio(key, value)?,
            "basis_cutoff" => {
                self.basis_cutoff = match value.trim() {
                    "auto" => None,
                    _ => Some(parse_positive(key, value)?),
                }
            }
            "amplitude_cutoff" => {
                self.amplitude_cutoff = match value.trim() {
                    "basis" => None,
                    _ => Some(parse_positive(key, value)?),
                }
            }
            "threshold_low" => {
                let low = parse_finite(key, value)?;
                self.thresholds = Thresholds::new(low, self.thresholds.upper)
                    .map_err(|e| constraint(key, e.to_string()))?;
            }
            "threshold_high" => {
                let high = parse_finite(key, value)?;
                self.thresholds = Thresholds::new(self.thresholds.lower, high)
                    .map_err(|e| constraint(key, e.to_string()))?;
            }
            "grid" => {
                let (nx, ny) = value
                    .trim()
                    .split_once(['x', 'X'])
                    .ok_or_else(|| malformed(key, value))?;
                let grid = (parse_count(key, nx)?, parse_count(key, ny)?);
                if grid.0 < 2 || grid.1 < 2 {
                    return Err(constraint(key, "both dimensions must be at least 2"));
                }
                self.grid = grid;
            }
            "mode" => {
                self.mode = parse_count(key, value)?;
                if self.mode == 0 {
                    return Err(constraint(key, "must be at least 1"));
                }
            }
            "alphas" => {
                let values = parse_list(key, value, parse_finite)?;
                if values.is_empty() {
                    return Err(constraint(key, "grid is empty"));
                }
                self.alpha_grid = AlphaGrid::List(values);
            }
            "alpha_samples" => {
                let samples = parse_count(key, value)?;
                if samples == 0 {
                    return Err(constraint(key, "grid is empty"));
                }
                let clip = match self.alpha_grid {
                    AlphaGrid::Tan { clip, .. } => clip,
                    AlphaGrid::List(_) => 50.0,
                };
                self.alpha_grid = AlphaGrid::Tan { samples, clip };
            }
            "alpha_clip" => {
                let clip = parse_positive(key, value)?;
                let samples = match self.alpha_grid {
                    AlphaGrid::Tan { samples, .. } => samples,
                    AlphaGrid::List(_) => 101,
                };
                self.alpha_grid = AlphaGrid::Tan { samples, clip };
            }
            "E_grid" => {
                let values = parse_list(key, value, parse_positive)?;
                if values.is_empty() {
                    return Err(constraint(key, "grid is empty"));
                }
                self.eccentricity_grid = values;
            }
            "modes" => {
                let modes = parse_list(key, value, parse_count)?;
                if modes.is_empty() || modes.contains(&0) {
                    return Err(constraint(key, "needs one or more positive mode indices"));
                }
                self.modes = modes;
            }
            "alpha_range" => {
                let values = parse_list(key, value, parse_finite)?;
                match values[..] {
                    [lo, hi] if lo < hi => self.alpha_range = (lo, hi),
                    [_, _] => return Err(constraint(key, "lower bound must be below upper")),
                    _ => return Err(malformed(key, value)),
                }
            }
            "samples" => {
                self.samples = parse_count(key, value)?;
                if self.samples < 2 {
                    return Err(constraint(key, "needs at least 2 samples"));
                }
            }
            "include_unperturbed" => self.include_unperturbed = parse_bool(key, value)?,
            "tail_correction" => self.tail_correction = parse_bool(key, value)?,
            _ => return Err(ConfigError::UnknownKey(key.to_string())),
        }
        Ok(())
    }

    /// Applies a flat `key=value` text; `#` starts a comment line.
    pub fn apply_text(&mut self, text: &str) -> Result<(), ConfigError> {
        for (index, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| ConfigError::Syntax {
                line: index + 1,
                text: line.to_string(),
            })?;
            self.set(key.trim(), value.trim())?;
        }
        Ok(())
    }

    pub fn from_text(text: &str) -> Result<Self, ConfigError> {
        let mut config = Self::default();
        config.apply_text(text)?;
        Ok(config)
    }

    /// Fully resolved configuration as `key=value` lines.
    pub fn emit(&self) -> String {
        let mut out = String::new();
        let mut line = |key: &str, value: String| {
            let _ = writeln!(out, "{key}={value}");
        };
        line("E", self.eccentricity.to_string());
        line("alpha", self.alpha.value().to_string());
        line("count", self.count.to_string());
        line("x0_ratio", self.x0_ratio.to_string());
        line("y0_ratio", self.y0_ratio.to_string());
        line(
            "basis_cutoff",
            self.basis_cutoff.map_or("auto".into(), |c| c.to_string()),
        );
        line(
            "amplitude_cutoff",
            self.amplitude_cutoff.map_or("basis".into(), |c| c.to_string()),
        );
        line("threshold_low", self.thresholds.lower.to_string());
        line("threshold_high", self.thresholds.upper.to_string());
        line("grid", format!("{}x{}", self.grid.0, self.grid.1));
        line("mode", self.mode.to_string());
        match &self.alpha_grid {
            AlphaGrid::Tan { samples, clip } => {
                line("alpha_samples", samples.to_string());
                line("alpha_clip", clip.to_string());
            }
            AlphaGrid::List(values) => line("alphas", join(values)),
        }
        line("E_grid", join(&self.eccentricity_grid));
        line("modes", join(&self.modes));
        line(
            "alpha_range",
            format!("{},{}", self.alpha_range.0, self.alpha_range.1),
        );
        line("samples", self.samples.to_string());
        line("include_unperturbed", self.include_unperturbed.to_string());
        line("tail_correction", self.tail_correction.to_string());
        out
    }

    pub fn experiment(&self) -> ExperimentParams {
        ExperimentParams {
            x0_ratio: self.x0_ratio,
            y0_ratio: self.y0_ratio,
            count: self.count,
            cutoff: self
                .basis_cutoff
                .map_or(CutoffPolicy::Auto, CutoffPolicy::Fixed),
            amplitude_cutoff: self.amplitude_cutoff,
            thresholds: self.thresholds,
            include_unperturbed: self.include_unperturbed,
            tail_correction: self.tail_correction,
        }
    }
}
