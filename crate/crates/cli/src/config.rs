//! Experiment configuration: a single TOML file.
//!
//! ```toml
//! mode = "ed-sff"          # ed-sff | pqc-sff | spectrum | csr | phase-grid | depth-grid
//! master_seed = 1
//! realizations = 100
//!
//! [model]
//! d = 32
//! sigma = 1.0
//! hbar = 1.0
//! k = 3                    # Kraus operators; the unitary is CUE(k d)
//! beta = 0.0
//! column_offset = 1
//!
//! [ed]
//! gamma = [0.1, 4.0]
//!
//! [channel]
//! tau = [0.01]
//! epsilon = [0.1]
//! form = "mixture"         # or "interleaved"
//!
//! [time]
//! kind = "log"             # or "linear"
//! t_min = 0.01
//! t_max = 50.0             # defaults to 4 t_H
//! points = 400
//!
//! [spectrum]
//! bins = 256
//! extent = 1.05
//! margin = 0.02
//!
//! [output]
//! directory = "pqc-out"
//! format = "csv"           # csv | json | both
//! ```
//!
//! Every section and every field except `mode` may be omitted.

use std::fmt;
use std::path::{Path, PathBuf};

use pqc_core::pqc::ChannelForm;
use pqc_core::rmt::heisenberg_time;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    EdSff,
    PqcSff,
    Spectrum,
    Csr,
    PhaseGrid,
    DepthGrid,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::EdSff => "ed-sff",
            Mode::PqcSff => "pqc-sff",
            Mode::Spectrum => "spectrum",
            Mode::Csr => "csr",
            Mode::PhaseGrid => "phase-grid",
            Mode::DepthGrid => "depth-grid",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub mode: Mode,
    #[serde(default = "default_seed")]
    pub master_seed: u64,
    #[serde(default = "default_realizations")]
    pub realizations: usize,
    #[serde(default)]
    pub model: ModelConfig,
    #[serde(default)]
    pub ed: EdConfig,
    #[serde(default)]
    pub channel: ChannelConfig,
    #[serde(default)]
    pub time: TimeConfig,
    #[serde(default)]
    pub spectrum: SpectrumConfig,
    #[serde(default)]
    pub output: OutputConfig,
}

fn default_seed() -> u64 {
    1
}

fn default_realizations() -> usize {
    100
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ModelConfig {
    pub d: usize,
    pub sigma: f64,
    pub hbar: f64,
    pub k: usize,
    pub beta: f64,
    pub column_offset: usize,
}

impl Default for ModelConfig {
    fn default() -> Self {
        Self {
            d: 32,
            sigma: 1.0,
            hbar: 1.0,
            k: 3,
            beta: 0.0,
            column_offset: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EdConfig {
    pub gamma: Vec<f64>,
}

impl Default for EdConfig {
    fn default() -> Self {
        Self {
            gamma: vec![0.1, 4.0],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ChannelConfig {
    pub tau: Vec<f64>,
    pub epsilon: Vec<f64>,
    pub form: ChannelForm,
}

impl Default for ChannelConfig {
    fn default() -> Self {
        Self {
            tau: vec![0.01],
            epsilon: vec![0.1],
            form: ChannelForm::Mixture,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GridKind {
    Log,
    Linear,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TimeConfig {
    pub kind: GridKind,
    pub t_min: f64,
    pub t_max: Option<f64>,
    pub points: usize,
}

impl Default for TimeConfig {
    fn default() -> Self {
        Self {
            kind: GridKind::Log,
            t_min: 1e-2,
            t_max: None,
            points: pqc_core::grid::DEFAULT_LOG_POINTS,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SpectrumConfig {
    pub bins: usize,
    pub extent: f64,
    /// Dilation of the analytic boundary when counting contained eigenvalues.
    pub margin: f64,
}

impl Default for SpectrumConfig {
    fn default() -> Self {
        Self {
            bins: pqc_core::spectral::DensityGrid::DEFAULT_BINS,
            extent: pqc_core::spectral::DensityGrid::DEFAULT_EXTENT,
            margin: 0.02,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OutputFormat {
    Csv,
    Json,
    Both,
}

impl OutputFormat {
    pub fn csv(self) -> bool {
        matches!(self, OutputFormat::Csv | OutputFormat::Both)
    }

    pub fn json(self) -> bool {
        matches!(self, OutputFormat::Json | OutputFormat::Both)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    pub directory: PathBuf,
    pub format: OutputFormat,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self {
            directory: PathBuf::from("pqc-out"),
            format: OutputFormat::Csv,
        }
    }
}

/// One offending field.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FieldError {
    pub field: String,
    pub message: String,
}

impl fmt::Display for FieldError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.field, self.message)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("cannot parse {path}: {message}")]
    Parse { path: PathBuf, message: String },
    #[error("invalid configuration:\n{}", list(.0))]
    Invalid(Vec<FieldError>),
}

fn list(errors: &[FieldError]) -> String {
    errors
        .iter()
        .map(|e| format!("  {e}"))
        .collect::<Vec<_>>()
        .join("\n")
}

/// Dimension and realization count of a full-size run.
pub const FULL_SCALE_DIM: usize = 64;
pub const FULL_SCALE_REALIZATIONS: usize = 500;

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self, String> {
        toml::from_str(text).map_err(|e| e.to_string())
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_toml(&text).map_err(|message| ConfigError::Parse {
            path: path.to_path_buf(),
            message,
        })
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("configuration serializes")
    }

    pub fn apply_full_scale(&mut self) {
        self.model.d = FULL_SCALE_DIM;
        self.realizations = FULL_SCALE_REALIZATIONS;
    }

    pub fn heisenberg_time(&self) -> f64 {
        heisenberg_time(self.model.d, self.model.sigma, self.model.hbar)
    }

    /// `t_max`, or `4 t_H` when unset.
    pub fn t_max(&self) -> f64 {
        self.time
            .t_max
            .unwrap_or_else(|| 4.0 * self.heisenberg_time())
    }

    pub fn times(&self) -> pqc_core::Result<Vec<f64>> {
        match self.time.kind {
            GridKind::Log => {
                pqc_core::grid::log_grid(self.time.t_min, self.t_max(), self.time.points)
            }
            GridKind::Linear => {
                pqc_core::grid::linear_grid(self.time.t_min, self.t_max(), self.time.points)
            }
        }
    }

    /// `(τ, ε)` pairs, `τ` outermost.
    pub fn channel_grid(&self) -> Vec<(f64, f64)> {
        let mut out = Vec::with_capacity(self.channel.tau.len() * self.channel.epsilon.len());
        for &tau in &self.channel.tau {
            for &eps in &self.channel.epsilon {
                out.push((tau, eps));
            }
        }
        out
    }

    /// Every problem with the configuration; empty when it is usable.
    pub fn validate(&self) -> Vec<FieldError> {
        let mut errs = Vec::new();
        let mut check = |ok: bool, field: &str, message: String| {
            if !ok {
                errs.push(FieldError {
                    field: field.to_string(),
                    message,
                });
            }
        };
        let m = &self.model;
        check(
            self.realizations >= 1,
            "realizations",
            "must be at least 1".into(),
        );
        check(
            m.d >= 2,
            "model.d",
            format!("{} is below the minimum 2", m.d),
        );
        check(
            m.sigma.is_finite() && m.sigma > 0.0,
            "model.sigma",
            format!("{} must be positive", m.sigma),
        );
        check(
            m.hbar.is_finite() && m.hbar > 0.0,
            "model.hbar",
            format!("{} must be positive", m.hbar),
        );
        check(m.k >= 1, "model.k", "must be at least 1".into());
        check(
            m.beta.is_finite() && m.beta >= 0.0,
            "model.beta",
            format!("{} must be non-negative", m.beta),
        );
        if m.k > 1 {
            let max = m.d * (m.k - 1);
            check(
                (1..=max).contains(&m.column_offset),
                "model.column_offset",
                format!("{} is outside 1..={max}", m.column_offset),
            );
        }

        let needs_time = matches!(self.mode, Mode::EdSff | Mode::PqcSff | Mode::DepthGrid);
        if needs_time {
            let t = &self.time;
            let t_max = self.t_max();
            let min_ok = match t.kind {
                GridKind::Log => t.t_min > 0.0,
                GridKind::Linear => t.t_min >= 0.0,
            };
            check(
                min_ok && t.t_min.is_finite(),
                "time.t_min",
                format!("{} is not a valid start time", t.t_min),
            );
            check(
                t_max.is_finite() && t_max > t.t_min,
                "time.t_max",
                format!("{t_max} must exceed t_min"),
            );
            check(
                t.points >= 2,
                "time.points",
                format!("{} is below the minimum 2", t.points),
            );
        }

        match self.mode {
            Mode::EdSff => {
                check(
                    !self.ed.gamma.is_empty(),
                    "ed.gamma",
                    "grid is empty".into(),
                );
                for (i, g) in self.ed.gamma.iter().enumerate() {
                    check(
                        g.is_finite() && *g >= 0.0,
                        &format!("ed.gamma[{i}]"),
                        format!("{g} must be non-negative"),
                    );
                }
            }
            _ => {
                check(
                    !self.channel.tau.is_empty(),
                    "channel.tau",
                    "grid is empty".into(),
                );
                check(
                    !self.channel.epsilon.is_empty(),
                    "channel.epsilon",
                    "grid is empty".into(),
                );
                for (i, t) in self.channel.tau.iter().enumerate() {
                    check(
                        t.is_finite() && *t > 0.0,
                        &format!("channel.tau[{i}]"),
                        format!("{t} must be positive"),
                    );
                }
                for (i, e) in self.channel.epsilon.iter().enumerate() {
                    check(
                        (0.0..=1.0).contains(e),
                        &format!("channel.epsilon[{i}]"),
                        format!("{e} is outside [0, 1]"),
                    );
                }
            }
        }

        if matches!(self.mode, Mode::Spectrum) {
            let s = &self.spectrum;
            check(s.bins >= 1, "spectrum.bins", "must be at least 1".into());
            check(
                s.extent.is_finite() && s.extent > 0.0,
                "spectrum.extent",
                format!("{} must be positive", s.extent),
            );
            check(
                s.margin.is_finite() && s.margin >= 0.0,
                "spectrum.margin",
                format!("{} must be non-negative", s.margin),
            );
        }
        errs
    }

    /// Parsed and validated in one go.
    pub fn load_valid(path: &Path) -> Result<Self, ConfigError> {
        let cfg = Self::load(path)?;
        let errs = cfg.validate();
        if errs.is_empty() {
            Ok(cfg)
        } else {
            Err(ConfigError::Invalid(errs))
        }
    }
}
