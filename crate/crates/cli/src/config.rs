//! Run configuration shared by the subcommands and `run <config.json>`.

use std::path::PathBuf;

use clap::ValueEnum;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Ice,
    Pd,
    Ale,
    Me,
    Ame,
    Shapley,
    Lime,
    PdImportance,
    Firm,
    Pfi,
    Ici,
    Pi,
    Sfimp,
    Fit,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Ice => "ice",
            Method::Pd => "pd",
            Method::Ale => "ale",
            Method::Me => "me",
            Method::Ame => "ame",
            Method::Shapley => "shapley",
            Method::Lime => "lime",
            Method::PdImportance => "pd-importance",
            Method::Firm => "firm",
            Method::Pfi => "pfi",
            Method::Ici => "ici",
            Method::Pi => "pi",
            Method::Sfimp => "sfimp",
            Method::Fit => "fit",
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum OutputFormat {
    #[default]
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum LossName {
    Squared,
    Absolute,
    ZeroOne,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum ShapleyModeName {
    Exact,
    Mc,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum PerturbName {
    Exhaustive,
    Permutation,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum ModelKind {
    Linear,
    Knn,
    Stump,
}

/// Method parameters. Each method reads the fields it needs; defaults are
/// applied at dispatch time and echoed in the output document.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Params {
    /// `observed`, `equidistant:K` or `values:v1,v2,...`.
    pub grid: Option<String>,
    pub intervals: Option<usize>,
    pub h: Option<f64>,
    /// Explained observation (0-based row of the data file).
    pub row: Option<usize>,
    /// Explained point, one entry per feature; categorical entries by level name.
    pub point: Option<Vec<String>>,
    pub mode: Option<ShapleyModeName>,
    pub iterations: Option<usize>,
    pub cap: Option<usize>,
    pub samples: Option<usize>,
    pub kernel_width: Option<f64>,
    pub loss: Option<LossName>,
    pub threshold: Option<f64>,
    pub repeats: Option<usize>,
    pub exhaustive: bool,
    pub perturb: Option<PerturbName>,
    pub kind: Option<ModelKind>,
    pub k: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub method: Method,
    pub data: PathBuf,
    #[serde(default)]
    pub model: Option<PathBuf>,
    #[serde(default)]
    pub target: Option<String>,
    #[serde(default)]
    pub categorical: Vec<String>,
    #[serde(default)]
    pub continuous: Vec<String>,
    /// Feature names the method applies to.
    #[serde(default)]
    pub features: Vec<String>,
    #[serde(default)]
    pub params: Params,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub format: OutputFormat,
    #[serde(default = "one")]
    pub threads: usize,
}

fn one() -> usize {
    1
}

fn at_least(name: &str, value: Option<usize>, min: usize) -> CliResult<()> {
    match value {
        Some(v) if v < min => Err(CliError::usage(format!("{name} must be at least {min}, got {v}"))),
        _ => Ok(()),
    }
}

fn positive(name: &str, value: Option<f64>) -> CliResult<()> {
    match value {
        Some(v) if !(v > 0.0 && v.is_finite()) => Err(CliError::usage(format!(
            "{name} must be a positive number, got {v}"
        ))),
        _ => Ok(()),
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> CliResult<Self> {
        let config: RunConfig =
            serde_json::from_str(text).map_err(|e| CliError::usage(format!("config: {e}")))?;
        config.validate()?;
        Ok(config)
    }

    /// Range checks that do not need the data.
    pub fn validate(&self) -> CliResult<()> {
        let p = &self.params;
        if self.threads == 0 {
            return Err(CliError::usage("threads must be at least 1"));
        }
        at_least("intervals", p.intervals, 1)?;
        at_least("iterations", p.iterations, 1)?;
        at_least("samples", p.samples, 3)?;
        at_least("repeats", p.repeats, 1)?;
        at_least("k", p.k, 1)?;
        at_least("cap", p.cap, 1)?;
        positive("h", p.h)?;
        positive("kernel_width", p.kernel_width)?;
        if let Some(t) = p.threshold {
            if !t.is_finite() {
                return Err(CliError::usage("threshold must be finite"));
            }
        }
        if p.row.is_some() && p.point.is_some() {
            return Err(CliError::usage("give either row or point, not both"));
        }
        let needs_one = matches!(
            self.method,
            Method::Ice
                | Method::Ale
                | Method::Me
                | Method::Ame
                | Method::Lime
                | Method::PdImportance
                | Method::Firm
                | Method::Pfi
                | Method::Ici
                | Method::Pi
        );
        if needs_one && self.features.len() != 1 {
            return Err(CliError::usage(format!(
                "{} needs exactly one feature, got {}",
                self.method.as_str(),
                self.features.len()
            )));
        }
        if self.method == Method::Pd && self.features.is_empty() {
            return Err(CliError::usage("pd needs at least one feature"));
        }
        let needs_point = matches!(
            self.method,
            Method::Me | Method::Shapley | Method::Lime | Method::Ici
        );
        if needs_point && p.row.is_none() && (p.point.is_none() || self.method == Method::Ici) {
            return Err(CliError::usage(format!(
                "{} needs an explained observation (row{})",
                self.method.as_str(),
                if self.method == Method::Ici {
                    ""
                } else {
                    " or point"
                }
            )));
        }
        if self.method == Method::Fit {
            if p.kind.is_none() {
                return Err(CliError::usage("fit needs a model kind"));
            }
            if self.out.is_none() {
                return Err(CliError::usage("fit needs --out for the model file"));
            }
            if self.target.is_none() {
                return Err(CliError::usage("fit needs --target"));
            }
        } else if self.model.is_none() {
            return Err(CliError::usage(format!("{} needs --model", self.method.as_str())));
        }
        Ok(())
    }
}
