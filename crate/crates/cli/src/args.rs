//! Command-line arguments.

use std::num::NonZeroUsize;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::config::{
    LossName, Method, ModelKind, OutputFormat, Params, PerturbName, RunConfig, ShapleyModeName,
};
use crate::error::{CliError, CliResult};

#[derive(Debug, Parser)]
#[command(
    name = "interpret",
    version,
    about = "Feature effects and feature importance for tabular models"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Default, Args)]
pub struct GlobalArgs {
    /// Input CSV file.
    #[arg(long, global = true)]
    pub data: Option<PathBuf>,
    /// Model file written by `fit`.
    #[arg(long, global = true)]
    pub model: Option<PathBuf>,
    /// Name of the target column.
    #[arg(long, global = true)]
    pub target: Option<String>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output file; stdout when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<OutputFormat>,
    /// Worker threads for prediction. Never changes any output value.
    #[arg(long, global = true)]
    pub threads: Option<NonZeroUsize>,
    /// Columns forced to categorical.
    #[arg(long, global = true, value_delimiter = ',')]
    pub categorical: Vec<String>,
    /// Columns forced to continuous.
    #[arg(long, global = true, value_delimiter = ',')]
    pub continuous: Vec<String>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Individual conditional expectation curves.
    Ice(MethodArgs),
    /// Partial dependence curve over one or more features.
    Pd(MethodArgs),
    /// First-order accumulated local effects.
    Ale(MethodArgs),
    /// Marginal effect at one point.
    Me(MethodArgs),
    /// Average marginal effect.
    Ame(MethodArgs),
    /// Shapley attributions for one point.
    Shapley(MethodArgs),
    /// Local linear surrogate for one point.
    Lime(MethodArgs),
    /// Standard deviation of the partial dependence.
    PdImportance(MethodArgs),
    /// Feature importance ranking measure.
    Firm(MethodArgs),
    /// Permutation feature importance.
    Pfi(MethodArgs),
    /// Individual conditional importance curve of one observation.
    Ici(MethodArgs),
    /// Partial importance curve.
    Pi(MethodArgs),
    /// Shapley feature importance.
    Sfimp(MethodArgs),
    /// Fit a reference model and write it to --out.
    Fit(MethodArgs),
    /// Run a JSON configuration file. Global flags override its values.
    Run { config: PathBuf },
}

#[derive(Debug, Clone, Default, Args)]
pub struct MethodArgs {
    /// Feature name; repeat or separate with commas.
    #[arg(long = "feature", short = 'f', value_delimiter = ',')]
    pub features: Vec<String>,
    /// observed, equidistant:K or values:v1,v2,...
    #[arg(long)]
    pub grid: Option<String>,
    #[arg(long)]
    pub intervals: Option<usize>,
    /// Finite-difference step.
    #[arg(long)]
    pub h: Option<f64>,
    /// Explained observation, 0-based.
    #[arg(long)]
    pub row: Option<usize>,
    /// Explained point, one comma-separated value per feature.
    #[arg(long, value_delimiter = ',')]
    pub point: Option<Vec<String>>,
    #[arg(long, value_enum)]
    pub mode: Option<ShapleyModeName>,
    #[arg(long)]
    pub iterations: Option<usize>,
    /// Largest feature count for exact Shapley enumeration.
    #[arg(long)]
    pub cap: Option<usize>,
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub kernel_width: Option<f64>,
    #[arg(long, value_enum)]
    pub loss: Option<LossName>,
    /// Decision threshold of the zero-one loss.
    #[arg(long)]
    pub threshold: Option<f64>,
    #[arg(long)]
    pub repeats: Option<usize>,
    /// Average over every substitution instead of random permutations.
    #[arg(long)]
    pub exhaustive: bool,
    #[arg(long, value_enum)]
    pub perturb: Option<PerturbName>,
    /// Model kind for `fit`.
    #[arg(long, value_enum)]
    pub kind: Option<ModelKind>,
    /// Neighbours for a knn model.
    #[arg(long)]
    pub k: Option<usize>,
}

impl MethodArgs {
    fn params(self) -> (Vec<String>, Params) {
        let params = Params {
            grid: self.grid,
            intervals: self.intervals,
            h: self.h,
            row: self.row,
            point: self.point,
            mode: self.mode,
            iterations: self.iterations,
            cap: self.cap,
            samples: self.samples,
            kernel_width: self.kernel_width,
            loss: self.loss,
            threshold: self.threshold,
            repeats: self.repeats,
            exhaustive: self.exhaustive,
            perturb: self.perturb,
            kind: self.kind,
            k: self.k,
        };
        (self.features, params)
    }
}

impl GlobalArgs {
    fn apply(self, config: &mut RunConfig) {
        if let Some(d) = self.data {
            config.data = d;
        }
        if self.model.is_some() {
            config.model = self.model;
        }
        if self.target.is_some() {
            config.target = self.target;
        }
        if let Some(s) = self.seed {
            config.seed = s;
        }
        if self.out.is_some() {
            config.out = self.out;
        }
        if let Some(f) = self.format {
            config.format = f;
        }
        if let Some(t) = self.threads {
            config.threads = t.get();
        }
        if !self.categorical.is_empty() {
            config.categorical = self.categorical;
        }
        if !self.continuous.is_empty() {
            config.continuous = self.continuous;
        }
    }
}

impl Cli {
    /// Resolves the arguments into a validated run configuration.
    pub fn into_config(self) -> CliResult<RunConfig> {
        let (method, args) = match self.command {
            Command::Run { config } => {
                let text = std::fs::read_to_string(&config)
                    .map_err(|e| CliError::usage(format!("cannot read config {}: {e}", config.display())))?;
                let mut cfg = RunConfig::from_json(&text)?;
                self.global.apply(&mut cfg);
                cfg.validate()?;
                return Ok(cfg);
            }
            Command::Ice(a) => (Method::Ice, a),
            Command::Pd(a) => (Method::Pd, a),
            Command::Ale(a) => (Method::Ale, a),
            Command::Me(a) => (Method::Me, a),
            Command::Ame(a) => (Method::Ame, a),
            Command::Shapley(a) => (Method::Shapley, a),
            Command::Lime(a) => (Method::Lime, a),
            Command::PdImportance(a) => (Method::PdImportance, a),
            Command::Firm(a) => (Method::Firm, a),
            Command::Pfi(a) => (Method::Pfi, a),
            Command::Ici(a) => (Method::Ici, a),
            Command::Pi(a) => (Method::Pi, a),
            Command::Sfimp(a) => (Method::Sfimp, a),
            Command::Fit(a) => (Method::Fit, a),
        };
        let data = self
            .global
            .data
            .clone()
            .ok_or_else(|| CliError::usage("--data is required"))?;
        let (features, params) = args.params();
        let mut cfg = RunConfig {
            method,
            data,
            model: None,
            target: None,
            categorical: Vec::new(),
            continuous: Vec::new(),
            features,
            params,
            seed: 0,
            out: None,
            format: OutputFormat::Json,
            threads: 1,
        };
        self.global.apply(&mut cfg);
        cfg.validate()?;
        Ok(cfg)
    }
}
