use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use stable_rd::strength::SourceSpec;

use crate::CliError;

#[derive(Debug, Clone, Parser, Serialize)]
#[command(name = "stable-rd", version, about = "Strength, rate-distortion and quantizer computations for stable sources")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct GlobalArgs {
    /// Output format (default: json for `design`, csv otherwise).
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Units of entropies and rates.
    #[arg(long, global = true, value_enum, default_value_t = Units::Nats)]
    pub units: Units,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Output file. Without it, output goes to `$STABLE_RD_OUT_DIR/<command>.<ext>`
    /// when that variable is set and to standard output otherwise.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Units {
    Nats,
    Bits,
}

impl Units {
    /// Converts a value in nats.
    pub fn from_nats(self, v: f64) -> f64 {
        match self {
            Units::Nats => v,
            Units::Bits => v / std::f64::consts::LN_2,
        }
    }
}

#[derive(Debug, Clone, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Stable density on a grid.
    Pdf(PdfArgs),
    /// Differential entropy of the reference law.
    Entropy(EntropyArgs),
    /// Strength of a source.
    Strength(StrengthArgs),
    /// Rate-distortion curve of a symmetric stable source.
    Rd(RdArgs),
    /// Reverse water-filling over independent components.
    Waterfill(WaterfillArgs),
    /// Strength-optimal quantizer design.
    Design(DesignArgs),
    /// Error strength of the uniform quantizer over a set of widths.
    UniformSweep(UniformSweepArgs),
    /// Regenerates the tables behind one figure (one CSV per curve).
    Reproduce(ReproduceArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Pdf(_) => "pdf",
            Command::Entropy(_) => "entropy",
            Command::Strength(_) => "strength",
            Command::Rd(_) => "rd",
            Command::Waterfill(_) => "waterfill",
            Command::Design(_) => "design",
            Command::UniformSweep(_) => "uniform-sweep",
            Command::Reproduce(_) => "reproduce",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SourceKind {
    Cauchy,
    Gaussian,
    Stable,
    Uniform,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SourceArgs {
    #[arg(long, value_enum, default_value_t = SourceKind::Cauchy)]
    pub source: SourceKind,
    /// Scale γ of a stable source (a Gaussian has σ = γ√2), half-width of a uniform one.
    #[arg(long, default_value_t = 1.0)]
    pub gamma: f64,
    /// Index of a `stable` source.
    #[arg(long)]
    pub source_alpha: Option<f64>,
}

impl SourceArgs {
    /// The source and its own stability index, if it has one.
    pub fn build(&self) -> Result<(SourceSpec, Option<f64>), CliError> {
        let index = match self.source {
            SourceKind::Cauchy => Some(1.0),
            SourceKind::Gaussian => Some(2.0),
            SourceKind::Stable => {
                Some(self.source_alpha.ok_or_else(|| CliError::Usage("--source stable needs --source-alpha".into()))?)
            }
            SourceKind::Uniform => None,
        };
        if self.source != SourceKind::Stable && self.source_alpha.is_some() {
            return Err(CliError::Usage("--source-alpha applies only to --source stable".into()));
        }
        let spec = match index {
            Some(a) => SourceSpec::symmetric_stable(a, self.gamma)?,
            None => SourceSpec::uniform(self.gamma)?,
        };
        Ok((spec, index))
    }

    /// `alpha` if given, else the source's own index.
    pub fn resolve_alpha(&self, alpha: Option<f64>) -> Result<f64, CliError> {
        let (_, own) = self.build()?;
        alpha.or(own).ok_or_else(|| CliError::Usage("--alpha is required for a uniform source".into()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PdfMethod {
    Auto,
    Inversion,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct PdfArgs {
    #[arg(long)]
    pub alpha: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub beta: f64,
    #[arg(long, default_value_t = 1.0)]
    pub gamma: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub delta: f64,
    #[arg(long, default_value_t = -5.0, allow_hyphen_values = true)]
    pub xmin: f64,
    #[arg(long, default_value_t = 5.0, allow_hyphen_values = true)]
    pub xmax: f64,
    #[arg(long, default_value_t = 101)]
    pub steps: usize,
    #[arg(long, value_enum, default_value_t = PdfMethod::Auto)]
    pub method: PdfMethod,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct EntropyArgs {
    #[arg(long)]
    pub alpha: f64,
    #[arg(long, default_value_t = 1)]
    pub dim: usize,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct StrengthArgs {
    /// Index of the strength.
    #[arg(long)]
    pub alpha: f64,
    /// Strength of Uniform(−½, ½); source options are ignored.
    #[arg(long, conflicts_with = "samples")]
    pub uniform: bool,
    #[command(flatten)]
    #[serde(flatten)]
    pub source: SourceArgs,
    /// File of whitespace-separated samples, used as an empirical source.
    #[arg(long)]
    pub samples: Option<PathBuf>,
    #[arg(long, default_value_t = stable_rd::strength::DEFAULT_TOL)]
    pub tol: f64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct RdArgs {
    #[arg(long)]
    pub alpha: f64,
    #[arg(long)]
    pub gamma: f64,
    #[arg(long)]
    pub dmin: f64,
    #[arg(long)]
    pub dmax: f64,
    #[arg(long, default_value_t = 50)]
    pub steps: usize,
    /// Dimension of a sub-Gaussian vector source.
    #[arg(long, default_value_t = 1)]
    pub dim: usize,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct WaterfillArgs {
    #[arg(long)]
    pub alpha: f64,
    /// Component strengths, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    pub strengths: Vec<f64>,
    /// Total distortion.
    #[arg(long)]
    pub distortion: f64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct DesignArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub source: SourceArgs,
    /// Index of the error strength (default: the source's index).
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Number of levels.
    #[arg(long = "M")]
    pub levels: usize,
    /// Stop when an iteration improves the strength by less than this.
    #[arg(long)]
    pub tol: Option<f64>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct UniformSweepArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub source: SourceArgs,
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Cell widths, comma separated.
    #[arg(long, value_delimiter = ',', default_values_t = [1.0, 0.5, 0.2, 0.1, 0.05, 0.02, 0.01])]
    pub deltas: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Figure {
    Fig1,
    Fig2,
    Fig3,
    Fig4,
    Fig5,
    All,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ReproduceArgs {
    #[arg(long, value_enum)]
    pub figure: Figure,
    /// Directory for the curve files (default: `$STABLE_RD_OUT_DIR`, else `figures`).
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
    /// Largest M for which quantizers are designed in fig4/fig5.
    #[arg(long, default_value_t = crate::defaults::DESIGNED_MAX_LEVELS)]
    pub max_designed_levels: usize,
}
