use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use oodgate::{DetectorConfig, Preset, ReactMode, ScoreMethod};

use crate::CliError;

#[derive(Debug, Parser)]
#[command(
    name = "oodgate",
    version,
    about = "Post-hoc OOD scoring on exported penultimate features"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

/// Feature inputs are `PATH[#SET]`. A `.csv` path goes through the CSV
/// importer; an OODF path with several feature sets needs `#SET` unless the
/// subcommand's default set name is present.
#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write the seeded synthetic benchmark (head plus train, test_id, test_ood).
    Gen(GenArgs),
    /// Fit a detector on labelled training features.
    Fit(FitArgs),
    /// Score every sample: index, predicted class, cosine, score.
    Score(ScoreArgs),
    /// FPR at 95% TPR and AUROC for an ID/OOD pair.
    Eval(EvalArgs),
    /// Refit and evaluate over a (p, λ) grid.
    Sweep(SweepArgs),
    /// Evaluate the six stage combinations of one fitted detector.
    Ablate(AblateArgs),
    /// Cosine and score histograms for the ID and OOD sets.
    Diag(DiagArgs),
    /// Re-run the command recorded in a run manifest.
    Replay(ReplayArgs),
}

#[derive(Debug, Args)]
pub struct GenArgs {
    /// Comma-separated overrides: l, c, n-id, n-ood, sep, std, ood, seed.
    #[arg(long, default_value = "")]
    pub spec: String,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ConfigArgs {
    /// Named operating point; explicit --p / --lambda take precedence.
    #[arg(long)]
    pub preset: Option<Preset>,
    /// Masking percentile in [0, 100).
    #[arg(long = "p")]
    pub p: Option<f64>,
    /// ReAct threshold, `inf` to disable clipping.
    #[arg(long, conflicts_with = "lambda_percentile")]
    pub lambda: Option<f64>,
    /// Set λ to this percentile of all training activations.
    #[arg(long)]
    pub lambda_percentile: Option<f64>,
    /// energy, msp, odin[:T], mahalanobis or energy-react.
    #[arg(long, default_value = "energy")]
    pub method: ScoreMethod,
    #[arg(long)]
    pub no_mask: bool,
    #[arg(long)]
    pub no_react: bool,
    #[arg(long)]
    pub no_smoothing: bool,
}

impl ConfigArgs {
    pub fn resolve(&self) -> Result<DetectorConfig, CliError> {
        let mut config = self.preset.map(Preset::config).unwrap_or_default();
        if let Some(p) = self.p {
            config.masking_percentile = p;
        }
        if let Some(l) = self.lambda {
            config.react_mode = ReactMode::Explicit(l);
        }
        if let Some(q) = self.lambda_percentile {
            config.react_mode = ReactMode::Percentile(q);
        }
        config.score_method = self.method;
        config = config.with_stages(!self.no_react, !self.no_mask, !self.no_smoothing);
        config.validate().map_err(CliError::usage)?;
        Ok(config)
    }
}

#[derive(Debug, Args)]
pub struct FitArgs {
    /// Labelled training features (default set: train).
    #[arg(long)]
    pub train: String,
    /// OODF file holding the head, when the training input has none.
    #[arg(long)]
    pub head: Option<PathBuf>,
    #[command(flatten)]
    pub config: ConfigArgs,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ScoreArgs {
    #[arg(long)]
    pub detector: PathBuf,
    /// Features to score (default set: test_id).
    #[arg(long = "in")]
    pub input: String,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[arg(long)]
    pub detector: PathBuf,
    /// In-distribution features (default set: test_id).
    #[arg(long)]
    pub id: String,
    /// Out-of-distribution features (default set: test_ood).
    #[arg(long)]
    pub ood: String,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long)]
    pub train: String,
    #[arg(long)]
    pub head: Option<PathBuf>,
    #[arg(long)]
    pub id: String,
    #[arg(long)]
    pub ood: String,
    /// `p=AXIS,lambda=AXIS`, each axis `start:stop:step`, `v1|v2|...` or a single value.
    #[arg(long)]
    pub grid: String,
    #[command(flatten)]
    pub config: ConfigArgs,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct AblateArgs {
    #[arg(long)]
    pub detector: PathBuf,
    #[arg(long)]
    pub id: String,
    #[arg(long)]
    pub ood: String,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct DiagArgs {
    #[arg(long)]
    pub detector: PathBuf,
    #[arg(long)]
    pub id: String,
    #[arg(long)]
    pub ood: String,
    #[arg(long, default_value_t = 20, value_parser = clap::value_parser!(u32).range(1..))]
    pub bins: u32,
    #[arg(long)]
    pub out_dir: PathBuf,
}

#[derive(Debug, Args)]
pub struct ReplayArgs {
    pub manifest: PathBuf,
}
