use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

/// Audio-visual deepfake detection: feature extraction, training,
/// evaluation and OR-fusion of per-modality verdicts.
#[derive(Debug, Parser)]
#[command(name = "deepfuse", version)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// TOML run configuration; command-line flags override it.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Master seed for every random stream.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads for file-level extraction.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// Override one configuration key, e.g. `--set epochs=50`. Repeatable.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE", value_parser = parse_key_value)]
    pub overrides: Vec<(String, String)>,
    /// More log output on standard error (repeatable).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,
    /// Only log errors.
    #[arg(short, long, global = true)]
    pub quiet: bool,
}

fn parse_key_value(s: &str) -> Result<(String, String), String> {
    let (k, v) = s.split_once('=').ok_or_else(|| format!("expected KEY=VALUE, got '{s}'"))?;
    let k = k.trim();
    if k.is_empty() {
        return Err(format!("empty key in '{s}'"));
    }
    Ok((k.to_string(), v.trim().to_string()))
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Extract the 13 video features from a directory of landmark bundles.
    ExtractVideo(ExtractVideoArgs),
    /// Compute mel spectrograms for a directory of WAV files.
    ExtractAudio(ExtractAudioArgs),
    /// Train a classifier on a feature CSV (ann, tree, forest) or a spectrogram index (cnn).
    Train(TrainArgs),
    /// Score a trained model on labelled data.
    Evaluate(EvaluateArgs),
    /// Pair videos with audio clips into the four label categories.
    Assemble(AssembleArgs),
    /// Combine video and audio verdicts and tabulate per-category accuracy.
    Fuse(FuseArgs),
    /// Permutation feature importance of a tabular model.
    Importance(ImportanceArgs),
    /// Write a small synthetic labelled set of bundles and WAV clips.
    GenFixtures(GenFixturesArgs),
}

#[derive(Debug, Args)]
pub struct ExtractVideoArgs {
    /// Directory of landmark bundle JSON files.
    pub bundles: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// CSV with columns id,label.
    #[arg(long)]
    pub labels: Option<PathBuf>,
    /// Frame sampling stride.
    #[arg(long)]
    pub stride: Option<usize>,
}

#[derive(Debug, Args)]
pub struct ExtractAudioArgs {
    /// Directory of WAV files.
    pub wavs: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// CSV with columns id,label.
    #[arg(long)]
    pub labels: Option<PathBuf>,
    /// Also write a grayscale PGM rendering of each spectrogram.
    #[arg(long)]
    pub pgm: bool,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    /// ann | cnn | tree | forest
    #[arg(long)]
    pub kind: String,
    /// Feature CSV, or the index.csv written by extract-audio for cnn.
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// Training epochs (ann and cnn).
    #[arg(long)]
    pub epochs: Option<usize>,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long)]
    pub data: PathBuf,
    /// Restrict to the test rows of a split.csv written by train.
    #[arg(long)]
    pub split: Option<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct AssembleArgs {
    /// Labelled video feature CSV.
    #[arg(long)]
    pub video_data: PathBuf,
    /// Labelled audio data: spectrogram index.csv or feature CSV.
    #[arg(long)]
    pub audio_data: PathBuf,
    /// Only pair the test rows of this video split.csv.
    #[arg(long)]
    pub video_split: Option<PathBuf>,
    /// Only pair the test rows of this audio split.csv.
    #[arg(long)]
    pub audio_split: Option<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct FuseArgs {
    #[arg(long)]
    pub video_model: PathBuf,
    #[arg(long)]
    pub video_data: PathBuf,
    #[arg(long)]
    pub audio_model: PathBuf,
    #[arg(long)]
    pub audio_data: PathBuf,
    /// pairs.csv written by assemble.
    #[arg(long)]
    pub pairs: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ImportanceArgs {
    #[arg(long)]
    pub model: PathBuf,
    /// Labelled feature CSV.
    #[arg(long)]
    pub data: PathBuf,
    /// Restrict to the test rows of a split.csv written by train.
    #[arg(long)]
    pub split: Option<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct GenFixturesArgs {
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 5)]
    pub videos: usize,
    #[arg(long, default_value_t = 5)]
    pub clips: usize,
}
