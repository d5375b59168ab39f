use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use deepfuse_audio::{mel_spectrogram, render_pgm, write_matrix};
use deepfuse_core::{read_landmark_bundle, read_wav, write_feature_csv, write_pgm, Label, VideoFeatureVector};
use deepfuse_vision::extract_video_features;
use rayon::prelude::*;

use super::{create_out_dir, write_text};
use crate::cli::{ExtractAudioArgs, ExtractVideoArgs};
use crate::config::RunConfig;
use crate::data::{file_stem, list_files, read_labels, write_index, IndexRow};
use crate::error::{CliError, Result};
use crate::manifest::ManifestBuilder;

pub const FEATURES_CSV: &str = "features.csv";
pub const EXTRACTION_LOG: &str = "extraction.log";
pub const INDEX_CSV: &str = "index.csv";

fn thread_pool(jobs: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| CliError::Usage(format!("thread pool: {e}")))
}

fn load_labels(path: Option<&Path>, manifest: &mut ManifestBuilder) -> Result<BTreeMap<String, Label>> {
    match path {
        Some(p) => {
            manifest.input_file(p)?;
            read_labels(p)
        }
        None => Ok(BTreeMap::new()),
    }
}

struct VideoOutcome {
    inputs: Vec<PathBuf>,
    result: Result<(VideoFeatureVector, Vec<String>)>,
}

fn extract_one(path: &Path, labels: &BTreeMap<String, Label>, cfg: &deepfuse_vision::ExtractConfig) -> VideoOutcome {
    let mut inputs = vec![path.to_path_buf()];
    let result = (|| {
        let bundle = read_landmark_bundle(path)?;
        inputs.extend(bundle.roi_refs.iter().map(|r| bundle.resolve(&r.path)));
        let label = labels.get(&bundle.video_id).copied();
        let ex = extract_video_features(&bundle, label, cfg)?;
        Ok((ex.vector, ex.notes.iter().map(ToString::to_string).collect()))
    })();
    VideoOutcome { inputs, result }
}

pub fn extract_video(args: &ExtractVideoArgs, cfg: &RunConfig) -> Result<()> {
    let mut cfg = cfg.clone();
    if let Some(s) = args.stride {
        cfg.stride = s;
        cfg.validate()?;
    }
    let files = list_files(&args.bundles, "json")?;
    if files.is_empty() {
        return Err(CliError::Data(format!("no bundle files in {}", args.bundles.display())));
    }
    create_out_dir(&args.out)?;
    let mut manifest = ManifestBuilder::new("extract-video", &cfg, &args.out);
    manifest.option("stride", cfg.stride);
    let labels = load_labels(args.labels.as_deref(), &mut manifest)?;
    let ecfg = cfg.extract_config();
    let outcomes: Vec<VideoOutcome> =
        thread_pool(cfg.jobs)?.install(|| files.par_iter().map(|p| extract_one(p, &labels, &ecfg)).collect());

    let mut rows = Vec::new();
    let mut log = String::new();
    for (path, outcome) in files.iter().zip(outcomes) {
        let name = path.file_name().unwrap_or_default().to_string_lossy();
        for f in outcome.inputs.iter().filter(|f| f.is_file()) {
            manifest.input_under(&args.bundles, f)?;
        }
        match outcome.result {
            Ok((vector, notes)) => {
                log::info!("{name}: extracted {}", vector.video_id);
                writeln!(log, "{name}: ok {} ({} notes)", vector.video_id, notes.len()).unwrap();
                for n in notes {
                    log::debug!("{name}: {n}");
                    writeln!(log, "{name}:   {n}").unwrap();
                }
                rows.push(vector);
            }
            Err(e) => {
                log::warn!("{name}: skipped: {e}");
                writeln!(log, "{name}: skipped: {e}").unwrap();
            }
        }
    }
    let log_path = args.out.join(EXTRACTION_LOG);
    write_text(&log_path, &log, &mut manifest)?;
    if rows.is_empty() {
        manifest.finish()?;
        return Err(CliError::Data(format!("all {} bundles failed; see {}", files.len(), log_path.display())));
    }
    let csv_path = args.out.join(FEATURES_CSV);
    write_feature_csv(&rows, &csv_path)?;
    manifest.output(&csv_path);
    manifest.finish()?;
    log::info!("{} of {} bundles extracted", rows.len(), files.len());
    Ok(())
}

pub fn extract_audio(args: &ExtractAudioArgs, cfg: &RunConfig) -> Result<()> {
    let params = cfg.mel_params()?;
    let files = list_files(&args.wavs, "wav")?;
    if files.is_empty() {
        return Err(CliError::Data(format!("no WAV files in {}", args.wavs.display())));
    }
    create_out_dir(&args.out)?;
    let mut manifest = ManifestBuilder::new("extract-audio", cfg, &args.out);
    manifest.option("pgm", args.pgm);
    let labels = load_labels(args.labels.as_deref(), &mut manifest)?;
    let spectra: Vec<Result<_>> = thread_pool(cfg.jobs)?.install(|| {
        files
            .par_iter()
            .map(|p| Ok(mel_spectrogram(&read_wav(p)?, &params)?))
            .collect()
    });

    let mut index = Vec::new();
    let mut log = String::new();
    for (path, spec) in files.iter().zip(spectra) {
        manifest.input_under(&args.wavs, path)?;
        let id = file_stem(path);
        let spec = match spec {
            Ok(s) => s,
            Err(e) => {
                log::warn!("{id}: skipped: {e}");
                writeln!(log, "{id}: skipped: {e}").unwrap();
                continue;
            }
        };
        let name = format!("{id}.dfsm");
        let out = args.out.join(&name);
        write_matrix(&spec.db, &out)?;
        manifest.output(&out);
        if args.pgm {
            let pgm = args.out.join(format!("{id}.pgm"));
            write_pgm(&render_pgm(&spec.db, params.floor_db), &pgm)?;
            manifest.output(&pgm);
        }
        writeln!(log, "{id}: ok {}x{}", spec.db.rows, spec.db.cols).unwrap();
        index.push(IndexRow {
            label: labels.get(&id).copied(),
            clip_id: id,
            path: name,
            rows: spec.db.rows,
            cols: spec.db.cols,
        });
    }
    write_text(&args.out.join(EXTRACTION_LOG), &log, &mut manifest)?;
    if index.is_empty() {
        manifest.finish()?;
        return Err(CliError::Data(format!("all {} clips failed", files.len())));
    }
    let index_path = args.out.join(INDEX_CSV);
    write_index(&index, &index_path)?;
    manifest.output(&index_path);
    manifest.finish()?;
    log::info!("{} of {} clips extracted", index.len(), files.len());
    Ok(())
}
