use std::collections::BTreeMap;
use std::path::Path;

use deepfuse_core::{read_feature_csv, Label, SeededRng};
use deepfuse_fusion::{
    assemble_fourway, evaluate_multimodal, read_pairs_csv, summary_json, write_category_csv, write_pairs_csv,
    write_verdicts_csv, PoolItem,
};
use deepfuse_learn::load_model;

use super::{create_out_dir, probabilities, write_text, ModelData};
use crate::cli::{AssembleArgs, FuseArgs};
use crate::config::RunConfig;
use crate::data::{read_index, read_split, Side};
use crate::error::{io_error, CliError, Result};
use crate::manifest::ManifestBuilder;

pub const PAIRS_CSV: &str = "pairs.csv";
pub const TABLE_CSV: &str = "table.csv";
pub const SUMMARY_JSON: &str = "summary.json";
pub const VERDICTS_CSV: &str = "verdicts.csv";

const ASSEMBLE_STREAM: u64 = 4;

fn is_index(path: &Path) -> Result<bool> {
    let text = std::fs::read_to_string(path).map_err(|e| io_error(path, e))?;
    Ok(text.lines().next().is_some_and(|h| h.starts_with("clip_id,")))
}

/// Labelled ids from a feature CSV or a spectrogram index.
fn labelled_ids(path: &Path) -> Result<Vec<(String, Option<Label>)>> {
    if is_index(path)? {
        let (rows, _) = read_index(path)?;
        Ok(rows.into_iter().map(|r| (r.clip_id, r.label)).collect())
    } else {
        Ok(read_feature_csv(path)?
            .into_rows()
            .into_iter()
            .map(|r| (r.id, r.label))
            .collect())
    }
}

fn pool(path: &Path, split: Option<&Path>, manifest: &mut ManifestBuilder) -> Result<Vec<PoolItem>> {
    manifest.input_file(path)?;
    let mut ids = labelled_ids(path)?;
    if let Some(s) = split {
        manifest.input_file(s)?;
        let keep = read_split(s, Side::Test)?;
        ids.retain(|(id, _)| keep.contains(id));
    }
    ids.into_iter()
        .map(|(id, l)| {
            let l = l.ok_or_else(|| CliError::Data(format!("{}: row {id} is unlabelled", path.display())))?;
            Ok(PoolItem::new(id, l))
        })
        .collect()
}

pub fn assemble(args: &AssembleArgs, cfg: &RunConfig) -> Result<()> {
    create_out_dir(&args.out)?;
    let mut manifest = ManifestBuilder::new("assemble", cfg, &args.out);
    let videos = pool(&args.video_data, args.video_split.as_deref(), &mut manifest)?;
    let audios = pool(&args.audio_data, args.audio_split.as_deref(), &mut manifest)?;
    let pairs = assemble_fourway(&videos, &audios, &mut SeededRng::new(cfg.seed).derive(ASSEMBLE_STREAM))?;
    let path = args.out.join(PAIRS_CSV);
    write_pairs_csv(&pairs, &path)?;
    manifest.output(&path);
    manifest.finish()?;
    log::info!("{} pairs from {} videos and {} clips", pairs.len(), videos.len(), audios.len());
    Ok(())
}

fn modality_probs(
    model: &Path,
    data: &Path,
    manifest: &mut ManifestBuilder,
) -> Result<(String, BTreeMap<String, f64>)> {
    let bundle = load_model(model)?;
    let d = ModelData::load_for(&bundle, data)?;
    manifest.input_file(model)?;
    d.record_inputs(data, manifest)?;
    let probs = probabilities(&bundle, &d)?;
    Ok((bundle.kind().name().to_string(), d.ids().into_iter().zip(probs).collect()))
}

pub fn fuse(args: &FuseArgs, cfg: &RunConfig) -> Result<()> {
    create_out_dir(&args.out)?;
    let mut manifest = ManifestBuilder::new("fuse", cfg, &args.out);
    let (vname, vprobs) = modality_probs(&args.video_model, &args.video_data, &mut manifest)?;
    let (aname, aprobs) = modality_probs(&args.audio_model, &args.audio_data, &mut manifest)?;
    manifest.input_file(&args.pairs)?;
    let pairs = read_pairs_csv(&args.pairs)?;
    let eval = evaluate_multimodal(&pairs, &vprobs, &aprobs, &vname, &aname)?;

    let table = args.out.join(TABLE_CSV);
    write_category_csv(&eval, &table)?;
    manifest.output(&table);
    write_text(&args.out.join(SUMMARY_JSON), &summary_json(&eval)?, &mut manifest)?;
    let verdicts = args.out.join(VERDICTS_CSV);
    write_verdicts_csv(&eval, &verdicts)?;
    manifest.output(&verdicts);
    manifest.finish()?;

    println!("{:<18} {:>7} {:>7} {:>8}", "category", "samples", "correct", "accuracy");
    for r in &eval.rows {
        println!("{:<18} {:>7} {:>7} {:>8.4}", r.category.name(), r.samples, r.correct, r.accuracy());
    }
    println!("{:<18} {:>7} {:>7} {:>8.4}", "overall", eval.samples, eval.correct, eval.accuracy);
    println!("strict accuracy (both modality labels right): {:.4}", eval.strict_accuracy);
    Ok(())
}
