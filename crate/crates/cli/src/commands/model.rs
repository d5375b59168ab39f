use std::io::Write as _;
use std::path::Path;

use deepfuse_core::{Dataset, Label, SeededRng, FEATURE_NAMES};
use deepfuse_learn::{
    ann_train, bce_loss, classification_report, cnn_train, forest_train, load_model, permutation_importance,
    prepare_input, save_model, smote, tree_train, write_history_csv, Classifier, EpochRecord, Model, ModelBundle,
    ModelKind, Report,
};

use super::{create_out_dir, probabilities, require_labels, write_text, ModelData};
use crate::cli::{EvaluateArgs, ImportanceArgs, TrainArgs};
use crate::config::RunConfig;
use crate::data::write_split;
use crate::error::{io_error, CliError, Result};
use crate::manifest::ManifestBuilder;

pub const MODEL_JSON: &str = "model.json";
pub const HISTORY_CSV: &str = "history.csv";
pub const SPLIT_CSV: &str = "split.csv";
pub const SMOTE_CSV: &str = "smote.csv";
pub const REPORT_TXT: &str = "report.txt";
pub const REPORT_JSON: &str = "report.json";
pub const PREDICTIONS_CSV: &str = "predictions.csv";
pub const IMPORTANCE_CSV: &str = "importance.csv";

const SPLIT_STREAM: u64 = 1;
const SMOTE_STREAM: u64 = 2;
const TRAIN_STREAM: u64 = 3;
const IMPORTANCE_STREAM: u64 = 5;

fn fit_history(c: &dyn Classifier, ds: &Dataset) -> Result<Vec<EpochRecord>> {
    let ys: Vec<f64> = ds.labels()?.iter().map(|l| l.as_f64()).collect();
    let ps: Vec<f64> = ds.rows().iter().map(|r| c.predict_proba(&r.features)).collect();
    let hits = ps.iter().zip(&ys).filter(|(p, y)| Label::from_probability(**p).as_f64() == **y).count();
    Ok(vec![EpochRecord {
        epoch: 1,
        loss: bce_loss(&ys, &ps)?,
        accuracy: hits as f64 / ys.len() as f64,
    }])
}

fn write_smote_csv(out: &deepfuse_learn::SmoteOutput, train: &Dataset, path: &Path) -> Result<()> {
    let file = std::fs::File::create(path).map_err(|e| io_error(path, e))?;
    let mut w = csv::Writer::from_writer(file);
    w.write_record(["id", "base_id", "neighbor_id", "u"])?;
    for s in &out.synthetic {
        let rows = train.rows();
        w.write_record([
            s.id.as_str(),
            rows[s.base].id.as_str(),
            rows[s.neighbor].id.as_str(),
            &s.u.to_string(),
        ])?;
    }
    w.flush().map_err(|e| io_error(path, e))
}

/// Writes report.txt and report.json and returns the text form.
fn write_report(
    ids: &[String],
    truth: &[Label],
    probs: &[f64],
    out: &Path,
    manifest: &mut ManifestBuilder,
) -> Result<(Report, String)> {
    let pred: Vec<Label> = probs.iter().map(|&p| Label::from_probability(p)).collect();
    let report = classification_report(truth, &pred)?;
    let text = format!("{report}");
    write_text(&out.join(REPORT_TXT), &text, manifest)?;
    let mut json = serde_json::to_string_pretty(&report)?;
    json.push('\n');
    write_text(&out.join(REPORT_JSON), &json, manifest)?;

    let path = out.join(PREDICTIONS_CSV);
    let file = std::fs::File::create(&path).map_err(|e| io_error(&path, e))?;
    let mut w = csv::Writer::from_writer(file);
    w.write_record(["id", "label", "probability", "predicted"])?;
    for ((id, t), (p, y)) in ids.iter().zip(truth).zip(probs.iter().zip(&pred)) {
        w.write_record([id.as_str(), &t.to_string(), &p.to_string(), &y.to_string()])?;
    }
    w.flush().map_err(|e| io_error(&path, e))?;
    manifest.output(&path);
    Ok((report, text))
}

fn feature_names() -> Vec<String> {
    FEATURE_NAMES.iter().map(|s| s.to_string()).collect()
}

pub fn train(args: &TrainArgs, cfg: &RunConfig) -> Result<()> {
    let kind: ModelKind = args.kind.parse().map_err(CliError::Usage)?;
    let mut cfg = cfg.clone();
    if let Some(e) = args.epochs {
        cfg.epochs = e;
        cfg.cnn_epochs = e;
        cfg.validate()?;
    }
    let data = ModelData::load(kind == ModelKind::Cnn, &args.data)?;
    let labels = require_labels(&data.ids(), &data.labels())?;
    for class in Label::ALL {
        if !labels.contains(&class) {
            return Err(CliError::Data(format!("no {} rows in {}", class.name(), args.data.display())));
        }
    }
    create_out_dir(&args.out)?;
    let mut manifest = ManifestBuilder::new("train", &cfg, &args.out);
    manifest.option("kind", kind.name());
    data.record_inputs(&args.data, &mut manifest)?;

    let root = SeededRng::new(cfg.seed);
    let (train_idx, test_idx) =
        deepfuse_learn::train_test_split(&data.index_dataset()?, cfg.split_ratio, &mut root.derive(SPLIT_STREAM))?;
    let ids_of = |d: &Dataset| d.rows().iter().map(|r| r.id.clone()).collect::<Vec<_>>();
    let (train_ids, test_ids) = (ids_of(&train_idx), ids_of(&test_idx));
    let split_path = args.out.join(SPLIT_CSV);
    write_split(&train_ids, &test_ids, &split_path)?;
    manifest.output(&split_path);

    let mut train_data = data.clone();
    train_data.retain(&train_ids)?;
    let mut test_data = data;
    test_data.retain(&test_ids)?;
    let mut rng = root.derive(TRAIN_STREAM);

    let (model, history) = match &train_data {
        ModelData::Table(train) => {
            let train = if cfg.smote {
                let out = smote(train, cfg.smote_k, &mut root.derive(SMOTE_STREAM))?;
                log::info!("smote added {} synthetic rows", out.synthetic.len());
                let path = args.out.join(SMOTE_CSV);
                write_smote_csv(&out, train, &path)?;
                manifest.output(&path);
                out.dataset
            } else {
                train.clone()
            };
            match kind {
                ModelKind::Ann => {
                    let config = cfg.ann_config();
                    let (network, history) = ann_train(&train, &config, &mut rng)?;
                    (Model::Ann { config, network }, history)
                }
                ModelKind::Tree => {
                    let config = cfg.tree_config();
                    let tree = tree_train(&train, &config, &mut rng)?;
                    let h = fit_history(&tree, &train)?;
                    (Model::Tree { config, tree }, h)
                }
                ModelKind::Forest => {
                    let config = cfg.forest_config();
                    let forest = forest_train(&train, &config, &mut rng)?;
                    let h = fit_history(&forest, &train)?;
                    (Model::Forest { config, forest }, h)
                }
                ModelKind::Cnn => unreachable!("cnn data is loaded as spectrograms"),
            }
        }
        ModelData::Spectra(s) => {
            let config = cfg.cnn_config();
            let inputs = s
                .matrices
                .iter()
                .map(|m| prepare_input(m, cfg.floor_db, config.input_rows, config.input_cols))
                .collect::<std::result::Result<Vec<_>, _>>()?;
            let labels = require_labels(&s.ids, &s.labels)?;
            let (network, history) = cnn_train(&inputs, &labels, &config, &mut rng)?;
            (
                Model::Cnn {
                    config,
                    network,
                    floor_db: cfg.floor_db,
                },
                history,
            )
        }
    };
    let names = if kind == ModelKind::Cnn { Vec::new() } else { feature_names() };
    let bundle = ModelBundle::new(cfg.seed, names, model);
    let model_path = args.out.join(MODEL_JSON);
    save_model(&bundle, &model_path)?;
    manifest.output(&model_path);
    let history_path = args.out.join(HISTORY_CSV);
    write_history_csv(&history, &history_path)?;
    manifest.output(&history_path);

    let probs = probabilities(&bundle, &test_data)?;
    let truth = require_labels(&test_data.ids(), &test_data.labels())?;
    let (_, text) = write_report(&test_data.ids(), &truth, &probs, &args.out, &mut manifest)?;
    manifest.finish()?;
    println!("{} model, held-out split ({} rows):", kind.name(), truth.len());
    print!("{text}");
    Ok(())
}

pub fn evaluate(args: &EvaluateArgs, cfg: &RunConfig) -> Result<()> {
    let bundle = load_model(&args.model)?;
    let mut data = ModelData::load_for(&bundle, &args.data)?;
    data.restrict_to_test(args.split.as_deref())?;
    if data.len() == 0 {
        return Err(CliError::Data("no rows to evaluate".into()));
    }
    let truth = require_labels(&data.ids(), &data.labels())?;
    let probs = probabilities(&bundle, &data)?;
    create_out_dir(&args.out)?;
    let mut manifest = ManifestBuilder::new("evaluate", cfg, &args.out);
    manifest.input_file(&args.model)?;
    data.record_inputs(&args.data, &mut manifest)?;
    if let Some(s) = &args.split {
        manifest.input_file(s)?;
    }
    let (_, text) = write_report(&data.ids(), &truth, &probs, &args.out, &mut manifest)?;
    manifest.finish()?;
    print!("{text}");
    Ok(())
}

pub fn importance(args: &ImportanceArgs, cfg: &RunConfig) -> Result<()> {
    let bundle = load_model(&args.model)?;
    bundle.expect_kind(&[ModelKind::Ann, ModelKind::Tree, ModelKind::Forest])?;
    let mut data = ModelData::load(false, &args.data)?;
    data.restrict_to_test(args.split.as_deref())?;
    let ModelData::Table(ds) = &data else { unreachable!() };
    let names: Vec<&str> = bundle.feature_names.iter().map(String::as_str).collect();
    let classifier = bundle.classifier().expect("tabular model");
    let ranked = permutation_importance(
        classifier,
        ds,
        &names,
        cfg.importance_repeats,
        &mut SeededRng::new(cfg.seed).derive(IMPORTANCE_STREAM),
    )?;
    create_out_dir(&args.out)?;
    let mut manifest = ManifestBuilder::new("importance", cfg, &args.out);
    manifest.input_file(&args.model)?;
    manifest.input_file(&args.data)?;
    if let Some(s) = &args.split {
        manifest.input_file(s)?;
    }
    let path = args.out.join(IMPORTANCE_CSV);
    let file = std::fs::File::create(&path).map_err(|e| io_error(&path, e))?;
    let mut w = csv::Writer::from_writer(file);
    w.write_record(["rank", "feature", "importance", "std"])?;
    let mut stdout = std::io::stdout().lock();
    for (i, f) in ranked.iter().enumerate() {
        w.write_record([(i + 1).to_string(), f.name.clone(), f.importance.to_string(), f.std.to_string()])?;
        let _ = writeln!(stdout, "{:>2}  {:<22} {:>9.4} ± {:.4}", i + 1, f.name, f.importance, f.std);
    }
    w.flush().map_err(|e| io_error(&path, e))?;
    manifest.output(&path);
    manifest.finish()?;
    Ok(())
}
