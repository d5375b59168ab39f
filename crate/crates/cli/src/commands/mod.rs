mod extract;
mod fuse;
mod model;

use std::path::{Path, PathBuf};

use deepfuse_audio::{read_matrix, Matrix};
use deepfuse_core::{read_feature_csv, Dataset, Label, Sample};
use deepfuse_learn::{prepare_input, Model, ModelBundle};

use crate::data::{read_index, read_split, Side};
use crate::error::{io_error, CliError, Result};
use crate::manifest::ManifestBuilder;

pub use extract::{extract_audio, extract_video};
pub use fuse::{assemble, fuse};
pub use model::{evaluate, importance, train};

pub(crate) fn create_out_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| io_error(dir, e))
}

pub(crate) fn write_text(path: &Path, text: &str, manifest: &mut ManifestBuilder) -> Result<()> {
    std::fs::write(path, text).map_err(|e| io_error(path, e))?;
    manifest.output(path);
    Ok(())
}

/// Spectrograms listed in an index, in index order.
#[derive(Clone)]
pub(crate) struct Spectrograms {
    pub ids: Vec<String>,
    pub labels: Vec<Option<Label>>,
    pub matrices: Vec<Matrix>,
    pub files: Vec<PathBuf>,
    pub base: PathBuf,
}

pub(crate) fn load_spectrograms(index: &Path) -> Result<Spectrograms> {
    let (rows, base) = read_index(index)?;
    let mut out = Spectrograms {
        ids: Vec::new(),
        labels: Vec::new(),
        matrices: Vec::new(),
        files: Vec::new(),
        base,
    };
    for r in rows {
        let path = out.base.join(&r.path);
        let m = read_matrix(&path)?;
        if m.shape() != (r.rows, r.cols) {
            return Err(CliError::Data(format!(
                "{}: shape {:?} differs from index ({}, {})",
                path.display(),
                m.shape(),
                r.rows,
                r.cols
            )));
        }
        out.ids.push(r.clip_id);
        out.labels.push(r.label);
        out.matrices.push(m);
        out.files.push(path);
    }
    Ok(out)
}

/// What a model consumes: feature rows or spectrograms.
#[derive(Clone)]
pub(crate) enum ModelData {
    Table(Dataset),
    Spectra(Spectrograms),
}

impl ModelData {
    pub fn load(spectra: bool, path: &Path) -> Result<ModelData> {
        if spectra {
            Ok(ModelData::Spectra(load_spectrograms(path)?))
        } else {
            Ok(ModelData::Table(read_feature_csv(path)?))
        }
    }

    pub fn load_for(bundle: &ModelBundle, path: &Path) -> Result<ModelData> {
        ModelData::load(matches!(bundle.model, Model::Cnn { .. }), path)
    }

    pub fn ids(&self) -> Vec<String> {
        match self {
            ModelData::Table(ds) => ds.rows().iter().map(|r| r.id.clone()).collect(),
            ModelData::Spectra(s) => s.ids.clone(),
        }
    }

    pub fn labels(&self) -> Vec<Option<Label>> {
        match self {
            ModelData::Table(ds) => ds.rows().iter().map(|r| r.label).collect(),
            ModelData::Spectra(s) => s.labels.clone(),
        }
    }

    pub fn len(&self) -> usize {
        self.ids().len()
    }

    /// Keeps the rows whose id is in `ids`, in data order.
    pub fn retain(&mut self, ids: &[String]) -> Result<()> {
        let keep: std::collections::BTreeSet<&str> = ids.iter().map(String::as_str).collect();
        let present: std::collections::BTreeSet<String> = self.ids().into_iter().collect();
        if let Some(missing) = ids.iter().find(|id| !present.contains(*id)) {
            return Err(CliError::Data(format!("split lists unknown id {missing}")));
        }
        match self {
            ModelData::Table(ds) => {
                let idx: Vec<usize> = (0..ds.len()).filter(|&i| keep.contains(ds.rows()[i].id.as_str())).collect();
                *ds = ds.select(&idx);
            }
            ModelData::Spectra(s) => {
                let mask: Vec<bool> = s.ids.iter().map(|id| keep.contains(id.as_str())).collect();
                let mut k = mask.iter();
                s.ids.retain(|_| *k.next().unwrap());
                let mut k = mask.iter();
                s.labels.retain(|_| *k.next().unwrap());
                let mut k = mask.iter();
                s.matrices.retain(|_| *k.next().unwrap());
                let mut k = mask.iter();
                s.files.retain(|_| *k.next().unwrap());
            }
        }
        Ok(())
    }

    /// Restricts to the test side of `split`, if given.
    pub fn restrict_to_test(&mut self, split: Option<&Path>) -> Result<()> {
        if let Some(p) = split {
            let ids = read_split(p, Side::Test)?;
            self.retain(&ids)?;
        }
        Ok(())
    }

    /// Records the data files as manifest inputs.
    pub fn record_inputs(&self, path: &Path, manifest: &mut ManifestBuilder) -> Result<()> {
        manifest.input_file(path)?;
        if let ModelData::Spectra(s) = self {
            for f in &s.files {
                manifest.input_under(&s.base, f)?;
            }
        }
        Ok(())
    }

    /// Row-index dataset standing in for spectrograms when splitting.
    pub fn index_dataset(&self) -> Result<Dataset> {
        let rows = self
            .ids()
            .into_iter()
            .zip(self.labels())
            .enumerate()
            .map(|(i, (id, label))| Sample {
                id,
                features: vec![i as f64],
                label,
            })
            .collect();
        Ok(Dataset::new(rows)?)
    }
}

/// Deepfake probability for every row, in data order.
pub(crate) fn probabilities(bundle: &ModelBundle, data: &ModelData) -> Result<Vec<f64>> {
    match (&bundle.model, data) {
        (Model::Cnn { config, network, floor_db }, ModelData::Spectra(s)) => s
            .matrices
            .iter()
            .map(|m| {
                let x = prepare_input(m, *floor_db, config.input_rows, config.input_cols)?;
                Ok(network.forward(&x)?)
            })
            .collect(),
        (Model::Cnn { .. }, ModelData::Table(_)) => Err(CliError::Data(
            "the cnn model needs a spectrogram index, got a feature table".into(),
        )),
        (_, ModelData::Table(ds)) => {
            let c = bundle.classifier().expect("tabular model");
            if ds.n_features() != c.n_features() {
                return Err(CliError::Data(format!(
                    "model expects {} features, data has {}",
                    c.n_features(),
                    ds.n_features()
                )));
            }
            Ok(ds.rows().iter().map(|r| c.predict_proba(&r.features)).collect())
        }
        (_, ModelData::Spectra(_)) => Err(CliError::Data(format!(
            "a {} model needs a feature table, got a spectrogram index",
            bundle.kind().name()
        ))),
    }
}

pub(crate) fn require_labels(ids: &[String], labels: &[Option<Label>]) -> Result<Vec<Label>> {
    ids.iter()
        .zip(labels)
        .map(|(id, l)| l.ok_or_else(|| CliError::Data(format!("row {id} is unlabelled"))))
        .collect()
}
