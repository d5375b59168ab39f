//! Small file formats owned by the command-line layer: label lists, the
//! spectrogram index and train/test split lists.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use deepfuse_core::Label;
use serde::{Deserialize, Serialize};

use crate::error::{io_error, CliError, Result};

/// Files in `dir` with extension `ext`, sorted by name.
pub fn list_files(dir: &Path, ext: &str) -> Result<Vec<PathBuf>> {
    let entries = std::fs::read_dir(dir).map_err(|e| io_error(dir, e))?;
    let mut out = Vec::new();
    for e in entries {
        let p = e.map_err(|e| io_error(dir, e))?.path();
        if p.is_file() && p.extension().is_some_and(|x| x.eq_ignore_ascii_case(ext)) {
            out.push(p);
        }
    }
    out.sort();
    Ok(out)
}

pub fn file_stem(path: &Path) -> String {
    path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default()
}

#[derive(Debug, Serialize, Deserialize)]
struct LabelRow {
    id: String,
    label: String,
}

/// `id,label` with labels written as 0/1 or real/deepfake.
pub fn read_labels(path: &Path) -> Result<BTreeMap<String, Label>> {
    let file = std::fs::File::open(path).map_err(|e| io_error(path, e))?;
    let mut out = BTreeMap::new();
    for (i, row) in csv::Reader::from_reader(file).deserialize::<LabelRow>().enumerate() {
        let row = row?;
        let label = row
            .label
            .parse::<Label>()
            .map_err(|e| CliError::Data(format!("{} line {}: {e}", path.display(), i + 2)))?;
        if out.insert(row.id.clone(), label).is_some() {
            return Err(CliError::Data(format!("{}: duplicate id {}", path.display(), row.id)));
        }
    }
    Ok(out)
}

pub fn write_labels(labels: &BTreeMap<String, Label>, path: &Path) -> Result<()> {
    let file = std::fs::File::create(path).map_err(|e| io_error(path, e))?;
    let mut w = csv::Writer::from_writer(file);
    for (id, l) in labels {
        w.serialize(LabelRow {
            id: id.clone(),
            label: l.as_u8().to_string(),
        })?;
    }
    w.flush().map_err(|e| io_error(path, e))
}

/// One spectrogram listed in an audio index; `path` is relative to the index.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndexRow {
    pub clip_id: String,
    pub path: String,
    #[serde(with = "opt_label")]
    pub label: Option<Label>,
    pub rows: usize,
    pub cols: usize,
}

mod opt_label {
    use deepfuse_core::Label;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(l: &Option<Label>, s: S) -> Result<S::Ok, S::Error> {
        match l {
            Some(l) => s.serialize_str(&l.as_u8().to_string()),
            None => s.serialize_str(""),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Label>, D::Error> {
        let s = String::deserialize(d)?;
        if s.trim().is_empty() {
            Ok(None)
        } else {
            s.parse().map(Some).map_err(serde::de::Error::custom)
        }
    }
}

pub fn write_index(rows: &[IndexRow], path: &Path) -> Result<()> {
    let file = std::fs::File::create(path).map_err(|e| io_error(path, e))?;
    let mut w = csv::Writer::from_writer(file);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush().map_err(|e| io_error(path, e))
}

/// Rows of the index and the directory their paths are relative to.
pub fn read_index(path: &Path) -> Result<(Vec<IndexRow>, PathBuf)> {
    let file = std::fs::File::open(path).map_err(|e| io_error(path, e))?;
    let rows = csv::Reader::from_reader(file)
        .deserialize::<IndexRow>()
        .collect::<std::result::Result<Vec<_>, _>>()
        .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
    let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
    Ok((rows, base))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Train,
    Test,
}

#[derive(Debug, Serialize, Deserialize)]
struct SplitRow {
    id: String,
    set: Side,
}

pub fn write_split(train: &[String], test: &[String], path: &Path) -> Result<()> {
    let file = std::fs::File::create(path).map_err(|e| io_error(path, e))?;
    let mut w = csv::Writer::from_writer(file);
    for (ids, set) in [(train, Side::Train), (test, Side::Test)] {
        for id in ids {
            w.serialize(SplitRow { id: id.clone(), set })?;
        }
    }
    w.flush().map_err(|e| io_error(path, e))
}

/// Ids assigned to `side` in a split file.
pub fn read_split(path: &Path, side: Side) -> Result<Vec<String>> {
    let file = std::fs::File::open(path).map_err(|e| io_error(path, e))?;
    let mut out = Vec::new();
    for row in csv::Reader::from_reader(file).deserialize::<SplitRow>() {
        let row = row.map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
        if row.set == side {
            out.push(row.id);
        }
    }
    Ok(out)
}
