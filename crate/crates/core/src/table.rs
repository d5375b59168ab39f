//! Feature table CSV.
//!
//! Header (fixed):
//! `video_id,cheekbone_height,...,chrominance2,label` with the 13 feature
//! columns in [`FEATURE_NAMES`] order. Floats are written in the shortest
//! decimal form that parses back to the identical `f64`. The `label` column
//! may be absent (all rows unlabeled) or a cell may be empty.

use std::fs::File;
use std::path::Path;

use crate::error::{CoreError, Result};
use crate::features::{Dataset, Sample, VideoFeatureVector, FEATURE_NAMES, N_FEATURES};
use crate::label::Label;

pub const FEATURE_CSV_HEADER: &str = "video_id,cheekbone_height,inter_pupil_distance,blink_count,headpose_x,headpose_y,headpose_z,nose_size,lip_size,contrast,correlation,luminance,chrominance1,chrominance2,label";

pub fn write_feature_csv(rows: &[VideoFeatureVector], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| CoreError::io(path, e))?;
    write_feature_csv_to(rows, file).map_err(|e| match e {
        CoreError::Csv { line, reason } => CoreError::Csv {
            line,
            reason: format!("{}: {reason}", path.display()),
        },
        other => other,
    })
}

pub fn write_feature_csv_to(rows: &[VideoFeatureVector], out: impl std::io::Write) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let csv_err = |e: csv::Error| CoreError::Csv {
        line: 0,
        reason: e.to_string(),
    };
    w.write_record(FEATURE_CSV_HEADER.split(',')).map_err(csv_err)?;
    for r in rows {
        let mut rec = Vec::with_capacity(N_FEATURES + 2);
        rec.push(r.video_id.clone());
        rec.extend(r.values.iter().map(|v| v.to_string()));
        rec.push(r.label.map(|l| l.to_string()).unwrap_or_default());
        w.write_record(&rec).map_err(csv_err)?;
    }
    w.flush().map_err(|e| CoreError::Csv {
        line: 0,
        reason: e.to_string(),
    })
}

pub fn read_feature_csv(path: impl AsRef<Path>) -> Result<Dataset> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| CoreError::io(path, e))?;
    read_feature_csv_from(file)
}

pub fn read_feature_csv_from(input: impl std::io::Read) -> Result<Dataset> {
    let mut r = csv::ReaderBuilder::new().has_headers(true).from_reader(input);
    let header = r
        .headers()
        .map_err(|e| CoreError::Csv {
            line: 1,
            reason: e.to_string(),
        })?
        .clone();
    let names: Vec<&str> = header.iter().map(str::trim).collect();
    let has_label = match names.len() {
        n if n == N_FEATURES + 2 => true,
        n if n == N_FEATURES + 1 => false,
        n => {
            return Err(CoreError::Csv {
                line: 1,
                reason: format!("expected {} feature columns, header has {} columns", N_FEATURES, n),
            })
        }
    };
    if names[0] != "video_id" || names[1..=N_FEATURES] != FEATURE_NAMES || (has_label && names[N_FEATURES + 1] != "label") {
        return Err(CoreError::Csv {
            line: 1,
            reason: format!("header mismatch, expected {FEATURE_CSV_HEADER}"),
        });
    }

    let mut rows = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let line = i as u64 + 2;
        let rec = rec.map_err(|e| CoreError::Csv {
            line,
            reason: e.to_string(),
        })?;
        if rec.len() != names.len() {
            return Err(CoreError::Csv {
                line,
                reason: format!("expected {} cells, found {}", names.len(), rec.len()),
            });
        }
        let mut values = [0.0; N_FEATURES];
        for (j, v) in values.iter_mut().enumerate() {
            let cell = rec[j + 1].trim();
            *v = cell.parse().map_err(|_| CoreError::Csv {
                line,
                reason: format!("non-numeric value {cell:?} in column {}", FEATURE_NAMES[j]),
            })?;
        }
        let label = if has_label && !rec[N_FEATURES + 1].trim().is_empty() {
            Some(rec[N_FEATURES + 1].parse::<Label>().map_err(|reason| CoreError::Csv { line, reason })?)
        } else {
            None
        };
        rows.push(Sample {
            id: rec[0].to_string(),
            features: values.to_vec(),
            label,
        });
    }
    Dataset::new(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn row(id: &str, base: f64, label: Option<Label>) -> VideoFeatureVector {
        let mut values = [0.0; N_FEATURES];
        for (i, v) in values.iter_mut().enumerate() {
            *v = base + i as f64 / 3.0;
        }
        VideoFeatureVector {
            video_id: id.into(),
            values,
            label,
        }
    }

    fn round_trip(rows: &[VideoFeatureVector]) -> Vec<VideoFeatureVector> {
        let mut buf = Vec::new();
        write_feature_csv_to(rows, &mut buf).unwrap();
        read_feature_csv_from(buf.as_slice()).unwrap().to_vectors().unwrap()
    }

    #[test]
    fn header_matches_feature_names() {
        let cols: Vec<&str> = FEATURE_CSV_HEADER.split(',').collect();
        assert_eq!(cols.len(), N_FEATURES + 2);
        assert_eq!(cols[1..=N_FEATURES], FEATURE_NAMES);
    }

    #[test]
    fn five_rows_round_trip() {
        let rows: Vec<_> = (0..5)
            .map(|i| row(&format!("v{i}"), 0.1 * i as f64, Label::from_u8((i % 2) as u8)))
            .collect();
        assert_eq!(round_trip(&rows), rows);
    }

    #[test]
    fn missing_label_column_means_unlabeled() {
        let header: Vec<&str> = FEATURE_CSV_HEADER.split(',').take(N_FEATURES + 1).collect();
        let text = format!("{}\nv0,{}\n", header.join(","), vec!["1.5"; N_FEATURES].join(","));
        let ds = read_feature_csv_from(text.as_bytes()).unwrap();
        assert_eq!(ds.len(), 1);
        assert_eq!(ds.rows()[0].label, None);
    }

    #[test]
    fn twelve_feature_columns_rejected() {
        let header: Vec<&str> = FEATURE_CSV_HEADER.split(',').take(N_FEATURES).collect();
        let text = format!("{}\nv0,{}\n", header.join(","), ["1"; N_FEATURES - 1].join(","));
        assert!(matches!(read_feature_csv_from(text.as_bytes()), Err(CoreError::Csv { line: 1, .. })));
    }

    #[test]
    fn non_numeric_cell_rejected() {
        let mut buf = Vec::new();
        write_feature_csv_to(&[row("a", 1.0, None)], &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap().replace(",1.3333333333333333,", ",abc,");
        assert!(matches!(read_feature_csv_from(text.as_bytes()), Err(CoreError::Csv { line: 2, .. })));
    }

    proptest! {
        #[test]
        fn arbitrary_finite_values_round_trip(values in proptest::array::uniform13(-1e300f64..1e300)) {
            let rows = vec![VideoFeatureVector { video_id: "p".into(), values, label: Some(Label::Deepfake) }];
            prop_assert_eq!(round_trip(&rows), rows);
        }
    }
}
