use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{io, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpochRecord {
    pub epoch: usize,
    pub loss: f64,
    pub accuracy: f64,
}

pub fn write_history_csv(history: &[EpochRecord], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = std::fs::File::create(path).map_err(|e| io(path, e))?;
    let mut w = csv::Writer::from_writer(file);
    for rec in history {
        w.serialize(rec)?;
    }
    w.flush().map_err(|e| io(path, e))?;
    Ok(())
}

pub fn read_history_csv(path: impl AsRef<Path>) -> Result<Vec<EpochRecord>> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| io(path, e))?;
    csv::Reader::from_reader(file)
        .deserialize()
        .map(|r| r.map_err(Into::into))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_with_header() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("h.csv");
        let h = vec![
            EpochRecord { epoch: 1, loss: 0.69, accuracy: 0.5 },
            EpochRecord { epoch: 2, loss: 0.31, accuracy: 0.875 },
        ];
        write_history_csv(&h, &p).unwrap();
        assert!(std::fs::read_to_string(&p).unwrap().starts_with("epoch,loss,accuracy\n"));
        assert_eq!(read_history_csv(&p).unwrap(), h);
    }
}
