//! Dense row-major matrices and the `DFSMATRX` file format.
//!
//! Layout: the 8 ASCII bytes `DFSMATRX`, `rows` and `cols` as little-endian
//! u32, then `rows·cols` little-endian f32 values in row-major order.

use std::path::Path;

use deepfuse_core::GrayImage;

use crate::error::{io, AudioError, Result};

pub const MAGIC: &[u8; 8] = b"DFSMATRX";
pub const HEADER_LEN: usize = 16;

#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix::filled(rows, cols, 0.0)
    }

    pub fn filled(rows: usize, cols: usize, value: f64) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![value; rows * cols],
        }
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(AudioError::Params(format!(
                "{} values for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(Matrix { rows, cols, data })
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: f64) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[f64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn max(&self) -> f64 {
        self.data.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn matmul(&self, other: &Matrix) -> Result<Matrix> {
        if self.cols != other.rows {
            return Err(AudioError::Params(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            let dst = &mut out.data[i * other.cols..(i + 1) * other.cols];
            for (k, &a) in self.row(i).iter().enumerate() {
                if a == 0.0 {
                    continue;
                }
                for (d, &b) in dst.iter_mut().zip(other.row(k)) {
                    *d += a * b;
                }
            }
        }
        Ok(out)
    }

    /// Center-crops or pads (with `pad`) the column axis to exactly `cols`.
    pub fn fit_cols_centered(&self, cols: usize, pad: f64) -> Matrix {
        let mut out = Matrix::filled(self.rows, cols, pad);
        if self.cols >= cols {
            let start = (self.cols - cols) / 2;
            for r in 0..self.rows {
                out.data[r * cols..(r + 1) * cols].copy_from_slice(&self.row(r)[start..start + cols]);
            }
        } else {
            let start = (cols - self.cols) / 2;
            for r in 0..self.rows {
                out.data[r * cols + start..r * cols + start + self.cols].copy_from_slice(self.row(r));
            }
        }
        out
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(HEADER_LEN + 4 * self.data.len());
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(&(self.rows as u32).to_le_bytes());
        out.extend_from_slice(&(self.cols as u32).to_le_bytes());
        for &v in &self.data {
            out.extend_from_slice(&(v as f32).to_le_bytes());
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Matrix> {
        if bytes.len() < HEADER_LEN {
            return Err(AudioError::Matrix(format!("truncated header ({} bytes)", bytes.len())));
        }
        if &bytes[..8] != MAGIC {
            return Err(AudioError::Matrix("bad magic".into()));
        }
        let rows = u32::from_le_bytes(bytes[8..12].try_into().unwrap()) as usize;
        let cols = u32::from_le_bytes(bytes[12..16].try_into().unwrap()) as usize;
        let expected = rows
            .checked_mul(cols)
            .and_then(|n| n.checked_mul(4))
            .ok_or_else(|| AudioError::Matrix(format!("dimensions {rows}x{cols} overflow")))?;
        let payload = &bytes[HEADER_LEN..];
        if payload.len() < expected {
            return Err(AudioError::Matrix(format!(
                "truncated payload: {} of {expected} bytes",
                payload.len()
            )));
        }
        if payload.len() > expected {
            return Err(AudioError::Matrix(format!(
                "{} trailing bytes after payload",
                payload.len() - expected
            )));
        }
        let data = payload
            .chunks_exact(4)
            .map(|c| f64::from(f32::from_le_bytes(c.try_into().unwrap())))
            .collect();
        Ok(Matrix { rows, cols, data })
    }
}

pub fn write_matrix(m: &Matrix, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    if let Some(bad) = m.data.iter().find(|v| !v.is_finite()) {
        return Err(AudioError::Matrix(format!("non-finite entry {bad}")));
    }
    std::fs::write(path, m.to_bytes()).map_err(|e| io(path, e))
}

pub fn read_matrix(path: impl AsRef<Path>) -> Result<Matrix> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|e| io(path, e))?;
    Matrix::from_bytes(&bytes)
}

/// Maps `floor_db → 0` and `0 dB → 255` linearly. Row 0 (lowest band) is
/// drawn at the bottom of the image.
pub fn render_pgm(db: &Matrix, floor_db: f64) -> GrayImage {
    GrayImage::from_fn(db.cols, db.rows, |x, y| {
        let v = db.get(db.rows - 1 - y, x);
        (((v - floor_db) / -floor_db) * 255.0).round().clamp(0.0, 255.0) as u8
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_by_one_layout() {
        let bytes = Matrix::from_vec(1, 1, vec![0.5]).unwrap().to_bytes();
        assert_eq!(bytes.len(), HEADER_LEN + 4);
        assert_eq!(&bytes[..8], b"DFSMATRX");
        assert_eq!(&bytes[8..16], &[1, 0, 0, 0, 1, 0, 0, 0]);
        assert_eq!(&bytes[16..], &0.5f32.to_le_bytes());
    }

    #[test]
    fn file_round_trip_is_bit_exact_at_f32() {
        let data: Vec<f64> = (0..128 * 91).map(|i| f64::from((i as f32).sin() * -40.0)).collect();
        let m = Matrix::from_vec(128, 91, data).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("m.dfsm");
        write_matrix(&m, &p).unwrap();
        let back = read_matrix(&p).unwrap();
        assert_eq!(back.shape(), (128, 91));
        for (a, b) in m.data.iter().zip(&back.data) {
            assert_eq!((*a as f32).to_bits(), (*b as f32).to_bits());
        }
    }

    #[test]
    fn corrupt_files_rejected() {
        let good = Matrix::from_vec(2, 2, vec![1.0, 2.0, 3.0, 4.0]).unwrap().to_bytes();
        let mut bad_magic = good.clone();
        bad_magic[0] = b'X';
        assert!(Matrix::from_bytes(&bad_magic).is_err());
        assert!(Matrix::from_bytes(&good[..good.len() - 1]).is_err());
        assert!(Matrix::from_bytes(&good[..10]).is_err());
        let mut long = good.clone();
        long.push(0);
        assert!(Matrix::from_bytes(&long).is_err());
    }

    #[test]
    fn non_finite_not_written() {
        let dir = tempfile::tempdir().unwrap();
        let m = Matrix::from_vec(1, 1, vec![f64::NAN]).unwrap();
        assert!(write_matrix(&m, dir.path().join("x")).is_err());
    }

    #[test]
    fn pgm_endpoints() {
        let m = Matrix::from_vec(2, 2, vec![-80.0, -40.0, 0.0, -100.0]).unwrap();
        let img = render_pgm(&m, -80.0);
        // bottom row is matrix row 0
        assert_eq!(img.get(0, 1), 0);
        assert_eq!(img.get(1, 1), 128);
        assert_eq!(img.get(0, 0), 255);
        assert_eq!(img.get(1, 0), 0);
    }

    #[test]
    fn fit_cols() {
        let m = Matrix::from_vec(1, 5, vec![1.0, 2.0, 3.0, 4.0, 5.0]).unwrap();
        assert_eq!(m.fit_cols_centered(3, 0.0).data, vec![2.0, 3.0, 4.0]);
        assert_eq!(m.fit_cols_centered(8, 0.0).data, vec![0.0, 1.0, 2.0, 3.0, 4.0, 5.0, 0.0, 0.0]);
    }

    #[test]
    fn matmul_small() {
        let a = Matrix::from_vec(2, 3, vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0]).unwrap();
        let b = Matrix::from_vec(3, 1, vec![1.0, 0.0, -1.0]).unwrap();
        assert_eq!(a.matmul(&b).unwrap().data, vec![-2.0, -2.0]);
        assert!(b.matmul(&b).is_err());
    }
}
