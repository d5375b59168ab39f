//! Audio front end for the spectrogram classifier.
//!
//! Clips are resampled to 16 kHz, analysed with a Hann-windowed STFT,
//! projected onto a bank of unit-peak HTK mel triangles and converted to dB
//! relative to the clip maximum. Spectrograms are stored as `DFSMATRX`
//! matrix files.

pub mod db;
pub mod error;
pub mod fft;
pub mod filterbank;
pub mod matrix;
pub mod mel;
pub mod resample;
pub mod spectrogram;
pub mod stft;
pub mod window;

pub use db::{amplitude_to_db, power_to_db, DEFAULT_FLOOR_DB};
pub use error::{AudioError, Result};
pub use filterbank::{build_mel_filter_bank, MelFilterBank};
pub use matrix::{read_matrix, render_pgm, write_matrix, Matrix};
pub use mel::{hz_to_mel, mel_to_hz};
pub use spectrogram::{mel_spectrogram, mel_spectrogram_samples, DbOrder, MelParams, MelSpectrogram};
pub use stft::{stft, Stft};
pub use window::Window;
