//! 16-bit PCM WAV input/output.

use std::path::Path;

use crate::error::{CoreError, Result};

/// Mono clip with samples in `[-1, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct AudioClip {
    pub sample_rate: u32,
    pub samples: Vec<f64>,
}

impl AudioClip {
    pub fn new(sample_rate: u32, samples: Vec<f64>) -> Self {
        AudioClip { sample_rate, samples }
    }

    pub fn duration_secs(&self) -> f64 {
        self.samples.len() as f64 / f64::from(self.sample_rate)
    }
}

/// Reads PCM 16-bit mono or stereo; stereo frames are averaged to mono and
/// every sample is scaled by 1/32768.
pub fn read_wav(path: impl AsRef<Path>) -> Result<AudioClip> {
    let path = path.as_ref();
    let mut reader = hound::WavReader::open(path).map_err(|e| wav_error(path, e))?;
    let spec = reader.spec();
    if spec.sample_format != hound::SampleFormat::Int {
        return Err(CoreError::Wav(format!("{}: non-PCM (float) encoding", path.display())));
    }
    if spec.bits_per_sample != 16 {
        return Err(CoreError::Wav(format!(
            "{}: unsupported bit depth {}",
            path.display(),
            spec.bits_per_sample
        )));
    }
    if !(1..=2).contains(&spec.channels) {
        return Err(CoreError::Wav(format!(
            "{}: unsupported channel count {}",
            path.display(),
            spec.channels
        )));
    }
    let raw: Vec<i16> = reader
        .samples::<i16>()
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| wav_error(path, e))?;
    let samples = raw
        .chunks_exact(usize::from(spec.channels))
        .map(|frame| {
            let sum: f64 = frame.iter().map(|&s| f64::from(s) / 32768.0).sum();
            sum / frame.len() as f64
        })
        .collect();
    Ok(AudioClip::new(spec.sample_rate, samples))
}

/// Writes a mono 16-bit PCM file; samples are clamped to `[-1, 1)` then scaled by 32768.
pub fn write_wav(clip: &AudioClip, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let spec = hound::WavSpec {
        channels: 1,
        sample_rate: clip.sample_rate,
        bits_per_sample: 16,
        sample_format: hound::SampleFormat::Int,
    };
    let mut w = hound::WavWriter::create(path, spec).map_err(|e| wav_error(path, e))?;
    for &s in &clip.samples {
        let v = (s * 32768.0).round().clamp(-32768.0, 32767.0) as i16;
        w.write_sample(v).map_err(|e| wav_error(path, e))?;
    }
    w.finalize().map_err(|e| wav_error(path, e))
}

fn wav_error(path: &Path, e: hound::Error) -> CoreError {
    match e {
        hound::Error::IoError(io) => CoreError::io(path, io),
        other => CoreError::Wav(format!("{}: {other}", path.display())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write_raw(path: &Path, channels: u16, rate: u32, samples: &[i16]) {
        let spec = hound::WavSpec {
            channels,
            sample_rate: rate,
            bits_per_sample: 16,
            sample_format: hound::SampleFormat::Int,
        };
        let mut w = hound::WavWriter::create(path, spec).unwrap();
        for &s in samples {
            w.write_sample(s).unwrap();
        }
        w.finalize().unwrap();
    }

    #[test]
    fn scales_by_inverse_32768() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("a.wav");
        write_raw(&p, 1, 16_000, &[16384, -32768, 0]);
        let clip = read_wav(&p).unwrap();
        assert_eq!(clip.samples, vec![0.5, -1.0, 0.0]);
    }

    #[test]
    fn stereo_frames_average_to_mono() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("s.wav");
        // 0.2 and 0.4 of full scale are not exact in 16 bits; compare within one LSB.
        let l = (0.2f64 * 32768.0).round() as i16;
        let r = (0.4f64 * 32768.0).round() as i16;
        write_raw(&p, 2, 8_000, &[l, r]);
        let clip = read_wav(&p).unwrap();
        assert_eq!(clip.samples.len(), 1);
        assert!((clip.samples[0] - 0.3).abs() < 1.0 / 32768.0);
    }

    #[test]
    fn sample_count_is_duration_times_rate() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("d.wav");
        write_wav(&AudioClip::new(16_000, vec![0.0; 32_000]), &p).unwrap();
        let clip = read_wav(&p).unwrap();
        assert_eq!(clip.samples.len(), 32_000);
        assert_eq!(clip.duration_secs(), 2.0);
    }

    #[test]
    fn rejects_float_and_8_bit() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("f.wav");
        let spec = hound::WavSpec {
            channels: 1,
            sample_rate: 16_000,
            bits_per_sample: 32,
            sample_format: hound::SampleFormat::Float,
        };
        let mut w = hound::WavWriter::create(&p, spec).unwrap();
        w.write_sample(0.25f32).unwrap();
        w.finalize().unwrap();
        assert!(matches!(read_wav(&p), Err(CoreError::Wav(_))));

        let p8 = dir.path().join("b.wav");
        let spec = hound::WavSpec {
            channels: 1,
            sample_rate: 16_000,
            bits_per_sample: 8,
            sample_format: hound::SampleFormat::Int,
        };
        let mut w = hound::WavWriter::create(&p8, spec).unwrap();
        w.write_sample(3i8).unwrap();
        w.finalize().unwrap();
        assert!(matches!(read_wav(&p8), Err(CoreError::Wav(_))));
    }
}
