//! Shared domain model for the deepfuse toolkit.
//!
//! Everything the extraction, learning and fusion crates exchange lives here:
//! landmark bundles and their JSON codec, PPM/PGM images, 16-bit PCM WAV
//! clips, the 13-column feature table, the real/deepfake label taxonomy and
//! the seeded random generator that every stochastic step draws from.

pub mod audio;
pub mod bundle;
pub mod error;
pub mod features;
pub mod image;
pub mod label;
pub mod rng;
pub mod table;

pub use audio::{read_wav, write_wav, AudioClip};
pub use bundle::{read_landmark_bundle, write_landmark_bundle, LandmarkBundle, LandmarkFrame, RoiRef};
pub use error::{CoreError, Result};
pub use features::{Dataset, Sample, VideoFeatureVector, FEATURE_NAMES, N_FEATURES};
pub use image::{read_ppm, write_pgm, write_ppm, GrayImage, PnmImage, RgbImage};
pub use label::{FourWayCategory, Label};
pub use rng::SeededRng;
pub use table::{read_feature_csv, write_feature_csv, FEATURE_CSV_HEADER};
