//! Multimodal decision: a sample is deepfake when its video or its audio is
//! judged deepfake. Also builds balanced real/fake video × real/fake audio
//! evaluation sets and scores them per category.

pub mod assemble;
pub mod error;
pub mod evaluate;
pub mod verdict;

pub use assemble::{assemble_fourway, read_pairs_csv, write_pairs_csv, FourWaySample, PoolItem};
pub use error::{FusionError, Result};
pub use evaluate::{
    evaluate_multimodal, overall_accuracy, summary_json, write_category_csv, write_verdicts_csv, CategoryRow,
    Evaluation, SampleVerdict,
};
pub use verdict::{combine, fuse, FusionVerdict, Modality, ModalityVerdict};
