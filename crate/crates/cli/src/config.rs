//! Run configuration: a flat TOML file whose keys can be overridden from
//! the command line (`--set key=value`, `--seed`, `--jobs`); flags win.

use std::path::Path;

use deepfuse_audio::{DbOrder, MelParams, Window};
use deepfuse_learn::{AnnConfig, CnnConfig, ForestConfig, TreeConfig};
use deepfuse_vision::geometry::BlinkConfig;
use deepfuse_vision::pose::PnpConfig;
use deepfuse_vision::ExtractConfig;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{io_error, CliError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub seed: u64,
    pub jobs: usize,

    pub stride: usize,
    pub blink_threshold: f64,
    pub blink_min_frames: usize,
    pub gray_levels: usize,
    pub pnp_max_rms_px: f64,

    pub sample_rate: u32,
    pub frame_size: usize,
    pub hop: usize,
    pub n_bands: usize,
    pub fmin: f64,
    pub fmax: Option<f64>,
    pub floor_db: f64,
    pub window: String,
    pub db_order: String,

    pub split_ratio: f64,
    pub smote: bool,
    pub smote_k: usize,

    pub ann_hidden: Vec<usize>,
    pub learning_rate: f64,
    pub momentum: f64,
    pub batch_size: usize,
    pub epochs: usize,

    pub cnn_frames: usize,
    pub cnn_filters: Vec<usize>,
    pub cnn_dense: usize,
    pub cnn_dropout: f64,
    pub cnn_learning_rate: f64,
    pub cnn_batch_size: usize,
    pub cnn_epochs: usize,

    pub tree_max_depth: usize,
    pub forest_trees: usize,
    pub forest_max_features: usize,
    pub forest_bootstrap: bool,

    pub importance_repeats: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        let extract = ExtractConfig::default();
        let mel = MelParams::default();
        let ann = AnnConfig::default();
        let cnn = CnnConfig::default();
        let forest = ForestConfig::default();
        RunConfig {
            seed: 42,
            jobs: 1,
            stride: extract.stride,
            blink_threshold: extract.blink.threshold,
            blink_min_frames: extract.blink.min_closed_frames,
            gray_levels: extract.gray_levels,
            pnp_max_rms_px: extract.pnp.max_rms_px,
            sample_rate: mel.sample_rate,
            frame_size: mel.frame_size,
            hop: mel.hop,
            n_bands: mel.n_bands,
            fmin: mel.fmin,
            fmax: mel.fmax,
            floor_db: mel.floor_db,
            window: mel.window.name().to_string(),
            db_order: "mel-then-db".to_string(),
            split_ratio: 0.8,
            smote: true,
            smote_k: deepfuse_learn::smote::DEFAULT_K,
            ann_hidden: ann.hidden,
            learning_rate: ann.learning_rate,
            momentum: ann.momentum,
            batch_size: ann.batch_size,
            epochs: ann.epochs,
            cnn_frames: cnn.input_cols,
            cnn_filters: cnn.conv_filters,
            cnn_dense: cnn.dense,
            cnn_dropout: cnn.dropout,
            cnn_learning_rate: cnn.learning_rate,
            cnn_batch_size: cnn.batch_size,
            cnn_epochs: cnn.epochs,
            tree_max_depth: TreeConfig::default().max_depth,
            forest_trees: forest.n_estimators,
            forest_max_features: forest.tree.max_features.unwrap_or(3),
            forest_bootstrap: forest.bootstrap,
            importance_repeats: deepfuse_learn::importance::DEFAULT_REPEATS,
        }
    }
}

fn parse_value(raw: &str) -> toml::Value {
    // bare words that are not valid TOML values are taken as strings
    format!("v = {raw}")
        .parse::<toml::Table>()
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(raw.to_string()))
}

impl RunConfig {
    /// Defaults, then the file (if any), then `overrides` in order.
    pub fn load(file: Option<&Path>, overrides: &[(String, String)]) -> Result<RunConfig> {
        let mut table = match file {
            Some(p) => {
                let text = std::fs::read_to_string(p).map_err(|e| io_error(p, e))?;
                text.parse::<toml::Table>()
                    .map_err(|e| CliError::Usage(format!("{}: {e}", p.display())))?
            }
            None => toml::Table::new(),
        };
        for (k, v) in overrides {
            table.insert(k.clone(), parse_value(v));
        }
        let cfg: RunConfig = toml::Value::Table(table)
            .try_into()
            .map_err(|e: toml::de::Error| CliError::Usage(format!("configuration: {}", e.message())))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let usage = |m: String| Err(CliError::Usage(m));
        if self.stride == 0 || self.jobs == 0 {
            return usage("stride and jobs must be at least 1".into());
        }
        if !(self.split_ratio > 0.0 && self.split_ratio < 1.0) {
            return usage(format!("split_ratio {} outside (0, 1)", self.split_ratio));
        }
        if self.gray_levels < 2 || self.gray_levels > 256 {
            return usage(format!("gray_levels {} outside 2..=256", self.gray_levels));
        }
        self.mel_params()?.validate()?;
        self.ann_config().validate()?;
        self.cnn_config().validate()?;
        Ok(())
    }

    pub fn extract_config(&self) -> ExtractConfig {
        ExtractConfig {
            stride: self.stride,
            blink: BlinkConfig {
                threshold: self.blink_threshold,
                min_closed_frames: self.blink_min_frames,
                ..BlinkConfig::default()
            },
            pnp: PnpConfig {
                max_rms_px: self.pnp_max_rms_px,
                ..PnpConfig::default()
            },
            gray_levels: self.gray_levels,
        }
    }

    pub fn mel_params(&self) -> Result<MelParams> {
        Ok(MelParams {
            sample_rate: self.sample_rate,
            frame_size: self.frame_size,
            hop: self.hop,
            n_bands: self.n_bands,
            fmin: self.fmin,
            fmax: self.fmax,
            floor_db: self.floor_db,
            window: self.window.parse::<Window>().map_err(CliError::Usage)?,
            order: self.db_order.parse::<DbOrder>().map_err(CliError::Usage)?,
        })
    }

    pub fn ann_config(&self) -> AnnConfig {
        AnnConfig {
            hidden: self.ann_hidden.clone(),
            learning_rate: self.learning_rate,
            momentum: self.momentum,
            batch_size: self.batch_size,
            epochs: self.epochs,
        }
    }

    pub fn cnn_config(&self) -> CnnConfig {
        CnnConfig {
            input_rows: self.n_bands,
            input_cols: self.cnn_frames,
            conv_filters: self.cnn_filters.clone(),
            dense: self.cnn_dense,
            dropout: self.cnn_dropout,
            learning_rate: self.cnn_learning_rate,
            momentum: self.momentum,
            batch_size: self.cnn_batch_size,
            epochs: self.cnn_epochs,
        }
    }

    pub fn tree_config(&self) -> TreeConfig {
        TreeConfig {
            max_depth: self.tree_max_depth,
            ..TreeConfig::default()
        }
    }

    pub fn forest_config(&self) -> ForestConfig {
        ForestConfig {
            n_estimators: self.forest_trees,
            bootstrap: self.forest_bootstrap,
            tree: TreeConfig {
                max_features: Some(self.forest_max_features),
                ..self.tree_config()
            },
        }
    }

    /// SHA-256 of the canonical JSON form of the resolved configuration.
    pub fn digest(&self) -> String {
        let json = serde_json::to_string(self).expect("config serializes");
        hex::encode(Sha256::digest(json.as_bytes()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate() {
        RunConfig::default().validate().unwrap();
        assert_eq!(RunConfig::load(None, &[]).unwrap(), RunConfig::default());
    }

    #[test]
    fn file_then_flags() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("run.toml");
        std::fs::write(&p, "seed = 7\nstride = 3\nwindow = \"hamming\"\nann_hidden = [8, 4]\n").unwrap();
        let cfg = RunConfig::load(Some(&p), &[("seed".into(), "9".into()), ("db_order".into(), "db-then-mel".into())]).unwrap();
        assert_eq!((cfg.seed, cfg.stride, cfg.ann_hidden.clone()), (9, 3, vec![8, 4]));
        assert_eq!(cfg.mel_params().unwrap().order, DbOrder::DbThenMel);
        assert_eq!(cfg.mel_params().unwrap().window, Window::Hamming);
    }

    #[test]
    fn bad_keys_and_values_are_usage_errors() {
        let e = RunConfig::load(None, &[("no_such_key".into(), "1".into())]).unwrap_err();
        assert_eq!(e.exit_code(), 1);
        let e = RunConfig::load(None, &[("split_ratio".into(), "1.5".into())]).unwrap_err();
        assert_eq!(e.exit_code(), 1);
        let e = RunConfig::load(None, &[("window".into(), "kaiser".into())]).unwrap_err();
        assert_eq!(e.exit_code(), 1);
    }

    #[test]
    fn digest_tracks_content() {
        let a = RunConfig::default();
        let mut b = a.clone();
        assert_eq!(a.digest(), b.digest());
        b.seed += 1;
        assert_ne!(a.digest(), b.digest());
    }
}
