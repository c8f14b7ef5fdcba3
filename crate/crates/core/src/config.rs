//! The reproducibility config shared by every subcommand.
//!
//! A single TOML file; every key has a default, and relative paths are
//! resolved against the file's directory. Command-line flags override the
//! file.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cocoio::SplitConfig;
use crate::composer::ComposeConfig;
use crate::evaluator::EvalConfig;
use crate::sheets::DEFAULT_THRESHOLD;

/// Environment variable naming the default config file.
pub const CONFIG_ENV: &str = "CHECKSYNTH_CONFIG";

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Parse {
        path: PathBuf,
        #[source]
        source: toml::de::Error,
    },
    #[error("{0}")]
    Invalid(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExtractConfig {
    /// Luminance below this is ink.
    pub threshold: u8,
    /// Per-sheet overrides keyed by sheet file name.
    pub sheet_thresholds: BTreeMap<String, u8>,
}

impl ExtractConfig {
    pub fn threshold_for(&self, sheet: &str) -> u8 {
        self.sheet_thresholds.get(sheet).copied().unwrap_or(self.threshold)
    }
}

impl Default for ExtractConfig {
    fn default() -> Self {
        ExtractConfig {
            threshold: DEFAULT_THRESHOLD,
            sheet_thresholds: BTreeMap::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GenerationConfig {
    pub master_seed: u64,
    /// `samples.json` written by `extract`.
    pub samples: PathBuf,
    /// `templates.toml` listing backgrounds and field regions.
    pub templates: PathBuf,
    /// Glyph atlas directory; the built-in atlas when unset.
    pub glyphs: Option<PathBuf>,
    pub output_dir: PathBuf,
    pub augmentations_per_signature: usize,
    pub checks_per_augmentation: usize,
    pub splits: SplitConfig,
    pub compose: ComposeConfig,
    pub extract: ExtractConfig,
    /// Also supplies the size buckets used by `stats`.
    pub eval: EvalConfig,
}

impl Default for GenerationConfig {
    fn default() -> Self {
        GenerationConfig {
            master_seed: 2024,
            samples: PathBuf::from("samples/samples.json"),
            templates: PathBuf::from("templates/templates.toml"),
            glyphs: None,
            output_dir: PathBuf::from("dataset"),
            augmentations_per_signature: 5,
            checks_per_augmentation: 5,
            splits: SplitConfig::reference(),
            compose: ComposeConfig::default(),
            extract: ExtractConfig::default(),
            eval: EvalConfig::default(),
        }
    }
}

impl GenerationConfig {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let mut cfg: GenerationConfig = toml::from_str(&text).map_err(|source| ConfigError::Parse {
            path: path.to_path_buf(),
            source,
        })?;
        if let Some(base) = path.parent() {
            cfg.resolve_paths(base);
        }
        cfg.validate()?;
        Ok(cfg)
    }

    /// The file named by `CHECKSYNTH_CONFIG` when `explicit` is unset, or
    /// defaults when neither is given.
    pub fn load_or_default(explicit: Option<&Path>) -> Result<Self, ConfigError> {
        let from_env = std::env::var_os(CONFIG_ENV).map(PathBuf::from);
        match explicit.map(Path::to_path_buf).or(from_env) {
            Some(p) => GenerationConfig::load(&p),
            None => Ok(GenerationConfig::default()),
        }
    }

    pub fn resolve_paths(&mut self, base: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        fix(&mut self.samples);
        fix(&mut self.templates);
        fix(&mut self.output_dir);
        if let Some(g) = self.glyphs.as_mut() {
            fix(g);
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let (lo, hi) = self.compose.scale_range;
        if !(lo > 0.0 && lo <= hi && hi <= 1.0) {
            return Err(ConfigError::Invalid(format!(
                "scale_range ({lo}, {hi}) must satisfy 0 < lo ≤ hi ≤ 1"
            )));
        }
        if self.augmentations_per_signature == 0 || self.checks_per_augmentation == 0 {
            return Err(ConfigError::Invalid(
                "augmentations_per_signature and checks_per_augmentation must be at least 1".into(),
            ));
        }
        if !(self.compose.text_min_scale > 0.0) {
            return Err(ConfigError::Invalid("text_min_scale must be positive".into()));
        }
        self.eval
            .validate()
            .map_err(|e| ConfigError::Invalid(e.to_string()))
    }

    /// Candidate checks generated per extracted signature.
    pub fn checks_per_signature(&self) -> usize {
        self.augmentations_per_signature * self.checks_per_augmentation
    }

    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("config serializes")
    }
}
