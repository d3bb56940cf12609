//! TOML experiment configuration.
//!
//! ```toml
//! [paths]
//! corpus = "corpus.jsonl"
//! glove = "glove.txt"
//!
//! [model]
//! kind = "bilstm"
//! hidden_dim = 250
//!
//! [train]
//! max_epochs = 30
//! seed = 7
//!
//! [output]
//! dir = "runs/bilstm"
//! ```
//!
//! Relative paths resolve against the directory holding the config file.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::classifier::{ModelKind, ALLOWED_HEAD_LAYERS};
use crate::encoder::Pooling;
use crate::error::{Error, Result};
use crate::features::DEFAULT_WORD_PAIR_DIM;
use crate::train::TrainConfig;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PathsConfig {
    /// Normalized relation JSONL.
    pub corpus: PathBuf,
    pub glove: Option<PathBuf>,
    /// Precomputed sentence-vector file.
    pub vectors: Option<PathBuf>,
    /// Unigram/bigram table for native composition; alternative to `vectors`.
    pub ngrams: Option<PathBuf>,
    pub clusters: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DataConfig {
    /// Drop non-implicit relations when loading the corpus.
    pub implicit_only: bool,
}

impl Default for DataConfig {
    fn default() -> Self {
        Self { implicit_only: true }
    }
}

fn default_pooling() -> Pooling {
    Pooling::Concat
}

fn default_hidden_dim() -> usize {
    250
}

fn default_word_pair_dim() -> usize {
    DEFAULT_WORD_PAIR_DIM
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    pub kind: ModelKind,
    #[serde(default = "default_pooling")]
    pub pooling: Pooling,
    #[serde(default = "default_hidden_dim")]
    pub hidden_dim: usize,
    /// Defaults to 3 for `bilstm` and 4 otherwise.
    pub head_layers: Option<usize>,
    /// Permits any allowed head depth instead of the kind's default.
    #[serde(default)]
    pub layer_search: bool,
    pub hidden_width: Option<usize>,
    #[serde(default)]
    pub word_pairs: bool,
    #[serde(default = "default_word_pair_dim")]
    pub word_pair_dim: usize,
    #[serde(default)]
    pub freeze_encoder: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: PathBuf,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self { dir: PathBuf::from("out") }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub paths: PathsConfig,
    #[serde(default)]
    pub data: DataConfig,
    pub model: ModelConfig,
    #[serde(default)]
    pub train: TrainConfig,
    #[serde(default)]
    pub output: OutputConfig,
    #[serde(skip)]
    base_dir: PathBuf,
}

impl ExperimentConfig {
    /// Parses and validates, including that every referenced path exists.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new("")).to_path_buf();
        let config = Self::parse(&text, base)?;
        config.validate()?;
        Ok(config)
    }

    /// Parses without touching the filesystem.
    pub fn parse(text: &str, base_dir: impl Into<PathBuf>) -> Result<Self> {
        let mut config: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        config.base_dir = base_dir.into();
        Ok(config)
    }

    pub fn base_dir(&self) -> &Path {
        &self.base_dir
    }

    pub fn resolve(&self, path: &Path) -> PathBuf {
        if path.is_absolute() {
            path.to_path_buf()
        } else {
            self.base_dir.join(path)
        }
    }

    pub fn corpus_path(&self) -> PathBuf {
        self.resolve(&self.paths.corpus)
    }

    pub fn glove_path(&self) -> Option<PathBuf> {
        self.paths.glove.as_deref().map(|p| self.resolve(p))
    }

    pub fn vectors_path(&self) -> Option<PathBuf> {
        self.paths.vectors.as_deref().map(|p| self.resolve(p))
    }

    pub fn ngrams_path(&self) -> Option<PathBuf> {
        self.paths.ngrams.as_deref().map(|p| self.resolve(p))
    }

    pub fn clusters_path(&self) -> Option<PathBuf> {
        self.paths.clusters.as_deref().map(|p| self.resolve(p))
    }

    pub fn output_dir(&self) -> PathBuf {
        self.resolve(&self.output.dir)
    }

    pub fn head_layers(&self) -> usize {
        self.model.head_layers.unwrap_or_else(|| self.model.kind.default_head_layers())
    }

    pub fn uses_bilstm(&self) -> bool {
        matches!(self.model.kind, ModelKind::Bilstm | ModelKind::Combined)
    }

    pub fn uses_pretrained(&self) -> bool {
        matches!(self.model.kind, ModelKind::Pretrained | ModelKind::Combined)
    }

    /// Checks the model selection against the available inputs and every referenced path.
    pub fn validate(&self) -> Result<()> {
        self.validate_model()?;
        let named = [
            ("corpus", Some(self.corpus_path())),
            ("glove", self.glove_path()),
            ("vectors", self.vectors_path()),
            ("ngrams", self.ngrams_path()),
            ("clusters", self.clusters_path()),
        ];
        for (name, path) in named {
            if let Some(p) = path {
                if !p.is_file() {
                    return Err(Error::Config(format!("paths.{name}: {} does not exist", p.display())));
                }
            }
        }
        Ok(())
    }

    /// Model-selection rules only; no filesystem access.
    pub fn validate_model(&self) -> Result<()> {
        let m = &self.model;
        let layers = self.head_layers();
        if !ALLOWED_HEAD_LAYERS.contains(&layers) {
            return Err(Error::Config(format!(
                "model.head_layers = {layers} is not one of {ALLOWED_HEAD_LAYERS:?}"
            )));
        }
        let expected = m.kind.default_head_layers();
        if !m.layer_search && layers != expected {
            return Err(Error::Config(format!(
                "model.kind = {:?} uses a {expected}-layer head; set model.layer_search = true to use {layers}",
                m.kind
            )));
        }
        if self.uses_bilstm() {
            if self.paths.glove.is_none() {
                return Err(Error::Config("the Bi-LSTM input needs paths.glove".into()));
            }
            if m.hidden_dim == 0 {
                return Err(Error::Config("model.hidden_dim must be positive".into()));
            }
        } else if self.paths.glove.is_some() {
            return Err(Error::Config("paths.glove is set but model.kind does not use the Bi-LSTM".into()));
        }
        let pretrained_sources = self.paths.vectors.is_some() as usize + self.paths.ngrams.is_some() as usize;
        if self.uses_pretrained() {
            if pretrained_sources != 1 {
                return Err(Error::Config("set exactly one of paths.vectors and paths.ngrams".into()));
            }
        } else if pretrained_sources != 0 {
            return Err(Error::Config(
                "paths.vectors/paths.ngrams are set but model.kind does not use pretrained vectors".into(),
            ));
        }
        if m.word_pairs {
            if self.paths.clusters.is_none() {
                return Err(Error::Config("model.word_pairs needs paths.clusters".into()));
            }
            if m.word_pair_dim == 0 {
                return Err(Error::Config("model.word_pair_dim must be positive".into()));
            }
        }
        if m.hidden_width == Some(0) {
            return Err(Error::Config("model.hidden_width must be positive".into()));
        }
        self.train.validate().map_err(|e| Error::Config(format!("train: {e}")))
    }
}
