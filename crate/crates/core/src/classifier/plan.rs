use serde::{Deserialize, Serialize};

use crate::encoder::Pooling;
use crate::error::{Error, Result};

/// Allowed head depths (number of affine layers).
pub const ALLOWED_HEAD_LAYERS: [usize; 6] = [2, 3, 4, 5, 7, 10];

/// Hidden-width cap used when the config leaves widths unset.
pub const DEFAULT_HIDDEN_CAP: usize = 512;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BilstmBlock {
    pub pooling: Pooling,
    pub hidden_dim: usize,
}

impl BilstmBlock {
    /// Width of one argument's representation.
    pub fn width(&self) -> usize {
        2 * self.hidden_dim
    }
}

/// Which blocks are concatenated into the head input, in the fixed order
/// `[arg1 bilstm ; arg2 bilstm ; arg1 pretrained ; arg2 pretrained ; word pairs]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct InputPlan {
    pub bilstm: Option<BilstmBlock>,
    /// Dimension of the pretrained sentence vectors.
    pub pretrained: Option<usize>,
    /// Hashed word-pair feature dimension.
    pub word_pairs: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Bilstm,
    Pretrained,
    Combined,
}

impl ModelKind {
    /// Head depth used for each system: 3 for the end-to-end Bi-LSTM, 4 otherwise.
    pub fn default_head_layers(self) -> usize {
        match self {
            ModelKind::Bilstm => 3,
            ModelKind::Pretrained | ModelKind::Combined => 4,
        }
    }
}

impl std::str::FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "bilstm" => Ok(ModelKind::Bilstm),
            "pretrained" => Ok(ModelKind::Pretrained),
            "combined" => Ok(ModelKind::Combined),
            other => Err(Error::invalid(format!("unknown model kind `{other}`"))),
        }
    }
}

impl InputPlan {
    pub fn validate(&self) -> Result<()> {
        if self.bilstm.is_none() && self.pretrained.is_none() && self.word_pairs.is_none() {
            return Err(Error::invalid("input plan enables no source"));
        }
        let zero = self.bilstm.is_some_and(|b| b.hidden_dim == 0)
            || self.pretrained == Some(0)
            || self.word_pairs == Some(0);
        if zero {
            return Err(Error::invalid("input plan blocks must have positive width"));
        }
        Ok(())
    }

    pub fn input_dimension(&self) -> usize {
        self.bilstm.map_or(0, |b| 2 * b.width())
            + self.pretrained.map_or(0, |d| 2 * d)
            + self.word_pairs.unwrap_or(0)
    }

    /// Kind implied by the enabled sentence-level blocks; word pairs alone count as pretrained-style.
    pub fn kind(&self) -> ModelKind {
        match (self.bilstm.is_some(), self.pretrained.is_some()) {
            (true, true) => ModelKind::Combined,
            (true, false) => ModelKind::Bilstm,
            _ => ModelKind::Pretrained,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bilstm(h: usize) -> Option<BilstmBlock> {
        Some(BilstmBlock {
            pooling: Pooling::Concat,
            hidden_dim: h,
        })
    }

    #[test]
    fn dimensions() {
        let p = InputPlan { bilstm: bilstm(250), pretrained: None, word_pairs: None };
        assert_eq!(p.input_dimension(), 1000);
        assert_eq!(p.kind(), ModelKind::Bilstm);
        let p = InputPlan { bilstm: bilstm(250), pretrained: Some(4096), word_pairs: None };
        assert_eq!(p.input_dimension(), 9192);
        assert_eq!(p.kind(), ModelKind::Combined);
        let p = InputPlan { bilstm: None, pretrained: Some(7), word_pairs: None };
        assert_eq!(p.input_dimension(), 14);
        let p = InputPlan { bilstm: None, pretrained: Some(7), word_pairs: Some(100) };
        assert_eq!(p.input_dimension(), 114);
    }

    #[test]
    fn needs_a_source() {
        let p = InputPlan { bilstm: None, pretrained: None, word_pairs: None };
        assert!(p.validate().is_err());
        let p = InputPlan { bilstm: None, pretrained: Some(0), word_pairs: None };
        assert!(p.validate().is_err());
    }

    #[test]
    fn head_rules() {
        assert_eq!(ModelKind::Bilstm.default_head_layers(), 3);
        assert_eq!(ModelKind::Pretrained.default_head_layers(), 4);
        assert_eq!(ModelKind::Combined.default_head_layers(), 4);
    }
}
