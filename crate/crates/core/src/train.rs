//! Minibatch training with Adam and dev-accuracy model selection.

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::classifier::{FeatureSources, Objective, RelationModel};
use crate::corpus::{RelationInstance, TrainingPair};
use crate::error::{Error, Result};
use crate::eval::{evaluate, BoundModel};
use crate::kernel::{Adam, AdamConfig, Parameterized, Scalar};
use crate::rng::Rng;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub dropout: f64,
    pub batch_size: usize,
    pub max_epochs: usize,
    /// Epochs without dev improvement before stopping.
    pub patience: usize,
    pub seed: u64,
    pub loss: Objective,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            learning_rate: 0.001,
            dropout: 0.35,
            batch_size: 64,
            max_epochs: 100,
            patience: 10,
            seed: 1,
            loss: Objective::Nll,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.learning_rate > 0.0) {
            return Err(Error::invalid("learning_rate must be positive"));
        }
        if !(0.0..1.0).contains(&self.dropout) {
            return Err(Error::invalid("dropout must be in [0, 1)"));
        }
        if self.batch_size == 0 || self.patience == 0 {
            return Err(Error::invalid("batch_size and patience must be at least 1"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpochRecord {
    pub epoch: usize,
    pub loss: f64,
    pub dev_accuracy: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct History {
    pub epochs: Vec<EpochRecord>,
    /// Epoch whose parameters were kept.
    pub best_epoch: Option<usize>,
}

impl History {
    pub fn best_dev_accuracy(&self) -> Option<f64> {
        let best = self.best_epoch?;
        self.epochs.iter().find(|e| e.epoch == best).map(|e| e.dev_accuracy)
    }

    /// `epoch,loss,dev_accuracy` CSV.
    pub fn write_csv<W: Write>(&self, w: &mut W) -> Result<()> {
        writeln!(w, "epoch,loss,dev_accuracy")?;
        for e in &self.epochs {
            writeln!(w, "{},{},{}", e.epoch, e.loss, e.dev_accuracy)?;
        }
        Ok(())
    }

    pub fn save_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        std::fs::write(path, buf)?;
        Ok(())
    }
}

/// Trains `model` on expanded `train` pairs, selecting the epoch with the best dev accuracy
/// under the either-sense credit rule.
pub fn train<T: Scalar>(
    mut model: RelationModel<T>,
    train: &[TrainingPair<'_>],
    dev: &[RelationInstance],
    sources: &FeatureSources<'_, T>,
    config: &TrainConfig,
) -> Result<(RelationModel<T>, History)> {
    config.validate()?;
    if train.is_empty() || dev.is_empty() {
        return Err(Error::invalid("training needs non-empty train and dev sets"));
    }
    model.set_dropout(config.dropout)?;
    model.check_sources(sources)?;
    let mut history = History::default();
    if config.max_epochs == 0 {
        return Ok((model, history));
    }

    let mut rng = Rng::new(config.seed);
    let mut shuffle_rng = rng.fork();
    let mut dropout_rng = rng.fork();
    let mut adam = Adam::new(AdamConfig::with_learning_rate(config.learning_rate))?;
    let mut order: Vec<usize> = (0..train.len()).collect();
    let mut best = model.clone();
    let mut best_accuracy = f64::NEG_INFINITY;
    let mut stale = 0;

    for epoch in 1..=config.max_epochs {
        shuffle_rng.shuffle(&mut order);
        let mut total = 0.0f64;
        for batch in order.chunks(config.batch_size) {
            model.clear_grads();
            for &i in batch {
                let pair = &train[i];
                let loss = model.accumulate_gradient(pair.instance, pair.gold, sources, config.loss, &mut dropout_rng)?;
                total += loss.real();
            }
            model.scale_grads(T::from_real(1.0 / batch.len() as f64));
            adam.step(&mut model)?;
        }
        model.clear_grads();
        let loss = total / train.len() as f64;
        if !loss.is_finite() {
            return Err(Error::Divergence { epoch, loss });
        }
        let dev_accuracy = evaluate(&BoundModel::new(&model, *sources), dev)?.accuracy;
        history.epochs.push(EpochRecord { epoch, loss, dev_accuracy });
        log::info!("epoch {epoch}: loss {loss:.5} dev accuracy {dev_accuracy:.4}");

        if dev_accuracy > best_accuracy {
            best_accuracy = dev_accuracy;
            best.clone_from(&model);
            history.best_epoch = Some(epoch);
            stale = 0;
        } else {
            stale += 1;
            if stale >= config.patience {
                break;
            }
        }
    }
    Ok((best, history))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_validation() {
        assert!(TrainConfig::default().validate().is_ok());
        for bad in [
            TrainConfig { learning_rate: 0.0, ..Default::default() },
            TrainConfig { dropout: 1.0, ..Default::default() },
            TrainConfig { batch_size: 0, ..Default::default() },
            TrainConfig { patience: 0, ..Default::default() },
        ] {
            assert!(bad.validate().is_err());
        }
    }

    #[test]
    fn history_csv() {
        let h = History {
            epochs: vec![EpochRecord { epoch: 1, loss: 1.5, dev_accuracy: 0.25 }],
            best_epoch: Some(1),
        };
        let mut out = Vec::new();
        h.write_csv(&mut out).unwrap();
        assert_eq!(String::from_utf8(out).unwrap(), "epoch,loss,dev_accuracy\n1,1.5,0.25\n");
        assert_eq!(h.best_dev_accuracy(), Some(0.25));
    }
}
