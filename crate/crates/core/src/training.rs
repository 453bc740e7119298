//! Settings shared by the supervised trainers.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SupervisedConfig {
    pub epochs: usize,
    /// Tokens per minibatch for the tagger, sentences for the parser.
    pub batch_size: usize,
    pub learning_rate: f64,
    pub momentum: f64,
    /// Stop after this many validations (one per epoch) without improvement.
    pub patience: usize,
    pub seed: u64,
}

impl Default for SupervisedConfig {
    fn default() -> Self {
        Self {
            epochs: 30,
            batch_size: 64,
            learning_rate: 0.1,
            momentum: 0.9,
            patience: 10,
            seed: 1,
        }
    }
}

impl SupervisedConfig {
    pub(crate) fn validate(&self) -> Result<()> {
        if self.batch_size == 0 {
            return Err(Error::InvalidConfig("batch size must be positive".into()));
        }
        if !(self.learning_rate >= 0.0 && self.momentum >= 0.0 && self.momentum < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "learning rate {} / momentum {} out of range",
                self.learning_rate, self.momentum
            )));
        }
        Ok(())
    }
}

/// One validation pass; epoch 0 is the untrained model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpochRecord {
    pub epoch: usize,
    pub train_loss: f64,
    pub val_score: f64,
}
