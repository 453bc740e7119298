use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::Rng;
use crate::scalar::Scalar;

/// Dropout rates for a classifier: one for the input layer, one for hidden layers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DropoutSpec {
    pub input_rate: f64,
    pub hidden_rate: f64,
}

impl DropoutSpec {
    pub fn new(input_rate: f64, hidden_rate: f64) -> Result<Self> {
        for (name, p) in [("input", input_rate), ("hidden", hidden_rate)] {
            if !(0.0..1.0).contains(&p) {
                return Err(Error::InvalidConfig(format!("{name} dropout rate {p} not in [0, 1)")));
            }
        }
        Ok(Self { input_rate, hidden_rate })
    }

    pub fn none() -> Self {
        Self {
            input_rate: 0.0,
            hidden_rate: 0.0,
        }
    }

    pub fn is_active(&self) -> bool {
        self.input_rate > 0.0 || self.hidden_rate > 0.0
    }
}

/// Inverted dropout: kept units are scaled by `1 / (1 - rate)` at training
/// time so evaluation is the identity.
#[derive(Debug, Clone, Copy)]
pub struct Dropout {
    rate: f64,
}

impl Dropout {
    pub fn new(rate: f64) -> Self {
        Self { rate }
    }

    pub fn eval<S: Scalar>(&self, x: &[S]) -> Vec<S> {
        x.to_vec()
    }

    pub fn train<S: Scalar>(&self, x: &[S], rng: &mut Rng) -> Vec<S> {
        let mut y = x.to_vec();
        self.apply_in_place(&mut y, rng);
        y
    }

    /// Applies a fresh mask in place and returns it (`None` when the rate is 0).
    pub fn apply_in_place<S: Scalar>(&self, x: &mut [S], rng: &mut Rng) -> Option<Vec<S>> {
        if self.rate <= 0.0 {
            return None;
        }
        let keep = S::lit(1.0 / (1.0 - self.rate));
        let mask: Vec<S> = x
            .iter()
            .map(|_| if rng.gen::<f64>() < self.rate { S::zero() } else { keep })
            .collect();
        for (v, &m) in x.iter_mut().zip(&mask) {
            *v *= m;
        }
        Some(mask)
    }
}
