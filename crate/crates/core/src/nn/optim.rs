use super::Params;
use crate::error::{check_len, Error, Result};
use crate::scalar::Scalar;

/// Classical (heavy-ball) momentum: `v <- mu v - lr g; theta <- theta + v`.
#[derive(Debug, Clone)]
pub struct SgdMomentum<S> {
    pub learning_rate: S,
    pub momentum: S,
    velocity: Vec<Vec<S>>,
}

impl<S: Scalar> SgdMomentum<S> {
    pub fn new(learning_rate: S, momentum: S) -> Self {
        Self {
            learning_rate,
            momentum,
            velocity: Vec::new(),
        }
    }

    pub fn velocity(&self) -> &[Vec<S>] {
        &self.velocity
    }

    pub fn step<M: Params<S>>(&mut self, params: &mut M, grads: &M) -> Result<()> {
        self.step_tensors(params.tensors_mut(), grads.tensors())
    }

    /// Velocity buffers are created zeroed on the first call and must keep
    /// the same shapes afterwards.
    pub fn step_tensors(&mut self, params: Vec<&mut [S]>, grads: Vec<&[S]>) -> Result<()> {
        check_len("optimizer tensor count", params.len(), grads.len())?;
        for (p, g) in params.iter().zip(&grads) {
            check_len("optimizer gradient", p.len(), g.len())?;
        }
        if self.velocity.is_empty() {
            self.velocity = params.iter().map(|p| vec![S::zero(); p.len()]).collect();
        }
        if self.velocity.len() != params.len() {
            return Err(Error::DimensionMismatch {
                context: "optimizer state tensor count",
                expected: self.velocity.len(),
                actual: params.len(),
            });
        }
        for (p, v) in params.iter().zip(&self.velocity) {
            check_len("optimizer velocity", v.len(), p.len())?;
        }
        for ((p, g), v) in params.into_iter().zip(grads).zip(&mut self.velocity) {
            for ((pi, &gi), vi) in p.iter_mut().zip(g).zip(v.iter_mut()) {
                *vi = self.momentum * *vi - self.learning_rate * gi;
                *pi += *vi;
            }
        }
        Ok(())
    }
}
