//! Minimal neural-network substrate with hand-written backpropagation.
//!
//! Gradients are stored in a value of the same type as the model they belong
//! to (see [`Params::zeros_like`]), so optimizers and the gradient checker can
//! walk parameters and gradients in lockstep.

mod dense;
mod dropout;
mod gradcheck;
mod loss;
mod lstm;
mod matrix;
mod optim;

pub use dense::{dense_forward, Activation, Dense, Mlp, MlpTrace};
pub use dropout::{Dropout, DropoutSpec};
pub use gradcheck::{gradient_check, gradient_check_sampled, GradCheckFailure, GradCheckReport};
pub use loss::{anchored_l2, logsumexp, softmax, softmax_logloss};
pub use lstm::{LstmCell, LstmStepCache};
pub use matrix::Matrix;
pub use optim::SgdMomentum;

use crate::scalar::Scalar;

/// Anything that owns trainable tensors in a fixed declaration order.
pub trait Params<S: Scalar> {
    fn tensors(&self) -> Vec<&[S]>;

    fn tensors_mut(&mut self) -> Vec<&mut [S]>;

    fn num_params(&self) -> usize {
        self.tensors().iter().map(|t| t.len()).sum()
    }

    /// A same-shaped value with every parameter set to zero; used as a
    /// gradient accumulator.
    fn zeros_like(&self) -> Self
    where
        Self: Clone,
    {
        let mut z = self.clone();
        z.fill_zero();
        z
    }

    fn fill_zero(&mut self) {
        for t in self.tensors_mut() {
            t.fill(S::zero());
        }
    }

    /// `self += alpha * other`, tensor by tensor.
    fn add_scaled(&mut self, other: &Self, alpha: S) {
        for (dst, src) in self.tensors_mut().into_iter().zip(other.tensors()) {
            for (d, &s) in dst.iter_mut().zip(src) {
                *d += alpha * s;
            }
        }
    }

    fn scale(&mut self, alpha: S) {
        for t in self.tensors_mut() {
            for v in t.iter_mut() {
                *v *= alpha;
            }
        }
    }

    fn all_finite(&self) -> bool {
        self.tensors().iter().all(|t| t.iter().all(|v| v.is_finite()))
    }
}

/// Glorot-uniform bound for a `fan_out x fan_in` matrix.
pub(crate) fn glorot_bound(fan_in: usize, fan_out: usize) -> f64 {
    (6.0 / (fan_in + fan_out) as f64).sqrt()
}

pub(crate) fn uniform_fill<S: Scalar, R: rand::Rng>(data: &mut [S], bound: f64, rng: &mut R) {
    for v in data.iter_mut() {
        *v = S::lit(rng.gen_range(-bound..=bound));
    }
}

/// `len` values drawn uniformly from `[-bound, bound]`.
pub fn random_vec<S: Scalar, R: rand::Rng>(len: usize, bound: f64, rng: &mut R) -> Vec<S> {
    (0..len).map(|_| S::lit(rng.gen_range(-bound..=bound))).collect()
}
