use serde::{Deserialize, Serialize};

use super::{glorot_bound, uniform_fill, DropoutSpec, Matrix, Params};
use crate::error::{check_len, Result};
use crate::rng::Rng;
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Activation {
    Linear,
    Relu,
    Tanh,
}

impl Activation {
    pub fn apply<S: Scalar>(self, z: S) -> S {
        match self {
            Activation::Linear => z,
            Activation::Relu => z.max(S::zero()),
            Activation::Tanh => z.tanh(),
        }
    }

    /// Derivative expressed through the activation's output.
    pub fn derivative_from_output<S: Scalar>(self, y: S) -> S {
        match self {
            Activation::Linear => S::one(),
            Activation::Relu => {
                if y > S::zero() {
                    S::one()
                } else {
                    S::zero()
                }
            }
            Activation::Tanh => S::one() - y * y,
        }
    }
}

/// Affine map followed by an elementwise activation: `g(Wx + b)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Dense<S> {
    pub weight: Matrix<S>,
    pub bias: Vec<S>,
    pub activation: Activation,
}

impl<S: Scalar> Dense<S> {
    pub fn new(weight: Matrix<S>, bias: Vec<S>, activation: Activation) -> Result<Self> {
        check_len("dense bias", weight.rows(), bias.len())?;
        Ok(Self {
            weight,
            bias,
            activation,
        })
    }

    pub fn zeros(input: usize, output: usize, activation: Activation) -> Self {
        Self {
            weight: Matrix::zeros(output, input),
            bias: vec![S::zero(); output],
            activation,
        }
    }

    /// Glorot-uniform weights, zero bias.
    pub fn init(input: usize, output: usize, activation: Activation, rng: &mut Rng) -> Self {
        let mut layer = Self::zeros(input, output, activation);
        uniform_fill(layer.weight.as_mut_slice(), glorot_bound(input, output), rng);
        layer
    }

    pub fn input_size(&self) -> usize {
        self.weight.cols()
    }

    pub fn output_size(&self) -> usize {
        self.weight.rows()
    }

    pub fn forward(&self, x: &[S]) -> Result<Vec<S>> {
        check_len("dense input", self.input_size(), x.len())?;
        let mut out = vec![S::zero(); self.output_size()];
        self.weight.matvec(x, &mut out);
        for (o, &b) in out.iter_mut().zip(&self.bias) {
            *o = self.activation.apply(*o + b);
        }
        Ok(out)
    }

    /// Accumulates parameter gradients into `grads` and returns the gradient
    /// with respect to `input`. `output` must be this layer's output on `input`.
    pub fn backward(&self, input: &[S], output: &[S], grad_out: &[S], grads: &mut Dense<S>) -> Vec<S> {
        let dz: Vec<S> = grad_out
            .iter()
            .zip(output)
            .map(|(&g, &y)| g * self.activation.derivative_from_output(y))
            .collect();
        grads.weight.add_outer(&dz, input);
        for (gb, &d) in grads.bias.iter_mut().zip(&dz) {
            *gb += d;
        }
        let mut grad_in = vec![S::zero(); self.input_size()];
        self.weight.matvec_t_acc(&dz, &mut grad_in);
        grad_in
    }
}

impl<S: Scalar> Params<S> for Dense<S> {
    fn tensors(&self) -> Vec<&[S]> {
        vec![self.weight.as_slice(), &self.bias]
    }

    fn tensors_mut(&mut self) -> Vec<&mut [S]> {
        vec![self.weight.as_mut_slice(), &mut self.bias]
    }
}

pub fn dense_forward<S: Scalar>(layer: &Dense<S>, x: &[S]) -> Result<Vec<S>> {
    layer.forward(x)
}

/// A stack of dense layers applied in order.
#[derive(Debug, Clone, PartialEq)]
pub struct Mlp<S> {
    pub layers: Vec<Dense<S>>,
}

/// Per-layer inputs (after dropout) and outputs recorded by a training pass.
#[derive(Debug, Clone)]
pub struct MlpTrace<S> {
    inputs: Vec<Vec<S>>,
    outputs: Vec<Vec<S>>,
    masks: Vec<Option<Vec<S>>>,
}

impl<S> MlpTrace<S> {
    pub fn output(&self) -> &[S] {
        self.outputs.last().map(Vec::as_slice).unwrap_or(&[])
    }
}

impl<S: Scalar> Mlp<S> {
    pub fn new(layers: Vec<Dense<S>>) -> Result<Self> {
        for pair in layers.windows(2) {
            check_len("mlp layer chaining", pair[0].output_size(), pair[1].input_size())?;
        }
        Ok(Self { layers })
    }

    /// Layers of the given widths; relu on hidden layers, `last` on the output.
    pub fn init(widths: &[usize], last: Activation, rng: &mut Rng) -> Self {
        let n = widths.len().saturating_sub(1);
        let layers = (0..n)
            .map(|k| {
                let act = if k + 1 == n { last } else { Activation::Relu };
                Dense::init(widths[k], widths[k + 1], act, rng)
            })
            .collect();
        Self { layers }
    }

    pub fn input_size(&self) -> usize {
        self.layers.first().map_or(0, Dense::input_size)
    }

    pub fn output_size(&self) -> usize {
        self.layers.last().map_or(0, Dense::output_size)
    }

    pub fn forward(&self, x: &[S]) -> Result<Vec<S>> {
        let mut h = x.to_vec();
        for layer in &self.layers {
            h = layer.forward(&h)?;
        }
        Ok(h)
    }

    pub fn forward_trace(&self, x: &[S]) -> Result<MlpTrace<S>> {
        self.forward_trace_inner(x, None)
    }

    /// Training pass with inverted dropout on the input and on every hidden layer.
    pub fn forward_trace_dropout(&self, x: &[S], spec: &DropoutSpec, rng: &mut Rng) -> Result<MlpTrace<S>> {
        self.forward_trace_inner(x, Some((spec, rng)))
    }

    fn forward_trace_inner(&self, x: &[S], mut dropout: Option<(&DropoutSpec, &mut Rng)>) -> Result<MlpTrace<S>> {
        let n = self.layers.len();
        let mut trace = MlpTrace {
            inputs: Vec::with_capacity(n),
            outputs: Vec::with_capacity(n),
            masks: Vec::with_capacity(n),
        };
        let mut h = x.to_vec();
        for (k, layer) in self.layers.iter().enumerate() {
            let mask = match dropout.as_mut() {
                Some((spec, rng)) => {
                    let rate = if k == 0 { spec.input_rate } else { spec.hidden_rate };
                    super::Dropout::new(rate).apply_in_place(&mut h, rng)
                }
                None => None,
            };
            let out = layer.forward(&h)?;
            trace.inputs.push(h);
            trace.masks.push(mask);
            h = out.clone();
            trace.outputs.push(out);
        }
        Ok(trace)
    }

    /// Backpropagates `grad_out` through the recorded pass; returns the
    /// gradient with respect to the network input.
    pub fn backward(&self, trace: &MlpTrace<S>, grad_out: &[S], grads: &mut Mlp<S>) -> Vec<S> {
        let mut g = grad_out.to_vec();
        for k in (0..self.layers.len()).rev() {
            g = self.layers[k].backward(&trace.inputs[k], &trace.outputs[k], &g, &mut grads.layers[k]);
            if let Some(mask) = &trace.masks[k] {
                for (gi, &m) in g.iter_mut().zip(mask) {
                    *gi *= m;
                }
            }
        }
        g
    }
}

impl<S: Scalar> Params<S> for Mlp<S> {
    fn tensors(&self) -> Vec<&[S]> {
        self.layers.iter().flat_map(|l| l.tensors()).collect()
    }

    fn tensors_mut(&mut self) -> Vec<&mut [S]> {
        self.layers.iter_mut().flat_map(|l| l.tensors_mut()).collect()
    }
}
