use super::{glorot_bound, uniform_fill, Matrix, Params};
use crate::error::{check_len, Result};
use crate::rng::Rng;
use crate::scalar::{sigmoid, Scalar};

/// LSTM cell without peepholes.
///
/// The four gate blocks are stacked in `weight` (rows `4h`, columns `m + h`)
/// in the order input, forget, output, candidate. Each step computes
/// `z = W [x; h_prev] + b`, `c = f * c_prev + i * g`, `h = o * tanh(c)`.
#[derive(Debug, Clone, PartialEq)]
pub struct LstmCell<S> {
    pub weight: Matrix<S>,
    pub bias: Vec<S>,
    input_size: usize,
    hidden_size: usize,
}

/// Everything one step needs for its backward pass.
#[derive(Debug, Clone)]
pub struct LstmStepCache<S> {
    xh: Vec<S>,
    i: Vec<S>,
    f: Vec<S>,
    o: Vec<S>,
    g: Vec<S>,
    c_prev: Vec<S>,
    tanh_c: Vec<S>,
}

const FORGET_BIAS: f64 = 1.0;

impl<S: Scalar> LstmCell<S> {
    pub fn zeros(input_size: usize, hidden_size: usize) -> Self {
        Self {
            weight: Matrix::zeros(4 * hidden_size, input_size + hidden_size),
            bias: vec![S::zero(); 4 * hidden_size],
            input_size,
            hidden_size,
        }
    }

    /// Glorot-uniform gate matrices, zero biases except the forget gate (1.0).
    pub fn init(input_size: usize, hidden_size: usize, rng: &mut Rng) -> Self {
        let mut cell = Self::zeros(input_size, hidden_size);
        let bound = glorot_bound(input_size + hidden_size, hidden_size);
        uniform_fill(cell.weight.as_mut_slice(), bound, rng);
        for b in &mut cell.bias[hidden_size..2 * hidden_size] {
            *b = S::lit(FORGET_BIAS);
        }
        cell
    }

    pub fn from_parts(input_size: usize, hidden_size: usize, weight: Matrix<S>, bias: Vec<S>) -> Result<Self> {
        check_len("lstm weight rows", 4 * hidden_size, weight.rows())?;
        check_len("lstm weight cols", input_size + hidden_size, weight.cols())?;
        check_len("lstm bias", 4 * hidden_size, bias.len())?;
        Ok(Self {
            weight,
            bias,
            input_size,
            hidden_size,
        })
    }

    pub fn input_size(&self) -> usize {
        self.input_size
    }

    pub fn hidden_size(&self) -> usize {
        self.hidden_size
    }

    pub fn step(&self, x: &[S], h_prev: &[S], c_prev: &[S]) -> Result<(Vec<S>, Vec<S>)> {
        let (h, c, _) = self.step_cached(x, h_prev, c_prev)?;
        Ok((h, c))
    }

    pub fn step_cached(&self, x: &[S], h_prev: &[S], c_prev: &[S]) -> Result<(Vec<S>, Vec<S>, LstmStepCache<S>)> {
        check_len("lstm input", self.input_size, x.len())?;
        check_len("lstm hidden state", self.hidden_size, h_prev.len())?;
        check_len("lstm cell state", self.hidden_size, c_prev.len())?;
        let n = self.hidden_size;
        let mut xh = Vec::with_capacity(self.input_size + n);
        xh.extend_from_slice(x);
        xh.extend_from_slice(h_prev);
        let mut z = vec![S::zero(); 4 * n];
        self.weight.matvec(&xh, &mut z);
        for (zi, &b) in z.iter_mut().zip(&self.bias) {
            *zi += b;
        }
        let i: Vec<S> = z[..n].iter().map(|&v| sigmoid(v)).collect();
        let f: Vec<S> = z[n..2 * n].iter().map(|&v| sigmoid(v)).collect();
        let o: Vec<S> = z[2 * n..3 * n].iter().map(|&v| sigmoid(v)).collect();
        let g: Vec<S> = z[3 * n..].iter().map(|&v| v.tanh()).collect();
        let c: Vec<S> = (0..n).map(|k| f[k] * c_prev[k] + i[k] * g[k]).collect();
        let tanh_c: Vec<S> = c.iter().map(|v| v.tanh()).collect();
        let h: Vec<S> = (0..n).map(|k| o[k] * tanh_c[k]).collect();
        let cache = LstmStepCache {
            xh,
            i,
            f,
            o,
            g,
            c_prev: c_prev.to_vec(),
            tanh_c,
        };
        Ok((h, c, cache))
    }

    /// Given gradients flowing into this step's `h` and `c`, accumulates
    /// parameter gradients and returns `(dx, dh_prev, dc_prev)`.
    pub fn step_backward(
        &self,
        cache: &LstmStepCache<S>,
        dh: &[S],
        dc: &[S],
        grads: &mut LstmCell<S>,
    ) -> (Vec<S>, Vec<S>, Vec<S>) {
        let n = self.hidden_size;
        let one = S::one();
        let mut dz = vec![S::zero(); 4 * n];
        let mut dc_prev = vec![S::zero(); n];
        for k in 0..n {
            let tc = cache.tanh_c[k];
            let dc_total = dc[k] + dh[k] * cache.o[k] * (one - tc * tc);
            let (i, f, o, g) = (cache.i[k], cache.f[k], cache.o[k], cache.g[k]);
            dz[k] = dc_total * g * i * (one - i);
            dz[n + k] = dc_total * cache.c_prev[k] * f * (one - f);
            dz[2 * n + k] = dh[k] * tc * o * (one - o);
            dz[3 * n + k] = dc_total * i * (one - g * g);
            dc_prev[k] = dc_total * f;
        }
        grads.weight.add_outer(&dz, &cache.xh);
        for (gb, &d) in grads.bias.iter_mut().zip(&dz) {
            *gb += d;
        }
        let mut dxh = vec![S::zero(); self.input_size + n];
        self.weight.matvec_t_acc(&dz, &mut dxh);
        let dh_prev = dxh.split_off(self.input_size);
        (dxh, dh_prev, dc_prev)
    }
}

impl<S: Scalar> Params<S> for LstmCell<S> {
    fn tensors(&self) -> Vec<&[S]> {
        vec![self.weight.as_slice(), &self.bias]
    }

    fn tensors_mut(&mut self) -> Vec<&mut [S]> {
        vec![self.weight.as_mut_slice(), &mut self.bias]
    }
}
