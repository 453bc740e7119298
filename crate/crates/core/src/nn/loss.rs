use crate::error::{check_len, Error, Result};
use crate::scalar::Scalar;

/// `log sum exp(x)` with max subtraction.
pub fn logsumexp<S: Scalar>(x: &[S]) -> S {
    let max = x.iter().copied().fold(S::neg_infinity(), S::max);
    if !max.is_finite() {
        return max;
    }
    let sum: S = x.iter().map(|&v| (v - max).exp()).sum();
    max + sum.ln()
}

pub fn softmax<S: Scalar>(x: &[S]) -> Vec<S> {
    let lse = logsumexp(x);
    x.iter().map(|&v| (v - lse).exp()).collect()
}

/// Cross entropy of `softmax(logits)` against class `gold`, with its gradient
/// `softmax(logits) - onehot(gold)`.
pub fn softmax_logloss<S: Scalar>(logits: &[S], gold: usize) -> Result<(S, Vec<S>)> {
    if logits.is_empty() {
        return Err(Error::InvalidArgument("softmax over empty logits".into()));
    }
    if gold >= logits.len() {
        return Err(Error::OutOfRange {
            index: gold,
            len: logits.len(),
        });
    }
    let lse = logsumexp(logits);
    let loss = lse - logits[gold];
    let mut grad: Vec<S> = logits.iter().map(|&v| (v - lse).exp()).collect();
    grad[gold] -= S::one();
    Ok((loss, grad))
}

/// `lambda * sum (theta - anchor)^2` and its gradient `2 lambda (theta - anchor)`.
pub fn anchored_l2<S: Scalar>(params: &[S], anchor: &[S], lambda: S) -> Result<(S, Vec<S>)> {
    check_len("anchored l2", anchor.len(), params.len())?;
    let two = S::lit(2.0);
    let mut penalty = S::zero();
    let grad = params
        .iter()
        .zip(anchor)
        .map(|(&p, &a)| {
            let diff = p - a;
            penalty += diff * diff;
            two * lambda * diff
        })
        .collect();
    Ok((lambda * penalty, grad))
}
