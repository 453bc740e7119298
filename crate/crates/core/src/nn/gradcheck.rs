use rand::seq::index::sample;

use super::Params;
use crate::rng::Rng;

#[derive(Debug, Clone, PartialEq)]
pub struct GradCheckFailure {
    pub tensor: usize,
    pub index: usize,
    pub analytic: f64,
    pub numeric: f64,
    pub rel_error: f64,
}

#[derive(Debug, Clone, Default)]
pub struct GradCheckReport {
    pub checked: usize,
    pub max_rel_error: f64,
    pub failures: Vec<GradCheckFailure>,
}

impl GradCheckReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Compares `analytic` against central differences of `loss` around `params`
/// at every coordinate. The error measure is
/// `|analytic - numeric| / max(1, |analytic|, |numeric|)`.
pub fn gradient_check<M, F>(params: &M, analytic: &M, loss: F, eps: f64, tol: f64) -> GradCheckReport
where
    M: Params<f64> + Clone,
    F: Fn(&M) -> f64,
{
    check_coords(params, analytic, loss, eps, tol, |len| (0..len).collect())
}

/// Like [`gradient_check`] but only visits up to `per_tensor` random
/// coordinates of each tensor.
pub fn gradient_check_sampled<M, F>(
    params: &M,
    analytic: &M,
    loss: F,
    eps: f64,
    tol: f64,
    per_tensor: usize,
    rng: &mut Rng,
) -> GradCheckReport
where
    M: Params<f64> + Clone,
    F: Fn(&M) -> f64,
{
    check_coords(params, analytic, loss, eps, tol, |len| {
        if len <= per_tensor {
            (0..len).collect()
        } else {
            let mut idx = sample(rng, len, per_tensor).into_vec();
            idx.sort_unstable();
            idx
        }
    })
}

fn check_coords<M, F, P>(params: &M, analytic: &M, loss: F, eps: f64, tol: f64, mut pick: P) -> GradCheckReport
where
    M: Params<f64> + Clone,
    F: Fn(&M) -> f64,
    P: FnMut(usize) -> Vec<usize>,
{
    let mut report = GradCheckReport::default();
    let analytic: Vec<Vec<f64>> = analytic.tensors().iter().map(|t| t.to_vec()).collect();
    let mut probe = params.clone();
    let lens: Vec<usize> = params.tensors().iter().map(|t| t.len()).collect();
    for (t, &len) in lens.iter().enumerate() {
        for index in pick(len) {
            let orig = probe.tensors()[t][index];
            probe.tensors_mut()[t][index] = orig + eps;
            let plus = loss(&probe);
            probe.tensors_mut()[t][index] = orig - eps;
            let minus = loss(&probe);
            probe.tensors_mut()[t][index] = orig;
            let numeric = (plus - minus) / (2.0 * eps);
            let a = analytic[t][index];
            let rel_error = (a - numeric).abs() / 1f64.max(a.abs()).max(numeric.abs());
            report.checked += 1;
            report.max_rel_error = report.max_rel_error.max(rel_error);
            if rel_error.is_nan() || rel_error > tol {
                report.failures.push(GradCheckFailure {
                    tensor: t,
                    index,
                    analytic: a,
                    numeric,
                    rel_error,
                });
            }
        }
    }
    report
}
