//! Sample statistics and deterministic ensemble execution.

use rayon::prelude::*;
use serde::Serialize;

/// Mean and standard error of the mean.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MeanSe {
    pub mean: f64,
    pub se: f64,
    pub n: usize,
}

impl MeanSe {
    pub fn of(values: &[f64]) -> Self {
        let n = values.len();
        if n == 0 {
            return Self { mean: f64::NAN, se: f64::NAN, n };
        }
        let mean = crate::scalar::pairwise_sum(values) / n as f64;
        if n < 2 {
            return Self { mean, se: f64::NAN, n };
        }
        let dev: Vec<f64> = values.iter().map(|x| (x - mean) * (x - mean)).collect();
        let var = crate::scalar::pairwise_sum(&dev) / (n - 1) as f64;
        Self { mean, se: (var / n as f64).sqrt(), n }
    }

    pub fn sd(&self) -> f64 {
        self.se * (self.n as f64).sqrt()
    }
}

/// Runs `f(0..n)` in parallel and returns the results in index order, so
/// downstream aggregation is independent of scheduling.
pub fn run_indexed<R, F>(n: usize, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(usize) -> R + Sync + Send,
{
    (0..n).into_par_iter().map(f).collect()
}

/// Least-squares slope of `log2(err)` against `log2(dt)`.
pub fn convergence_order(dts: &[f64], errors: &[f64]) -> f64 {
    let xs: Vec<f64> = dts.iter().map(|d| d.log2()).collect();
    let ys: Vec<f64> = errors.iter().map(|e| e.log2()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}
