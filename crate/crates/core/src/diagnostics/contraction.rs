//! Ensemble summary of Picard increments.

use serde::Serialize;

use crate::scalar::Scalar;
use crate::solver::IterationReport;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ContractionReport {
    pub paths: usize,
    /// `a_n = sqrt(mean |y_{n+1} − y_n|²_ξ)`.
    pub a: Vec<f64>,
    /// `b_n = mean sup_t |y_{n+1} − y_n|`.
    pub b: Vec<f64>,
    /// `a_{n+1}/a_n`, zero when both vanish.
    pub ratio_a: Vec<f64>,
    pub ratio_b: Vec<f64>,
    pub partial_sum_a: Vec<f64>,
    pub partial_sum_b: Vec<f64>,
}

fn ratio(num: f64, den: f64) -> f64 {
    if num == 0.0 && den == 0.0 {
        0.0
    } else {
        num / den
    }
}

fn partial_sums(v: &[f64]) -> Vec<f64> {
    v.iter()
        .scan(0.0, |acc, x| {
            *acc += x;
            Some(*acc)
        })
        .collect()
}

impl ContractionReport {
    /// Largest `max(a_{n+1}/a_n, b_{n+1}/b_n)` for `n ∈ from..=to`; missing
    /// indices count as converged.
    pub fn max_ratio(&self, from: usize, to: usize) -> f64 {
        (from..=to)
            .map(|n| {
                let ra = self.ratio_a.get(n).copied().unwrap_or(0.0);
                let rb = self.ratio_b.get(n).copied().unwrap_or(0.0);
                ra.max(rb)
            })
            .fold(0.0, f64::max)
    }

    /// `(a_last + b_last)/(a_first + b_first)`.
    pub fn cauchy_ratio(&self, first: usize) -> f64 {
        let at = |n: usize| self.a.get(n).copied().unwrap_or(0.0) + self.b.get(n).copied().unwrap_or(0.0);
        ratio(at(self.a.len().saturating_sub(1)), at(first))
    }
}

/// Iterations a path did not run (it converged earlier) count as zero
/// increments.
pub fn contraction_report<T: Scalar>(reports: &[IterationReport<T>]) -> ContractionReport {
    let n_max = reports.iter().map(|r| r.increments.len()).max().unwrap_or(0);
    let paths = reports.len();
    let mut a = Vec::with_capacity(n_max);
    let mut b = Vec::with_capacity(n_max);
    for n in 0..n_max {
        let (mut xi_sq, mut sup) = (0.0, 0.0);
        for r in reports {
            if let Some(rec) = r.increments.get(n) {
                let x = rec.xi_increment.to_f64_lossy();
                xi_sq += x * x;
                sup += rec.sup_increment.to_f64_lossy();
            }
        }
        a.push((xi_sq / paths as f64).sqrt());
        b.push(sup / paths as f64);
    }
    let ratios = |v: &[f64]| v.windows(2).map(|w| ratio(w[1], w[0])).collect::<Vec<_>>();
    ContractionReport {
        paths,
        ratio_a: ratios(&a),
        ratio_b: ratios(&b),
        partial_sum_a: partial_sums(&a),
        partial_sum_b: partial_sums(&b),
        a,
        b,
    }
}
