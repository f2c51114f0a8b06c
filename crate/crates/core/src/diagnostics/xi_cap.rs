//! The cutoff-capped quantity `Ξ_n`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::spaces::PathSegment;
use crate::solver::Cutoff;

/// `Ξ_n(t_k) = ‖y_{n−1}‖²·1[|y_{n−1}|_ξ ≤ 3δ] + ‖y_n‖²·1[|y_n|_ξ ≤ 3δ]` on
/// the common grid.
pub fn xi_series<T: Scalar>(prev: &PathSegment<T>, cur: &PathSegment<T>, delta: T) -> Result<Vec<T>> {
    if !prev.same_grid(cur) {
        return Err(Error::GridMismatch("iterates live on different grids".into()));
    }
    let cap = T::of(3.0) * delta;
    let term = |p: &PathSegment<T>, k: usize| if p.xi_norm_at(k) <= cap { p.v_norm_sq()[k] } else { T::zero() };
    Ok((0..cur.len()).map(|k| term(prev, k) + term(cur, k)).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct XiCapReport {
    /// Left-Riemann `∫ Ξ_n dt`.
    pub integral: f64,
    /// `18δ² + 2·overshoot`.
    pub cap: f64,
    /// `dt·max_k ‖y_k‖²` over both iterates.
    pub overshoot: f64,
    pub pass: bool,
}

pub fn xi_cap_check<T: Scalar>(prev: &PathSegment<T>, cur: &PathSegment<T>, cutoff: &Cutoff<T>) -> Result<XiCapReport> {
    let series = xi_series(prev, cur, cutoff.delta)?;
    let dt = cur.dt().to_f64_lossy();
    let integral: f64 = series[..cur.steps()].iter().map(|x| dt * x.to_f64_lossy()).sum();
    let overshoot = dt * prev.max_v_norm_sq().max(cur.max_v_norm_sq()).to_f64_lossy();
    let delta = cutoff.delta.to_f64_lossy();
    let cap = 18.0 * delta * delta + 2.0 * overshoot;
    Ok(XiCapReport { integral, cap, overshoot, pass: integral <= cap * (1.0 + 1e-12) })
}
