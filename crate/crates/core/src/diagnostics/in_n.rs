//! The trilinear cross term `I_n` and its envelope.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::models::ModelSpec;
use crate::scalar::Scalar;
use crate::solver::Cutoff;
use crate::spaces::PathSegment;

use super::xi_cap::xi_series;

/// `I_n(t_k) = ⟨c_n B(y_n, y_{n+1}) − c_{n−1} B(y_{n−1}, y_n), y_{n+1} − y_n⟩`
/// with `c_j = φ_m(|y_j|)·g_δ(|y_j|_ξ)`.
pub fn in_series<T: Scalar>(
    prev: &PathSegment<T>,
    cur: &PathSegment<T>,
    next: &PathSegment<T>,
    model: &ModelSpec<T>,
    cutoff: &Cutoff<T>,
) -> Result<Vec<T>> {
    if !prev.same_grid(cur) || !cur.same_grid(next) {
        return Err(Error::GridMismatch("iterates live on different grids".into()));
    }
    let mut out = Vec::with_capacity(cur.len());
    for k in 0..cur.len() {
        let (ym, y, yp) = (prev.state(k), cur.state(k), next.state(k));
        let diff = yp.sub(y)?;
        let c_cur = cutoff.factor(y.h_norm(), cur.xi_norm_at(k));
        let c_prev = cutoff.factor(ym.h_norm(), prev.xi_norm_at(k));
        let mut v = T::zero();
        if c_cur != T::zero() {
            v += c_cur * model.trilinear(y, yp, &diff)?;
        }
        if c_prev != T::zero() {
            v -= c_prev * model.trilinear(ym, y, &diff)?;
        }
        out.push(v);
    }
    Ok(out)
}

/// Free parameters `(ε, p)` of the envelope and its constant `C`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InEnvelope {
    pub eps: f64,
    pub p: f64,
    pub c: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InReport {
    pub values: Vec<f64>,
    pub envelope: Vec<f64>,
    /// Fraction of grid points with `I_n > envelope`.
    pub violation_fraction: f64,
    /// Smallest `C` for which the envelope holds at every grid point.
    pub required_c: f64,
}

/// Splits the envelope into `A + C·K` at every grid point.
fn envelope_parts<T: Scalar>(
    prev: &PathSegment<T>,
    cur: &PathSegment<T>,
    next: &PathSegment<T>,
    model: &ModelSpec<T>,
    cutoff: &Cutoff<T>,
    eps: f64,
    p: f64,
) -> Result<Vec<(f64, f64)>> {
    let basis = model.basis();
    let xi = xi_series(prev, cur, cutoff.delta)?;
    let m = cutoff.m.to_f64_lossy();
    let d = cutoff.delta.to_f64_lossy();
    let s_weight = eps.powi(-3)
        * (1.0
            + (m + 2.0).powi(2)
            + (m + 2.0).powi(2) / d
            + (m + 1.0).powi(2) * d.powf(-4.0 * p)
            + (m + 1.0).powi(2) * eps.powi(3) * d.powf(-4.0 * p));
    let xi_weight = eps / d.powf(1.5) + eps.powf(-0.5) * d.powf(2.0 * p - 2.0) + eps * d.powf(2.0 * (p - 1.0));
    let dt = cur.dt().to_f64_lossy();
    let mut lower_xi_sq = 0.0;
    let mut out = Vec::with_capacity(cur.len());
    for k in 0..cur.len() {
        let plus = next.state(k).sub(cur.state(k))?;
        let minus = cur.state(k).sub(prev.state(k))?;
        let plus_v = basis.v_norm_sq(&plus)?.to_f64_lossy();
        let minus_v = basis.v_norm_sq(&minus)?.to_f64_lossy();
        let plus_h = plus.h_norm_sq().to_f64_lossy();
        let minus_h = minus.h_norm_sq().to_f64_lossy();
        let xi_k = xi[k].to_f64_lossy();
        let a = 7.0 * eps * plus_v + (2.0 * eps + eps.powf(-0.5) * d.powf(2.0 * p)) * minus_v + 3.0 * eps * minus_h * xi_k;
        let kk = xi_weight * lower_xi_sq * xi_k + s_weight * xi_k * plus_h;
        out.push((a, kk));
        lower_xi_sq += dt * minus_v;
    }
    Ok(out)
}

pub fn in_diagnostic<T: Scalar>(
    prev: &PathSegment<T>,
    cur: &PathSegment<T>,
    next: &PathSegment<T>,
    model: &ModelSpec<T>,
    cutoff: &Cutoff<T>,
    env: InEnvelope,
) -> Result<InReport> {
    let values: Vec<f64> = in_series(prev, cur, next, model, cutoff)?.iter().map(|x| x.to_f64_lossy()).collect();
    let parts = envelope_parts(prev, cur, next, model, cutoff, env.eps, env.p)?;
    let mut required_c: f64 = 0.0;
    let mut violations = 0usize;
    let mut envelope = Vec::with_capacity(values.len());
    for (&v, &(a, k)) in values.iter().zip(&parts) {
        let e = a + env.c * k;
        envelope.push(e);
        if v > e {
            violations += 1;
        }
        if v > a {
            required_c = required_c.max(if k > 0.0 { (v - a) / k } else { f64::INFINITY });
        }
    }
    Ok(InReport {
        violation_fraction: violations as f64 / values.len().max(1) as f64,
        values,
        envelope,
        required_c,
    })
}
