//! Monte Carlo check of the Gronwall moment bound.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::noise::CoefficientSpec;
use crate::scalar::Scalar;
use crate::spaces::{PathSegment, SpectralBasis};
use crate::stats::MeanSe;

/// Minimum ensemble size accepted by [`apriori_check`].
pub const MIN_PATHS: usize = 30;

/// `B(T) = (E|u0|² + 2/(2 − L5)·T·‖f‖²_{V'} + L3·T)·exp(L4·T)`.
pub fn gronwall_bound(e_u0_sq: f64, f_dual_sq: f64, l3: f64, l4: f64, l5: f64, horizon: f64) -> f64 {
    (e_u0_sq + 2.0 / (2.0 - l5) * horizon * f_dual_sq + l3 * horizon) * (l4 * horizon).exp()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AprioriReport {
    pub paths: usize,
    /// `max_k mean |u(t_k)|²` and its standard error.
    pub sup_mean_h_sq: MeanSe,
    pub sup_time: f64,
    /// `mean ∫₀ᵀ ‖u‖²`.
    pub mean_xi_sq: MeanSe,
    /// `B(T)`, bounding `sup_t E|u(t)|²`.
    pub bound_h: f64,
    /// `2B(T)/(2 − L5)`, bounding `E∫‖u‖²`.
    pub bound_xi: f64,
    pub l3: f64,
    pub l4: f64,
    pub l5: f64,
    pub pass_h: bool,
    pub pass_xi: bool,
}

impl AprioriReport {
    pub fn pass(&self) -> bool {
        self.pass_h && self.pass_xi
    }
}

/// Compares ensemble statistics with the bound built from the certified
/// constants of `coeff`; each passes when within three standard errors.
pub fn apriori_check<T: Scalar>(
    paths: &[PathSegment<T>],
    coeff: &CoefficientSpec<T>,
    basis: &SpectralBasis<T>,
) -> Result<AprioriReport> {
    if paths.len() < MIN_PATHS {
        return Err(Error::InvalidParameter(format!("need at least {MIN_PATHS} paths, got {}", paths.len())));
    }
    let first = &paths[0];
    if paths.iter().any(|p| !p.same_grid(first)) {
        return Err(Error::GridMismatch("ensemble paths live on different grids".into()));
    }
    let horizon = (first.time(first.len() - 1) - first.time(0)).to_f64_lossy();
    let mut best = (MeanSe::of(&[0.0]), 0usize);
    let mut column = vec![0.0; paths.len()];
    for k in 0..first.len() {
        for (c, p) in column.iter_mut().zip(paths) {
            *c = p.state(k).h_norm_sq().to_f64_lossy();
        }
        let s = MeanSe::of(&column);
        if k == 0 || s.mean > best.0.mean {
            best = (s, k);
        }
    }
    let xi: Vec<f64> = paths.iter().map(|p| p.xi_sq_running()[p.len() - 1].to_f64_lossy()).collect();
    let mean_xi_sq = MeanSe::of(&xi);
    let e_u0_sq = paths.iter().map(|p| p.state(0).h_norm_sq().to_f64_lossy()).sum::<f64>() / paths.len() as f64;
    let c = coeff.constants();
    let (l3, l4, l5) = (c.l3.to_f64_lossy(), c.l4.to_f64_lossy(), c.l5.to_f64_lossy());
    let f_dual_sq = basis.dual_norm_sq(coeff.forcing())?.to_f64_lossy();
    let bound_h = gronwall_bound(e_u0_sq, f_dual_sq, l3, l4, l5, horizon);
    let bound_xi = 2.0 * bound_h / (2.0 - l5);
    let se = |s: &MeanSe| if s.se.is_finite() { s.se } else { 0.0 };
    Ok(AprioriReport {
        paths: paths.len(),
        sup_mean_h_sq: best.0,
        sup_time: first.time(best.1).to_f64_lossy(),
        mean_xi_sq,
        bound_h,
        bound_xi,
        l3,
        l4,
        l5,
        pass_h: best.0.mean <= bound_h + 3.0 * se(&best.0),
        pass_xi: mean_xi_sq.mean <= bound_xi + 3.0 * se(&mean_xi_sq),
    })
}
