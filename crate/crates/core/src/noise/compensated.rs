//! Monte Carlo moments of the stochastic integrals for a frozen integrand.

use serde::Serialize;

use super::coefficients::CoefficientSpec;
use super::measure::LevyMeasure;
use super::realization::{derive_seed, sample_realization, TimeGrid, WienerDriverSpec};
use crate::error::Result;
use crate::scalar::Scalar;
use crate::spaces::GalerkinVector;
use crate::stats::{run_indexed, MeanSe};

/// Zero-mean and isometry statistics of
/// `X = ∫₀ᵀ∫ G(v, z) η̃(dz, dt)` and `Y = ∫₀ᵀ Ψ(v) dW`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompensatedReport {
    pub paths: usize,
    pub horizon: f64,
    /// Per component of `X`: `|mean| / SE` (0 when both vanish).
    pub jump_mean_z: Vec<f64>,
    pub jump_mean_violations: usize,
    /// Sample mean of `|X|²` against `T·∫|G(v, z)|² ν(dz)`.
    pub jump_isometry: MeanSe,
    pub jump_isometry_expected: f64,
    pub jump_isometry_pass: bool,
    pub wiener_mean_z: Vec<f64>,
    pub wiener_mean_violations: usize,
    /// Sample mean of `|Y|²` against `T·‖Ψ(v)‖²_{L2}`.
    pub wiener_isometry: MeanSe,
    pub wiener_isometry_expected: f64,
    pub wiener_isometry_pass: bool,
}

impl CompensatedReport {
    pub fn pass(&self) -> bool {
        self.jump_mean_violations == 0
            && self.wiener_mean_violations == 0
            && self.jump_isometry_pass
            && self.wiener_isometry_pass
    }
}

fn z_scores(samples: &[Vec<f64>], dim: usize) -> Vec<f64> {
    (0..dim)
        .map(|j| {
            let col: Vec<f64> = samples.iter().map(|s| s[j]).collect();
            let s = MeanSe::of(&col);
            if s.mean == 0.0 {
                0.0
            } else {
                s.mean.abs() / s.se
            }
        })
        .collect()
}

fn within(s: &MeanSe, expected: f64) -> bool {
    let tol = 3.0 * s.se + 1e-12 * expected.abs();
    (s.mean - expected).abs() <= tol
}

pub fn compensated_statistics<T: Scalar>(
    coeff: &CoefficientSpec<T>,
    measure: &LevyMeasure<T>,
    v: &GalerkinVector<T>,
    horizon: T,
    paths: usize,
    seed: u64,
) -> Result<CompensatedReport> {
    let grid = TimeGrid::new(horizon, horizon)?;
    let dims = coeff.wiener_dims();
    let g1: Vec<f64> = coeff.g_unit(T::zero(), v)?.coeffs().iter().map(|x| x.to_f64_lossy()).collect();
    let psi: Vec<f64> = coeff.psi_family().action(v)?.coeffs()[..dims].iter().map(|x| x.to_f64_lossy()).collect();
    let (m1, h) = (measure.m1.to_f64_lossy(), horizon.to_f64_lossy());
    let samples = run_indexed(paths, |i| -> Result<(Vec<f64>, Vec<f64>)> {
        let r = sample_realization(grid, measure, WienerDriverSpec { dims }, derive_seed(seed, i as u64))?;
        let marks: f64 = r.jumps().iter().map(|j| j.mark.to_f64_lossy()).sum();
        let x = g1.iter().map(|g| (marks - h * m1) * g).collect();
        let y = psi.iter().zip(r.wiener_increment(0)).map(|(p, w)| p * w.to_f64_lossy()).collect();
        Ok((x, y))
    });
    let samples = samples.into_iter().collect::<Result<Vec<_>>>()?;
    let (xs, ys): (Vec<_>, Vec<_>) = samples.into_iter().unzip();
    let sq = |s: &[Vec<f64>]| s.iter().map(|x| x.iter().map(|a| a * a).sum::<f64>()).collect::<Vec<_>>();
    let jump_mean_z = z_scores(&xs, g1.len());
    let wiener_mean_z = z_scores(&ys, dims);
    let jump_isometry = MeanSe::of(&sq(&xs));
    let wiener_isometry = MeanSe::of(&sq(&ys));
    let jump_isometry_expected = h * measure.m2.to_f64_lossy() * g1.iter().map(|g| g * g).sum::<f64>();
    let wiener_isometry_expected = h * psi.iter().map(|p| p * p).sum::<f64>();
    Ok(CompensatedReport {
        paths,
        horizon: h,
        jump_mean_violations: jump_mean_z.iter().filter(|z| **z > 3.0).count(),
        wiener_mean_violations: wiener_mean_z.iter().filter(|z| **z > 3.0).count(),
        jump_mean_z,
        wiener_mean_z,
        jump_isometry_pass: within(&jump_isometry, jump_isometry_expected),
        wiener_isometry_pass: within(&wiener_isometry, wiener_isometry_expected),
        jump_isometry,
        jump_isometry_expected,
        wiener_isometry,
        wiener_isometry_expected,
    })
}
