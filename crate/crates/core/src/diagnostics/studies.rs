//! Step-size studies on coupled noise: the coarse realizations are
//! aggregates of one fine realization per path.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::models::ModelSpec;
use crate::noise::{CoefficientSpec, LevyMeasure, NoiseRealization};
use crate::scalar::Scalar;
use crate::solver::{baseline_direct, concatenate_m_solution, global_solve, path_noise, SolverConfig};
use crate::spaces::GalerkinVector;
use crate::stats::{convergence_order, run_indexed, MeanSe};

use super::energy::energy_ledger;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StepStudy {
    pub dts: Vec<f64>,
    pub paths: usize,
    /// Per step size, the mean and standard error of the studied quantity.
    pub values: Vec<MeanSe>,
    /// Least-squares slope of `log value` against `log dt`.
    pub order: f64,
}

impl StepStudy {
    fn new(dts: &[f64], paths: usize, per_path: Vec<Vec<f64>>) -> Self {
        let values: Vec<MeanSe> = (0..dts.len())
            .map(|i| MeanSe::of(&per_path.iter().map(|p| p[i]).collect::<Vec<_>>()))
            .collect();
        let means: Vec<f64> = values.iter().map(|v| v.mean).collect();
        Self { dts: dts.to_vec(), paths, order: convergence_order(dts, &means), values }
    }

    /// `values[i].mean / values[i + 1].mean`.
    pub fn successive_ratios(&self) -> Vec<f64> {
        self.values.windows(2).map(|w| w[0].mean / w[1].mean).collect()
    }
}

/// Coupled realizations on each of `dts`, all coarsenings of one sample at
/// `finest`.
fn coupled<T: Scalar>(
    cfg: &SolverConfig<T>,
    measure: &LevyMeasure<T>,
    coeff: &CoefficientSpec<T>,
    dts: &[f64],
    finest: f64,
    seed: u64,
    index: usize,
) -> Result<Vec<(SolverConfig<T>, NoiseRealization<T>)>> {
    let fine_cfg = SolverConfig { dt: T::of(finest), ..*cfg };
    let fine = path_noise(&fine_cfg, measure, coeff, seed, index)?;
    dts.iter()
        .map(|&dt| {
            let factor = (dt / finest).round();
            if factor < 1.0 || (factor * finest - dt).abs() > 1e-9 * dt {
                return Err(Error::GridMismatch(format!("{dt} is not a multiple of {finest}")));
            }
            let noise = fine.coarsen(factor as usize)?;
            Ok((SolverConfig { dt: noise.dt(), ..*cfg }, noise))
        })
        .collect()
}

fn min_dt(dts: &[f64]) -> Result<f64> {
    if dts.len() < 2 || dts.iter().any(|d| !(*d > 0.0)) {
        return Err(Error::InvalidParameter("a step study needs at least two positive step sizes".into()));
    }
    Ok(dts.iter().copied().fold(f64::INFINITY, f64::min))
}

/// `|Σ_k residual_k|` of the energy ledger of the global solution, per step
/// size.
#[allow(clippy::too_many_arguments)]
pub fn ledger_order_study<T: Scalar>(
    model: &ModelSpec<T>,
    coeff: &CoefficientSpec<T>,
    measure: &LevyMeasure<T>,
    cfg: &SolverConfig<T>,
    u0: &GalerkinVector<T>,
    dts: &[f64],
    paths: usize,
    seed: u64,
) -> Result<StepStudy> {
    let finest = min_dt(dts)?;
    let per_path = run_indexed(paths, |i| -> Result<Vec<f64>> {
        coupled(cfg, measure, coeff, dts, finest, seed, i)?
            .iter()
            .map(|(c, noise)| {
                let out = global_solve(noise, c, model, coeff, u0)?;
                Ok(energy_ledger(&out.trajectory, noise, model, coeff)?.residual_sum().abs().to_f64_lossy())
            })
            .collect()
    });
    Ok(StepStudy::new(dts, paths, per_path.into_iter().collect::<Result<_>>()?))
}

/// `|u_dt(T) − u_ref(T)|` where the reference runs at `min(dts)/ref_factor`
/// on the same noise.
#[allow(clippy::too_many_arguments)]
pub fn strong_order_study<T: Scalar>(
    model: &ModelSpec<T>,
    coeff: &CoefficientSpec<T>,
    measure: &LevyMeasure<T>,
    cfg: &SolverConfig<T>,
    u0: &GalerkinVector<T>,
    dts: &[f64],
    ref_factor: usize,
    paths: usize,
    seed: u64,
) -> Result<StepStudy> {
    let finest = min_dt(dts)? / ref_factor.max(1) as f64;
    let mut all = dts.to_vec();
    all.push(finest);
    let per_path = run_indexed(paths, |i| -> Result<Vec<f64>> {
        let finals = coupled(cfg, measure, coeff, &all, finest, seed, i)?
            .iter()
            .map(|(c, noise)| Ok(global_solve(noise, c, model, coeff, u0)?.trajectory.last_state().clone()))
            .collect::<Result<Vec<_>>>()?;
        let reference = &finals[dts.len()];
        finals[..dts.len()].iter().map(|u| Ok(u.sub(reference)?.h_norm().to_f64_lossy())).collect()
    });
    Ok(StepStudy::new(dts, paths, per_path.into_iter().collect::<Result<_>>()?))
}

/// `sup_k |u_concat(t_k) − u_base(t_k)|` between the concatenated cutoff
/// solution at level `cfg.m` and the direct scheme with the same cutoff.
#[allow(clippy::too_many_arguments)]
pub fn scheme_gap_study<T: Scalar>(
    model: &ModelSpec<T>,
    coeff: &CoefficientSpec<T>,
    measure: &LevyMeasure<T>,
    cfg: &SolverConfig<T>,
    u0: &GalerkinVector<T>,
    dts: &[f64],
    paths: usize,
    seed: u64,
) -> Result<StepStudy> {
    let finest = min_dt(dts)?;
    let per_path = run_indexed(paths, |i| -> Result<Vec<f64>> {
        coupled(cfg, measure, coeff, dts, finest, seed, i)?
            .iter()
            .map(|(c, noise)| {
                let concat = concatenate_m_solution(noise, c, model, coeff, u0, c.m)?;
                let base = baseline_direct(noise, c, model, coeff, u0, Some(c.m))?;
                Ok(concat.trajectory.distance(&base, model.basis())?.0.to_f64_lossy())
            })
            .collect()
    });
    Ok(StepStudy::new(dts, paths, per_path.into_iter().collect::<Result<_>>()?))
}
