//! Independent paths solved in parallel, returned in index order.

use crate::error::Result;
use crate::models::ModelSpec;
use crate::noise::{derive_seed, sample_realization, CoefficientSpec, LevyMeasure, NoiseRealization, WienerDriverSpec};
use crate::scalar::Scalar;
use crate::spaces::GalerkinVector;
use crate::stats::run_indexed;

use super::config::SolverConfig;
use super::global::{global_solve, SolveOutcome};

/// Noise of path `index`: seed `derive_seed(base_seed, index)`.
pub fn path_noise<T: Scalar>(
    cfg: &SolverConfig<T>,
    measure: &LevyMeasure<T>,
    coeff: &CoefficientSpec<T>,
    base_seed: u64,
    index: usize,
) -> Result<NoiseRealization<T>> {
    let dims = WienerDriverSpec { dims: coeff.wiener_dims() };
    sample_realization(cfg.grid()?, measure, dims, derive_seed(base_seed, index as u64))
}

/// `global_solve` on `paths` independent noise samples.
pub fn run_ensemble<T: Scalar>(
    model: &ModelSpec<T>,
    coeff: &CoefficientSpec<T>,
    measure: &LevyMeasure<T>,
    cfg: &SolverConfig<T>,
    u0: &GalerkinVector<T>,
    paths: usize,
    base_seed: u64,
) -> Vec<Result<SolveOutcome<T>>> {
    run_indexed(paths, |i| {
        let noise = path_noise(cfg, measure, coeff, base_seed, i)?;
        global_solve(&noise, cfg, model, coeff, u0)
    })
}
