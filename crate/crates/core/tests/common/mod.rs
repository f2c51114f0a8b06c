#![allow(dead_code)]

use levy_galerkin::models::{DyadicShellParams, ModelSpec};
use levy_galerkin::noise::{
    sample_realization, CoefficientFamily, CoefficientSpec, LevyMeasure, NoiseRealization, TimeGrid, WienerDriverSpec,
};
use levy_galerkin::solver::SolverConfig;
use levy_galerkin::GalerkinVector;

pub fn dyadic(modes: usize, visc: f64) -> ModelSpec<f64> {
    ModelSpec::dyadic(DyadicShellParams::new(modes, 2.0, visc).unwrap()).unwrap()
}

pub fn coeff(
    model: &ModelSpec<f64>,
    g: CoefficientFamily<f64>,
    psi: CoefficientFamily<f64>,
    measure: &LevyMeasure<f64>,
    dims: usize,
    forcing: GalerkinVector<f64>,
) -> CoefficientSpec<f64> {
    CoefficientSpec::new(&g, &psi, forcing, measure, model.basis(), model.visc(), dims).unwrap()
}

pub fn quiet(model: &ModelSpec<f64>, forcing: GalerkinVector<f64>) -> CoefficientSpec<f64> {
    CoefficientSpec::deterministic(forcing, model.basis()).unwrap()
}

pub fn noise(cfg: &SolverConfig<f64>, measure: &LevyMeasure<f64>, dims: usize, seed: u64) -> NoiseRealization<f64> {
    let grid = TimeGrid::new(cfg.horizon, cfg.dt).unwrap();
    sample_realization(grid, measure, WienerDriverSpec { dims }, seed).unwrap()
}

pub fn vector(v: &[f64]) -> GalerkinVector<f64> {
    GalerkinVector::new(v.to_vec()).unwrap()
}

/// Smooth decaying profile `amp·2^{-j}` over `dim` modes.
pub fn profile(dim: usize, amp: f64) -> GalerkinVector<f64> {
    vector(&(0..dim).map(|j| amp * 0.5f64.powi(j as i32)).collect::<Vec<_>>())
}
