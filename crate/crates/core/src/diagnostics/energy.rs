//! Discrete Itô balance for `|y|²`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::models::ModelSpec;
use crate::noise::{CoefficientSpec, NoiseRealization};
use crate::scalar::Scalar;
use crate::solver::StepInput;
use crate::spaces::PathSegment;

/// Terms of `|y_{k+1}|² − |y_k|²` for one step, all evaluated at `y_k`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LedgerStep<T> {
    /// `2dt‖y_k‖²`, entering with a minus sign.
    pub dissipation: T,
    /// `2dt⟨f, y_k⟩`.
    pub forcing: T,
    /// `2⟨Ψ(y_k)ΔW_k, y_k⟩`.
    pub wiener_mart: T,
    /// `2Σ z⟨G(y_k, 1), y_k⟩ − 2dt·m1⟨G(y_k, 1), y_k⟩`.
    pub jump_mart: T,
    /// `Σ |z·G(y_k, 1)|²` over the realized jumps.
    pub jump_quad: T,
    /// `dt‖Ψ(y_k)‖²_{L2}`.
    pub wiener_quad: T,
    pub residual: T,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnergyLedger<T> {
    pub steps: Vec<LedgerStep<T>>,
}

impl<T: Scalar> EnergyLedger<T> {
    /// `Σ_k residual_k`.
    pub fn residual_sum(&self) -> T {
        self.steps.iter().fold(T::zero(), |acc, s| acc + s.residual)
    }

    /// `Σ_k |residual_k|`.
    pub fn abs_residual_sum(&self) -> T {
        self.steps.iter().fold(T::zero(), |acc, s| acc + s.residual.abs())
    }

    /// `max_j |Σ_{k<j} residual_k|`.
    pub fn max_cumulative_residual(&self) -> T {
        let mut run = T::zero();
        let mut max = T::zero();
        for s in &self.steps {
            run += s.residual;
            max = max.max(run.abs());
        }
        max
    }
}

/// Ledger of a path produced with `noise`. The nonlinearity contributes no
/// term: `⟨B(y, y), y⟩ = 0`.
pub fn energy_ledger<T: Scalar>(
    path: &PathSegment<T>,
    noise: &NoiseRealization<T>,
    model: &ModelSpec<T>,
    coeff: &CoefficientSpec<T>,
) -> Result<EnergyLedger<T>> {
    if path.dt() != noise.dt() || path.end_step() > noise.steps() {
        return Err(Error::GridMismatch("path does not lie on the noise grid".into()));
    }
    if path.state(0).dim() != model.dim() {
        return Err(Error::DimensionMismatch { expected: model.dim(), got: path.state(0).dim() });
    }
    let two = T::of(2.0);
    let mut steps = Vec::with_capacity(path.steps());
    for k in 0..path.steps() {
        let input = StepInput::from_noise(noise, path.start_step() + k);
        let dt = input.dt;
        let y = path.state(k);
        let dissipation = two * dt * path.v_norm_sq()[k];
        let forcing = two * dt * coeff.forcing_at(input.t).dot(y)?;
        let (mut wiener_mart, mut wiener_quad) = (T::zero(), T::zero());
        if coeff.wiener_dims() > 0 {
            wiener_mart = two * coeff.eval_psi_apply(input.t, y, input.dw)?.dot(y)?;
            wiener_quad = dt * coeff.psi_hs_norm_sq(input.t, y)?;
        }
        let g1 = coeff.g_unit(input.t, y)?;
        let pairing = g1.dot(y)?;
        let g_sq = g1.h_norm_sq();
        let mut jump_mart = -(two * dt * coeff.m1() * pairing);
        let mut jump_quad = T::zero();
        for j in input.jumps {
            jump_mart += two * j.mark * pairing;
            jump_quad += j.mark * j.mark * g_sq;
        }
        let increment = path.state(k + 1).h_norm_sq() - y.h_norm_sq();
        let residual = increment - (-dissipation + forcing + wiener_mart + jump_mart + jump_quad + wiener_quad);
        steps.push(LedgerStep { dissipation, forcing, wiener_mart, jump_mart, jump_quad, wiener_quad, residual });
    }
    Ok(EnergyLedger { steps })
}
