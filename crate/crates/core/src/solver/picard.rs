//! Picard iteration `y_{n+1} = Θ^{y_n}` on one window, with `y_0 ≡ 0`.

use serde::Serialize;

use crate::diagnostics::{in_series, xi_series};
use crate::error::{Error, Result};
use crate::models::ModelSpec;
use crate::noise::{CoefficientSpec, NoiseRealization};
use crate::scalar::Scalar;
use crate::spaces::{GalerkinVector, PathSegment};

use super::config::{InnerMode, SolverConfig};
use super::cutoff::Cutoff;
use super::step::{inner_h_iteration, solve_linearized};

/// Grid steps `start..start + steps`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Window {
    pub start: usize,
    pub steps: usize,
}

/// Increments of `y_{n+1} − y_n` on the window.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IncrementRecord<T> {
    pub n: usize,
    pub sup_increment: T,
    pub xi_increment: T,
    /// `∫ I_n dt`, when diagnostics are recorded.
    pub in_integral: Option<T>,
    /// `∫ Ξ_n dt`, when diagnostics are recorded.
    pub xi_cap_integral: Option<T>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IterationReport<T> {
    pub window: Window,
    /// `increments[n]` compares `y_{n+1}` with `y_n`, starting at `n = 0`.
    pub increments: Vec<IncrementRecord<T>>,
    pub converged: bool,
    pub iterations_used: usize,
}

impl<T: Scalar> IterationReport<T> {
    /// `sup_increment + xi_increment` of the last iterate.
    pub fn last_increment(&self) -> T {
        self.increments.last().map_or(T::zero(), |r| r.sup_increment + r.xi_increment)
    }
}

fn zero_path<T: Scalar>(model: &ModelSpec<T>, window: Window, dt: T) -> Result<PathSegment<T>> {
    let basis = model.basis();
    let zero = GalerkinVector::zeros(model.dim());
    let mut p = PathSegment::new(window.start, dt, zero.clone(), basis)?;
    for _ in 0..window.steps {
        p.push(zero.clone(), basis)?;
    }
    Ok(p)
}

/// Iterates until sup-increment + ξ-increment ≤ `cfg.tol_picard` or
/// `cfg.max_picard` applications of `Θ`; non-convergence is reported in the
/// returned report, not as an error. Records `∫I_n` and `∫Ξ_n` per
/// iteration.
#[allow(clippy::too_many_arguments)]
pub fn picard_local<T: Scalar>(
    noise: &NoiseRealization<T>,
    cfg: &SolverConfig<T>,
    model: &ModelSpec<T>,
    coeff: &CoefficientSpec<T>,
    cutoff: &Cutoff<T>,
    u0: &GalerkinVector<T>,
    window: Window,
) -> Result<(PathSegment<T>, IterationReport<T>)> {
    picard_run(noise, cfg, model, coeff, cutoff, u0, window, true)
}

#[allow(clippy::too_many_arguments)]
pub(crate) fn picard_run<T: Scalar>(
    noise: &NoiseRealization<T>,
    cfg: &SolverConfig<T>,
    model: &ModelSpec<T>,
    coeff: &CoefficientSpec<T>,
    cutoff: &Cutoff<T>,
    u0: &GalerkinVector<T>,
    window: Window,
    diagnostics: bool,
) -> Result<(PathSegment<T>, IterationReport<T>)> {
    if window.steps == 0 || window.start + window.steps > noise.steps() {
        return Err(Error::InvalidParameter(format!(
            "window {}..{} is not inside the {}-step grid",
            window.start,
            window.start + window.steps,
            noise.steps()
        )));
    }
    if u0.dim() != model.dim() {
        return Err(Error::DimensionMismatch { expected: model.dim(), got: u0.dim() });
    }
    let dt = noise.dt();
    let theta = |a: &PathSegment<T>| -> Result<PathSegment<T>> {
        match cfg.inner_mode {
            InnerMode::Direct => solve_linearized(a, noise, cfg, model, coeff, cutoff, u0),
            InnerMode::HIteration { max_inner } => {
                inner_h_iteration(a, noise, cfg, model, coeff, cutoff, u0, max_inner, cfg.tol_picard).map(|r| r.0)
            }
        }
    };
    let mut older = zero_path(model, window, dt)?;
    let mut current = older.clone();
    let mut report = IterationReport { window, increments: Vec::new(), converged: false, iterations_used: 0 };
    for n in 0..cfg.max_picard {
        let next = theta(&current)?;
        report.iterations_used += 1;
        let (sup, xi) = next.distance(&current, model.basis())?;
        let (in_integral, xi_cap_integral) = if diagnostics {
            let i_n = in_series(&older, &current, &next, model, cutoff)?;
            let xi_n = xi_series(&older, &current, cutoff.delta)?;
            let integrate = |v: &[T]| v[..window.steps].iter().fold(T::zero(), |acc, &x| acc + dt * x);
            (Some(integrate(&i_n)), Some(integrate(&xi_n)))
        } else {
            (None, None)
        };
        report.increments.push(IncrementRecord { n, sup_increment: sup, xi_increment: xi, in_integral, xi_cap_integral });
        older = std::mem::replace(&mut current, next);
        if sup + xi <= cfg.tol_picard {
            report.converged = true;
            break;
        }
    }
    Ok((current, report))
}
