//! The single-step update shared by every scheme, and the sweeps built on it.

use crate::error::{Error, Result};
use crate::models::ModelSpec;
use crate::noise::{CoefficientSpec, Jump, NoiseRealization};
use crate::scalar::Scalar;
use crate::spaces::{GalerkinVector, PathSegment};

use super::config::{SolverConfig, Stepper};
use super::cutoff::Cutoff;

/// Noise and time data for step `step`, i.e. `[t_k, t_{k+1}]`.
#[derive(Debug, Clone, Copy)]
pub struct StepInput<'a, T> {
    pub step: usize,
    pub t: T,
    pub dt: T,
    pub dw: &'a [T],
    pub jumps: &'a [Jump<T>],
}

impl<'a, T: Scalar> StepInput<'a, T> {
    pub fn from_noise(noise: &'a NoiseRealization<T>, step: usize) -> Self {
        Self {
            step,
            t: T::of_usize(step) * noise.dt(),
            dt: noise.dt(),
            dw: noise.wiener_increment(step),
            jumps: noise.jumps_in_step(step),
        }
    }

    /// A step without noise.
    pub fn quiet(step: usize, dt: T) -> Self {
        Self { step, t: T::of_usize(step) * dt, dt, dw: &[], jumps: &[] }
    }
}

/// `Stepper[y + dt(−c·B(a, y) + f) + Ψ(s)ΔW + Σ z·G(s, 1) − dt·m1·G(s, 1)]`
/// where `s` is the state the noise coefficients are evaluated on. `c = 0`
/// skips `B` entirely.
#[allow(clippy::too_many_arguments)]
pub(crate) fn advance<T: Scalar>(
    model: &ModelSpec<T>,
    coeff: &CoefficientSpec<T>,
    stepper: Stepper,
    input: &StepInput<'_, T>,
    y: &GalerkinVector<T>,
    noise_state: &GalerkinVector<T>,
    c: T,
    advecting: &GalerkinVector<T>,
) -> Result<GalerkinVector<T>> {
    let dt = input.dt;
    let mut w = y.clone();
    if c != T::zero() {
        let b = model.b_apply(advecting, y)?;
        w.add_scaled(-(dt * c), &b)?;
    }
    w.add_scaled(dt, coeff.forcing_at(input.t))?;
    if coeff.wiener_dims() > 0 && !coeff.psi_family().is_zero() {
        let kick = coeff.eval_psi_apply(input.t, noise_state, input.dw)?;
        w.add_scaled(T::one(), &kick)?;
    }
    if !coeff.g_family().is_zero() && (!input.jumps.is_empty() || coeff.m1() != T::zero()) {
        let g1 = coeff.g_unit(input.t, noise_state)?;
        for j in input.jumps {
            w.add_scaled(j.mark, &g1)?;
        }
        if coeff.m1() != T::zero() {
            w.add_scaled(-(dt * coeff.m1()), &g1)?;
        }
    }
    let next = stepper.apply(model.basis(), &w, dt)?;
    if !next.is_finite() {
        return Err(Error::NonFiniteState { step: input.step + 1 });
    }
    Ok(next)
}

/// One step of the linearized equation with advecting state `a` whose
/// ξ-norm at `t_k` is `a_xi`; the nonlinearity is weighted by
/// `φ_m(|a|)·g_δ(a_xi)`.
#[allow(clippy::too_many_arguments)]
pub fn linear_step<T: Scalar>(
    y: &GalerkinVector<T>,
    a: &GalerkinVector<T>,
    a_xi: T,
    input: &StepInput<'_, T>,
    model: &ModelSpec<T>,
    coeff: &CoefficientSpec<T>,
    cutoff: &Cutoff<T>,
    stepper: Stepper,
) -> Result<GalerkinVector<T>> {
    let c = cutoff.factor(a.h_norm(), a_xi);
    advance(model, coeff, stepper, input, y, y, c, a)
}

pub(crate) fn check_noise<T: Scalar>(
    noise: &NoiseRealization<T>,
    cfg: &SolverConfig<T>,
    coeff: &CoefficientSpec<T>,
) -> Result<()> {
    let grid = cfg.grid()?;
    if noise.dt() != grid.dt || noise.steps() != grid.steps {
        return Err(Error::GridMismatch(format!(
            "noise has {} steps of {}, solver expects {} steps of {}",
            noise.steps(),
            noise.dt(),
            grid.steps,
            grid.dt
        )));
    }
    if noise.wiener_dims() != coeff.wiener_dims() {
        return Err(Error::DimensionMismatch { expected: coeff.wiener_dims(), got: noise.wiener_dims() });
    }
    Ok(())
}

fn check_window<T: Scalar>(advecting: &PathSegment<T>, noise: &NoiseRealization<T>) -> Result<()> {
    if advecting.dt() != noise.dt() || advecting.end_step() > noise.steps() {
        return Err(Error::GridMismatch("advecting path does not lie on the noise grid".into()));
    }
    Ok(())
}

/// `Θ^a`: the path from `u0` driven by the frozen advecting path `a`, on
/// the grid of `a`.
#[allow(clippy::too_many_arguments)]
pub fn solve_linearized<T: Scalar>(
    advecting: &PathSegment<T>,
    noise: &NoiseRealization<T>,
    cfg: &SolverConfig<T>,
    model: &ModelSpec<T>,
    coeff: &CoefficientSpec<T>,
    cutoff: &Cutoff<T>,
    u0: &GalerkinVector<T>,
) -> Result<PathSegment<T>> {
    check_window(advecting, noise)?;
    let start = advecting.start_step();
    let mut path = PathSegment::new(start, noise.dt(), u0.clone(), model.basis())?;
    for k in 0..advecting.steps() {
        let input = StepInput::from_noise(noise, start + k);
        let next = linear_step(
            path.last_state(),
            advecting.state(k),
            advecting.xi_norm_at(k),
            &input,
            model,
            coeff,
            cutoff,
            cfg.stepper,
        )?;
        path.push(next, model.basis())?;
    }
    Ok(path)
}

/// Fixed point of `h ↦ Φ^h`, where `Φ^h` solves the linearized equation
/// with noise coefficients frozen on `h`. Starts from `h_0(t) = e^{−At}u0`
/// and stops when sup-increment + ξ-increment ≤ `tol`. Returns the path and
/// the per-pass increments.
#[allow(clippy::too_many_arguments)]
pub fn inner_h_iteration<T: Scalar>(
    advecting: &PathSegment<T>,
    noise: &NoiseRealization<T>,
    cfg: &SolverConfig<T>,
    model: &ModelSpec<T>,
    coeff: &CoefficientSpec<T>,
    cutoff: &Cutoff<T>,
    u0: &GalerkinVector<T>,
    max_inner: usize,
    tol: T,
) -> Result<(PathSegment<T>, Vec<T>)> {
    check_window(advecting, noise)?;
    if max_inner == 0 {
        return Err(Error::InvalidParameter("max_inner must be at least 1".into()));
    }
    let basis = model.basis();
    let start = advecting.start_step();
    let mut h = PathSegment::new(start, noise.dt(), u0.clone(), basis)?;
    for _ in 0..advecting.steps() {
        let next = basis.semigroup_step(h.last_state(), noise.dt())?;
        h.push(next, basis)?;
    }
    let mut increments = Vec::new();
    for _ in 0..max_inner {
        let mut next_h = PathSegment::new(start, noise.dt(), u0.clone(), basis)?;
        for k in 0..advecting.steps() {
            let input = StepInput::from_noise(noise, start + k);
            let a = advecting.state(k);
            let c = cutoff.factor(a.h_norm(), advecting.xi_norm_at(k));
            let y = advance(model, coeff, cfg.stepper, &input, next_h.last_state(), h.state(k), c, a)?;
            next_h.push(y, basis)?;
        }
        if coeff.is_additive() {
            // coefficients ignore the state, so the first pass is the fixed point
            increments.push(T::zero());
            return Ok((next_h, increments));
        }
        let (sup, xi) = next_h.distance(&h, basis)?;
        increments.push(sup + xi);
        h = next_h;
        if sup + xi <= tol {
            return Ok((h, increments));
        }
    }
    Err(Error::InnerNonConvergence { max_inner })
}

/// Direct semi-implicit Euler–Maruyama scheme with `B(y_k, y_k)` weighted by
/// `φ_m(|y_k|)`, or unweighted when `m` is `None`.
pub fn baseline_direct<T: Scalar>(
    noise: &NoiseRealization<T>,
    cfg: &SolverConfig<T>,
    model: &ModelSpec<T>,
    coeff: &CoefficientSpec<T>,
    u0: &GalerkinVector<T>,
    m: Option<T>,
) -> Result<PathSegment<T>> {
    check_noise(noise, cfg, coeff)?;
    let cutoff = match m {
        Some(m) => Cutoff::new(m, T::one())?,
        None => Cutoff::inactive(),
    };
    let mut path = PathSegment::new(0, noise.dt(), u0.clone(), model.basis())?;
    for k in 0..noise.steps() {
        let input = StepInput::from_noise(noise, k);
        let y = path.last_state();
        let c = match m {
            Some(_) => cutoff.phi_m(y.h_norm()),
            None => T::one(),
        };
        let next = advance(model, coeff, cfg.stepper, &input, y, y, c, y)?;
        path.push(next, model.basis())?;
    }
    Ok(path)
}
