//! Stopping-time concatenation of Picard windows and patching in `m`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::models::ModelSpec;
use crate::noise::{CoefficientSpec, NoiseRealization};
use crate::scalar::Scalar;
use crate::spaces::{GalerkinVector, PathSegment};

use super::config::{SolverConfig, MAX_WINDOW_HALVINGS};
use super::cutoff::Cutoff;
use super::picard::{picard_run, IterationReport, Window};
use super::step::check_noise;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WindowRecord<T> {
    pub start_step: usize,
    pub end_step: usize,
    /// The window ended because its ξ budget was spent, not at `T0`.
    pub triggered: bool,
    /// `∫‖u‖²` accumulated inside the window.
    pub xi_sq_spent: T,
    pub halvings: usize,
    pub report: IterationReport<T>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveOutcome<T> {
    /// Covers `[0, T]` unless `blowup_flag` is set, in which case it ends at
    /// the first grid time with `|u| ≥ m_final`.
    pub trajectory: PathSegment<T>,
    /// Window boundaries strictly inside `(0, T)`, increasing.
    pub stop_times: Vec<T>,
    pub windows: Vec<WindowRecord<T>>,
    pub m_final: T,
    pub escalations: usize,
    pub blowup_flag: bool,
    pub seed: u64,
}

/// Solution of the `m`-cutoff equation on `[0, T]`: successive Picard
/// windows, each ending at the first grid time where `∫‖u‖²` accumulated
/// since the window start reaches `δ0²`, or after `T0`.
pub fn concatenate_m_solution<T: Scalar>(
    noise: &NoiseRealization<T>,
    cfg: &SolverConfig<T>,
    model: &ModelSpec<T>,
    coeff: &CoefficientSpec<T>,
    u0: &GalerkinVector<T>,
    m: T,
) -> Result<SolveOutcome<T>> {
    cfg.validate()?;
    check_noise(noise, cfg, coeff)?;
    let cutoff = Cutoff::new(m, cfg.delta0)?;
    let budget = cfg.delta0 * cfg.delta0;
    let total = noise.steps();
    let mut path = PathSegment::new(0, noise.dt(), u0.clone(), model.basis())?;
    let mut windows = Vec::new();
    let mut stop_times = Vec::new();
    let mut start = 0;
    while start < total {
        let mut steps = cfg.window_steps().min(total - start);
        let mut halvings = 0;
        let (segment, report) = loop {
            let window = Window { start, steps };
            let (seg, report) = picard_run(noise, cfg, model, coeff, &cutoff, path.last_state(), window, false)?;
            if report.converged {
                break (seg, report);
            }
            if halvings == MAX_WINDOW_HALVINGS || steps == 1 {
                return Err(Error::PicardNonConvergence {
                    window_start: (T::of_usize(start) * noise.dt()).to_f64_lossy(),
                    retries: halvings,
                });
            }
            steps = (steps / 2).max(1);
            halvings += 1;
        };
        let trigger = (1..=steps).find(|&k| segment.xi_sq_running()[k] >= budget);
        let end = trigger.unwrap_or(steps);
        let segment = segment.truncated(end);
        path.extend(&segment)?;
        let accumulated = path.xi_sq_running()[path.len() - 1];
        if accumulated > cfg.xi_ceiling {
            return Err(Error::BlowUp {
                t: path.time(path.len() - 1).to_f64_lossy(),
                accumulated: accumulated.to_f64_lossy(),
                ceiling: cfg.xi_ceiling.to_f64_lossy(),
            });
        }
        windows.push(WindowRecord {
            start_step: start,
            end_step: start + end,
            triggered: trigger.is_some(),
            xi_sq_spent: segment.xi_sq_running()[end],
            halvings,
            report,
        });
        start += end;
        if start < total {
            stop_times.push(T::of_usize(start) * noise.dt());
        }
    }
    Ok(SolveOutcome {
        trajectory: path,
        stop_times,
        windows,
        m_final: m,
        escalations: 0,
        blowup_flag: false,
        seed: noise.seed(),
    })
}

/// First grid index with `|u| ≥ m`.
fn first_exit<T: Scalar>(path: &PathSegment<T>, m: T) -> Option<usize> {
    path.states().iter().position(|s| s.h_norm() >= m)
}

/// Solves at `cfg.m`; whenever the path reaches `|u| ≥ m`, `m` is multiplied
/// by `m_growth` and the run repeated on the same noise. After
/// `max_escalations` escalations the last path is returned truncated at its
/// exit time with `blowup_flag` set.
pub fn global_solve<T: Scalar>(
    noise: &NoiseRealization<T>,
    cfg: &SolverConfig<T>,
    model: &ModelSpec<T>,
    coeff: &CoefficientSpec<T>,
    u0: &GalerkinVector<T>,
) -> Result<SolveOutcome<T>> {
    let mut m = cfg.m;
    let mut escalations = 0;
    loop {
        let mut out = concatenate_m_solution(noise, cfg, model, coeff, u0, m)?;
        out.escalations = escalations;
        match first_exit(&out.trajectory, m) {
            None => return Ok(out),
            Some(k) if escalations == cfg.max_escalations => {
                let exit = T::of_usize(k) * noise.dt();
                out.trajectory = out.trajectory.truncated(k);
                out.stop_times.retain(|&t| t < exit);
                out.blowup_flag = true;
                return Ok(out);
            }
            Some(_) => {
                m *= cfg.m_growth;
                escalations += 1;
            }
        }
    }
}
