//! Solver configuration.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::noise::TimeGrid;
use crate::scalar::Scalar;
use crate::spaces::{GalerkinVector, SpectralBasis};

/// How the linear part `A` is advanced over one step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Stepper {
    /// `(I + dt·A)⁻¹`.
    #[default]
    Resolvent,
    /// `e^{−dt·A}`.
    Exponential,
}

impl Stepper {
    pub fn apply<T: Scalar>(self, basis: &SpectralBasis<T>, v: &GalerkinVector<T>, dt: T) -> Result<GalerkinVector<T>> {
        match self {
            Stepper::Resolvent => basis.resolvent_step(v, dt),
            Stepper::Exponential => basis.semigroup_step(v, dt),
        }
    }
}

/// How the linearized equation with frozen advecting field is solved.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Default)]
#[serde(rename_all = "snake_case", tag = "mode")]
pub enum InnerMode {
    /// Noise coefficients on the current state, one sweep.
    #[default]
    Direct,
    /// Noise coefficients on the previous inner iterate, iterated to a fixed
    /// point starting from `e^{−At}u0`.
    HIteration { max_inner: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SolverConfig<T> {
    pub horizon: T,
    pub dt: T,
    /// Picard stops once sup-increment + ξ-increment ≤ `tol_picard`; `0`
    /// demands the exact discrete fixed point.
    pub tol_picard: T,
    pub max_picard: usize,
    pub t0: T,
    pub delta0: T,
    pub m: T,
    pub m_growth: T,
    pub max_escalations: usize,
    /// Ceiling on the accumulated `∫‖u‖²` before a run is declared blown up.
    pub xi_ceiling: T,
    pub stepper: Stepper,
    pub inner_mode: InnerMode,
}

/// Number of times a non-convergent Picard window is halved.
pub const MAX_WINDOW_HALVINGS: usize = 4;

impl<T: Scalar> SolverConfig<T> {
    pub fn new(horizon: T, dt: T) -> Self {
        Self {
            horizon,
            dt,
            tol_picard: T::zero(),
            max_picard: 400,
            t0: horizon,
            delta0: T::one(),
            m: T::of(10.0),
            m_growth: T::of(2.0),
            max_escalations: 12,
            xi_ceiling: T::of(1e10),
            stepper: Stepper::Resolvent,
            inner_mode: InnerMode::Direct,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        self.grid()?;
        if !(self.t0 > T::zero()) || self.t0 > self.horizon * (T::one() + T::of(1e-12)) {
            return bad(format!("need 0 < T0 <= T (T0 = {}, T = {})", self.t0, self.horizon));
        }
        if !(self.delta0 > T::zero()) {
            return bad(format!("delta0 must be positive, got {}", self.delta0));
        }
        if !(self.tol_picard >= T::zero()) {
            return bad(format!("tol_picard must be nonnegative, got {}", self.tol_picard));
        }
        if self.max_picard < 2 {
            return bad("max_picard must be at least 2".into());
        }
        if !(self.m > T::zero()) || !self.m.is_finite() {
            return bad(format!("m must be positive, got {}", self.m));
        }
        if !(self.m_growth > T::one()) {
            return bad(format!("m_growth must exceed 1, got {}", self.m_growth));
        }
        if !(self.xi_ceiling > T::zero()) {
            return bad(format!("xi_ceiling must be positive, got {}", self.xi_ceiling));
        }
        if let InnerMode::HIteration { max_inner } = self.inner_mode {
            if max_inner < 1 {
                return bad("max_inner must be at least 1".into());
            }
        }
        Ok(())
    }

    pub fn grid(&self) -> Result<TimeGrid<T>> {
        TimeGrid::new(self.horizon, self.dt)
    }

    /// Window length in steps, at least one.
    pub fn window_steps(&self) -> usize {
        ((self.t0 / self.dt).to_f64_lossy().round() as usize).max(1)
    }
}
