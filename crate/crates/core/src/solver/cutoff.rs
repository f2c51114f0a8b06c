//! The `C²` cutoff pair `φ_m`, `g_δ`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// `max |S'| = S'(1/2)`.
pub const SMOOTHSTEP_MAX_SLOPE: f64 = 15.0 / 8.0;

/// Quintic smoothstep `S(s) = 6s⁵ − 15s⁴ + 10s³`, clamped to `[0, 1]`.
pub fn smoothstep<T: Scalar>(s: T) -> T {
    if s <= T::zero() {
        T::zero()
    } else if s >= T::one() {
        T::one()
    } else {
        s * s * s * (s * (s * T::of(6.0) - T::of(15.0)) + T::of(10.0))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Cutoff<T> {
    pub m: T,
    pub delta: T,
}

impl<T: Scalar> Cutoff<T> {
    pub fn new(m: T, delta: T) -> Result<Self> {
        if !(m > T::zero()) || !(delta > T::zero()) {
            return Err(Error::InvalidParameter(format!("cutoff levels must be positive (m = {m}, delta = {delta})")));
        }
        Ok(Self { m, delta })
    }

    /// Both cutoffs identically one on any finite range of interest.
    pub fn inactive() -> Self {
        Self { m: T::max_value().sqrt(), delta: T::max_value().sqrt() }
    }

    /// `1` on `[0, m]`, `0` on `[m + 1, ∞)`.
    pub fn phi_m(&self, x: T) -> T {
        T::one() - smoothstep(x - self.m)
    }

    /// `1` on `[0, δ]`, `0` on `[2δ, ∞)`.
    pub fn g_delta(&self, x: T) -> T {
        T::one() - smoothstep((x - self.delta) / self.delta)
    }

    /// `φ_m(|a|)·g_δ(|a|_ξ)`.
    pub fn factor(&self, h_norm: T, xi_norm: T) -> T {
        self.phi_m(h_norm) * self.g_delta(xi_norm)
    }

    pub fn lipschitz_phi(&self) -> T {
        T::of(SMOOTHSTEP_MAX_SLOPE)
    }

    pub fn lipschitz_g(&self) -> T {
        T::of(SMOOTHSTEP_MAX_SLOPE) / self.delta
    }
}

pub fn phi_m<T: Scalar>(c: &Cutoff<T>, x: T) -> T {
    c.phi_m(x)
}

pub fn g_delta<T: Scalar>(c: &Cutoff<T>, x: T) -> T {
    c.g_delta(x)
}
