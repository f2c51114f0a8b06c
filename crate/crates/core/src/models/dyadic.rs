//! Real dyadic shell model with nearest-neighbour coupling.
//!
//! Shell `n` (one-based) carries wavenumber `k_n = k0·2^{n−1}` and the
//! trilinear form is
//!
//! ```text
//! b(u, v, w) = Σ_n k_n u_n (v_n w_{n+1} − v_{n+1} w_n)
//! ```
//!
//! which is antisymmetric in `(v, w)` term by term. Shells outside `1..=N`
//! contribute nothing.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::spaces::{GalerkinVector, SpectralBasis};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DyadicShellParams<T> {
    pub modes: usize,
    pub k0: T,
    pub visc: T,
}

impl<T: Scalar> DyadicShellParams<T> {
    pub fn new(modes: usize, k0: T, visc: T) -> Result<Self> {
        let p = Self { modes, k0, visc };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.modes == 0 {
            return Err(Error::InvalidParameter("dyadic model needs at least one shell".into()));
        }
        if !(self.k0 > T::one()) || !self.k0.is_finite() {
            return Err(Error::InvalidParameter(format!("dyadic k0 must exceed 1, got {}", self.k0)));
        }
        if !(self.visc > T::zero()) || !self.visc.is_finite() {
            return Err(Error::InvalidParameter(format!("viscosity must be positive, got {}", self.visc)));
        }
        Ok(())
    }

    /// `k_n = k0·2^{n−1}` for `n = 1..=N`.
    pub fn wavenumbers(&self) -> Vec<T> {
        let two = T::of(2.0);
        (0..self.modes).map(|n| self.k0 * two.powi(n as i32)).collect()
    }

    /// Eigenvalues `ν k_n²` of `A`.
    pub fn basis(&self) -> Result<SpectralBasis<T>> {
        SpectralBasis::new(self.wavenumbers().into_iter().map(|k| self.visc * k * k).collect())
    }

    /// `(a0, C_b)` with the `H` norm as the `Q` norm:
    /// `a0 = 1/(sqrt(ν) k_1)` from `‖v‖ ≥ sqrt(ν) k_1 |v|`, and
    /// `C_b = 2/sqrt(ν)` from Hölder on both sums of the form.
    pub fn certify(&self) -> (T, T) {
        let s = self.visc.sqrt();
        (T::one() / (s * self.k0), T::of(2.0) / s)
    }
}

#[derive(Debug, Clone)]
pub struct DyadicShell<T> {
    params: DyadicShellParams<T>,
    k: Vec<T>,
}

impl<T: Scalar> DyadicShell<T> {
    pub fn new(params: DyadicShellParams<T>) -> Result<Self> {
        params.validate()?;
        Ok(Self { k: params.wavenumbers(), params })
    }

    pub fn params(&self) -> &DyadicShellParams<T> {
        &self.params
    }

    pub fn wavenumbers(&self) -> &[T] {
        &self.k
    }

    fn check(&self, v: &GalerkinVector<T>) -> Result<()> {
        if v.dim() != self.params.modes {
            return Err(Error::DimensionMismatch { expected: self.params.modes, got: v.dim() });
        }
        Ok(())
    }

    pub fn trilinear(&self, u: &GalerkinVector<T>, v: &GalerkinVector<T>, w: &GalerkinVector<T>) -> Result<T> {
        self.check(u)?;
        self.check(v)?;
        self.check(w)?;
        let (u, v, w) = (u.coeffs(), v.coeffs(), w.coeffs());
        let mut acc = T::zero();
        for n in 0..self.params.modes.saturating_sub(1) {
            acc += self.k[n] * u[n] * (v[n] * w[n + 1] - v[n + 1] * w[n]);
        }
        Ok(acc)
    }

    /// `B(u, v)_m = k_{m−1} u_{m−1} v_{m−1} − k_m u_m v_{m+1}`.
    pub fn apply(&self, u: &GalerkinVector<T>, v: &GalerkinVector<T>) -> Result<GalerkinVector<T>> {
        self.check(u)?;
        self.check(v)?;
        let n = self.params.modes;
        let (u, v) = (u.coeffs(), v.coeffs());
        let mut out = vec![T::zero(); n];
        for m in 0..n {
            let mut acc = T::zero();
            if m > 0 {
                acc += self.k[m - 1] * u[m - 1] * v[m - 1];
            }
            if m + 1 < n {
                acc -= self.k[m] * u[m] * v[m + 1];
            }
            out[m] = acc;
        }
        Ok(GalerkinVector::from_vec_unchecked(out))
    }
}

/// Free-function form of the dyadic trilinear form.
pub fn dyadic_trilinear<T: Scalar>(
    u: &GalerkinVector<T>,
    v: &GalerkinVector<T>,
    w: &GalerkinVector<T>,
    params: &DyadicShellParams<T>,
) -> Result<T> {
    DyadicShell::new(*params)?.trilinear(u, v, w)
}

/// `(a0, C_b)` for the dyadic model.
pub fn dyadic_certify<T: Scalar>(params: &DyadicShellParams<T>) -> (T, T) {
    params.certify()
}
