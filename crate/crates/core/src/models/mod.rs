//! The `(A, B, Q)` model contract and its two shipped instantiations.

pub mod certify;
pub mod dyadic;
pub mod nse;

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::spaces::{GalerkinVector, SpectralBasis};

pub use dyadic::{dyadic_certify, dyadic_trilinear, DyadicShell, DyadicShellParams};
pub use nse::{nse_trilinear, Nse2d, Nse2dParams};

#[derive(Debug, Clone)]
pub enum ModelKind<T: Scalar> {
    Dyadic(DyadicShell<T>),
    Nse2d(Box<Nse2d<T>>),
}

/// A skew-symmetric bilinear operator `B` on a diagonal basis together with
/// its `Q` norm and the constants `a0` (B2) and `C_b` (B3).
#[derive(Debug, Clone)]
pub struct ModelSpec<T: Scalar> {
    kind: ModelKind<T>,
    basis: SpectralBasis<T>,
    wavenumbers: Vec<T>,
    visc: T,
    a0: T,
    c_b: T,
    name: String,
}

impl<T: Scalar> ModelSpec<T> {
    /// Dyadic shell model with the analytically certified constants.
    pub fn dyadic(params: DyadicShellParams<T>) -> Result<Self> {
        let shell = DyadicShell::new(params)?;
        let (a0, c_b) = params.certify();
        Ok(Self {
            basis: params.basis()?,
            wavenumbers: shell.wavenumbers().to_vec(),
            visc: params.visc,
            a0,
            c_b,
            name: "dyadic".into(),
            kind: ModelKind::Dyadic(shell),
        })
    }

    /// 2D Navier–Stokes model. `C_b = 1/sqrt(ν)` follows from the discrete
    /// Hölder inequality on the grid; `a0` is estimated by sampling.
    pub fn nse2d(params: Nse2dParams<T>, a0_samples: usize, seed: u64) -> Result<Self> {
        let nse = Nse2d::new(params)?;
        let basis = nse.basis()?;
        let a0 = certify::estimate_a0(&nse, a0_samples, seed)?;
        Ok(Self {
            basis,
            wavenumbers: nse.wavenumbers().to_vec(),
            visc: params.visc,
            a0,
            c_b: T::one() / params.visc.sqrt(),
            name: "nse2d".into(),
            kind: ModelKind::Nse2d(Box::new(nse)),
        })
    }

    /// Replaces the declared constants, e.g. to test that the certification
    /// checks catch a wrong value.
    pub fn with_constants(mut self, a0: T, c_b: T) -> Result<Self> {
        if !(a0 > T::zero()) || !(c_b > T::zero()) {
            return Err(Error::InvalidParameter("model constants must be positive".into()));
        }
        self.a0 = a0;
        self.c_b = c_b;
        Ok(self)
    }

    pub fn kind(&self) -> &ModelKind<T> {
        &self.kind
    }

    pub fn basis(&self) -> &SpectralBasis<T> {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.dim()
    }

    /// `|k_j| = sqrt(λ_j / ν)` per basis function.
    pub fn wavenumbers(&self) -> &[T] {
        &self.wavenumbers
    }

    pub fn visc(&self) -> T {
        self.visc
    }

    pub fn a0(&self) -> T {
        self.a0
    }

    pub fn c_b(&self) -> T {
        self.c_b
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// `b(u, v, w) = ⟨B(u, v), w⟩`.
    pub fn trilinear(&self, u: &GalerkinVector<T>, v: &GalerkinVector<T>, w: &GalerkinVector<T>) -> Result<T> {
        match &self.kind {
            ModelKind::Dyadic(m) => m.trilinear(u, v, w),
            ModelKind::Nse2d(m) => m.trilinear(u, v, w),
        }
    }

    /// `B(u, v)` in basis coordinates.
    pub fn b_apply(&self, u: &GalerkinVector<T>, v: &GalerkinVector<T>) -> Result<GalerkinVector<T>> {
        match &self.kind {
            ModelKind::Dyadic(m) => m.apply(u, v),
            ModelKind::Nse2d(m) => m.apply(u, v),
        }
    }

    pub fn q_norm(&self, v: &GalerkinVector<T>) -> Result<T> {
        match &self.kind {
            ModelKind::Dyadic(_) => {
                if v.dim() != self.dim() {
                    return Err(Error::DimensionMismatch { expected: self.dim(), got: v.dim() });
                }
                Ok(v.h_norm())
            }
            ModelKind::Nse2d(m) => m.q_norm(v),
        }
    }
}
