//! Finite-dimensional stand-ins for the Hilbert triple `V ⊂ H ⊂ V'` and the
//! operator `A`.
//!
//! Everything is expressed in the eigenbasis of `A`, so `A` acts diagonally
//! and the three norms are weighted Euclidean norms of the coefficient
//! vector:
//!
//! * `|v|    = sqrt(Σ v_k²)`
//! * `‖v‖    = sqrt(Σ λ_k v_k²)`
//! * `‖f‖_V' = sqrt(Σ f_k² / λ_k)`

use num_traits::Float;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Eigenvalues of `A` in the working basis.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectralBasis<T> {
    eigenvalues: Vec<T>,
}

impl<T: Scalar> SpectralBasis<T> {
    /// Requires at least one mode and strictly positive, nondecreasing
    /// eigenvalues.
    pub fn new(eigenvalues: Vec<T>) -> Result<Self> {
        if eigenvalues.is_empty() {
            return Err(Error::InvalidBasis("basis must have at least one mode".into()));
        }
        for (k, &lam) in eigenvalues.iter().enumerate() {
            if !lam.is_finite() || lam <= T::zero() {
                return Err(Error::InvalidBasis(format!(
                    "eigenvalue {k} is {lam}, must be finite and positive"
                )));
            }
            if k > 0 && lam < eigenvalues[k - 1] {
                return Err(Error::InvalidBasis(format!(
                    "eigenvalues must be nondecreasing (index {k})"
                )));
            }
        }
        Ok(Self { eigenvalues })
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvalues(&self) -> &[T] {
        &self.eigenvalues
    }

    /// Smallest eigenvalue, the Poincaré constant of the basis.
    pub fn lambda_min(&self) -> T {
        self.eigenvalues[0]
    }

    pub fn lambda_max(&self) -> T {
        self.eigenvalues[self.eigenvalues.len() - 1]
    }

    fn check(&self, v: &GalerkinVector<T>) -> Result<()> {
        if v.dim() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: v.dim() });
        }
        Ok(())
    }

    /// `‖v‖² = Σ λ_k v_k²`.
    pub fn v_norm_sq(&self, v: &GalerkinVector<T>) -> Result<T> {
        self.check(v)?;
        Ok(self
            .eigenvalues
            .iter()
            .zip(&v.coeffs)
            .fold(T::zero(), |acc, (&lam, &x)| acc + lam * x * x))
    }

    pub fn v_norm(&self, v: &GalerkinVector<T>) -> Result<T> {
        self.v_norm_sq(v).map(Float::sqrt)
    }

    /// `‖f‖_V'² = Σ f_k² / λ_k`.
    pub fn dual_norm_sq(&self, f: &GalerkinVector<T>) -> Result<T> {
        self.check(f)?;
        Ok(self
            .eigenvalues
            .iter()
            .zip(&f.coeffs)
            .fold(T::zero(), |acc, (&lam, &x)| acc + x * x / lam))
    }

    pub fn dual_norm(&self, f: &GalerkinVector<T>) -> Result<T> {
        self.dual_norm_sq(f).map(Float::sqrt)
    }

    /// `(I + dt·A)⁻¹ v`, the backward Euler step for `A`.
    pub fn resolvent_step(&self, v: &GalerkinVector<T>, dt: T) -> Result<GalerkinVector<T>> {
        self.check(v)?;
        if !(dt > T::zero()) {
            return Err(Error::InvalidParameter(format!("resolvent step needs dt > 0, got {dt}")));
        }
        let coeffs = self
            .eigenvalues
            .iter()
            .zip(&v.coeffs)
            .map(|(&lam, &x)| x / (T::one() + dt * lam))
            .collect();
        Ok(GalerkinVector { coeffs })
    }

    /// `exp(-dt·A) v`.
    pub fn semigroup_step(&self, v: &GalerkinVector<T>, dt: T) -> Result<GalerkinVector<T>> {
        self.check(v)?;
        if !(dt >= T::zero()) {
            return Err(Error::InvalidParameter(format!("semigroup step needs dt >= 0, got {dt}")));
        }
        let coeffs = self
            .eigenvalues
            .iter()
            .zip(&v.coeffs)
            .map(|(&lam, &x)| x * (-dt * lam).exp())
            .collect();
        Ok(GalerkinVector { coeffs })
    }
}

/// Coordinates of a state in the eigenbasis of `A`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GalerkinVector<T> {
    coeffs: Vec<T>,
}

impl<T: Scalar> GalerkinVector<T> {
    /// Rejects empty and non-finite coefficient vectors.
    pub fn new(coeffs: Vec<T>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::InvalidParameter("vector must have at least one coordinate".into()));
        }
        let v = Self { coeffs };
        v.ensure_finite("GalerkinVector::new")?;
        Ok(v)
    }

    pub fn zeros(dim: usize) -> Self {
        Self { coeffs: vec![T::zero(); dim] }
    }

    /// The basis vector `e_{index}` (zero-based index).
    pub fn unit(dim: usize, index: usize) -> Self {
        let mut v = Self::zeros(dim);
        v.coeffs[index] = T::one();
        v
    }

    pub(crate) fn from_vec_unchecked(coeffs: Vec<T>) -> Self {
        Self { coeffs }
    }

    pub fn dim(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [T] {
        &mut self.coeffs
    }

    pub fn into_vec(self) -> Vec<T> {
        self.coeffs
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|x| x.is_finite())
    }

    pub fn ensure_finite(&self, context: &str) -> Result<()> {
        if self.is_finite() {
            Ok(())
        } else {
            Err(Error::NonFinite { context: context.to_string() })
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|x| *x == T::zero())
    }

    /// `|v|² = Σ v_k²`.
    pub fn h_norm_sq(&self) -> T {
        self.coeffs.iter().fold(T::zero(), |acc, &x| acc + x * x)
    }

    /// The `H` norm, plain Euclidean length of the coordinates.
    pub fn h_norm(&self) -> T {
        self.h_norm_sq().sqrt()
    }

    pub fn dot(&self, other: &Self) -> Result<T> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: other.dim() });
        }
        Ok(self.coeffs.iter().zip(&other.coeffs).fold(T::zero(), |acc, (&a, &b)| acc + a * b))
    }

    /// `self += alpha · other`.
    pub fn add_scaled(&mut self, alpha: T, other: &Self) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: other.dim() });
        }
        for (a, &b) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *a += alpha * b;
        }
        Ok(())
    }

    pub fn scaled(&self, alpha: T) -> Self {
        Self { coeffs: self.coeffs.iter().map(|&x| alpha * x).collect() }
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: other.dim() });
        }
        Ok(Self { coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(&a, &b)| a - b).collect() })
    }

    pub fn cast<U: Scalar>(&self) -> GalerkinVector<U> {
        GalerkinVector { coeffs: self.coeffs.iter().map(|x| U::of(x.to_f64_lossy())).collect() }
    }
}

/// Free-function form of [`GalerkinVector::h_norm`].
pub fn h_norm<T: Scalar>(v: &GalerkinVector<T>) -> T {
    v.h_norm()
}

/// States on a uniform grid `t_k = (start_step + k)·dt` together with the
/// running left-Riemann sums of `‖y‖²`, i.e. the squared ξ-norm.
#[derive(Debug, Clone, PartialEq)]
pub struct PathSegment<T> {
    start_step: usize,
    dt: T,
    states: Vec<GalerkinVector<T>>,
    v_norm_sq: Vec<T>,
    xi_sq_running: Vec<T>,
}

impl<T: Scalar> PathSegment<T> {
    /// A one-point path holding `initial` at grid index `start_step`.
    pub fn new(start_step: usize, dt: T, initial: GalerkinVector<T>, basis: &SpectralBasis<T>) -> Result<Self> {
        if !(dt > T::zero()) {
            return Err(Error::InvalidParameter(format!("path step must be positive, got {dt}")));
        }
        initial.ensure_finite("initial state")?;
        let vn = basis.v_norm_sq(&initial)?;
        Ok(Self {
            start_step,
            dt,
            states: vec![initial],
            v_norm_sq: vec![vn],
            xi_sq_running: vec![T::zero()],
        })
    }

    /// Appends the state at the next grid point; the ξ increment uses the
    /// previous (left endpoint) state.
    pub fn push(&mut self, state: GalerkinVector<T>, basis: &SpectralBasis<T>) -> Result<()> {
        if !state.is_finite() {
            return Err(Error::NonFiniteState { step: self.start_step + self.states.len() });
        }
        let vn = basis.v_norm_sq(&state)?;
        let last = self.xi_sq_running.len() - 1;
        let next = self.xi_sq_running[last] + self.dt * self.v_norm_sq[last];
        self.xi_sq_running.push(next);
        self.states.push(state);
        self.v_norm_sq.push(vn);
        Ok(())
    }

    /// Number of grid points (steps + 1).
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn steps(&self) -> usize {
        self.states.len() - 1
    }

    pub fn start_step(&self) -> usize {
        self.start_step
    }

    pub fn end_step(&self) -> usize {
        self.start_step + self.steps()
    }

    pub fn dt(&self) -> T {
        self.dt
    }

    pub fn time(&self, k: usize) -> T {
        T::of_usize(self.start_step + k) * self.dt
    }

    pub fn times(&self) -> Vec<T> {
        (0..self.len()).map(|k| self.time(k)).collect()
    }

    pub fn states(&self) -> &[GalerkinVector<T>] {
        &self.states
    }

    pub fn state(&self, k: usize) -> &GalerkinVector<T> {
        &self.states[k]
    }

    pub fn last_state(&self) -> &GalerkinVector<T> {
        &self.states[self.states.len() - 1]
    }

    /// `‖y(t_k)‖²` for every grid point.
    pub fn v_norm_sq(&self) -> &[T] {
        &self.v_norm_sq
    }

    pub fn xi_sq_running(&self) -> &[T] {
        &self.xi_sq_running
    }

    /// `|y|_{ξ}` at local grid index `k`.
    pub fn xi_norm_at(&self, k: usize) -> T {
        self.xi_sq_running[k].sqrt()
    }

    /// ξ-norm at absolute time `t`, which must be a grid point of the path.
    pub fn xi_norm(&self, t: T) -> Result<T> {
        let k = self.index_of(t)?;
        Ok(self.xi_norm_at(k))
    }

    /// Local index of the grid point `t`.
    pub fn index_of(&self, t: T) -> Result<usize> {
        let pos = t / self.dt - T::of_usize(self.start_step);
        let k = pos.round();
        let tol = T::of(1e-9) * (T::one() + pos.abs());
        if (pos - k).abs() > tol || k < T::zero() || k.to_usize().is_none_or(|k| k >= self.len()) {
            return Err(Error::OffGrid { t: t.to_f64_lossy() });
        }
        Ok(k.to_usize().unwrap_or(0))
    }

    /// Largest `H` norm over the grid.
    pub fn sup_h_norm(&self) -> T {
        self.states.iter().fold(T::zero(), |acc, s| acc.max(s.h_norm()))
    }

    pub fn max_v_norm_sq(&self) -> T {
        self.v_norm_sq.iter().fold(T::zero(), |acc, &x| acc.max(x))
    }

    /// Restriction to local indices `0..=end`.
    pub fn truncated(&self, end: usize) -> Self {
        Self {
            start_step: self.start_step,
            dt: self.dt,
            states: self.states[..=end].to_vec(),
            v_norm_sq: self.v_norm_sq[..=end].to_vec(),
            xi_sq_running: self.xi_sq_running[..=end].to_vec(),
        }
    }

    /// Appends `other`, whose first grid point must coincide with this
    /// path's last. ξ sums continue across the seam, so concatenation is
    /// additive in the ξ-norm.
    pub fn extend(&mut self, other: &PathSegment<T>) -> Result<()> {
        if other.start_step != self.end_step() || other.dt != self.dt {
            return Err(Error::GridMismatch(format!(
                "cannot append segment starting at step {} to one ending at step {}",
                other.start_step,
                self.end_step()
            )));
        }
        let offset = self.xi_sq_running[self.xi_sq_running.len() - 1];
        for k in 1..other.len() {
            self.states.push(other.states[k].clone());
            self.v_norm_sq.push(other.v_norm_sq[k]);
            self.xi_sq_running.push(offset + other.xi_sq_running[k]);
        }
        Ok(())
    }

    pub fn same_grid(&self, other: &PathSegment<T>) -> bool {
        self.start_step == other.start_step && self.dt == other.dt && self.len() == other.len()
    }

    /// `sup_k |self(t_k) − other(t_k)|` and `|self − other|_ξ` over the whole
    /// segment.
    pub fn distance(&self, other: &PathSegment<T>, basis: &SpectralBasis<T>) -> Result<(T, T)> {
        if !self.same_grid(other) {
            return Err(Error::GridMismatch("paths live on different grids".into()));
        }
        let mut sup = T::zero();
        let mut xi_sq = T::zero();
        for k in 0..self.len() {
            let d = self.states[k].sub(&other.states[k])?;
            sup = sup.max(d.h_norm());
            if k + 1 < self.len() {
                xi_sq += self.dt * basis.v_norm_sq(&d)?;
            }
        }
        Ok((sup, xi_sq.sqrt()))
    }
}
