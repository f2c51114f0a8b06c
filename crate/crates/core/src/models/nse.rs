//! Two-dimensional incompressible Navier–Stokes on the torus `[0, 2π)²`.
//!
//! The state is expanded in real divergence-free Fourier modes
//!
//! ```text
//! e_{k,c}(x) = √2 cos(k·x) k⊥/|k|,   e_{k,s}(x) = √2 sin(k·x) k⊥/|k|
//! ```
//!
//! for `k` in a half plane with `|k_x|, |k_y| ≤ M`, orthonormal for the
//! averaged `L²` inner product. `A = −νΔ` has eigenvalue `ν|k|²` on both.
//!
//! The convection term `(u·∇)v` is evaluated pseudospectrally. With the
//! two-thirds rule the collocation grid has `n ≥ 3M + 1` points per axis, so
//! every product of three retained fields is integrated exactly by the grid
//! mean. The discrete form is then the exact continuum form restricted to
//! the retained modes and skew-symmetry holds to roundoff.

use std::sync::Arc;

use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::spaces::{GalerkinVector, SpectralBasis};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Nse2dParams<T> {
    pub modes_per_axis: usize,
    pub visc: T,
    pub dealias: bool,
}

impl<T: Scalar> Nse2dParams<T> {
    pub fn new(modes_per_axis: usize, visc: T, dealias: bool) -> Result<Self> {
        let p = Self { modes_per_axis, visc, dealias };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.modes_per_axis == 0 {
            return Err(Error::InvalidParameter("NSE model needs modes_per_axis >= 1".into()));
        }
        if !(self.visc > T::zero()) || !self.visc.is_finite() {
            return Err(Error::InvalidParameter(format!("viscosity must be positive, got {}", self.visc)));
        }
        Ok(())
    }

    /// Number of real divergence-free modes: `(2M + 1)² − 1`.
    pub fn state_dim(&self) -> usize {
        let side = 2 * self.modes_per_axis + 1;
        side * side - 1
    }

    /// Collocation points per axis.
    pub fn grid_size(&self) -> usize {
        if self.dealias {
            3 * self.modes_per_axis + 1
        } else {
            2 * self.modes_per_axis + 1
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Parity {
    Cos,
    Sin,
}

#[derive(Debug, Clone, Copy)]
struct Mode<T> {
    kx: i64,
    ky: i64,
    parity: Parity,
    /// Unit vector `k⊥/|k|`.
    dir: [T; 2],
    /// Flat index of `k` on the collocation grid.
    slot: usize,
}

/// Pseudospectral NSE nonlinearity with cached FFT plans.
#[derive(Clone)]
pub struct Nse2d<T: Scalar> {
    params: Nse2dParams<T>,
    n: usize,
    modes: Vec<Mode<T>>,
    wavenumbers: Vec<T>,
    fwd: Arc<dyn Fft<T>>,
    inv: Arc<dyn Fft<T>>,
}

impl<T: Scalar> std::fmt::Debug for Nse2d<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Nse2d").field("params", &self.params).field("grid", &self.n).finish()
    }
}

impl<T: Scalar> Nse2d<T> {
    pub fn new(params: Nse2dParams<T>) -> Result<Self> {
        params.validate()?;
        let m = params.modes_per_axis as i64;
        let n = params.grid_size();
        let mut ks = Vec::new();
        for kx in 0..=m {
            for ky in -m..=m {
                if kx > 0 || ky > 0 {
                    ks.push((kx, ky));
                }
            }
        }
        ks.sort_by_key(|&(kx, ky)| (kx * kx + ky * ky, kx, ky));
        let mut modes = Vec::with_capacity(2 * ks.len());
        let mut wavenumbers = Vec::with_capacity(2 * ks.len());
        let wrap = |k: i64| -> usize { k.rem_euclid(n as i64) as usize };
        for &(kx, ky) in &ks {
            let norm = ((kx * kx + ky * ky) as f64).sqrt();
            let dir = [T::of(-(ky as f64) / norm), T::of(kx as f64 / norm)];
            let slot = wrap(kx) * n + wrap(ky);
            for parity in [Parity::Cos, Parity::Sin] {
                modes.push(Mode { kx, ky, parity, dir, slot });
                wavenumbers.push(T::of(norm));
            }
        }
        let mut planner = FftPlanner::new();
        let fwd = planner.plan_fft_forward(n);
        let inv = planner.plan_fft_inverse(n);
        Ok(Self { params, n, modes, wavenumbers, fwd, inv })
    }

    pub fn params(&self) -> &Nse2dParams<T> {
        &self.params
    }

    pub fn dim(&self) -> usize {
        self.modes.len()
    }

    pub fn grid_size(&self) -> usize {
        self.n
    }

    /// `|k|` of every basis function, in basis order.
    pub fn wavenumbers(&self) -> &[T] {
        &self.wavenumbers
    }

    /// Wavevector `(k_x, k_y)` and whether the mode is the cosine member.
    pub fn mode(&self, index: usize) -> ((i64, i64), bool) {
        let m = &self.modes[index];
        ((m.kx, m.ky), m.parity == Parity::Cos)
    }

    pub fn basis(&self) -> Result<SpectralBasis<T>> {
        let basis = self.modes.iter().map(|m| self.params.visc * T::of((m.kx * m.kx + m.ky * m.ky) as f64));
        SpectralBasis::new(basis.collect())
    }

    fn check(&self, v: &GalerkinVector<T>) -> Result<()> {
        if v.dim() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: v.dim() });
        }
        Ok(())
    }

    fn neg_slot(&self, slot: usize) -> usize {
        let (i, j) = (slot / self.n, slot % self.n);
        ((self.n - i) % self.n) * self.n + (self.n - j) % self.n
    }

    /// Complex amplitude `ĉ(k) = (a − i b)/√2` of each half-plane wavevector,
    /// paired with its mode (cos member).
    fn amplitudes<'a>(&'a self, v: &'a GalerkinVector<T>) -> impl Iterator<Item = (&'a Mode<T>, Complex<T>)> + 'a {
        let inv_sqrt2 = T::one() / T::of(2.0).sqrt();
        let c = v.coeffs();
        (0..self.modes.len()).step_by(2).map(move |i| {
            let amp = Complex::new(c[i] * inv_sqrt2, -c[i + 1] * inv_sqrt2);
            (&self.modes[i], amp)
        })
    }

    /// Writes two Hermitian spectra packed as `Â + iB̂` and transforms to the
    /// grid, returning `a + ib` pointwise.
    fn synthesize_pair<F>(&self, v: &GalerkinVector<T>, mut pair: F) -> Vec<Complex<T>>
    where
        F: FnMut(&Mode<T>, Complex<T>) -> (Complex<T>, Complex<T>),
    {
        let mut buf = vec![Complex::new(T::zero(), T::zero()); self.n * self.n];
        let i = Complex::new(T::zero(), T::one());
        for (mode, amp) in self.amplitudes(v) {
            let (a, b) = pair(mode, amp);
            buf[mode.slot] += a + i * b;
            buf[self.neg_slot(mode.slot)] += a.conj() + i * b.conj();
        }
        self.fft2(&mut buf, false);
        buf
    }

    fn fft2(&self, buf: &mut [Complex<T>], forward: bool) {
        let plan = if forward { &self.fwd } else { &self.inv };
        let n = self.n;
        let mut scratch = vec![Complex::new(T::zero(), T::zero()); plan.get_inplace_scratch_len()];
        plan.process_with_scratch(buf, &mut scratch);
        transpose(buf, n);
        plan.process_with_scratch(buf, &mut scratch);
        transpose(buf, n);
    }

    /// Velocity on the grid packed as `u_x + i u_y`.
    fn velocity(&self, v: &GalerkinVector<T>) -> Vec<Complex<T>> {
        self.synthesize_pair(v, |m, amp| (amp * m.dir[0], amp * m.dir[1]))
    }

    /// Projected convection term `P[(u·∇)v]` in basis coordinates.
    pub fn apply(&self, u: &GalerkinVector<T>, v: &GalerkinVector<T>) -> Result<GalerkinVector<T>> {
        self.check(u)?;
        self.check(v)?;
        let i = Complex::new(T::zero(), T::one());
        let vel = self.velocity(u);
        // ∂_x v_c + i ∂_y v_c for c = x, y
        let grad_x = self.synthesize_pair(v, |m, amp| {
            let vc = amp * m.dir[0];
            (i * T::of(m.kx as f64) * vc, i * T::of(m.ky as f64) * vc)
        });
        let grad_y = self.synthesize_pair(v, |m, amp| {
            let vc = amp * m.dir[1];
            (i * T::of(m.kx as f64) * vc, i * T::of(m.ky as f64) * vc)
        });
        let mut conv: Vec<Complex<T>> = vel
            .iter()
            .zip(grad_x.iter().zip(&grad_y))
            .map(|(u, (gx, gy))| {
                let nx = u.re * gx.re + u.im * gx.im;
                let ny = u.re * gy.re + u.im * gy.im;
                Complex::new(nx, ny)
            })
            .collect();
        self.fft2(&mut conv, true);
        let norm = T::one() / T::of_usize(self.n * self.n);
        let half = T::of(0.5);
        let sqrt2 = T::of(2.0).sqrt();
        let mut out = vec![T::zero(); self.dim()];
        for (idx, mode) in self.modes.iter().enumerate().step_by(2) {
            let z = conv[mode.slot] * norm;
            let zc = conv[self.neg_slot(mode.slot)].conj() * norm;
            let nx = (z + zc) * half;
            let ny = (z - zc) * Complex::new(T::zero(), -half);
            let proj = nx * mode.dir[0] + ny * mode.dir[1];
            out[idx] = sqrt2 * proj.re;
            out[idx + 1] = -sqrt2 * proj.im;
        }
        Ok(GalerkinVector::from_vec_unchecked(out))
    }

    pub fn trilinear(&self, u: &GalerkinVector<T>, v: &GalerkinVector<T>, w: &GalerkinVector<T>) -> Result<T> {
        self.check(w)?;
        self.apply(u, v)?.dot(w)
    }

    /// Discrete `L⁴` norm of the velocity on the collocation grid.
    pub fn q_norm(&self, v: &GalerkinVector<T>) -> Result<T> {
        self.check(v)?;
        let vel = self.velocity(v);
        let sum = vel.iter().fold(T::zero(), |acc, z| {
            let s = z.re * z.re + z.im * z.im;
            acc + s * s
        });
        Ok((sum / T::of_usize(self.n * self.n)).sqrt().sqrt())
    }

    /// Velocity at arbitrary points by direct trigonometric summation; used
    /// by tests as an FFT-free reference.
    pub fn velocity_at(&self, v: &GalerkinVector<T>, x: f64, y: f64) -> [f64; 2] {
        let c = v.coeffs();
        let sqrt2 = 2f64.sqrt();
        let mut out = [0.0; 2];
        for (idx, m) in self.modes.iter().enumerate() {
            let phase = m.kx as f64 * x + m.ky as f64 * y;
            let basis = match m.parity {
                Parity::Cos => phase.cos(),
                Parity::Sin => phase.sin(),
            };
            let a = c[idx].to_f64_lossy() * sqrt2 * basis;
            out[0] += a * m.dir[0].to_f64_lossy();
            out[1] += a * m.dir[1].to_f64_lossy();
        }
        out
    }

    /// Velocity gradient `[[∂_x v_x, ∂_y v_x], [∂_x v_y, ∂_y v_y]]` by direct
    /// summation.
    pub fn gradient_at(&self, v: &GalerkinVector<T>, x: f64, y: f64) -> [[f64; 2]; 2] {
        let c = v.coeffs();
        let sqrt2 = 2f64.sqrt();
        let mut out = [[0.0; 2]; 2];
        for (idx, m) in self.modes.iter().enumerate() {
            let phase = m.kx as f64 * x + m.ky as f64 * y;
            let dbasis = match m.parity {
                Parity::Cos => -phase.sin(),
                Parity::Sin => phase.cos(),
            };
            let a = c[idx].to_f64_lossy() * sqrt2 * dbasis;
            for comp in 0..2 {
                let d = m.dir[comp].to_f64_lossy();
                out[comp][0] += a * d * m.kx as f64;
                out[comp][1] += a * d * m.ky as f64;
            }
        }
        out
    }
}

fn transpose<T: Copy>(buf: &mut [T], n: usize) {
    for i in 0..n {
        for j in (i + 1)..n {
            buf.swap(i * n + j, j * n + i);
        }
    }
}

/// Free-function form of the NSE trilinear form.
pub fn nse_trilinear<T: Scalar>(
    u: &GalerkinVector<T>,
    v: &GalerkinVector<T>,
    w: &GalerkinVector<T>,
    params: &Nse2dParams<T>,
) -> Result<T> {
    Nse2d::new(*params)?.trilinear(u, v, w)
}
