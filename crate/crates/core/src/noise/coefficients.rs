//! Noise coefficient families `G(t, v, z)` and `Ψ(t, v)` with their
//! Lipschitz/growth constants `L1..L5`.
//!
//! Every family acts diagonally through a mode-wise action `a(v)`:
//!
//! | family     | `a(v)_j`          |
//! |------------|-------------------|
//! | additive   | `σ_j`             |
//! | diagonal   | `σ_j v_j`         |
//! | gradient   | `θ k_j v_j`       |
//!
//! and the coefficients are `G(t, v, z) = z·a_G(v)` and
//! `Ψ(t, v) dW = Σ_{j<d} a_Ψ(v)_j dW_j` where `d` is the number of Wiener
//! directions. The gradient family is the spectral form of `θ z ∇v`; its
//! contribution to the growth bound is `θ² m2 ‖v‖² / ν`, which is why it is
//! only admissible for `θ² m2 / ν < 2`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::measure::LevyMeasure;
use crate::error::{Error, Result};
use crate::models::certify::random_probe;
use crate::scalar::Scalar;
use crate::spaces::{GalerkinVector, SpectralBasis};

/// Unresolved family description, as read from configuration.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum CoefficientFamily<T> {
    Zero,
    /// Per-mode amplitudes; a single entry is broadcast to all modes.
    Additive { sigma: Vec<T> },
    Diagonal { sigma: Vec<T> },
    Gradient { theta: T },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
enum ActionKind {
    Constant,
    Multiplicative,
}

/// A family resolved against a basis: `a(v)_j = w_j` (constant) or
/// `w_j v_j` (multiplicative).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResolvedFamily<T> {
    pub family: CoefficientFamily<T>,
    kind: ActionKind,
    weights: Vec<T>,
}

impl<T: Scalar> ResolvedFamily<T> {
    pub fn resolve(family: &CoefficientFamily<T>, basis: &SpectralBasis<T>, visc: T) -> Result<Self> {
        let n = basis.dim();
        let broadcast = |sigma: &[T]| -> Result<Vec<T>> {
            let w = match sigma.len() {
                1 => vec![sigma[0]; n],
                len if len == n => sigma.to_vec(),
                len => {
                    return Err(Error::InvalidParameter(format!(
                        "coefficient amplitudes have length {len}, expected 1 or {n}"
                    )))
                }
            };
            if w.iter().any(|x| !x.is_finite()) {
                return Err(Error::InvalidParameter("coefficient amplitudes must be finite".into()));
            }
            Ok(w)
        };
        let (kind, weights) = match family {
            CoefficientFamily::Zero => (ActionKind::Constant, vec![T::zero(); n]),
            CoefficientFamily::Additive { sigma } => (ActionKind::Constant, broadcast(sigma)?),
            CoefficientFamily::Diagonal { sigma } => (ActionKind::Multiplicative, broadcast(sigma)?),
            CoefficientFamily::Gradient { theta } => {
                if !theta.is_finite() || !(visc > T::zero()) {
                    return Err(Error::InvalidParameter("gradient family needs finite theta and positive viscosity".into()));
                }
                let w = basis.eigenvalues().iter().map(|&lam| *theta * (lam / visc).sqrt()).collect();
                (ActionKind::Multiplicative, w)
            }
        };
        Ok(Self { family: family.clone(), kind, weights })
    }

    pub fn is_state_dependent(&self) -> bool {
        self.kind == ActionKind::Multiplicative && self.weights.iter().any(|w| *w != T::zero())
    }

    pub fn is_zero(&self) -> bool {
        self.weights.iter().all(|w| *w == T::zero())
    }

    /// `a(v)`.
    pub fn action(&self, v: &GalerkinVector<T>) -> Result<GalerkinVector<T>> {
        if v.dim() != self.weights.len() {
            return Err(Error::DimensionMismatch { expected: self.weights.len(), got: v.dim() });
        }
        let coeffs = match self.kind {
            ActionKind::Constant => self.weights.clone(),
            ActionKind::Multiplicative => self.weights.iter().zip(v.coeffs()).map(|(&w, &x)| w * x).collect(),
        };
        Ok(GalerkinVector::from_vec_unchecked(coeffs))
    }

    /// Unit constants `(L1, L2, L3, L4, L5)` of `|a(v)|²` restricted to the
    /// first `dims` modes, before scaling by `m2`.
    fn unit_constants(&self, dims: usize, visc: T) -> [T; 5] {
        let w = &self.weights[..dims.min(self.weights.len())];
        let zero = T::zero();
        match &self.family {
            CoefficientFamily::Zero => [zero; 5],
            CoefficientFamily::Additive { .. } => {
                let s = w.iter().fold(zero, |acc, &x| acc + x * x);
                [zero, zero, s, zero, zero]
            }
            CoefficientFamily::Diagonal { .. } => {
                let mx = w.iter().fold(zero, |acc, &x| acc.max(x * x));
                [mx, zero, zero, mx, zero]
            }
            CoefficientFamily::Gradient { theta } => {
                let c = if w.is_empty() { zero } else { *theta * *theta / visc };
                [zero, c, zero, zero, c]
            }
        }
    }
}

/// `(L1, …, L5)` of (H1)–(H2).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NoiseConstants<T> {
    pub l1: T,
    pub l2: T,
    pub l3: T,
    pub l4: T,
    pub l5: T,
}

impl<T: Scalar> NoiseConstants<T> {
    pub fn as_array(&self) -> [T; 5] {
        [self.l1, self.l2, self.l3, self.l4, self.l5]
    }

    /// (H3): `L2, L5 ∈ [0, 2)`.
    pub fn check_h3(&self) -> Result<()> {
        let two = T::of(2.0);
        if !(self.l2 < two) {
            return Err(Error::H3Violation { constant: "L2", value: self.l2.to_f64_lossy() });
        }
        if !(self.l5 < two) {
            return Err(Error::H3Violation { constant: "L5", value: self.l5.to_f64_lossy() });
        }
        Ok(())
    }
}

/// Closed-form constants for a `(G, Ψ)` pair: `G` contributions scale with
/// `m2`, `Ψ` contributions are summed over the retained Wiener directions.
/// Fails when (H3) does not hold.
pub fn certify_constants<T: Scalar>(
    g: &ResolvedFamily<T>,
    psi: &ResolvedFamily<T>,
    measure: &LevyMeasure<T>,
    basis: &SpectralBasis<T>,
    visc: T,
    wiener_dims: usize,
) -> Result<NoiseConstants<T>> {
    let ug = g.unit_constants(basis.dim(), visc);
    let up = psi.unit_constants(wiener_dims, visc);
    let l: Vec<T> = ug.iter().zip(&up).map(|(&a, &b)| measure.m2 * a + b).collect();
    let constants = NoiseConstants { l1: l[0], l2: l[1], l3: l[2], l4: l[3], l5: l[4] };
    constants.check_h3()?;
    Ok(constants)
}

/// Noise coefficients `G`, `Ψ`, the forcing `f`, and the measure moments
/// they are paired with.
#[derive(Debug, Clone, Serialize)]
pub struct CoefficientSpec<T: Scalar> {
    g: ResolvedFamily<T>,
    psi: ResolvedFamily<T>,
    wiener_dims: usize,
    m1: T,
    m2: T,
    constants: NoiseConstants<T>,
    forcing: GalerkinVector<T>,
}

impl<T: Scalar> CoefficientSpec<T> {
    pub fn new(
        g: &CoefficientFamily<T>,
        psi: &CoefficientFamily<T>,
        forcing: GalerkinVector<T>,
        measure: &LevyMeasure<T>,
        basis: &SpectralBasis<T>,
        visc: T,
        wiener_dims: usize,
    ) -> Result<Self> {
        if wiener_dims > basis.dim() {
            return Err(Error::InvalidParameter(format!(
                "{wiener_dims} Wiener directions exceed the {} basis modes",
                basis.dim()
            )));
        }
        if forcing.dim() != basis.dim() {
            return Err(Error::DimensionMismatch { expected: basis.dim(), got: forcing.dim() });
        }
        forcing.ensure_finite("forcing")?;
        let g = ResolvedFamily::resolve(g, basis, visc)?;
        let psi = ResolvedFamily::resolve(psi, basis, visc)?;
        let constants = certify_constants(&g, &psi, measure, basis, visc, wiener_dims)?;
        Ok(Self { g, psi, wiener_dims, m1: measure.m1, m2: measure.m2, constants, forcing })
    }

    /// No noise at all and the given forcing.
    pub fn deterministic(forcing: GalerkinVector<T>, basis: &SpectralBasis<T>) -> Result<Self> {
        Self::new(
            &CoefficientFamily::Zero,
            &CoefficientFamily::Zero,
            forcing,
            &LevyMeasure::none(),
            basis,
            T::one(),
            0,
        )
    }

    pub fn constants(&self) -> &NoiseConstants<T> {
        &self.constants
    }

    pub fn forcing(&self) -> &GalerkinVector<T> {
        &self.forcing
    }

    pub fn forcing_at(&self, _t: T) -> &GalerkinVector<T> {
        &self.forcing
    }

    pub fn wiener_dims(&self) -> usize {
        self.wiener_dims
    }

    pub fn m1(&self) -> T {
        self.m1
    }

    pub fn m2(&self) -> T {
        self.m2
    }

    pub fn g_family(&self) -> &ResolvedFamily<T> {
        &self.g
    }

    pub fn psi_family(&self) -> &ResolvedFamily<T> {
        &self.psi
    }

    /// True when neither coefficient depends on the state.
    pub fn is_additive(&self) -> bool {
        !self.g.is_state_dependent() && !self.psi.is_state_dependent()
    }

    /// `G(t, v, 1)`; `G(t, v, z) = z·G(t, v, 1)`.
    pub fn g_unit(&self, _t: T, v: &GalerkinVector<T>) -> Result<GalerkinVector<T>> {
        self.g.action(v)
    }

    pub fn eval_g(&self, t: T, v: &GalerkinVector<T>, z: T) -> Result<GalerkinVector<T>> {
        Ok(self.g_unit(t, v)?.scaled(z))
    }

    /// `Ψ(t, v) dW`.
    pub fn eval_psi_apply(&self, _t: T, v: &GalerkinVector<T>, dw: &[T]) -> Result<GalerkinVector<T>> {
        if dw.len() != self.wiener_dims {
            return Err(Error::DimensionMismatch { expected: self.wiener_dims, got: dw.len() });
        }
        let a = self.psi.action(v)?;
        let mut out = vec![T::zero(); v.dim()];
        for (j, &inc) in dw.iter().enumerate() {
            out[j] = a.coeffs()[j] * inc;
        }
        Ok(GalerkinVector::from_vec_unchecked(out))
    }

    /// `‖Ψ(t, v)‖²_{L2}`.
    pub fn psi_hs_norm_sq(&self, _t: T, v: &GalerkinVector<T>) -> Result<T> {
        let a = self.psi.action(v)?;
        Ok(a.coeffs()[..self.wiener_dims].iter().fold(T::zero(), |acc, &x| acc + x * x))
    }

    /// `∫ G(t, v, z) ν(dz) = m1·G(t, v, 1)`.
    pub fn compensator_drift(&self, t: T, v: &GalerkinVector<T>) -> Result<GalerkinVector<T>> {
        Ok(self.g_unit(t, v)?.scaled(self.m1))
    }

    /// `∫ |G(t, v, z)|² ν(dz) = m2·|G(t, v, 1)|²`.
    pub fn jump_second_moment(&self, t: T, v: &GalerkinVector<T>) -> Result<T> {
        Ok(self.m2 * self.g_unit(t, v)?.h_norm_sq())
    }
}

/// Free-function forms.
pub fn eval_g<T: Scalar>(coeff: &CoefficientSpec<T>, t: T, v: &GalerkinVector<T>, z: T) -> Result<GalerkinVector<T>> {
    coeff.eval_g(t, v, z)
}

pub fn eval_psi_apply<T: Scalar>(coeff: &CoefficientSpec<T>, t: T, v: &GalerkinVector<T>, dw: &[T]) -> Result<GalerkinVector<T>> {
    coeff.eval_psi_apply(t, v, dw)
}

pub fn compensator_drift<T: Scalar>(coeff: &CoefficientSpec<T>, t: T, v: &GalerkinVector<T>) -> Result<GalerkinVector<T>> {
    coeff.compensator_drift(t, v)
}

/// Relative slack on `LHS ≤ RHS` for quadrature and roundoff.
pub const CONDITION_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Default, Serialize)]
pub struct ConditionReport {
    pub samples: usize,
    pub h1_max_ratio: f64,
    pub h2_max_ratio: f64,
    pub h1_violations: usize,
    pub h2_violations: usize,
    pub constants: [f64; 5],
}

impl ConditionReport {
    pub fn pass(&self) -> bool {
        self.h1_violations == 0 && self.h2_violations == 0
    }
}

/// Samples `(v1, v2)` and compares the left-hand sides of (H1)/(H2), with the
/// `ν` integral done by quadrature, against the declared constants. Single
/// basis vectors are always included as directional probes.
pub fn empirical_condition_check<T: Scalar>(
    coeff: &CoefficientSpec<T>,
    measure: &LevyMeasure<T>,
    basis: &SpectralBasis<T>,
    samples: usize,
    seed: u64,
) -> Result<ConditionReport> {
    let quad: Vec<(f64, f64)> = measure.quadrature().iter().map(|(z, w)| (z.to_f64_lossy(), w.to_f64_lossy())).collect();
    let c = coeff.constants().as_array().map(|x| x.to_f64_lossy());
    let t = T::zero();
    let dims = coeff.wiener_dims();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rep = ConditionReport { samples, constants: c, ..Default::default() };
    let n = basis.dim();

    let lhs = |a: &GalerkinVector<T>, p: &GalerkinVector<T>| -> f64 {
        let psi: f64 = p.coeffs()[..dims].iter().map(|x| x.to_f64_lossy().powi(2)).sum();
        let g_sq = a.h_norm_sq().to_f64_lossy();
        let jump: f64 = quad.iter().map(|(z, w)| w * z * z * g_sq).sum();
        psi + jump
    };
    let ratio = |l: f64, r: f64| -> f64 {
        if r > 0.0 {
            l / r
        } else if l <= 1e-300 {
            0.0
        } else {
            f64::INFINITY
        }
    };

    for s in 0..samples.max(n) {
        let (v1, v2) = if s < n {
            (GalerkinVector::unit(n, s), GalerkinVector::zeros(n))
        } else {
            (random_probe(&mut rng, basis), random_probe(&mut rng, basis))
        };
        let d = v1.sub(&v2)?;
        let ga = coeff.g_unit(t, &v1)?.sub(&coeff.g_unit(t, &v2)?)?;
        let pa = coeff.psi_family().action(&v1)?.sub(&coeff.psi_family().action(&v2)?)?;
        let l1 = lhs(&ga, &pa);
        let r1 = c[0] * d.h_norm_sq().to_f64_lossy() + c[1] * basis.v_norm_sq(&d)?.to_f64_lossy();
        let q1 = ratio(l1, r1);
        rep.h1_max_ratio = rep.h1_max_ratio.max(q1);
        if q1 > 1.0 + CONDITION_SLACK {
            rep.h1_violations += 1;
        }

        let l2 = lhs(&coeff.g_unit(t, &v1)?, &coeff.psi_family().action(&v1)?);
        let r2 = c[2] + c[3] * v1.h_norm_sq().to_f64_lossy() + c[4] * basis.v_norm_sq(&v1)?.to_f64_lossy();
        let q2 = ratio(l2, r2);
        rep.h2_max_ratio = rep.h2_max_ratio.max(q2);
        if q2 > 1.0 + CONDITION_SLACK {
            rep.h2_violations += 1;
        }
    }
    Ok(rep)
}
