//! Finite Lévy measures on the scalar mark space `Z = ℝ∖{0}`.

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum LevyFamily<T> {
    /// `ν ≡ 0`: no jumps.
    None,
    /// `ν = rate · N(mean, sd²)`.
    CompoundGaussian { rate: T, mean: T, sd: T },
    /// Symmetric `ν(dz) = c |z|^{−1−α} dz` on `eps_low ≤ |z| ≤ r_high`.
    TruncatedPower { c: T, alpha: T, eps_low: T, r_high: T },
}

/// A Lévy measure with its moments `m1 = ∫z ν(dz)`, `m2 = ∫z² ν(dz)` and
/// total mass `ν(Z)`, all in closed form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LevyMeasure<T> {
    pub family: LevyFamily<T>,
    pub m1: T,
    pub m2: T,
    pub total_mass: T,
}

/// Five-point Gauss–Legendre rule on `[-1, 1]`.
const GL5_NODES: [f64; 5] = [0.0, -0.538_469_310_105_683_1, 0.538_469_310_105_683_1, -0.906_179_845_938_664, 0.906_179_845_938_664];
const GL5_WEIGHTS: [f64; 5] = [
    0.568_888_888_888_888_9,
    0.478_628_670_499_366_5,
    0.478_628_670_499_366_5,
    0.236_926_885_056_189_1,
    0.236_926_885_056_189_1,
];
const POWER_PANELS: usize = 64;

impl<T: Scalar> LevyMeasure<T> {
    pub fn none() -> Self {
        Self { family: LevyFamily::None, m1: T::zero(), m2: T::zero(), total_mass: T::zero() }
    }

    pub fn compound_gaussian(rate: T, mean: T, sd: T) -> Result<Self> {
        Self::new(LevyFamily::CompoundGaussian { rate, mean, sd })
    }

    pub fn truncated_power(c: T, alpha: T, eps_low: T, r_high: T) -> Result<Self> {
        Self::new(LevyFamily::TruncatedPower { c, alpha, eps_low, r_high })
    }

    pub fn new(family: LevyFamily<T>) -> Result<Self> {
        let finite = |x: T, name: &str| -> Result<()> {
            if x.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidMeasure(format!("{name} must be finite")))
            }
        };
        match family {
            LevyFamily::None => Ok(Self::none()),
            LevyFamily::CompoundGaussian { rate, mean, sd } => {
                finite(rate, "rate")?;
                finite(mean, "mean")?;
                finite(sd, "sd")?;
                if rate < T::zero() || sd < T::zero() {
                    return Err(Error::InvalidMeasure("rate and sd must be nonnegative".into()));
                }
                if rate > T::zero() && sd == T::zero() && mean == T::zero() {
                    return Err(Error::InvalidMeasure("compound Gaussian marks would sit at z = 0".into()));
                }
                Ok(Self { family, m1: rate * mean, m2: rate * (mean * mean + sd * sd), total_mass: rate })
            }
            LevyFamily::TruncatedPower { c, alpha, eps_low, r_high } => {
                finite(c, "c")?;
                finite(alpha, "alpha")?;
                finite(eps_low, "eps_low")?;
                finite(r_high, "r_high")?;
                if c < T::zero() {
                    return Err(Error::InvalidMeasure("c must be nonnegative".into()));
                }
                if !(alpha > T::zero() && alpha < T::of(2.0)) {
                    return Err(Error::InvalidMeasure(format!("alpha must lie in (0, 2), got {alpha}")));
                }
                if !(eps_low > T::zero() && eps_low < r_high) {
                    return Err(Error::InvalidMeasure("need 0 < eps_low < r_high".into()));
                }
                let two = T::of(2.0);
                let total = two * c * (eps_low.powf(-alpha) - r_high.powf(-alpha)) / alpha;
                let m2 = two * c * (r_high.powf(two - alpha) - eps_low.powf(two - alpha)) / (two - alpha);
                Ok(Self { family, m1: T::zero(), m2, total_mass: total })
            }
        }
    }

    pub fn is_symmetric(&self) -> bool {
        self.m1 == T::zero()
    }

    /// Nodes and weights `(z_q, w_q)` with `Σ w_q h(z_q) ≈ ∫ h(z) ν(dz)`.
    ///
    /// The Gaussian family uses the three-point Gauss–Hermite rule (exact for
    /// polynomials of degree ≤ 5); the power family uses composite
    /// Gauss–Legendre in `log |z|` on each half line.
    pub fn quadrature(&self) -> Vec<(T, T)> {
        match self.family {
            LevyFamily::None => Vec::new(),
            LevyFamily::CompoundGaussian { rate, mean, sd } => {
                let spread = T::of(3.0).sqrt() * sd;
                vec![
                    (mean, rate * T::of(2.0 / 3.0)),
                    (mean - spread, rate / T::of(6.0)),
                    (mean + spread, rate / T::of(6.0)),
                ]
            }
            LevyFamily::TruncatedPower { c, alpha, eps_low, r_high } => {
                let (a, b) = (eps_low.to_f64_lossy().ln(), r_high.to_f64_lossy().ln());
                let (c, alpha) = (c.to_f64_lossy(), alpha.to_f64_lossy());
                let width = (b - a) / POWER_PANELS as f64;
                let mut out = Vec::with_capacity(2 * 5 * POWER_PANELS);
                for p in 0..POWER_PANELS {
                    let mid = a + (p as f64 + 0.5) * width;
                    for (x, w) in GL5_NODES.iter().zip(GL5_WEIGHTS) {
                        let s = mid + 0.5 * width * x;
                        // ν(dz) = c z^{-1-α} dz = c e^{-α s} ds with z = e^s
                        let weight = c * (-alpha * s).exp() * 0.5 * width * w;
                        let z = s.exp();
                        out.push((T::of(z), T::of(weight)));
                        out.push((T::of(-z), T::of(weight)));
                    }
                }
                out
            }
        }
    }

    /// One mark from the normalized measure `ν / ν(Z)`.
    pub fn sample_mark<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self.family {
            LevyFamily::None => 0.0,
            LevyFamily::CompoundGaussian { mean, sd, .. } => {
                let normal = Normal::new(mean.to_f64_lossy(), sd.to_f64_lossy()).expect("validated sd");
                loop {
                    let z = normal.sample(rng);
                    if z != 0.0 {
                        return z;
                    }
                }
            }
            LevyFamily::TruncatedPower { alpha, eps_low, r_high, .. } => {
                let (alpha, lo, hi) = (alpha.to_f64_lossy(), eps_low.to_f64_lossy(), r_high.to_f64_lossy());
                let (a, b) = (lo.powf(-alpha), hi.powf(-alpha));
                let u: f64 = rng.random();
                let r = (a - u * (a - b)).powf(-1.0 / alpha).clamp(lo, hi);
                if rng.random_bool(0.5) {
                    r
                } else {
                    -r
                }
            }
        }
    }
}
