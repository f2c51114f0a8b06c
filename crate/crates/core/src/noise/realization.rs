//! Frozen samples of the Wiener increments and the Poisson random measure on
//! a uniform time grid.

use std::fmt::Write as _;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp, StandardNormal};
use serde::Serialize;

use super::measure::LevyMeasure;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Uniform grid `t_k = k·dt`, `k = 0..=steps`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TimeGrid<T> {
    pub dt: T,
    pub steps: usize,
}

impl<T: Scalar> TimeGrid<T> {
    /// `horizon` must be an integer multiple of `dt` (to 1e-9 relative).
    pub fn new(horizon: T, dt: T) -> Result<Self> {
        if !(dt > T::zero()) || !(horizon > T::zero()) || !dt.is_finite() || !horizon.is_finite() {
            return Err(Error::InvalidParameter(format!("need horizon > 0 and dt > 0 (got {horizon}, {dt})")));
        }
        let ratio = (horizon / dt).to_f64_lossy();
        let steps = ratio.round();
        if (ratio - steps).abs() > 1e-9 * ratio.max(1.0) || steps < 1.0 {
            return Err(Error::InvalidParameter(format!("horizon {horizon} is not a multiple of dt {dt}")));
        }
        Ok(Self { dt, steps: steps as usize })
    }

    pub fn horizon(&self) -> T {
        T::of_usize(self.steps) * self.dt
    }

    pub fn time(&self, k: usize) -> T {
        T::of_usize(k) * self.dt
    }
}

/// Number of Wiener directions retained from the cylindrical process.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct WienerDriverSpec {
    pub dims: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Jump<T> {
    pub time: T,
    pub mark: T,
    /// Step `k` with `time ∈ (t_k, t_{k+1}]`.
    pub step: usize,
}

/// Wiener increments and jump list for one sample path.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NoiseRealization<T> {
    grid: TimeGrid<T>,
    wiener_dims: usize,
    wiener: Vec<T>,
    jumps: Vec<Jump<T>>,
    /// `jumps[jump_offsets[k]..jump_offsets[k + 1]]` fall in step `k`.
    jump_offsets: Vec<usize>,
    seed: u64,
}

const JUMP_STREAM: u64 = 0;
const WIENER_STREAM: u64 = 1;

/// Seed of path `index` in an ensemble with base seed `base` (SplitMix64).
pub fn derive_seed(base: u64, index: u64) -> u64 {
    let mut z = base ^ index.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(0x2545_F491_4F6C_DD1D);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Jump times follow a Poisson process of rate `ν(Z)` on `(0, T]` with
/// i.i.d. marks from `ν/ν(Z)`; Wiener increments are `N(0, dt)` per
/// direction. Jumps and increments use independent streams of the same
/// seed, so the jump list does not depend on `dt`.
pub fn sample_realization<T: Scalar>(
    grid: TimeGrid<T>,
    measure: &LevyMeasure<T>,
    wiener: WienerDriverSpec,
    seed: u64,
) -> Result<NoiseRealization<T>> {
    let mass = measure.total_mass.to_f64_lossy();
    if !mass.is_finite() || mass < 0.0 {
        return Err(Error::InvalidMeasure(format!("total mass must be finite, got {mass}")));
    }
    let dt = grid.dt.to_f64_lossy();
    let horizon = grid.steps as f64 * dt;

    let mut jumps = Vec::new();
    if mass > 0.0 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(JUMP_STREAM);
        let wait = Exp::new(mass).map_err(|e| Error::InvalidMeasure(e.to_string()))?;
        let mut t = 0.0;
        loop {
            t += wait.sample(&mut rng);
            if t > horizon {
                break;
            }
            let mark = measure.sample_mark(&mut rng);
            let step = ((t / dt).ceil() as usize).saturating_sub(1).min(grid.steps - 1);
            jumps.push(Jump { time: T::of(t), mark: T::of(mark), step });
        }
    }

    let mut increments = Vec::with_capacity(grid.steps * wiener.dims);
    if wiener.dims > 0 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(WIENER_STREAM);
        let scale = dt.sqrt();
        for _ in 0..grid.steps * wiener.dims {
            let g: f64 = StandardNormal.sample(&mut rng);
            increments.push(T::of(g * scale));
        }
    }
    Ok(NoiseRealization::from_parts(grid, wiener.dims, increments, jumps, seed))
}

impl<T: Scalar> NoiseRealization<T> {
    fn from_parts(grid: TimeGrid<T>, wiener_dims: usize, wiener: Vec<T>, jumps: Vec<Jump<T>>, seed: u64) -> Self {
        let mut jump_offsets = vec![0usize; grid.steps + 1];
        for j in &jumps {
            jump_offsets[j.step + 1] += 1;
        }
        for k in 0..grid.steps {
            jump_offsets[k + 1] += jump_offsets[k];
        }
        Self { grid, wiener_dims, wiener, jumps, jump_offsets, seed }
    }

    /// A realization without any noise.
    pub fn silent(grid: TimeGrid<T>, wiener_dims: usize) -> Self {
        Self::from_parts(grid, wiener_dims, vec![T::zero(); grid.steps * wiener_dims], Vec::new(), 0)
    }

    pub fn grid(&self) -> TimeGrid<T> {
        self.grid
    }

    pub fn dt(&self) -> T {
        self.grid.dt
    }

    pub fn steps(&self) -> usize {
        self.grid.steps
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn wiener_dims(&self) -> usize {
        self.wiener_dims
    }

    /// Increment `W(t_{k+1}) − W(t_k)`.
    pub fn wiener_increment(&self, k: usize) -> &[T] {
        &self.wiener[k * self.wiener_dims..(k + 1) * self.wiener_dims]
    }

    pub fn jumps(&self) -> &[Jump<T>] {
        &self.jumps
    }

    /// Jumps in `(t_k, t_{k+1}]`, time ordered.
    pub fn jumps_in_step(&self, k: usize) -> &[Jump<T>] {
        &self.jumps[self.jump_offsets[k]..self.jump_offsets[k + 1]]
    }

    /// The same path seen on a grid `factor` times coarser: increments are
    /// summed and jumps re-binned.
    pub fn coarsen(&self, factor: usize) -> Result<Self> {
        if factor == 0 || !self.grid.steps.is_multiple_of(factor) {
            return Err(Error::GridMismatch(format!("{} steps cannot be coarsened by {factor}", self.grid.steps)));
        }
        let grid = TimeGrid { dt: self.grid.dt * T::of_usize(factor), steps: self.grid.steps / factor };
        let d = self.wiener_dims;
        let mut wiener = vec![T::zero(); grid.steps * d];
        for k in 0..self.grid.steps {
            let c = k / factor;
            for (j, inc) in self.wiener_increment(k).iter().enumerate() {
                wiener[c * d + j] += *inc;
            }
        }
        let jumps = self.jumps.iter().map(|j| Jump { step: j.step / factor, ..*j }).collect();
        Ok(Self::from_parts(grid, d, wiener, jumps, self.seed))
    }

    /// Textual export for replay: a header block followed by one line per
    /// Wiener increment vector and one per jump. Numbers use 17 significant
    /// digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# noise-realization v1");
        let _ = writeln!(out, "seed,{}", self.seed);
        let _ = writeln!(out, "dt,{:.16e}", self.grid.dt.to_f64_lossy());
        let _ = writeln!(out, "steps,{}", self.grid.steps);
        let _ = writeln!(out, "wiener_dims,{}", self.wiener_dims);
        for k in 0..self.grid.steps {
            if self.wiener_dims == 0 {
                break;
            }
            let _ = write!(out, "w,{k}");
            for x in self.wiener_increment(k) {
                let _ = write!(out, ",{:.16e}", x.to_f64_lossy());
            }
            out.push('\n');
        }
        for j in &self.jumps {
            let _ = writeln!(out, "j,{:.16e},{:.16e},{}", j.time.to_f64_lossy(), j.mark.to_f64_lossy(), j.step);
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let bad = |line: usize, msg: &str| Error::Parse(format!("noise CSV line {}: {msg}", line + 1));
        let mut seed = None;
        let mut dt = None;
        let mut steps = None;
        let mut dims = None;
        let mut wiener = Vec::new();
        let mut jumps = Vec::new();
        for (ln, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split(',').collect();
            let num = |s: &str| s.trim().parse::<f64>().map_err(|_| bad(ln, "bad number"));
            let int = |s: &str| s.trim().parse::<usize>().map_err(|_| bad(ln, "bad integer"));
            match fields[0] {
                "seed" if fields.len() == 2 => seed = Some(fields[1].trim().parse::<u64>().map_err(|_| bad(ln, "bad seed"))?),
                "dt" if fields.len() == 2 => dt = Some(num(fields[1])?),
                "steps" if fields.len() == 2 => steps = Some(int(fields[1])?),
                "wiener_dims" if fields.len() == 2 => dims = Some(int(fields[1])?),
                "w" => {
                    let d = dims.ok_or_else(|| bad(ln, "increment before header"))?;
                    if fields.len() != d + 2 || int(fields[1])? != wiener.len() / d.max(1) {
                        return Err(bad(ln, "malformed increment row"));
                    }
                    for f in &fields[2..] {
                        wiener.push(T::of(num(f)?));
                    }
                }
                "j" if fields.len() == 4 => {
                    jumps.push(Jump { time: T::of(num(fields[1])?), mark: T::of(num(fields[2])?), step: int(fields[3])? })
                }
                _ => return Err(bad(ln, "unrecognized record")),
            }
        }
        let (Some(seed), Some(dt), Some(steps), Some(dims)) = (seed, dt, steps, dims) else {
            return Err(Error::Parse("noise CSV is missing header fields".into()));
        };
        if wiener.len() != steps * dims {
            return Err(Error::Parse(format!("expected {} increments, found {}", steps * dims, wiener.len())));
        }
        if jumps.iter().any(|j| j.step >= steps) || jumps.windows(2).any(|w| w[0].time > w[1].time) {
            return Err(Error::Parse("jump list out of range or unsorted".into()));
        }
        Ok(Self::from_parts(TimeGrid { dt: T::of(dt), steps }, dims, wiener, jumps, seed))
    }
}
