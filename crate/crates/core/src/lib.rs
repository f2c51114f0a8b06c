//! Spectral Galerkin simulation of abstract 2D hydrodynamic-type SPDEs
//!
//! ```text
//! du + Au dt + B(u, u) dt = f dt + ∫_Z G(t, u(t−), z) η̃(dz, dt) + Ψ(t, u) dW
//! ```
//!
//! driven by a compensated Poisson random measure `η̃` and a Wiener process
//! `W`, with a constructive cutoff-Picard solver, a direct baseline scheme and
//! diagnostics for the energy identity and moment bounds.
//!
//! All numerical code is generic over [`Scalar`] (`f32` or `f64`); the
//! `*64` aliases below fix the common double precision instantiation.

// Parameter checks are written `!(x > 0)` so that NaN is rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod diagnostics;
pub mod error;
pub mod models;
pub mod noise;
pub mod scalar;
pub mod solver;
pub mod spaces;
pub mod stats;

pub use error::{Error, Result};
pub use scalar::Scalar;
pub use spaces::{GalerkinVector, PathSegment, SpectralBasis};

pub type GalerkinVector64 = spaces::GalerkinVector<f64>;
pub type GalerkinVector32 = spaces::GalerkinVector<f32>;
pub type SpectralBasis64 = spaces::SpectralBasis<f64>;
pub type PathSegment64 = spaces::PathSegment<f64>;
pub type ModelSpec64 = models::ModelSpec<f64>;
pub type ModelSpec32 = models::ModelSpec<f32>;
pub type LevyMeasure64 = noise::LevyMeasure<f64>;
pub type CoefficientSpec64 = noise::CoefficientSpec<f64>;
pub type NoiseRealization64 = noise::NoiseRealization<f64>;
pub type SolverConfig64 = solver::SolverConfig<f64>;
pub type SolveOutcome64 = solver::SolveOutcome<f64>;
