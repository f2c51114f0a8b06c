//! Lévy measures, noise sampling and the coefficient families `G`, `Ψ`.

pub mod coefficients;
pub mod compensated;
pub mod measure;
pub mod realization;

pub use coefficients::{
    certify_constants, compensator_drift, empirical_condition_check, eval_g, eval_psi_apply, CoefficientFamily,
    CoefficientSpec, ConditionReport, NoiseConstants, ResolvedFamily,
};
pub use compensated::{compensated_statistics, CompensatedReport};
pub use measure::{LevyFamily, LevyMeasure};
pub use realization::{derive_seed, sample_realization, Jump, NoiseRealization, TimeGrid, WienerDriverSpec};
