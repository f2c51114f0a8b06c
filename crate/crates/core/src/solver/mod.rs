//! Cutoff-Picard solver with stopping-time concatenation and patching in
//! `m`, plus the direct baseline scheme.

pub mod config;
pub mod cutoff;
pub mod ensemble;
pub mod global;
pub mod picard;
pub mod step;

pub use config::{InnerMode, SolverConfig, Stepper, MAX_WINDOW_HALVINGS};
pub use cutoff::{g_delta, phi_m, smoothstep, Cutoff, SMOOTHSTEP_MAX_SLOPE};
pub use ensemble::{path_noise, run_ensemble};
pub use global::{concatenate_m_solution, global_solve, SolveOutcome, WindowRecord};
pub use picard::{picard_local, IncrementRecord, IterationReport, Window};
pub use step::{baseline_direct, inner_h_iteration, linear_step, solve_linearized, StepInput};
