//! Run configuration: `[section]` headers followed by `key = value` lines,
//! read and written as TOML.
//!
//! Loading fills every default, pads vectors to the model dimension and
//! validates the coefficient constants against (H3), so the emitted form of
//! a loaded config is complete and parses back to an identical value.

use serde::{Deserialize, Serialize};

use levy_galerkin::models::{DyadicShellParams, ModelSpec, Nse2d, Nse2dParams};
use levy_galerkin::noise::{CoefficientFamily, CoefficientSpec, LevyFamily, LevyMeasure};
use levy_galerkin::solver::{InnerMode, SolverConfig, Stepper};
use levy_galerkin::{Error, GalerkinVector, SpectralBasis};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelName {
    Dyadic,
    Nse2d,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSection {
    pub name: ModelName,
    /// Shell count for `dyadic`, modes per axis for `nse2d`.
    pub modes: usize,
    pub visc: f64,
    #[serde(default = "defaults::k0")]
    pub k0: f64,
    #[serde(default = "defaults::yes")]
    pub dealias: bool,
    #[serde(default = "defaults::a0_samples")]
    pub a0_samples: usize,
    #[serde(default)]
    pub a0_seed: u64,
    /// Replaces the certified or estimated `a0`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a0: Option<f64>,
    /// Replaces the certified `C_b`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c_b: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum MeasureName {
    #[default]
    None,
    CompoundGaussian,
    TruncatedPower,
}

/// `compound_gaussian` reads `rate, mean, sd`; `truncated_power` reads
/// `c, alpha, eps_low, r_high`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MeasureSection {
    pub family: MeasureName,
    pub rate: f64,
    pub mean: f64,
    pub sd: f64,
    pub c: f64,
    pub alpha: f64,
    pub eps_low: f64,
    pub r_high: f64,
}

impl Default for MeasureSection {
    fn default() -> Self {
        Self { family: MeasureName::None, rate: 0.0, mean: 0.0, sd: 1.0, c: 0.0, alpha: 1.0, eps_low: 0.01, r_high: 1.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct WienerSection {
    pub dims: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum FamilyName {
    #[default]
    Zero,
    Additive,
    Diagonal,
    Gradient,
}

/// `additive` and `diagonal` read `*_sigma` (one entry broadcasts);
/// `gradient` reads `*_theta`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct CoefficientSection {
    pub g: FamilyName,
    pub g_sigma: Vec<f64>,
    pub g_theta: f64,
    pub psi: FamilyName,
    pub psi_sigma: Vec<f64>,
    pub psi_theta: f64,
    /// Zero-padded to the model dimension.
    pub forcing: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialSection {
    /// Zero-padded to the model dimension.
    pub u0: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum StepperName {
    #[default]
    Resolvent,
    Exponential,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum InnerModeName {
    #[default]
    Direct,
    HIteration,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSection {
    pub horizon: f64,
    pub dt: f64,
    #[serde(default)]
    pub tol_picard: f64,
    #[serde(default = "defaults::max_picard")]
    pub max_picard: usize,
    /// Defaults to `horizon`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t0: Option<f64>,
    #[serde(default = "defaults::one")]
    pub delta0: f64,
    #[serde(default = "defaults::m")]
    pub m: f64,
    #[serde(default = "defaults::m_growth")]
    pub m_growth: f64,
    #[serde(default = "defaults::max_escalations")]
    pub max_escalations: usize,
    #[serde(default = "defaults::xi_ceiling")]
    pub xi_ceiling: f64,
    #[serde(default)]
    pub stepper: StepperName,
    #[serde(default)]
    pub inner_mode: InnerModeName,
    #[serde(default = "defaults::max_inner")]
    pub max_inner: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EnsembleSection {
    pub paths: usize,
    pub seed: u64,
}

impl Default for EnsembleSection {
    fn default() -> Self {
        Self { paths: 1, seed: 0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dir: Option<String>,
    /// Append every mode coefficient to the trajectory rows.
    pub per_mode: bool,
}

/// Picard contraction sweep over `t0_values × delta0_values × dt_values`,
/// plus an optional strong-order study when `order_dts` is set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConvergeSection {
    /// Default to the solver's own `t0`, `delta0`, `dt`.
    pub t0_values: Vec<f64>,
    pub delta0_values: Vec<f64>,
    pub dt_values: Vec<f64>,
    pub ratio_from: usize,
    pub ratio_to: usize,
    pub ratio_max: f64,
    pub cauchy_max: f64,
    pub order_dts: Vec<f64>,
    pub order_ref_factor: usize,
    pub order_min: f64,
}

impl Default for ConvergeSection {
    fn default() -> Self {
        Self {
            t0_values: Vec::new(),
            delta0_values: Vec::new(),
            dt_values: Vec::new(),
            ratio_from: 2,
            ratio_to: 5,
            ratio_max: 0.8,
            cauchy_max: 1e-6,
            order_dts: Vec::new(),
            order_ref_factor: 8,
            order_min: 0.4,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Structure,
    Coefficients,
    Noise,
    Energy,
    Apriori,
}

impl Suite {
    pub const ALL: [Suite; 5] = [Suite::Structure, Suite::Coefficients, Suite::Noise, Suite::Energy, Suite::Apriori];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Structure => "structure",
            Suite::Coefficients => "coefficients",
            Suite::Noise => "noise",
            Suite::Energy => "energy",
            Suite::Apriori => "apriori",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VerifySection {
    pub suites: Vec<Suite>,
    pub structure_samples: usize,
    pub ascent_starts: usize,
    pub ascent_rounds: usize,
    /// Relative band for the `nse2d` `a0` estimate under sample doubling.
    pub a0_stability: f64,
    pub condition_samples: usize,
    pub noise_paths: usize,
    pub noise_horizon: f64,
    pub ledger_dts: Vec<f64>,
    pub ledger_paths: usize,
    /// Defaults to 0.9 without noise and 0.4 with.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ledger_order_min: Option<f64>,
    pub apriori_paths: usize,
}

impl Default for VerifySection {
    fn default() -> Self {
        Self {
            suites: Suite::ALL.to_vec(),
            structure_samples: 100_000,
            ascent_starts: 8,
            ascent_rounds: 50,
            a0_stability: 0.2,
            condition_samples: 2_000,
            noise_paths: 10_000,
            noise_horizon: 1.0,
            ledger_dts: vec![1e-2, 5e-3, 2.5e-3],
            ledger_paths: 20,
            ledger_order_min: None,
            apriori_paths: 200,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub model: ModelSection,
    #[serde(default)]
    pub measure: MeasureSection,
    #[serde(default)]
    pub wiener: WienerSection,
    #[serde(default)]
    pub coefficients: CoefficientSection,
    pub initial: InitialSection,
    pub solver: SolverSection,
    #[serde(default)]
    pub ensemble: EnsembleSection,
    #[serde(default)]
    pub output: OutputSection,
    #[serde(default)]
    pub converge: ConvergeSection,
    #[serde(default)]
    pub verify: VerifySection,
}

mod defaults {
    pub fn k0() -> f64 {
        2.0
    }
    pub fn yes() -> bool {
        true
    }
    pub fn a0_samples() -> usize {
        2_000
    }
    pub fn max_picard() -> usize {
        400
    }
    pub fn one() -> f64 {
        1.0
    }
    pub fn m() -> f64 {
        10.0
    }
    pub fn m_growth() -> f64 {
        2.0
    }
    pub fn max_escalations() -> usize {
        12
    }
    pub fn xi_ceiling() -> f64 {
        1e10
    }
    pub fn max_inner() -> usize {
        50
    }
}

fn invalid(e: Error) -> CliError {
    match e {
        Error::H3Violation { constant, value } => {
            CliError::Config(format!("condition (H3) violated: {constant} = {value}, need L_2,L_5∈[0,2)"))
        }
        other => CliError::Config(other.to_string()),
    }
}

/// `section.key=value`; the value is read as a TOML value, or as a bare
/// string when it is not one.
fn apply_override(table: &mut toml::Table, spec: &str) -> CliResult<()> {
    let (path, raw) =
        spec.split_once('=').ok_or_else(|| CliError::Usage(format!("override `{spec}` is not key=value")))?;
    let (section, key) = path
        .trim()
        .split_once('.')
        .ok_or_else(|| CliError::Usage(format!("override key `{path}` is not section.key")))?;
    let raw = raw.trim();
    let value = match format!("v = {raw}").parse::<toml::Table>() {
        Ok(mut t) => t.remove("v").expect("parsed key"),
        Err(_) => toml::Value::String(raw.to_string()),
    };
    let entry = table.entry(section.to_string()).or_insert_with(|| toml::Value::Table(toml::Table::new()));
    match entry {
        toml::Value::Table(t) => {
            t.insert(key.to_string(), value);
            Ok(())
        }
        _ => Err(CliError::Config(format!("`{section}` is not a section"))),
    }
}

impl RunConfig {
    pub fn parse(text: &str) -> CliResult<Self> {
        Self::load(text, &[])
    }

    /// Parses `text`, applies `overrides` in order, fills defaults and
    /// validates.
    pub fn load(text: &str, overrides: &[String]) -> CliResult<Self> {
        let raw: RunConfig = if overrides.is_empty() {
            toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?
        } else {
            let mut table: toml::Table = text.parse().map_err(|e: toml::de::Error| CliError::Config(e.to_string()))?;
            for o in overrides {
                apply_override(&mut table, o)?;
            }
            toml::Value::Table(table).try_into().map_err(|e: toml::de::Error| {
                // unknown keys in the file itself are reported with their location
                match toml::from_str::<RunConfig>(text) {
                    Err(located) if located.message().contains("unknown field") => CliError::Config(located.to_string()),
                    _ => CliError::Config(format!("after overrides: {e}")),
                }
            })?
        };
        raw.resolve()
    }

    pub fn emit(&self) -> String {
        toml::to_string(self).expect("config fields are all representable")
    }

    pub fn dim(&self) -> CliResult<usize> {
        Ok(match self.model.name {
            ModelName::Dyadic => self.model.modes,
            ModelName::Nse2d => self.nse_params()?.state_dim(),
        })
    }

    pub fn nse_params(&self) -> CliResult<Nse2dParams<f64>> {
        Nse2dParams::new(self.model.modes, self.model.visc, self.model.dealias).map_err(invalid)
    }

    fn dyadic_params(&self) -> CliResult<DyadicShellParams<f64>> {
        DyadicShellParams::new(self.model.modes, self.model.k0, self.model.visc).map_err(invalid)
    }

    pub fn basis(&self) -> CliResult<SpectralBasis<f64>> {
        match self.model.name {
            ModelName::Dyadic => self.dyadic_params()?.basis().map_err(invalid),
            ModelName::Nse2d => Nse2d::new(self.nse_params()?).and_then(|m| m.basis()).map_err(invalid),
        }
    }

    /// The model with certified (`dyadic`) or estimated (`nse2d`) constants,
    /// then any `a0`/`c_b` replacement.
    pub fn model(&self) -> CliResult<ModelSpec<f64>> {
        let m = &self.model;
        let spec = match m.name {
            ModelName::Dyadic => ModelSpec::dyadic(self.dyadic_params()?),
            ModelName::Nse2d => ModelSpec::nse2d(self.nse_params()?, m.a0_samples, m.a0_seed),
        }
        .map_err(invalid)?;
        if m.a0.is_none() && m.c_b.is_none() {
            return Ok(spec);
        }
        let (a0, c_b) = (m.a0.unwrap_or(spec.a0()), m.c_b.unwrap_or(spec.c_b()));
        spec.with_constants(a0, c_b).map_err(invalid)
    }

    pub fn measure(&self) -> CliResult<LevyMeasure<f64>> {
        let s = &self.measure;
        let family = match s.family {
            MeasureName::None => LevyFamily::None,
            MeasureName::CompoundGaussian => LevyFamily::CompoundGaussian { rate: s.rate, mean: s.mean, sd: s.sd },
            MeasureName::TruncatedPower => {
                LevyFamily::TruncatedPower { c: s.c, alpha: s.alpha, eps_low: s.eps_low, r_high: s.r_high }
            }
        };
        LevyMeasure::new(family).map_err(invalid)
    }

    fn family(name: FamilyName, sigma: &[f64], theta: f64, key: &str) -> CliResult<CoefficientFamily<f64>> {
        Ok(match name {
            FamilyName::Zero => CoefficientFamily::Zero,
            FamilyName::Additive | FamilyName::Diagonal if sigma.is_empty() => {
                return Err(CliError::Config(format!("coefficients.{key}_sigma is required for this family")));
            }
            FamilyName::Additive => CoefficientFamily::Additive { sigma: sigma.to_vec() },
            FamilyName::Diagonal => CoefficientFamily::Diagonal { sigma: sigma.to_vec() },
            FamilyName::Gradient => CoefficientFamily::Gradient { theta },
        })
    }

    pub fn coefficients(&self, basis: &SpectralBasis<f64>) -> CliResult<CoefficientSpec<f64>> {
        let c = &self.coefficients;
        let g = Self::family(c.g, &c.g_sigma, c.g_theta, "g")?;
        let psi = Self::family(c.psi, &c.psi_sigma, c.psi_theta, "psi")?;
        let forcing = GalerkinVector::new(c.forcing.clone()).map_err(invalid)?;
        CoefficientSpec::new(&g, &psi, forcing, &self.measure()?, basis, self.model.visc, self.wiener.dims)
            .map_err(invalid)
    }

    pub fn u0(&self) -> CliResult<GalerkinVector<f64>> {
        GalerkinVector::new(self.initial.u0.clone()).map_err(invalid)
    }

    pub fn solver(&self) -> SolverConfig<f64> {
        let s = &self.solver;
        SolverConfig {
            horizon: s.horizon,
            dt: s.dt,
            tol_picard: s.tol_picard,
            max_picard: s.max_picard,
            t0: s.t0.unwrap_or(s.horizon),
            delta0: s.delta0,
            m: s.m,
            m_growth: s.m_growth,
            max_escalations: s.max_escalations,
            xi_ceiling: s.xi_ceiling,
            stepper: match s.stepper {
                StepperName::Resolvent => Stepper::Resolvent,
                StepperName::Exponential => Stepper::Exponential,
            },
            inner_mode: match s.inner_mode {
                InnerModeName::Direct => InnerMode::Direct,
                InnerModeName::HIteration => InnerMode::HIteration { max_inner: s.max_inner },
            },
        }
    }

    pub fn has_jumps(&self) -> bool {
        self.coefficients.g != FamilyName::Zero && self.measure.family != MeasureName::None
    }

    pub fn has_wiener(&self) -> bool {
        self.coefficients.psi != FamilyName::Zero && self.wiener.dims > 0
    }

    fn resolve(mut self) -> CliResult<Self> {
        if self.ensemble.seed > i64::MAX as u64 {
            return Err(CliError::Config(format!("ensemble.seed must not exceed {}", i64::MAX)));
        }
        let dim = self.dim()?;
        let pad = |v: &mut Vec<f64>, key: &str| -> CliResult<()> {
            if v.len() > dim {
                return Err(CliError::Config(format!("{key} has {} entries but the model has {dim} modes", v.len())));
            }
            v.resize(dim, 0.0);
            Ok(())
        };
        pad(&mut self.initial.u0, "initial.u0")?;
        pad(&mut self.coefficients.forcing, "coefficients.forcing")?;

        let s = &mut self.solver;
        s.t0 = Some(s.t0.unwrap_or(s.horizon));
        let (t0, delta0, dt) = (s.t0.unwrap_or(s.horizon), s.delta0, s.dt);
        let c = &mut self.converge;
        for (values, own) in [(&mut c.t0_values, t0), (&mut c.delta0_values, delta0), (&mut c.dt_values, dt)] {
            if values.is_empty() {
                values.push(own);
            }
        }
        if c.ratio_from > c.ratio_to {
            return Err(CliError::Config("converge.ratio_from exceeds converge.ratio_to".into()));
        }
        let noisy = self.has_jumps() || self.has_wiener();
        let v = &mut self.verify;
        v.ledger_order_min.get_or_insert(if noisy { 0.4 } else { 0.9 });
        if v.suites.is_empty() {
            return Err(CliError::Config("verify.suites is empty".into()));
        }

        self.solver().validate().map_err(invalid)?;
        let basis = self.basis()?;
        self.u0()?;
        self.coefficients(&basis)?;
        Ok(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = "
[model]
name = \"dyadic\"
modes = 4
visc = 1.0

[initial]
u0 = [1.0]

[solver]
horizon = 1.0
dt = 0.1
";

    #[test]
    fn minimal_config_fills_defaults() {
        let c = RunConfig::parse(MINIMAL).unwrap();
        assert_eq!(c.initial.u0, vec![1.0, 0.0, 0.0, 0.0]);
        assert_eq!(c.solver.t0, Some(1.0));
        assert_eq!(c.solver.m, 10.0);
        assert_eq!(c.ensemble, EnsembleSection { paths: 1, seed: 0 });
        assert_eq!(c.converge.dt_values, vec![0.1]);
        assert_eq!(c.verify.ledger_order_min, Some(0.9));
        assert!(!c.has_jumps() && !c.has_wiener());
    }

    #[test]
    fn unknown_key_reports_its_line() {
        let text = MINIMAL.replace("visc = 1.0", "visc = 1.0\nvsic = 2.0");
        let err = RunConfig::parse(&text).unwrap_err().to_string();
        assert!(err.contains("vsic"), "{err}");
        assert!(err.contains("line 6"), "{err}");
    }

    #[test]
    fn missing_required_key_is_named() {
        let err = RunConfig::parse(&MINIMAL.replace("dt = 0.1", "")).unwrap_err().to_string();
        assert!(err.contains("dt"), "{err}");
    }

    #[test]
    fn overrides_replace_and_add_keys() {
        let o = ["solver.dt=0.05".to_string(), "model.name=nse2d".to_string(), "model.modes = 2".to_string()];
        let c = RunConfig::load(MINIMAL, &o).unwrap();
        assert_eq!(c.solver.dt, 0.05);
        assert_eq!(c.model.name, ModelName::Nse2d);
        assert_eq!(c.initial.u0.len(), c.dim().unwrap());
        assert!(RunConfig::load(MINIMAL, &["solver.bogus=1".into()]).is_err());
        assert!(matches!(RunConfig::load(MINIMAL, &["dt=1".into()]), Err(CliError::Usage(_))));
    }

    #[test]
    fn oversized_vectors_are_rejected() {
        let text = MINIMAL.replace("u0 = [1.0]", "u0 = [1.0, 0.0, 0.0, 0.0, 0.0]");
        assert!(RunConfig::parse(&text).is_err());
    }
}
