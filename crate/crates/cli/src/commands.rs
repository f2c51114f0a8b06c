//! `simulate`, `verify` and `converge`. Each returns whether every checked
//! invariant held; errors are reserved for runs that could not be carried
//! out.

use serde_json::{json, Map, Value};

use levy_galerkin::diagnostics::{apriori_check, contraction_report, ledger_order_study, strong_order_study};
use levy_galerkin::models::certify::{check_structure, nse_estimate_a0};
use levy_galerkin::noise::{compensated_statistics, empirical_condition_check, CoefficientSpec, LevyMeasure};
use levy_galerkin::solver::{path_noise, picard_local, run_ensemble, Cutoff, SolverConfig, Window};
use levy_galerkin::stats::run_indexed;
use levy_galerkin::{GalerkinVector, PathSegment};

use crate::config::{ModelName, RunConfig, Suite};
use crate::error::{CliError, CliResult};
use crate::output::{trajectory_csv, OutDir};

fn verdict(pass: bool) -> &'static str {
    if pass {
        "PASS"
    } else {
        "FAIL"
    }
}

pub fn simulate(cfg: &RunConfig, out: &OutDir) -> CliResult<bool> {
    let model = cfg.model()?;
    let basis = model.basis();
    let coeff = cfg.coefficients(basis)?;
    let measure = cfg.measure()?;
    let solver = cfg.solver();
    let u0 = cfg.u0()?;
    let outcomes = run_ensemble(&model, &coeff, &measure, &solver, &u0, cfg.ensemble.paths, cfg.ensemble.seed);

    let mut pass = true;
    let mut paths = Vec::with_capacity(outcomes.len());
    for (i, outcome) in outcomes.into_iter().enumerate() {
        match outcome {
            Ok(o) => {
                out.write(&format!("trajectory_{i}.csv"), &trajectory_csv(&o.trajectory, basis, cfg.output.per_mode)?)?;
                let end = o.trajectory.time(o.trajectory.len() - 1);
                if o.blowup_flag {
                    pass = false;
                    eprintln!(
                        "path {i}: blow-up: |u| reached m = {} at t = {end} after {} escalations",
                        o.m_final, o.escalations
                    );
                }
                let iterations: usize = o.windows.iter().map(|w| w.report.iterations_used).sum();
                paths.push(json!({
                    "index": i,
                    "status": if o.blowup_flag { "blowup" } else { "ok" },
                    "seed": o.seed,
                    "end_time": end,
                    "final_h_norm": o.trajectory.last_state().h_norm(),
                    "sup_h_norm": o.trajectory.sup_h_norm(),
                    "m_final": o.m_final,
                    "escalations": o.escalations,
                    "windows": o.windows.len(),
                    "picard_iterations": iterations,
                    "stop_times": o.stop_times,
                }));
            }
            Err(e) => {
                pass = false;
                eprintln!("path {i}: {e}");
                paths.push(json!({ "index": i, "status": "error", "error": e.to_string() }));
            }
        }
    }
    out.summary("simulate", cfg, pass, json!({ "paths": paths }))?;
    println!("simulate: {} paths, {}", cfg.ensemble.paths, verdict(pass));
    Ok(pass)
}

struct Context {
    model: levy_galerkin::models::ModelSpec<f64>,
    coeff: CoefficientSpec<f64>,
    measure: LevyMeasure<f64>,
    solver: SolverConfig<f64>,
    u0: GalerkinVector<f64>,
}

impl Context {
    fn build(cfg: &RunConfig) -> CliResult<Self> {
        let model = cfg.model()?;
        let coeff = cfg.coefficients(model.basis())?;
        Ok(Self { coeff, measure: cfg.measure()?, solver: cfg.solver(), u0: cfg.u0()?, model })
    }
}

fn structure_suite(cfg: &RunConfig, ctx: &Context) -> CliResult<(bool, Value)> {
    let v = &cfg.verify;
    let rep = check_structure(&ctx.model, v.structure_samples, v.ascent_starts, v.ascent_rounds, cfg.ensemble.seed)?;
    let mut pass = rep.pass();
    let mut doubling = Value::Null;
    if cfg.model.name == ModelName::Nse2d {
        let params = cfg.nse_params()?;
        let n = cfg.model.a0_samples;
        let base = nse_estimate_a0(&params, n, cfg.model.a0_seed)?;
        let doubled = nse_estimate_a0(&params, 2 * n, cfg.model.a0_seed.wrapping_add(1))?;
        let rel = (doubled / base - 1.0).abs();
        let stable = rel <= v.a0_stability;
        pass &= stable;
        doubling = json!({ "samples": n, "a0": base, "a0_doubled": doubled, "relative_change": rel, "pass": stable });
    }
    Ok((pass, json!({ "structure": rep, "b1_pass": rep.b1_pass(), "b2_pass": rep.b2_pass(), "b3_pass": rep.b3_pass(), "a0_doubling": doubling })))
}

fn coefficients_suite(cfg: &RunConfig, ctx: &Context) -> CliResult<(bool, Value)> {
    let rep = empirical_condition_check(
        &ctx.coeff,
        &ctx.measure,
        ctx.model.basis(),
        cfg.verify.condition_samples,
        cfg.ensemble.seed,
    )?;
    Ok((rep.pass(), json!({ "conditions": rep, "measure": ctx.measure })))
}

fn noise_suite(cfg: &RunConfig, ctx: &Context) -> CliResult<(bool, Value)> {
    // a frozen state with every mode excited when u0 is zero
    let v = if ctx.u0.is_zero() { GalerkinVector::new(vec![1.0; ctx.model.dim()])? } else { ctx.u0.clone() };
    let rep = compensated_statistics(
        &ctx.coeff,
        &ctx.measure,
        &v,
        cfg.verify.noise_horizon,
        cfg.verify.noise_paths,
        cfg.ensemble.seed,
    )?;
    Ok((rep.pass(), json!({ "compensated": rep, "frozen_state": v.coeffs() })))
}

fn energy_suite(cfg: &RunConfig, ctx: &Context) -> CliResult<(bool, Value)> {
    let v = &cfg.verify;
    let study = ledger_order_study(
        &ctx.model,
        &ctx.coeff,
        &ctx.measure,
        &ctx.solver,
        &ctx.u0,
        &v.ledger_dts,
        v.ledger_paths,
        cfg.ensemble.seed,
    )?;
    let min = v.ledger_order_min.expect("resolved at load");
    let exact = study.values.iter().all(|m| m.mean == 0.0);
    let pass = exact || study.order >= min;
    Ok((pass, json!({ "study": study, "order_min": min, "exact": exact })))
}

fn apriori_suite(cfg: &RunConfig, ctx: &Context) -> CliResult<(bool, Value)> {
    let runs = run_ensemble(
        &ctx.model,
        &ctx.coeff,
        &ctx.measure,
        &ctx.solver,
        &ctx.u0,
        cfg.verify.apriori_paths,
        cfg.ensemble.seed,
    );
    let mut paths: Vec<PathSegment<f64>> = Vec::with_capacity(runs.len());
    for (i, run) in runs.into_iter().enumerate() {
        let o = run?;
        if o.blowup_flag {
            return Ok((false, json!({ "blowup_path": i, "m_final": o.m_final })));
        }
        paths.push(o.trajectory);
    }
    let rep = apriori_check(&paths, &ctx.coeff, ctx.model.basis())?;
    Ok((rep.pass(), json!({ "apriori": rep })))
}

pub fn verify(cfg: &RunConfig, out: &OutDir) -> CliResult<bool> {
    let ctx = Context::build(cfg)?;
    let mut all = true;
    let mut results = Map::new();
    for &suite in &cfg.verify.suites {
        let (pass, report) = match suite {
            Suite::Structure => structure_suite(cfg, &ctx)?,
            Suite::Coefficients => coefficients_suite(cfg, &ctx)?,
            Suite::Noise => noise_suite(cfg, &ctx)?,
            Suite::Energy => energy_suite(cfg, &ctx)?,
            Suite::Apriori => apriori_suite(cfg, &ctx)?,
        };
        out.report(suite.name(), pass, &report)?;
        println!("{}: {}", suite.name(), verdict(pass));
        results.insert(suite.name().to_string(), json!({ "pass": pass }));
        all &= pass;
    }
    out.summary("verify", cfg, all, Value::Object(results))?;
    Ok(all)
}

/// One point of the contraction sweep: `paths` Picard runs on `[0, t0]`.
fn contraction_point(cfg: &RunConfig, ctx: &Context, solver: &SolverConfig<f64>) -> CliResult<(bool, Value)> {
    solver.validate()?;
    let c = &cfg.converge;
    let cutoff = Cutoff::new(solver.m, solver.delta0)?;
    let window = Window { start: 0, steps: solver.window_steps() };
    let reports = run_indexed(cfg.ensemble.paths, |i| {
        let noise = path_noise(solver, &ctx.measure, &ctx.coeff, cfg.ensemble.seed, i)?;
        picard_local(&noise, solver, &ctx.model, &ctx.coeff, &cutoff, &ctx.u0, window).map(|r| r.1)
    })
    .into_iter()
    .collect::<Result<Vec<_>, _>>()?;
    let rep = contraction_report(&reports);
    let max_ratio = rep.max_ratio(c.ratio_from, c.ratio_to);
    let cauchy = rep.cauchy_ratio(0);
    let converged = reports.iter().filter(|r| r.converged).count();
    let pass = max_ratio <= c.ratio_max && cauchy < c.cauchy_max;
    Ok((
        pass,
        json!({
            "t0": solver.t0,
            "delta0": solver.delta0,
            "dt": solver.dt,
            "window_steps": window.steps,
            "converged_paths": converged,
            "max_iterations": reports.iter().map(|r| r.iterations_used).max().unwrap_or(0),
            "max_ratio": max_ratio,
            "cauchy_ratio": cauchy,
            "pass": pass,
            "contraction": rep,
        }),
    ))
}

pub fn converge(cfg: &RunConfig, out: &OutDir) -> CliResult<bool> {
    let ctx = Context::build(cfg)?;
    let c = &cfg.converge;
    let mut all = true;
    let mut sweep = Vec::new();
    for &t0 in &c.t0_values {
        for &delta0 in &c.delta0_values {
            for &dt in &c.dt_values {
                let solver = SolverConfig { t0, delta0, dt, ..ctx.solver };
                let (pass, point) = contraction_point(cfg, &ctx, &solver).map_err(|e| match e {
                    CliError::Run(levy_galerkin::Error::InvalidParameter(msg)) => {
                        CliError::Config(format!("converge sweep at t0 = {t0}, delta0 = {delta0}, dt = {dt}: {msg}"))
                    }
                    other => other,
                })?;
                println!("contraction t0={t0} delta0={delta0} dt={dt}: {}", verdict(pass));
                all &= pass;
                sweep.push(point);
            }
        }
    }
    let mut order = Value::Null;
    if !c.order_dts.is_empty() {
        let study = strong_order_study(
            &ctx.model,
            &ctx.coeff,
            &ctx.measure,
            &ctx.solver,
            &ctx.u0,
            &c.order_dts,
            c.order_ref_factor,
            cfg.ensemble.paths,
            cfg.ensemble.seed,
        )?;
        let pass = study.order >= c.order_min;
        println!("strong order {:.3}: {}", study.order, verdict(pass));
        all &= pass;
        order = json!({ "study": study, "order_min": c.order_min, "pass": pass });
    }
    let report = json!({ "sweep": sweep, "strong_order": order });
    out.report("converge", all, &report)?;
    out.summary("converge", cfg, all, json!({ "sweep_points": sweep.len(), "strong_order": order }))?;
    Ok(all)
}
