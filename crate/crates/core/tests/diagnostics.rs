mod common;

use common::*;
use levy_galerkin::diagnostics::*;
use levy_galerkin::models::ModelSpec;
use levy_galerkin::noise::{CoefficientFamily, CoefficientSpec, LevyMeasure, NoiseRealization};
use levy_galerkin::solver::*;
use levy_galerkin::{GalerkinVector, PathSegment};

fn zero_path(model: &ModelSpec<f64>, steps: usize, dt: f64) -> PathSegment<f64> {
    let z = GalerkinVector::zeros(model.dim());
    let mut p = PathSegment::new(0, dt, z.clone(), model.basis()).unwrap();
    for _ in 0..steps {
        p.push(z.clone(), model.basis()).unwrap();
    }
    p
}

/// `y_0 ≡ 0, y_1, …, y_count` of the Picard map on the whole grid.
fn iterates(
    model: &ModelSpec<f64>,
    coeff: &CoefficientSpec<f64>,
    noise: &NoiseRealization<f64>,
    cfg: &SolverConfig<f64>,
    cutoff: &Cutoff<f64>,
    u0: &GalerkinVector<f64>,
    count: usize,
) -> Vec<PathSegment<f64>> {
    let mut out = vec![zero_path(model, noise.steps(), cfg.dt)];
    for _ in 0..count {
        let next = solve_linearized(out.last().unwrap(), noise, cfg, model, coeff, cutoff, u0).unwrap();
        out.push(next);
    }
    out
}

#[test]
fn deterministic_ledger_residual_is_second_order_per_step() {
    let model = dyadic(5, 0.1);
    let coeff = quiet(&model, GalerkinVector::zeros(5));
    let u0 = profile(5, 1.0);
    let total = |dt: f64| {
        let cfg = SolverConfig::new(1.0, dt);
        let noise = NoiseRealization::silent(cfg.grid().unwrap(), 0);
        let path = baseline_direct(&noise, &cfg, &model, &coeff, &u0, None).unwrap();
        let ledger = energy_ledger(&path, &noise, &model, &coeff).unwrap();
        assert!(ledger.steps.iter().all(|s| s.forcing == 0.0 && s.jump_quad == 0.0 && s.wiener_mart == 0.0));
        ledger.abs_residual_sum()
    };
    let (a, b) = (total(0.01), total(0.005));
    assert!(a / b > 1.6 && a / b < 2.4, "{a} {b}");
}

#[test]
fn jump_quadratic_term_recomputes_from_the_jump_list() {
    let model = dyadic(4, 0.2);
    let measure = LevyMeasure::compound_gaussian(20.0, 0.0, 1.0).unwrap();
    let sigma = vec![0.3, 0.1, -0.2, 0.05];
    let c = coeff(&model, CoefficientFamily::Additive { sigma: sigma.clone() }, CoefficientFamily::Zero, &measure, 0, GalerkinVector::zeros(4));
    let cfg = SolverConfig::new(1.0, 0.01);
    let noise = noise(&cfg, &measure, 0, 4);
    assert!(noise.jumps().len() > 5);
    let path = baseline_direct(&noise, &cfg, &model, &c, &profile(4, 0.5), None).unwrap();
    let ledger = energy_ledger(&path, &noise, &model, &c).unwrap();
    let got: f64 = ledger.steps.iter().map(|s| s.jump_quad).sum();
    let s2: f64 = sigma.iter().map(|x| x * x).sum();
    let expect: f64 = noise.jumps().iter().map(|j| j.mark * j.mark * s2).sum();
    assert!((got - expect).abs() <= 1e-12 * expect, "{got} vs {expect}");
}

#[test]
fn ledger_residual_halves_with_dt_on_drift_only_runs() {
    let model = dyadic(5, 0.05);
    let coeff = quiet(&model, profile(5, 0.4));
    let u0 = profile(5, 1.2);
    let total = |dt: f64| {
        let cfg = SolverConfig::new(1.0, dt);
        let noise = NoiseRealization::silent(cfg.grid().unwrap(), 0);
        let path = baseline_direct(&noise, &cfg, &model, &coeff, &u0, None).unwrap();
        energy_ledger(&path, &noise, &model, &coeff).unwrap().abs_residual_sum()
    };
    let sums = [total(0.01), total(0.005), total(0.0025)];
    for w in sums.windows(2) {
        let r = w[0] / w[1];
        assert!((1.6..=2.4).contains(&r), "{sums:?}");
    }
}

#[test]
fn apriori_bound_for_quiet_decay() {
    let model = dyadic(4, 0.1);
    let coeff = quiet(&model, GalerkinVector::zeros(4));
    let cfg = SolverConfig::new(1.0, 0.01);
    let noise = NoiseRealization::silent(cfg.grid().unwrap(), 0);
    let u0 = profile(4, 1.0);
    let path = global_solve(&noise, &cfg, &model, &coeff, &u0).unwrap().trajectory;
    let paths = vec![path; 30];
    let rep = apriori_check(&paths, &coeff, model.basis()).unwrap();
    assert!(rep.pass());
    assert_eq!(rep.bound_h, u0.h_norm_sq());
    assert_eq!(rep.sup_time, 0.0);
    assert!(apriori_check(&paths[..10], &coeff, model.basis()).is_err());
}

#[test]
fn additive_noise_from_rest_stays_below_l3_t() {
    let model = dyadic(4, 0.1);
    let measure = LevyMeasure::compound_gaussian(5.0, 0.0, 0.4).unwrap();
    let c = coeff(&model, CoefficientFamily::Additive { sigma: vec![0.2] }, CoefficientFamily::Additive { sigma: vec![0.3] }, &measure, 4, GalerkinVector::zeros(4));
    let l3 = c.constants().l3;
    let cfg = SolverConfig { t0: 0.25, delta0: 1.0, ..SolverConfig::new(1.0, 0.01) };
    let paths: Vec<PathSegment<f64>> = levy_galerkin::stats::run_indexed(100, |i| {
        let n = noise(&cfg, &measure, 4, levy_galerkin::noise::derive_seed(9, i as u64));
        global_solve(&n, &cfg, &model, &c, &GalerkinVector::zeros(4)).unwrap().trajectory
    });
    let rep = apriori_check(&paths, &c, model.basis()).unwrap();
    assert!(rep.pass(), "{rep:?}");
    for k in (0..=100).step_by(10) {
        let vals: Vec<f64> = paths.iter().map(|p| p.state(k).h_norm_sq()).collect();
        let s = levy_galerkin::stats::MeanSe::of(&vals);
        assert!(s.mean <= l3 * k as f64 * 0.01 + 3.0 * s.se.max(0.0) + 1e-15, "t = {}", k as f64 * 0.01);
    }
}

#[test]
fn xi_indicator_switches_off_after_crossing() {
    let model = dyadic(3, 1.0);
    let basis = model.basis();
    let dt = 0.1;
    let big = GalerkinVector::unit(3, 0).scaled(1.0);
    let lam0 = basis.eigenvalues()[0];
    let mut p = PathSegment::new(0, dt, big.clone(), basis).unwrap();
    for _ in 0..20 {
        p.push(big.clone(), basis).unwrap();
    }
    // ξ² grows by dt·λ_0 per step; pick δ so 3δ is crossed at step 8
    let delta = (7.5 * dt * lam0).sqrt() / 3.0;
    let zero = zero_path(&model, 20, dt);
    let series = xi_series(&zero, &p, delta).unwrap();
    for (k, v) in series.iter().enumerate() {
        if k <= 7 {
            assert_eq!(*v, lam0);
        } else {
            assert_eq!(*v, 0.0, "k = {k}");
        }
    }
    let rep = xi_cap_check(&zero, &p, &Cutoff::new(1.0, delta).unwrap()).unwrap();
    assert!(rep.pass);
    assert!((rep.integral - 8.0 * dt * lam0).abs() < 1e-12);

    let wide = xi_cap_check(&zero, &p, &Cutoff::new(1.0, 100.0).unwrap()).unwrap();
    assert!((wide.integral - p.xi_sq_running()[20]).abs() < 1e-12);
}

#[test]
fn xi_cap_holds_over_a_random_ensemble() {
    let model = dyadic(5, 0.1);
    let measure = LevyMeasure::compound_gaussian(4.0, 0.0, 1.0).unwrap();
    let c = coeff(&model, CoefficientFamily::Diagonal { sigma: vec![0.4] }, CoefficientFamily::Additive { sigma: vec![0.3] }, &measure, 3, profile(5, 1.0));
    let cfg = SolverConfig::new(0.5, 0.01);
    let cutoff = Cutoff::new(3.0, 0.2).unwrap();
    for seed in 0..20 {
        let n = noise(&cfg, &measure, 3, seed);
        let its = iterates(&model, &c, &n, &cfg, &cutoff, &profile(5, 2.0), 5);
        for w in its.windows(2) {
            let rep = xi_cap_check(&w[0], &w[1], &cutoff).unwrap();
            assert!(rep.pass, "{rep:?}");
        }
    }
}

#[test]
fn in_vanishes_when_iterates_coincide() {
    let model = dyadic(5, 0.1);
    let measure = LevyMeasure::compound_gaussian(4.0, 0.0, 1.0).unwrap();
    let c = coeff(&model, CoefficientFamily::Diagonal { sigma: vec![0.3] }, CoefficientFamily::Zero, &measure, 0, profile(5, 1.0));
    let cfg = SolverConfig::new(0.3, 0.01);
    let n = noise(&cfg, &measure, 0, 1);
    let cutoff = Cutoff::new(3.0, 0.5).unwrap();
    let its = iterates(&model, &c, &n, &cfg, &cutoff, &profile(5, 1.0), 3);
    assert!(in_series(&its[1], &its[2], &its[2], &model, &cutoff).unwrap().iter().all(|&x| x == 0.0));
    assert!(in_series(&its[2], &its[2], &its[2], &model, &cutoff).unwrap().iter().all(|&x| x == 0.0));
    assert!(in_series(&its[1], &its[2], &its[3], &model, &cutoff).unwrap().iter().any(|&x| x != 0.0));
}

#[test]
fn calibrated_in_envelope_has_no_violations() {
    let model = dyadic(5, 0.1);
    let measure = LevyMeasure::compound_gaussian(4.0, 0.0, 1.0).unwrap();
    let c = coeff(&model, CoefficientFamily::Diagonal { sigma: vec![0.3] }, CoefficientFamily::Additive { sigma: vec![0.2] }, &measure, 2, profile(5, 1.0));
    let cfg = SolverConfig::new(0.3, 0.01);
    let cutoff = Cutoff::new(3.0, 0.5).unwrap();
    let env = |c_env: f64| InEnvelope { eps: 0.1, p: 1.0, c: c_env };
    let triples = |seed: u64| {
        let n = noise(&cfg, &measure, 2, seed);
        iterates(&model, &c, &n, &cfg, &cutoff, &profile(5, 1.5), 6)
    };
    let mut needed: f64 = 0.0;
    for seed in 0..10 {
        let its = triples(seed);
        for w in its.windows(3) {
            needed = needed.max(in_diagnostic(&w[0], &w[1], &w[2], &model, &cutoff, env(0.0)).unwrap().required_c);
        }
    }
    assert!(needed.is_finite());
    let calibrated = 2.0 * needed.max(1e-12);
    for seed in 100..110 {
        let its = triples(seed);
        for w in its.windows(3) {
            let rep = in_diagnostic(&w[0], &w[1], &w[2], &model, &cutoff, env(calibrated)).unwrap();
            assert_eq!(rep.violation_fraction, 0.0, "seed {seed}: required {}", rep.required_c);
        }
    }
}

#[test]
fn linear_scenario_is_exact_after_one_iteration() {
    // u0 and f along e_N, no noise: B vanishes on every iterate
    let model = dyadic(4, 0.2);
    let coeff = quiet(&model, GalerkinVector::unit(4, 3).scaled(1.0));
    let cfg = SolverConfig::new(0.2, 0.01);
    let n = NoiseRealization::silent(cfg.grid().unwrap(), 0);
    let reports: Vec<_> = (0..30)
        .map(|_| {
            picard_local(&n, &cfg, &model, &coeff, &Cutoff::inactive(), &GalerkinVector::unit(4, 3), Window { start: 0, steps: 20 })
                .unwrap()
                .1
        })
        .collect();
    let rep = contraction_report(&reports);
    assert!(rep.a[0] > 0.0);
    assert_eq!(rep.a[1], 0.0);
    assert_eq!(rep.a.get(2).copied().unwrap_or(0.0), 0.0);
}

fn contraction_at(t0: f64, paths: u64) -> ContractionReport {
    let model = dyadic(5, 0.1);
    let measure = LevyMeasure::compound_gaussian(4.0, 0.0, 1.0).unwrap();
    let c = coeff(&model, CoefficientFamily::Additive { sigma: vec![0.3] }, CoefficientFamily::Additive { sigma: vec![0.3] }, &measure, 3, profile(5, 1.0));
    let cfg = SolverConfig::new(1.0, 0.005);
    let cutoff = Cutoff::new(5.0, 1.0).unwrap();
    let steps = (t0 / cfg.dt).round() as usize;
    let reports: Vec<_> = (0..paths)
        .map(|seed| {
            let n = noise(&cfg, &measure, 3, seed);
            picard_local(&n, &cfg, &model, &c, &cutoff, &profile(5, 2.0), Window { start: 0, steps }).unwrap().1
        })
        .collect();
    contraction_report(&reports)
}

#[test]
fn additive_noise_on_a_short_window_contracts_fast() {
    let rep = contraction_at(0.02, 30);
    assert!(rep.a[2] > 0.0);
    assert!(rep.max_ratio(2, 4) < 0.5, "{:?} {:?}", rep.ratio_a, rep.ratio_b);
}

#[test]
fn contraction_degrades_with_window_length() {
    let mean_ratio = |r: &ContractionReport| (r.ratio_a[1] + r.ratio_a[2] + r.ratio_b[1] + r.ratio_b[2]) / 4.0;
    let short = contraction_at(0.02, 30);
    let long = contraction_at(0.5, 30);
    assert!(mean_ratio(&short) < mean_ratio(&long), "{} vs {}", mean_ratio(&short), mean_ratio(&long));
}
