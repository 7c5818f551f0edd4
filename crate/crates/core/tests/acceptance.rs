//! Acceptance suite: one test per quantitative criterion, each printing a
//! pass line on success (run with `--nocapture` to see them). Tolerances
//! and runtime budgets are pinned here.

use std::time::Instant;

use num_complex::Complex;
use rand::Rng;
use rand_chacha::ChaCha12Rng;

use sggl_core::diagnostics::{ratio_spread, uniformity_scan};
use sggl_core::experiments::{mean_contraction, uniqueness_experiment};
use sggl_core::integrator::{ito_energy_residual, path_rng, simulate_path};
use sggl_core::lab::{
    lambda_beta, okazawa_yokota_ratio, power_pairing, run_suite, PairSampler,
    SuiteOptions,
};
use sggl_core::noise::{ito_isometry_test, JumpModel, NoiseFamily, StepIntegrand};
use sggl_core::ops::derivative_identity_check;
use sggl_core::params::{DriftMode, GLParams, MonotonicityConfig, SimConfig};
use sggl_core::spectral::{SineBasis, SpectralField};
use sggl_core::CoreError;

const PI: f64 = std::f64::consts::PI;

fn pass(n: u32, desc: &str, elapsed: f64) {
    println!("[PASS] criterion {n:2}: {desc} ({elapsed:.2} s)");
}

fn base_params() -> GLParams<f64> {
    GLParams {
        alpha: 0.5,
        beta: 0.4,
        gamma: 0.5,
        sigma: 3.0,
        ..GLParams::default()
    }
}

fn linear_model(c: f64) -> JumpModel<f64> {
    JumpModel::new(
        vec![1.0, 1.0],
        vec![0.5, 0.25],
        NoiseFamily::LinearMultiplicative { c },
        4.0,
    )
    .unwrap()
}

fn slope_fit(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut num = 0.0;
    let mut den = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        num += (x - mx) * (y - my);
        den += (x - mx) * (x - mx);
    }
    num / den
}

#[test]
fn acceptance_01_spectral_exactness() {
    let start = Instant::now();
    let (n, m) = (64usize, 256usize);
    let basis = SineBasis::new(n, n, m, m, PI, PI).unwrap();
    let mut rng = path_rng(1001, 0);
    let u = SpectralField::sample_gaussian(n, n, PI, PI, 0.8, 1.3, &mut rng);

    // round trip to 1e-12
    let grid = basis.synthesize(&u, true).unwrap();
    let back = basis.analyze(&grid).unwrap();
    let rt = back.diff_norm_sq(&u).sqrt() / u.l2_norm_sq().sqrt();
    assert!(rt < 1e-12, "round-trip relative error {rt}");

    // Parseval to 1e-6
    let (l2, h1) = u.norms();
    let quad_l2 = grid.lp_norm_pow(2.0);
    let parseval = (quad_l2 - l2).abs() / l2;
    assert!(parseval < 1e-6, "Parseval mismatch {parseval}");

    // gradient consistency to 1e-6
    let quad_h1 = grid.h1_quadrature().unwrap();
    let grad = (quad_h1 - h1).abs() / h1;
    assert!(grad < 1e-6, "gradient quadrature mismatch {grad}");

    let elapsed = start.elapsed().as_secs_f64();
    assert!(elapsed < 10.0, "runtime budget exceeded: {elapsed} s");
    pass(1, "spectral round-trip 1e-12, Parseval/gradient 1e-6 at n=64^2, M=256^2", elapsed);
}

#[test]
fn acceptance_02_linear_closed_form() {
    let start = Instant::now();
    let params = base_params();
    let n = 3usize;
    let config = SimConfig {
        n1: n,
        n2: n,
        dt: 1e-3,
        t_end: 1.0,
        blowup_radius: 1e9,
        seed: 2,
        n_paths: 1,
        snap_every: 1,
        drift: DriftMode::LinearOnly,
    };
    let basis = SineBasis::padded(n, n, PI, PI, params.sigma);
    let model = JumpModel::none();
    let mut rng = path_rng(config.seed, 0);
    let mut u0 = SpectralField::zeros(n, n, PI, PI);
    let mut seed_rng = path_rng(3, 1);
    for j in 0..n {
        for k in 0..n {
            u0.coeffs[[j, k]] = Complex::new(
                seed_rng.random::<f64>() - 0.5,
                seed_rng.random::<f64>() - 0.5,
            );
        }
    }
    let traj = simulate_path(&config, &params, &model, &basis, &u0, &mut rng).unwrap();
    let factor = Complex::new(1.0, params.alpha);
    let mut worst: f64 = 0.0;
    for (idx, state) in &traj.states {
        let t = traj.records[*idx].t;
        for j in 1..=n {
            for k in 1..=n {
                let mu = ((j * j + k * k) as f64) * (PI / PI).powi(2);
                let expect = u0.coeffs[[j - 1, k - 1]] * (-(factor * mu * t)).exp();
                let got = state.coeffs[[j - 1, k - 1]];
                let rel = (got - expect).norm() / expect.norm();
                worst = worst.max(rel);
            }
        }
    }
    assert!(worst < 1e-12, "per-mode relative error {worst}");
    let elapsed = start.elapsed().as_secs_f64();
    assert!(elapsed < 1.0, "runtime budget exceeded: {elapsed} s");
    pass(2, "pure-linear per-mode trajectories exact to 1e-12 over T=1", elapsed);
}

#[test]
fn acceptance_03_integrator_order() {
    let start = Instant::now();
    let params = base_params();
    let n = 8usize;
    let basis = SineBasis::padded(n, n, PI, PI, params.sigma);
    let model = JumpModel::none();
    let mut rng0 = path_rng(33, 0);
    let u0 = SpectralField::sample_gaussian(n, n, PI, PI, 1.5, 0.5, &mut rng0);
    let t_end = 0.5;
    let run = |dt: f64| {
        let config = SimConfig {
            n1: n,
            n2: n,
            dt,
            t_end,
            blowup_radius: 1e9,
            seed: 3,
            n_paths: 1,
            snap_every: 0,
            drift: DriftMode::Full,
        };
        let mut rng = path_rng(config.seed, 0);
        simulate_path(&config, &params, &model, &basis, &u0, &mut rng)
            .unwrap()
            .final_state()
            .clone()
    };
    let reference = run(1e-5);
    let dts = [1e-2, 3e-3, 1e-3, 3e-4];
    let mut logs = Vec::new();
    let mut errs = Vec::new();
    for &dt in &dts {
        let err = run(dt).diff_norm_sq(&reference).sqrt();
        logs.push(dt.ln());
        errs.push(err.ln());
    }
    let slope = slope_fit(&logs, &errs);
    assert!(slope >= 0.9, "self-convergence slope {slope} below 1.0 - 0.1");
    let elapsed = start.elapsed().as_secs_f64();
    assert!(elapsed < 120.0, "runtime budget exceeded: {elapsed} s");
    pass(3, &format!("self-convergence slope {slope:.3} >= 0.9"), elapsed);
}

#[test]
fn acceptance_04_ito_isometry_and_martingale() {
    let start = Instant::now();
    let model = linear_model(1.0);
    let n_paths = 10_000usize;
    let t_end = 2.0;
    let mk = |amp_re: f64, amp_im: f64, j: usize, k: usize| {
        SpectralField::mode(3, 3, PI, PI, j, k, Complex::new(amp_re, amp_im))
    };
    // three deterministic step integrands
    let integrands: Vec<StepIntegrand<f64>> = vec![
        StepIntegrand {
            breaks: vec![0.0, t_end],
            values: vec![vec![mk(0.4, -0.3, 1, 2), mk(0.1, 0.2, 2, 1)]],
        },
        StepIntegrand {
            breaks: vec![0.0, 0.7, t_end],
            values: vec![
                vec![mk(1.0, 0.0, 1, 1), mk(0.0, 0.5, 3, 3)],
                vec![mk(-0.6, 0.1, 2, 2), mk(0.3, 0.3, 1, 3)],
            ],
        },
        StepIntegrand {
            breaks: vec![0.0, 0.5, 1.5, t_end],
            values: vec![
                vec![mk(0.2, 0.0, 1, 1), mk(0.2, 0.0, 1, 1)],
                vec![mk(0.0, 0.0, 1, 1), mk(1.1, -0.4, 2, 3)],
                vec![mk(0.7, 0.7, 3, 1), mk(0.0, 0.1, 1, 2)],
            ],
        },
    ];
    for (i, xi) in integrands.iter().enumerate() {
        let rep = ito_isometry_test(&model, xi, t_end, n_paths, |p| {
            path_rng(4000 + i as u64, p)
        })
        .unwrap();
        assert!(
            rep.rel_err <= 3.0 * rep.se,
            "integrand {i}: isometry rel err {} beyond 3 SE {}",
            rep.rel_err,
            rep.se
        );
        assert!(
            rep.mean_norm <= 3.0 * rep.mean_se,
            "integrand {i}: martingale mean {} beyond 3 SE {}",
            rep.mean_norm,
            rep.mean_se
        );
    }
    let elapsed = start.elapsed().as_secs_f64();
    assert!(elapsed < 60.0, "runtime budget exceeded: {elapsed} s");
    pass(4, "isometry and martingale mean within 3 SE at 1e4 paths, 3 integrands", elapsed);
}

#[test]
fn acceptance_05_okazawa_yokota_bulk() {
    let start = Instant::now();
    let samples = 100_000usize;
    let mut rng = path_rng(5, 0);
    let mut violations = 0usize;
    let mut checked = 0usize;
    while checked < samples {
        let dim = 1 + (rng.random::<u32>() % 8) as usize;
        let p = 1.1 + 10.9 * rng.random::<f64>();
        let draw = |rng: &mut ChaCha12Rng| {
            (0..dim)
                .map(|_| {
                    Complex::new(
                        rng.random::<f64>() * 4.0 - 2.0,
                        rng.random::<f64>() * 4.0 - 2.0,
                    )
                })
                .collect::<Vec<_>>()
        };
        let z = draw(&mut rng);
        let w = draw(&mut rng);
        match okazawa_yokota_ratio(&z, &w, p) {
            Ok((ratio, bound)) => {
                checked += 1;
                if ratio > bound + 1e-10 {
                    violations += 1;
                }
            }
            Err(CoreError::DegeneratePair) => {}
            Err(e) => panic!("unexpected error {e}"),
        }
    }
    assert_eq!(violations, 0, "ratio bound violated {violations} times");
    let elapsed = start.elapsed().as_secs_f64();
    assert!(elapsed < 30.0, "runtime budget exceeded: {elapsed} s");
    pass(5, "power-pairing ratio bound: 1e5 samples, zero violations beyond 1e-10", elapsed);
}

#[test]
fn acceptance_06_lambda_beta_threshold() {
    let start = Instant::now();
    let per_sigma = 1000usize;
    let mut disagreements = 0usize;
    for &sigma in &[2.5f64, 3.0, 4.0] {
        let thr = GLParams::<f64>::beta_threshold(sigma);
        for i in 0..per_sigma {
            // signed betas across twice the threshold
            let frac = (i as f64 + 0.5) / per_sigma as f64;
            let beta = (2.0 * frac - 1.0) * 2.0 * thr;
            let lb = lambda_beta(sigma, beta);
            let inside = beta.abs() < thr;
            let agrees = if inside { lb > 0.0 } else { lb <= 0.0 };
            if !agrees {
                disagreements += 1;
            }
        }
    }
    assert_eq!(disagreements, 0);
    let elapsed = start.elapsed().as_secs_f64();
    pass(6, "eigenvalue sign agrees with the beta threshold on 3x1e3 grid points", elapsed);
}

#[test]
fn acceptance_07_power_pairing_bound_bulk() {
    let start = Instant::now();
    let pairs_per_combo = 10_000usize;
    for &sigma in &[2.5f64, 3.0] {
        let thr = GLParams::<f64>::beta_threshold(sigma);
        for &frac in &[0.5f64, 0.9] {
            let beta = frac * thr;
            let params = GLParams {
                sigma,
                beta,
                ..base_params()
            };
            let basis = SineBasis::padded(8, 8, PI, PI, sigma);
            let sampler = PairSampler::for_params(&params, 8);
            let mut rng = path_rng(7, (sigma * 10.0 + frac * 100.0) as u64);
            let mut violations = 0usize;
            for _ in 0..pairs_per_combo {
                let (u, phi) = sampler.sample_pair(&mut rng);
                let pp = power_pairing(&u, &phi, sigma, beta, &basis, true).unwrap();
                if pp.slack > 1e-8 * pp.scale.max(1e-300) {
                    violations += 1;
                }
            }
            assert_eq!(
                violations, 0,
                "sigma = {sigma}, beta = {beta}: {violations} violations"
            );
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    assert!(elapsed < 300.0, "runtime budget exceeded: {elapsed} s");
    pass(7, "nonlinear-pairing bound: 4 x 1e4 pairs, zero violations beyond 1e-8 scale", elapsed);
}

#[test]
fn acceptance_08_contraction_inequality_and_negative_control() {
    let start = Instant::now();
    // in-regime: 1e3 sampled pairs satisfy the combined inequality
    let params = base_params();
    let model = linear_model(0.1);
    let mono = MonotonicityConfig::auto(&params, &model.constants);
    assert!(mono.contraction_valid(model.constants.k4), "flags must hold");
    let opts = SuiteOptions {
        samples: 1000,
        seed: 8,
        n_modes: 8,
        negative_control: false,
    };
    let reports = run_suite(&params, &model, &mono, &opts).unwrap();
    for r in &reports {
        assert_eq!(
            r.violations, 0,
            "check {} reported violations in regime",
            r.check
        );
    }

    // negative control beyond the threshold must find violations
    let thr = GLParams::<f64>::beta_threshold(3.0);
    let params_out = GLParams {
        beta: 1.2 * thr,
        ..params
    };
    let mono_out = MonotonicityConfig::auto(&params_out, &model.constants);
    let opts_out = SuiteOptions {
        samples: 64,
        seed: 9,
        n_modes: 8,
        negative_control: true,
    };
    let reports_out = run_suite(&params_out, &model, &mono_out, &opts_out).unwrap();
    let contraction = reports_out
        .iter()
        .find(|r| r.check == "contraction_negative")
        .unwrap();
    assert!(
        contraction.violations >= 1,
        "negative control found no violations"
    );
    let elapsed = start.elapsed().as_secs_f64();
    assert!(elapsed < 300.0, "runtime budget exceeded: {elapsed} s");
    pass(8, "combined inequality holds on 1e3 pairs; sharpness shown beyond threshold", elapsed);
}

#[test]
fn acceptance_09_energy_identity_residual_order() {
    let start = Instant::now();
    // a configuration where the first-order scheme bias dominates the
    // (second-order) quadrature error from the start of the dt range
    let params = GLParams {
        gamma: 2.0,
        ..base_params()
    };
    let n = 4usize;
    let basis = SineBasis::padded(n, n, PI, PI, params.sigma);
    let model = linear_model(0.3);
    let mut rng0 = path_rng(91, 0);
    let u0 = SpectralField::sample_gaussian(n, n, PI, PI, 1.0, 1.0, &mut rng0);
    let run = |dt: f64| {
        let config = SimConfig {
            n1: n,
            n2: n,
            dt,
            t_end: 1.0,
            blowup_radius: 1e9,
            seed: 9,
            n_paths: 1,
            snap_every: 1,
            drift: DriftMode::Full,
        };
        let mut rng = path_rng(config.seed, 0);
        let traj = simulate_path(&config, &params, &model, &basis, &u0, &mut rng).unwrap();
        ito_energy_residual(&traj, &params, &model, &basis).unwrap()
    };
    let r1 = run(1e-3);
    let r2 = run(5e-4);
    let ratio = r1 / r2;
    assert!(
        (1.6..=2.4).contains(&ratio),
        "residual halving ratio {ratio} outside [1.6, 2.4] (r1 = {r1}, r2 = {r2})"
    );
    let elapsed = start.elapsed().as_secs_f64();
    assert!(elapsed < 60.0, "runtime budget exceeded: {elapsed} s");
    pass(9, &format!("energy-identity residual halves under dt halving (ratio {ratio:.2})"), elapsed);
}

#[test]
fn acceptance_10_uniform_in_truncation() {
    let start = Instant::now();
    let params = base_params();
    let model = linear_model(0.1);
    let base = SimConfig {
        n1: 8,
        n2: 8,
        dt: 1e-3,
        t_end: 0.1,
        blowup_radius: 1e9,
        seed: 10,
        n_paths: 1000,
        snap_every: 0,
        drift: DriftMode::Full,
    };
    // initial data drawn at the coarsest level and zero-padded, so the
    // draw count (and the shared noise) is identical across levels
    let rows = uniformity_scan(&base, &params, &model, &[8, 16, 32], |n, _, rng| {
        let coarse = SpectralField::sample_gaussian(8, 8, PI, PI, 1.5, 0.3, rng);
        let mut f = SpectralField::zeros(n, n, PI, PI);
        for j in 0..8 {
            for k in 0..8 {
                f.coeffs[[j, k]] = coarse.coeffs[[j, k]];
            }
        }
        f
    })
    .unwrap();
    for row in &rows {
        println!(
            "  n = {:2}: L31 ratio {:.4}, L32 ratio {:.4}, L33 ratio {:.4}",
            row.n, row.l31.ratio, row.l32.ratio, row.l33.ratio
        );
    }
    let spread31 = ratio_spread(&rows, |r| r.l31.ratio);
    let spread32 = ratio_spread(&rows, |r| r.l32.ratio);
    let spread33 = ratio_spread(&rows, |r| r.l33.ratio);
    assert!(spread31 <= 2.0, "L31 ratio spread {spread31} exceeds 2");
    assert!(spread32 <= 2.0, "L32 ratio spread {spread32} exceeds 2");
    assert!(spread33 <= 2.0, "L33 ratio spread {spread33} exceeds 2");
    let elapsed = start.elapsed().as_secs_f64();
    assert!(elapsed < 600.0, "runtime budget exceeded: {elapsed} s");
    pass(10, &format!(
        "energy-bound ratios uniform across n in {{8,16,32}} (spreads {spread31:.2}/{spread32:.2}/{spread33:.2})"
    ), elapsed);
}

#[test]
fn acceptance_11_uniqueness_contraction() {
    let start = Instant::now();
    let params = base_params();
    let model = linear_model(0.1);
    let mono = MonotonicityConfig::auto(&params, &model.constants);
    assert!(mono.contraction_valid(model.constants.k4));
    let config = SimConfig {
        n1: 8,
        n2: 8,
        dt: 1e-3,
        t_end: 0.5,
        blowup_radius: 1e9,
        seed: 11,
        n_paths: 1,
        snap_every: 0,
        drift: DriftMode::Full,
    };
    let basis = SineBasis::padded(8, 8, PI, PI, params.sigma);
    let pairs = 100usize;
    let slack_per_step = 2.0;
    let runs: Vec<_> = (0..pairs)
        .map(|i| {
            let mut rng0 = sggl_core::integrator::init_rng(config.seed, i as u64);
            let u0 = SpectralField::sample_gaussian(8, 8, PI, PI, 1.5, 0.2, &mut rng0);
            let mut rng = path_rng(config.seed, i as u64);
            uniqueness_experiment(
                &config,
                &params,
                &model,
                &mono,
                &basis,
                &u0,
                1e-3,
                slack_per_step,
                &mut rng,
            )
            .unwrap()
        })
        .collect();
    assert!(runs.iter().all(|r| r.blowup.is_none()));
    let mean = mean_contraction(&runs).unwrap();
    let first = mean.values[0];
    let last = *mean.values.last().unwrap();
    assert!(
        last < first,
        "mean contraction series must decrease: {first} -> {last}"
    );
    // per-step violations of the mean series bounded by C dt scale
    let tol = slack_per_step * config.dt * first;
    let mut worst_inc: f64 = 0.0;
    for i in 1..mean.values.len() {
        worst_inc = worst_inc.max(mean.values[i] - mean.values[i - 1]);
    }
    assert!(
        worst_inc <= tol,
        "mean-series increment {worst_inc} beyond {tol}"
    );
    let elapsed = start.elapsed().as_secs_f64();
    assert!(elapsed < 300.0, "runtime budget exceeded: {elapsed} s");
    pass(11, &format!(
        "shared-noise contraction: mean {first:.3e} -> {last:.3e}, increments within C dt"
    ), elapsed);
}

#[test]
fn acceptance_12_derivative_identity_routes() {
    let start = Instant::now();
    let params = base_params();
    let mut rng = path_rng(12, 0);
    let mut max_corrected: f64 = 0.0;
    let mut min_printed = f64::INFINITY;
    let mut max_printed: f64 = 0.0;
    for _ in 0..1000 {
        let u = SpectralField::sample_gaussian(6, 6, PI, PI, 0.8, 1.0, &mut rng);
        let (corrected, printed) = derivative_identity_check(&u, &params).unwrap();
        max_corrected = max_corrected.max(corrected);
        min_printed = min_printed.min(printed);
        max_printed = max_printed.max(printed);
    }
    assert!(
        max_corrected < 1e-10,
        "corrected route disagrees: {max_corrected}"
    );
    // regression lock: the uncorrected form is visibly wrong on complex
    // fields
    assert!(
        min_printed > 1e-6 && max_printed > 1e-3,
        "uncorrected-form discrepancy unexpectedly small: min {min_printed}, max {max_printed}"
    );
    let elapsed = start.elapsed().as_secs_f64();
    pass(12, &format!(
        "derivative-term routes agree to {max_corrected:.1e}; uncorrected form off by up to {max_printed:.1e}"
    ), elapsed);
}
