//! End-to-end studies: the shared-noise uniqueness contraction and the
//! Galerkin truncation scan.

use num_complex::Complex;
use rand_chacha::ChaCha12Rng;

use crate::diagnostics::{uniformity_scan, UniformityRow};
use crate::error::{CoreError, Result};
use crate::integrator::{path_rng, simulate_path_with_events, SimpleSeries, Stepper};
use crate::noise::{sample_events, JumpModel};
use crate::params::{GLParams, MonotonicityConfig, SimConfig};
use crate::real::Real;
use crate::spectral::{SineBasis, SpectralField};

/// One shared-noise pair evolution: both trajectories consumed the same
/// jump events and marks; the contraction series is
/// `e^{-r(t)} ||u1(t) - u2(t)||^2` with `r` accumulated along `u2`.
#[derive(Debug, Clone)]
pub struct ContractionRun<T: Real> {
    /// Grid times.
    pub times: Vec<T>,
    pub r_series: Vec<T>,
    pub omega_l2_sq: Vec<T>,
    pub contraction: Vec<T>,
    /// `(t, increment)` of contraction-series increases beyond the
    /// per-step slack `slack_per_step * dt * contraction[0]`.
    pub violations: Vec<(T, T)>,
    /// Either path hit the blow-up guard (experiment inconclusive).
    pub blowup: Option<T>,
    pub n_jumps: usize,
}

/// Evolves `u1` from `u0 + delta * (normalized perturbation)` and `u2`
/// from `u0` under one jump realization, in lockstep.
#[allow(clippy::too_many_arguments)]
pub fn uniqueness_experiment<T: Real>(
    config: &SimConfig<T>,
    params: &GLParams<T>,
    model: &JumpModel<T>,
    mono: &MonotonicityConfig<T>,
    basis: &SineBasis<T>,
    u0: &SpectralField<T>,
    delta: T,
    slack_per_step: T,
    rng: &mut ChaCha12Rng,
) -> Result<ContractionRun<T>> {
    config.validate()?;
    if !(delta >= T::zero()) {
        return Err(CoreError::Config("delta must be >= 0".into()));
    }
    let events = sample_events(model, config.t_end, rng);
    let perturbation = SpectralField::sample_gaussian(
        u0.n1(),
        u0.n2(),
        u0.l1,
        u0.l2,
        T::one(),
        T::one(),
        rng,
    );
    let mut u1 = u0.clone();
    u1.add_scaled(Complex::new(delta, T::zero()), &perturbation);
    let u2 = u0.clone();
    contraction_run(config, params, model, mono, basis, &u1, &u2, &events, slack_per_step)
}

/// Lockstep evolution of a given pair under a given event list.
#[allow(clippy::too_many_arguments)]
pub fn contraction_run<T: Real>(
    config: &SimConfig<T>,
    params: &GLParams<T>,
    model: &JumpModel<T>,
    mono: &MonotonicityConfig<T>,
    basis: &SineBasis<T>,
    u1_0: &SpectralField<T>,
    u2_0: &SpectralField<T>,
    events: &[crate::noise::JumpEvent<T>],
    slack_per_step: T,
) -> Result<ContractionRun<T>> {
    let stepper = Stepper::new(params, model, basis, config.drift, config.dt);
    let mut u1 = u1_0.clone();
    let mut u2 = u2_0.clone();
    let mut t = T::zero();
    let mut grid_k = 1usize;
    let mut ev_idx = 0usize;
    let mut blowup: Option<T> = None;

    let mut times = vec![T::zero()];
    let mut omega = vec![u1.sub(&u2).l2_norm_sq()];
    // cumulative r via trapezoid of the integrand along u2, refreshed at
    // every node (grid and jump) so jump discontinuities are respected
    let k3 = model.constants.k3;
    let integrand = |u2n: &SpectralField<T>| {
        let (l2, h1) = u2n.norms();
        mono.r_integrand(params.gamma, k3, l2, h1)
    };
    let mut r_acc = T::zero();
    let mut last_rate = integrand(&u2);
    let mut last_t = T::zero();
    let mut r_series = vec![T::zero()];

    let t_end = config.t_end;
    while t < t_end && blowup.is_none() {
        let t_grid = (T::of(grid_k as f64) * config.dt).min(t_end);
        let next_event = events
            .get(ev_idx)
            .filter(|e| e.time <= t_grid && e.time <= t_end);
        if let Some(ev) = next_event {
            let step = ev.time - t;
            let n1 = stepper.drift_step(t, &u1, step, None)?;
            let n2 = stepper.drift_step(t, &u2, step, None)?;
            match (n1, n2) {
                (Some(a), Some(b)) => {
                    u1 = a;
                    u2 = b;
                }
                _ => {
                    blowup = Some(ev.time);
                    break;
                }
            }
            t = ev.time;
            // integrand up to the left limit, then refresh past the jump
            r_acc += (last_rate + integrand(&u2)) * (t - last_t) * T::of(0.5);
            u1 = stepper.apply_jump(t, &u1, ev.mark)?;
            u2 = stepper.apply_jump(t, &u2, ev.mark)?;
            if !u1.is_finite() || !u2.is_finite() {
                blowup = Some(t);
                break;
            }
            last_rate = integrand(&u2);
            last_t = t;
            ev_idx += 1;
        } else {
            let step = t_grid - t;
            let n1 = stepper.drift_step(t, &u1, step, None)?;
            let n2 = stepper.drift_step(t, &u2, step, None)?;
            match (n1, n2) {
                (Some(a), Some(b)) => {
                    u1 = a;
                    u2 = b;
                }
                _ => {
                    blowup = Some(t_grid);
                    break;
                }
            }
            t = t_grid;
            r_acc += (last_rate + integrand(&u2)) * (t - last_t) * T::of(0.5);
            last_rate = integrand(&u2);
            last_t = t;
            times.push(t);
            r_series.push(r_acc);
            omega.push(u1.sub(&u2).l2_norm_sq());
            grid_k += 1;
            if u1.l2_norm_sq() >= config.blowup_radius
                || u2.l2_norm_sq() >= config.blowup_radius
            {
                blowup = Some(t);
            }
        }
    }

    let contraction: Vec<T> = r_series
        .iter()
        .zip(&omega)
        .map(|(&r, &o)| (-r).exp() * o)
        .collect();
    let scale = contraction[0].max(T::of(1e-300));
    let tol = slack_per_step * config.dt * scale;
    let mut violations = Vec::new();
    for i in 1..contraction.len() {
        let inc = contraction[i] - contraction[i - 1];
        if inc > tol {
            violations.push((times[i], inc));
        }
    }
    Ok(ContractionRun {
        times,
        r_series,
        omega_l2_sq: omega,
        contraction,
        violations,
        blowup,
        n_jumps: ev_idx,
    })
}

/// Pointwise mean of several contraction series (conclusive runs only).
pub fn mean_contraction<T: Real>(runs: &[ContractionRun<T>]) -> Option<SimpleSeries<T>> {
    let ok: Vec<&ContractionRun<T>> = runs.iter().filter(|r| r.blowup.is_none()).collect();
    let first = ok.first()?;
    let n = first.contraction.len();
    let mut mean = vec![T::zero(); n];
    for run in &ok {
        if run.contraction.len() != n {
            return None;
        }
        for (m, &c) in mean.iter_mut().zip(&run.contraction) {
            *m += c;
        }
    }
    let count = T::of(ok.len() as f64);
    for m in &mut mean {
        *m /= count;
    }
    Some(SimpleSeries {
        times: first.times.clone(),
        values: mean,
    })
}

/// One row of the truncation scan: endpoint discrepancy against the next
/// level (NaN on the finest row) plus the energy-bound ratios.
#[derive(Debug, Clone, Copy)]
pub struct GalerkinRow<T: Real> {
    pub n: usize,
    /// Mean over paths of `||u_n(T) - u_next(T)||`.
    pub discrepancy: T,
    pub l31_ratio: T,
    pub l32_ratio: T,
}

/// Runs the same noise realization (per path index) at every truncation
/// level, measures consecutive endpoint discrepancies, and attaches the
/// uniformity table.
pub fn galerkin_scan<T, F>(
    base: &SimConfig<T>,
    params: &GLParams<T>,
    model: &JumpModel<T>,
    levels: &[usize],
    n_paths: usize,
    u0_of: F,
) -> Result<Vec<GalerkinRow<T>>>
where
    T: Real,
    F: Fn(usize, usize, &mut ChaCha12Rng) -> SpectralField<T> + Sync,
{
    if levels.len() < 2 {
        return Err(CoreError::Config(
            "truncation scan needs at least two levels".into(),
        ));
    }
    // endpoint states per (path, level)
    let mut finals: Vec<Vec<SpectralField<T>>> = Vec::with_capacity(n_paths);
    for path in 0..n_paths {
        let mut rng = path_rng(base.seed, path as u64);
        let events = sample_events(model, base.t_end, &mut rng);
        let mut per_level = Vec::with_capacity(levels.len());
        for &n in levels {
            let config = SimConfig {
                n1: n,
                n2: n,
                snap_every: 0,
                ..*base
            };
            let basis = SineBasis::padded(n, n, params.l1, params.l2, params.sigma);
            let mut rng0 = crate::integrator::init_rng(base.seed, path as u64);
            let u0 = u0_of(n, path, &mut rng0);
            let traj = simulate_path_with_events(
                &config, params, model, &basis, &u0, &events,
            )?;
            per_level.push(traj.final_state().clone());
        }
        finals.push(per_level);
    }

    // consecutive discrepancies, averaged over paths
    let mut discrepancies = vec![T::zero(); levels.len()];
    for per_level in &finals {
        for i in 0..levels.len() - 1 {
            discrepancies[i] +=
                per_level[i].diff_norm_sq(&per_level[i + 1]).sqrt();
        }
    }
    let np = T::of(n_paths as f64);
    for d in discrepancies.iter_mut().take(levels.len() - 1) {
        *d /= np;
    }
    discrepancies[levels.len() - 1] = T::nan();

    let scan_config = SimConfig {
        n_paths,
        snap_every: 0,
        ..*base
    };
    let rows: Vec<UniformityRow<T>> =
        uniformity_scan(&scan_config, params, model, levels, |n, path, rng| {
            u0_of(n, path, rng)
        })?;

    Ok(levels
        .iter()
        .zip(discrepancies)
        .zip(rows)
        .map(|((&n, discrepancy), row)| GalerkinRow {
            n,
            discrepancy,
            l31_ratio: row.l31.ratio,
            l32_ratio: row.l32.ratio,
        })
        .collect())
}

/// Projection of a smooth profile onto the sine basis by dealiased
/// quadrature; evaluated once on a fine grid and exactly nested across
/// truncation levels.
pub fn project_profile<T, F>(
    n1: usize,
    n2: usize,
    l1: T,
    l2: T,
    fine: usize,
    profile: F,
) -> Result<SpectralField<T>>
where
    T: Real,
    F: Fn(T, T) -> Complex<T>,
{
    let basis = SineBasis::new(n1, n2, fine, fine, l1, l2)?;
    let (xs, ys) = basis.nodes();
    let mut values = ndarray::Array2::zeros((fine, fine));
    for a in 0..fine {
        for b in 0..fine {
            values[[a, b]] = profile(xs[a], ys[b]);
        }
    }
    basis.analyze_values(&values)
}

/// Centered Gaussian bump, the analytic initial profile of the scans.
pub fn gaussian_bump<T: Real>(l1: T, l2: T, width: T, amplitude: T) -> impl Fn(T, T) -> Complex<T> {
    move |x: T, y: T| {
        let half = T::of(0.5);
        let dx = x - l1 * half;
        let dy = y - l2 * half;
        let v = amplitude * (-(dx * dx + dy * dy) / (T::of(2.0) * width * width)).exp();
        Complex::new(v, T::zero())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::noise::NoiseFamily;
    use crate::params::{DriftMode, NoiseConstants};

    const PI: f64 = std::f64::consts::PI;

    fn quiet_params() -> GLParams<f64> {
        GLParams {
            alpha: 0.3,
            beta: 0.4,
            gamma: 0.5,
            ..GLParams::default()
        }
    }

    fn small_model() -> JumpModel<f64> {
        JumpModel::new(
            vec![1.0],
            vec![0.5],
            NoiseFamily::LinearMultiplicative { c: 0.1 },
            4.0,
        )
        .unwrap()
    }

    fn base_config() -> SimConfig<f64> {
        SimConfig {
            n1: 4,
            n2: 4,
            dt: 1e-2,
            t_end: 0.5,
            blowup_radius: 1e9,
            seed: 21,
            n_paths: 1,
            snap_every: 0,
            drift: DriftMode::Full,
        }
    }

    #[test]
    fn delta_zero_gives_identically_zero_series() {
        let params = quiet_params();
        let model = small_model();
        let mono = MonotonicityConfig::auto(&params, &model.constants);
        let config = base_config();
        let basis = SineBasis::padded(4, 4, PI, PI, params.sigma);
        let u0 = SpectralField::mode(4, 4, PI, PI, 1, 1, Complex::new(0.2, 0.0));
        let mut rng = path_rng(1, 0);
        let run = uniqueness_experiment(
            &config, &params, &model, &mono, &basis, &u0, 0.0, 2.0, &mut rng,
        )
        .unwrap();
        for &c in &run.contraction {
            assert_eq!(c, 0.0);
        }
        assert!(run.violations.is_empty());
    }

    #[test]
    fn linear_deterministic_pair_contracts_exactly() {
        // zero noise, zero nonlinearity: omega decays per-mode, r' is
        // constant, so the contraction series is strictly nonincreasing
        let params = quiet_params();
        let model = JumpModel::none();
        let mono = MonotonicityConfig::auto(&params, &model.constants);
        let mut config = base_config();
        config.drift = DriftMode::LinearOnly;
        let basis = SineBasis::padded(4, 4, PI, PI, params.sigma);
        let u0 = SpectralField::mode(4, 4, PI, PI, 1, 1, Complex::new(0.4, 0.0));
        let mut rng = path_rng(2, 0);
        let run = uniqueness_experiment(
            &config, &params, &model, &mono, &basis, &u0, 1e-3, 2.0, &mut rng,
        )
        .unwrap();
        assert!(run.violations.is_empty());
        for i in 1..run.contraction.len() {
            assert!(run.contraction[i] <= run.contraction[i - 1] * (1.0 + 1e-12));
        }
        // delta scaling: ||omega(0)|| = delta exactly
        assert!((run.omega_l2_sq[0].sqrt() - 1e-3).abs() < 1e-12);
    }

    #[test]
    fn shared_noise_pair_consumes_identical_events() {
        let params = quiet_params();
        let model = small_model();
        let mono = MonotonicityConfig::auto(&params, &model.constants);
        let config = base_config();
        let basis = SineBasis::padded(4, 4, PI, PI, params.sigma);
        let u0 = SpectralField::mode(4, 4, PI, PI, 1, 1, Complex::new(0.2, 0.1));
        let mut rng = path_rng(3, 5);
        let events = sample_events(&model, config.t_end, &mut rng);
        let run = contraction_run(
            &config,
            &params,
            &model,
            &mono,
            &basis,
            &u0.scaled(Complex::new(1.001, 0.0)),
            &u0,
            &events,
            2.0,
        )
        .unwrap();
        assert_eq!(run.n_jumps, events.len());
        // for the linear family omega multiplies by the same factor at
        // every shared jump, so the final omega is u0-proportional
        assert!(run.omega_l2_sq.iter().all(|&v| v.is_finite()));
    }

    #[test]
    fn mean_contraction_decreases_for_small_ensemble() {
        let params = quiet_params();
        let model = small_model();
        let mono = MonotonicityConfig::auto(&params, &model.constants);
        assert!(mono.contraction_valid(model.constants.k4));
        let config = base_config();
        let basis = SineBasis::padded(4, 4, PI, PI, params.sigma);
        let u0 = SpectralField::mode(4, 4, PI, PI, 1, 1, Complex::new(0.2, 0.0));
        let runs: Vec<_> = (0..20)
            .map(|i| {
                let mut rng = path_rng(config.seed, i);
                uniqueness_experiment(
                    &config, &params, &model, &mono, &basis, &u0, 1e-3, 2.0, &mut rng,
                )
                .unwrap()
            })
            .collect();
        let mean = mean_contraction(&runs).unwrap();
        let first = mean.values[0];
        let last = *mean.values.last().unwrap();
        assert!(
            last < first,
            "mean contraction should decrease: {first} -> {last}"
        );
    }

    #[test]
    fn galerkin_scan_exact_for_resolved_data() {
        // u0 representable at the coarsest level, deterministic linear
        // problem: discrepancies at machine precision
        let params = quiet_params();
        let model = JumpModel::none();
        let mut base = base_config();
        base.drift = DriftMode::LinearOnly;
        base.t_end = 0.25;
        let rows = galerkin_scan(&base, &params, &model, &[4, 8, 16], 1, |n, _, _| {
            SpectralField::mode(n, n, PI, PI, 1, 1, Complex::new(0.3, 0.2))
        })
        .unwrap();
        assert!(rows[0].discrepancy < 1e-13);
        assert!(rows[1].discrepancy < 1e-13);
        assert!(rows[2].discrepancy.is_nan());
    }

    #[test]
    fn galerkin_scan_decreases_for_analytic_data() {
        let params = quiet_params();
        let model = JumpModel::none();
        let mut base = base_config();
        base.t_end = 0.2;
        base.dt = 2e-3;
        let bump = gaussian_bump(PI, PI, 0.35, 0.5);
        let u0_full = project_profile(16, 16, PI, PI, 96, &bump).unwrap();
        let rows = galerkin_scan(&base, &params, &model, &[4, 8, 16], 1, |n, _, _| {
            // truncate the shared projection (exact nesting)
            let mut f = SpectralField::zeros(n, n, PI, PI);
            for j in 0..n.min(16) {
                for k in 0..n.min(16) {
                    f.coeffs[[j, k]] = u0_full.coeffs[[j, k]];
                }
            }
            f
        })
        .unwrap();
        assert!(
            rows[0].discrepancy > rows[1].discrepancy,
            "expected monotone decrease: {} vs {}",
            rows[0].discrepancy,
            rows[1].discrepancy
        );
        assert!(rows[1].discrepancy > 0.0);
    }

    #[test]
    fn projected_bump_matches_parseval() {
        // sanity: the projection has finite energy close to the L2 norm
        // of the profile (quadrature on the fine grid)
        let bump = gaussian_bump(PI, PI, 0.4, 1.0);
        let f = project_profile(12, 12, PI, PI, 96, &bump).unwrap();
        let basis = SineBasis::new(12, 12, 96, 96, PI, PI).unwrap();
        let grid = basis.synthesize(&f, false).unwrap();
        let direct: f64 = {
            let (xs, ys) = basis.nodes();
            let mut acc = 0.0;
            for a in 0..96 {
                for b in 0..96 {
                    acc += bump(xs[a], ys[b]).norm_sqr();
                }
            }
            acc * grid.weight()
        };
        let l2 = f.l2_norm_sq();
        // the tail beyond 12 modes is tiny for this width
        assert!((l2 - direct).abs() / direct < 1e-3, "{l2} vs {direct}");
        let _ = NoiseConstants::<f64>::zero();
    }
}
