//! Time integration of the Galerkin jump SDE: exponential handling of the
//! stiff linear part, explicit projected nonlinearity, compensator folded
//! into the drift, and jumps applied at their exact sampled times.
//!
//! Between events the update is a Lawson-type exponential Euler step
//!
//! `u <- exp(-(1 + i alpha) mu dt) (u + dt (P_n B(u) - compensator(u)))`
//!
//! which is exact for the pure-linear problem and first-order accurate
//! overall. At a jump time the left limit is used as input and
//! `P_n g(t, u-, z)` is added (cadlag convention).

use num_complex::Complex;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

use crate::error::{CoreError, Result};
use crate::noise::{compensator, g_apply, sample_events, JumpEvent, JumpModel};
use crate::ops;
use crate::params::{DriftMode, GLParams, SimConfig};
use crate::real::Real;
use crate::spectral::{eigenvalue_grid, PhysicalGrid, SineBasis, SpectralField};
use ndarray::Array2;

/// Per-path random stream: stream `i` of a counter-based generator seeded
/// by the master seed, so ensembles are independent of scheduling.
pub fn path_rng(seed: u64, path: u64) -> ChaCha12Rng {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    rng.set_stream(path);
    rng
}

/// Stream for a path's initial data, separate from its dynamics stream so
/// the jump realization of path `i` does not depend on how many draws the
/// initial sampler makes (shared-noise scans across truncation levels
/// rely on this).
pub fn init_rng(seed: u64, path: u64) -> ChaCha12Rng {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    rng.set_stream(u64::MAX - path);
    rng
}

/// A plain time series.
#[derive(Debug, Clone)]
pub struct SimpleSeries<T: Real> {
    pub times: Vec<T>,
    pub values: Vec<T>,
}

/// Time-stamped energy snapshot along a path.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyRecord<T: Real> {
    pub t: T,
    /// `||u||^2`.
    pub l2_sq: T,
    /// `||grad u||^2`.
    pub h1_sq: T,
    /// `||u||_{2 sigma + 2}^{2 sigma + 2}`.
    pub l2s2_pow: T,
    /// `int |u|^{2 sigma} |grad u|^2`.
    pub mixed: T,
    /// `||lap u||^2` (spectral; feeds the H1-level statistics).
    pub h2_sq: T,
}

/// Why a record was taken.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RecordKind {
    Grid,
    /// Left limit at a jump time.
    PreJump,
    /// State right after the jump (cadlag value).
    PostJump,
}

/// One simulated path: records at every grid and jump time, optionally
/// thinned full-state snapshots, the realized jumps, and the first time
/// the blow-up guard tripped (state frozen from then on).
#[derive(Debug, Clone)]
pub struct Trajectory<T: Real> {
    pub records: Vec<EnergyRecord<T>>,
    pub kinds: Vec<RecordKind>,
    /// `(record index, state)` pairs; with `snap_every == 1` every record
    /// has its state.
    pub states: Vec<(usize, SpectralField<T>)>,
    pub jump_log: Vec<JumpEvent<T>>,
    pub stopped_at: Option<T>,
    pub snap_every: usize,
    pub drift: DriftMode,
}

impl<T: Real> Trajectory<T> {
    pub fn times(&self) -> impl Iterator<Item = T> + '_ {
        self.records.iter().map(|r| r.t)
    }

    pub fn final_state(&self) -> &SpectralField<T> {
        &self.states.last().expect("endpoint snapshot always kept").1
    }
}

/// Stepper bound to one (params, model, basis) triple; hot state is the
/// cached exponential multiplier for the standard step size.
pub struct Stepper<'a, T: Real> {
    pub params: &'a GLParams<T>,
    pub model: &'a JumpModel<T>,
    pub basis: &'a SineBasis<T>,
    pub drift: DriftMode,
    exp_std: Array2<Complex<T>>,
    dt_std: T,
    mu: Array2<T>,
}

impl<'a, T: Real> Stepper<'a, T> {
    pub fn new(
        params: &'a GLParams<T>,
        model: &'a JumpModel<T>,
        basis: &'a SineBasis<T>,
        drift: DriftMode,
        dt_std: T,
    ) -> Self {
        let mu = eigenvalue_grid(basis.n1, basis.n2, params.l1, params.l2);
        let factor = Complex::new(T::one(), params.alpha);
        let exp_std = mu.mapv(|m| (-(factor * m * dt_std)).exp());
        Stepper {
            params,
            model,
            basis,
            drift,
            exp_std,
            dt_std,
            mu,
        }
    }

    fn apply_exponential(&self, u: &mut SpectralField<T>, dt: T) {
        if dt == self.dt_std {
            ndarray::Zip::from(&mut u.coeffs)
                .and(&self.exp_std)
                .for_each(|a, e| *a *= *e);
        } else {
            let factor = Complex::new(T::one(), self.params.alpha);
            ndarray::Zip::from(&mut u.coeffs)
                .and(&self.mu)
                .for_each(|a, m| *a *= (-(factor * *m * dt)).exp());
        }
    }

    /// Drift increment `P_n B(u) - compensator(u)` evaluated at the
    /// segment start, reusing an already synthesized grid when available.
    fn drift_increment(
        &self,
        t: T,
        u: &SpectralField<T>,
        grid: Option<&PhysicalGrid<T>>,
    ) -> Result<SpectralField<T>> {
        let mut inc = match self.drift {
            DriftMode::Full => match grid {
                Some(g) => ops::eval_b_from_grid(u, g, self.params, self.basis)?,
                None => ops::eval_b_projected(u, self.params, self.basis)?,
            },
            DriftMode::LinearOnly => {
                SpectralField::zeros(u.n1(), u.n2(), u.l1, u.l2)
            }
        };
        if !self.model.is_none() {
            let comp = compensator(self.model, t, u, self.basis)?;
            inc.add_scaled(Complex::new(-T::one(), T::zero()), &comp);
        }
        Ok(inc)
    }

    /// One exponential-Euler segment of length `dt` starting at time `t`.
    /// Returns `None` when the step produced a non-finite state (blow-up
    /// signal; the caller freezes the pre-step state).
    pub fn drift_step(
        &self,
        t: T,
        u: &SpectralField<T>,
        dt: T,
        grid: Option<&PhysicalGrid<T>>,
    ) -> Result<Option<SpectralField<T>>> {
        if dt == T::zero() {
            return Ok(Some(u.clone()));
        }
        let inc = self.drift_increment(t, u, grid)?;
        let mut next = u.clone();
        next.add_scaled(Complex::new(dt, T::zero()), &inc);
        self.apply_exponential(&mut next, dt);
        if !next.is_finite() {
            return Ok(None);
        }
        Ok(Some(next))
    }

    /// Jump update `u(tau) = u(tau-) + P_n g(tau, u(tau-), z)`.
    pub fn apply_jump(
        &self,
        t: T,
        u: &SpectralField<T>,
        mark: usize,
    ) -> Result<SpectralField<T>> {
        let g = g_apply(self.model, t, u, mark, self.basis)?;
        let mut next = u.clone();
        next.add_scaled(Complex::new(T::one(), T::zero()), &g);
        Ok(next)
    }

    /// Energy record at time `t`, reusing the synthesized grid.
    pub fn record(&self, t: T, u: &SpectralField<T>, grid: &PhysicalGrid<T>) -> EnergyRecord<T> {
        let (l2_sq, h1_sq) = u.norms();
        let sigma = self.params.sigma;
        let l2s2_pow = grid.lp_norm_pow(T::of(2.0) * sigma + T::of(2.0));
        let mixed = grid.mixed_term(sigma).unwrap_or(T::zero());
        EnergyRecord {
            t,
            l2_sq,
            h1_sq,
            l2s2_pow,
            mixed,
            h2_sq: u.h2_norm_sq(),
        }
    }
}

/// Simulates one path with a pre-sampled event list (shared-noise
/// experiments reuse the same list across runs).
pub fn simulate_path_with_events<T: Real>(
    config: &SimConfig<T>,
    params: &GLParams<T>,
    model: &JumpModel<T>,
    basis: &SineBasis<T>,
    u0: &SpectralField<T>,
    events: &[JumpEvent<T>],
) -> Result<Trajectory<T>> {
    config.validate()?;
    let stepper = Stepper::new(params, model, basis, config.drift, config.dt);
    let mut traj = Trajectory {
        records: Vec::new(),
        kinds: Vec::new(),
        states: Vec::new(),
        jump_log: Vec::new(),
        stopped_at: None,
        snap_every: config.snap_every,
        drift: config.drift,
    };
    let snap_all = config.snap_every == 1;
    let mut u = u0.clone();
    let mut t = T::zero();
    let mut grid_k: usize = 1;
    let mut ev_idx: usize = 0;
    let mut stopped: Option<T> = None;

    let push = |traj: &mut Trajectory<T>,
                    kind: RecordKind,
                    t: T,
                    u: &SpectralField<T>,
                    grid: &PhysicalGrid<T>,
                    snap: bool| {
        traj.records.push(stepper.record(t, u, grid));
        traj.kinds.push(kind);
        if snap {
            traj.states.push((traj.records.len() - 1, u.clone()));
        }
    };

    // the t = 0 record (grid node 0)
    let grid0 = basis.synthesize(&u, true)?;
    push(&mut traj, RecordKind::Grid, t, &u, &grid0, config.snap_every >= 1);
    let mut cached_grid = Some(grid0);

    let check_stop = |u: &SpectralField<T>, t: T, stopped: &mut Option<T>| {
        if stopped.is_none() && u.l2_norm_sq() >= config.blowup_radius {
            *stopped = Some(t);
        }
    };
    check_stop(&u, t, &mut stopped);

    let t_end = config.t_end;
    while t < t_end {
        let t_grid = (T::of(grid_k as f64) * config.dt).min(t_end);
        let next_event = events.get(ev_idx).filter(|e| e.time <= t_grid && e.time <= t_end);
        if let Some(ev) = next_event {
            // advance to the jump time, record both sides of the jump
            if stopped.is_none() {
                match stepper.drift_step(t, &u, ev.time - t, cached_grid.as_ref())? {
                    Some(next) => u = next,
                    None => stopped = Some(ev.time),
                }
            }
            t = ev.time;
            let grid = basis.synthesize(&u, true)?;
            push(&mut traj, RecordKind::PreJump, t, &u, &grid, snap_all);
            check_stop(&u, t, &mut stopped);
            if stopped.is_none() {
                u = stepper.apply_jump(t, &u, ev.mark)?;
                if !u.is_finite() {
                    stopped = Some(t);
                }
            }
            traj.jump_log.push(*ev);
            let grid_post = basis.synthesize(&u, true)?;
            push(&mut traj, RecordKind::PostJump, t, &u, &grid_post, snap_all);
            check_stop(&u, t, &mut stopped);
            cached_grid = Some(grid_post);
            ev_idx += 1;
        } else {
            if stopped.is_none() {
                match stepper.drift_step(t, &u, t_grid - t, cached_grid.as_ref())? {
                    Some(next) => u = next,
                    None => stopped = Some(t_grid),
                }
            }
            t = t_grid;
            let grid = basis.synthesize(&u, true)?;
            let snap = config.snap_every >= 1 && grid_k.is_multiple_of(config.snap_every);
            push(&mut traj, RecordKind::Grid, t, &u, &grid, snap);
            check_stop(&u, t, &mut stopped);
            cached_grid = Some(grid);
            grid_k += 1;
        }
    }
    // always retain the endpoint state
    if traj.states.last().map(|(i, _)| *i) != Some(traj.records.len() - 1) {
        traj.states.push((traj.records.len() - 1, u.clone()));
    }
    traj.stopped_at = stopped;
    Ok(traj)
}

/// Simulates one path, sampling its jump events from `rng`.
pub fn simulate_path<T: Real>(
    config: &SimConfig<T>,
    params: &GLParams<T>,
    model: &JumpModel<T>,
    basis: &SineBasis<T>,
    u0: &SpectralField<T>,
    rng: &mut ChaCha12Rng,
) -> Result<Trajectory<T>> {
    let events = sample_events(model, config.t_end, rng);
    simulate_path_with_events(config, params, model, basis, u0, &events)
}

/// Per-path aggregates feeding the Monte-Carlo energy statistics.
#[derive(Debug, Clone, Copy)]
pub struct PathSummary<T: Real> {
    pub init_l2_sq: T,
    pub init_h1_sq: T,
    /// sup over all records (grid and jump times) of `||u||^2`.
    pub sup_l2_sq: T,
    pub sup_h1_sq: T,
    /// `int_0^T ||grad u||^2 dt` (trapezoid over the record sequence).
    pub int_h1_sq: T,
    pub int_l2s2: T,
    pub int_h2_sq: T,
    pub int_mixed: T,
    /// `int ||grad u||^{p-2} ||lap u||^2 dt`.
    pub int_gradp2_h2: T,
    /// `int ||grad u||^{p-2} (int |u|^{2 sigma}|grad u|^2 dx) dt`.
    pub int_gradp2_mixed: T,
    pub blowup: Option<T>,
    pub n_jumps: usize,
}

impl<T: Real> PathSummary<T> {
    pub fn from_trajectory(traj: &Trajectory<T>, p: T) -> Self {
        let first = &traj.records[0];
        let mut sup_l2 = T::zero();
        let mut sup_h1 = T::zero();
        let mut ints = [T::zero(); 5];
        let pm2 = (p - T::of(2.0)) * T::of(0.5); // exponent on h1_sq
        let weight = |r: &EnergyRecord<T>| {
            let w = if pm2 == T::zero() {
                T::one()
            } else {
                r.h1_sq.powf(pm2)
            };
            [
                r.h1_sq,
                r.l2s2_pow,
                r.h2_sq,
                r.mixed,
                w * r.h2_sq,
            ]
        };
        let extra = |r: &EnergyRecord<T>| {
            let w = if pm2 == T::zero() {
                T::one()
            } else {
                r.h1_sq.powf(pm2)
            };
            w * r.mixed
        };
        let mut int_gradp2_mixed = T::zero();
        for (i, r) in traj.records.iter().enumerate() {
            sup_l2 = sup_l2.max(r.l2_sq);
            sup_h1 = sup_h1.max(r.h1_sq);
            if i + 1 < traj.records.len() {
                let s = &traj.records[i + 1];
                let half_dt = (s.t - r.t) * T::of(0.5);
                let wr = weight(r);
                let ws = weight(s);
                for (k, acc) in ints.iter_mut().enumerate() {
                    *acc += (wr[k] + ws[k]) * half_dt;
                }
                int_gradp2_mixed += (extra(r) + extra(s)) * half_dt;
            }
        }
        PathSummary {
            init_l2_sq: first.l2_sq,
            init_h1_sq: first.h1_sq,
            sup_l2_sq: sup_l2,
            sup_h1_sq: sup_h1,
            int_h1_sq: ints[0],
            int_l2s2: ints[1],
            int_h2_sq: ints[2],
            int_mixed: ints[3],
            int_gradp2_h2: ints[4],
            int_gradp2_mixed,
            blowup: traj.stopped_at,
            n_jumps: traj.jump_log.len(),
        }
    }
}

/// Mean, variance, and standard error of one scalar across paths.
#[derive(Debug, Clone, Copy)]
pub struct Moments<T: Real> {
    pub mean: T,
    pub var: T,
    pub se: T,
}

pub fn moments_of<T: Real>(values: &[T]) -> Moments<T> {
    let n = T::of(values.len() as f64);
    let mean = values.iter().copied().sum::<T>() / n;
    let var = if values.len() > 1 {
        values
            .iter()
            .map(|&v| (v - mean) * (v - mean))
            .sum::<T>()
            / (n - T::one())
    } else {
        T::zero()
    };
    Moments {
        mean,
        var,
        se: (var / n).sqrt(),
    }
}

/// Ensemble output: per-grid-time moments of every energy field plus the
/// per-path summaries the statistics are built from.
#[derive(Debug, Clone)]
pub struct EnsembleStats<T: Real> {
    /// Grid record times (identical across paths).
    pub times: Vec<T>,
    /// Per-time mean of `(l2_sq, h1_sq, l2s2_pow, mixed)`.
    pub mean: Vec<[T; 4]>,
    /// Per-time variance (unbiased) of the same fields.
    pub var: Vec<[T; 4]>,
    pub summaries: Vec<PathSummary<T>>,
    pub blowup_count: usize,
    pub n_paths: usize,
    /// Moment order the weighted path integrals were accumulated with.
    pub p: T,
}

/// Order-fixed pairwise tree reduction (parallel-schedule independent).
pub fn tree_reduce<V, F: Fn(V, V) -> V>(mut items: Vec<V>, combine: F) -> Option<V> {
    if items.is_empty() {
        return None;
    }
    while items.len() > 1 {
        let mut next = Vec::with_capacity(items.len().div_ceil(2));
        let mut iter = items.into_iter();
        while let Some(a) = iter.next() {
            match iter.next() {
                Some(b) => next.push(combine(a, b)),
                None => next.push(a),
            }
        }
        items = next;
    }
    items.pop()
}

/// Runs `n_paths` independent paths (path `i` on stream `i`) and reduces
/// the energy records into per-time moments. `u0_of` maps the path index
/// and its private generator to the initial state, so random initial data
/// stays deterministic per path.
pub fn simulate_ensemble<T, F>(
    config: &SimConfig<T>,
    params: &GLParams<T>,
    model: &JumpModel<T>,
    basis: &SineBasis<T>,
    u0_of: F,
) -> Result<EnsembleStats<T>>
where
    T: Real,
    F: Fn(usize, &mut ChaCha12Rng) -> SpectralField<T> + Sync,
{
    use rayon::prelude::*;
    config.validate()?;
    let p = model.constants.p;
    type PerPath<T> = (PathSummary<T>, Vec<[T; 4]>, Vec<T>);
    let per_path: Vec<PerPath<T>> = (0..config.n_paths)
        .into_par_iter()
        .map(|i| {
            let mut rng = path_rng(config.seed, i as u64);
            let mut rng0 = init_rng(config.seed, i as u64);
            let u0 = u0_of(i, &mut rng0);
            let traj =
                simulate_path(config, params, model, basis, &u0, &mut rng)
                    .expect("path simulation failed");
            let summary = PathSummary::from_trajectory(&traj, p);
            let mut fields = Vec::new();
            let mut times = Vec::new();
            for (r, k) in traj.records.iter().zip(&traj.kinds) {
                if *k == RecordKind::Grid {
                    fields.push([r.l2_sq, r.h1_sq, r.l2s2_pow, r.mixed]);
                    times.push(r.t);
                }
            }
            (summary, fields, times)
        })
        .collect();

    let times = per_path[0].2.clone();
    let n_times = times.len();
    for (_, fields, _) in &per_path {
        if fields.len() != n_times {
            return Err(CoreError::DimensionMismatch {
                context: "paths disagree on the grid record count".into(),
            });
        }
    }

    // order-fixed pairwise reduction of (sum, sum of squares)
    type Acc<T> = (Vec<[T; 4]>, Vec<[T; 4]>);
    let accs: Vec<Acc<T>> = per_path
        .iter()
        .map(|(_, fields, _)| {
            let sq = fields
                .iter()
                .map(|f| [f[0] * f[0], f[1] * f[1], f[2] * f[2], f[3] * f[3]])
                .collect::<Vec<_>>();
            (fields.clone(), sq)
        })
        .collect();
    let (sum, sum_sq) = tree_reduce(accs, |mut a, b| {
        for i in 0..n_times {
            for k in 0..4 {
                a.0[i][k] += b.0[i][k];
                a.1[i][k] += b.1[i][k];
            }
        }
        a
    })
    .expect("n_paths >= 1");

    let n = T::of(config.n_paths as f64);
    let mut mean = Vec::with_capacity(n_times);
    let mut var = Vec::with_capacity(n_times);
    for i in 0..n_times {
        let mut m = [T::zero(); 4];
        let mut v = [T::zero(); 4];
        for k in 0..4 {
            m[k] = sum[i][k] / n;
            let raw = (sum_sq[i][k] / n - m[k] * m[k]).max(T::zero());
            v[k] = if config.n_paths > 1 {
                raw * n / (n - T::one())
            } else {
                T::zero()
            };
        }
        mean.push(m);
        var.push(v);
    }
    let summaries: Vec<PathSummary<T>> = per_path.iter().map(|x| x.0).collect();
    let blowup_count = summaries.iter().filter(|s| s.blowup.is_some()).count();
    Ok(EnsembleStats {
        times,
        mean,
        var,
        summaries,
        blowup_count,
        n_paths: config.n_paths,
        p,
    })
}

/// Discrete residual of the squared-norm energy identity along a realized
/// path: every term (dissipation, gain, power sink, jump sums, the
/// compensated cross term, and the derivative-term pairing) is evaluated
/// from the retained states, and the maximum over record times of
/// `|lhs - rhs|` is returned, normalized by `sup_t ||u||^2`.
///
/// Needs `snap_every == 1` (a state at every record).
pub fn ito_energy_residual<T: Real>(
    traj: &Trajectory<T>,
    params: &GLParams<T>,
    model: &JumpModel<T>,
    basis: &SineBasis<T>,
) -> Result<T> {
    if traj.snap_every != 1 || traj.states.len() != traj.records.len() {
        return Err(CoreError::InsufficientSnapshots {
            context: format!(
                "energy residual needs snap_every = 1 ({} states for {} records)",
                traj.states.len(),
                traj.records.len()
            ),
        });
    }
    let n = traj.records.len();
    let two = T::of(2.0);
    // integrand of the compensated cross term and the derivative pairing
    // at each record
    let mut comp_pair = vec![T::zero(); n];
    let mut f_pair = vec![T::zero(); n];
    for (i, (idx, u)) in traj.states.iter().enumerate() {
        debug_assert_eq!(*idx, i);
        if !model.is_none() {
            let comp = compensator(model, traj.records[i].t, u, basis)?;
            comp_pair[i] = two * u.inner(&comp);
        }
        if traj.drift == DriftMode::Full {
            let f = ops::eval_f_projected(u, params, basis)?;
            f_pair[i] = two * u.inner(&f);
        }
    }

    let full = traj.drift == DriftMode::Full;
    let mut max_res = T::zero();
    let mut sup_l2 = traj.records[0].l2_sq;
    // running quadratures
    let mut int_h1 = T::zero();
    let mut int_l2 = T::zero();
    let mut int_pow = T::zero();
    let mut int_comp = T::zero();
    let mut int_f = T::zero();
    let mut jump_sq = T::zero();
    let mut jump_cross = T::zero();
    let l2_0 = traj.records[0].l2_sq;
    for i in 1..n {
        let r0 = &traj.records[i - 1];
        let r1 = &traj.records[i];
        let half_dt = (r1.t - r0.t) * T::of(0.5);
        if half_dt > T::zero() {
            int_h1 += (r0.h1_sq + r1.h1_sq) * half_dt;
            int_l2 += (r0.l2_sq + r1.l2_sq) * half_dt;
            int_pow += (r0.l2s2_pow + r1.l2s2_pow) * half_dt;
            int_comp += (comp_pair[i - 1] + comp_pair[i]) * half_dt;
            int_f += (f_pair[i - 1] + f_pair[i]) * half_dt;
        } else if traj.kinds[i] == RecordKind::PostJump {
            // realized jump: post - pre = P_n g at the left limit
            let pre = &traj.states[i - 1].1;
            let post = &traj.states[i].1;
            let diff = post.sub(pre);
            jump_sq += diff.l2_norm_sq();
            jump_cross += two * pre.inner(&diff);
        }
        let mut rhs = l2_0 - two * int_h1 + jump_sq + jump_cross - int_comp;
        if full {
            rhs += two * params.gamma * int_l2 - two * int_pow + int_f;
        }
        let res = (r1.l2_sq - rhs).abs();
        max_res = max_res.max(res);
        sup_l2 = sup_l2.max(r1.l2_sq);
    }
    if sup_l2 == T::zero() {
        return Ok(T::zero());
    }
    Ok(max_res / sup_l2)
}
