//! Monte-Carlo energy statistics: the ensemble averages whose uniform
//! boundedness in the truncation level is the quantitative content of the
//! a-priori estimates, reported as empirical ratios against the initial
//! energy scale.

use rand_chacha::ChaCha12Rng;

use crate::error::{CoreError, Result};
use crate::integrator::{moments_of, simulate_ensemble, EnsembleStats};
use crate::noise::JumpModel;
use crate::params::{GLParams, SimConfig};
use crate::real::Real;
use crate::spectral::{SineBasis, SpectralField};

/// Which energy aggregate a statistic reports.
///
/// * `L31`: `sup_t ||u||^2 + int ||grad u||^2 + int ||u||_{2s+2}^{2s+2}`
///   against `E ||u_0||^2 + 1`.
/// * `L32`: `sup_t ||grad u||^2 + int ||lap u||^2 + int int |u|^{2s}|grad u|^2`
///   against `E ||grad u_0||^2 + 1`.
/// * `L33`: the `p`-th moment analogue of `L32` against
///   `E ||grad u_0||^p + 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LemmaId {
    L31,
    L32,
    L33,
}

impl LemmaId {
    pub fn label(&self) -> &'static str {
        match self {
            LemmaId::L31 => "L31",
            LemmaId::L32 => "L32",
            LemmaId::L33 => "L33",
        }
    }
}

/// Monte-Carlo estimate of one energy aggregate with its scale ratio.
#[derive(Debug, Clone, Copy)]
pub struct LemmaStatistic<T: Real> {
    pub lemma: LemmaId,
    /// MC mean of the per-path aggregate.
    pub value: T,
    pub se: T,
    pub n_modes: (usize, usize),
    /// `E||u_0||^2 + 1` (L31) or the gradient analogues.
    pub rhs_scale: T,
    /// `value / rhs_scale`: the empirical stand-in for the unobservable
    /// constant in the bound.
    pub ratio: T,
}

fn statistic<T: Real, F: Fn(usize) -> T, G: Fn(usize) -> T>(
    stats: &EnsembleStats<T>,
    lemma: LemmaId,
    n_modes: (usize, usize),
    per_path: F,
    init_scale: G,
) -> Result<LemmaStatistic<T>> {
    if stats.summaries.is_empty() {
        return Err(CoreError::EmptySample {
            context: "statistic over an empty ensemble".into(),
        });
    }
    let values: Vec<T> = (0..stats.summaries.len()).map(per_path).collect();
    let m = moments_of(&values);
    let inits: Vec<T> = (0..stats.summaries.len()).map(init_scale).collect();
    let rhs_scale = moments_of(&inits).mean + T::one();
    Ok(LemmaStatistic {
        lemma,
        value: m.mean,
        se: m.se,
        n_modes,
        rhs_scale,
        ratio: m.mean / rhs_scale,
    })
}

/// Mean-square energy aggregate (`L31`).
pub fn energy_l2_statistic<T: Real>(
    stats: &EnsembleStats<T>,
    n_modes: (usize, usize),
) -> Result<LemmaStatistic<T>> {
    statistic(
        stats,
        LemmaId::L31,
        n_modes,
        |i| {
            let s = &stats.summaries[i];
            s.sup_l2_sq + s.int_h1_sq + s.int_l2s2
        },
        |i| stats.summaries[i].init_l2_sq,
    )
}

/// Gradient-level energy aggregate (`L32`).
pub fn energy_h1_statistic<T: Real>(
    stats: &EnsembleStats<T>,
    n_modes: (usize, usize),
) -> Result<LemmaStatistic<T>> {
    statistic(
        stats,
        LemmaId::L32,
        n_modes,
        |i| {
            let s = &stats.summaries[i];
            s.sup_h1_sq + s.int_h2_sq + s.int_mixed
        },
        |i| stats.summaries[i].init_h1_sq,
    )
}

/// `p`-th-moment gradient aggregate (`L33`); reduces exactly to the
/// gradient-level statistic at `p = 2`.
pub fn energy_moment_statistic<T: Real>(
    stats: &EnsembleStats<T>,
    n_modes: (usize, usize),
    p: T,
    sigma: T,
) -> Result<LemmaStatistic<T>> {
    if !(p >= T::of(2.0) && p < T::of(2.0) * sigma) {
        return Err(CoreError::MomentOrder {
            p: p.as_f64(),
            sigma: sigma.as_f64(),
        });
    }
    // p = 2 weights are trivial, so that order is always available;
    // otherwise the weighted path integrals must have been accumulated
    // with this p.
    let two = T::of(2.0);
    if p != two && p != stats.p {
        return Err(CoreError::Config(format!(
            "ensemble accumulated moment order p = {} but p = {} was requested",
            stats.p, p
        )));
    }
    let half_p = p * T::of(0.5);
    statistic(
        stats,
        LemmaId::L33,
        n_modes,
        |i| {
            let s = &stats.summaries[i];
            if p == two {
                s.sup_h1_sq + s.int_h2_sq + s.int_mixed
            } else {
                s.sup_h1_sq.powf(half_p) + s.int_gradp2_h2 + s.int_gradp2_mixed
            }
        },
        |i| stats.summaries[i].init_h1_sq.powf(half_p),
    )
}

/// One row of the truncation scan.
#[derive(Debug, Clone, Copy)]
pub struct UniformityRow<T: Real> {
    pub n: usize,
    pub l31: LemmaStatistic<T>,
    pub l32: LemmaStatistic<T>,
    pub l33: LemmaStatistic<T>,
}

/// Runs the ensemble at each truncation level with the same master seed
/// (identical jump realizations per path index) and tabulates the three
/// statistics. Boundedness of the ratio columns across `n` is the
/// acceptance property; monotonicity is not claimed.
pub fn uniformity_scan<T, F>(
    base: &SimConfig<T>,
    params: &GLParams<T>,
    model: &JumpModel<T>,
    levels: &[usize],
    u0_of: F,
) -> Result<Vec<UniformityRow<T>>>
where
    T: Real,
    F: Fn(usize, usize, &mut ChaCha12Rng) -> SpectralField<T> + Sync,
{
    let mut rows = Vec::with_capacity(levels.len());
    for &n in levels {
        let config = SimConfig {
            n1: n,
            n2: n,
            ..*base
        };
        let basis = SineBasis::padded(n, n, params.l1, params.l2, params.sigma);
        let stats = simulate_ensemble(&config, params, model, &basis, |i, rng| {
            u0_of(n, i, rng)
        })?;
        rows.push(UniformityRow {
            n,
            l31: energy_l2_statistic(&stats, (n, n))?,
            l32: energy_h1_statistic(&stats, (n, n))?,
            l33: energy_moment_statistic(
                &stats,
                (n, n),
                model.constants.p,
                params.sigma,
            )?,
        });
    }
    Ok(rows)
}

/// `max ratio / min ratio` over the scan rows for one statistic column.
pub fn ratio_spread<T: Real, F: Fn(&UniformityRow<T>) -> T>(
    rows: &[UniformityRow<T>],
    column: F,
) -> T {
    let mut lo = T::infinity();
    let mut hi = T::zero();
    for row in rows {
        let r = column(row);
        lo = lo.min(r);
        hi = hi.max(r);
    }
    if lo == T::zero() {
        if hi == T::zero() {
            T::one()
        } else {
            T::infinity()
        }
    } else {
        hi / lo
    }
}
