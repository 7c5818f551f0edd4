//! Model parameters, noise constants, simulation configuration, and the
//! derived small-parameter data used by the monotonicity checks.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::bounds::{gn_constant, young2, young3};
use crate::real::Real;

/// Placeholder for the first-moment Burkholder-Davis-Gundy constant used
/// by the advisory `k2`-smallness flag. The true constant is not pinned
/// down by the estimates we verify; 2.0 is a conservative stand-in and the
/// flag is advisory only.
pub const BDG_C1_PLACEHOLDER: f64 = 2.0;

/// Physical constants of the generalized Ginzburg-Landau drift
///
/// `du = ((1+i alpha) lap u - (1-i beta)|u|^{2 sigma} u + gamma u + F(u)) dt + noise`
///
/// on the rectangle `(0, L1) x (0, L2)` with Dirichlet boundary, where
/// `F(u) = lambda1 . grad(|u|^2 u) + (lambda2 . grad u)|u|^2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GLParams<T: Real> {
    /// Linear dispersion.
    pub alpha: T,
    /// Nonlinear dispersion; the well-posedness regime needs
    /// `0 < |beta| < sqrt(2 sigma + 1)/sigma`.
    pub beta: T,
    /// Linear gain, `gamma > 0`.
    pub gamma: T,
    /// Nonlinearity exponent. Integer `sigma` keeps the nonlinearity
    /// polynomial so padded evaluation is alias-free; the default is 3.
    pub sigma: T,
    /// Complex 2-vector multiplying `grad(|u|^2 u)`.
    pub lambda1: [Complex<T>; 2],
    /// Complex 2-vector multiplying `(grad u) |u|^2`.
    pub lambda2: [Complex<T>; 2],
    /// Rectangle side lengths.
    pub l1: T,
    pub l2: T,
}

impl<T: Real> GLParams<T> {
    /// Threshold `sqrt(2 sigma + 1)/sigma` for the admissible `|beta|`.
    pub fn beta_threshold(sigma: T) -> T {
        (T::of(2.0) * sigma + T::one()).sqrt() / sigma
    }

    /// `|beta|` lies strictly inside `(0, sqrt(2 sigma + 1)/sigma)`.
    pub fn beta_in_regime(&self) -> bool {
        let b = self.beta.abs();
        b > T::zero() && b < Self::beta_threshold(self.sigma)
    }

    /// Euclidean magnitude of a coefficient 2-vector.
    pub fn vec_norm(v: &[Complex<T>; 2]) -> T {
        (v[0].norm_sqr() + v[1].norm_sqr()).sqrt()
    }

    /// Basic positivity constraints that make the model meaningful at all.
    /// Regime conditions (e.g. `sigma > 2`) are reported, not enforced, so
    /// the inequality lab can probe both sides of each threshold.
    pub fn validate(&self) -> crate::error::Result<()> {
        let bad = |msg: &str| {
            Err(crate::error::CoreError::Config(msg.to_string()))
        };
        if !(self.gamma > T::zero()) {
            return bad("gamma must be > 0");
        }
        if !(self.sigma > T::zero()) {
            return bad("sigma must be > 0");
        }
        if !(self.l1 > T::zero() && self.l2 > T::zero()) {
            return bad("L1 and L2 must be > 0");
        }
        Ok(())
    }
}

impl<T: Real> Default for GLParams<T> {
    fn default() -> Self {
        let c = |re: f64, im: f64| Complex::new(T::of(re), T::of(im));
        GLParams {
            alpha: T::of(0.5),
            beta: T::of(0.4),
            gamma: T::of(0.5),
            sigma: T::of(3.0),
            lambda1: [c(0.02, 0.01), c(-0.01, 0.005)],
            lambda2: [c(0.01, -0.02), c(0.005, 0.01)],
            l1: T::PI(),
            l2: T::PI(),
        }
    }
}

/// Growth and Lipschitz constants of the jump coefficient, plus the moment
/// order `p` used by the p-th-moment energy statistic.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseConstants<T: Real> {
    pub k1: T,
    pub k2: T,
    pub k3: T,
    pub k4: T,
    /// Moment order, `2 <= p < 2 sigma`.
    pub p: T,
}

impl<T: Real> NoiseConstants<T> {
    /// Noiseless model: all constants zero, default moment order 4.
    pub fn zero() -> Self {
        NoiseConstants {
            k1: T::zero(),
            k2: T::zero(),
            k3: T::zero(),
            k4: T::zero(),
            p: T::of(4.0),
        }
    }

    /// Advisory smallness flag for `k2`: `k2 < 3 / (2 (2 C1^2 + 1))` with
    /// the placeholder BDG constant. See [`BDG_C1_PLACEHOLDER`].
    pub fn k2_small(&self) -> bool {
        let c1 = T::of(BDG_C1_PLACEHOLDER);
        self.k2 < T::of(3.0) / (T::of(2.0) * (T::of(2.0) * c1 * c1 + T::one()))
    }

    /// `k4 < 2 - 2 eps_tilde`, the gradient-term budget of the contraction
    /// inequality.
    pub fn k4_small(&self, eps_tilde: T) -> bool {
        self.k4 < T::of(2.0) - T::of(2.0) * eps_tilde
    }

    pub fn p_in_range(&self, sigma: T) -> bool {
        self.p >= T::of(2.0) && self.p < T::of(2.0) * sigma
    }
}

/// Which part of the drift the integrator applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DriftMode {
    /// `A + B`: the full model.
    Full,
    /// `A` only; the closed-form reference for the linear problem.
    LinearOnly,
}

/// Truncation, time stepping, and ensemble controls.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimConfig<T: Real> {
    /// Retained modes per axis.
    pub n1: usize,
    pub n2: usize,
    /// Time step of the uniform grid (jump times are handled exactly).
    pub dt: T,
    /// Horizon.
    pub t_end: T,
    /// Blow-up radius: the path freezes once `||u||^2` reaches it.
    pub blowup_radius: T,
    /// Master seed; path `i` uses stream `i` of a counter-based generator.
    pub seed: u64,
    /// Ensemble size.
    pub n_paths: usize,
    /// Full state snapshots every this many grid steps; 1 retains every
    /// step (required by the energy-identity residual), 0 disables
    /// snapshots except the endpoints.
    pub snap_every: usize,
    pub drift: DriftMode,
}

impl<T: Real> SimConfig<T> {
    pub fn validate(&self) -> crate::error::Result<()> {
        let bad = |msg: &str| Err(crate::error::CoreError::Config(msg.to_string()));
        if !(self.dt > T::zero()) {
            return bad("dt must be > 0");
        }
        if !(self.dt < self.t_end) {
            return bad("dt must be < t_end");
        }
        if self.n1 == 0 || self.n2 == 0 {
            return bad("n1 and n2 must be >= 1");
        }
        if !(self.blowup_radius > T::zero()) {
            return bad("blowup_radius must be > 0");
        }
        if self.n_paths == 0 {
            return bad("n_paths must be >= 1");
        }
        Ok(())
    }
}

impl<T: Real> Default for SimConfig<T> {
    fn default() -> Self {
        SimConfig {
            n1: 8,
            n2: 8,
            dt: T::of(1e-3),
            t_end: T::of(1.0),
            blowup_radius: T::of(1e6),
            seed: 1,
            n_paths: 1,
            snap_every: 0,
            drift: DriftMode::Full,
        }
    }
}

/// Pure report of the well-posedness hypotheses; out-of-regime parameters
/// are reported, never rejected.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegimeReport {
    /// `0 < |beta| < sqrt(2 sigma + 1)/sigma`.
    pub beta_ok: bool,
    /// `sigma > 2`.
    pub sigma_ok: bool,
    /// `2 <= p < 2 sigma`.
    pub p_ok: bool,
    /// Advisory `k2`-smallness flag (placeholder BDG constant).
    pub k_small_ok: bool,
}

impl RegimeReport {
    pub fn all_ok(&self) -> bool {
        self.beta_ok && self.sigma_ok && self.p_ok && self.k_small_ok
    }
}

/// Checks each strict inequality of the well-posedness hypotheses.
pub fn validate_regime<T: Real>(
    params: &GLParams<T>,
    noise: &NoiseConstants<T>,
) -> RegimeReport {
    RegimeReport {
        beta_ok: params.beta_in_regime(),
        sigma_ok: params.sigma > T::of(2.0),
        p_ok: noise.p_in_range(params.sigma),
        k_small_ok: noise.k2_small(),
    }
}

/// Coefficients of the `||w||^2` bracket in the derivative-pairing bound:
///
/// `Re J <= eps_tilde ||grad w||^2 + eps_hat ||w||_{2s+2}^{2s+2}
///          + bracket(phi) ||w||^2`
///
/// with `bracket(phi) = c_const + c_l2 ||phi||^2
/// + c_1011 ||grad phi||^{2s/(s-1)} + c_1213 ||grad phi||^{(7s-2)/(s+1)}
/// + c_1415 ||grad phi||^{(10s+4)/(s+4)}`. Every coefficient is derived,
/// never chosen: the Holder/Gagliardo-Nirenberg/Young chain is tracked
/// with explicit constants in [`BracketCoeffs::derive`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BracketCoeffs<T: Real> {
    pub c_const: T,
    pub c_l2: T,
    pub c_1011: T,
    pub c_1213: T,
    pub c_1415: T,
    /// Exponent `2 sigma / (sigma - 1)`.
    pub e_1011: T,
    /// Exponent `(7 sigma - 2) / (sigma + 1)`.
    pub e_1213: T,
    /// Exponent `(10 sigma + 4) / (sigma + 4)`.
    pub e_1415: T,
}

impl<T: Real> BracketCoeffs<T> {
    /// Tracks the four-term estimate of the derivative pairing.
    ///
    /// With `w = u - phi` and a coefficient vector of magnitude
    /// `c_lambda`, the pairing is bounded by
    /// `c_lambda (2 J1 + J2 + 2 J3 + 2 J4)` with
    /// `J1 = int |w|^3 |grad w|`, `J2 = int |w|^3 |grad phi|`,
    /// `J3 = int |w|^2 |phi| |grad phi|`, `J4 = int |w| |grad w| |phi|^2`,
    /// and each piece is split by Cauchy-Schwarz/Holder, the 2-D
    /// Gagliardo-Nirenberg bound of [`gn_constant`], and weighted Young
    /// inequalities with the small parameters `eps[0..8] = eps_8..eps_15`.
    pub fn derive(sigma: T, c_lambda: T, eps: &[T; 8]) -> Self {
        let one = T::one();
        let two = T::of(2.0);
        assert!(sigma > two, "bracket derivation needs sigma > 2");
        for e in eps {
            assert!(*e > T::zero(), "all eps must be > 0");
        }
        let [e8, e9, e10, e11, e12, e13, e14, e15] = *eps;

        // J1: c1 J1 <= c1 ||grad w|| ||w||_6^3
        //           <= e8 ||grad w||^2 + (c1^2 / 4 e8) ||w||_6^6,
        // then ||w||_6^6 = (||w||_{2s+2}^{6 th})(||w||^{6(1-th)}) with
        // th = (2s+2)/(3s) splits at exponent r = s/2.
        let c1 = two * c_lambda;
        let a = c1 * c1 / (T::of(4.0) * e8);
        let r = sigma / two;
        let c_const = a * young2(e9 / a, r);

        // J2: c2 J2 <= c2 C6^{3/2} ||grad w||
        //              ||w||_{2s+2}^{(s+1)/s} (||w||^{(s-1)/s} ||grad phi||)
        // three-factor Young at (2, 2s, 2s/(s-1)).
        let c6: T = gn_constant(T::of(6.0));
        let k2p = c_lambda * c6.powf(T::of(1.5));
        let e_1011 = two * sigma / (sigma - one);
        let c_1011 =
            young3(e10, two, e11, two * sigma, e_1011) * k2p.powf(e_1011);

        // J3: c3 J3 <= k3' ||grad w||^{(5s-4)/(4s-2)}
        //      ||w||^{3s/(4s-2)} ||phi||^{(s-2)/(4s-2)}
        //      ||grad phi||^{(7s-2)/(4s-2)}
        // with k3' = 2 c_lambda C((8s-4)/(s-2)) C((16s-8)/(3s))^2.
        let four = T::of(4.0);
        let k3p = two
            * c_lambda
            * gn_constant((T::of(8.0) * sigma - four) / (sigma - two))
            * gn_constant((T::of(16.0) * sigma - T::of(8.0)) / (T::of(3.0) * sigma))
                .powi(2);
        // first Young: exponent pair (p, p') on the grad-w factor
        let p3 = (T::of(8.0) * sigma - four) / (T::of(5.0) * sigma - four);
        let p3c = (T::of(8.0) * sigma - four) / (T::of(3.0) * sigma);
        let b3 = young2(e12, p3) * k3p.powf(p3c);
        // second Young: pull eps_13 ||phi||^2 out
        let q3 = T::of(3.0) * sigma / (sigma - two);
        let q3c = T::of(3.0) * sigma / (two * sigma + two);
        let e_1213 = (T::of(7.0) * sigma - two) / (sigma + one);
        let c_1213 = young2(e13, q3) * b3.powf(q3c);

        // J4: c4 J4 <= k4' ||grad w||^{(4s-2)/(3s)}
        //      ||w||^{(2s+2)/(3s)} ||phi||^{(s-2)/(3s)}
        //      ||grad phi||^{(5s+2)/(3s)}
        // with k4' = 2 c_lambda C(3s/(s+1)) C(12s/(s-2))^2.
        let k4p = two
            * c_lambda
            * gn_constant(T::of(3.0) * sigma / (sigma + one))
            * gn_constant(T::of(12.0) * sigma / (sigma - two)).powi(2);
        let p4 = T::of(3.0) * sigma / (two * sigma - one);
        let p4c = T::of(3.0) * sigma / (sigma + one);
        let b4 = young2(e14, p4) * k4p.powf(p4c);
        let q4 = two * (sigma + one) / (sigma - two);
        let q4c = two * (sigma + one) / (sigma + four);
        let e_1415 = (T::of(10.0) * sigma + four) / (sigma + four);
        let c_1415 = young2(e15, q4) * b4.powf(q4c);

        BracketCoeffs {
            c_const,
            c_l2: e13 + e15,
            c_1011,
            c_1213,
            c_1415,
            e_1011,
            e_1213,
            e_1415,
        }
    }

    /// Evaluates the bracket at given `||phi||^2` and `||grad phi||^2`.
    pub fn eval(&self, phi_l2_sq: T, phi_h1_sq: T) -> T {
        let g = phi_h1_sq.sqrt();
        self.c_const
            + self.c_l2 * phi_l2_sq
            + self.c_1011 * g.powf(self.e_1011)
            + self.c_1213 * g.powf(self.e_1213)
            + self.c_1415 * g.powf(self.e_1415)
    }
}

/// Small parameters of the monotonicity argument together with every
/// constant derived from them. `young_j` bounds the pairing of the
/// `grad(|u|^2 u)`-type term alone, `young_k` the conjugate-gradient
/// pairing alone; `young_jk` bounds their sum and is what the contraction
/// weight uses.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonotonicityConfig<T: Real> {
    /// `eps_8 .. eps_15` in order.
    pub eps: [T; 8],
    /// `eps_8 + eps_10 + eps_12 + eps_14`.
    pub eps_tilde: T,
    /// `eps_9 + eps_11`.
    pub eps_hat: T,
    /// `K = -(1 - sigma |beta| / sqrt(2 sigma + 1)) 2^{-2 sigma} + eps_hat`.
    pub k_coercive: T,
    pub young_j: BracketCoeffs<T>,
    pub young_k: BracketCoeffs<T>,
    pub young_jk: BracketCoeffs<T>,
}

impl<T: Real> MonotonicityConfig<T> {
    /// Derives all constants for the given model and small parameters.
    pub fn derive(params: &GLParams<T>, eps: [T; 8]) -> Self {
        let eps_tilde = eps[0] + eps[2] + eps[4] + eps[6];
        let eps_hat = eps[1] + eps[3];
        let c_j = GLParams::vec_norm(&two_l1_plus_l2(params));
        let c_k = GLParams::vec_norm(&params.lambda1);
        MonotonicityConfig {
            eps,
            eps_tilde,
            eps_hat,
            k_coercive: -coercivity_margin(params.sigma, params.beta) + eps_hat,
            young_j: BracketCoeffs::derive(params.sigma, c_j, &eps),
            young_k: BracketCoeffs::derive(params.sigma, c_k, &eps),
            young_jk: BracketCoeffs::derive(params.sigma, c_j + c_k, &eps),
        }
    }

    /// Picks valid small parameters automatically: the gradient budget is
    /// split so `2 eps_tilde + k4 < 2`, and `eps_hat` takes half of the
    /// coercivity margin so `K < 0` whenever `beta` is inside the regime.
    pub fn auto(params: &GLParams<T>, noise: &NoiseConstants<T>) -> Self {
        let margin = coercivity_margin(params.sigma, params.beta);
        let hat_each = if margin > T::zero() {
            margin / T::of(4.0)
        } else {
            T::of(1e-4)
        };
        let k4 = noise.k4.min(T::of(1.9));
        let tilde_each = (T::of(2.0) - k4) * T::of(0.05);
        let e_phi = T::of(0.05);
        MonotonicityConfig::derive(
            params,
            [
                tilde_each, hat_each, tilde_each, hat_each, tilde_each, e_phi,
                tilde_each, e_phi,
            ],
        )
    }

    /// Both contraction flags: `K < 0` and `-2 + 2 eps_tilde + k4 < 0`.
    pub fn contraction_valid(&self, k4: T) -> bool {
        self.k_coercive < T::zero()
            && T::of(-2.0) + T::of(2.0) * self.eps_tilde + k4 < T::zero()
    }

    /// Integrand of the contraction weight `r(t)` at given `phi` norms:
    /// `2 (gamma + bracket_jk(phi)) + k3`.
    pub fn r_integrand(&self, gamma: T, k3: T, phi_l2_sq: T, phi_h1_sq: T) -> T {
        T::of(2.0) * (gamma + self.young_jk.eval(phi_l2_sq, phi_h1_sq)) + k3
    }
}

/// `(1 - sigma |beta| / sqrt(2 sigma + 1)) 2^{-2 sigma}`, the coefficient
/// in front of `||u - phi||_{2s+2}^{2s+2}` in the nonlinear-pairing bound.
/// Positive exactly when `|beta|` is inside the regime threshold.
pub fn coercivity_margin<T: Real>(sigma: T, beta: T) -> T {
    let two = T::of(2.0);
    (T::one() - sigma * beta.abs() / (two * sigma + T::one()).sqrt())
        * two.powf(-two * sigma)
}

fn two_l1_plus_l2<T: Real>(params: &GLParams<T>) -> [Complex<T>; 2] {
    let two = Complex::new(T::of(2.0), T::zero());
    [
        two * params.lambda1[0] + params.lambda2[0],
        two * params.lambda1[1] + params.lambda2[1],
    ]
}
