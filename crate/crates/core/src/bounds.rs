//! Elementary inequality machinery: Young splittings with explicit
//! constants and a rigorous 2-D Gagliardo-Nirenberg constant.
//!
//! The monotonicity estimates need every constant in closed form, so the
//! usual "for some C(eps)" steps are carried out here with the constants
//! written down. All functions are pure.

use crate::real::Real;

/// Two-factor Young splitting: for nonnegative `a, b` and `p > 1`,
///
/// `a * b <= eps * a^p + young2(eps, p) * b^q`,  `1/p + 1/q = 1`.
///
/// The constant is `q^{-1} (p eps)^{-q/p}`, obtained by absorbing the
/// weight into the classical inequality `ab <= a^p/p + b^q/q`.
pub fn young2<T: Real>(eps: T, p: T) -> T {
    let one = T::one();
    assert!(p > one && eps > T::zero(), "young2 needs p > 1, eps > 0");
    let q = p / (p - one);
    (p * eps).powf(-q / p) / q
}

/// Three-factor Young splitting: for nonnegative `a, b, c` and exponents
/// with `1/pa + 1/pb + 1/pc = 1`,
///
/// `a * b * c <= eps_a * a^pa + eps_b * b^pb + young3(...) * c^pc`.
pub fn young3<T: Real>(eps_a: T, pa: T, eps_b: T, pb: T, pc: T) -> T {
    let one = T::one();
    assert!(eps_a > T::zero() && eps_b > T::zero());
    debug_assert!(
        (one / pa + one / pb + one / pc - one).abs() < T::of(1e-9),
        "exponents must be Young-conjugate"
    );
    (pa * eps_a).powf(-pc / pa) * (pb * eps_b).powf(-pc / pb) / pc
}

/// Upper bound for the 2-D Gagliardo-Nirenberg constant `C(p)` in
///
/// `||v||_p <= C(p) ||v||_2^{2/p} ||grad v||_2^{1-2/p}`,  `p >= 2`,
///
/// valid for complex-valued `v` in `H_0^1` of a planar domain (extend by
/// zero to the plane). Built from the L1 Sobolev inequality
/// `||u||_2 <= (1/2) ||grad u||_1`, which gives the descent step
///
/// `||v||_q^q <= (q/4)^2 ||v||_{q-2}^{q-2} ||grad v||^2`,
///
/// iterated down to an exponent in `(2, 4]`, where interpolation against
/// `||v||_4 <= ||v||^{1/2} ||grad v||^{1/2}` closes with constant 1.
/// The bound is conservative by design; `tests` checks empirically that
/// it dominates the extremal ratio over band-limited fields.
pub fn gn_constant<T: Real>(p: T) -> T {
    let two = T::of(2.0);
    let four = T::of(4.0);
    assert!(p >= two, "gn_constant needs p >= 2");
    if p <= four {
        return T::one();
    }
    // log C(p)^p accumulates 2*log(q/4) over the descent q = p, p-2, ...
    let mut log_cp = T::zero();
    let mut q = p;
    while q > four {
        log_cp += two * (q / four).ln();
        q -= two;
    }
    (log_cp / p).exp()
}
