//! The model operators: linear part `A u = (1+i alpha) lap u`, power
//! nonlinearity `T(u) = -(1-i beta)|u|^{2 sigma} u`, derivative term
//! `F(u) = lambda1 . grad(|u|^2 u) + (lambda2 . grad u)|u|^2`, and the
//! projected drift `P_n G(u) = P_n(A u + T(u) + gamma u + F(u))`.
//!
//! `F` is evaluated from collocated gradients with the product rule
//! `grad(|u|^2 u) = 2|u|^2 grad u + u^2 grad conj(u)`; the alternative
//! single-expression form is kept alongside (including its uncorrected
//! variant, which drops the conjugation) so the route agreement is
//! checkable at runtime.

use ndarray::{Array2, Zip};
use num_complex::Complex;

use crate::error::{CoreError, Result};
use crate::params::GLParams;
use crate::real::Real;
use crate::spectral::{
    eigenvalue_grid, pow_sq, PhysicalGrid, SineBasis, SpectralField,
};

/// `lambda . v` for a complex coefficient 2-vector (no conjugation).
#[inline]
fn dot2<T: Real>(lambda: &[Complex<T>; 2], vx: Complex<T>, vy: Complex<T>) -> Complex<T> {
    lambda[0] * vx + lambda[1] * vy
}

/// Pointwise `T(z) = -(1 - i beta) |z|^{2 sigma} z`.
#[inline]
pub fn t_kernel<T: Real>(z: Complex<T>, sigma: T, beta: T) -> Complex<T> {
    let mag = pow_sq(z.norm_sqr(), sigma);
    -(Complex::new(T::one(), -beta)) * z * mag
}

/// The part of `F(z)` carried by one gradient component (`axis` selects
/// the lambda components): the two parts have definite reflection parity
/// along their axis, which the exact projection rule relies on.
#[inline]
fn f_axis_kernel<T: Real>(
    params: &GLParams<T>,
    axis: usize,
    z: Complex<T>,
    g: Complex<T>,
) -> Complex<T> {
    let two = T::of(2.0);
    let mag = z.norm_sqr();
    // the axis share of grad(|u|^2 u) = 2|u|^2 grad u + u^2 grad conj(u)
    let p = g * (two * mag) + z * z * g.conj();
    params.lambda1[axis] * p + params.lambda2[axis] * g * mag
}

/// Pointwise `F(z)` from the value and both gradient components.
#[inline]
pub fn f_kernel<T: Real>(
    params: &GLParams<T>,
    z: Complex<T>,
    gx: Complex<T>,
    gy: Complex<T>,
) -> Complex<T> {
    f_axis_kernel(params, 0, z, gx) + f_axis_kernel(params, 1, z, gy)
}

/// Which single-expression form of `F` to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IdentityVariant {
    /// `((2 l1 + l2) . grad u)|u|^2 + (l1 . grad conj(u)) u^2`, the
    /// product-rule-consistent form.
    Corrected,
    /// Same with `grad u` in place of `grad conj(u)` in the last term;
    /// wrong for genuinely complex fields and kept only so the
    /// discrepancy can be reported.
    AsPrinted,
}

#[inline]
fn f_identity_kernel<T: Real>(
    params: &GLParams<T>,
    variant: IdentityVariant,
    z: Complex<T>,
    gx: Complex<T>,
    gy: Complex<T>,
) -> Complex<T> {
    let two = Complex::new(T::of(2.0), T::zero());
    let l12 = [
        two * params.lambda1[0] + params.lambda2[0],
        two * params.lambda1[1] + params.lambda2[1],
    ];
    let mag = z.norm_sqr();
    let first = dot2(&l12, gx, gy) * mag;
    let second = match variant {
        IdentityVariant::Corrected => dot2(&params.lambda1, gx.conj(), gy.conj()),
        IdentityVariant::AsPrinted => dot2(&params.lambda1, gx, gy),
    };
    first + second * z * z
}

/// `A u`: coefficient `(j,k)` maps to `-(1 + i alpha) mu_{jk} a_{jk}`.
pub fn apply_a<T: Real>(u: &SpectralField<T>, params: &GLParams<T>) -> SpectralField<T> {
    let factor = Complex::new(T::one(), params.alpha);
    let mu = eigenvalue_grid(u.n1(), u.n2(), u.l1, u.l2);
    let mut out = u.clone();
    Zip::from(&mut out.coeffs).and(&mu).for_each(|a, m| {
        *a = -(factor * *a * *m);
    });
    out
}

fn map_values<T: Real, F>(grid: &PhysicalGrid<T>, f: F) -> PhysicalGrid<T>
where
    F: Fn(Complex<T>) -> Complex<T>,
{
    PhysicalGrid {
        values: grid.values.mapv(f),
        grad_x: None,
        grad_y: None,
        grad_x_walls: None,
        grad_y_walls: None,
        l1: grid.l1,
        l2: grid.l2,
    }
}

fn map_with_grad<T: Real, F>(grid: &PhysicalGrid<T>, f: F) -> Result<PhysicalGrid<T>>
where
    F: Fn(Complex<T>, Complex<T>, Complex<T>) -> Complex<T>,
{
    let gx = grid.grad_x.as_ref().ok_or(CoreError::MissingGradient)?;
    let gy = grid.grad_y.as_ref().ok_or(CoreError::MissingGradient)?;
    let mut values = Array2::zeros(grid.values.dim());
    Zip::from(&mut values)
        .and(&grid.values)
        .and(gx)
        .and(gy)
        .for_each(|o, v, x, y| *o = f(*v, *x, *y));
    Ok(PhysicalGrid {
        values,
        grad_x: None,
        grad_y: None,
        grad_x_walls: None,
        grad_y_walls: None,
        l1: grid.l1,
        l2: grid.l2,
    })
}

/// Pointwise `T(u)` on a collocation grid.
pub fn eval_t<T: Real>(grid: &PhysicalGrid<T>, params: &GLParams<T>) -> PhysicalGrid<T> {
    map_values(grid, |z| t_kernel(z, params.sigma, params.beta))
}

/// Pointwise `F(u)` via the product rule (needs gradient planes).
pub fn eval_f_direct<T: Real>(
    grid: &PhysicalGrid<T>,
    params: &GLParams<T>,
) -> Result<PhysicalGrid<T>> {
    map_with_grad(grid, |z, gx, gy| f_kernel(params, z, gx, gy))
}

/// Pointwise `F(u)` via the single-expression form.
pub fn eval_f_identity<T: Real>(
    grid: &PhysicalGrid<T>,
    params: &GLParams<T>,
    variant: IdentityVariant,
) -> Result<PhysicalGrid<T>> {
    map_with_grad(grid, |z, gx, gy| f_identity_kernel(params, variant, z, gx, gy))
}

/// Maximum pointwise discrepancies between the product-rule route and the
/// single-expression route, normalized by the largest `|F|` on the grid:
/// `(corrected, as_printed)`. Zero fields report `(0, 0)`.
pub fn derivative_identity_check<T: Real>(
    u: &SpectralField<T>,
    params: &GLParams<T>,
) -> Result<(T, T)> {
    let basis = SineBasis::padded(u.n1(), u.n2(), u.l1, u.l2, params.sigma);
    let grid = basis.synthesize(u, true)?;
    let direct = eval_f_direct(&grid, params)?;
    let corrected = eval_f_identity(&grid, params, IdentityVariant::Corrected)?;
    let printed = eval_f_identity(&grid, params, IdentityVariant::AsPrinted)?;
    let scale = direct
        .values
        .iter()
        .map(|z| z.norm())
        .fold(T::zero(), T::max);
    if scale == T::zero() {
        return Ok((T::zero(), T::zero()));
    }
    let max_diff = |other: &PhysicalGrid<T>| {
        Zip::from(&direct.values)
            .and(&other.values)
            .fold(T::zero(), |acc, a, b| acc.max((a - b).norm()))
    };
    Ok((max_diff(&corrected) / scale, max_diff(&printed) / scale))
}

/// The projected drift split into its four parts; `total` is their exact
/// coefficient-wise sum.
#[derive(Debug, Clone)]
pub struct DriftDecomposition<T: Real> {
    /// `(1 + i alpha) lap u` (spectral, exact).
    pub a_part: SpectralField<T>,
    /// `P_n T(u)` (dealiased grid, projected).
    pub t_part: SpectralField<T>,
    /// `gamma u` (spectral, exact).
    pub gamma_part: SpectralField<T>,
    /// `P_n F(u)` (dealiased grid, projected).
    pub f_part: SpectralField<T>,
    pub total: SpectralField<T>,
}

/// `P_n F(u)`: the derivative term projected with the parity-matched
/// rules, exact on dealiased grids.
fn project_f<T: Real>(
    grid: &PhysicalGrid<T>,
    params: &GLParams<T>,
    basis: &SineBasis<T>,
) -> Result<SpectralField<T>> {
    let gx = grid.grad_x.as_ref().ok_or(CoreError::MissingGradient)?;
    let gy = grid.grad_y.as_ref().ok_or(CoreError::MissingGradient)?;
    let mut plane_x = Array2::zeros(grid.values.dim());
    let mut plane_y = Array2::zeros(grid.values.dim());
    Zip::from(&mut plane_x)
        .and(&mut plane_y)
        .and(&grid.values)
        .and(gx)
        .and(gy)
        .for_each(|ox, oy, v, x, y| {
            *ox = f_axis_kernel(params, 0, *v, *x);
            *oy = f_axis_kernel(params, 1, *v, *y);
        });
    let mut f_part = basis.analyze_even_x(&plane_x)?;
    f_part.add_scaled(
        Complex::new(T::one(), T::zero()),
        &basis.analyze_even_y(&plane_y)?,
    );
    Ok(f_part)
}

/// Evaluates `P_n G(u)` on the given dealiased basis, split into parts.
pub fn eval_g<T: Real>(
    u: &SpectralField<T>,
    params: &GLParams<T>,
    basis: &SineBasis<T>,
) -> Result<DriftDecomposition<T>> {
    basis.check_dealias(params.sigma)?;
    let a_part = apply_a(u, params);
    let gamma_part = u.scaled(Complex::new(params.gamma, T::zero()));
    let grid = basis.synthesize(u, true)?;
    let t_part = basis.analyze(&eval_t(&grid, params))?;
    let f_part = project_f(&grid, params, basis)?;
    let mut total = a_part.clone();
    let one = Complex::new(T::one(), T::zero());
    total.add_scaled(one, &t_part);
    total.add_scaled(one, &gamma_part);
    total.add_scaled(one, &f_part);
    Ok(DriftDecomposition {
        a_part,
        t_part,
        gamma_part,
        f_part,
        total,
    })
}

/// Evaluation of the projected nonlinear drift
/// `P_n(T(u) + F(u)) + gamma u`, the quantity the time stepper needs
/// between jumps. Identical in value to summing the parts of [`eval_g`]
/// without the `A` term.
pub fn eval_b_projected<T: Real>(
    u: &SpectralField<T>,
    params: &GLParams<T>,
    basis: &SineBasis<T>,
) -> Result<SpectralField<T>> {
    basis.check_dealias(params.sigma)?;
    let grid = basis.synthesize(u, true)?;
    eval_b_from_grid(u, &grid, params, basis)
}

/// [`eval_b_projected`] with an already synthesized grid (hot path of the
/// time stepper, which records energies off the same grid).
pub fn eval_b_from_grid<T: Real>(
    u: &SpectralField<T>,
    grid: &PhysicalGrid<T>,
    params: &GLParams<T>,
    basis: &SineBasis<T>,
) -> Result<SpectralField<T>> {
    let mut out = basis.analyze(&eval_t(grid, params))?;
    out.add_scaled(
        Complex::new(T::one(), T::zero()),
        &project_f(grid, params, basis)?,
    );
    out.add_scaled(Complex::new(params.gamma, T::zero()), u);
    Ok(out)
}

/// `P_n F(u)` alone (used by the energy-identity residual).
pub fn eval_f_projected<T: Real>(
    u: &SpectralField<T>,
    params: &GLParams<T>,
    basis: &SineBasis<T>,
) -> Result<SpectralField<T>> {
    let grid = basis.synthesize(u, true)?;
    project_f(&grid, params, basis)
}
