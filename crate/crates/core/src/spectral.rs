//! Dirichlet sine eigenbasis on the rectangle `(0, L1) x (0, L2)`:
//! spectral coefficients, collocation grids, separable transforms, and
//! exact norm computations.
//!
//! The basis functions are
//! `e_{jk}(x, y) = 2 / sqrt(L1 L2) * sin(j pi x / L1) * sin(k pi y / L2)`,
//! orthonormal in `L^2`, with `-lap e_{jk} = mu_{jk} e_{jk}` and
//! `mu_{jk} = (j pi / L1)^2 + (k pi / L2)^2`.
//!
//! Transforms are evaluated as separable matrix products against
//! precomputed sine/cosine tables (exact on band-limited data, fast at
//! desk scale); `direct` holds the brute-force summation used as the
//! correctness oracle.

use ndarray::{Array1, Array2, Zip};
use num_complex::Complex;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{CoreError, Result};
use crate::params::GLParams;
use crate::real::Real;

/// `x^{2h}` given `x^2`, with an integer fast path for half-integer
/// exponent products such as `|u|^{2 sigma}` at integer `sigma`.
#[inline]
pub(crate) fn pow_sq<T: Real>(x_sq: T, half_exp: T) -> T {
    let rounded = half_exp.round();
    if (half_exp - rounded).abs() < T::of(1e-12) && rounded >= T::zero() {
        let k = rounded.as_f64() as i32;
        if k <= 64 {
            return x_sq.powi(k);
        }
    }
    x_sq.powf(half_exp)
}

/// Dirichlet Laplacian eigenvalue `mu_{jk}` (1-based mode indices).
pub fn laplacian_eigenvalue<T: Real>(j: usize, k: usize, params: &GLParams<T>) -> T {
    assert!(j >= 1 && k >= 1, "mode indices are 1-based");
    let fj = T::of(j as f64) * T::PI() / params.l1;
    let fk = T::of(k as f64) * T::PI() / params.l2;
    fj * fj + fk * fk
}

/// Eigenvalue table `mu[j-1][k-1]` for modes up to `(n1, n2)`.
pub fn eigenvalue_grid<T: Real>(n1: usize, n2: usize, l1: T, l2: T) -> Array2<T> {
    let mut mu = Array2::zeros((n1, n2));
    for j in 1..=n1 {
        for k in 1..=n2 {
            let fj = T::of(j as f64) * T::PI() / l1;
            let fk = T::of(k as f64) * T::PI() / l2;
            mu[[j - 1, k - 1]] = fj * fj + fk * fk;
        }
    }
    mu
}

/// Spectral state: complex coefficients against the orthonormal sine basis.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField<T: Real> {
    /// `coeffs[[j-1, k-1]]` multiplies `e_{jk}`.
    pub coeffs: Array2<Complex<T>>,
    pub l1: T,
    pub l2: T,
}

impl<T: Real> SpectralField<T> {
    pub fn zeros(n1: usize, n2: usize, l1: T, l2: T) -> Self {
        SpectralField {
            coeffs: Array2::zeros((n1, n2)),
            l1,
            l2,
        }
    }

    pub fn from_coeffs(coeffs: Array2<Complex<T>>, l1: T, l2: T) -> Self {
        SpectralField { coeffs, l1, l2 }
    }

    /// Single basis mode `amplitude * e_{jk}` (1-based indices).
    pub fn mode(n1: usize, n2: usize, l1: T, l2: T, j: usize, k: usize, amplitude: Complex<T>) -> Self {
        let mut f = Self::zeros(n1, n2, l1, l2);
        f.coeffs[[j - 1, k - 1]] = amplitude;
        f
    }

    pub fn n1(&self) -> usize {
        self.coeffs.nrows()
    }

    pub fn n2(&self) -> usize {
        self.coeffs.ncols()
    }

    /// `(||u||^2, ||grad u||^2)` by Parseval.
    pub fn norms(&self) -> (T, T) {
        let mut l2 = T::zero();
        let mut h1 = T::zero();
        for j in 1..=self.n1() {
            let fj = T::of(j as f64) * T::PI() / self.l1;
            for k in 1..=self.n2() {
                let fk = T::of(k as f64) * T::PI() / self.l2;
                let a = self.coeffs[[j - 1, k - 1]].norm_sqr();
                l2 += a;
                h1 += (fj * fj + fk * fk) * a;
            }
        }
        (l2, h1)
    }

    pub fn l2_norm_sq(&self) -> T {
        self.coeffs.iter().map(|z| z.norm_sqr()).sum()
    }

    /// `||lap u||^2 = sum mu^2 |a|^2`.
    pub fn h2_norm_sq(&self) -> T {
        let mut acc = T::zero();
        for j in 1..=self.n1() {
            let fj = T::of(j as f64) * T::PI() / self.l1;
            for k in 1..=self.n2() {
                let fk = T::of(k as f64) * T::PI() / self.l2;
                let mu = fj * fj + fk * fk;
                acc += mu * mu * self.coeffs[[j - 1, k - 1]].norm_sqr();
            }
        }
        acc
    }

    /// Real `L^2` inner product `Re sum a conj(b)`.
    pub fn inner(&self, other: &Self) -> T {
        debug_assert_eq!(self.coeffs.dim(), other.coeffs.dim());
        let mut acc = T::zero();
        Zip::from(&self.coeffs).and(&other.coeffs).for_each(|a, b| {
            acc += (a * b.conj()).re;
        });
        acc
    }

    pub fn scale(&mut self, c: Complex<T>) {
        self.coeffs.mapv_inplace(|z| z * c);
    }

    pub fn scaled(&self, c: Complex<T>) -> Self {
        let mut out = self.clone();
        out.scale(c);
        out
    }

    /// `self += c * other`.
    pub fn add_scaled(&mut self, c: Complex<T>, other: &Self) {
        debug_assert_eq!(self.coeffs.dim(), other.coeffs.dim());
        Zip::from(&mut self.coeffs)
            .and(&other.coeffs)
            .for_each(|a, b| *a += c * b);
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.add_scaled(Complex::new(-T::one(), T::zero()), other);
        out
    }

    /// `||self - other||^2` over the union of mode ranges (missing modes
    /// count as zero), so truncations at different levels are comparable.
    pub fn diff_norm_sq(&self, other: &Self) -> T {
        let n1 = self.n1().max(other.n1());
        let n2 = self.n2().max(other.n2());
        let mut acc = T::zero();
        for j in 0..n1 {
            for k in 0..n2 {
                let a = if j < self.n1() && k < self.n2() {
                    self.coeffs[[j, k]]
                } else {
                    Complex::new(T::zero(), T::zero())
                };
                let b = if j < other.n1() && k < other.n2() {
                    other.coeffs[[j, k]]
                } else {
                    Complex::new(T::zero(), T::zero())
                };
                acc += (a - b).norm_sqr();
            }
        }
        acc
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// Band-limited Gaussian sample: independent complex-Gaussian
    /// coefficients damped by `(1 + mu_{jk})^{-decay/2}`, scaled to the
    /// requested amplitude. Draws are made in row-major mode order so the
    /// stream is reproducible.
    pub fn sample_gaussian<R: Rng + ?Sized>(
        n1: usize,
        n2: usize,
        l1: T,
        l2: T,
        decay: T,
        amplitude: T,
        rng: &mut R,
    ) -> Self {
        let mut f = Self::zeros(n1, n2, l1, l2);
        let half = T::of(0.5);
        for j in 1..=n1 {
            for k in 1..=n2 {
                let re: f64 = StandardNormal.sample(rng);
                let im: f64 = StandardNormal.sample(rng);
                let fj = T::of(j as f64) * T::PI() / l1;
                let fk = T::of(k as f64) * T::PI() / l2;
                let mu = fj * fj + fk * fk;
                let rho = (T::one() + mu).powf(-decay * half);
                f.coeffs[[j - 1, k - 1]] =
                    Complex::new(T::of(re), T::of(im)) * rho;
            }
        }
        let norm = f.l2_norm_sq().sqrt();
        if norm > T::zero() {
            f.scale(Complex::new(amplitude / norm, T::zero()));
        }
        f
    }
}

/// Collocation values on the interior grid `x_a = a L1/(M1+1)`,
/// `y_b = b L2/(M2+1)`, with optional collocated gradient planes.
///
/// Interior-node quadrature is exact for band-limited integrands that
/// vanish on the boundary (anything carrying a factor of `|u|`). Gradient
/// magnitudes do not vanish there, so synthesis also records the gradient
/// values along the four boundary lines; [`PhysicalGrid::h1_quadrature`]
/// folds them in with trapezoid weights, which restores exactness.
/// Gradient values along an opposing pair of boundary lines.
pub type WallPair<T> = (Array1<Complex<T>>, Array1<Complex<T>>);

#[derive(Debug, Clone)]
pub struct PhysicalGrid<T: Real> {
    pub values: Array2<Complex<T>>,
    pub grad_x: Option<Array2<Complex<T>>>,
    pub grad_y: Option<Array2<Complex<T>>>,
    /// `grad_x` along the lines `x = 0` and `x = L1` (interior `y` nodes).
    pub grad_x_walls: Option<WallPair<T>>,
    /// `grad_y` along the lines `y = 0` and `y = L2` (interior `x` nodes).
    pub grad_y_walls: Option<WallPair<T>>,
    pub l1: T,
    pub l2: T,
}

impl<T: Real> PhysicalGrid<T> {
    pub fn m1(&self) -> usize {
        self.values.nrows()
    }

    pub fn m2(&self) -> usize {
        self.values.ncols()
    }

    /// Quadrature weight of one interior node. The integrand vanishes on
    /// the Dirichlet boundary, so the interior sum is the whole rule.
    pub fn weight(&self) -> T {
        self.l1 * self.l2
            / (T::of((self.m1() + 1) as f64) * T::of((self.m2() + 1) as f64))
    }

    /// Quadrature of a pointwise function of the field value.
    pub fn integrate<F: Fn(Complex<T>) -> T>(&self, f: F) -> T {
        let mut acc = T::zero();
        for z in self.values.iter() {
            acc += f(*z);
        }
        acc * self.weight()
    }

    /// Quadrature of a pointwise function of value and gradient.
    pub fn integrate_with_grad<F>(&self, f: F) -> Result<T>
    where
        F: Fn(Complex<T>, Complex<T>, Complex<T>) -> T,
    {
        let gx = self.grad_x.as_ref().ok_or(CoreError::MissingGradient)?;
        let gy = self.grad_y.as_ref().ok_or(CoreError::MissingGradient)?;
        let mut acc = T::zero();
        Zip::from(&self.values).and(gx).and(gy).for_each(|v, x, y| {
            acc += f(*v, *x, *y);
        });
        Ok(acc * self.weight())
    }

    /// `int_D |u|^p dx` by quadrature.
    pub fn lp_norm_pow(&self, p: T) -> T {
        let half_p = p * T::of(0.5);
        self.integrate(|z| pow_sq(z.norm_sqr(), half_p))
    }

    /// `int_D |u|^{2 sigma} |grad u|^2 dx` by quadrature.
    pub fn mixed_term(&self, sigma: T) -> Result<T> {
        self.integrate_with_grad(|v, gx, gy| {
            pow_sq(v.norm_sqr(), sigma) * (gx.norm_sqr() + gy.norm_sqr())
        })
    }

    /// `int_D |grad u|^2 dx` with the boundary trapezoid correction; the
    /// quadrature counterpart of the coefficient-space `||grad u||^2`.
    pub fn h1_quadrature(&self) -> Result<T> {
        let mut acc = self.integrate_with_grad(|_, gx, gy| {
            gx.norm_sqr() + gy.norm_sqr()
        })?;
        let (x0, x1) = self
            .grad_x_walls
            .as_ref()
            .ok_or(CoreError::MissingGradient)?;
        let (y0, y1) = self
            .grad_y_walls
            .as_ref()
            .ok_or(CoreError::MissingGradient)?;
        let half = T::of(0.5);
        let mut wall = T::zero();
        for z in x0.iter().chain(x1.iter()) {
            wall += z.norm_sqr();
        }
        for z in y0.iter().chain(y1.iter()) {
            wall += z.norm_sqr();
        }
        acc += wall * half * self.weight();
        Ok(acc)
    }
}

/// Precomputed synthesis/analysis tables for one `(n, M)` pairing.
///
/// Synthesis evaluates `S1 C S2^T` (plus `D1 C S2^T`, `S1 C D2^T` for the
/// gradient planes); analysis is the adjoint against the quadrature rule,
/// which is exact on in-band data thanks to discrete sine orthogonality.
#[derive(Debug, Clone)]
pub struct SineBasis<T: Real> {
    pub n1: usize,
    pub n2: usize,
    pub m1: usize,
    pub m2: usize,
    pub l1: T,
    pub l2: T,
    s1: Array2<T>,
    s2: Array2<T>,
    d1: Array2<T>,
    d2: Array2<T>,
    /// Odd-exact quadrature weights per axis (see [`odd_weights`]).
    ow1: Array1<T>,
    ow2: Array1<T>,
}

/// Quadrature weights on the interior grid that integrate sine
/// polynomials exactly: for `g = sum_{m<=M} c_m sin(m pi x / L)`,
/// `sum_a w_a g(x_a) = int_0^L g`. Obtained by inverting the discrete
/// sine transform and weighting each mode by its exact integral; needed
/// because the uniform rule is only exact for integrands with even
/// (cosine) reflection structure, and derivative terms are not of that
/// form along their derivative axis.
pub fn odd_weights<T: Real>(m: usize, l: T) -> Array1<T> {
    let mut w = Array1::zeros(m);
    let mp1 = T::of((m + 1) as f64);
    for a in 1..=m {
        let mut acc = T::zero();
        // only odd modes have nonzero integral 2L/(m pi)
        let mut mode = 1usize;
        while mode <= m {
            let phase = T::PI() * T::of(mode as f64) * T::of(a as f64) / mp1;
            acc += phase.sin() * T::of(2.0) / T::of(mode as f64);
            mode += 2;
        }
        w[a - 1] = acc * (T::of(2.0) / mp1) * l / T::PI();
    }
    w
}

fn sine_tables<T: Real>(n: usize, m: usize, l: T) -> (Array2<T>, Array2<T>) {
    let norm = (T::of(2.0) / l).sqrt();
    let mut s = Array2::zeros((m, n));
    let mut d = Array2::zeros((m, n));
    for a in 1..=m {
        for j in 1..=n {
            let phase = T::PI() * T::of(j as f64) * T::of(a as f64)
                / T::of((m + 1) as f64);
            let freq = T::of(j as f64) * T::PI() / l;
            s[[a - 1, j - 1]] = norm * phase.sin();
            d[[a - 1, j - 1]] = norm * freq * phase.cos();
        }
    }
    (s, d)
}

impl<T: Real> SineBasis<T> {
    pub fn new(n1: usize, n2: usize, m1: usize, m2: usize, l1: T, l2: T) -> Result<Self> {
        if m1 < n1 || m2 < n2 {
            return Err(CoreError::DimensionMismatch {
                context: format!(
                    "grid {m1}x{m2} cannot resolve {n1}x{n2} modes"
                ),
            });
        }
        let (s1, d1) = sine_tables(n1, m1, l1);
        let (s2, d2) = sine_tables(n2, m2, l2);
        let ow1 = odd_weights(m1, l1);
        let ow2 = odd_weights(m2, l2);
        Ok(SineBasis {
            n1,
            n2,
            m1,
            m2,
            l1,
            l2,
            s1,
            s2,
            d1,
            d2,
            ow1,
            ow2,
        })
    }

    /// Padding factor that keeps degree-`(2 sigma + 2)` products alias-free
    /// for integer `sigma`; non-integer `sigma` uses the same table. The
    /// floor of 4 is what the cubic derivative term needs for its exact
    /// odd-weighted projection.
    pub fn dealias_pad<U: Real>(sigma: U) -> usize {
        ((sigma.as_f64() + 1.0).ceil() as usize).max(4)
    }

    /// Basis on the dealiased padded grid `M = pad * n`.
    pub fn padded(n1: usize, n2: usize, l1: T, l2: T, sigma: T) -> Self {
        let pad = Self::dealias_pad(sigma);
        Self::new(n1, n2, pad * n1, pad * n2, l1, l2)
            .expect("padded grid is never smaller than the mode count")
    }

    /// Errors when this grid is too small for dealiased evaluation of
    /// degree-`(2 sigma + 2)` products.
    pub fn check_dealias(&self, sigma: T) -> Result<()> {
        let pad = Self::dealias_pad(sigma);
        if self.m1 < pad * self.n1 || self.m2 < pad * self.n2 {
            return Err(CoreError::GridTooSmall {
                m1: self.m1,
                m2: self.m2,
                n1: self.n1,
                n2: self.n2,
                need1: pad * self.n1,
                need2: pad * self.n2,
            });
        }
        Ok(())
    }

    fn product_complex(
        left: &Array2<T>,
        c: &Array2<Complex<T>>,
        right: &Array2<T>,
    ) -> Array2<Complex<T>> {
        // Split planes so the inner products run as real matrix products
        // (which ndarray dispatches to its fast kernel for f32/f64).
        let c_re = c.mapv(|z| z.re);
        let c_im = c.mapv(|z| z.im);
        let re = left.dot(&c_re).dot(&right.t());
        let im = left.dot(&c_im).dot(&right.t());
        let mut out = Array2::zeros(re.dim());
        Zip::from(&mut out).and(&re).and(&im).for_each(|o, r, i| {
            *o = Complex::new(*r, *i);
        });
        out
    }

    /// Coefficients -> collocation values (and gradients on request).
    pub fn synthesize(&self, field: &SpectralField<T>, with_grad: bool) -> Result<PhysicalGrid<T>> {
        if field.n1() != self.n1 || field.n2() != self.n2 {
            return Err(CoreError::DimensionMismatch {
                context: format!(
                    "field is {}x{} but basis expects {}x{}",
                    field.n1(),
                    field.n2(),
                    self.n1,
                    self.n2
                ),
            });
        }
        let values = Self::product_complex(&self.s1, &field.coeffs, &self.s2);
        let (grad_x, grad_y, grad_x_walls, grad_y_walls) = if with_grad {
            (
                Some(Self::product_complex(&self.d1, &field.coeffs, &self.s2)),
                Some(Self::product_complex(&self.s1, &field.coeffs, &self.d2)),
                Some(self.grad_x_wall_lines(field)),
                Some(self.grad_y_wall_lines(field)),
            )
        } else {
            (None, None, None, None)
        };
        Ok(PhysicalGrid {
            values,
            grad_x,
            grad_y,
            grad_x_walls,
            grad_y_walls,
            l1: self.l1,
            l2: self.l2,
        })
    }

    /// `grad_x` along `x = 0` and `x = L1` at the interior `y` nodes; the
    /// sine factors vanish there so only the cosine derivative survives.
    fn grad_x_wall_lines(&self, field: &SpectralField<T>) -> WallPair<T> {
        let norm1 = (T::of(2.0) / self.l1).sqrt();
        let mut row0 = vec![Complex::new(T::zero(), T::zero()); self.n2];
        let mut row1 = vec![Complex::new(T::zero(), T::zero()); self.n2];
        for j in 1..=self.n1 {
            let freq = T::of(j as f64) * T::PI() / self.l1;
            let at0 = norm1 * freq;
            let at1 = if j % 2 == 0 { at0 } else { -at0 };
            for k in 0..self.n2 {
                let c = field.coeffs[[j - 1, k]];
                row0[k] += c * at0;
                row1[k] += c * at1;
            }
        }
        let mut wall0 = Array1::zeros(self.m2);
        let mut wall1 = Array1::zeros(self.m2);
        for b in 0..self.m2 {
            let mut acc0 = Complex::new(T::zero(), T::zero());
            let mut acc1 = Complex::new(T::zero(), T::zero());
            for k in 0..self.n2 {
                let s = self.s2[[b, k]];
                acc0 += row0[k] * s;
                acc1 += row1[k] * s;
            }
            wall0[b] = acc0;
            wall1[b] = acc1;
        }
        (wall0, wall1)
    }

    fn grad_y_wall_lines(&self, field: &SpectralField<T>) -> WallPair<T> {
        let norm2 = (T::of(2.0) / self.l2).sqrt();
        let mut col0 = vec![Complex::new(T::zero(), T::zero()); self.n1];
        let mut col1 = vec![Complex::new(T::zero(), T::zero()); self.n1];
        for k in 1..=self.n2 {
            let freq = T::of(k as f64) * T::PI() / self.l2;
            let at0 = norm2 * freq;
            let at1 = if k % 2 == 0 { at0 } else { -at0 };
            for j in 0..self.n1 {
                let c = field.coeffs[[j, k - 1]];
                col0[j] += c * at0;
                col1[j] += c * at1;
            }
        }
        let mut wall0 = Array1::zeros(self.m1);
        let mut wall1 = Array1::zeros(self.m1);
        for a in 0..self.m1 {
            let mut acc0 = Complex::new(T::zero(), T::zero());
            let mut acc1 = Complex::new(T::zero(), T::zero());
            for j in 0..self.n1 {
                let s = self.s1[[a, j]];
                acc0 += col0[j] * s;
                acc1 += col1[j] * s;
            }
            wall0[a] = acc0;
            wall1[a] = acc1;
        }
        (wall0, wall1)
    }

    /// Collocation values -> coefficients (quadrature projection).
    pub fn analyze(&self, grid: &PhysicalGrid<T>) -> Result<SpectralField<T>> {
        self.analyze_values(&grid.values)
    }

    /// Projection of an arbitrary value plane sampled on this grid.
    pub fn analyze_values(&self, values: &Array2<Complex<T>>) -> Result<SpectralField<T>> {
        if values.nrows() != self.m1 || values.ncols() != self.m2 {
            return Err(CoreError::DimensionMismatch {
                context: format!(
                    "grid is {}x{} but basis expects {}x{}",
                    values.nrows(),
                    values.ncols(),
                    self.m1,
                    self.m2
                ),
            });
        }
        let w = self.l1 * self.l2
            / (T::of((self.m1 + 1) as f64) * T::of((self.m2 + 1) as f64));
        let v_re = values.mapv(|z| z.re);
        let v_im = values.mapv(|z| z.im);
        let re = self.s1.t().dot(&v_re).dot(&self.s2);
        let im = self.s1.t().dot(&v_im).dot(&self.s2);
        let mut coeffs = Array2::zeros((self.n1, self.n2));
        Zip::from(&mut coeffs).and(&re).and(&im).for_each(|o, r, i| {
            *o = Complex::new(*r * w, *i * w);
        });
        Ok(SpectralField::from_coeffs(coeffs, self.l1, self.l2))
    }

    fn analyze_weighted(
        &self,
        values: &Array2<Complex<T>>,
        row_w: Option<&Array1<T>>,
        col_w: Option<&Array1<T>>,
    ) -> Result<SpectralField<T>> {
        if values.nrows() != self.m1 || values.ncols() != self.m2 {
            return Err(CoreError::DimensionMismatch {
                context: format!(
                    "grid is {}x{} but basis expects {}x{}",
                    values.nrows(),
                    values.ncols(),
                    self.m1,
                    self.m2
                ),
            });
        }
        let h1 = self.l1 / T::of((self.m1 + 1) as f64);
        let h2 = self.l2 / T::of((self.m2 + 1) as f64);
        let mut v_re = values.mapv(|z| z.re);
        let mut v_im = values.mapv(|z| z.im);
        // fold the per-node weights into the value planes
        for a in 0..self.m1 {
            let wa = row_w.map_or(h1, |w| w[a]);
            for b in 0..self.m2 {
                let wb = col_w.map_or(h2, |w| w[b]);
                v_re[[a, b]] *= wa * wb;
                v_im[[a, b]] *= wa * wb;
            }
        }
        let re = self.s1.t().dot(&v_re).dot(&self.s2);
        let im = self.s1.t().dot(&v_im).dot(&self.s2);
        let mut coeffs = Array2::zeros((self.n1, self.n2));
        Zip::from(&mut coeffs).and(&re).and(&im).for_each(|o, r, i| {
            *o = Complex::new(*r, *i);
        });
        Ok(SpectralField::from_coeffs(coeffs, self.l1, self.l2))
    }

    /// Projection of a plane whose reflection structure is even (cosine
    /// type) along `x` and odd (sine type) along `y`: x-derivative terms.
    /// Uses the odd-exact rule in `x`, the uniform rule in `y`.
    pub fn analyze_even_x(&self, values: &Array2<Complex<T>>) -> Result<SpectralField<T>> {
        self.analyze_weighted(values, Some(&self.ow1), None)
    }

    /// Mirror image of [`SineBasis::analyze_even_x`] for y-derivative terms.
    pub fn analyze_even_y(&self, values: &Array2<Complex<T>>) -> Result<SpectralField<T>> {
        self.analyze_weighted(values, None, Some(&self.ow2))
    }

    /// Interior node coordinates along each axis.
    pub fn nodes(&self) -> (Array1<T>, Array1<T>) {
        let xs = Array1::from_iter((1..=self.m1).map(|a| {
            self.l1 * T::of(a as f64) / T::of((self.m1 + 1) as f64)
        }));
        let ys = Array1::from_iter((1..=self.m2).map(|b| {
            self.l2 * T::of(b as f64) / T::of((self.m2 + 1) as f64)
        }));
        (xs, ys)
    }
}

/// Grid request for the free-function transform entry points.
#[derive(Debug, Clone, Copy)]
pub struct GridSpec<T: Real> {
    pub m1: usize,
    pub m2: usize,
    /// When set, requests alias-free evaluation of degree-`(2 sigma + 2)`
    /// products and errors if the grid is too small for it.
    pub dealias_sigma: Option<T>,
}

/// Synthesis entry point matching the operation contract; builds a table
/// per call, so hot loops should hold a [`SineBasis`] instead.
pub fn to_physical<T: Real>(
    u: &SpectralField<T>,
    spec: GridSpec<T>,
    with_grad: bool,
) -> Result<PhysicalGrid<T>> {
    let basis = SineBasis::new(u.n1(), u.n2(), spec.m1, spec.m2, u.l1, u.l2)?;
    if let Some(sigma) = spec.dealias_sigma {
        basis.check_dealias(sigma)?;
    }
    basis.synthesize(u, with_grad)
}

/// Projection entry point matching the operation contract.
pub fn to_spectral<T: Real>(grid: &PhysicalGrid<T>, n1: usize, n2: usize) -> Result<SpectralField<T>> {
    let basis = SineBasis::new(n1, n2, grid.m1(), grid.m2(), grid.l1, grid.l2)?;
    basis.analyze(grid)
}

/// Direct-summation reference transforms. Quadratically slower than the
/// separable path and kept deliberately independent of it; the test suite
/// uses these as the ground truth.
pub mod direct {
    use super::*;

    fn basis_value<T: Real>(j: usize, k: usize, x: T, y: T, l1: T, l2: T) -> T {
        let norm = T::of(2.0) / (l1 * l2).sqrt();
        norm * (T::of(j as f64) * T::PI() * x / l1).sin()
            * (T::of(k as f64) * T::PI() * y / l2).sin()
    }

    pub fn to_physical<T: Real>(u: &SpectralField<T>, m1: usize, m2: usize) -> PhysicalGrid<T> {
        let mut values = Array2::zeros((m1, m2));
        for a in 1..=m1 {
            let x = u.l1 * T::of(a as f64) / T::of((m1 + 1) as f64);
            for b in 1..=m2 {
                let y = u.l2 * T::of(b as f64) / T::of((m2 + 1) as f64);
                let mut acc = Complex::new(T::zero(), T::zero());
                for j in 1..=u.n1() {
                    for k in 1..=u.n2() {
                        let e = basis_value(j, k, x, y, u.l1, u.l2);
                        acc += u.coeffs[[j - 1, k - 1]] * e;
                    }
                }
                values[[a - 1, b - 1]] = acc;
            }
        }
        PhysicalGrid {
            values,
            grad_x: None,
            grad_y: None,
            grad_x_walls: None,
            grad_y_walls: None,
            l1: u.l1,
            l2: u.l2,
        }
    }

    pub fn to_spectral<T: Real>(grid: &PhysicalGrid<T>, n1: usize, n2: usize) -> SpectralField<T> {
        let (m1, m2) = (grid.m1(), grid.m2());
        let w = grid.weight();
        let mut coeffs = Array2::zeros((n1, n2));
        for j in 1..=n1 {
            for k in 1..=n2 {
                let mut acc = Complex::new(T::zero(), T::zero());
                for a in 1..=m1 {
                    let x = grid.l1 * T::of(a as f64) / T::of((m1 + 1) as f64);
                    for b in 1..=m2 {
                        let y = grid.l2 * T::of(b as f64) / T::of((m2 + 1) as f64);
                        let e = basis_value(j, k, x, y, grid.l1, grid.l2);
                        acc += grid.values[[a - 1, b - 1]] * e;
                    }
                }
                coeffs[[j - 1, k - 1]] = acc * w;
            }
        }
        SpectralField::from_coeffs(coeffs, grid.l1, grid.l2)
    }
}
