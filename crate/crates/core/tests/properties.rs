//! Property tests for the core invariants: transform round trips, norm
//! homogeneities, the pairing ratio bound, and compensator linearity.

use num_complex::Complex;
use proptest::prelude::*;

use sggl_core::lab::okazawa_yokota_ratio;
use sggl_core::noise::{compensator, JumpModel, NoiseFamily};
use sggl_core::spectral::{SineBasis, SpectralField};
use sggl_core::CoreError;

const PI: f64 = std::f64::consts::PI;

fn small_coeffs() -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((-2.0f64..2.0, -2.0f64..2.0), 16)
}

fn field_from(coeffs: &[(f64, f64)], l1: f64, l2: f64) -> SpectralField<f64> {
    let mut f = SpectralField::zeros(4, 4, l1, l2);
    for (i, &(re, im)) in coeffs.iter().enumerate() {
        f.coeffs[[i / 4, i % 4]] = Complex::new(re, im);
    }
    f
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn round_trip_identity_on_band_limited_fields(
        coeffs in small_coeffs(),
        l1 in 0.5f64..4.0,
        l2 in 0.5f64..4.0,
    ) {
        let f = field_from(&coeffs, l1, l2);
        let basis = SineBasis::new(4, 4, 16, 16, l1, l2).unwrap();
        let back = basis.analyze(&basis.synthesize(&f, false).unwrap()).unwrap();
        let scale = f.l2_norm_sq().sqrt().max(1e-12);
        prop_assert!(back.diff_norm_sq(&f).sqrt() / scale < 1e-12);
    }

    #[test]
    fn norms_are_absolutely_homogeneous(
        coeffs in small_coeffs(),
        c_re in -3.0f64..3.0,
        c_im in -3.0f64..3.0,
    ) {
        let f = field_from(&coeffs, PI, PI);
        let c = Complex::new(c_re, c_im);
        let scaled = f.scaled(c);
        let (l2, h1) = f.norms();
        let (l2s, h1s) = scaled.norms();
        let mag = c.norm_sqr();
        prop_assert!((l2s - mag * l2).abs() <= 1e-12 * (1.0 + mag * l2));
        prop_assert!((h1s - mag * h1).abs() <= 1e-10 * (1.0 + mag * h1));
    }

    #[test]
    fn lp_norm_scales_with_documented_degree(
        coeffs in small_coeffs(),
        c in 0.1f64..4.0,
        p in 2.0f64..8.0,
    ) {
        let f = field_from(&coeffs, PI, PI);
        let basis = SineBasis::new(4, 4, 32, 32, PI, PI).unwrap();
        let g = basis.synthesize(&f, false).unwrap();
        let gs = basis
            .synthesize(&f.scaled(Complex::new(c, 0.0)), false)
            .unwrap();
        let a = g.lp_norm_pow(p);
        let b = gs.lp_norm_pow(p);
        prop_assert!((b - c.powf(p) * a).abs() <= 1e-9 * (1.0 + b.abs()));
    }

    #[test]
    fn pairing_ratio_respects_bound(
        zr in prop::collection::vec((-2.0f64..2.0, -2.0f64..2.0), 1..6),
        wr in prop::collection::vec((-2.0f64..2.0, -2.0f64..2.0), 1..6),
        p in 1.1f64..12.0,
    ) {
        let dim = zr.len().min(wr.len());
        let z: Vec<Complex<f64>> =
            zr[..dim].iter().map(|&(a, b)| Complex::new(a, b)).collect();
        let w: Vec<Complex<f64>> =
            wr[..dim].iter().map(|&(a, b)| Complex::new(a, b)).collect();
        match okazawa_yokota_ratio(&z, &w, p) {
            Ok((ratio, bound)) => prop_assert!(ratio <= bound + 1e-10),
            Err(CoreError::DegeneratePair) => {}
            Err(e) => return Err(TestCaseError::fail(format!("{e}"))),
        }
    }

    #[test]
    fn compensator_is_linear_in_intensity(
        coeffs in small_coeffs(),
        nu1 in 0.1f64..3.0,
        nu2 in 0.1f64..3.0,
        scale in 0.5f64..4.0,
    ) {
        let f = field_from(&coeffs, PI, PI);
        let basis = SineBasis::padded(4, 4, PI, PI, 3.0);
        let model = JumpModel::new(
            vec![nu1, nu2],
            vec![0.7, 0.3],
            NoiseFamily::LinearMultiplicative { c: 0.5 },
            4.0,
        )
        .unwrap();
        let scaled = JumpModel::new(
            vec![scale * nu1, scale * nu2],
            vec![0.7, 0.3],
            NoiseFamily::LinearMultiplicative { c: 0.5 },
            4.0,
        )
        .unwrap();
        let a = compensator(&model, 0.0, &f, &basis).unwrap();
        let b = compensator(&scaled, 0.0, &f, &basis).unwrap();
        let expect = a.scaled(Complex::new(scale, 0.0));
        prop_assert!(b.diff_norm_sq(&expect) <= 1e-20 * (1.0 + expect.l2_norm_sq()));
    }

    #[test]
    fn power_kernel_homogeneity(
        re in -2.0f64..2.0,
        im in -2.0f64..2.0,
        c in 0.1f64..3.0,
        sigma in 2.1f64..4.0,
    ) {
        let z = Complex::new(re, im);
        prop_assume!(z.norm() > 1e-6);
        let t1 = sggl_core::ops::t_kernel(z * c, sigma, 0.5);
        let t2 = sggl_core::ops::t_kernel(z, sigma, 0.5) * c.powf(2.0 * sigma + 1.0);
        prop_assert!((t1 - t2).norm() <= 1e-9 * t2.norm().max(1e-12));
    }
}
