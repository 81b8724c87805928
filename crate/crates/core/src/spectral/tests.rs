use std::f64::consts::PI;

use ndarray::Array3;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use super::*;
use crate::error::Error;

fn grid8() -> Grid {
    Grid::new(8, 8, 8).unwrap()
}

fn max_diff(a: &SpectralField, b: &SpectralField) -> f64 {
    (a - b).max_abs_coeff()
}

/// Real random field, band-limited to the 2/3-retained set.
pub(crate) fn random_field(grid: Grid, seed: u64, parity: Parity) -> SpectralField {
    let mut rng = StdRng::seed_from_u64(seed);
    let vals = Array3::from_shape_fn(grid.shape(), |_| rng.random_range(-1.0..1.0));
    let f = dealias(&SpectralField::from_physical(grid, &vals, Parity::None));
    enforce_parity(&f, parity)
}

#[test]
fn parity_of_even_mode() {
    let g = grid8();
    let f = SpectralField::from_fn(g, Parity::None, |_, _, z| (PI * z).cos());
    let even = enforce_parity(&f, Parity::Even);
    assert!(max_diff(&even, &f) < 1e-15);
    let odd = enforce_parity(&f, Parity::Odd);
    assert!(odd.max_abs_coeff() < 1e-15);
}

#[test]
fn odd_part_of_mixed_mode() {
    let g = grid8();
    let f = SpectralField::from_fn(g, Parity::None, |_, _, z| (PI * z).cos() + (PI * z).sin());
    let expect = SpectralField::from_fn(g, Parity::Odd, |_, _, z| (PI * z).sin());
    let odd = enforce_parity(&f, Parity::Odd);
    assert!(max_diff(&odd, &expect) < 1e-15);
    assert_eq!(odd.parity(), Parity::Odd);
}

#[test]
fn derivative_examples() {
    let g = grid8();
    let sinx = SpectralField::from_fn(g, Parity::Even, |x, _, _| x.sin());
    let cosx = SpectralField::from_fn(g, Parity::Even, |x, _, _| x.cos());
    assert!(max_diff(&derivative(&sinx, Axis::X), &cosx) < 1e-14);

    let c = SpectralField::from_fn(g, Parity::Even, |_, _, z| (PI * z).cos());
    let d = derivative(&c, Axis::Z);
    let expect = SpectralField::from_fn(g, Parity::Odd, |_, _, z| -PI * (PI * z).sin());
    assert!(max_diff(&d, &expect) < 1e-14);
    assert_eq!(d.parity(), Parity::Odd);

    let k = SpectralField::from_fn(g, Parity::Even, |_, _, _| 3.5);
    for axis in [Axis::X, Axis::Y, Axis::Z] {
        assert_eq!(derivative(&k, axis).max_abs_coeff(), 0.0);
    }
}

#[test]
fn dealias_cutoff_at_eight_points() {
    let g = grid8();
    let k3 = SpectralField::from_fn(g, Parity::Even, |x, _, _| (3.0 * x).cos());
    assert!(dealias(&k3).max_abs_coeff() < 1e-15);
    assert!(dealias(&k3).coeff(3, 0, 0).norm() == 0.0);
    let k2 = SpectralField::from_fn(g, Parity::Even, |x, _, _| (2.0 * x).cos());
    assert!(max_diff(&dealias(&k2), &k2) < 1e-16);
}

#[test]
fn dealias_keeps_band_limited_and_contracts() {
    let g = Grid::new(12, 8, 10).unwrap();
    let f = random_field(g, 3, Parity::None);
    assert_eq!(dealias(&f), f);
    for seed in 0..5 {
        let mut rng = StdRng::seed_from_u64(seed);
        let vals = Array3::from_shape_fn(g.shape(), |_| rng.random_range(-1.0..1.0));
        let f = SpectralField::from_physical(g, &vals, Parity::None);
        assert!(dealias(&f).l2_norm() <= f.l2_norm());
    }
}

#[test]
fn anisotropic_poisson_single_mode() {
    let g = grid8();
    let rhs = SpectralField::from_fn(g, Parity::Even, |x, _, z| x.cos() * (PI * z).cos());
    for (eps, denom) in [(1.0, 1.0 + PI * PI), (0.5, 1.0 + 4.0 * PI * PI)] {
        let p = poisson_aniso(&rhs, eps).unwrap();
        let expect =
            SpectralField::from_fn(g, Parity::Even, |x, _, z| -x.cos() * (PI * z).cos() / denom);
        assert!(max_diff(&p, &expect) < 1e-15, "eps = {eps}");
    }
    let zero = SpectralField::zeros(g, Parity::Even);
    assert_eq!(poisson_aniso(&zero, 0.3).unwrap().max_abs_coeff(), 0.0);
}

#[test]
fn anisotropic_poisson_satisfies_equation() {
    let g = Grid::new(16, 12, 14).unwrap();
    let mut rhs = random_field(g, 11, Parity::Even);
    rhs.set_coeff(0, 0, 0, Complex64::default());
    let eps = 0.2;
    let p = poisson_aniso(&rhs, eps).unwrap();
    let lhs = &(&derivative(&derivative(&p, Axis::X), Axis::X)
        + &derivative(&derivative(&p, Axis::Y), Axis::Y))
        + &(&derivative(&derivative(&p, Axis::Z), Axis::Z) * (1.0 / (eps * eps)));
    assert!(max_diff(&lhs, &rhs) < 1e-13 * rhs.max_abs_coeff().max(1.0));
    assert!(p.mean().abs() < 1e-16);
}

#[test]
fn anisotropic_poisson_errors() {
    let g = grid8();
    let rhs = SpectralField::from_fn(g, Parity::Even, |x, _, _| 1.0 + x.cos());
    assert!(matches!(
        poisson_aniso(&rhs, 1.0),
        Err(Error::GaugeViolation { .. })
    ));
    let ok = SpectralField::zeros(g, Parity::Even);
    assert!(matches!(
        poisson_aniso(&ok, 0.0),
        Err(Error::InvalidParameter(_))
    ));
    assert!(matches!(
        poisson_aniso(&ok, -1.0),
        Err(Error::InvalidParameter(_))
    ));
}

#[test]
fn horizontal_poisson_examples() {
    let g = grid8();
    let rhs = HorizontalField::from_fn(g, |x, _| x.cos());
    let p = poisson_horizontal(&rhs).unwrap();
    assert!((&p - &rhs).coeffs().iter().all(|c| c.norm() < 1e-15));
    let zero = HorizontalField::zeros(g);
    assert_eq!(poisson_horizontal(&zero).unwrap(), zero);
    let bad = HorizontalField::from_fn(g, |x, _| 2.0 * x.cos() + 0.5);
    assert!(matches!(
        poisson_horizontal(&bad),
        Err(Error::GaugeViolation { .. })
    ));
}

#[test]
fn antiderivative_examples() {
    let g = Grid::new(4, 4, 16).unwrap();
    let s = SpectralField::from_fn(g, Parity::Odd, |_, _, z| (PI * z).sin());
    let f = vertical_antiderivative(&s, VerticalOrigin::Middle).unwrap();
    let expect = SpectralField::from_fn(g, Parity::Even, |_, _, z| (1.0 - (PI * z).cos()) / PI);
    assert!(max_diff(&f, &expect) < 1e-15);
    assert_eq!(f.parity(), Parity::Even);

    let c = SpectralField::from_fn(g, Parity::Even, |_, _, z| (PI * z).cos());
    let f = vertical_antiderivative(&c, VerticalOrigin::Bottom).unwrap();
    let expect = SpectralField::from_fn(g, Parity::Odd, |_, _, z| (PI * z).sin() / PI);
    assert!(max_diff(&f, &expect) < 1e-15);
    assert_eq!(f.parity(), Parity::Odd);

    let zero = SpectralField::zeros(g, Parity::Odd);
    assert_eq!(
        vertical_antiderivative(&zero, VerticalOrigin::Middle)
            .unwrap()
            .max_abs_coeff(),
        0.0
    );
}

#[test]
fn antiderivative_rejects_nonzero_vertical_mean() {
    let g = grid8();
    let f = SpectralField::from_fn(g, Parity::Even, |x, _, z| x.cos() + (PI * z).cos());
    match vertical_antiderivative(&f, VerticalOrigin::Bottom) {
        Err(Error::NonPeriodic { modes }) => {
            assert_eq!(modes.len(), 2);
            assert!(modes.contains(&(1, 0)) && modes.contains(&(-1, 0)));
        }
        other => panic!("expected periodicity error, got {other:?}"),
    }
}

#[test]
fn round_trip_band_limited() {
    let g = Grid::new(16, 12, 10).unwrap();
    let f = random_field(g, 5, Parity::None);
    let vals = f.to_physical();
    let back = SpectralField::from_physical(g, &vals, Parity::None);
    assert!(max_diff(&back, &f) <= 1e-12 * f.max_abs_coeff());
}

#[test]
fn parseval_identity() {
    let g = Grid::new(12, 16, 8).unwrap();
    for seed in 0..4 {
        let mut rng = StdRng::seed_from_u64(seed);
        let vals = Array3::from_shape_fn(g.shape(), |_| rng.random_range(-2.0..2.0));
        let f = SpectralField::from_physical(g, &vals, Parity::None);
        // independent midpoint quadrature on the raw samples
        let quad = g.volume() / g.len() as f64 * vals.iter().map(|v| v * v).sum::<f64>();
        assert!((f.l2_norm_sq() - quad).abs() <= 1e-10 * quad);
    }
}

#[test]
fn two_thirds_products_are_exact_on_retained_modes() {
    let g = Grid::new(12, 12, 12).unwrap();
    let a = SpectralField::from_fn(g, Parity::Even, |x, y, z| {
        (4.0 * x).cos() * y.sin() * (PI * z).cos()
    });
    let b = SpectralField::from_fn(g, Parity::Even, |x, _, z| {
        (3.0 * x).sin() * (2.0 * PI * z).cos()
    });
    let prod = dealiased_product(g, &a.to_physical(), &b.to_physical(), Parity::Even);
    // brute force on a grid with no aliasing
    let fine = Grid::new(24, 24, 24).unwrap();
    let exact = SpectralField::from_fn(fine, Parity::Even, |x, y, z| {
        (4.0 * x).cos() * y.sin() * (PI * z).cos() * (3.0 * x).sin() * (2.0 * PI * z).cos()
    });
    for ((i, j, l), c) in prod.coeffs().indexed_iter() {
        let e = exact.coeff(g.mode_x(i), g.mode_y(j), g.mode_z(l));
        let keep = Grid::retained(g.mode_x(i), 12)
            && Grid::retained(g.mode_y(j), 12)
            && Grid::retained(g.mode_z(l), 12);
        let expect = if keep { e } else { Complex64::default() };
        assert!((c - expect).norm() < 1e-14);
    }
}

#[test]
fn hydrostatic_shadow_of_pressure_multiplier() {
    // ratio of the m≠0 multiplier to ε²/(πm)² tends to 1 as ε → 0
    let g = grid8();
    let eps = 1e-3;
    for (kx, m) in [(1i64, 1i64), (2, 1), (1, 2), (0, 2), (2, 2)] {
        let mut rhs = SpectralField::zeros(g, Parity::None);
        rhs.set_coeff(kx, 0, m, Complex64::new(1.0, 0.0));
        let p = poisson_aniso(&rhs, eps).unwrap();
        let multiplier = -p.coeff(kx, 0, m).re;
        let limit = eps * eps / (PI * m as f64).powi(2);
        assert!((multiplier / limit - 1.0).abs() < 1e-4, "kx={kx} m={m}");
    }
}

#[test]
fn resample_preserves_values() {
    let g = Grid::new(8, 8, 8).unwrap();
    let f = random_field(g, 9, Parity::Odd);
    let fine = f.resampled(Grid::new(12, 12, 12).unwrap());
    assert!((fine.l2_norm_sq() - f.l2_norm_sq()).abs() < 1e-14);
    let (x, y, z) = (0.3, 1.7, -0.42);
    assert!((fine.eval_at(x, y, z) - f.eval_at(x, y, z)).abs() < 1e-13);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn parity_projection_is_idempotent_contraction(seed in any::<u64>(), odd in any::<bool>()) {
        let g = Grid::new(8, 6, 10).unwrap();
        let f = random_field(g, seed, Parity::None);
        let parity = if odd { Parity::Odd } else { Parity::Even };
        let p = enforce_parity(&f, parity);
        let pp = enforce_parity(&p, parity);
        prop_assert!(max_diff(&p, &pp) < 1e-15);
        prop_assert!(p.l2_norm() <= f.l2_norm() * (1.0 + 1e-14));
        prop_assert!(p.parity_residual() < 1e-12);
        // even + odd parts reassemble the field
        let other = enforce_parity(&f, if odd { Parity::Even } else { Parity::Odd });
        prop_assert!(max_diff(&(&p + &other), &f) < 1e-15);
    }

    #[test]
    fn derivative_inverts_antiderivative(seed in any::<u64>(), from_mid in any::<bool>()) {
        let g = Grid::new(8, 8, 12).unwrap();
        let mut f = random_field(g, seed, Parity::None);
        for c in f.coeffs_mut().index_axis_mut(ndarray::Axis(2), 0).iter_mut() {
            *c = Complex64::default();
        }
        let origin = if from_mid { VerticalOrigin::Middle } else { VerticalOrigin::Bottom };
        let big_f = vertical_antiderivative(&f, origin).unwrap();
        let back = derivative(&big_f, Axis::Z);
        prop_assert!(max_diff(&back, &f) <= 1e-12);
        let (x, y) = (0.7, 2.1);
        prop_assert!(big_f.eval_at(x, y, origin.z()).abs() < 1e-12);
    }
}
