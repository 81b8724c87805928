use std::f64::consts::PI;

use proptest::prelude::*;

use super::*;
use crate::spectral::{dealias, Grid};

fn grid() -> Grid {
    Grid::new(8, 8, 8).unwrap()
}

fn field(parity: Parity, f: impl Fn(f64, f64, f64) -> f64) -> SpectralField {
    SpectralField::from_fn(grid(), parity, f)
}

fn random(seed: u64, parity: Parity) -> SpectralField {
    crate::spectral::tests::random_field(grid(), seed, parity)
}

#[test]
fn well_prepared_single_mode_is_valid() {
    let v = [
        field(Parity::Even, |x, _, z| x.sin() * (PI * z).cos()),
        field(Parity::Even, |_, _, _| 0.0),
    ];
    let theta = field(Parity::Odd, |_, _, z| (PI * z).sin());
    let report = check_initial_data(&v, &theta, ValidationOptions::default()).unwrap();
    assert!(report.all_passed(), "{report}");
    assert!(validate_initial_data(v, theta, ValidationOptions::default()).is_ok());
}

#[test]
fn z_independent_velocity_breaks_barotropic_constraint() {
    let v = [
        field(Parity::None, |x, _, _| x.sin()),
        field(Parity::None, |_, _, _| 0.0),
    ];
    let theta = field(Parity::Odd, |_, _, _| 0.0);
    let err = validate_initial_data(v, theta, ValidationOptions::default()).unwrap_err();
    let Error::Hypothesis(report) = err else {
        panic!("wrong error")
    };
    assert!(report.failed(Hypothesis::Barotropic));
    assert_eq!(report.failures().count(), 1);
    let baro = report
        .checks
        .iter()
        .find(|c| c.hypothesis == Hypothesis::Barotropic)
        .unwrap();
    // z-mean of ∇_h·v₀ is cos x, i.e. modes (±1, 0) with coefficient 1/2
    assert!((baro.residual - 0.5).abs() < 1e-14);
    assert!(baro.offending_modes.contains(&(1, 0, 0)));
    assert!(baro.offending_modes.contains(&(-1, 0, 0)));
}

#[test]
fn constant_velocity_breaks_mean_zero() {
    let v = [
        field(Parity::None, |_, _, _| 1.0),
        field(Parity::None, |_, _, _| 0.0),
    ];
    let theta = field(Parity::Odd, |_, _, _| 0.0);
    let report = check_initial_data(&v, &theta, ValidationOptions::default()).unwrap();
    assert!(report.failed(Hypothesis::VelocityMeanZero));
    assert!(!report.failed(Hypothesis::Barotropic));

    let relaxed = ValidationOptions {
        require_mean_zero: false,
        ..Default::default()
    };
    let report = check_initial_data(&v, &theta, relaxed).unwrap();
    assert!(report.all_passed());
}

#[test]
fn violations_are_reported_exhaustively() {
    let v = [
        field(Parity::None, |x, _, z| 1.0 + x.sin() + (PI * z).sin()),
        field(Parity::None, |_, _, _| 0.0),
    ];
    let theta = field(Parity::None, |_, _, z| 0.3 + (PI * z).cos());
    let report = check_initial_data(&v, &theta, ValidationOptions::default()).unwrap();
    let failed: Vec<_> = report.failures().map(|c| c.hypothesis).collect();
    assert_eq!(
        failed,
        vec![
            Hypothesis::VelocityEven,
            Hypothesis::TemperatureOdd,
            Hypothesis::Barotropic,
            Hypothesis::VelocityMeanZero,
            Hypothesis::TemperatureMeanZero
        ]
    );
}

#[test]
fn diagnose_w_single_mode() {
    let v = [
        field(Parity::Even, |x, _, z| x.sin() * (PI * z).cos()),
        SpectralField::zeros(grid(), Parity::Even),
    ];
    let w = diagnose_w(&v).unwrap();
    let expect = field(Parity::Odd, |x, _, z| -x.cos() * (PI * z).sin() / PI);
    assert!((&w - &expect).max_abs_coeff() < 1e-15);
    assert_eq!(w.parity(), Parity::Odd);
}

#[test]
fn diagnose_w_of_horizontally_solenoidal_flow_vanishes() {
    let v = [
        field(Parity::Even, |_, y, z| y.sin() * (PI * z).cos()),
        SpectralField::zeros(grid(), Parity::Even),
    ];
    assert!(diagnose_w(&v).unwrap().max_abs_coeff() < 1e-16);
    let zero = [
        SpectralField::zeros(grid(), Parity::Even),
        SpectralField::zeros(grid(), Parity::Even),
    ];
    assert_eq!(diagnose_w(&zero).unwrap().max_abs_coeff(), 0.0);
}

#[test]
fn diagnose_w_rejects_barotropic_violation() {
    let v = [
        field(Parity::Even, |x, _, _| x.sin()),
        SpectralField::zeros(grid(), Parity::Even),
    ];
    assert!(matches!(diagnose_w(&v), Err(Error::NonPeriodic { .. })));
}

#[test]
fn rescaling_examples() {
    let g = grid();
    let zero = |_: f64, _: f64, _: f64| 0.0;
    let lin = |_: f64, _: f64, zz: f64| zz;
    let thin = ThinDomainSamples::from_fns(g, 0.5, [&zero, &zero], &lin, &zero, &zero).unwrap();
    let fixed = rescale_to_fixed(&thin).unwrap();
    for ((_, _, l), w) in fixed.w.indexed_iter() {
        assert!((w - g.z(l)).abs() < 1e-15);
    }

    let one = |_: f64, _: f64, _: f64| 1.0;
    let thin = ThinDomainSamples::from_fns(g, 0.25, [&zero, &zero], &zero, &zero, &one).unwrap();
    let fixed = rescale_to_fixed(&thin).unwrap();
    assert!(fixed.theta.iter().all(|t| (t - 0.25).abs() < 1e-16));

    assert!(rescale_to_thin(&fixed, 0.0).is_err());
    assert!(ThinDomainSamples::from_fns(g, -1.0, [&zero, &zero], &zero, &zero, &zero).is_err());
}

#[test]
fn rescaled_state_matches_scaled_unknowns() {
    // v(x,y,Z) = sin x cos(πZ/ε) becomes sin x cos(πz) on the fixed box
    let g = grid();
    let eps = 0.2;
    let v1 = move |x: f64, _: f64, zz: f64| x.sin() * (PI * zz / eps).cos();
    let zero = |_: f64, _: f64, _: f64| 0.0;
    let w = move |x: f64, _: f64, zz: f64| -eps * x.cos() * (PI * zz / eps).sin() / PI;
    let thin = ThinDomainSamples::from_fns(g, eps, [&v1, &zero], &w, &zero, &zero).unwrap();
    let s = rescale_to_fixed(&thin).unwrap().to_state(0.0);
    let v_expect = field(Parity::Even, |x, _, z| x.sin() * (PI * z).cos());
    assert!((&s.v[0] - &v_expect).max_abs_coeff() < 1e-15);
    assert!(s.divergence_residual() < 1e-13);
}

#[test]
fn projected_random_data_is_divergence_consistent() {
    let v = [random(1, Parity::None), random(2, Parity::None)];
    let t = random(3, Parity::None);
    let (v, t) = project_to_hypotheses(&v, &t);
    let data = validate_initial_data(v, t, ValidationOptions::default()).unwrap();
    let s = State::from_initial(&data).unwrap();
    assert!(
        s.divergence_residual() <= 1e-10 * crate::spectral::grad_norm_sq(&s.v[0]).sqrt().max(1.0)
    );
    assert!(s.w_boundary_residual() < 1e-10);
    assert!(s.parity_drift() < 1e-12);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn validator_accepts_exactly_projected_data(seed in any::<u64>()) {
        let v = [random(seed, Parity::None), random(seed ^ 0x5a5a, Parity::None)];
        let t = random(seed.wrapping_add(7), Parity::None);
        let raw = check_initial_data(&v, &t, ValidationOptions::default()).unwrap();
        prop_assert!(!raw.all_passed());
        let (pv, pt) = project_to_hypotheses(&v, &t);
        let report = check_initial_data(&pv, &pt, ValidationOptions::default()).unwrap();
        prop_assert!(report.all_passed(), "{}", report);
    }

    #[test]
    fn diagnosed_w_vanishes_on_lids_and_is_linear(seed in any::<u64>(), a in -3.0f64..3.0) {
        let v = [random(seed, Parity::None), random(seed ^ 0xff, Parity::None)];
        let (v, _) = project_to_hypotheses(&v, &random(1, Parity::Odd));
        let w = diagnose_w(&v).unwrap();
        for (x, y) in [(0.1, 0.2), (2.0, 5.0), (4.4, 1.3)] {
            prop_assert!(w.eval_at(x, y, 1.0).abs() < 1e-10);
            prop_assert!(w.eval_at(x, y, -1.0).abs() < 1e-10);
        }
        let u = [random(seed ^ 0x1234, Parity::None), random(seed ^ 0x4321, Parity::None)];
        let (u, _) = project_to_hypotheses(&u, &random(2, Parity::Odd));
        let combo = [&v[0] + &(&u[0] * a), &v[1] + &(&u[1] * a)];
        let lhs = diagnose_w(&combo).unwrap();
        let rhs = &w + &(&diagnose_w(&u).unwrap() * a);
        prop_assert!((&lhs - &rhs).max_abs_coeff() < 1e-13);
    }

    #[test]
    fn rescaling_round_trip(seed in any::<u64>(), eps in 0.01f64..1.0) {
        let g = grid();
        let f = dealias(&random(seed, Parity::None)).to_physical();
        let samples = PointSamples {
            grid: g,
            v: [f.clone(), f.mapv(|x| 2.0 * x)],
            w: f.mapv(|x| x - 0.1),
            p: f.mapv(|x| x * x),
            theta: f.mapv(|x| -x),
        };
        let back = rescale_to_fixed(&rescale_to_thin(&samples, eps).unwrap()).unwrap();
        for (a, b) in [(&back.w, &samples.w), (&back.theta, &samples.theta), (&back.p, &samples.p)] {
            let err = (a - b).mapv(f64::abs).fold(0.0f64, |m, &x| m.max(x));
            prop_assert!(err < 1e-12);
        }
    }
}
