use std::f64::consts::{E, PI};

use fdo_core::phasespace::{self, LeadingTerm, PhaseSpaceQuery};
use fdo_core::potential::PotentialSpec;
use fdo_core::schedule::{self, ScaleSchedule, ScheduleOverrides};
use fdo_core::spectral::{self, build_grid, SpectrumResult};
use fdo_core::Error;

fn spec(p: f64, b: f64) -> PotentialSpec {
    PotentialSpec::new(p, b).unwrap()
}

fn quadrant(s: PotentialSpec, lambda: f64, c: f64) -> f64 {
    phasespace::quadrant_integral(&PhaseSpaceQuery::new(s, lambda, c).unwrap()).unwrap()
}

fn degenerate(lambda: f64) -> ScaleSchedule {
    ScaleSchedule {
        lambda,
        a: 1.0,
        s: 0.0,
        sigma: 0.0,
        tau: 0.0,
        epsilon: 0.0,
        k: 0.0,
        mu: 1.0,
        c1: 0.5,
        c2: 1.0,
        lambda1: lambda + 1.0,
        lambda2: lambda - 1.0,
        certificate: None,
    }
}

#[test]
fn affine_branch_field_identities() {
    let s = spec(2.0, 0.0);
    for lam in [100.0, 1e4, 1e8] {
        let sc = schedule::make_schedule(&s, lam, ScheduleOverrides::default()).unwrap();
        assert!((sc.s - lam.ln().ln() / (16.0 * PI * PI)).abs() < 1e-15);
        assert!((sc.c1 - 0.5 * (1.0 + sc.sigma) * (-sc.s).exp()).abs() < 1e-15);
        assert!((sc.c2 - sc.s.exp() / (1.0 + sc.sigma)).abs() < 1e-15);
        let shift = sc.tau.max(1.0);
        assert!((sc.lambda1 - ((1.0 + sc.sigma) * lam + shift)).abs() < 1e-9 * lam);
        assert!((sc.lambda2 - (lam - shift) / (1.0 + sc.sigma)).abs() < 1e-9 * lam);
        let identity = (2.0 * sc.s).exp() / (1.0 + sc.sigma).powi(2) * 2.0;
        assert!((sc.c2 / sc.c1 - identity).abs() < 1e-13 * identity);
    }
}

#[test]
fn vanishing_scales_limit() {
    let sc = degenerate(10.0);
    assert_eq!(sc.lambda1, 11.0);
    assert_eq!(sc.c1, 0.5);
}

#[test]
fn vacuous_upper_bound_sentinel() {
    let mut sc = degenerate(10.0);
    sc.c1 = 20.0;
    assert_eq!(
        schedule::upper_bound(&spec(2.0, 0.0), &sc).unwrap(),
        f64::INFINITY
    );
    sc.c2 = 20.0;
    assert_eq!(schedule::lower_bound(&spec(2.0, 0.0), &sc).unwrap(), 0.0);
}

#[test]
fn degenerate_schedule_gap_is_a_finite_difference() {
    let s = spec(2.0, 0.0);
    let lam = 50.0;
    let sc = degenerate(lam);
    let upper = schedule::upper_bound(&s, &sc).unwrap();
    let lower = schedule::lower_bound(&s, &sc).unwrap();
    assert!((upper - quadrant(s, lam + 1.0, 0.5)).abs() < 1e-9 * upper);
    assert!((lower - quadrant(s, lam - 1.0, 1.0)).abs() < 1e-9 * lower);
    // Gap = two unit steps in λ at C = 1/2 plus the cost of doubling C.
    let d_lambda = quadrant(s, lam + 1.0, 0.5) - quadrant(s, lam - 1.0, 0.5);
    let d_c = quadrant(s, lam - 1.0, 0.5) - quadrant(s, lam - 1.0, 1.0);
    assert!(upper >= lower);
    assert!((upper - lower) <= (d_lambda + d_c) * (1.0 + 1e-9));
    // ∂Q/∂λ is increasing in λ, so the λ step is at most 2·∂Q/∂λ at λ+1.
    let h = 1e-3;
    let slope = (quadrant(s, lam + 1.0 + h, 0.5) - quadrant(s, lam + 1.0 - h, 0.5)) / (2.0 * h);
    assert!(d_lambda <= 2.0 * slope * (1.0 + 1e-6));
}

#[test]
fn upper_dominates_lower() {
    let s = spec(2.0, 0.0);
    let sc = schedule::make_schedule(&s, 100.0, ScheduleOverrides::default()).unwrap();
    assert!(schedule::upper_bound(&s, &sc).unwrap() >= schedule::lower_bound(&s, &sc).unwrap());
}

#[test]
fn certified_exponential_schedule() {
    let s = spec(0.0, 1.0);
    let overrides = ScheduleOverrides {
        a: Some(25.0),
        epsilon: Some(0.25),
    };
    let sc = schedule::make_schedule(&s, 6f64.exp(), overrides).unwrap();
    assert_eq!(sc.lambda1, 2.0 * (6f64.exp() + 1.0));
    assert_eq!(sc.lambda2, 0.5 * 6f64.exp() - 1.0);
    let lower = schedule::lower_bound(&s, &sc).unwrap();
    let upper = schedule::upper_bound(&s, &sc).unwrap();
    assert!(0.0 < lower && lower < upper);
}

#[test]
fn invalid_dilation_certificate_rejected() {
    let s = spec(0.0, 2.0);
    let overrides = ScheduleOverrides {
        a: Some(2.0),
        epsilon: Some(0.5),
    };
    let err = schedule::make_schedule(&s, 1e3, overrides).unwrap_err();
    assert!(matches!(
        err,
        Error::NonIntegrable(_) | Error::Certificate(_)
    ));
}

#[test]
fn lower_bound_monotone_in_lambda() {
    let s = spec(1.0, 0.0);
    let overrides = ScheduleOverrides {
        a: Some(2.0),
        epsilon: None,
    };
    let mut prev = 0.0;
    for lam in [5.0, 10.0, 40.0, 200.0] {
        let sc = schedule::make_schedule(&s, lam, overrides).unwrap();
        let v = schedule::lower_bound(&s, &sc).unwrap();
        assert!(v >= prev);
        prev = v;
    }
}

#[test]
fn below_spectrum_reports_zero() {
    let s = spec(2.0, 0.0);
    let spectrum = SpectrumResult::from_sorted(vec![1.2, 3.0, 7.0]).unwrap();
    let overrides = ScheduleOverrides {
        a: Some(1.0),
        epsilon: None,
    };
    let r = schedule::bound_report(&s, 1.1, Some(&spectrum), overrides).unwrap();
    assert_eq!(r.riesz, Some(0.0));
    assert_eq!(r.lower, 0.0);
    assert!(r.leading.is_none());
    r.check().unwrap();
}

#[test]
fn sandwich_with_increasing_ratios() {
    let s = spec(2.0, 0.0);
    let reports = schedule::sandwich_report(
        &s,
        &[25.0, 50.0, 100.0],
        &build_grid(40.0, 1024).unwrap(),
        ScheduleOverrides::default(),
    )
    .unwrap();
    for r in &reports {
        let riesz = r.riesz.unwrap();
        assert!(r.lower - r.slack() <= riesz && riesz <= r.upper + r.slack());
    }
    let ratios: Vec<f64> = reports.iter().map(|r| r.ratios().unwrap().0).collect();
    assert!(ratios.windows(2).all(|w| w[1] > w[0]), "{ratios:?}");
}

#[test]
fn sandwich_requires_resolution() {
    let err = schedule::sandwich_report(
        &spec(2.0, 0.0),
        &[25.0, 500.0],
        &build_grid(10.0, 64).unwrap(),
        ScheduleOverrides::default(),
    )
    .unwrap_err();
    assert!(matches!(err, Error::Resolution(_)));
}

#[test]
fn bounds_pinch_along_schedule() {
    let s = spec(2.0, 0.0);
    let gaps: Vec<f64> = [1e3, 1e6, 1e12, 1e24]
        .iter()
        .map(|&lam| {
            let sc = schedule::make_schedule(&s, lam, ScheduleOverrides::default()).unwrap();
            schedule::upper_bound(&s, &sc).unwrap() / schedule::lower_bound(&s, &sc).unwrap()
        })
        .collect();
    assert!(gaps.windows(2).all(|w| w[1] < w[0]), "{gaps:?}");
}

#[test]
fn karamata_on_computed_spectrum() {
    let op = spectral::assemble(&build_grid(30.0, 256).unwrap(), &spec(1.0, 0.0)).unwrap();
    let spectrum = spectral::eigenvalues(&op).unwrap();
    for lam in [0.0, 1.0, 5.0, 20.0, 29.0] {
        let r = spectral::riesz_mean(&spectrum, lam);
        assert!(schedule::karamata_check(&spectrum, lam) < 1e-12 * (1.0 + r));
    }
}

#[test]
fn ratio_series_for_linear_potential() {
    let s = spec(1.0, 0.0);
    let values: Vec<(f64, f64)> = [1e2, 1e3, 1e4]
        .iter()
        .map(|&l| (l, quadrant(s, l, 1.0)))
        .collect();
    let series = schedule::ratio_series(&values, &LeadingTerm::for_spec(&s)).unwrap();
    for (r, l) in series.ratios.iter().zip(&series.lambdas) {
        let w = 3.0 / l.ln();
        assert!((1.0 - w..=1.0 + w).contains(r));
    }
    assert!(series.monotone);
    assert!(series.deltas.iter().all(|d| *d > 0.0));
}

#[test]
fn triple_exponential_default_epsilon() {
    assert!((schedule::default_epsilon(E.powf(E.powf(E))) - 1.0).abs() < 1e-12);
}
