mod common;

use fdo_core::phasespace::{self, LeadingTerm, PhaseSpaceQuery};
use fdo_core::potential::PotentialSpec;
use statrs::function::beta::beta;
use statrs::function::gamma::digamma;

fn spec(p: f64, b: f64) -> PotentialSpec {
    PotentialSpec::new(p, b).unwrap()
}

fn quadrant(s: PotentialSpec, lambda: f64, c: f64) -> f64 {
    phasespace::quadrant_integral(&PhaseSpaceQuery::new(s, lambda, c).unwrap()).unwrap()
}

fn cosh_int(s: PotentialSpec, lambda: f64, c: f64) -> f64 {
    phasespace::cosh_integral(&PhaseSpaceQuery::new(s, lambda, c).unwrap()).unwrap()
}

#[test]
fn square_potential_matches_2d_oracle() {
    let reduced = quadrant(spec(2.0, 0.0), 100.0, 1.0);
    let direct = common::quadrant_2d(2.0, 0.0, 100.0, 1.0, 1e-10);
    assert!((reduced - direct).abs() < 1e-6 * direct);
}

#[test]
fn cosh_sandwich() {
    for (s, lam, c) in [
        (spec(2.0, 0.0), 50.0, 1.0),
        (spec(1.0, 0.0), 20.0, 2.0),
        (spec(0.0, 1.0), 100.0, 0.5),
        (spec(1.0, 1.0), 1e3, 3.0),
    ] {
        let lo = quadrant(s, lam, c);
        let mid = cosh_int(s, lam, c);
        let hi = quadrant(s, lam, c / 2.0);
        assert!(lo <= mid && mid <= hi, "{s:?} λ={lam}: {lo} {mid} {hi}");
    }
}

#[test]
fn cosh_integral_matches_2d_oracle() {
    // Independent: integrate y first by Simpson at each k.
    let (lam, c) = (30.0_f64, 1.5_f64);
    let k_max = (lam / c).acosh();
    let slice = |k: f64| {
        let e = lam - c * k.cosh();
        if e <= 0.0 {
            return 0.0;
        }
        common::adaptive_simpson(|y| (e - y * y).max(0.0), 0.0, e.sqrt(), 1e-12)
    };
    let direct = 4.0 * common::adaptive_simpson(slice, 0.0, k_max, 1e-10);
    let v = cosh_int(spec(2.0, 0.0), lam, c);
    assert!((v - direct).abs() < 1e-7 * direct);
}

#[test]
fn degenerate_region() {
    // λ = C cosh 0 + W(0)
    assert_eq!(cosh_int(spec(0.0, 1.0), 2.0, 1.0), 0.0);
    assert_eq!(quadrant(spec(2.0, 0.0), 5.0, 7.0), 0.0);
}

#[test]
fn monotone_in_lambda_and_c() {
    for s in [spec(2.0, 0.0), spec(0.0, 1.0), spec(1.0, 1.0)] {
        let mut prev = 0.0;
        for lam in [5.0, 10.0, 50.0, 200.0] {
            let v = quadrant(s, lam, 1.0);
            assert!(v >= prev);
            prev = v;
        }
        let mut prev = f64::INFINITY;
        for c in [0.25, 0.5, 1.0, 2.0, 4.0] {
            let v = quadrant(s, 50.0, c);
            let w = cosh_int(s, 50.0, c);
            assert!(v <= prev);
            prev = v;
            assert!(w >= 0.0);
        }
    }
}

#[test]
fn monotone_in_p_where_region_outside_unit_interval_dominates() {
    // |y|^p increases with p only for |y| > 1, so compare at large λ.
    let lam = 1e4;
    let vals: Vec<f64> = [1.0, 1.5, 2.0, 3.0]
        .iter()
        .map(|&p| quadrant(spec(p, 0.0), lam, 1.0))
        .collect();
    assert!(vals.windows(2).all(|w| w[1] <= w[0]), "{vals:?}");
}

#[test]
fn leading_term_window_for_power_potentials() {
    for p in [0.5, 1.0, 2.0, 3.0] {
        let s = spec(p, 0.0);
        for lam in [1e3, 1e4, 1e5] {
            let r = quadrant(s, lam, 1.0) / phasespace::leading_term(&s, lam);
            let w = 3.0 / f64::ln(lam);
            assert!((1.0 - w..=1.0 + w).contains(&r), "p={p} λ={lam}: {r}");
        }
    }
}

#[test]
fn linear_potential_closed_form_across_parameters() {
    // For W = |y|: 4∫_C^λ (λ−u)²/(2u) du.
    for (lam, c) in [(10.0_f64, 1.0_f64), (100.0, 0.5), (1e3, 7.0)] {
        let exact =
            2.0 * (lam * lam * (lam / c).ln() - 2.0 * lam * (lam - c) + (lam * lam - c * c) / 2.0);
        let v = quadrant(spec(1.0, 0.0), lam, c);
        assert!((v - exact).abs() < 1e-9 * exact);
    }
}

#[test]
fn tail_integral_matches_beta_digamma() {
    for p in [0.25, 0.5, 1.0, 2.0, 3.0, 7.5] {
        let q = 1.0 / p;
        let exact = beta(2.0, q) * (digamma(2.0) - digamma(2.0 + q));
        let v = phasespace::tail_integral(p).unwrap();
        assert!((v - exact).abs() < 1e-11, "p={p}: {v} vs {exact}");
        assert!(v < 0.0);
    }
    assert!(phasespace::tail_integral(0.0).is_err());
}

#[test]
fn ibp_identities() {
    for (lam, c, p) in [
        (100.0, 1.0, 2.0),
        (10.0, 5.0, 1.0),
        (1e3, 2.0, 0.3),
        (1e3, 1.0, 4.0),
    ] {
        let (lhs, rhs) = phasespace::ibp_sides_power(lam, c, p).unwrap();
        assert!(
            (lhs - rhs).abs() < 1e-9 * (1.0 + lhs.abs()),
            "({lam},{c},{p})"
        );
    }
    // C → λ: both sides vanish together.
    let (lhs, rhs) = phasespace::ibp_sides_power(10.0, 9.99, 1.0).unwrap();
    assert!(lhs.abs() < 1e-5 && rhs.abs() < 1e-5 && (lhs - rhs).abs() < 1e-12);

    for (lam, c, l, r) in [
        (1e3, 1.0, 10.0, 1.0),
        (1e3, 1.0, 10.0, 0.5),
        (1e4, 10.0, std::f64::consts::E.powi(2), 2.0),
    ] {
        let (lhs, rhs) = phasespace::ibp_sides_exp(lam, c, l, r).unwrap();
        assert!(
            (lhs - rhs).abs() < 1e-9 * (1.0 + lhs.abs()),
            "({lam},{c},{l},{r})"
        );
    }
    assert!(phasespace::ibp_residual_exp(10.0, 1.0, 0.5, 1.0).is_err());
}

#[test]
fn minus_u_part_is_lower_order() {
    for s in [
        spec(1.0, 0.0),
        spec(2.0, 0.0),
        spec(0.0, 1.0),
        spec(1.0, 1.0),
    ] {
        for lam in [10.0, 100.0, 1e3] {
            let q = PhaseSpaceQuery::new(s, lam, 1.0).unwrap();
            let m = phasespace::minus_u_part(&q).unwrap();
            assert!(m <= lam * s.inverse(lam).unwrap());
        }
    }
}

#[test]
fn leading_term_shapes() {
    let lt = LeadingTerm::for_spec(&spec(3.0, 0.0));
    assert_eq!(lt.coefficient, 3.0);
    assert!((lt.lambda_exponent - 4.0 / 3.0).abs() < 1e-15);
    assert_eq!(lt.log_exponent, 1.0);
    let lt = LeadingTerm::for_spec(&spec(1.0, 0.5));
    assert_eq!(
        (lt.coefficient, lt.lambda_exponent, lt.log_exponent),
        (4.0, 1.0, 3.0)
    );
    let n = LeadingTerm::counting(&spec(0.0, 1.0));
    assert!((n.eval(std::f64::consts::E.powi(3)) - 36.0).abs() < 1e-12);
}
