use std::f64::consts::{E, PI};

use hardylab::quadrature::{
    integrate, integrate_log_weighted, integrate_power_endpoint, log_weight_closed_form, Endpoint,
    DEFAULT_REL_TOL,
};
use proptest::prelude::*;

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

type Smooth = (&'static str, fn(f64) -> f64, (f64, f64), f64);

/// Smooth integrands with elementary antiderivatives.
const SMOOTH: &[Smooth] = &[
    ("x^2", |x| x * x, (0.0, 1.0), 1.0 / 3.0),
    ("x^7", |x| x.powi(7), (0.0, 2.0), 32.0),
    ("sin", f64::sin, (0.0, PI), 2.0),
    ("cos", f64::cos, (0.0, PI / 2.0), 1.0),
    ("exp", f64::exp, (0.0, 1.0), E - 1.0),
    ("exp(-x)", |x| (-x).exp(), (0.0, 30.0), 1.0 - 1e-13 * 0.935_762_296_884_017_5),
    ("1/x", |x| 1.0 / x, (1.0, 10.0), std::f64::consts::LN_10),
    ("1/(1+x^2)", |x| 1.0 / (1.0 + x * x), (0.0, 1.0), PI / 4.0),
    ("sqrt", f64::sqrt, (0.0, 4.0), 16.0 / 3.0),
    ("ln", f64::ln, (1.0, E), 1.0),
    ("x e^x", |x| x * x.exp(), (0.0, 1.0), 1.0),
    ("sin^2", |x| x.sin().powi(2), (0.0, PI), PI / 2.0),
    ("1/(1+x)^2", |x| (1.0 + x).powi(-2), (0.0, 9.0), 0.9),
    ("cosh", f64::cosh, (-1.0, 1.0), 2.0 * 1.175_201_193_643_801_4),
    ("narrow gaussian", |x| (-(x - 0.3) * (x - 0.3) * 1e4).exp(), (0.0, 1.0), 0.017_724_538_509_055_16),
    ("x sin 20x", |x| x * (20.0 * x).sin(), (0.0, PI), -PI / 20.0),
    ("1/sqrt(1-x^2)", |x| 1.0 / (1.0 - x * x).sqrt(), (0.0, 0.5), PI / 6.0),
    ("tan", f64::tan, (0.0, PI / 4.0), std::f64::consts::LN_2 / 2.0),
    ("|x - 1/3|", |x| (x - 1.0 / 3.0).abs(), (0.0, 1.0), 5.0 / 18.0),
    ("x^-1/2 log", |x| x.ln() / x.sqrt(), (1.0, 4.0), 8.0 * std::f64::consts::LN_2 - 4.0),
];

/// Endpoint power singularities: `integral_0^1 t^alpha g(t) dt`.
type Singular = (&'static str, f64, fn(f64) -> f64, f64);

const SINGULAR: &[Singular] = &[
    ("t^-1/2", -0.5, |_| 1.0, 2.0),
    ("t^-0.9", -0.9, |_| 1.0, 10.0),
    ("t^-0.99", -0.99, |_| 1.0, 100.0),
    ("t^-1/2 cos", -0.5, f64::cos, 1.809_048_475_800_544_3),
    ("t^1/3", 1.0 / 3.0, |_| 1.0, 0.75),
    ("t^-1/3 e^t", -1.0 / 3.0, f64::exp, 2.343_591_093_325_967_4),
    ("t^-0.75 (1+t)", -0.75, |t| 1.0 + t, 4.0 + 0.8),
    ("t^2.5", 2.5, |_| 1.0, 1.0 / 3.5),
];

#[test]
fn smooth_battery() {
    for (name, f, interval, exact) in SMOOTH {
        let got = integrate(f, *interval, DEFAULT_REL_TOL).unwrap().value;
        assert!(rel(got, *exact) <= 1e-10, "{name}: {got} vs {exact}");
    }
}

#[test]
fn singular_battery_left_and_right() {
    for (name, alpha, g, exact) in SINGULAR {
        let left = integrate_power_endpoint(g, *alpha, Endpoint::at_left((0.0, 1.0)), (0.0, 1.0), DEFAULT_REL_TOL)
            .unwrap()
            .value;
        assert!(rel(left, *exact) <= 1e-10, "{name} left: {left} vs {exact}");
        // mirror: the singular point at t = 1
        let right = integrate_power_endpoint(
            |t| g(1.0 - t),
            *alpha,
            Endpoint::at_right((0.0, 1.0)),
            (0.0, 1.0),
            DEFAULT_REL_TOL,
        )
        .unwrap()
        .value;
        assert!(rel(right, *exact) <= 1e-10, "{name} right: {right} vs {exact}");
    }
}

#[test]
fn steep_power_away_from_singularity() {
    // integral_{1e-8}^{1} t^-3 dt
    let got = integrate_power_endpoint(|_| 1.0, -3.0, Endpoint::Left(0.0), (1e-8, 1.0), DEFAULT_REL_TOL)
        .unwrap()
        .value;
    let exact = 0.5 * (1e16 - 1.0);
    assert!(rel(got, exact) <= 1e-10, "{got}");
}

#[test]
fn log_weight_battery() {
    for &(gamma, delta, b) in &[(2.0, 1e-12, 1.0), (1.0, 1e-6, 0.5), (1.5, 1e-300, 1.0), (0.5, 1e-3, 0.9)] {
        let got = integrate_log_weighted(|_| 1.0, gamma, (delta, b), DEFAULT_REL_TOL).unwrap().value;
        let exact = log_weight_closed_form(gamma, delta, b).unwrap();
        assert!(rel(got, exact) <= 1e-10, "gamma {gamma}: {got} vs {exact}");
    }
    // gamma = 2 on (0, 1]: integral of tau^-2 over [1, inf) is 1
    assert!((log_weight_closed_form(2.0, 0.0, 1.0).unwrap() - 1.0).abs() < 1e-15);
    assert!(log_weight_closed_form(1.0, 0.0, 1.0).is_err());
}

#[test]
fn non_integrable_is_an_error() {
    assert!(integrate_power_endpoint(|_| 1.0, -1.0, Endpoint::at_left((0.0, 1.0)), (0.0, 1.0), 1e-10).is_err());
    assert!(integrate(|x| x, (1.0, 0.0), 1e-10).is_err());
    assert_eq!(integrate(|x| x, (2.0, 2.0), 1e-10).unwrap().value, 0.0);
}

#[test]
fn deterministic() {
    let f = |x: f64| (x * 13.0).sin() / (1.0 + x);
    let a = integrate(f, (0.0, 7.0), 1e-12).unwrap();
    let b = integrate(f, (0.0, 7.0), 1e-12).unwrap();
    assert_eq!(a.value.to_bits(), b.value.to_bits());
    assert_eq!(a.subdivisions, b.subdivisions);
}

proptest! {
    #[test]
    fn splitting_is_consistent(c in 0.05f64..2.95, k in 1.0f64..8.0) {
        let f = |x: f64| (k * x).cos() * (-x).exp();
        let whole = integrate(f, (0.0, 3.0), 1e-12).unwrap().value;
        let parts = integrate(f, (0.0, c), 1e-12).unwrap().value + integrate(f, (c, 3.0), 1e-12).unwrap().value;
        prop_assert!((whole - parts).abs() <= 1e-11);
    }

    #[test]
    fn monomials_exact(p in 0.0f64..6.0, b in 0.1f64..5.0) {
        let got = integrate_power_endpoint(|_| 1.0, p - 0.99, Endpoint::at_left((0.0, b)), (0.0, b), 1e-12)
            .unwrap()
            .value;
        let q = p + 0.01;
        let exact = b.powf(q) / q;
        prop_assert!(rel(got, exact) <= 1e-10);
    }
}
