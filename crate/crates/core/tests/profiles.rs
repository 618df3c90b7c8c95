use hardylab::functionals::{x_log, Evaluator, Route, Term};
use hardylab::geometry::RadialReduction;
use hardylab::profiles::{
    annulus_indicator, ball_shell_indicator, cheeger_concentric, power_log_profile, power_profile,
    radial_bump, shifted_power_profile, strip_slab_profile, Exponent, Jump, Profile, ProductProfile,
    Shape,
};
use hardylab::quadrature::integrate;
use hardylab::{make_domain, DomainSpec};
use proptest::prelude::*;

fn red(spec: DomainSpec) -> RadialReduction {
    make_domain(spec).unwrap().radial_reduction()
}

fn magnitude(j: &Jump, red: &RadialReduction) -> f64 {
    let b = red.branch_of(j.t).unwrap();
    let d = j.knot.dist_on(b, red).unwrap();
    let v = |s: Option<Shape>| s.map_or(0.0, |s| s.value(j.t, d).unwrap());
    (v(j.left) - v(j.right)).abs()
}

#[test]
fn cone_masses_against_quadrature() {
    for n in 2..=7 {
        let (m1, k1) = ProductProfile::cone_masses(n);
        let k = (n - 2) as i32;
        let m = integrate(|r| (1.0 - r) * r.powi(k), (0.0, 1.0), 1e-13).unwrap().value;
        let kk = integrate(|r| r.powi(k), (0.0, 1.0), 1e-13).unwrap().value;
        assert!((m1 - m).abs() < 1e-14 && (k1 - kk).abs() < 1e-14, "n = {n}");
        assert!((k1 / m1 - n as f64).abs() < 1e-12);
    }
    let slab = strip_slab_profile(0.01, 1.0, 0.25).unwrap();
    let (m, k) = slab.effective_masses(3);
    assert!((k / m - slab.mass_ratio(3)).abs() < 1e-12);
    assert_eq!(slab.mass_ratio(3), 0.75);
}

#[test]
fn annulus_indicator_jumps() {
    let r = red(DomainSpec::punctured_space(3));
    let jumps = annulus_indicator(0.1, 1.0).unwrap().jumps(&r).unwrap();
    let at: Vec<f64> = jumps.iter().map(|j| j.t).collect();
    assert_eq!(at, vec![0.1, 1.0]);
    assert!(jumps.iter().all(|j| magnitude(j, &r) == 1.0));
}

#[test]
fn ball_shell_jump_sits_at_distance_delta() {
    let r = red(DomainSpec::ball(3, 1.0));
    for delta in [0.5, 1e-3, 1e-20] {
        let jumps = ball_shell_indicator(delta).unwrap().jumps(&r).unwrap();
        assert_eq!(jumps.len(), 1);
        let b = r.branch_of(jumps[0].t).unwrap();
        assert_eq!(jumps[0].knot.dist_on(b, &r).unwrap(), delta);
    }
}

#[test]
fn continuous_profiles_have_no_jumps() {
    let ball = red(DomainSpec::ball(3, 1.0));
    assert!(power_profile(1.5).unwrap().jumps(&ball).unwrap().is_empty());
    assert!(shifted_power_profile(0.5).unwrap().bind(2.0).jumps(&ball).unwrap().is_empty());
    assert!(radial_bump(0.5, 0.2).unwrap().jumps(&ball).unwrap().is_empty());
}

#[test]
fn cheeger_profile_jump() {
    let r = red(DomainSpec::ball(3, 1.0));
    let s = 2.5;
    let p = cheeger_concentric(0.6).unwrap().bind(s);
    let jumps = p.jumps(&r).unwrap();
    assert_eq!(jumps.len(), 1);
    assert_eq!(jumps[0].t, 0.6);
    // distance at t = 0.6 in the unit ball is 0.4
    assert!((magnitude(&jumps[0], &r) - 0.4f64.powf(s - 1.0)).abs() < 1e-15);
    // the exponent depends on s until it is bound
    assert!(cheeger_concentric(0.6).unwrap().jumps(&r).is_err());
}

#[test]
fn annulus_bump_near_inner_sphere() {
    let d = make_domain(DomainSpec::annulus(3, 1.0, 3.0)).unwrap();
    let bump = radial_bump(1.011, 0.01).unwrap();
    let resolved = bump.resolve(&d.radial_reduction()).unwrap();
    assert!((resolved[0].t_lo - 1.001).abs() < 1e-15);
    assert!((resolved[0].t_hi - 1.021).abs() < 1e-15);
    // total variation with weight t^2, against direct quadrature of |u'|
    let shape = Shape::Bump { center: 1.011, width: 0.01 };
    let direct = integrate(
        |t| shape.slope_rest(t, t - 1.0).unwrap() * t * t,
        (1.001, 1.021),
        1e-13,
    )
    .unwrap()
    .value;
    let ev = Evaluator::new(&d).with_route(Route::Quadrature);
    let g = ev.term(&Profile::from(bump), Term::gradient(0.0)).unwrap().total();
    assert!((g - direct).abs() <= 1e-10 * direct, "{g} vs {direct}");
    // a bump that would cross the ridge at t = 2 is refused
    let crossing = radial_bump(2.0, 0.1).unwrap();
    assert!(crossing.resolve(&d.radial_reduction()).is_err() || ev.ratio_plain(&crossing.into(), 2.0).is_err());
}

#[test]
fn invalid_parameters() {
    assert!(annulus_indicator(0.5, 0.1).is_err());
    assert!(annulus_indicator(0.0, 0.1).is_err());
    assert!(power_profile(0.0).is_err());
    assert!(shifted_power_profile(-1.0).is_err());
    assert!(ball_shell_indicator(0.0).is_err());
    assert!(strip_slab_profile(0.5, 0.1, 1.0).is_err());
    assert!(strip_slab_profile(0.1, 0.5, 0.0).is_err());
    assert!(radial_bump(0.1, 0.2).is_err());
    assert!(cheeger_concentric(-1.0).is_err());
}

#[test]
fn labels() {
    let p = Profile::from(strip_slab_profile(0.01, 1.0, 0.5).unwrap());
    assert_eq!(p.family(), "slab");
    assert!(p.params_label().ends_with("scale=0.5"));
    assert_eq!(power_log_profile(1.0, 2.0, 1.0).unwrap().family(), "power-log");
}

fn fd(f: impl Fn(f64) -> f64, t: f64, h: f64) -> f64 {
    (f(t + h) - f(t - h)) / (2.0 * h)
}

proptest! {
    #[test]
    fn power_value_and_slope(coef in 0.1f64..3.0, a in 0.5f64..4.0, d in 0.05f64..0.9) {
        let sh = Shape::DistPower { coef, exponent: Exponent::Fixed(a) };
        prop_assert!((sh.value(d, d).unwrap() - coef * d.powf(a)).abs() <= 1e-14 * (1.0 + coef * d.powf(a)));
        let slope = sh.slope_rest(d, d).unwrap() * d.powf(sh.slope_power().unwrap());
        let numeric = fd(|t| sh.value(t, t).unwrap(), d, 1e-6);
        prop_assert!((slope - numeric).abs() <= 1e-6 * (1.0 + slope));
    }

    #[test]
    fn power_log_value_and_slope(a in 0.5f64..3.0, gamma in 0.0f64..3.0, d in 0.01f64..0.9) {
        let sh = Shape::DistPowerLog { coef: 1.0, exponent: Exponent::Fixed(a), gamma, scale: 1.0 };
        let v = sh.value(d, d).unwrap();
        prop_assert!((v - d.powf(a) * x_log(d, gamma).unwrap()).abs() <= 1e-13 * (1.0 + v));
        let slope = sh.slope_rest(d, d).unwrap() * d.powf(sh.slope_power().unwrap());
        let numeric = fd(|t| sh.value(t, t).unwrap(), d, 1e-7);
        prop_assert!((slope - numeric).abs() <= 1e-5 * (1.0 + slope));
    }

    #[test]
    fn bump_slope_matches_derivative(c in 0.5f64..2.0, w in 0.05f64..0.4, u in -0.99f64..0.99) {
        let sh = Shape::Bump { center: c, width: w };
        let t = c + u * w;
        let numeric = fd(|t| sh.value(t, 1.0).unwrap(), t, 1e-7 * w).abs();
        prop_assert!((sh.slope_rest(t, 1.0).unwrap() - numeric).abs() <= 1e-5 / w);
        prop_assert_eq!(sh.value(c, 1.0).unwrap(), 1.0);
        prop_assert_eq!(sh.value(c + w, 1.0).unwrap(), 0.0);
    }
}
