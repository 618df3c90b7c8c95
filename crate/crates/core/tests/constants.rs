use hardylab::constants::{
    b1_bounds, cheeger_estimate, convergence_study, extrapolate, interpolation_endpoints_check,
    predicted_constant, ConstantParams, Extrapolation, PredictedValue, StudyMode, CONSTANT_IDS,
};
use hardylab::functionals::{Evaluator, Functional};
use hardylab::profiles::{annulus_indicator, ball_shell_indicator, Profile};
use hardylab::{make_domain, Domain, DomainSpec, HardyError};

fn dom(spec: DomainSpec) -> Domain {
    make_domain(spec).unwrap()
}

fn exact(id: &str, d: &Domain, params: ConstantParams) -> f64 {
    match predicted_constant(id, d, params).unwrap().value {
        PredictedValue::Exact(v) => v,
        other => panic!("{id}: expected an exact value, got {other}"),
    }
}

#[test]
fn interpolation_endpoints() {
    let e = interpolation_endpoints_check(3, 4.0);
    assert_eq!(e.general, 1.0);
    assert_eq!(e.convex, 3.0);
    let ann = dom(DomainSpec::annulus(3, 1.0, 3.0));
    // h = R = 1 sits halfway between the two ends
    assert_eq!(exact("2.13", &ann, ConstantParams::new(4.0)), 2.0);
    assert_eq!(exact("2.17", &ann, ConstantParams::new(3.0)), 1.0);
    // below the threshold (h + nR)/(h + R) = 2
    assert!(predicted_constant("2.13", &ann, ConstantParams::new(1.5)).is_err());
}

#[test]
fn catalogue_of_predictions() {
    let ball = dom(DomainSpec::ball(3, 1.0));
    let space = dom(DomainSpec::punctured_space(3));
    assert_eq!(exact("2.4", &space, ConstantParams::new(4.0)), 1.0);
    assert_eq!(exact("2.9", &ball, ConstantParams::new(2.0)), 1.0);
    assert_eq!(exact("2.13", &ball, ConstantParams::new(2.5)), 1.5);
    assert_eq!(exact("2.10", &ball, ConstantParams::new(2.0)), 1.0);
    assert_eq!(exact("2.11", &dom(DomainSpec::ball(3, 2.0)), ConstantParams::new(3.0)), 0.25);
    let chain = ConstantParams { k: 2, ..ConstantParams::new(3.5) };
    assert_eq!(exact("5.2", &dom(DomainSpec::ball(3, 2.0)), chain), 0.5);
    let lp = ConstantParams { p: 2.0, ..ConstantParams::new(3.0) };
    assert_eq!(exact("6.1", &ball, lp), 1.0);
    assert_eq!(exact("6.1-remainder", &ball, lp), 1.0);
}

#[test]
fn hypotheses_are_enforced() {
    let ann = dom(DomainSpec::annulus(3, 1.0, 3.0));
    let space = dom(DomainSpec::punctured_space(3));
    let hyp = |r| matches!(r, Err(HardyError::HypothesisViolation(_)));
    assert!(hyp(predicted_constant("2.9", &ann, ConstantParams::new(2.0))));
    assert!(hyp(predicted_constant("2.4", &space, ConstantParams::new(3.0))));
    assert!(hyp(predicted_constant("2.8", &space, ConstantParams::new(4.0))));
    assert!(hyp(predicted_constant("5.2", &ann, ConstantParams::new(3.0))));
    assert!(matches!(
        predicted_constant("7.7", &ann, ConstantParams::new(3.0)),
        Err(HardyError::Usage(_))
    ));
}

#[test]
fn every_id_resolves_somewhere() {
    let domains = [
        dom(DomainSpec::ball(3, 1.0)),
        dom(DomainSpec::punctured_space(3)),
        dom(DomainSpec::strip(3, 1.0)),
    ];
    for id in CONSTANT_IDS {
        let ok = domains.iter().any(|d| predicted_constant(id, d, ConstantParams::new(4.0)).is_ok());
        assert!(ok, "{id} never applies");
    }
}

#[test]
fn b1_brackets() {
    assert_eq!(b1_bounds(&dom(DomainSpec::ball(3, 1.0))).unwrap(), (2.0, 2.0));
    assert_eq!(b1_bounds(&dom(DomainSpec::strip(3, 1.0))).unwrap(), (0.0, 0.0));
    let (lo, hi) = b1_bounds(&dom(DomainSpec::annulus(3, 1.0, 3.0))).unwrap();
    assert_eq!(lo, -2.0);
    assert!((hi - 0.4).abs() < 1e-14);
    let ann = dom(DomainSpec::annulus(3, 1.0, 3.0));
    assert!(matches!(
        predicted_constant("B1", &ann, ConstantParams::default()).unwrap().value,
        PredictedValue::Bounds(..)
    ));
}

#[test]
fn cheeger_on_balls() {
    let c = cheeger_estimate(&dom(DomainSpec::ball(3, 2.0))).unwrap();
    assert_eq!(c.h_value, 1.5);
    assert!(c.bound_ok && c.isoperimetric_ok);
    assert!(cheeger_estimate(&dom(DomainSpec::strip(3, 1.0))).is_err());
}

#[test]
fn extrapolation() {
    let geometric: Vec<f64> = (0..8).map(|k| 1.0 + 0.5f64.powi(k)).collect();
    let (limit, how) = extrapolate(&geometric);
    assert_eq!(how, Extrapolation::Richardson);
    assert!((limit - 1.0).abs() < 1e-14);
    let (last, how) = extrapolate(&[3.0, 1.0, 2.5, 0.7, 0.9]);
    assert_eq!(how, Extrapolation::LastValue);
    assert_eq!(last, 0.9);
}

#[test]
fn punctured_space_ladder_against_closed_form() {
    let space = dom(DomainSpec::punctured_space(3));
    let s = 4.0;
    let ladder = [1e-1, 1e-2, 1e-3, 1e-4, 1e-5];
    let fam = |delta: f64| annulus_indicator(delta, 1.0).map(Profile::from);
    let report = convergence_study(
        &space,
        fam,
        &Functional::Plain { s },
        &ladder,
        s - 3.0,
        StudyMode::LimitFromAbove,
        1e-3,
    )
    .unwrap();
    assert!(report.pass, "{report:?}");
    assert!(report.is_strictly_decreasing());
    for p in &report.ladder {
        // (delta^-1 + 1) / (delta^-1 - 1)
        let oracle = (1.0 / p.parameter + 1.0) / (1.0 / p.parameter - 1.0);
        assert!((p.value - oracle).abs() <= 1e-10 * oracle);
    }
    assert_eq!(report.setup.domain, "punctured-space");
    assert_eq!(report.setup.family, "annulus");
}

#[test]
fn ball_shell_never_beats_the_convex_constant() {
    let ball = dom(DomainSpec::ball(3, 1.0));
    let ev = Evaluator::new(&ball);
    for s in [1.5, 2.0, 3.0] {
        let c = exact("2.9", &ball, ConstantParams::new(s));
        for delta in [0.5, 1e-2, 1e-5] {
            let u: Profile = ball_shell_indicator(delta).unwrap().into();
            assert!(ev.ratio_plain(&u, s).unwrap() >= c);
        }
    }
}

#[test]
fn ladder_must_decrease() {
    let space = dom(DomainSpec::punctured_space(3));
    let fam = |delta: f64| annulus_indicator(delta, 1.0).map(Profile::from);
    let f = Functional::Plain { s: 4.0 };
    assert!(convergence_study(&space, fam, &f, &[1e-2, 1e-1], 1.0, StudyMode::Limit, 1e-3).is_err());
    assert!(convergence_study(&space, fam, &f, &[], 1.0, StudyMode::Limit, 1e-3).is_err());
}
