use hardylab::geometry::{
    make_domain, scalar_semiconcavity_slack, DefectKind, Domain, DomainSpec, Reach, ALGEBRAIC_TOL,
};
use proptest::prelude::*;

fn dom(spec: DomainSpec) -> Domain {
    make_domain(spec).unwrap()
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * (1.0 + b.abs())
}

#[test]
fn construction() {
    let ball = dom(DomainSpec::ball(3, 1.0));
    assert_eq!(ball.inradius(), 1.0);
    assert_eq!(ball.reach(), Reach::Infinite);
    let ann = dom(DomainSpec::annulus(3, 1.0, 3.0));
    assert_eq!(ann.inradius(), 1.0);
    assert_eq!(ann.reach(), Reach::Finite(1.0));
    assert!(make_domain(DomainSpec::annulus(3, 3.0, 1.0)).is_err());
    assert!(make_domain(DomainSpec::ball(3, -1.0)).is_err());
    assert_eq!(dom(DomainSpec::punctured_ball(3, 2.0)).inradius(), 1.0);
    assert!(dom(DomainSpec::punctured_space(3)).inradius().is_infinite());
}

#[test]
fn distance_values() {
    assert!(close(dom(DomainSpec::ball(3, 1.0)).distance(&[0.25, 0.0, 0.0]), 0.75, 1e-15));
    assert!(close(dom(DomainSpec::annulus(3, 1.0, 3.0)).distance(&[1.4, 0.0, 0.0]), 0.4, 1e-15));
    assert!(close(dom(DomainSpec::strip(3, 1.0)).distance(&[5.0, -3.0, 1.7]), 0.3, 1e-15));
}

#[test]
fn neg_laplacian_values() {
    let ball = dom(DomainSpec::ball(3, 1.0));
    assert!(close(ball.neg_laplacian_d(&[0.5, 0.0, 0.0]).unwrap(), 4.0, 1e-14));
    let strip = dom(DomainSpec::strip(3, 1.0));
    assert_eq!(strip.neg_laplacian_d(&[0.0, 0.0, 0.3]).unwrap(), 0.0);
    let ann = dom(DomainSpec::annulus(3, 1.0, 3.0));
    assert!(close(ann.neg_laplacian_d(&[0.0, 1.5, 0.0]).unwrap(), -4.0 / 3.0, 1e-14));
    // ridge sphere of the annulus
    assert!(ann.neg_laplacian_d(&[2.0, 0.0, 0.0]).is_err());
}

#[test]
fn projections() {
    let p = dom(DomainSpec::ball(3, 1.0)).project_to_boundary(&[0.5, 0.0, 0.0]).unwrap();
    assert!(close(p[0], 1.0, 1e-15) && p[1] == 0.0 && p[2] == 0.0);
    let p = dom(DomainSpec::annulus(3, 1.0, 3.0)).project_to_boundary(&[1.4, 0.0, 0.0]).unwrap();
    assert!(close(p[0], 1.0, 1e-15));
    let p = dom(DomainSpec::strip(3, 1.0)).project_to_boundary(&[7.0, 2.0, 0.3]).unwrap();
    assert_eq!(p, vec![7.0, 2.0, 0.0]);
}

#[test]
fn reductions() {
    let red = dom(DomainSpec::ball(3, 1.0)).radial_reduction();
    assert!(red.ridge_points.is_empty());
    assert!(close(red.weight(0.5), 0.25, 1e-15));
    assert!(close(red.dist(0.25), 0.75, 1e-15));
    assert!(close(red.neg_lap(0.5).unwrap(), 4.0, 1e-14));
    assert_eq!(dom(DomainSpec::annulus(3, 1.0, 3.0)).radial_reduction().ridge_points, vec![2.0]);
    let pb = dom(DomainSpec::punctured_ball(3, 2.0)).radial_reduction();
    assert_eq!(pb.ridge_points, vec![1.0]);
    assert!(close(pb.dist(0.4), 0.4, 1e-15) && close(pb.dist(1.5), 0.5, 1e-15));
}

#[test]
fn curvature_table() {
    let ann = dom(DomainSpec::annulus(3, 1.0, 3.0)).properties();
    assert_eq!(ann.curvature.h_min, Some(-1.0));
    assert!(close(ann.curvature.h_mean.unwrap(), 0.2, 1e-14));
    assert!(!ann.satisfies_c);
    let strip = dom(DomainSpec::strip(3, 1.0)).properties();
    assert_eq!(strip.curvature.h_min, Some(0.0));
    assert_eq!(strip.curvature.h_max, Some(0.0));
    assert!(strip.satisfies_c);
    for n in [2, 3, 5] {
        assert_eq!(dom(DomainSpec::ball(n, 2.0)).reach(), Reach::Infinite);
    }
}

#[test]
fn defect_examples() {
    let b2 = dom(DomainSpec::ball(2, 1.0));
    let a = b2
        .convexity_defect(&DefectKind::A, &[0.5, 0.0], &[0.0, 0.1])
        .unwrap();
    // A = 2r - 1 inside the unit disc
    let r = 0.26f64.sqrt();
    let oracle = (2.0 * r - 1.0) * 2.0 - 2.0 * 0.0;
    assert!(close(a, oracle, 1e-12), "{a} vs {oracle}");
    assert!(close(a, 0.03961, 1e-4));
    let ann = dom(DomainSpec::annulus(3, 1.0, 3.0));
    let inner = ann
        .convexity_defect(&DefectKind::ReachResidual, &[1.5, 0.0, 0.0], &[])
        .unwrap();
    assert!(inner.abs() <= ALGEBRAIC_TOL);
    let outer = ann
        .convexity_defect(&DefectKind::ReachResidual, &[2.5, 0.0, 0.0], &[])
        .unwrap();
    assert!(close(outer, 3.2, 1e-14));
}

/// Fibonacci lattice on the sphere of radius `r`.
fn sphere_points(r: f64, count: usize) -> Vec<[f64; 3]> {
    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    (0..count)
        .map(|i| {
            let z = 1.0 - 2.0 * (i as f64 + 0.5) / count as f64;
            let rho = (1.0 - z * z).sqrt();
            let phi = golden * i as f64;
            [r * rho * phi.cos(), r * rho * phi.sin(), r * z]
        })
        .collect()
}

fn dist3(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt()
}

/// Whether the nearest sampled boundary points of `x` are spread out,
/// i.e. `x` has more than one nearest point in the set.
fn multiple_projections(x: &[f64; 3], boundary: &[[f64; 3]], slack: f64, spread: f64) -> (bool, f64) {
    let d = boundary.iter().map(|y| dist3(x, y)).fold(f64::INFINITY, f64::min);
    let near: Vec<&[f64; 3]> = boundary.iter().filter(|y| dist3(x, y) <= d + slack).collect();
    let far = near
        .iter()
        .flat_map(|a| near.iter().map(move |b| dist3(a, b)))
        .fold(0.0, f64::max);
    (far > spread, d)
}

/// Brute-force reach of the closed annulus `1 <= |x| <= 3`: the smallest
/// distance, over exterior grid points, at which projections stop being
/// unique.
#[test]
fn annulus_reach_by_unique_projection() {
    let mut boundary = sphere_points(1.0, 3000);
    boundary.extend(sphere_points(3.0, 3000));
    let mut reach = f64::INFINITY;
    // exterior points inside the hole and outside the outer sphere
    let dirs = sphere_points(1.0, 40);
    let mut radii: Vec<f64> = (0..20).map(|k| k as f64 * 0.05).collect();
    radii.extend([3.2, 3.5, 4.0, 5.0]);
    for &rho in &radii {
        for u in &dirs {
            let x = [rho * u[0], rho * u[1], rho * u[2]];
            let (multi, d) = multiple_projections(&x, &boundary, 1e-3, 0.5);
            if multi {
                reach = reach.min(d);
            }
        }
    }
    let analytic = dom(DomainSpec::annulus(3, 1.0, 3.0)).reach().as_f64();
    assert!((reach - analytic).abs() < 2e-2, "oracle {reach} vs {analytic}");
}

#[test]
fn ball_reach_is_infinite_by_unique_projection() {
    let boundary = sphere_points(1.0, 3000);
    for &rho in &[1.1, 1.5, 2.0, 4.0, 8.0] {
        for u in sphere_points(1.0, 30) {
            let x = [rho * u[0], rho * u[1], rho * u[2]];
            assert!(!multiple_projections(&x, &boundary, 1e-3, 0.5).0);
        }
    }
    assert!(dom(DomainSpec::ball(3, 1.0)).reach().is_infinite());
}

fn ball_point() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-0.57f64..0.57, 3)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn distance_is_one_lipschitz(x in ball_point(), y in ball_point()) {
        let d = dom(DomainSpec::ball(3, 1.0));
        let gap = (d.distance(&x) - d.distance(&y)).abs();
        let norm = x.iter().zip(&y).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
        prop_assert!(gap <= norm + 1e-15);
    }

    #[test]
    fn defect_a_nonnegative_on_annulus(
        x in prop::collection::vec(-3.5f64..3.5, 3),
        z in prop::collection::vec(-1.0f64..1.0, 3),
    ) {
        let d = dom(DomainSpec::annulus(3, 1.0, 3.0));
        prop_assert!(d.convexity_defect(&DefectKind::A, &x, &z).unwrap() >= -ALGEBRAIC_TOL);
    }

    #[test]
    fn scalar_slack_nonnegative(
        a in prop::collection::vec(-5.0f64..5.0, 2..6),
        b in prop::collection::vec(-5.0f64..5.0, 6),
    ) {
        prop_assume!(a.iter().any(|v| v.abs() > 1e-6));
        let b = &b[..a.len()];
        prop_assert!(scalar_semiconcavity_slack(&a, b) >= -ALGEBRAIC_TOL);
    }

    #[test]
    fn neg_laplacian_matches_curvature_off_ridge(t in 1.01f64..2.99) {
        prop_assume!((t - 2.0).abs() > 1e-3);
        let d = dom(DomainSpec::annulus(3, 1.0, 3.0));
        let x = [0.0, 0.0, t];
        let a = d.neg_laplacian_d(&x).unwrap();
        let b = d.neg_laplacian_from_curvature(&x).unwrap();
        prop_assert!((a - b).abs() <= 1e-12 * (1.0 + a.abs()));
    }
}
