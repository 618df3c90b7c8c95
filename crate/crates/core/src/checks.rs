//! Randomised and grid property checks of the catalogue geometry.
//!
//! Every check reports its worst measured value next to the tolerance it
//! was held to, so a failing line says by how much it failed.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::fd;
use crate::functionals::meanlap_ratio;
use crate::geometry::{
    make_domain, scalar_semiconcavity_slack, DefectKind, Domain, DomainSpec, Geometry,
    ALGEBRAIC_TOL, FINITE_DIFFERENCE_TOL,
};
use crate::profiles::radial_bump;

/// Outcome of one property check on one domain.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub name: String,
    pub domain: String,
    /// Worst value seen, in the units of `tolerance`.
    pub measured: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl CheckOutcome {
    fn at_most(name: &str, domain: &Domain, measured: f64, tolerance: f64) -> Self {
        CheckOutcome {
            name: name.to_string(),
            domain: label(domain),
            measured,
            tolerance,
            pass: measured <= tolerance,
        }
    }
}

fn label(domain: &Domain) -> String {
    let p = domain.geom_params_label();
    if p.is_empty() {
        format!("{}(n={})", domain.kind_label(), domain.dim())
    } else {
        format!("{}(n={};{})", domain.kind_label(), domain.dim(), p)
    }
}

/// The sample catalogue the suite runs on.
pub fn catalogue() -> Vec<Domain> {
    [
        DomainSpec::ball(2, 1.0),
        DomainSpec::ball(3, 1.0),
        DomainSpec::strip(3, 1.0),
        DomainSpec::punctured_space(3),
        DomainSpec::punctured_ball(3, 2.0),
        DomainSpec::annulus(3, 1.0, 3.0),
    ]
    .into_iter()
    .map(|s| make_domain(s).expect("catalogue specs are valid"))
    .collect()
}

fn unit_vector(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let r = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if r > 0.1 && r <= 1.0 {
            return v.into_iter().map(|x| x / r).collect();
        }
    }
}

/// A point of the domain whose reduced coordinate stays `margin` away from
/// the range ends, ridge points and the origin.
fn interior_point(domain: &Domain, rng: &mut ChaCha8Rng, margin: f64) -> Vec<f64> {
    let red = domain.radial_reduction();
    let n = domain.dim();
    let hi = if red.t_max.is_finite() { red.t_max } else { 3.0 };
    loop {
        let t = rng.gen_range(red.t_min + margin..hi - margin);
        if red.ridge_points.iter().any(|r| (t - r).abs() < margin) {
            continue;
        }
        if domain.is_radial() {
            if t < margin {
                continue;
            }
            return unit_vector(rng, n).into_iter().map(|v| v * t).collect();
        }
        let mut x: Vec<f64> = (0..n - 1).map(|_| rng.gen_range(-5.0..5.0)).collect();
        x.push(t);
        return x;
    }
}

/// A point of the box around the domain, inside or not.
fn ambient_point(domain: &Domain, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let red = domain.radial_reduction();
    let reach = if red.t_max.is_finite() { red.t_max * 1.3 } else { 3.0 };
    let n = domain.dim();
    if domain.is_radial() {
        (0..n).map(|_| rng.gen_range(-reach..reach)).collect()
    } else {
        let mut x: Vec<f64> = (0..n - 1).map(|_| rng.gen_range(-2.0..2.0)).collect();
        x.push(rng.gen_range(-0.3 * reach..1.3 * reach));
        x
    }
}

/// `max | |∇d| - 1 |` by Richardson-extrapolated central differences.
pub fn eikonal(domain: &Domain, samples: usize, seed: u64) -> CheckOutcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for _ in 0..samples {
        let x = interior_point(domain, &mut rng, 1e-2);
        let g = fd::gradient(|p| domain.distance(p), &x, 1e-5);
        let norm = g.iter().map(|v| v * v).sum::<f64>().sqrt();
        worst = worst.max((norm - 1.0).abs());
    }
    CheckOutcome::at_most("eikonal", domain, worst, FINITE_DIFFERENCE_TOL)
}

/// `-min` of the second difference of `|x|² - d²` over random pairs.
pub fn convexity_a(domain: &Domain, samples: usize, seed: u64) -> Result<CheckOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = f64::INFINITY;
    for _ in 0..samples {
        let x = ambient_point(domain, &mut rng);
        let z: Vec<f64> = (0..domain.dim()).map(|_| rng.gen_range(-0.5..0.5)).collect();
        worst = worst.min(domain.convexity_defect(&DefectKind::A, &x, &z)?);
    }
    Ok(CheckOutcome::at_most("convexity-A", domain, -worst, ALGEBRAIC_TOL))
}

/// `-min` of the semiconcavity defect of `|x|²/(2r) - d` inside random
/// interior balls at distance `r` from the boundary.
pub fn convexity_atilde(domain: &Domain, balls: usize, per_ball: usize, seed: u64) -> Result<CheckOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = f64::INFINITY;
    let mut done = 0;
    while done < balls {
        let center = interior_point(domain, &mut rng, 0.1);
        let room = domain.distance(&center);
        let radius = rng.gen_range(0.2..0.8) * room;
        let r = room - radius;
        if r < 0.05 {
            continue;
        }
        done += 1;
        let kind = DefectKind::Atilde {
            c: 1.0 / r,
            center: center.clone(),
            radius,
        };
        for _ in 0..per_ball {
            let u = unit_vector(&mut rng, domain.dim());
            let v = unit_vector(&mut rng, domain.dim());
            let a = rng.gen_range(0.0..0.45) * radius;
            let b = rng.gen_range(0.0..0.45) * radius;
            let x: Vec<f64> = center.iter().zip(&u).map(|(c, u)| c + a * u).collect();
            let z: Vec<f64> = v.iter().map(|v| b * v).collect();
            worst = worst.min(domain.convexity_defect(&kind, &x, &z)?);
        }
    }
    Ok(CheckOutcome::at_most("convexity-Atilde", domain, -worst, ALGEBRAIC_TOL))
}

/// `-min` of `|b|²/|a| - (|a+b| + |a-b| - 2|a|)` over random vectors.
pub fn scalar_inequality(dim: usize, samples: usize, seed: u64) -> CheckOutcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = f64::INFINITY;
    for _ in 0..samples {
        let a: Vec<f64> = (0..dim).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let b: Vec<f64> = (0..dim).map(|_| rng.gen_range(-2.0..2.0)).collect();
        if a.iter().all(|v| *v == 0.0) {
            continue;
        }
        worst = worst.min(scalar_semiconcavity_slack(&a, &b));
    }
    CheckOutcome {
        name: "scalar-inequality".into(),
        domain: format!("R^{dim}"),
        measured: -worst,
        tolerance: ALGEBRAIC_TOL,
        pass: -worst <= ALGEBRAIC_TOL,
    }
}

/// Worst mismatch between finite-difference Hessian eigenvalues of `d`
/// and the principal-frame values.
pub fn hessian_eigenvalues(domain: &Domain, samples: usize, seed: u64) -> Result<CheckOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = domain.dim();
    let mut worst = 0.0f64;
    for _ in 0..samples {
        let x = interior_point(domain, &mut rng, 0.05);
        let h = fd::hessian(|p| domain.distance(p), &x, 1e-3);
        let m = DMatrix::from_fn(n, n, |i, j| h[i][j]);
        let mut got: Vec<f64> = SymmetricEigen::new(m).eigenvalues.iter().copied().collect();
        let mut want = domain.hessian_eigenvalues(&x)?;
        got.sort_by(f64::total_cmp);
        want.sort_by(f64::total_cmp);
        for (g, w) in got.iter().zip(&want) {
            worst = worst.max((g - w).abs());
        }
    }
    Ok(CheckOutcome::at_most("hessian-eigenvalues", domain, worst, 1e-5))
}

/// `max ((n-1) H_min - (-Δd))` over a grid of the reduced coordinate.
pub fn mean_curvature_bound(domain: &Domain, points: usize) -> Result<CheckOutcome> {
    let red = domain.radial_reduction();
    let h_min = domain.properties().curvature.h_min.unwrap_or(0.0);
    let bound = (domain.dim() as f64 - 1.0) * h_min;
    let mut worst = f64::NEG_INFINITY;
    for i in 0..points {
        let t = red.t_min + (i as f64 + 0.5) / points as f64 * (red.t_max - red.t_min);
        if let Ok(l) = red.neg_lap(t) {
            worst = worst.max(bound - l);
        }
    }
    Ok(CheckOutcome::at_most("neg-laplacian-lower-bound", domain, worst, ALGEBRAIC_TOL))
}

/// `max` of `-residual` of `(h + d)(-Δd) + (n-1)` on a grid, and separately
/// `max |residual|` on the inner branch of an annulus.
pub fn reach_residuals(domain: &Domain, points: usize) -> Result<Vec<CheckOutcome>> {
    let red = domain.radial_reduction();
    let n = domain.dim();
    let mut worst = f64::NEG_INFINITY;
    let mut inner = 0.0f64;
    for i in 0..points {
        let t = red.t_min + (i as f64 + 0.5) / points as f64 * (red.t_max - red.t_min);
        if red.ridge_points.iter().any(|r| (t - r).abs() < 1e-9) {
            continue;
        }
        let mut x = vec![0.0; n];
        x[n - 1] = t;
        let r = domain.convexity_defect(&DefectKind::ReachResidual, &x, &[])?;
        worst = worst.max(-r);
        if let Geometry::Annulus { inner: r0, outer } = *domain.geometry() {
            if t < 0.5 * (r0 + outer) {
                inner = inner.max(r.abs());
            }
        }
    }
    let mut out = vec![CheckOutcome::at_most("reach-residual", domain, worst, ALGEBRAIC_TOL)];
    if matches!(domain.geometry(), Geometry::Annulus { .. }) {
        out.push(CheckOutcome::at_most("reach-residual-inner-zero", domain, inner, ALGEBRAIC_TOL));
    }
    Ok(out)
}

/// Fits `area({d = t}) / area(∂Ω) - 1 ≈ a t + b t²` over `t ∈ [1e-4, 1e-2]`
/// on a ball and returns `|a / (-(n-1)H) - 1|`.
pub fn level_set_expansion(domain: &Domain) -> Option<CheckOutcome> {
    let Geometry::Ball { radius } = *domain.geometry() else {
        return None;
    };
    let red = domain.radial_reduction();
    let n1 = domain.dim() as f64 - 1.0;
    let k = 40;
    let ts: Vec<f64> = (0..k)
        .map(|i| 1e-4 * 100f64.powf(i as f64 / (k - 1) as f64))
        .collect();
    let a = DMatrix::from_fn(k, 2, |i, j| ts[i].powi(j as i32 + 1));
    let y = DVector::from_iterator(
        k,
        ts.iter()
            .map(|&t| red.weight(radius - t) / red.weight(radius) - 1.0),
    );
    let coef = a.svd(true, true).solve(&y, 1e-14).ok()?;
    let predicted = -n1 / radius;
    let rel = (coef[0] / predicted - 1.0).abs();
    Some(CheckOutcome::at_most("level-set-expansion", domain, rel, 1e-2))
}

/// `|x - ξ(x)|` against `d(x)`, and `d(ξ(x)) = 0`.
pub fn projection(domain: &Domain, samples: usize, seed: u64) -> Result<CheckOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for _ in 0..samples {
        let x = interior_point(domain, &mut rng, 1e-2);
        let xi = domain.project_to_boundary(&x)?;
        let gap = x.iter().zip(&xi).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
        let d = domain.distance(&x);
        worst = worst.max((gap - d).abs() / d).max(domain.distance(&xi));
    }
    Ok(CheckOutcome::at_most("projection", domain, worst, ALGEBRAIC_TOL))
}

/// Mean of `-Δd` against a thin bump at the boundary, relative to the
/// boundary value `(n-1)/R` (ball) or `-(n-1)/r0` (annulus inner sphere).
pub fn meanlap_limit(domain: &Domain, width: f64) -> Result<Option<CheckOutcome>> {
    let n1 = domain.dim() as f64 - 1.0;
    let (center, target) = match *domain.geometry() {
        Geometry::Ball { radius } => (radius - 1.5 * width, n1 / radius),
        Geometry::Annulus { inner, .. } => (inner + 1.5 * width, -n1 / inner),
        _ => return Ok(None),
    };
    let u = radial_bump(center, width)?.into();
    let v = meanlap_ratio(domain, &u)?;
    Ok(Some(CheckOutcome::at_most(
        "meanlap-boundary-limit",
        domain,
        (v / target - 1.0).abs(),
        2e-2,
    )))
}

/// The whole geometry suite on the sample catalogue.
pub fn geometry_suite(seed: u64) -> Result<Vec<CheckOutcome>> {
    let mut out = Vec::new();
    for (i, d) in catalogue().iter().enumerate() {
        let seed = seed.wrapping_add(i as u64 * 1000);
        out.push(eikonal(d, 2000, seed));
        out.push(convexity_a(d, 10_000, seed + 1)?);
        out.push(convexity_atilde(d, 50, 200, seed + 2)?);
        out.push(projection(d, 1000, seed + 3)?);
        let smooth = matches!(
            d.geometry(),
            Geometry::Ball { .. } | Geometry::Strip { .. } | Geometry::Annulus { .. }
        );
        if smooth {
            out.push(mean_curvature_bound(d, 1000)?);
            out.extend(reach_residuals(d, 1000)?);
        }
        if matches!(d.geometry(), Geometry::Ball { .. } | Geometry::Annulus { .. }) {
            out.push(hessian_eigenvalues(d, 500, seed + 4)?);
        }
        out.extend(level_set_expansion(d));
        out.extend(meanlap_limit(d, 1e-3)?);
    }
    out.push(scalar_inequality(3, 100_000, seed + 99));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_passes() {
        for c in geometry_suite(7).unwrap() {
            assert!(c.pass, "{c:?}");
        }
    }

    #[test]
    fn broken_bound_is_reported() {
        // the punctured ball has no C² boundary; its inner branch has -Δd < 0
        let d = make_domain(DomainSpec::punctured_ball(3, 2.0)).unwrap();
        let red = d.radial_reduction();
        assert!(red.neg_lap(0.5).unwrap() < 0.0);
        let c = CheckOutcome::at_most("x", &d, 1.0, 0.5);
        assert!(!c.pass);
    }
}
