//! Exact analytic geometry for the domain catalogue.
//!
//! Radial domains are centred at the origin; the strip is the slab
//! `0 < x_n < 2R` across the last coordinate.

use std::fmt;

use crate::error::{HardyError, Result};

/// Default tolerance for algebraic identities and ridge proximity.
pub const ALGEBRAIC_TOL: f64 = 1e-12;
/// Default tolerance for finite-difference checks.
pub const FINITE_DIFFERENCE_TOL: f64 = 1e-6;

/// One of the catalogue geometries with its lengths.
#[derive(Debug, Clone, PartialEq)]
pub enum Geometry {
    /// Ball `B_R`.
    Ball { radius: f64 },
    /// Slab `0 < x_n < 2R`; `half_width` is `R`.
    Strip { half_width: f64 },
    /// `R^n \ {0}`.
    PuncturedSpace,
    /// `B_{R_U} \ {0}`.
    PuncturedBall { outer_radius: f64 },
    /// `r0 < |x| < R0`.
    Annulus { inner: f64, outer: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct DomainSpec {
    pub dim: usize,
    pub geometry: Geometry,
}

impl DomainSpec {
    pub fn ball(dim: usize, radius: f64) -> Self {
        DomainSpec {
            dim,
            geometry: Geometry::Ball { radius },
        }
    }

    pub fn strip(dim: usize, half_width: f64) -> Self {
        DomainSpec {
            dim,
            geometry: Geometry::Strip { half_width },
        }
    }

    pub fn punctured_space(dim: usize) -> Self {
        DomainSpec {
            dim,
            geometry: Geometry::PuncturedSpace,
        }
    }

    pub fn punctured_ball(dim: usize, outer_radius: f64) -> Self {
        DomainSpec {
            dim,
            geometry: Geometry::PuncturedBall { outer_radius },
        }
    }

    pub fn annulus(dim: usize, inner: f64, outer: f64) -> Self {
        DomainSpec {
            dim,
            geometry: Geometry::Annulus { inner, outer },
        }
    }

    fn validate(&self) -> Result<()> {
        if self.dim < 2 {
            return Err(HardyError::InvalidSpec(format!(
                "dimension must be at least 2, got {}",
                self.dim
            )));
        }
        let positive = |name: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(HardyError::InvalidSpec(format!(
                    "{name} must be a positive length, got {v}"
                )))
            }
        };
        match self.geometry {
            Geometry::Ball { radius } => positive("radius", radius),
            Geometry::Strip { half_width } => positive("half-width", half_width),
            Geometry::PuncturedSpace => Ok(()),
            Geometry::PuncturedBall { outer_radius } => positive("outer radius", outer_radius),
            Geometry::Annulus { inner, outer } => {
                positive("inner radius", inner)?;
                positive("outer radius", outer)?;
                if inner >= outer {
                    return Err(HardyError::InvalidSpec(format!(
                        "annulus needs inner < outer, got {inner} >= {outer}"
                    )));
                }
                Ok(())
            }
        }
    }
}

/// Reach of the closure of a domain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Reach {
    Finite(f64),
    Infinite,
}

impl Reach {
    pub fn as_f64(self) -> f64 {
        match self {
            Reach::Finite(h) => h,
            Reach::Infinite => f64::INFINITY,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Reach::Infinite)
    }
}

impl fmt::Display for Reach {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Reach::Finite(h) => write!(f, "{h}"),
            Reach::Infinite => f.write_str("inf"),
        }
    }
}

/// A smooth boundary component with all principal curvatures equal.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryComponent {
    pub label: &'static str,
    /// Common principal curvature, signed so that `-Δd = (n-1) H` on it.
    pub kappa: f64,
    /// Normalised area (sphere-area constant set to one; planes per unit area).
    pub area: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CurvatureSummary {
    /// Infimum of the mean curvature; `None` when the boundary is not C².
    pub h_min: Option<f64>,
    pub h_max: Option<f64>,
    /// Area-weighted mean curvature (bounded C² boundaries only).
    pub h_mean: Option<f64>,
    pub components: Vec<BoundaryComponent>,
    pub reach: Reach,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DomainProperties {
    pub curvature: CurvatureSummary,
    pub inradius: f64,
    pub satisfies_c: bool,
    /// Whether the boundary is C² with a uniform interior sphere condition.
    pub smooth_boundary: bool,
    pub bounded: bool,
}

/// How the reduced coordinate relates to the ambient space.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReductionMode {
    /// `t = |x|`, level sets are concentric spheres.
    Radial,
    /// `t = x_n`, level sets are hyperplanes (per unit transverse area).
    Slab,
}

/// A maximal interval of the reduced coordinate on which `d` is affine:
/// `t = anchor + sign * d` for `d` in `[0, d_max]` (or the part of it
/// inside the reduced range).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Branch {
    pub anchor: f64,
    pub sign: f64,
    pub t_lo: f64,
    pub t_hi: f64,
}

impl Branch {
    pub fn contains(&self, t: f64) -> bool {
        t >= self.t_lo && t <= self.t_hi
    }

    pub fn dist(&self, t: f64) -> f64 {
        self.sign * (t - self.anchor)
    }

    pub fn coordinate(&self, d: f64) -> f64 {
        self.anchor + self.sign * d
    }

    /// Range of the distance on this branch, in increasing order.
    pub fn dist_range(&self) -> (f64, f64) {
        let a = self.dist(self.t_lo);
        let b = self.dist(self.t_hi);
        (a.min(b), a.max(b))
    }
}

/// One-dimensional co-area reduction of a domain.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialReduction {
    pub dim: usize,
    pub mode: ReductionMode,
    pub t_min: f64,
    pub t_max: f64,
    pub ridge_points: Vec<f64>,
    pub branches: Vec<Branch>,
}

impl RadialReduction {
    /// Normalised co-area weight: `t^(n-1)` (radial) or `1` (slab).
    pub fn weight(&self, t: f64) -> f64 {
        match self.mode {
            ReductionMode::Radial => t.powi(self.dim as i32 - 1),
            ReductionMode::Slab => 1.0,
        }
    }

    pub fn branch_of(&self, t: f64) -> Option<&Branch> {
        self.branches.iter().find(|b| b.contains(t))
    }

    pub fn dist(&self, t: f64) -> f64 {
        self.branch_of(t).map_or(0.0, |b| b.dist(t).max(0.0))
    }

    /// `-Δd` at reduced coordinate `t`; undefined on ridge points.
    pub fn neg_lap(&self, t: f64) -> Result<f64> {
        if self
            .ridge_points
            .iter()
            .any(|&r| (t - r).abs() <= ALGEBRAIC_TOL * r.abs().max(1.0))
        {
            return Err(HardyError::OnRidge { t });
        }
        let branch = self
            .branch_of(t)
            .ok_or_else(|| HardyError::OutOfRange(format!("t = {t} outside reduced range")))?;
        Ok(self.neg_lap_on(branch, t))
    }

    /// `-Δd` on a given branch, without the ridge check.
    pub fn neg_lap_on(&self, branch: &Branch, t: f64) -> f64 {
        match self.mode {
            ReductionMode::Slab => 0.0,
            // d = anchor' ± t: Δd = ±(n-1)/t with the sign of d'(t)
            ReductionMode::Radial => -branch.sign * (self.dim as f64 - 1.0) / t,
        }
    }

    /// Jump of `d'` across each ridge point; `-Δd` carries a point mass of
    /// this size (times the co-area weight) there.
    pub fn ridge_masses(&self) -> Vec<(f64, f64)> {
        self.ridge_points.iter().map(|&t| (t, 2.0)).collect()
    }
}

/// A validated catalogue domain.
#[derive(Debug, Clone, PartialEq)]
pub struct Domain {
    spec: DomainSpec,
    ridge_tol: f64,
}

/// Builds a domain from a validated spec.
pub fn make_domain(spec: DomainSpec) -> Result<Domain> {
    spec.validate()?;
    Ok(Domain {
        spec,
        ridge_tol: ALGEBRAIC_TOL,
    })
}

fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// Which convexity residual to evaluate in [`Domain::convexity_defect`].
#[derive(Debug, Clone, PartialEq)]
pub enum DefectKind {
    /// Second difference of `A = |x|^2 - d^2`.
    A,
    /// Second difference of `C|x|^2/2 - d` minus `(C - 1/r)|z|^2`, inside
    /// the ball `B(center, radius)` whose distance to the boundary is `r`.
    Atilde {
        c: f64,
        center: Vec<f64>,
        radius: f64,
    },
    /// `(h + d)(-Δd) + (n - 1)` with `h` the reach of the closure.
    ReachResidual,
}

impl Domain {
    pub fn spec(&self) -> &DomainSpec {
        &self.spec
    }

    pub fn dim(&self) -> usize {
        self.spec.dim
    }

    pub fn geometry(&self) -> &Geometry {
        &self.spec.geometry
    }

    /// Overrides the ridge/singularity proximity tolerance.
    pub fn with_ridge_tolerance(mut self, tol: f64) -> Self {
        self.ridge_tol = tol;
        self
    }

    /// Short identifier used in reports.
    pub fn kind_label(&self) -> &'static str {
        match self.spec.geometry {
            Geometry::Ball { .. } => "ball",
            Geometry::Strip { .. } => "strip",
            Geometry::PuncturedSpace => "punctured-space",
            Geometry::PuncturedBall { .. } => "punctured-ball",
            Geometry::Annulus { .. } => "annulus",
        }
    }

    /// Geometry lengths as `key=value` pairs joined by `;`.
    pub fn geom_params_label(&self) -> String {
        match self.spec.geometry {
            Geometry::Ball { radius } => format!("R={radius}"),
            Geometry::Strip { half_width } => format!("R={half_width}"),
            Geometry::PuncturedSpace => String::new(),
            Geometry::PuncturedBall { outer_radius } => format!("R_U={outer_radius}"),
            Geometry::Annulus { inner, outer } => format!("r0={inner};R0={outer}"),
        }
    }

    /// `sup d`; infinite for the punctured space.
    pub fn inradius(&self) -> f64 {
        match self.spec.geometry {
            Geometry::Ball { radius } => radius,
            Geometry::Strip { half_width } => half_width,
            Geometry::PuncturedSpace => f64::INFINITY,
            Geometry::PuncturedBall { outer_radius } => outer_radius / 2.0,
            Geometry::Annulus { inner, outer } => (outer - inner) / 2.0,
        }
    }

    /// Whether `-Δd >= 0` holds in the sense of distributions.
    pub fn satisfies_c(&self) -> bool {
        matches!(
            self.spec.geometry,
            Geometry::Ball { .. } | Geometry::Strip { .. }
        )
    }

    pub fn is_radial(&self) -> bool {
        !matches!(self.spec.geometry, Geometry::Strip { .. })
    }

    fn check_dim(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.spec.dim {
            return Err(HardyError::DimensionMismatch {
                expected: self.spec.dim,
                got: x.len(),
            });
        }
        Ok(())
    }

    /// Reduced coordinate of a point: `|x|` or `x_n`.
    pub fn reduced_coordinate(&self, x: &[f64]) -> f64 {
        if self.is_radial() {
            norm(x)
        } else {
            x[x.len() - 1]
        }
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        let t = self.reduced_coordinate(x);
        match self.spec.geometry {
            Geometry::Ball { radius } => t < radius,
            Geometry::Strip { half_width } => t > 0.0 && t < 2.0 * half_width,
            Geometry::PuncturedSpace => t > 0.0,
            Geometry::PuncturedBall { outer_radius } => t > 0.0 && t < outer_radius,
            Geometry::Annulus { inner, outer } => t > inner && t < outer,
        }
    }

    /// Distance to the complement; zero outside the domain.
    pub fn distance(&self, x: &[f64]) -> f64 {
        let t = self.reduced_coordinate(x);
        let d = match self.spec.geometry {
            Geometry::Ball { radius } => radius - t,
            Geometry::Strip { half_width } => t.min(2.0 * half_width - t),
            Geometry::PuncturedSpace => t,
            Geometry::PuncturedBall { outer_radius } => t.min(outer_radius - t),
            Geometry::Annulus { inner, outer } => (t - inner).min(outer - t),
        };
        d.max(0.0)
    }

    fn ridge_check(&self, t: f64) -> Result<()> {
        let red = self.radial_reduction();
        for &r in &red.ridge_points {
            if (t - r).abs() <= self.ridge_tol * r.abs().max(1.0) {
                return Err(HardyError::OnRidge { t });
            }
        }
        Ok(())
    }

    fn interior_reduced(&self, x: &[f64]) -> Result<f64> {
        self.check_dim(x)?;
        if !self.contains(x) {
            return Err(HardyError::OutOfRange("point is not in the domain".into()));
        }
        let t = self.reduced_coordinate(x);
        if self.is_radial() && t <= self.ridge_tol {
            return Err(HardyError::AtSingularity { radius: t });
        }
        self.ridge_check(t)?;
        Ok(t)
    }

    /// Exact `-Δd` at an interior point off the ridge and off the origin.
    pub fn neg_laplacian_d(&self, x: &[f64]) -> Result<f64> {
        let t = self.interior_reduced(x)?;
        let red = self.radial_reduction();
        let branch = red
            .branch_of(t)
            .expect("interior point lies on some branch");
        Ok(red.neg_lap_on(branch, t))
    }

    /// Principal curvature of the boundary component that `x` projects to,
    /// when that component is a C² hypersurface.
    pub fn projected_curvature(&self, x: &[f64]) -> Result<Option<f64>> {
        let t = self.interior_reduced(x)?;
        Ok(match self.spec.geometry {
            Geometry::Ball { radius } => Some(1.0 / radius),
            Geometry::Strip { .. } => Some(0.0),
            Geometry::PuncturedSpace => None,
            Geometry::PuncturedBall { outer_radius } => {
                if t < outer_radius / 2.0 {
                    None
                } else {
                    Some(1.0 / outer_radius)
                }
            }
            Geometry::Annulus { inner, outer } => {
                if t < (inner + outer) / 2.0 {
                    Some(-1.0 / inner)
                } else {
                    Some(1.0 / outer)
                }
            }
        })
    }

    /// `Σ κ_i / (1 - κ_i d)` from the principal curvatures of the projected
    /// boundary point.
    pub fn neg_laplacian_from_curvature(&self, x: &[f64]) -> Result<f64> {
        let kappa = self.projected_curvature(x)?.ok_or_else(|| {
            HardyError::HypothesisViolation("projection onto the puncture has no curvature".into())
        })?;
        let d = self.distance(x);
        Ok((self.spec.dim as f64 - 1.0) * kappa / (1.0 - kappa * d))
    }

    /// Eigenvalues of `D²d` in a principal frame: `-κ/(1-κ d)` with
    /// multiplicity `n-1`, then `0` for the normal direction.
    pub fn hessian_eigenvalues(&self, x: &[f64]) -> Result<Vec<f64>> {
        let n = self.spec.dim;
        let t = self.interior_reduced(x)?;
        let tangential = match self.projected_curvature(x)? {
            Some(kappa) => -kappa / (1.0 - kappa * self.distance(x)),
            // d = |x| near the puncture
            None => 1.0 / t,
        };
        let mut eig = vec![tangential; n - 1];
        eig.push(0.0);
        Ok(eig)
    }

    /// Nearest boundary point `ξ(x) = x - d(x) ∇d(x)`.
    pub fn project_to_boundary(&self, x: &[f64]) -> Result<Vec<f64>> {
        let t = self.interior_reduced(x)?;
        let scale_to = |target: f64| x.iter().map(|v| v * target / t).collect::<Vec<_>>();
        Ok(match self.spec.geometry {
            Geometry::Ball { radius } => scale_to(radius),
            Geometry::Strip { half_width } => {
                let mut y = x.to_vec();
                let last = y.len() - 1;
                y[last] = if t < half_width { 0.0 } else { 2.0 * half_width };
                y
            }
            Geometry::PuncturedSpace => vec![0.0; x.len()],
            Geometry::PuncturedBall { outer_radius } => {
                if t < outer_radius / 2.0 {
                    vec![0.0; x.len()]
                } else {
                    scale_to(outer_radius)
                }
            }
            Geometry::Annulus { inner, outer } => {
                if t < (inner + outer) / 2.0 {
                    scale_to(inner)
                } else {
                    scale_to(outer)
                }
            }
        })
    }

    /// The one-dimensional co-area reduction.
    pub fn radial_reduction(&self) -> RadialReduction {
        let dim = self.spec.dim;
        let radial = |t_min: f64, t_max: f64, ridge: Vec<f64>, branches: Vec<Branch>| {
            RadialReduction {
                dim,
                mode: ReductionMode::Radial,
                t_min,
                t_max,
                ridge_points: ridge,
                branches,
            }
        };
        match self.spec.geometry {
            Geometry::Ball { radius } => radial(
                0.0,
                radius,
                vec![],
                vec![Branch {
                    anchor: radius,
                    sign: -1.0,
                    t_lo: 0.0,
                    t_hi: radius,
                }],
            ),
            Geometry::Strip { half_width } => RadialReduction {
                dim,
                mode: ReductionMode::Slab,
                t_min: 0.0,
                t_max: 2.0 * half_width,
                ridge_points: vec![half_width],
                branches: vec![
                    Branch {
                        anchor: 0.0,
                        sign: 1.0,
                        t_lo: 0.0,
                        t_hi: half_width,
                    },
                    Branch {
                        anchor: 2.0 * half_width,
                        sign: -1.0,
                        t_lo: half_width,
                        t_hi: 2.0 * half_width,
                    },
                ],
            },
            Geometry::PuncturedSpace => radial(
                0.0,
                f64::INFINITY,
                vec![],
                vec![Branch {
                    anchor: 0.0,
                    sign: 1.0,
                    t_lo: 0.0,
                    t_hi: f64::INFINITY,
                }],
            ),
            Geometry::PuncturedBall { outer_radius } => {
                let mid = outer_radius / 2.0;
                radial(
                    0.0,
                    outer_radius,
                    vec![mid],
                    vec![
                        Branch {
                            anchor: 0.0,
                            sign: 1.0,
                            t_lo: 0.0,
                            t_hi: mid,
                        },
                        Branch {
                            anchor: outer_radius,
                            sign: -1.0,
                            t_lo: mid,
                            t_hi: outer_radius,
                        },
                    ],
                )
            }
            Geometry::Annulus { inner, outer } => {
                let mid = (inner + outer) / 2.0;
                radial(
                    inner,
                    outer,
                    vec![mid],
                    vec![
                        Branch {
                            anchor: inner,
                            sign: 1.0,
                            t_lo: inner,
                            t_hi: mid,
                        },
                        Branch {
                            anchor: outer,
                            sign: -1.0,
                            t_lo: mid,
                            t_hi: outer,
                        },
                    ],
                )
            }
        }
    }

    /// Reach of the closure.
    pub fn reach(&self) -> Reach {
        match self.spec.geometry {
            Geometry::Annulus { inner, .. } => Reach::Finite(inner),
            // Ball, slab, and the closures R^n and a closed ball are convex.
            _ => Reach::Infinite,
        }
    }

    /// Curvature data, inradius and condition-(C) flag.
    pub fn properties(&self) -> DomainProperties {
        let n = self.spec.dim as i32;
        let sphere = |label, kappa: f64, r: f64| BoundaryComponent {
            label,
            kappa,
            area: r.powi(n - 1),
        };
        let (components, smooth, bounded) = match self.spec.geometry {
            Geometry::Ball { radius } => (vec![sphere("sphere", 1.0 / radius, radius)], true, true),
            Geometry::Strip { .. } => (
                vec![
                    BoundaryComponent {
                        label: "lower-plane",
                        kappa: 0.0,
                        area: 1.0,
                    },
                    BoundaryComponent {
                        label: "upper-plane",
                        kappa: 0.0,
                        area: 1.0,
                    },
                ],
                true,
                false,
            ),
            Geometry::PuncturedSpace => (vec![], false, false),
            Geometry::PuncturedBall { outer_radius } => (
                vec![sphere("outer-sphere", 1.0 / outer_radius, outer_radius)],
                false,
                true,
            ),
            Geometry::Annulus { inner, outer } => (
                vec![
                    sphere("inner-sphere", -1.0 / inner, inner),
                    sphere("outer-sphere", 1.0 / outer, outer),
                ],
                true,
                true,
            ),
        };
        let (h_min, h_max) = if smooth {
            let lo = components.iter().map(|c| c.kappa).fold(f64::INFINITY, f64::min);
            let hi = components
                .iter()
                .map(|c| c.kappa)
                .fold(f64::NEG_INFINITY, f64::max);
            (Some(lo), Some(hi))
        } else {
            (None, None)
        };
        let h_mean = if smooth && bounded {
            let area: f64 = components.iter().map(|c| c.area).sum();
            Some(components.iter().map(|c| c.kappa * c.area).sum::<f64>() / area)
        } else {
            None
        };
        DomainProperties {
            curvature: CurvatureSummary {
                h_min,
                h_max,
                h_mean,
                components,
                reach: self.reach(),
            },
            inradius: self.inradius(),
            satisfies_c: self.satisfies_c(),
            smooth_boundary: smooth,
            bounded,
        }
    }

    /// Smallest `-Δd` over a uniform grid of the reduced coordinate (ridge
    /// points excluded); used to cross-check the condition-(C) flag.
    pub fn sampled_min_neg_laplacian(&self, samples: usize) -> f64 {
        let red = self.radial_reduction();
        let t_max = if red.t_max.is_finite() { red.t_max } else { 10.0 };
        (1..samples)
            .map(|i| red.t_min + (t_max - red.t_min) * i as f64 / samples as f64)
            .filter_map(|t| red.neg_lap(t).ok())
            .fold(f64::INFINITY, f64::min)
    }

    /// Convexity residuals behind the semiconcavity and reach estimates.
    pub fn convexity_defect(&self, kind: &DefectKind, x: &[f64], z: &[f64]) -> Result<f64> {
        self.check_dim(x)?;
        match kind {
            DefectKind::A => {
                self.check_dim(z)?;
                let a = |p: &[f64]| {
                    let d = self.distance(p);
                    p.iter().map(|v| v * v).sum::<f64>() - d * d
                };
                let (plus, minus) = shifted(x, z);
                Ok(a(&plus) + a(&minus) - 2.0 * a(x))
            }
            DefectKind::Atilde { c, center, radius } => {
                self.check_dim(z)?;
                self.check_dim(center)?;
                let r = self.distance(center) - radius;
                if !(r > 0.0) || !self.contains(center) {
                    return Err(HardyError::BallNotInterior);
                }
                let (plus, minus) = shifted(x, z);
                let inside = |p: &[f64]| {
                    p.iter()
                        .zip(center)
                        .map(|(a, b)| (a - b) * (a - b))
                        .sum::<f64>()
                        .sqrt()
                        < *radius
                };
                if !(inside(x) && inside(&plus) && inside(&minus)) {
                    return Err(HardyError::BallNotInterior);
                }
                let at = |p: &[f64]| c * p.iter().map(|v| v * v).sum::<f64>() / 2.0 - self.distance(p);
                let z2: f64 = z.iter().map(|v| v * v).sum();
                Ok(at(&plus) + at(&minus) - 2.0 * at(x) - (c - 1.0 / r) * z2)
            }
            DefectKind::ReachResidual => {
                if matches!(
                    self.spec.geometry,
                    Geometry::PuncturedSpace | Geometry::PuncturedBall { .. }
                ) {
                    return Err(HardyError::HypothesisViolation(
                        "reach residual is only applied to ball, strip and annulus".into(),
                    ));
                }
                let neg_lap = self.neg_laplacian_d(x)?;
                Ok(match self.reach() {
                    Reach::Infinite => neg_lap,
                    Reach::Finite(h) => {
                        (h + self.distance(x)) * neg_lap + (self.spec.dim as f64 - 1.0)
                    }
                })
            }
        }
    }
}

fn shifted(x: &[f64], z: &[f64]) -> (Vec<f64>, Vec<f64>) {
    (
        x.iter().zip(z).map(|(a, b)| a + b).collect(),
        x.iter().zip(z).map(|(a, b)| a - b).collect(),
    )
}

/// `|a+b| + |a-b| - 2|a|` and its upper bound `|b|²/|a|`; returns
/// `bound - lhs`, which is nonnegative for `a ≠ 0`.
pub fn scalar_semiconcavity_slack(a: &[f64], b: &[f64]) -> f64 {
    let na = norm(a);
    let (plus, minus) = shifted(a, b);
    let lhs = norm(&plus) + norm(&minus) - 2.0 * na;
    let nb2: f64 = b.iter().map(|v| v * v).sum();
    nb2 / na - lhs
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ball3() -> Domain {
        make_domain(DomainSpec::ball(3, 1.0)).unwrap()
    }

    fn annulus() -> Domain {
        make_domain(DomainSpec::annulus(3, 1.0, 3.0)).unwrap()
    }

    #[test]
    fn construction_and_validation() {
        let b = ball3();
        assert_eq!(b.inradius(), 1.0);
        assert!(b.reach().is_infinite());
        let a = annulus();
        assert_eq!(a.inradius(), 1.0);
        assert_eq!(a.reach(), Reach::Finite(1.0));
        assert!(matches!(
            make_domain(DomainSpec::annulus(3, 3.0, 1.0)),
            Err(HardyError::InvalidSpec(_))
        ));
        assert!(make_domain(DomainSpec::ball(1, 1.0)).is_err());
        assert!(make_domain(DomainSpec::strip(3, 0.0)).is_err());
        assert!(make_domain(DomainSpec::punctured_ball(3, -1.0)).is_err());
        let pb = make_domain(DomainSpec::punctured_ball(3, 2.0)).unwrap();
        assert_eq!(pb.inradius(), 1.0);
        let ps = make_domain(DomainSpec::punctured_space(3)).unwrap();
        assert!(ps.inradius().is_infinite());
        assert!(!ps.satisfies_c());
        assert!(make_domain(DomainSpec::strip(3, 1.0)).unwrap().satisfies_c());
    }

    #[test]
    fn distances() {
        assert_eq!(ball3().distance(&[0.25, 0.0, 0.0]), 0.75);
        assert!((annulus().distance(&[1.4, 0.0, 0.0]) - 0.4).abs() < 1e-15);
        let s = make_domain(DomainSpec::strip(3, 1.0)).unwrap();
        assert!((s.distance(&[5.0, -2.0, 1.7]) - 0.3).abs() < 1e-15);
        assert_eq!(s.distance(&[0.0, 0.0, 2.5]), 0.0);
        assert_eq!(ball3().distance(&[2.0, 0.0, 0.0]), 0.0);
    }

    #[test]
    fn neg_laplacian_values() {
        assert!((ball3().neg_laplacian_d(&[0.5, 0.0, 0.0]).unwrap() - 4.0).abs() < 1e-15);
        let s = make_domain(DomainSpec::strip(3, 1.0)).unwrap();
        assert_eq!(s.neg_laplacian_d(&[0.0, 0.0, 0.3]).unwrap(), 0.0);
        let v = annulus().neg_laplacian_d(&[1.5, 0.0, 0.0]).unwrap();
        assert!((v + 4.0 / 3.0).abs() < 1e-15);
        assert!(matches!(
            annulus().neg_laplacian_d(&[2.0, 0.0, 0.0]),
            Err(HardyError::OnRidge { .. })
        ));
        assert!(matches!(
            ball3().neg_laplacian_d(&[0.0, 0.0, 0.0]),
            Err(HardyError::AtSingularity { .. })
        ));
        assert!(matches!(
            s.neg_laplacian_d(&[0.0, 0.0, 1.0]),
            Err(HardyError::OnRidge { .. })
        ));
    }

    #[test]
    fn curvature_formula_matches_laplacian() {
        for (dom, pts) in [
            (ball3(), vec![0.1, 0.5, 0.9]),
            (annulus(), vec![1.2, 1.9, 2.1, 2.8]),
        ] {
            for r in pts {
                let x = [0.0, r, 0.0];
                let a = dom.neg_laplacian_d(&x).unwrap();
                let b = dom.neg_laplacian_from_curvature(&x).unwrap();
                assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0), "{r}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn projections() {
        assert_eq!(
            ball3().project_to_boundary(&[0.5, 0.0, 0.0]).unwrap(),
            vec![1.0, 0.0, 0.0]
        );
        assert_eq!(
            annulus().project_to_boundary(&[1.4, 0.0, 0.0]).unwrap(),
            vec![1.0, 0.0, 0.0]
        );
        let s = make_domain(DomainSpec::strip(3, 1.0)).unwrap();
        assert_eq!(
            s.project_to_boundary(&[7.0, 2.0, 0.3]).unwrap(),
            vec![7.0, 2.0, 0.0]
        );
        assert!(annulus().project_to_boundary(&[2.0, 0.0, 0.0]).is_err());
    }

    #[test]
    fn reductions() {
        let r = ball3().radial_reduction();
        assert_eq!((r.t_min, r.t_max), (0.0, 1.0));
        assert!(r.ridge_points.is_empty());
        assert_eq!(r.weight(0.5), 0.25);
        assert_eq!(r.dist(0.25), 0.75);
        assert_eq!(r.neg_lap(0.5).unwrap(), 4.0);
        assert_eq!(annulus().radial_reduction().ridge_points, vec![2.0]);
        let pb = make_domain(DomainSpec::punctured_ball(3, 2.0)).unwrap();
        let r = pb.radial_reduction();
        assert_eq!(r.ridge_points, vec![1.0]);
        assert_eq!(r.dist(0.3), 0.3);
        assert_eq!(r.dist(1.5), 0.5);
        let s = make_domain(DomainSpec::strip(3, 1.0)).unwrap().radial_reduction();
        assert_eq!(s.mode, ReductionMode::Slab);
        assert_eq!(s.weight(0.7), 1.0);
        assert_eq!(s.ridge_points, vec![1.0]);
    }

    #[test]
    fn properties_table() {
        let p = annulus().properties();
        assert_eq!(p.curvature.h_min, Some(-1.0));
        assert!((p.curvature.h_mean.unwrap() - 0.2).abs() < 1e-15);
        assert_eq!(p.curvature.reach, Reach::Finite(1.0));
        assert!(!p.satisfies_c);
        let s = make_domain(DomainSpec::strip(3, 1.0)).unwrap().properties();
        assert_eq!((s.curvature.h_min, s.curvature.h_max), (Some(0.0), Some(0.0)));
        assert!(s.satisfies_c);
        let b = make_domain(DomainSpec::ball(4, 2.0)).unwrap().properties();
        assert_eq!(b.curvature.h_min, Some(0.5));
        assert_eq!(b.curvature.h_mean, Some(0.5));
        assert!(b.curvature.reach.is_infinite());
    }

    #[test]
    fn condition_c_matches_sampled_sign() {
        for spec in [
            DomainSpec::ball(3, 1.0),
            DomainSpec::strip(3, 1.0),
            DomainSpec::punctured_space(3),
            DomainSpec::punctured_ball(3, 2.0),
            DomainSpec::annulus(3, 1.0, 3.0),
        ] {
            let d = make_domain(spec).unwrap();
            assert_eq!(d.satisfies_c(), d.sampled_min_neg_laplacian(200) >= 0.0);
        }
    }

    #[test]
    fn defect_examples() {
        let b2 = make_domain(DomainSpec::ball(2, 1.0)).unwrap();
        let v = b2.convexity_defect(&DefectKind::A, &[0.5, 0.0], &[0.0, 0.1]).unwrap();
        let rp = 0.26f64.sqrt();
        let expected = 2.0 * (2.0 * rp - 1.0);
        assert!((v - expected).abs() < 1e-14);
        assert!((v - 0.03961).abs() < 1e-5);
        let a = annulus();
        let inner = a
            .convexity_defect(&DefectKind::ReachResidual, &[1.5, 0.0, 0.0], &[])
            .unwrap();
        assert!(inner.abs() < 1e-12);
        let outer = a
            .convexity_defect(&DefectKind::ReachResidual, &[2.5, 0.0, 0.0], &[])
            .unwrap();
        assert!((outer - 3.2).abs() < 1e-12);
        assert!(a
            .convexity_defect(&DefectKind::ReachResidual, &[2.0, 0.0, 0.0], &[])
            .is_err());
        // infinite reach: the residual is -Δd itself
        let r = ball3()
            .convexity_defect(&DefectKind::ReachResidual, &[0.5, 0.0, 0.0], &[])
            .unwrap();
        assert_eq!(r, 4.0);
    }

    #[test]
    fn atilde_requires_interior_ball() {
        let b = ball3();
        let kind = DefectKind::Atilde {
            c: 1.0,
            center: vec![0.9, 0.0, 0.0],
            radius: 0.2,
        };
        assert_eq!(
            b.convexity_defect(&kind, &[0.9, 0.0, 0.0], &[0.01, 0.0, 0.0]),
            Err(HardyError::BallNotInterior)
        );
    }

    #[test]
    fn scalar_slack_is_nonnegative_on_simple_cases() {
        assert!(scalar_semiconcavity_slack(&[1.0, 0.0], &[0.0, 1.0]) >= 0.0);
        assert!(scalar_semiconcavity_slack(&[1.0, 0.0], &[3.0, 0.0]).abs() <= 9.0);
    }
}
