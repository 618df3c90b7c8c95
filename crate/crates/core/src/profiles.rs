//! Test-function families as exact BV objects.
//!
//! A [`TestProfile`] is a list of pieces over the reduced coordinate, each
//! carrying a shape from a small closed catalogue. Jumps are not stored:
//! they are the one-sided differences of neighbouring pieces (or of a piece
//! and zero), so the total-variation decomposition can never drift out of
//! sync with the values.

use crate::error::{HardyError, Result};
use crate::functionals::engine::x_pow;
use crate::geometry::{Branch, RadialReduction};

/// Exponent of a distance power, possibly tied to the Hardy exponent `s`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Exponent {
    Fixed(f64),
    /// `s - 1 + offset`, fixed once `s` is known.
    SMinusOnePlus(f64),
}

impl Exponent {
    fn bind(self, s: f64) -> Exponent {
        match self {
            Exponent::Fixed(a) => Exponent::Fixed(a),
            Exponent::SMinusOnePlus(off) => Exponent::Fixed(s - 1.0 + off),
        }
    }

    fn fixed(self) -> Result<f64> {
        match self {
            Exponent::Fixed(a) => Ok(a),
            Exponent::SMinusOnePlus(_) => Err(HardyError::InvalidProfile(
                "exponent depends on s; bind the profile first".into(),
            )),
        }
    }
}

/// Value descriptor of one piece.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Shape {
    Constant(f64),
    /// `coef * d^exponent`.
    DistPower { coef: f64, exponent: Exponent },
    /// `coef * d^exponent * X(d/scale)^gamma`.
    DistPowerLog {
        coef: f64,
        exponent: Exponent,
        gamma: f64,
        scale: f64,
    },
    /// Smoothstep cap `1 - 3u² + 2u³`, `u = |t - center| / width`.
    Bump { center: f64, width: f64 },
}

impl Shape {
    fn bind(self, s: f64) -> Shape {
        match self {
            Shape::DistPower { coef, exponent } => Shape::DistPower {
                coef,
                exponent: exponent.bind(s),
            },
            Shape::DistPowerLog {
                coef,
                exponent,
                gamma,
                scale,
            } => Shape::DistPowerLog {
                coef,
                exponent: exponent.bind(s),
                gamma,
                scale,
            },
            other => other,
        }
    }

    /// `Some((coef, a))` when the shape is exactly `coef * d^a`.
    pub fn monomial(&self) -> Result<Option<(f64, f64)>> {
        Ok(match *self {
            Shape::Constant(c) => Some((c, 0.0)),
            Shape::DistPower { coef, exponent } => Some((coef, exponent.fixed()?)),
            _ => None,
        })
    }

    /// Leading power of `d` split off the value: `g = d^a * rest(d)`.
    pub fn leading_power(&self) -> Result<f64> {
        Ok(match *self {
            Shape::Constant(_) | Shape::Bump { .. } => 0.0,
            Shape::DistPower { exponent, .. } | Shape::DistPowerLog { exponent, .. } => {
                exponent.fixed()?
            }
        })
    }

    /// `g(t) / d^leading_power`.
    pub fn value_rest(&self, t: f64, d: f64) -> Result<f64> {
        Ok(match *self {
            Shape::Constant(c) => c,
            Shape::DistPower { coef, .. } => coef,
            Shape::DistPowerLog {
                coef, gamma, scale, ..
            } => coef * x_pow(d / scale, gamma),
            Shape::Bump { center, width } => {
                let u = ((t - center).abs() / width).min(1.0);
                1.0 - u * u * (3.0 - 2.0 * u)
            }
        })
    }

    /// `|g'(t)| / d^(leading_power - 1)` for distance shapes and `|g'(t)|`
    /// otherwise. Uses `|d'| = 1`.
    pub fn slope_rest(&self, t: f64, d: f64) -> Result<f64> {
        Ok(match *self {
            Shape::Constant(_) => 0.0,
            Shape::DistPower { coef, exponent } => (coef * exponent.fixed()?).abs(),
            Shape::DistPowerLog {
                coef,
                exponent,
                gamma,
                scale,
            } => {
                let x = x_pow(d / scale, 1.0);
                (coef * x.powf(gamma) * (exponent.fixed()? + gamma * x)).abs()
            }
            Shape::Bump { center, width } => {
                let u = (t - center).abs() / width;
                if u >= 1.0 {
                    0.0
                } else {
                    6.0 * u * (1.0 - u) / width
                }
            }
        })
    }

    /// Exponent that `slope_rest` is measured against.
    pub fn slope_power(&self) -> Result<f64> {
        Ok(match *self {
            Shape::DistPower { .. } | Shape::DistPowerLog { .. } => self.leading_power()? - 1.0,
            _ => 0.0,
        })
    }

    pub fn value(&self, t: f64, d: f64) -> Result<f64> {
        let a = self.leading_power()?;
        let rest = self.value_rest(t, d)?;
        Ok(if a == 0.0 { rest } else { rest * d.powf(a) })
    }

    /// Interior points of the reduced coordinate where the shape is only C¹.
    pub fn breakpoints(&self) -> Vec<f64> {
        match *self {
            Shape::Bump { center, .. } => vec![center],
            _ => vec![],
        }
    }

    fn check(&self) -> Result<()> {
        let bad = |msg: &str| Err(HardyError::InvalidProfile(msg.into()));
        match *self {
            Shape::Constant(c) if !(c >= 0.0) || !c.is_finite() => bad("constant must be >= 0"),
            Shape::DistPower { coef, exponent } | Shape::DistPowerLog { coef, exponent, .. }
                if !(coef >= 0.0) || matches!(exponent, Exponent::Fixed(a) if !(a >= 0.0)) =>
            {
                bad("distance powers need a nonnegative coefficient and exponent")
            }
            Shape::DistPowerLog { gamma, scale, .. } if !(gamma >= 0.0) || !(scale > 0.0) => {
                bad("log factor needs gamma >= 0 and a positive scale")
            }
            Shape::Bump { width, .. } if !(width > 0.0) => bad("bump width must be positive"),
            _ => Ok(()),
        }
    }
}

/// Endpoint of a piece.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Knot {
    /// Lower end of the reduced range.
    Start,
    /// Upper end of the reduced range.
    End,
    At(f64),
    /// `t_max - gap`; the distance there is `gap` exactly, even when
    /// `t_max - gap` rounds to `t_max`.
    EndGap(f64),
}

impl Knot {
    pub fn resolve(self, red: &RadialReduction) -> Result<f64> {
        match self {
            Knot::Start => Ok(red.t_min),
            Knot::End => Ok(red.t_max),
            Knot::At(t) => Ok(t),
            Knot::EndGap(gap) => {
                if !red.t_max.is_finite() {
                    return Err(HardyError::InvalidProfile(
                        "gap knot on an unbounded range".into(),
                    ));
                }
                Ok(red.t_max - gap)
            }
        }
    }

    /// Distance at this knot on a branch, exact for boundary-anchored knots.
    pub fn dist_on(self, branch: &Branch, red: &RadialReduction) -> Result<f64> {
        Ok(match self {
            Knot::EndGap(gap) if branch.anchor == red.t_max && branch.sign < 0.0 => gap,
            Knot::Start if branch.anchor == red.t_min && branch.sign > 0.0 => 0.0,
            Knot::End if branch.anchor == red.t_max && branch.sign < 0.0 => 0.0,
            k => branch.dist(k.resolve(red)?).max(0.0),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Piece {
    pub from: Knot,
    pub to: Knot,
    pub shape: Shape,
}

/// A piece with its endpoints located on a reduction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResolvedPiece {
    pub piece: Piece,
    pub t_lo: f64,
    pub t_hi: f64,
}

/// A jump of the profile at a knot.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jump {
    pub t: f64,
    pub knot: Knot,
    /// Piece values on the two sides (zero outside the support).
    pub left: Option<Shape>,
    pub right: Option<Shape>,
}

/// A radial (or longitudinal) BV test function.
#[derive(Debug, Clone, PartialEq)]
pub struct TestProfile {
    pieces: Vec<Piece>,
    family: String,
    params: Vec<(String, f64)>,
    /// Support must not cross a ridge point.
    single_branch: bool,
}

impl TestProfile {
    /// A profile from explicit pieces, listed left to right.
    pub fn new(pieces: Vec<Piece>, family: impl Into<String>, params: Vec<(String, f64)>) -> Result<Self> {
        if pieces.is_empty() {
            return Err(HardyError::InvalidProfile("profile has no pieces".into()));
        }
        for p in &pieces {
            p.shape.check()?;
            if let (Knot::At(a), Knot::At(b)) = (p.from, p.to) {
                if !(a < b) {
                    return Err(HardyError::InvalidProfile(format!(
                        "piece endpoints out of order: {a} >= {b}"
                    )));
                }
            }
        }
        Ok(TestProfile {
            pieces,
            family: family.into(),
            params,
            single_branch: false,
        })
    }

    /// Requires the support to stay on one branch of the distance.
    pub fn on_single_branch(mut self) -> Self {
        self.single_branch = true;
        self
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    pub fn family(&self) -> &str {
        &self.family
    }

    pub fn params(&self) -> &[(String, f64)] {
        &self.params
    }

    /// `key=value` pairs joined by `;`.
    pub fn params_label(&self) -> String {
        self.params
            .iter()
            .map(|(k, v)| format!("{k}={v}"))
            .collect::<Vec<_>>()
            .join(";")
    }

    /// Fixes every `s`-dependent exponent.
    pub fn bind(&self, s: f64) -> TestProfile {
        TestProfile {
            pieces: self
                .pieces
                .iter()
                .map(|p| Piece {
                    shape: p.shape.bind(s),
                    ..*p
                })
                .collect(),
            ..self.clone()
        }
    }

    /// Locates the pieces on a reduction and checks they fit.
    pub fn resolve(&self, red: &RadialReduction) -> Result<Vec<ResolvedPiece>> {
        let mut out = Vec::with_capacity(self.pieces.len());
        let mut prev_hi = f64::NEG_INFINITY;
        for p in &self.pieces {
            let t_lo = p.from.resolve(red)?;
            let t_hi = p.to.resolve(red)?;
            if t_lo < red.t_min || t_hi > red.t_max || !(t_lo <= t_hi) {
                return Err(HardyError::InvalidProfile(format!(
                    "piece [{t_lo}, {t_hi}] outside the range [{}, {}]",
                    red.t_min, red.t_max
                )));
            }
            if t_lo < prev_hi {
                return Err(HardyError::InvalidProfile("pieces overlap".into()));
            }
            prev_hi = t_hi;
            out.push(ResolvedPiece {
                piece: *p,
                t_lo,
                t_hi,
            });
        }
        if self.single_branch {
            let lo = out.first().map_or(0.0, |p| p.t_lo);
            let hi = out.last().map_or(0.0, |p| p.t_hi);
            if red.ridge_points.iter().any(|&r| r > lo && r < hi) {
                return Err(HardyError::InvalidProfile(format!(
                    "support [{lo}, {hi}] crosses a ridge point"
                )));
            }
        }
        Ok(out)
    }

    /// Jumps at piece ends, skipping the ends of the reduced range.
    pub fn jumps(&self, red: &RadialReduction) -> Result<Vec<Jump>> {
        let resolved = self.resolve(red)?;
        let mut out: Vec<Jump> = Vec::new();
        let at_range_end = |t: f64, k: Knot| match k {
            Knot::Start | Knot::End => true,
            Knot::EndGap(_) => false,
            Knot::At(_) => t == red.t_min || t == red.t_max,
        };
        for (i, rp) in resolved.iter().enumerate() {
            if rp.t_lo == rp.t_hi {
                continue;
            }
            let prev = resolved[..i].iter().rev().find(|q| q.t_lo < q.t_hi);
            let joined = prev.is_some_and(|q| q.t_hi == rp.t_lo);
            if !joined && !at_range_end(rp.t_lo, rp.piece.from) {
                out.push(Jump {
                    t: rp.t_lo,
                    knot: rp.piece.from,
                    left: None,
                    right: Some(rp.piece.shape),
                });
            }
            let next = resolved[i + 1..].iter().find(|q| q.t_lo < q.t_hi);
            let right = match next {
                Some(q) if q.t_lo == rp.t_hi => Some(q.piece.shape),
                _ => None,
            };
            if right.is_some() || !at_range_end(rp.t_hi, rp.piece.to) {
                out.push(Jump {
                    t: rp.t_hi,
                    knot: rp.piece.to,
                    left: Some(rp.piece.shape),
                    right,
                });
            }
        }
        // a piece that reaches zero continuously does not jump
        let mut kept = Vec::with_capacity(out.len());
        for j in out {
            let Some(b) = red.branch_of(j.t) else {
                kept.push(j);
                continue;
            };
            let d = j.knot.dist_on(b, red)?;
            let v = |s: Option<Shape>| s.map_or(Ok(0.0), |s| s.value(j.t, d));
            if v(j.left)? != v(j.right)? {
                kept.push(j);
            }
        }
        Ok(kept)
    }
}

/// Cone `φ(y') = max(0, 1 - |y'|)` on `R^(n-1)` scaled by `scale`, times a
/// longitudinal profile across the slab.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductProfile {
    pub scale: f64,
    pub longitudinal: TestProfile,
}

impl ProductProfile {
    /// Unscaled cone masses `(M1, K1)` with the sphere-area constant set to
    /// one: `M1 = ∫(1-ρ)ρ^(n-2)dρ`, `K1 = ∫ρ^(n-2)dρ`.
    pub fn cone_masses(dim: usize) -> (f64, f64) {
        let n = dim as f64;
        (1.0 / (n * (n - 1.0)), 1.0 / (n - 1.0))
    }

    /// Scaled masses `(M_eff, K_eff) = (scale^(1-n) M1, scale^(2-n) K1)`.
    pub fn effective_masses(&self, dim: usize) -> (f64, f64) {
        let (m1, k1) = Self::cone_masses(dim);
        let n = dim as f64;
        (self.scale.powf(1.0 - n) * m1, self.scale.powf(2.0 - n) * k1)
    }

    /// `K_eff / M_eff = scale * K1 / M1`, computed without forming either mass.
    pub fn mass_ratio(&self, dim: usize) -> f64 {
        self.scale * dim as f64
    }
}

/// Any profile the functionals accept.
#[derive(Debug, Clone, PartialEq)]
pub enum Profile {
    Radial(TestProfile),
    Product(ProductProfile),
}

impl From<TestProfile> for Profile {
    fn from(p: TestProfile) -> Self {
        Profile::Radial(p)
    }
}

impl From<ProductProfile> for Profile {
    fn from(p: ProductProfile) -> Self {
        Profile::Product(p)
    }
}

impl Profile {
    pub fn base(&self) -> &TestProfile {
        match self {
            Profile::Radial(p) => p,
            Profile::Product(p) => &p.longitudinal,
        }
    }

    pub fn family(&self) -> &str {
        self.base().family()
    }

    pub fn params_label(&self) -> String {
        match self {
            Profile::Radial(p) => p.params_label(),
            Profile::Product(p) => {
                let base = p.longitudinal.params_label();
                format!("{base};scale={}", p.scale)
            }
        }
    }

    pub fn bind(&self, s: f64) -> Profile {
        match self {
            Profile::Radial(p) => Profile::Radial(p.bind(s)),
            Profile::Product(p) => Profile::Product(ProductProfile {
                scale: p.scale,
                longitudinal: p.longitudinal.bind(s),
            }),
        }
    }
}

fn param(k: &str, v: f64) -> (String, f64) {
    (k.to_string(), v)
}

/// Indicator of the shell `delta < t < eta`.
pub fn annulus_indicator(delta: f64, eta: f64) -> Result<TestProfile> {
    if !(delta > 0.0 && delta < eta && eta.is_finite()) {
        return Err(HardyError::InvalidProfile(format!(
            "annulus indicator needs 0 < delta < eta, got ({delta}, {eta})"
        )));
    }
    Ok(TestProfile::new(
        vec![Piece {
            from: Knot::At(delta),
            to: Knot::At(eta),
            shape: Shape::Constant(1.0),
        }],
        "annulus",
        vec![param("delta", delta), param("eta", eta)],
    )?
    .on_single_branch())
}

/// `d^exponent` over the whole range.
pub fn power_profile(exponent: f64) -> Result<TestProfile> {
    if !(exponent > 0.0 && exponent.is_finite()) {
        return Err(HardyError::InvalidProfile(format!(
            "power profile needs a positive exponent, got {exponent}"
        )));
    }
    TestProfile::new(
        vec![Piece {
            from: Knot::Start,
            to: Knot::End,
            shape: Shape::DistPower {
                coef: 1.0,
                exponent: Exponent::Fixed(exponent),
            },
        }],
        "power",
        vec![param("exponent", exponent)],
    )
}

/// `d^(s-1+eps)`, with `s` supplied at evaluation.
pub fn shifted_power_profile(eps: f64) -> Result<TestProfile> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(HardyError::InvalidProfile(format!(
            "shifted power needs eps > 0, got {eps}"
        )));
    }
    TestProfile::new(
        vec![Piece {
            from: Knot::Start,
            to: Knot::End,
            shape: Shape::DistPower {
                coef: 1.0,
                exponent: Exponent::SMinusOnePlus(eps),
            },
        }],
        "power-s",
        vec![param("eps", eps)],
    )
}

/// `d^exponent X(d/scale)^gamma` over the whole range.
pub fn power_log_profile(exponent: f64, gamma: f64, scale: f64) -> Result<TestProfile> {
    if !(exponent > 0.0) {
        return Err(HardyError::InvalidProfile(format!(
            "power-log profile needs a positive exponent, got {exponent}"
        )));
    }
    TestProfile::new(
        vec![Piece {
            from: Knot::Start,
            to: Knot::End,
            shape: Shape::DistPowerLog {
                coef: 1.0,
                exponent: Exponent::Fixed(exponent),
                gamma,
                scale,
            },
        }],
        "power-log",
        vec![
            param("exponent", exponent),
            param("gamma", gamma),
            param("scale", scale),
        ],
    )
}

/// Indicator of the concentric ball `t < R - delta`.
pub fn ball_shell_indicator(delta: f64) -> Result<TestProfile> {
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(HardyError::InvalidProfile(format!(
            "ball shell needs delta > 0, got {delta}"
        )));
    }
    TestProfile::new(
        vec![Piece {
            from: Knot::Start,
            to: Knot::EndGap(delta),
            shape: Shape::Constant(1.0),
        }],
        "ball-shell",
        vec![param("delta", delta)],
    )
}

/// `χ_(eps,eta)(x_n)` times the cone scaled by `transverse_scale`.
pub fn strip_slab_profile(eps: f64, eta: f64, transverse_scale: f64) -> Result<ProductProfile> {
    if !(eps > 0.0 && eps < eta) {
        return Err(HardyError::InvalidProfile(format!(
            "slab profile needs 0 < eps < eta, got ({eps}, {eta})"
        )));
    }
    if !(transverse_scale > 0.0 && transverse_scale.is_finite()) {
        return Err(HardyError::InvalidProfile(format!(
            "transverse scale must be positive, got {transverse_scale}"
        )));
    }
    let longitudinal = TestProfile::new(
        vec![Piece {
            from: Knot::At(eps),
            to: Knot::At(eta),
            shape: Shape::Constant(1.0),
        }],
        "slab",
        vec![param("eps", eps), param("eta", eta)],
    )?
    .on_single_branch();
    Ok(ProductProfile {
        scale: transverse_scale,
        longitudinal,
    })
}

/// `d^(s-1)` on the concentric ball of radius `rho`, zero outside.
pub fn cheeger_concentric(rho: f64) -> Result<TestProfile> {
    if !(rho > 0.0 && rho.is_finite()) {
        return Err(HardyError::InvalidProfile(format!(
            "concentric radius must be positive, got {rho}"
        )));
    }
    TestProfile::new(
        vec![Piece {
            from: Knot::Start,
            to: Knot::At(rho),
            shape: Shape::DistPower {
                coef: 1.0,
                exponent: Exponent::SMinusOnePlus(0.0),
            },
        }],
        "cheeger",
        vec![param("rho", rho)],
    )
}

/// C¹ cubic cap centred at `center`, supported on `center ± width`.
pub fn radial_bump(center: f64, width: f64) -> Result<TestProfile> {
    if !(width > 0.0) || !(center - width >= 0.0) || !center.is_finite() {
        return Err(HardyError::InvalidProfile(format!(
            "bump needs width > 0 and center - width >= 0, got ({center}, {width})"
        )));
    }
    Ok(TestProfile::new(
        vec![Piece {
            from: Knot::At(center - width),
            to: Knot::At(center + width),
            shape: Shape::Bump { center, width },
        }],
        "bump",
        vec![param("center", center), param("width", width)],
    )?
    .on_single_branch())
}
