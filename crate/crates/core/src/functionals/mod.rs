//! Hardy quotients, remainder functionals and inequality gaps.
//!
//! Notation used throughout, for a profile `u` and exponent `s`:
//!
//! * `G = ∫ |∇u| d^(1-s)`, jumps included;
//! * `H = ∫ |u| d^(-s)`;
//! * `N = ∫ |u| d^(1-s) (-Δd)`, including the ridge mass of `-Δd`.
//!
//! Integrals are in normalised co-area units (unit sphere area), which
//! cancel in every quotient. Numerators that subtract nearly equal
//! quantities are assembled as one [`Evaluator::combination`] so that the
//! cancellation happens before rounding.

pub mod engine;
pub mod fields;

use std::fmt;
use std::str::FromStr;

use crate::error::{HardyError, Result};
use crate::geometry::{Domain, Geometry};
use crate::profiles::{power_profile, Profile};

pub use engine::{Density, EvalOptions, Evaluator, Factor, Route, Term, TermValue};
pub use fields::{div_t_grid, div_t_residual, x_log_chain_rule_residual, FieldId, FieldParams};

/// The logarithmic weight `X(t)^gamma = (1 - log t)^(-gamma)` on `(0, 1]`.
pub fn x_log(t: f64, gamma: f64) -> Result<f64> {
    if !(t > 0.0 && t <= 1.0) {
        return Err(HardyError::OutOfRange(format!(
            "X(t) needs 0 < t <= 1, got {t}"
        )));
    }
    Ok((1.0 - t.ln()).powf(-gamma))
}

fn gradient(s: f64) -> Term {
    Term::gradient(1.0 - s)
}

fn hardy(s: f64) -> Term {
    Term::value(-s)
}

fn neg_lap(s: f64) -> Term {
    Term::value(1.0 - s).with_factor(Factor::NegLap)
}

fn x_weight(power: f64, gamma: f64, r: f64) -> Term {
    Term::value(power).with_factor(Factor::XLog { gamma, scale: r })
}

fn finite_inradius(domain: &Domain) -> Result<f64> {
    let r = domain.inradius();
    if r.is_finite() {
        Ok(r)
    } else {
        Err(HardyError::InfiniteInradius)
    }
}

fn ratio(num: f64, den: f64) -> Result<f64> {
    if den == 0.0 || !den.is_finite() {
        return Err(HardyError::ZeroDenominator);
    }
    Ok(num / den)
}

fn violation(msg: impl Into<String>) -> HardyError {
    HardyError::HypothesisViolation(msg.into())
}

/// Denominator of the ball remainder ratio.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ImDenominator {
    /// `∫ |u| d^(-beta)`.
    Power(f64),
    /// `∫ |u| d^(-1) X(d/R)`.
    XWeight,
}

/// A quotient or gap together with its parameters.
#[derive(Debug, Clone, PartialEq)]
pub enum Functional {
    Plain { s: f64 },
    Qbeta { s: f64, beta: f64 },
    Qgamma { s: f64, gamma: f64 },
    /// `(G - c0 H) / ∫ |u| d^(-q) X^gamma(d/R)`, `R` the inradius.
    Remainder { s: f64, c0: f64, q: f64, gamma: f64 },
    Im { s: f64, m: u32, denom: ImDenominator },
    Gradient { s: f64, c0: f64, alpha: f64 },
    MeanLap,
    Lp { s: f64, p: f64 },
    Gap { id: InequalityId, params: GapParams },
}

impl Functional {
    /// Short identifier used in reports.
    pub fn label(&self) -> String {
        match self {
            Functional::Plain { .. } => "plain".into(),
            Functional::Qbeta { .. } => "qbeta".into(),
            Functional::Qgamma { .. } => "qgamma".into(),
            Functional::Remainder { .. } => "remainder".into(),
            Functional::Im { m, denom, .. } => match denom {
                ImDenominator::Power(_) => format!("im{m}"),
                ImDenominator::XWeight => format!("im{m}-x"),
            },
            Functional::Gradient { .. } => "gradq".into(),
            Functional::MeanLap => "meanlap".into(),
            Functional::Lp { .. } => "lp".into(),
            Functional::Gap { id, .. } => format!("gap:{id}"),
        }
    }

    pub fn s(&self) -> Option<f64> {
        match *self {
            Functional::Plain { s }
            | Functional::Qbeta { s, .. }
            | Functional::Qgamma { s, .. }
            | Functional::Remainder { s, .. }
            | Functional::Im { s, .. }
            | Functional::Gradient { s, .. }
            | Functional::Lp { s, .. } => Some(s),
            Functional::Gap { params, .. } => Some(params.s),
            Functional::MeanLap => None,
        }
    }
}

/// Result of one evaluation, with the integrals that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct EvaluationReport {
    pub functional: Functional,
    /// `G`, split into its smooth and jump parts.
    pub gradient_term: Option<TermValue>,
    /// `H`.
    pub hardy_term: Option<f64>,
    /// Other named integrals entering the value.
    pub remainder_terms: Vec<(String, f64)>,
    pub value: f64,
    pub error_estimate: f64,
}

impl<'a> Evaluator<'a> {
    fn total(&self, u: &Profile, t: Term) -> Result<(f64, f64)> {
        let v = self.term(u, t)?;
        Ok((v.total(), v.error))
    }

    /// Evaluates a functional on a profile; `s`-dependent profiles are bound
    /// to the functional's `s` first.
    pub fn evaluate(&self, profile: &Profile, functional: &Functional) -> Result<EvaluationReport> {
        let u = match functional.s() {
            Some(s) => profile.bind(s),
            None => profile.clone(),
        };
        let u = &u;
        let mut rem = Vec::new();
        let (value, err, g, h) = match *functional {
            Functional::Plain { s } => {
                let gv = self.term(u, gradient(s))?;
                let (hv, he) = self.total(u, hardy(s))?;
                (ratio(gv.total(), hv)?, gv.error + he, Some(gv), Some(hv))
            }
            Functional::Qbeta { s, beta } => {
                if !(s > 1.0) || !(beta > 0.0 && beta <= s - 1.0) {
                    return Err(HardyError::OutOfRange(format!(
                        "Q_beta needs s > 1 and 0 < beta <= s - 1, got s = {s}, beta = {beta}"
                    )));
                }
                let (num, ne) = self.combination(u, &[(1.0, gradient(s)), (1.0 - s, hardy(s))])?;
                let (den, de) = self.total(u, Term::value(beta - s))?;
                rem.push((format!("int u d^{}", beta - s), den));
                (ratio(num, den)?, ne + de, None, None)
            }
            Functional::Qgamma { s, gamma } => {
                let r = finite_inradius(self.domain())?;
                let (num, ne) = self.combination(u, &[(1.0, gradient(s)), (1.0 - s, hardy(s))])?;
                let (den, de) = self.total(u, x_weight(-1.0, gamma, r))?;
                rem.push(("int u d^-1 X^gamma".into(), den));
                (ratio(num, den)?, ne + de, None, None)
            }
            Functional::Remainder { s, c0, q, gamma } => {
                let r = finite_inradius(self.domain())?;
                let (num, ne) = self.combination(u, &[(1.0, gradient(s)), (-c0, hardy(s))])?;
                let (den, de) = self.total(u, x_weight(-q, gamma, r))?;
                rem.push((format!("int u d^-{q} X^gamma"), den));
                (ratio(num, den)?, ne + de, None, None)
            }
            Functional::Im { s, m, denom } => {
                let (num, ne) = self.im_numerator(u, s, m, denom)?;
                let (den, de) = match denom {
                    ImDenominator::Power(beta) => self.total(u, Term::value(-beta))?,
                    ImDenominator::XWeight => {
                        self.total(u, x_weight(-1.0, 1.0, finite_inradius(self.domain())?))?
                    }
                };
                rem.push(("I_m".into(), num));
                rem.push(("denominator".into(), den));
                (ratio(num, den)?, ne + de, None, None)
            }
            Functional::Gradient { s, c0, alpha } => {
                let (num, ne) = self.combination(u, &[(1.0, gradient(s)), (-c0, hardy(s))])?;
                let (den, de) = self.total(u, Term::gradient(-alpha))?;
                rem.push((format!("int |grad u| d^-{alpha}"), den));
                (ratio(num, den)?, ne + de, None, None)
            }
            Functional::MeanLap => {
                let (num, ne) = self.total(u, Term::value(0.0).with_factor(Factor::NegLap))?;
                let (den, de) = self.total(u, Term::value(0.0))?;
                rem.push(("int u (-lap d)".into(), num));
                rem.push(("int u".into(), den));
                (ratio(num, den)?, ne + de, None, None)
            }
            Functional::Lp { s, p } => {
                let c = (s - 1.0) / p;
                let (num, ne) = self.combination(
                    u,
                    &[
                        (1.0, Term::gradient(p - s).with_p(p)),
                        (-c.powf(p), Term::value(-s).with_p(p)),
                    ],
                )?;
                let (den, de) = self.total(u, neg_lap(s).with_p(p))?;
                rem.push(("int |u|^p d^(1-s) (-lap d)".into(), den));
                (ratio(num, den)?, ne + de, None, None)
            }
            Functional::Gap { id, params } => {
                let gap = self.gap(u, id, params)?;
                rem.push(("lhs".into(), gap.lhs));
                rem.push(("rhs".into(), gap.rhs));
                (gap.value, gap.error, None, None)
            }
        };
        Ok(EvaluationReport {
            functional: functional.clone(),
            gradient_term: g,
            hardy_term: h,
            remainder_terms: rem,
            value,
            error_estimate: err,
        })
    }

    fn value_of(&self, profile: &Profile, functional: Functional) -> Result<f64> {
        Ok(self.evaluate(profile, &functional)?.value)
    }

    fn im_numerator(&self, u: &Profile, s: f64, m: u32, denom: ImDenominator) -> Result<(f64, f64)> {
        let r = match self.domain().geometry() {
            Geometry::Ball { radius } => *radius,
            _ => return Err(violation("the remainder chain is stated on balls")),
        };
        let top = s.floor() - 1.0;
        if !(s >= 1.0) || m as f64 > top.max(0.0) {
            return Err(HardyError::OutOfRange(format!(
                "m = {m} outside 0..=floor(s) - 1 for s = {s}"
            )));
        }
        if denom == ImDenominator::XWeight && m as f64 != top.max(0.0) {
            return Err(HardyError::OutOfRange(
                "the X-weighted ratio uses m = floor(s) - 1".into(),
            ));
        }
        let n1 = self.domain().dim() as f64 - 1.0;
        let mut combo = vec![(1.0, gradient(s)), (1.0 - s, hardy(s))];
        for k in 1..=m {
            let k = k as f64;
            combo.push((-n1 * r.powf(-k), Term::value(k - s)));
        }
        self.combination(u, &combo)
    }

    /// `G / H`.
    pub fn ratio_plain(&self, u: &Profile, s: f64) -> Result<f64> {
        self.value_of(u, Functional::Plain { s })
    }

    /// `(G - (s-1) H) / ∫ |u| d^(beta-s)`.
    pub fn quotient_qbeta(&self, u: &Profile, s: f64, beta: f64) -> Result<f64> {
        self.value_of(u, Functional::Qbeta { s, beta })
    }

    /// `(G - (s-1) H) / ∫ |u| d^(-1) X^gamma(d/R)`.
    pub fn quotient_qgamma(&self, u: &Profile, s: f64, gamma: f64) -> Result<f64> {
        self.value_of(u, Functional::Qgamma { s, gamma })
    }

    pub fn remainder_quotient(&self, u: &Profile, s: f64, c0: f64, q: f64, gamma: f64) -> Result<f64> {
        self.value_of(u, Functional::Remainder { s, c0, q, gamma })
    }

    /// `I_m[u]` over the chosen denominator, on a ball.
    pub fn remainder_ratio_im(&self, u: &Profile, s: f64, m: u32, denom: ImDenominator) -> Result<f64> {
        self.value_of(u, Functional::Im { s, m, denom })
    }

    /// `(G - c0 H) / ∫ |∇u| d^(-alpha)`.
    pub fn gradient_quotient(&self, u: &Profile, s: f64, c0: f64, alpha: f64) -> Result<f64> {
        self.value_of(u, Functional::Gradient { s, c0, alpha })
    }

    /// `∫ u (-Δd) / ∫ u`.
    pub fn meanlap_ratio(&self, u: &Profile) -> Result<f64> {
        self.value_of(u, Functional::MeanLap)
    }

    /// Left side minus right side of a named inequality.
    pub fn inequality_gap(&self, u: &Profile, id: InequalityId, params: GapParams) -> Result<Gap> {
        self.gap(&u.bind(params.s), id, params)
    }

    fn gap(&self, u: &Profile, id: InequalityId, params: GapParams) -> Result<Gap> {
        use InequalityId as I;
        let domain = self.domain();
        let n = domain.dim() as f64;
        let s = params.s;
        let gamma = params.gamma;
        let c = params.c.unwrap_or(gamma - 1.0);
        let need = |ok: bool, msg: &str| if ok { Ok(()) } else { Err(violation(msg)) };
        let cond_c = || need(domain.satisfies_c(), "the domain does not satisfy condition (C)");
        let is_ball = matches!(domain.geometry(), Geometry::Ball { .. });
        let reach_ok = matches!(
            domain.geometry(),
            Geometry::Ball { .. } | Geometry::Strip { .. } | Geometry::Annulus { .. }
        );
        if !s.is_finite() {
            return Err(HardyError::OutOfRange(format!("s = {s}")));
        }
        let mut rhs: Vec<(f64, Term)> = Vec::new();
        let lhs = gradient(s);
        match id {
            I::Identity | I::IdentityEquality => {
                if id == I::IdentityEquality {
                    finite_inradius(domain)?;
                    need(
                        matches!(domain.geometry(), Geometry::Ball { .. } | Geometry::Strip { .. }),
                        "the equality family is set on a ball or a slab",
                    )?;
                }
                need(s > 1.0, "needs s > 1")?;
                rhs.push((s - 1.0, hardy(s)));
                rhs.push((1.0, neg_lap(s)));
            }
            I::General => {
                need(s > n, "needs s > n")?;
                rhs.push((s - n, hardy(s)));
            }
            I::GeneralLog => {
                let r = finite_inradius(domain)?;
                need(s >= n && gamma > 1.0, "needs s >= n and gamma > 1")?;
                rhs.push((s - n, hardy(s)));
                rhs.push((c * r.powf(n - s), x_weight(-n, gamma, r)));
            }
            I::GeneralGradient => {
                let r = finite_inradius(domain)?;
                need(s > n, "needs s > n")?;
                rhs.push((s - n, hardy(s)));
                rhs.push((r.powf(n - s), Term::gradient(1.0 - n)));
            }
            I::MeanConvex => {
                cond_c()?;
                need(s > 1.0, "needs s > 1")?;
                rhs.push((s - 1.0, hardy(s)));
            }
            I::MeanConvexLog => {
                cond_c()?;
                let r = finite_inradius(domain)?;
                need(s >= 1.0 && gamma > 1.0, "needs s >= 1 and gamma > 1")?;
                rhs.push((s - 1.0, hardy(s)));
                rhs.push((c * r.powf(1.0 - s), x_weight(-1.0, gamma, r)));
            }
            I::MeanConvexGradient => {
                cond_c()?;
                let r = finite_inradius(domain)?;
                need(s > 1.0, "needs s > 1")?;
                rhs.push((s - 1.0, hardy(s)));
                rhs.push((r.powf(1.0 - s), Term::gradient(0.0)));
            }
            I::Reach => {
                need(reach_ok, "the reach form is applied to balls, slabs and annuli only")?;
                let r = finite_inradius(domain)?;
                let h = domain.reach().as_f64();
                let k = interpolation_constant(n, s, h, r);
                let threshold = if h.is_infinite() { 1.0 } else { (h + n * r) / (h + r) };
                need(s > threshold, "needs s > (h + nR)/(h + R)")?;
                rhs.push((k, hardy(s)));
            }
            I::BallChain => {
                need(is_ball, "stated on balls")?;
                need(s >= 2.0 && gamma > 1.0, "needs s >= 2 and gamma > 1")?;
                let r = domain.inradius();
                rhs.push((s - 1.0, hardy(s)));
                for k in 1..(s.floor() as u32) {
                    let k = k as f64;
                    rhs.push(((n - 1.0) * r.powf(-k), Term::value(k - s)));
                }
                rhs.push((c * r.powf(1.0 - s), x_weight(-1.0, gamma, r)));
            }
            I::BallLow => {
                need(is_ball, "stated on balls")?;
                need((1.0..2.0).contains(&s) && gamma > 1.0, "needs 1 <= s < 2 and gamma > 1")?;
                let r = domain.inradius();
                rhs.push((s - 1.0, hardy(s)));
                rhs.push((c * r.powf(1.0 - s), x_weight(-1.0, gamma, r)));
            }
            I::Lp => {
                let p = params.p;
                need(s > 1.0 && p >= 1.0, "needs s > 1 and p >= 1")?;
                let k = (s - 1.0) / p;
                let lhs = Term::gradient(p - s).with_p(p);
                let rhs = [
                    (k.powf(p), hardy(s).with_p(p)),
                    (k.powf(p - 1.0), neg_lap(s).with_p(p)),
                ];
                return self.assemble_gap(u, lhs, &rhs);
            }
            I::MeanCurvature => {
                need(reach_ok, "needs a C² boundary with an interior sphere condition")?;
                need(s >= 1.0, "needs s >= 1")?;
                let h_min = domain.properties().curvature.h_min.unwrap_or(0.0);
                rhs.push((s - 1.0, hardy(s)));
                rhs.push(((n - 1.0) * h_min, Term::value(1.0 - s)));
            }
        }
        self.assemble_gap(u, lhs, &rhs)
    }

    fn assemble_gap(&self, u: &Profile, lhs: Term, rhs: &[(f64, Term)]) -> Result<Gap> {
        let mut combo = vec![(1.0, lhs)];
        combo.extend(rhs.iter().map(|&(c, t)| (-c, t)));
        let (value, error) = self.combination(u, &combo)?;
        let (l, _) = self.combination(u, &[(1.0, lhs)])?;
        Ok(Gap {
            lhs: l,
            rhs: l - value,
            value,
            error,
        })
    }
}

/// `[(s-1)h + (s-n)R] / (h + R)`, with `h = ∞` giving `s - 1`.
pub fn interpolation_constant(n: f64, s: f64, h: f64, r: f64) -> f64 {
    if h.is_infinite() {
        s - 1.0
    } else {
        ((s - 1.0) * h + (s - n) * r) / (h + r)
    }
}

/// The inequalities `inequality_gap` knows, named by their display ids.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum InequalityId {
    /// "2.3": `G >= (s-1)H + N` on any open set.
    Identity,
    /// "2.3-equality": the same, on the equality family.
    IdentityEquality,
    /// "2.4": `G >= (s-n)H`.
    General,
    /// "2.7".
    GeneralLog,
    /// "2.8".
    GeneralGradient,
    /// "2.9": `G >= (s-1)H` under condition (C).
    MeanConvex,
    /// "2.10".
    MeanConvexLog,
    /// "2.11".
    MeanConvexGradient,
    /// "2.13": reach interpolation.
    Reach,
    /// "5.2": remainder chain on a ball.
    BallChain,
    /// "5.3".
    BallLow,
    /// "6.1": the Lᵖ form.
    Lp,
    /// "1.4": mean-curvature remainder.
    MeanCurvature,
}

impl InequalityId {
    pub const ALL: [InequalityId; 13] = [
        InequalityId::Identity,
        InequalityId::IdentityEquality,
        InequalityId::General,
        InequalityId::GeneralLog,
        InequalityId::GeneralGradient,
        InequalityId::MeanConvex,
        InequalityId::MeanConvexLog,
        InequalityId::MeanConvexGradient,
        InequalityId::Reach,
        InequalityId::BallChain,
        InequalityId::BallLow,
        InequalityId::Lp,
        InequalityId::MeanCurvature,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            InequalityId::Identity => "2.3",
            InequalityId::IdentityEquality => "2.3-equality",
            InequalityId::General => "2.4",
            InequalityId::GeneralLog => "2.7",
            InequalityId::GeneralGradient => "2.8",
            InequalityId::MeanConvex => "2.9",
            InequalityId::MeanConvexLog => "2.10",
            InequalityId::MeanConvexGradient => "2.11",
            InequalityId::Reach => "2.13",
            InequalityId::BallChain => "5.2",
            InequalityId::BallLow => "5.3",
            InequalityId::Lp => "6.1",
            InequalityId::MeanCurvature => "1.4",
        }
    }
}

impl fmt::Display for InequalityId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for InequalityId {
    type Err = HardyError;

    fn from_str(s: &str) -> Result<Self> {
        InequalityId::ALL
            .into_iter()
            .find(|id| id.as_str() == s)
            .ok_or_else(|| HardyError::Usage(format!("unknown inequality id '{s}'")))
    }
}

/// Parameters of an inequality gap. `c` defaults to `gamma - 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GapParams {
    pub s: f64,
    pub gamma: f64,
    pub p: f64,
    pub c: Option<f64>,
}

impl GapParams {
    pub fn new(s: f64) -> Self {
        GapParams {
            s,
            gamma: 2.0,
            p: 1.0,
            c: None,
        }
    }

    pub fn with_gamma(self, gamma: f64) -> Self {
        GapParams { gamma, ..self }
    }

    pub fn with_p(self, p: f64) -> Self {
        GapParams { p, ..self }
    }

    pub fn with_c(self, c: f64) -> Self {
        GapParams { c: Some(c), ..self }
    }
}

/// `value = lhs - rhs`, computed with the cancellation done symbolically.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Gap {
    pub lhs: f64,
    pub rhs: f64,
    pub value: f64,
    pub error: f64,
}

impl Gap {
    /// `value >= -tol |lhs|`.
    pub fn holds(&self, tol: f64) -> bool {
        self.value >= -tol * self.lhs.abs()
    }

    /// `|value| <= tol |lhs|`.
    pub fn is_equality(&self, tol: f64) -> bool {
        self.value.abs() <= tol * self.lhs.abs()
    }
}

pub fn ratio_plain(domain: &Domain, u: &Profile, s: f64) -> Result<f64> {
    Evaluator::new(domain).ratio_plain(u, s)
}

pub fn quotient_qbeta(domain: &Domain, u: &Profile, s: f64, beta: f64) -> Result<f64> {
    Evaluator::new(domain).quotient_qbeta(u, s, beta)
}

pub fn quotient_qgamma(domain: &Domain, u: &Profile, s: f64, gamma: f64) -> Result<f64> {
    Evaluator::new(domain).quotient_qgamma(u, s, gamma)
}

pub fn remainder_quotient(domain: &Domain, u: &Profile, s: f64, c0: f64, q: f64, gamma: f64) -> Result<f64> {
    Evaluator::new(domain).remainder_quotient(u, s, c0, q, gamma)
}

pub fn remainder_ratio_im(domain: &Domain, u: &Profile, s: f64, m: u32, denom: ImDenominator) -> Result<f64> {
    Evaluator::new(domain).remainder_ratio_im(u, s, m, denom)
}

pub fn gradient_quotient(domain: &Domain, u: &Profile, s: f64, c0: f64, alpha: f64) -> Result<f64> {
    Evaluator::new(domain).gradient_quotient(u, s, c0, alpha)
}

pub fn meanlap_ratio(domain: &Domain, u: &Profile) -> Result<f64> {
    Evaluator::new(domain).meanlap_ratio(u)
}

pub fn inequality_gap(domain: &Domain, u: &Profile, id: InequalityId, params: GapParams) -> Result<Gap> {
    Evaluator::new(domain).inequality_gap(u, id, params)
}

/// The Lᵖ remainder ratio for `u = d^((s-1)/p + eps)` on a ball, by
/// quadrature.
pub fn lp_ratio(domain: &Domain, s: f64, p: f64, eps: f64) -> Result<f64> {
    lp_ratio_with(&Evaluator::new(domain).with_route(Route::Quadrature), s, p, eps)
}

pub fn lp_ratio_with(ev: &Evaluator<'_>, s: f64, p: f64, eps: f64) -> Result<f64> {
    if !matches!(ev.domain().geometry(), Geometry::Ball { .. }) {
        return Err(violation("the Lp family is evaluated on balls"));
    }
    if !(s > 1.0 && p >= 1.0 && eps > 0.0) {
        return Err(HardyError::OutOfRange(format!(
            "needs s > 1, p >= 1, eps > 0; got s = {s}, p = {p}, eps = {eps}"
        )));
    }
    let u: Profile = power_profile((s - 1.0) / p + eps)?.into();
    Ok(ev.evaluate(&u, &Functional::Lp { s, p })?.value)
}

/// `[((s-1)/p + eps)^p - ((s-1)/p)^p] / (eps p)`.
pub fn lp_ratio_closed_form(s: f64, p: f64, eps: f64) -> f64 {
    let c = (s - 1.0) / p;
    ((c + eps).powf(p) - c.powf(p)) / (eps * p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{make_domain, DomainSpec};
    use crate::profiles::*;

    #[test]
    fn x_log_values() {
        assert_eq!(x_log(1.0, 1.0).unwrap(), 1.0);
        assert!((x_log((-1.0f64).exp(), 1.0).unwrap() - 0.5).abs() < 1e-15);
        assert!((x_log((-1.0f64).exp(), 2.0).unwrap() - 0.25).abs() < 1e-15);
        assert!(x_log(0.0, 1.0).is_err());
        assert!(x_log(1.5, 1.0).is_err());
        assert!(x_log(1e-300, 1.0).unwrap() < 2e-3);
    }

    #[test]
    fn plain_ratio_on_punctured_space() {
        let d = make_domain(DomainSpec::punctured_space(3)).unwrap();
        let u = annulus_indicator(1e-6, 1.0).unwrap().into();
        let q = ratio_plain(&d, &u, 4.0).unwrap();
        let exact = (1.0 + 1e-6) / (1.0 - 1e-6);
        assert!((q - exact).abs() < 1e-14);
    }

    #[test]
    fn plain_ratio_of_power_profile() {
        let d = make_domain(DomainSpec::ball(3, 1.0)).unwrap();
        let u = power_profile(1.3).unwrap().into();
        assert!((ratio_plain(&d, &u, 2.0).unwrap() - 1.3).abs() < 1e-13);
    }

    #[test]
    fn qbeta_ball_shell() {
        let d = make_domain(DomainSpec::ball(3, 1.0)).unwrap();
        let u = ball_shell_indicator(1e-4).unwrap().into();
        let q = quotient_qbeta(&d, &u, 2.5, 1.5).unwrap();
        // 2 ∫_δ^1 d^{-1.5}(1-d) / ∫_δ^1 d^{-1}(1-d)^2
        let delta: f64 = 1e-4;
        let num = 2.0 * (2.0 / delta.sqrt() + 2.0 * delta.sqrt() - 4.0);
        let den = -delta.ln() - 2.0 * (1.0 - delta) + (1.0 - delta * delta) / 2.0;
        assert!((q - num / den).abs() / q < 1e-13, "{q} vs {}", num / den);
        // the same numerator over ∫ d^{-1.5}(1-d)^2
        let im = remainder_ratio_im(&d, &u, 2.5, 0, ImDenominator::Power(1.5)).unwrap();
        let f = |x: f64| -2.0 * x.powf(-0.5) - 4.0 * x.sqrt() + 2.0 / 3.0 * x.powf(1.5);
        assert!((im - num / (f(1.0) - f(delta))).abs() < 1e-12);
        assert!((im - 2.01349).abs() < 1e-4);
        assert!(quotient_qbeta(&d, &u, 2.5, 1.6).is_err());
    }

    #[test]
    fn cheeger_quotient_cancels_exactly() {
        let d = make_domain(DomainSpec::ball(3, 1.0)).unwrap();
        for &rho in &[0.25, 0.5, 0.9] {
            let u = cheeger_concentric(rho).unwrap().into();
            let q = quotient_qbeta(&d, &u, 2.5, 1.0).unwrap();
            assert!((q - 3.0 / rho).abs() < 1e-12, "{rho}: {q}");
        }
    }

    #[test]
    fn gradient_quotient_punctured() {
        let d = make_domain(DomainSpec::punctured_space(3)).unwrap();
        for &delta in &[1e-2, 1e-8, 1e-20] {
            let u = annulus_indicator(delta, 0.5).unwrap().into();
            let q = gradient_quotient(&d, &u, 4.0, 1.0, 2.0).unwrap();
            assert!((q - 2.0).abs() < 1e-12, "{delta}: {q}");
        }
    }

    #[test]
    fn identity_equality_on_ball_and_strip() {
        for spec in [DomainSpec::ball(3, 1.0), DomainSpec::strip(3, 1.0)] {
            let d = make_domain(spec).unwrap();
            for &(s, eps) in &[(1.5, 0.1), (2.0, 0.3), (3.0, 0.1)] {
                let u = shifted_power_profile(eps).unwrap().into();
                let g = inequality_gap(&d, &u, InequalityId::IdentityEquality, GapParams::new(s))
                    .unwrap();
                assert!(g.is_equality(1e-12), "{s} {eps}: {g:?}");
            }
        }
    }

    #[test]
    fn hypotheses_are_gated() {
        let ann = make_domain(DomainSpec::annulus(3, 1.0, 3.0)).unwrap();
        let u: Profile = radial_bump(1.5, 0.2).unwrap().into();
        assert!(matches!(
            inequality_gap(&ann, &u, InequalityId::MeanConvex, GapParams::new(2.0)),
            Err(HardyError::HypothesisViolation(_))
        ));
        let g = inequality_gap(&ann, &u, InequalityId::Reach, GapParams::new(3.0)).unwrap();
        assert!(g.holds(1e-8));
        assert_eq!("2.13".parse::<InequalityId>().unwrap(), InequalityId::Reach);
        assert!("9.9".parse::<InequalityId>().is_err());
    }

    #[test]
    fn lp_ratio_matches_closed_form() {
        let d = make_domain(DomainSpec::ball(3, 1.0)).unwrap();
        let q = lp_ratio(&d, 3.0, 2.0, 0.1).unwrap();
        assert!((q - 1.05).abs() < 1e-8, "{q}");
        let q1 = lp_ratio(&d, 2.5, 1.0, 0.2).unwrap();
        assert!((q1 - 1.0).abs() < 1e-8);
    }

    #[test]
    fn meanlap_ratio_on_strip_is_zero() {
        let d = make_domain(DomainSpec::strip(3, 1.0)).unwrap();
        let u = radial_bump(0.5, 0.1).unwrap().into();
        assert_eq!(meanlap_ratio(&d, &u).unwrap(), 0.0);
    }

    #[test]
    fn zero_profile_has_zero_denominator() {
        let d = make_domain(DomainSpec::ball(3, 1.0)).unwrap();
        let zero = crate::profiles::TestProfile::new(
            vec![Piece {
                from: Knot::Start,
                to: Knot::End,
                shape: Shape::Constant(0.0),
            }],
            "zero",
            vec![],
        )
        .unwrap()
        .into();
        assert_eq!(quotient_qgamma(&d, &zero, 2.0, 1.0), Err(HardyError::ZeroDenominator));
    }
}
