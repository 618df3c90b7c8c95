//! Predicted sharp constants and the ladder driver that confronts them
//! with quotient values.

use std::fmt;

use crate::error::{HardyError, Result};
use crate::functionals::{interpolation_constant, Evaluator, Functional};
use crate::geometry::{Domain, Geometry};
use crate::profiles::Profile;

/// A constant is either known exactly or only bracketed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PredictedValue {
    Exact(f64),
    Bounds(f64, f64),
}

impl PredictedValue {
    /// The exact value, or the midpoint of the bracket.
    pub fn point(self) -> f64 {
        match self {
            PredictedValue::Exact(v) => v,
            PredictedValue::Bounds(lo, hi) => 0.5 * (lo + hi),
        }
    }
}

impl fmt::Display for PredictedValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let num = |v: f64| {
            if v.is_infinite() {
                if v > 0.0 { "inf".to_string() } else { "-inf".to_string() }
            } else {
                format!("{v:.16e}")
            }
        };
        match *self {
            PredictedValue::Exact(v) => f.write_str(&num(v)),
            PredictedValue::Bounds(lo, hi) => write!(f, "{}..{}", num(lo), num(hi)),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PredictedConstant {
    pub id: String,
    pub value: PredictedValue,
    /// What the constant is, in words.
    pub provenance: String,
    /// Domain properties the prediction relies on.
    pub hypotheses: Vec<String>,
}

/// Parameters a prediction may depend on.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstantParams {
    pub s: f64,
    pub p: f64,
    pub gamma: f64,
    pub k: u32,
}

impl ConstantParams {
    pub fn new(s: f64) -> Self {
        ConstantParams {
            s,
            p: 1.0,
            gamma: 2.0,
            k: 1,
        }
    }
}

impl Default for ConstantParams {
    fn default() -> Self {
        ConstantParams::new(2.0)
    }
}

/// Identifiers accepted by [`predicted_constant`].
pub const CONSTANT_IDS: [&str; 12] = [
    "2.4", "2.7", "2.8", "2.9", "2.10", "2.11", "2.13", "2.17", "5.2", "6.1", "6.1-remainder",
    "B1",
];

fn violation(msg: &str) -> HardyError {
    HardyError::HypothesisViolation(msg.into())
}

/// The sharp (or best known) constant of a named inequality on a domain.
pub fn predicted_constant(id: &str, domain: &Domain, params: ConstantParams) -> Result<PredictedConstant> {
    let n = domain.dim() as f64;
    let ConstantParams { s, p, gamma, k } = params;
    let r = domain.inradius();
    let make = |value, provenance: &str, hyp: &[&str]| PredictedConstant {
        id: id.to_string(),
        value,
        provenance: provenance.to_string(),
        hypotheses: hyp.iter().map(|h| h.to_string()).collect(),
    };
    let check = |ok: bool, msg: &str| if ok { Ok(()) } else { Err(violation(msg)) };
    let finite_r = || check(r.is_finite(), "needs a finite inner radius");
    let cond_c = || check(domain.satisfies_c(), "needs condition (C)");
    Ok(match id {
        "2.4" => {
            check(s > n, "needs s > n")?;
            make(
                PredictedValue::Exact(s - n),
                "general-domain Hardy constant s - n, attained on the punctured space",
                &["open set", "s > n"],
            )
        }
        "2.7" | "2.10" => {
            check(gamma > 1.0, "needs gamma > 1")?;
            finite_r()?;
            if id == "2.10" {
                cond_c()?;
            } else {
                check(s >= n, "needs s >= n")?;
            }
            make(
                PredictedValue::Exact(gamma - 1.0),
                "constant C = gamma - 1 of the logarithmic remainder",
                &["finite inner radius", "gamma > 1"],
            )
        }
        "2.8" => {
            finite_r()?;
            check(s > n, "needs s > n")?;
            make(
                PredictedValue::Exact(r.powf(n - s)),
                "gradient remainder weight R^(n-s)",
                &["finite inner radius", "s > n"],
            )
        }
        "2.9" => {
            cond_c()?;
            check(s > 1.0, "needs s > 1")?;
            make(
                PredictedValue::Exact(s - 1.0),
                "mean-convex Hardy constant s - 1",
                &["condition (C)", "s > 1"],
            )
        }
        "2.11" => {
            cond_c()?;
            finite_r()?;
            check(s > 1.0, "needs s > 1")?;
            make(
                PredictedValue::Exact(r.powf(1.0 - s)),
                "gradient remainder weight R^(1-s) under condition (C)",
                &["condition (C)", "finite inner radius", "s > 1"],
            )
        }
        "2.13" | "2.17" => {
            check(
                matches!(
                    domain.geometry(),
                    Geometry::Ball { .. } | Geometry::Strip { .. } | Geometry::Annulus { .. }
                ),
                "the reach interpolation is applied to balls, slabs and annuli",
            )?;
            finite_r()?;
            let h = domain.reach().as_f64();
            let threshold = if h.is_infinite() { 1.0 } else { (h + n * r) / (h + r) };
            check(s > threshold, "needs s > (h + nR)/(h + R)")?;
            make(
                PredictedValue::Exact(interpolation_constant(n, s, h, r)),
                "reach interpolation [(s-1)h + (s-n)R]/(h+R)",
                &["finite inner radius", "positive reach"],
            )
        }
        "5.2" => {
            check(
                matches!(domain.geometry(), Geometry::Ball { .. }),
                "the remainder chain is stated on balls",
            )?;
            check(
                s >= 2.0 && k >= 1 && (k as f64) <= s.floor() - 1.0,
                "needs s >= 2 and 1 <= k <= floor(s) - 1",
            )?;
            make(
                PredictedValue::Exact((n - 1.0) * r.powi(-(k as i32))),
                "k-th ball remainder constant (n-1)/R^k",
                &["ball", "s >= 2"],
            )
        }
        "6.1" | "6.1-remainder" => {
            check(s > 1.0 && p >= 1.0, "needs s > 1 and p >= 1")?;
            let c = (s - 1.0) / p;
            if id == "6.1" {
                make(
                    PredictedValue::Exact(c.powf(p)),
                    "Lp Hardy constant ((s-1)/p)^p",
                    &["open set", "s > 1", "p >= 1"],
                )
            } else {
                make(
                    PredictedValue::Exact(c.powf(p - 1.0)),
                    "Lp mean-curvature coefficient ((s-1)/p)^(p-1)",
                    &["open set", "s > 1", "p >= 1"],
                )
            }
        }
        "B1" => {
            let (lo, hi) = b1_bounds(domain)?;
            let value = if lo == hi {
                PredictedValue::Exact(lo)
            } else {
                PredictedValue::Bounds(lo, hi)
            };
            make(
                value,
                "best homogeneous remainder constant, between (n-1) H_min and (n-1) H_mean",
                &["C² boundary", "uniform interior sphere condition"],
            )
        }
        other => return Err(HardyError::Usage(format!("unknown constant id '{other}'"))),
    })
}

/// Lower and upper bounds for `B_1`: `(n-1) H_min` and `(n-1) H_mean`. The
/// slab has `B_1 = 0` exactly.
pub fn b1_bounds(domain: &Domain) -> Result<(f64, f64)> {
    let n1 = domain.dim() as f64 - 1.0;
    match domain.geometry() {
        Geometry::Strip { .. } => Ok((0.0, 0.0)),
        Geometry::Ball { .. } | Geometry::Annulus { .. } => {
            let c = domain.properties().curvature;
            match (c.h_min, c.h_mean) {
                (Some(lo), Some(mean)) => Ok((n1 * lo, n1 * mean)),
                _ => Err(violation("curvature data unavailable")),
            }
        }
        _ => Err(violation("B_1 bounds need a C² boundary")),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CheegerEstimate {
    /// Minimum of `|∂B_ρ| / |B_ρ| = n/ρ` over concentric balls.
    pub h_value: f64,
    /// `h >= (n-1) H_min`.
    pub bound_ok: bool,
    /// `|∂Ω| / |Ω| >= (n-1) H_min`.
    pub isoperimetric_ok: bool,
}

/// Cheeger constant of a ball over the concentric family.
pub fn cheeger_estimate(domain: &Domain) -> Result<CheegerEstimate> {
    let Geometry::Ball { radius } = *domain.geometry() else {
        return Err(violation("the concentric Cheeger family is set on balls"));
    };
    let n = domain.dim() as f64;
    let h_min = domain
        .properties()
        .curvature
        .h_min
        .ok_or_else(|| violation("curvature data unavailable"))?;
    // n/ρ decreases in ρ, so the minimum sits at ρ = R
    let h_value = n / radius;
    let ratio = n / radius;
    Ok(CheegerEstimate {
        h_value,
        bound_ok: h_value >= (n - 1.0) * h_min,
        isoperimetric_ok: ratio >= (n - 1.0) * h_min,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InterpolationEndpoints {
    /// Constant at `h = 0`.
    pub general: f64,
    /// Constant as `h → ∞`.
    pub convex: f64,
}

/// The reach interpolation constant at its two ends.
pub fn interpolation_endpoints_check(n: usize, s: f64) -> InterpolationEndpoints {
    let n = n as f64;
    InterpolationEndpoints {
        general: interpolation_constant(n, s, 0.0, 1.0),
        convex: interpolation_constant(n, s, f64::INFINITY, 1.0),
    }
}

/// How a ladder is judged.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StudyMode {
    /// `|limit - prediction| <= tol`.
    Limit,
    /// As `Limit`, and no ladder value falls below `prediction - tol`.
    LimitFromAbove,
    /// Strictly decreasing with final value at most `threshold`.
    DecreasingToZero { threshold: f64 },
}

/// How the limit was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Extrapolation {
    /// Geometric tail summed from successive differences.
    Richardson,
    /// No clean power law; the last ladder value.
    LastValue,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LadderPoint {
    pub parameter: f64,
    pub value: f64,
    pub error: f64,
}

/// Everything needed to rerun and report a ladder.
#[derive(Debug, Clone, PartialEq)]
pub struct StudySetup {
    pub domain: String,
    pub dim: usize,
    pub geom_params: String,
    pub family: String,
    pub family_params: String,
    pub functional: String,
    pub s: Option<f64>,
    pub beta: Option<f64>,
    pub gamma: Option<f64>,
    pub p: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StudyReport {
    pub setup: StudySetup,
    pub ladder: Vec<LadderPoint>,
    pub extrapolated_limit: f64,
    pub extrapolation: Extrapolation,
    pub prediction: f64,
    pub mode: StudyMode,
    pub tolerance: f64,
    pub pass: bool,
}

impl StudyReport {
    /// Judges an evaluated ladder.
    pub fn judge(setup: StudySetup, ladder: Vec<LadderPoint>, prediction: f64, mode: StudyMode, tolerance: f64) -> Result<Self> {
        if ladder.is_empty() {
            return Err(HardyError::OutOfRange("empty ladder".into()));
        }
        let values: Vec<f64> = ladder.iter().map(|p| p.value).collect();
        let (extrapolated_limit, extrapolation) = extrapolate(&values);
        let pass = match mode {
            StudyMode::Limit => (extrapolated_limit - prediction).abs() <= tolerance,
            StudyMode::LimitFromAbove => {
                (extrapolated_limit - prediction).abs() <= tolerance
                    && values.iter().all(|&v| v >= prediction - tolerance)
            }
            StudyMode::DecreasingToZero { threshold } => {
                strictly_decreasing(&values) && *values.last().unwrap() <= threshold
            }
        };
        Ok(StudyReport {
            setup,
            ladder,
            extrapolated_limit,
            extrapolation,
            prediction,
            mode,
            tolerance,
            pass,
        })
    }

    pub fn values(&self) -> Vec<f64> {
        self.ladder.iter().map(|p| p.value).collect()
    }

    pub fn is_strictly_decreasing(&self) -> bool {
        strictly_decreasing(&self.values())
    }

    pub fn last_value(&self) -> f64 {
        self.ladder.last().map_or(f64::NAN, |p| p.value)
    }
}

pub fn strictly_decreasing(values: &[f64]) -> bool {
    values.windows(2).all(|w| w[1] < w[0])
}

/// Sums the geometric tail `Σ Δ_k` when successive differences shrink by a
/// common ratio (within 10%); otherwise returns the last value.
pub fn extrapolate(values: &[f64]) -> (f64, Extrapolation) {
    let last = *values.last().unwrap_or(&f64::NAN);
    if values.len() < 4 {
        return (last, Extrapolation::LastValue);
    }
    let diffs: Vec<f64> = values.windows(2).map(|w| w[1] - w[0]).collect();
    if diffs.contains(&0.0) {
        return (last, Extrapolation::LastValue);
    }
    let ratios: Vec<f64> = diffs.windows(2).map(|w| w[1] / w[0]).collect();
    let mean = ratios.iter().sum::<f64>() / ratios.len() as f64;
    let clean = mean.abs() < 1.0
        && ratios
            .iter()
            .all(|&r| (r - mean).abs() <= 0.1 * mean.abs());
    if !clean {
        return (last, Extrapolation::LastValue);
    }
    let r = *ratios.last().unwrap();
    let tail = diffs.last().unwrap() * r / (1.0 - r);
    (last + tail, Extrapolation::Richardson)
}

/// Evaluates `functional` on `family(param)` along a strictly decreasing
/// ladder and judges the result.
#[allow(clippy::too_many_arguments)]
pub fn convergence_study<F>(
    domain: &Domain,
    family: F,
    functional: &Functional,
    ladder: &[f64],
    prediction: f64,
    mode: StudyMode,
    tolerance: f64,
) -> Result<StudyReport>
where
    F: Fn(f64) -> Result<Profile>,
{
    convergence_study_with(&Evaluator::new(domain), family, functional, ladder, prediction, mode, tolerance)
}

pub fn convergence_study_with<F>(
    ev: &Evaluator<'_>,
    family: F,
    functional: &Functional,
    ladder: &[f64],
    prediction: f64,
    mode: StudyMode,
    tolerance: f64,
) -> Result<StudyReport>
where
    F: Fn(f64) -> Result<Profile>,
{
    if ladder.is_empty() || !strictly_decreasing(ladder) {
        return Err(HardyError::OutOfRange(
            "ladder must be non-empty and strictly decreasing".into(),
        ));
    }
    let mut points = Vec::with_capacity(ladder.len());
    let mut family_label = String::new();
    let mut family_params = String::new();
    for (i, &param) in ladder.iter().enumerate() {
        let u = family(param)?;
        if i == 0 {
            family_label = u.family().to_string();
            family_params = u.params_label();
        }
        let rep = ev.evaluate(&u, functional)?;
        points.push(LadderPoint {
            parameter: param,
            value: rep.value,
            error: rep.error_estimate,
        });
    }
    let domain = ev.domain();
    let setup = StudySetup {
        domain: domain.kind_label().to_string(),
        dim: domain.dim(),
        geom_params: domain.geom_params_label(),
        family: family_label,
        family_params,
        functional: functional.label(),
        s: functional.s(),
        beta: match *functional {
            Functional::Qbeta { beta, .. } => Some(beta),
            Functional::Im {
                denom: crate::functionals::ImDenominator::Power(beta),
                ..
            } => Some(beta),
            _ => None,
        },
        gamma: match *functional {
            Functional::Qgamma { gamma, .. } | Functional::Remainder { gamma, .. } => Some(gamma),
            _ => None,
        },
        p: match *functional {
            Functional::Lp { p, .. } => Some(p),
            _ => None,
        },
    };
    StudyReport::judge(setup, points, prediction, mode, tolerance)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{make_domain, DomainSpec};
    use crate::profiles::annulus_indicator;

    #[test]
    fn table_examples() {
        let space = make_domain(DomainSpec::punctured_space(3)).unwrap();
        let c = predicted_constant("2.4", &space, ConstantParams::new(4.0)).unwrap();
        assert_eq!(c.value, PredictedValue::Exact(1.0));
        let ball = make_domain(DomainSpec::ball(3, 2.0)).unwrap();
        let c = predicted_constant("B1", &ball, ConstantParams::default()).unwrap();
        assert_eq!(c.value, PredictedValue::Exact(1.0));
        let ann = make_domain(DomainSpec::annulus(3, 1.0, 3.0)).unwrap();
        let c = predicted_constant("2.17", &ann, ConstantParams::new(3.0)).unwrap();
        assert_eq!(c.value, PredictedValue::Exact(1.0));
        assert!(predicted_constant("2.9", &ann, ConstantParams::new(3.0)).is_err());
        assert!(predicted_constant("7.7", &ann, ConstantParams::new(3.0)).is_err());
    }

    #[test]
    fn internal_consistency() {
        let e = interpolation_endpoints_check(3, 4.0);
        assert_eq!((e.general, e.convex), (1.0, 3.0));
        assert_eq!(interpolation_constant(3.0, 4.0, 1.0, 1.0), 2.0);
        let ball = make_domain(DomainSpec::ball(3, 1.0)).unwrap();
        let (lo, hi) = b1_bounds(&ball).unwrap();
        let k1 = predicted_constant("5.2", &ball, ConstantParams::new(3.0)).unwrap();
        assert_eq!(PredictedValue::Exact(lo), k1.value);
        assert_eq!(lo, hi);
    }

    #[test]
    fn bounds() {
        let ann = make_domain(DomainSpec::annulus(3, 1.0, 3.0)).unwrap();
        let (lo, hi) = b1_bounds(&ann).unwrap();
        assert!((lo + 2.0).abs() < 1e-15 && (hi - 0.4).abs() < 1e-15);
        let strip = make_domain(DomainSpec::strip(3, 1.0)).unwrap();
        assert_eq!(b1_bounds(&strip).unwrap(), (0.0, 0.0));
        let space = make_domain(DomainSpec::punctured_space(3)).unwrap();
        assert!(b1_bounds(&space).is_err());
        assert_eq!(PredictedValue::Bounds(-2.0, 0.5).to_string(), "-2.0000000000000000e0..5.0000000000000000e-1");
    }

    #[test]
    fn cheeger() {
        for &(n, r) in &[(2usize, 0.5), (3, 1.0), (4, 2.0), (7, 1.0)] {
            let d = make_domain(DomainSpec::ball(n, r)).unwrap();
            let c = cheeger_estimate(&d).unwrap();
            assert_eq!(c.h_value * r, n as f64);
            assert!(c.bound_ok && c.isoperimetric_ok);
        }
        let strip = make_domain(DomainSpec::strip(3, 1.0)).unwrap();
        assert!(cheeger_estimate(&strip).is_err());
    }

    #[test]
    fn extrapolation_of_geometric_tail() {
        let v: Vec<f64> = (0..6).map(|k| 1.0 + 0.5f64.powi(k)).collect();
        let (lim, how) = extrapolate(&v);
        assert_eq!(how, Extrapolation::Richardson);
        assert!((lim - 1.0).abs() < 1e-14);
        let (lim, how) = extrapolate(&[3.0, 1.0, 2.0, 0.5]);
        assert_eq!(how, Extrapolation::LastValue);
        assert_eq!(lim, 0.5);
    }

    #[test]
    fn punctured_space_study() {
        let d = make_domain(DomainSpec::punctured_space(3)).unwrap();
        let ladder = [1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6];
        let rep = convergence_study(
            &d,
            |delta| Ok(annulus_indicator(delta, 1.0)?.into()),
            &Functional::Plain { s: 4.0 },
            &ladder,
            1.0,
            StudyMode::LimitFromAbove,
            1e-4,
        )
        .unwrap();
        assert!(rep.pass, "{rep:?}");
        assert_eq!(rep.setup.family, "annulus");
        assert!(convergence_study(
            &d,
            |delta| Ok(annulus_indicator(delta, 1.0)?.into()),
            &Functional::Plain { s: 4.0 },
            &[1e-3, 1e-2],
            1.0,
            StudyMode::Limit,
            1e-4,
        )
        .is_err());
    }
}
