//! Divergence of the calibration fields `T = -φ(d) ∇d` behind the
//! remainder inequalities, checked against a finite-difference oracle.

use std::fmt;
use std::str::FromStr;

use super::engine::x_pow;
use crate::error::{HardyError, Result};
use crate::fd::ridders;
use crate::geometry::{Domain, Geometry, ReductionMode};

/// Which field to differentiate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FieldId {
    /// `φ = d^(1-s) [1 - ρ^(s-n) X^(γ-1)(ρ)]`, `ρ = d/R`.
    GeneralLog,
    /// `φ = d^(1-s) [1 - ρ^(s-n)]`.
    GeneralGradient,
    /// `φ = d^(1-s) [1 - ρ^(s-1) X^(γ-1)(ρ)]`.
    MeanConvexLog,
    /// `φ = d^(1-s) [1 - ρ^(s-1)]`.
    MeanConvexGradient,
    /// The mean-convex log field written with the ball's `-Δd = (n-1)/(R-d)`.
    Ball,
}

impl FieldId {
    pub const ALL: [FieldId; 5] = [
        FieldId::GeneralLog,
        FieldId::GeneralGradient,
        FieldId::MeanConvexLog,
        FieldId::MeanConvexGradient,
        FieldId::Ball,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            FieldId::GeneralLog => "thm2.5",
            FieldId::GeneralGradient => "thm2.7",
            FieldId::MeanConvexLog => "thm2.11",
            FieldId::MeanConvexGradient => "thm2.13",
            FieldId::Ball => "sec5",
        }
    }

    fn uses_log(self) -> bool {
        matches!(self, FieldId::GeneralLog | FieldId::MeanConvexLog | FieldId::Ball)
    }
}

impl fmt::Display for FieldId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for FieldId {
    type Err = HardyError;

    fn from_str(s: &str) -> Result<Self> {
        FieldId::ALL
            .into_iter()
            .find(|f| f.as_str() == s)
            .ok_or_else(|| HardyError::Usage(format!("unknown field '{s}'")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldParams {
    pub s: f64,
    pub gamma: f64,
    /// Scale `R`; the inradius when absent. May be infinite for fields
    /// without the log factor.
    pub r: Option<f64>,
}

impl FieldParams {
    pub fn new(s: f64, gamma: f64) -> Self {
        FieldParams { s, gamma, r: None }
    }
}

struct Field {
    id: FieldId,
    n: f64,
    s: f64,
    gamma: f64,
    r: f64,
}

impl Field {
    fn new(domain: &Domain, id: FieldId, params: FieldParams) -> Result<Field> {
        let r = params.r.unwrap_or_else(|| domain.inradius());
        let FieldParams { s, gamma, .. } = params;
        if !(r > 0.0) {
            return Err(HardyError::OutOfRange(format!("field scale R = {r}")));
        }
        if id.uses_log() {
            if !r.is_finite() {
                return Err(HardyError::InfiniteInradius);
            }
            if !(gamma >= 1.0) {
                return Err(HardyError::OutOfRange(format!("gamma = {gamma} < 1")));
            }
        }
        if !(s >= 1.0) {
            return Err(HardyError::OutOfRange(format!("s = {s} < 1")));
        }
        if id == FieldId::Ball && !matches!(domain.geometry(), Geometry::Ball { .. }) {
            return Err(HardyError::HypothesisViolation(
                "the sec5 field is written for balls".into(),
            ));
        }
        Ok(Field {
            id,
            n: domain.dim() as f64,
            s,
            gamma,
            r,
        })
    }

    /// `(d/R)^k`, zero when `R` is infinite and `k > 0`.
    fn rho_pow(&self, d: f64, k: f64) -> f64 {
        if self.r.is_infinite() {
            if k > 0.0 {
                0.0
            } else {
                1.0
            }
        } else {
            (d / self.r).powf(k)
        }
    }

    fn x(&self, d: f64, gamma: f64) -> f64 {
        x_pow(d / self.r, gamma)
    }

    fn phi(&self, d: f64) -> f64 {
        let (n, s, g) = (self.n, self.s, self.gamma);
        let bracket = match self.id {
            FieldId::GeneralLog => 1.0 - self.rho_pow(d, s - n) * self.x(d, g - 1.0),
            FieldId::GeneralGradient => 1.0 - self.rho_pow(d, s - n),
            FieldId::MeanConvexLog | FieldId::Ball => {
                1.0 - self.rho_pow(d, s - 1.0) * self.x(d, g - 1.0)
            }
            FieldId::MeanConvexGradient => 1.0 - self.rho_pow(d, s - 1.0),
        };
        d.powf(1.0 - s) * bracket
    }

    /// Closed-form divergence, `lap` being `-Δd` at the point.
    fn analytic(&self, d: f64, lap: f64) -> f64 {
        let (n, s, g) = (self.n, self.s, self.gamma);
        let rk = |k: f64| if self.r.is_infinite() { 0.0 } else { self.r.powf(k) };
        match self.id {
            FieldId::GeneralLog => {
                (s - 1.0) * d.powf(-s) * (1.0 - self.rho_pow(d, s - n) * self.x(d, g - 1.0))
                    + (s - n) * rk(n - s) * d.powf(-n) * self.x(d, g - 1.0)
                    + (g - 1.0) * rk(n - s) * d.powf(-n) * self.x(d, g)
                    + self.phi(d) * lap
            }
            FieldId::GeneralGradient => {
                (s - 1.0) * d.powf(-s) - (n - 1.0) * rk(n - s) * d.powf(-n) + self.phi(d) * lap
            }
            FieldId::MeanConvexLog => {
                (s - 1.0) * d.powf(-s)
                    + (g - 1.0) * rk(1.0 - s) * self.x(d, g) / d
                    + d.powf(1.0 - s) * (1.0 - self.rho_pow(d, s - 1.0) * self.x(d, g - 1.0)) * lap
            }
            FieldId::MeanConvexGradient => {
                (s - 1.0) * d.powf(-s) + d.powf(1.0 - s) * (1.0 - self.rho_pow(d, s - 1.0)) * lap
            }
            FieldId::Ball => {
                (s - 1.0) * d.powf(-s)
                    + (n - 1.0) * d.powf(1.0 - s)
                        * (1.0 - self.rho_pow(d, s - 1.0) * self.x(d, g - 1.0))
                        / (self.r - d)
                    + (g - 1.0) * rk(1.0 - s) * self.x(d, g) / d
            }
        }
    }
}

/// `|a - b| / (1 + |a|)` where `a` is the closed-form divergence of the
/// field at reduced coordinate `t` and `b` the finite-difference one.
pub fn div_t_residual(domain: &Domain, field: FieldId, params: FieldParams, t: f64) -> Result<f64> {
    let f = Field::new(domain, field, params)?;
    let red = domain.radial_reduction();
    let lap = red.neg_lap(t)?;
    let branch = *red
        .branch_of(t)
        .ok_or_else(|| HardyError::OutOfRange(format!("t = {t} outside the range")))?;
    let d = branch.dist(t);
    if !(d > 0.0) {
        return Err(HardyError::OutOfRange(format!("t = {t} lies on the boundary")));
    }
    let a = f.analytic(d, lap);

    // room to the nearest point where the field or the branch changes form
    let mut room = d;
    for &r in &red.ridge_points {
        room = room.min((t - r).abs());
    }
    if red.mode == ReductionMode::Radial {
        room = room.min(t);
    }
    if f.r.is_finite() && f.id.uses_log() {
        room = room.min((f.r - d).abs().max(d * 1e-3));
    }
    let radial = |x: f64| -branch.sign * f.phi(branch.dist(x));
    let fp = ridders(radial, t, 0.1 * room).value;
    let b = match red.mode {
        ReductionMode::Radial => fp + (f.n - 1.0) * radial(t) / t,
        ReductionMode::Slab => fp,
    };
    Ok((a - b).abs() / (1.0 + a.abs()))
}

/// Residuals at the midpoints `t_i = t_min + (i + 1/2) (t_max - t_min) / points`;
/// an unbounded range is cut at `t = 1`.
pub fn div_t_grid(domain: &Domain, field: FieldId, params: FieldParams, points: usize) -> Result<Vec<(f64, f64)>> {
    let red = domain.radial_reduction();
    let hi = if red.t_max.is_finite() { red.t_max } else { 1.0 };
    (0..points)
        .map(|i| {
            let t = red.t_min + (i as f64 + 0.5) / points as f64 * (hi - red.t_min);
            Ok((t, div_t_residual(domain, field, params, t)?))
        })
        .collect()
}

/// Relative mismatch in `(X^(γ-1)(t))' = (γ-1) X^γ(t) / t`.
pub fn x_log_chain_rule_residual(t: f64, gamma: f64) -> Result<f64> {
    if !(t > 0.0 && t < 1.0) {
        return Err(HardyError::OutOfRange(format!("t = {t} outside (0, 1)")));
    }
    let h = 0.1 * t.min(1.0 - t);
    let lhs = ridders(|x| x_pow(x, gamma - 1.0), t, h).value;
    let rhs = (gamma - 1.0) * x_pow(t, gamma) / t;
    Ok((lhs - rhs).abs() / rhs.abs().max(f64::MIN_POSITIVE))
}
