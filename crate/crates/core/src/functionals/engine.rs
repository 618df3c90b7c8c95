//! Evaluation of weighted integrals of a profile over the radial reduction.
//!
//! Two independent routes share the same segment bookkeeping:
//!
//! * the closed-form route expands every integrand into monomials `c d^e`,
//!   integrates them exactly and merges like terms at the same evaluation
//!   point before summing, so large boundary contributions that cancel in a
//!   quotient numerator cancel symbolically;
//! * the quadrature route integrates each segment with the power-endpoint
//!   rule, which absorbs the `d^p` singularity at the boundary.

use crate::error::{HardyError, Result};
use crate::geometry::{Branch, Domain, RadialReduction, ReductionMode};
use crate::profiles::{Jump, Profile, ResolvedPiece, Shape, TestProfile};
use crate::quadrature::{
    integrate_log_weighted, log_weight_closed_form, power_law_integral, QuadResult,
    DEFAULT_REL_TOL,
};

/// Which evaluation route to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Route {
    /// Closed form when every piece is a constant or a distance power.
    #[default]
    Auto,
    Quadrature,
    ClosedForm,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalOptions {
    pub route: Route,
    pub rel_tol: f64,
}

impl Default for EvalOptions {
    fn default() -> Self {
        EvalOptions {
            route: Route::Auto,
            rel_tol: DEFAULT_REL_TOL,
        }
    }
}

/// Whether the integrand uses `|u|^p` or `|∇u|^p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Density {
    Value,
    Gradient,
}

/// Extra factor multiplying the integrand.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Factor {
    One,
    /// `X(d/scale)^gamma`.
    XLog { gamma: f64, scale: f64 },
    /// `-Δd`, including its singular part on the ridge.
    NegLap,
}

/// `∫ density^p d^power factor dx` in normalised co-area units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Term {
    pub density: Density,
    pub power: f64,
    pub factor: Factor,
    pub p: f64,
}

impl Term {
    /// `∫ |u| d^power`.
    pub fn value(power: f64) -> Term {
        Term {
            density: Density::Value,
            power,
            factor: Factor::One,
            p: 1.0,
        }
    }

    /// `∫ |∇u| d^power`, jumps included.
    pub fn gradient(power: f64) -> Term {
        Term {
            density: Density::Gradient,
            ..Term::value(power)
        }
    }

    pub fn with_factor(self, factor: Factor) -> Term {
        Term { factor, ..self }
    }

    pub fn with_p(self, p: f64) -> Term {
        Term { p, ..self }
    }
}

/// An integral split into its absolutely continuous part and the point
/// contributions (jumps of the profile, ridge mass of `-Δd`).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct TermValue {
    pub smooth: f64,
    pub singular: f64,
    pub error: f64,
}

impl TermValue {
    pub fn total(&self) -> f64 {
        self.smooth + self.singular
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Mono {
    coef: f64,
    exp: f64,
}

fn mul(a: &[Mono], b: &[Mono]) -> Vec<Mono> {
    let mut out = Vec::with_capacity(a.len() * b.len());
    for x in a {
        for y in b {
            out.push(Mono {
                coef: x.coef * y.coef,
                exp: x.exp + y.exp,
            });
        }
    }
    out
}

fn binomial(m: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (m - i) as f64 / (i + 1) as f64)
}

/// `X(u)^gamma`, continuous at `u = 0`.
pub(crate) fn x_pow(u: f64, gamma: f64) -> f64 {
    if u <= 0.0 {
        if gamma == 0.0 {
            1.0
        } else {
            0.0
        }
    } else {
        (1.0 - u.min(1.0).ln()).powf(-gamma)
    }
}

const EXP_EPS: f64 = 1e-12;

#[derive(Debug, Clone, Copy)]
struct PointTerm {
    point: f64,
    exp: f64,
    log: bool,
    coef: f64,
}

/// Sum of `coef * point^exp * (ln point)^log` terms, merged before summing.
#[derive(Debug, Default)]
struct Accum {
    terms: Vec<PointTerm>,
    numeric: f64,
    error: f64,
}

impl Accum {
    fn push(&mut self, point: f64, exp: f64, log: bool, coef: f64) {
        if coef != 0.0 {
            self.terms.push(PointTerm {
                point,
                exp,
                log,
                coef,
            });
        }
    }

    /// `∫_lo^hi Σ c d^e dd` as point terms. Divergence is decided after
    /// merging, so singular parts that cancel exactly are harmless.
    fn antiderivative(&mut self, monos: &[Mono], lo: f64, hi: f64) {
        for m in monos {
            let e1 = m.exp + 1.0;
            if e1.abs() <= EXP_EPS {
                self.push(hi, 0.0, true, m.coef);
                self.push(lo, 0.0, true, -m.coef);
            } else {
                self.push(hi, e1, false, m.coef / e1);
                self.push(lo, e1, false, -m.coef / e1);
            }
        }
    }

    fn point_values(&mut self, monos: &[Mono], at: f64) {
        for m in monos {
            self.push(at, m.exp, false, m.coef);
        }
    }

    fn sum(mut self) -> Result<(f64, f64)> {
        self.terms.sort_by(|a, b| {
            a.point
                .total_cmp(&b.point)
                .then(a.log.cmp(&b.log))
                .then(a.exp.total_cmp(&b.exp))
        });
        let mut total = self.numeric;
        let mut i = 0;
        while i < self.terms.len() {
            let head = self.terms[i];
            let mut coef = 0.0;
            let mut mass = 0.0;
            let mut j = i;
            while j < self.terms.len()
                && self.terms[j].point == head.point
                && self.terms[j].log == head.log
                && (self.terms[j].exp - head.exp).abs() <= EXP_EPS
            {
                coef += self.terms[j].coef;
                mass += self.terms[j].coef.abs();
                j += 1;
            }
            if coef.abs() > 8.0 * f64::EPSILON * mass {
                let unbounded = if head.point == 0.0 {
                    head.log || head.exp < 0.0
                } else if head.point.is_infinite() {
                    head.log || head.exp > 0.0
                } else {
                    false
                };
                if unbounded {
                    return Err(HardyError::Divergent(format!(
                        "term d^{} {}is unbounded at d = {}",
                        head.exp,
                        if head.log { "log d " } else { "" },
                        head.point
                    )));
                }
                total += eval_point(head.point, head.exp, head.log, coef);
            }
            i = j;
        }
        Ok((total, self.error))
    }
}

fn eval_point(point: f64, exp: f64, log: bool, coef: f64) -> f64 {
    if point == 0.0 {
        return if exp == 0.0 && !log { coef } else { 0.0 };
    }
    if point.is_infinite() {
        return if exp == 0.0 && !log { coef } else { 0.0 };
    }
    let base = if exp == 0.0 { 1.0 } else { point.powf(exp) };
    if log {
        coef * base * point.ln()
    } else {
        coef * base
    }
}

/// A maximal part of a piece on one branch, in distance coordinates.
#[derive(Debug, Clone, Copy)]
struct Segment {
    branch: Branch,
    d_lo: f64,
    d_hi: f64,
    shape: Shape,
}

/// Evaluates integrals of profiles on one domain.
#[derive(Debug, Clone)]
pub struct Evaluator<'a> {
    domain: &'a Domain,
    red: RadialReduction,
    opts: EvalOptions,
}

impl<'a> Evaluator<'a> {
    pub fn new(domain: &'a Domain) -> Self {
        Evaluator {
            domain,
            red: domain.radial_reduction(),
            opts: EvalOptions::default(),
        }
    }

    pub fn with_options(mut self, opts: EvalOptions) -> Self {
        self.opts = opts;
        self
    }

    pub fn with_route(mut self, route: Route) -> Self {
        self.opts.route = route;
        self
    }

    pub fn domain(&self) -> &Domain {
        self.domain
    }

    pub fn reduction(&self) -> &RadialReduction {
        &self.red
    }

    pub fn options(&self) -> EvalOptions {
        self.opts
    }

    fn dim(&self) -> f64 {
        self.red.dim as f64
    }

    /// Single integral with its smooth and point parts kept apart.
    pub fn term(&self, profile: &Profile, term: Term) -> Result<TermValue> {
        let smooth = self.combination_parts(profile, &[(1.0, term)], Part::Smooth)?;
        let singular = self.combination_parts(profile, &[(1.0, term)], Part::Singular)?;
        Ok(TermValue {
            smooth: smooth.0,
            singular: singular.0,
            error: smooth.1 + singular.1,
        })
    }

    /// `Σ coef_i ∫ term_i`, evaluated as one sum so that cancelling
    /// contributions cancel before rounding. Returns value and error.
    pub fn combination(&self, profile: &Profile, combo: &[(f64, Term)]) -> Result<(f64, f64)> {
        self.combination_parts(profile, combo, Part::Both)
    }

    fn expand_product(&self, profile: &Profile, combo: &[(f64, Term)]) -> Result<Vec<(f64, Term)>> {
        match profile {
            Profile::Radial(_) => Ok(combo.to_vec()),
            Profile::Product(p) => {
                // |∇u| = g |∇'φ| + |g'| φ on disjoint supports; per unit M_eff
                // the transverse part contributes K_eff/M_eff times a value term.
                let ratio = p.mass_ratio(self.red.dim);
                let mut out = Vec::new();
                for &(c, t) in combo {
                    if t.density == Density::Gradient {
                        if t.p != 1.0 {
                            return Err(HardyError::InvalidProfile(
                                "product profiles only support p = 1 gradients".into(),
                            ));
                        }
                        out.push((
                            c * ratio,
                            Term {
                                density: Density::Value,
                                ..t
                            },
                        ));
                    }
                    out.push((c, t));
                }
                Ok(out)
            }
        }
    }

    fn use_closed_form(&self, profile: &TestProfile) -> Result<bool> {
        let monomial = profile
            .pieces()
            .iter()
            .map(|p| p.shape.monomial().map(|m| m.is_some()))
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .all(|b| b);
        match self.opts.route {
            Route::Quadrature => Ok(false),
            Route::Auto => Ok(monomial),
            Route::ClosedForm => {
                if monomial {
                    Ok(true)
                } else {
                    Err(HardyError::InvalidProfile(
                        "closed form needs constant or distance-power pieces".into(),
                    ))
                }
            }
        }
    }

    fn combination_parts(
        &self,
        profile: &Profile,
        combo: &[(f64, Term)],
        part: Part,
    ) -> Result<(f64, f64)> {
        let base = profile.base();
        let combo = self.expand_product(profile, combo)?;
        for (_, t) in &combo {
            if !(t.p >= 1.0) {
                return Err(HardyError::OutOfRange(format!("p must be >= 1, got {}", t.p)));
            }
        }
        let resolved = base.resolve(&self.red)?;
        let jumps = base.jumps(&self.red)?;
        let segments = self.segments(&resolved)?;
        if self.use_closed_form(base)? {
            let mut acc = Accum::default();
            for &(c, t) in &combo {
                if part.smooth() {
                    self.closed_smooth(&mut acc, &segments, c, t)?;
                }
                if part.singular() {
                    self.closed_jumps(&mut acc, &jumps, c, t)?;
                    self.closed_ridge(&mut acc, &resolved, c, t)?;
                }
            }
            acc.sum()
        } else {
            let mut total = QuadResult::ZERO;
            for &(c, t) in &combo {
                let mut v = QuadResult::ZERO;
                if part.smooth() {
                    v = v.plus(self.quad_smooth(&segments, t)?);
                }
                if part.singular() {
                    v.value += self.numeric_jumps(&jumps, t)? + self.numeric_ridge(&resolved, t)?;
                }
                total = total.plus(v.scaled(c));
            }
            Ok((total.value, total.error_estimate))
        }
    }

    fn segments(&self, resolved: &[ResolvedPiece]) -> Result<Vec<Segment>> {
        let mut out = Vec::new();
        for rp in resolved {
            for b in &self.red.branches {
                let lo = rp.t_lo.max(b.t_lo);
                let hi = rp.t_hi.min(b.t_hi);
                if !(lo < hi) {
                    continue;
                }
                let d_at = |t: f64, is_lo: bool| -> Result<f64> {
                    if is_lo && t == rp.t_lo {
                        rp.piece.from.dist_on(b, &self.red)
                    } else if !is_lo && t == rp.t_hi {
                        rp.piece.to.dist_on(b, &self.red)
                    } else {
                        Ok(b.dist(t).max(0.0))
                    }
                };
                let da = d_at(lo, true)?;
                let db = d_at(hi, false)?;
                // split at interior breakpoints of the shape
                let mut ts: Vec<f64> = rp
                    .piece
                    .shape
                    .breakpoints()
                    .into_iter()
                    .filter(|&x| x > lo && x < hi)
                    .collect();
                ts.sort_by(f64::total_cmp);
                let mut ds = vec![da];
                ds.extend(ts.iter().map(|&t| b.dist(t)));
                ds.push(db);
                for w in ds.windows(2) {
                    let (x, y) = (w[0].min(w[1]), w[0].max(w[1]));
                    if x < y {
                        out.push(Segment {
                            branch: *b,
                            d_lo: x,
                            d_hi: y,
                            shape: rp.piece.shape,
                        });
                    }
                }
            }
        }
        Ok(out)
    }

    /// Co-area weight (times `-Δd` for `NegLap`) as a polynomial in `d`.
    fn weight_series(&self, branch: &Branch, neg_lap: bool) -> Vec<Mono> {
        match self.red.mode {
            ReductionMode::Slab => {
                if neg_lap {
                    vec![]
                } else {
                    vec![Mono {
                        coef: 1.0,
                        exp: 0.0,
                    }]
                }
            }
            ReductionMode::Radial => {
                let n = self.red.dim as u32;
                let (m, lead) = if neg_lap {
                    (n - 2, -branch.sign * (n as f64 - 1.0))
                } else {
                    (n - 1, 1.0)
                };
                (0..=m)
                    .filter_map(|k| {
                        let a = branch.anchor.powi((m - k) as i32);
                        let c = lead * binomial(m, k) * a * branch.sign.powi(k as i32);
                        (c != 0.0).then_some(Mono {
                            coef: c,
                            exp: k as f64,
                        })
                    })
                    .collect()
            }
        }
    }

    /// Weight times factor at reduced coordinate `t` (numeric route).
    fn weight_at(&self, branch: &Branch, t: f64, neg_lap: bool) -> f64 {
        match (self.red.mode, neg_lap) {
            (ReductionMode::Slab, false) => 1.0,
            (ReductionMode::Slab, true) => 0.0,
            (ReductionMode::Radial, false) => self.red.weight(t),
            (ReductionMode::Radial, true) => {
                -branch.sign * (self.dim() - 1.0) * t.powi(self.red.dim as i32 - 2)
            }
        }
    }

    fn density_series(shape: &Shape, t: Term) -> Result<Vec<Mono>> {
        let (c, a) = shape
            .monomial()?
            .ok_or_else(|| HardyError::InvalidProfile("shape is not a monomial".into()))?;
        let mono = match t.density {
            Density::Value => Mono {
                coef: c.powf(t.p),
                exp: a * t.p,
            },
            Density::Gradient => Mono {
                coef: (c * a).abs().powf(t.p),
                exp: (a - 1.0) * t.p,
            },
        };
        Ok(if mono.coef == 0.0 { vec![] } else { vec![mono] })
    }

    fn closed_smooth(&self, acc: &mut Accum, segs: &[Segment], c: f64, t: Term) -> Result<()> {
        for seg in segs {
            let dens = Self::density_series(&seg.shape, t)?;
            if dens.is_empty() {
                continue;
            }
            let neg_lap = t.factor == Factor::NegLap;
            let w = self.weight_series(&seg.branch, neg_lap);
            let kernel = [Mono {
                coef: c,
                exp: t.power,
            }];
            let monos = mul(&mul(&dens, &kernel), &w);
            match t.factor {
                Factor::One | Factor::NegLap => acc.antiderivative(&monos, seg.d_lo, seg.d_hi),
                Factor::XLog { gamma, scale } => {
                    for m in &monos {
                        let q = self.x_monomial(m.coef, m.exp, gamma, scale, seg.d_lo, seg.d_hi)?;
                        acc.numeric += q.value;
                        acc.error += q.error_estimate;
                    }
                }
            }
        }
        Ok(())
    }

    /// `∫_lo^hi c d^e X(d/scale)^gamma dd`.
    fn x_monomial(&self, c: f64, e: f64, gamma: f64, scale: f64, lo: f64, hi: f64) -> Result<QuadResult> {
        if !scale.is_finite() {
            return Err(HardyError::InfiniteInradius);
        }
        let (u_lo, u_hi) = (lo / scale, (hi / scale).min(1.0));
        if u_lo >= u_hi {
            return Ok(QuadResult::ZERO);
        }
        let factor = c * scale.powf(e + 1.0);
        let tol = self.opts.rel_tol;
        let q = if (e + 1.0).abs() <= EXP_EPS {
            QuadResult {
                value: log_weight_closed_form(gamma, u_lo, u_hi)?,
                error_estimate: 0.0,
                subdivisions: 0,
            }
        } else if u_lo == 0.0 {
            power_law_integral(|u| x_pow(u, gamma), e, (0.0, u_hi), tol)?
        } else {
            integrate_log_weighted(|u| u.powf(e + 1.0), gamma, (u_lo, u_hi), tol)?
        };
        Ok(q.scaled(factor))
    }

    fn jump_branch(&self, t: f64) -> Result<&Branch> {
        self.red
            .branch_of(t)
            .ok_or_else(|| HardyError::OutOfRange(format!("jump at t = {t} outside the range")))
    }

    fn closed_jumps(&self, acc: &mut Accum, jumps: &[Jump], c: f64, t: Term) -> Result<()> {
        if t.density != Density::Gradient {
            return Ok(());
        }
        for j in jumps {
            let b = self.jump_branch(j.t)?;
            let d = j.knot.dist_on(b, &self.red)?;
            let side = |s: Option<Shape>| -> Result<Vec<Mono>> {
                Ok(match s {
                    None => vec![],
                    Some(sh) => {
                        let (k, a) = sh.monomial()?.ok_or_else(|| {
                            HardyError::InvalidProfile("shape is not a monomial".into())
                        })?;
                        vec![Mono { coef: k, exp: a }]
                    }
                })
            };
            let left = side(j.left)?;
            let right = side(j.right)?;
            let val = |ms: &[Mono]| ms.iter().map(|m| eval_point(d, m.exp, false, m.coef)).sum::<f64>();
            let (vl, vr) = (val(&left), val(&right));
            if vl == vr {
                continue;
            }
            if t.p != 1.0 {
                return Err(HardyError::Divergent(
                    "|∇u|^p with p > 1 is infinite across a jump".into(),
                ));
            }
            let sgn = if vl > vr { 1.0 } else { -1.0 };
            let mut mag: Vec<Mono> = left.iter().map(|m| Mono { coef: sgn * m.coef, ..*m }).collect();
            mag.extend(right.iter().map(|m| Mono {
                coef: -sgn * m.coef,
                ..*m
            }));
            let mut scale = c;
            let neg_lap = match t.factor {
                Factor::One => false,
                Factor::XLog { gamma, scale: r } => {
                    scale *= x_pow(d / r, gamma);
                    false
                }
                Factor::NegLap => {
                    return Err(HardyError::InvalidProfile(
                        "gradient against -Δd is not defined".into(),
                    ))
                }
            };
            let kernel = [Mono {
                coef: scale,
                exp: t.power,
            }];
            let monos = mul(&mul(&mag, &kernel), &self.weight_series(b, neg_lap));
            acc.point_values(&monos, d);
        }
        Ok(())
    }

    /// Value of the profile at a ridge point, which must be continuous there.
    fn ridge_value_shape(&self, resolved: &[ResolvedPiece], tr: f64) -> Result<Option<Shape>> {
        let left = resolved.iter().find(|p| p.t_lo < tr && tr <= p.t_hi);
        let right = resolved.iter().find(|p| p.t_lo <= tr && tr < p.t_hi);
        match (left, right) {
            (None, None) => Ok(None),
            (Some(l), Some(r)) if l == r => Ok(Some(l.piece.shape)),
            (l, r) => {
                let b = self.jump_branch(tr)?;
                let d = b.dist(tr);
                let v = |p: Option<&ResolvedPiece>| -> Result<f64> {
                    p.map_or(Ok(0.0), |p| p.piece.shape.value(tr, d))
                };
                let (vl, vr) = (v(l)?, v(r)?);
                if vl != vr {
                    return Err(HardyError::InvalidProfile(format!(
                        "profile jumps on the ridge point t = {tr}"
                    )));
                }
                Ok(l.or(r).map(|p| p.piece.shape))
            }
        }
    }

    fn closed_ridge(&self, acc: &mut Accum, resolved: &[ResolvedPiece], c: f64, t: Term) -> Result<()> {
        if t.factor != Factor::NegLap {
            return Ok(());
        }
        if t.density != Density::Value {
            return Err(HardyError::InvalidProfile(
                "gradient against -Δd is not defined".into(),
            ));
        }
        for (tr, mass) in self.red.ridge_masses() {
            let Some(shape) = self.ridge_value_shape(resolved, tr)? else {
                continue;
            };
            let b = self.jump_branch(tr)?;
            let d = b.dist(tr);
            let dens = Self::density_series(&shape, t)?;
            let kernel = [Mono {
                coef: c * mass,
                exp: t.power,
            }];
            let monos = mul(&mul(&dens, &kernel), &self.weight_series(b, false));
            acc.point_values(&monos, d);
        }
        Ok(())
    }

    fn quad_smooth(&self, segs: &[Segment], t: Term) -> Result<QuadResult> {
        let mut total = QuadResult::ZERO;
        let neg_lap = t.factor == Factor::NegLap;
        for seg in segs {
            if seg.d_hi.is_infinite() {
                return Err(HardyError::Divergent(
                    "profile support is unbounded".into(),
                ));
            }
            let shape = seg.shape;
            let (lead, p) = match t.density {
                Density::Value => (shape.leading_power()?, t.p),
                Density::Gradient => (shape.slope_power()?, t.p),
            };
            if t.density == Density::Gradient && matches!(shape, Shape::Constant(_)) {
                continue;
            }
            if t.density == Density::Value && shape == Shape::Constant(0.0) {
                continue;
            }
            let exponent = lead * p + t.power;
            let branch = seg.branch;
            let factor = t.factor;
            let failure = std::cell::RefCell::new(None);
            let h = |d: f64| -> f64 {
                let tt = branch.coordinate(d);
                let rest = match t.density {
                    Density::Value => shape.value_rest(tt, d),
                    Density::Gradient => shape.slope_rest(tt, d),
                };
                let rest = match rest {
                    Ok(v) => v,
                    Err(e) => {
                        failure.borrow_mut().get_or_insert(e);
                        return 0.0;
                    }
                };
                let xf = match factor {
                    Factor::XLog { gamma, scale } => x_pow(d / scale, gamma),
                    _ => 1.0,
                };
                rest.powf(p) * self.weight_at(&branch, tt, neg_lap) * xf
            };
            let q = power_law_integral(h, exponent, (seg.d_lo, seg.d_hi), self.opts.rel_tol);
            if let Some(e) = failure.into_inner() {
                return Err(e);
            }
            if let Factor::XLog { scale, .. } = factor {
                if !scale.is_finite() {
                    return Err(HardyError::InfiniteInradius);
                }
            }
            total = total.plus(q?);
        }
        Ok(total)
    }

    fn numeric_jumps(&self, jumps: &[Jump], t: Term) -> Result<f64> {
        if t.density != Density::Gradient {
            return Ok(0.0);
        }
        let mut total = 0.0;
        for j in jumps {
            let b = self.jump_branch(j.t)?;
            let d = j.knot.dist_on(b, &self.red)?;
            let v = |s: Option<Shape>| s.map_or(Ok(0.0), |s| s.value(j.t, d));
            let mag = (v(j.left)? - v(j.right)?).abs();
            if mag == 0.0 {
                continue;
            }
            if t.p != 1.0 {
                return Err(HardyError::Divergent(
                    "|∇u|^p with p > 1 is infinite across a jump".into(),
                ));
            }
            let xf = match t.factor {
                Factor::One => 1.0,
                Factor::XLog { gamma, scale } => x_pow(d / scale, gamma),
                Factor::NegLap => {
                    return Err(HardyError::InvalidProfile(
                        "gradient against -Δd is not defined".into(),
                    ))
                }
            };
            total += mag * d.powf(t.power) * self.weight_at(b, b.coordinate(d), false) * xf;
        }
        Ok(total)
    }

    fn numeric_ridge(&self, resolved: &[ResolvedPiece], t: Term) -> Result<f64> {
        if t.factor != Factor::NegLap {
            return Ok(0.0);
        }
        if t.density != Density::Value {
            return Err(HardyError::InvalidProfile(
                "gradient against -Δd is not defined".into(),
            ));
        }
        let mut total = 0.0;
        for (tr, mass) in self.red.ridge_masses() {
            if let Some(shape) = self.ridge_value_shape(resolved, tr)? {
                let b = self.jump_branch(tr)?;
                let d = b.dist(tr);
                total += mass * shape.value(tr, d)?.powf(t.p) * d.powf(t.power) * self.red.weight(tr);
            }
        }
        Ok(total)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Part {
    Smooth,
    Singular,
    Both,
}

impl Part {
    fn smooth(self) -> bool {
        matches!(self, Part::Smooth | Part::Both)
    }

    fn singular(self) -> bool {
        matches!(self, Part::Singular | Part::Both)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{make_domain, DomainSpec};
    use crate::profiles::{annulus_indicator, ball_shell_indicator, power_profile, radial_bump};

    fn both_routes(domain: &Domain, profile: &Profile, term: Term) -> (f64, f64) {
        let cf = Evaluator::new(domain)
            .with_route(Route::ClosedForm)
            .term(profile, term)
            .unwrap()
            .total();
        let q = Evaluator::new(domain)
            .with_route(Route::Quadrature)
            .term(profile, term)
            .unwrap()
            .total();
        (cf, q)
    }

    #[test]
    fn hardy_term_of_annulus_indicator() {
        // ∫_δ^η r^{-s} r^{n-1} dr with n = 3, s = 4: 1/δ - 1/η
        let d = make_domain(DomainSpec::punctured_space(3)).unwrap();
        let u: Profile = annulus_indicator(0.1, 1.0).unwrap().into();
        let (cf, q) = both_routes(&d, &u, Term::value(-4.0));
        assert!((cf - 9.0).abs() < 1e-12);
        assert!((q - 9.0).abs() < 1e-9);
        // jumps: δ^{-3} δ^2 + η^{-3} η^2 = 10 + 1
        let g = Evaluator::new(&d).term(&u, Term::gradient(-3.0)).unwrap();
        assert!((g.singular - 11.0).abs() < 1e-12);
        assert_eq!(g.smooth, 0.0);
    }

    #[test]
    fn ball_shell_beta_integral() {
        // ∫_0^{1-δ} (1-r)^{-1.5} r dr = 2δ^{-1/2} + 2δ^{1/2} - 4 (n = 2)
        let d = make_domain(DomainSpec::ball(2, 1.0)).unwrap();
        let delta = 1e-4;
        let u: Profile = ball_shell_indicator(delta).unwrap().into();
        let exact = 2.0 / delta.sqrt() + 2.0 * delta.sqrt() - 4.0;
        let (cf, q) = both_routes(&d, &u, Term::value(-1.5));
        assert!((cf - exact).abs() / exact < 1e-13, "{cf} vs {exact}");
        assert!((q - exact).abs() / exact < 1e-9, "{q} vs {exact}");
    }

    #[test]
    fn power_profile_routes_agree_with_neg_laplacian() {
        // ball n = 3: ∫ d^{0.3} (-Δd) w = ∫_0^1 (1-r)^{0.3} 2 r dr = 2 B(2, 1.3)
        let d = make_domain(DomainSpec::ball(3, 1.0)).unwrap();
        let u: Profile = power_profile(1.3).unwrap().into();
        let exact = 2.0 / (1.3 * 2.3) * 1.0 * 1.0;
        let (cf, q) = both_routes(&d, &u, Term::value(-1.0).with_factor(Factor::NegLap));
        assert!((cf - exact).abs() < 1e-13, "{cf} vs {exact}");
        assert!((q - exact).abs() < 1e-9, "{q} vs {exact}");
    }

    #[test]
    fn strip_ridge_mass_is_counted() {
        let d = make_domain(DomainSpec::strip(3, 1.0)).unwrap();
        let u: Profile = power_profile(2.0).unwrap().into();
        let (cf, q) = both_routes(&d, &u, Term::value(-1.0).with_factor(Factor::NegLap));
        // 2 * u(R) * R^{-1}
        assert!((cf - 2.0).abs() < 1e-15);
        assert!((q - 2.0).abs() < 1e-15);
    }

    #[test]
    fn x_weighted_integrals() {
        // ∫_δ^1 d^{-1} X(d) (1-d)^0 dd on the slab = log(1 - log δ)
        let d = make_domain(DomainSpec::strip(2, 1.0)).unwrap();
        let delta = (-9.0f64).exp();
        let u: Profile = annulus_indicator(delta, 1.0).unwrap().into();
        let t = Term::value(-1.0).with_factor(Factor::XLog {
            gamma: 1.0,
            scale: 1.0,
        });
        let (cf, q) = both_routes(&d, &u, t);
        assert!((cf - 10f64.ln()).abs() < 1e-13);
        assert!((q - 10f64.ln()).abs() < 1e-9);
    }

    #[test]
    fn bump_requires_quadrature_and_is_positive() {
        let d = make_domain(DomainSpec::ball(3, 1.0)).unwrap();
        let u: Profile = radial_bump(0.5, 0.1).unwrap().into();
        assert!(Evaluator::new(&d)
            .with_route(Route::ClosedForm)
            .term(&u, Term::value(0.0))
            .is_err());
        let mass = Evaluator::new(&d).term(&u, Term::value(0.0)).unwrap().total();
        assert!(mass > 0.0);
        // exact: ∫ g(t) t² dt; g symmetric, ∫ g = w, ∫ g (t-c)² = w³/10·... check by quadrature
        let direct = crate::quadrature::integrate(
            |t| {
                let uu = ((t - 0.5f64).abs() / 0.1).min(1.0);
                (1.0 - uu * uu * (3.0 - 2.0 * uu)) * t * t
            },
            (0.4, 0.6),
            1e-12,
        )
        .unwrap()
        .value;
        assert!((mass - direct).abs() < 1e-10);
    }

    #[test]
    fn divergence_is_reported() {
        let d = make_domain(DomainSpec::ball(3, 1.0)).unwrap();
        let u: Profile = power_profile(0.5).unwrap().into();
        assert!(matches!(
            Evaluator::new(&d).term(&u, Term::value(-2.0)),
            Err(HardyError::Divergent(_))
        ));
        assert!(Evaluator::new(&d)
            .with_route(Route::Quadrature)
            .term(&u, Term::value(-2.0))
            .is_err());
    }

    #[test]
    fn merged_cancellation_is_exact() {
        // jump δ^{1-s} (1-δ)^{n-1} minus (s-1)∫ d^{-s} (1-d)^{n-1} equals
        // (n-1)∫ (1-r)^{1-s} r^{n-2} dr; the δ^{1-s} parts cancel exactly.
        let d = make_domain(DomainSpec::ball(3, 1.0)).unwrap();
        let s = 3.5;
        let delta = 1e-8;
        let u: Profile = ball_shell_indicator(delta).unwrap().into();
        let (v, _) = Evaluator::new(&d)
            .combination(&u, &[(1.0, Term::gradient(1.0 - s)), (-(s - 1.0), Term::value(-s))])
            .unwrap();
        // (n-1) ∫_δ^1 d^{1-s}(1-d) dd
        let e = |x: f64| x.powf(3.0 - s) / (3.0 - s) - x.powf(2.0 - s) / (2.0 - s);
        let exact = 2.0 * (e(1.0) - e(delta));
        assert!((v - exact).abs() / exact < 1e-12, "{v} vs {exact}");
    }
}
