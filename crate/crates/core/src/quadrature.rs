//! Deterministic one-dimensional integration.
//!
//! The workhorse is a globally adaptive 15-point Gauss–Kronrod rule: the
//! panel with the largest error estimate is bisected until the summed
//! estimate meets the tolerance. Two front ends remove the singular
//! behaviour that the Hardy functionals produce before the adaptive rule
//! ever sees it:
//!
//! * [`integrate_power_endpoint`] for `f(t) * dist(t)^alpha` with a power
//!   singularity at (or beyond) one end of the interval, and
//! * [`integrate_log_weighted`] for `f(t) * t^-1 * X(t)^gamma` where
//!   `X(t) = (1 - log t)^-1`, mapped to `tau = 1 - log t`.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{HardyError, Result};

/// Value of a one-dimensional integral with its error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub error_estimate: f64,
    pub subdivisions: usize,
}

impl QuadResult {
    pub const ZERO: QuadResult = QuadResult {
        value: 0.0,
        error_estimate: 0.0,
        subdivisions: 0,
    };

    /// Multiplies value and error by a constant.
    pub fn scaled(self, factor: f64) -> QuadResult {
        QuadResult {
            value: self.value * factor,
            error_estimate: self.error_estimate * factor.abs(),
            subdivisions: self.subdivisions,
        }
    }

    /// Sum of two results; error estimates add.
    pub fn plus(self, other: QuadResult) -> QuadResult {
        QuadResult {
            value: self.value + other.value,
            error_estimate: self.error_estimate + other.error_estimate,
            subdivisions: self.subdivisions + other.subdivisions,
        }
    }
}

/// Tolerances and budget for the adaptive rule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_panels: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        QuadOptions {
            rel_tol: DEFAULT_REL_TOL,
            abs_tol: 0.0,
            max_panels: MAX_PANELS,
        }
    }
}

impl QuadOptions {
    pub fn with_rel_tol(rel_tol: f64) -> Self {
        QuadOptions {
            rel_tol,
            ..Default::default()
        }
    }
}

/// Default relative tolerance for smooth integrands.
pub const DEFAULT_REL_TOL: f64 = 1e-10;
/// Default relative tolerance after a singular substitution.
pub const SINGULAR_REL_TOL: f64 = 1e-8;
/// Panel budget; exhausting it is an error.
pub const MAX_PANELS: usize = 1_000_000;

// Kronrod abscissae on [-1, 1] (positive half, descending) and weights.
#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
// 7-point Gauss weights for XGK[1], XGK[3], XGK[5], XGK[7].
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    abs_value: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    // Largest error first; ties broken by position so the order is total.
    fn cmp(&self, other: &Self) -> Ordering {
        self.error
            .total_cmp(&other.error)
            .then_with(|| other.a.total_cmp(&self.a))
    }
}

fn gauss_kronrod<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Result<Panel> {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    let mut abs_value = fc.abs() * WGK[7];
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        kronrod += WGK[j] * (f1 + f2);
        abs_value += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }
    let value = kronrod * half;
    let error = ((kronrod - gauss) * half).abs();
    if !value.is_finite() || !error.is_finite() {
        return Err(HardyError::Divergent(format!(
            "non-finite integrand value on [{a:e}, {b:e}]"
        )));
    }
    Ok(Panel {
        a,
        b,
        value,
        error,
        abs_value: abs_value * half.abs(),
    })
}

/// Adaptive integration of `f` over `[a, b]` with relative tolerance `tol`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, interval: (f64, f64), tol: f64) -> Result<QuadResult> {
    integrate_with(f, interval, &QuadOptions::with_rel_tol(tol))
}

/// Adaptive integration with explicit options.
///
/// Converges when the summed error estimate is at most
/// `max(rel_tol * |value|, abs_tol)`, or when it has reached the round-off
/// floor of the integrand's absolute mass.
pub fn integrate_with<F: Fn(f64) -> f64>(
    f: F,
    interval: (f64, f64),
    opts: &QuadOptions,
) -> Result<QuadResult> {
    let (a, b) = interval;
    if !(a.is_finite() && b.is_finite()) || a > b {
        return Err(HardyError::InvalidInterval { a, b });
    }
    if a == b {
        return Ok(QuadResult::ZERO);
    }
    let first = gauss_kronrod(&f, a, b)?;
    let mut total = first.value;
    let mut error = first.error;
    let mut abs_total = first.abs_value;
    let mut heap = BinaryHeap::new();
    heap.push(first);
    let mut panels = 1usize;

    loop {
        let target = (opts.rel_tol * total.abs()).max(opts.abs_tol);
        let roundoff = 50.0 * f64::EPSILON * abs_total;
        if error <= target || error <= roundoff {
            break;
        }
        if panels >= opts.max_panels {
            return Err(HardyError::NonConvergence { panels, error });
        }
        let worst = heap.pop().expect("heap holds at least one panel");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // Panel can no longer be split in floating point.
            return Err(HardyError::NonConvergence { panels, error });
        }
        let left = gauss_kronrod(&f, worst.a, mid)?;
        let right = gauss_kronrod(&f, mid, worst.b)?;
        total += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        abs_total += left.abs_value + right.abs_value - worst.abs_value;
        heap.push(left);
        heap.push(right);
        panels += 1;
    }

    // Re-sum from the panels so the result does not depend on the update history.
    let mut parts: Vec<Panel> = heap.into_vec();
    parts.sort_by(|p, q| p.a.total_cmp(&q.a));
    let value = parts.iter().map(|p| p.value).sum();
    let error = parts.iter().map(|p| p.error).sum();
    Ok(QuadResult {
        value,
        error_estimate: error,
        subdivisions: panels,
    })
}

/// Location of a power singularity relative to the integration interval.
///
/// `Left(x0)` means the weight is `(t - x0)^alpha` with `x0 <= a`;
/// `Right(x0)` means `(x0 - t)^alpha` with `x0 >= b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Endpoint {
    Left(f64),
    Right(f64),
}

impl Endpoint {
    /// Singularity sitting exactly on the left end of `[a, b]`.
    pub fn at_left(interval: (f64, f64)) -> Self {
        Endpoint::Left(interval.0)
    }

    /// Singularity sitting exactly on the right end of `[a, b]`.
    pub fn at_right(interval: (f64, f64)) -> Self {
        Endpoint::Right(interval.1)
    }
}

/// Integrates `f_smooth(t) * dist(t)^alpha` where `dist` is the distance to
/// the singular point described by `endpoint`.
///
/// When the singular point is an end of the interval the substitution
/// `v = dist^(alpha + 1)` absorbs the singular factor exactly, which needs
/// `alpha > -1`. When it lies strictly outside, the distance range is
/// mapped logarithmically so that steep power laws (`dist` spanning many
/// decades) become smooth exponentials.
pub fn integrate_power_endpoint<F: Fn(f64) -> f64>(
    f_smooth: F,
    alpha: f64,
    endpoint: Endpoint,
    interval: (f64, f64),
    tol: f64,
) -> Result<QuadResult> {
    let (a, b) = interval;
    if !(a.is_finite() && b.is_finite()) || a > b || !alpha.is_finite() {
        return Err(HardyError::InvalidInterval { a, b });
    }
    if a == b {
        return Ok(QuadResult::ZERO);
    }
    // Reparametrise by distance rho from the singular point.
    let (rho_lo, rho_hi, to_t): (f64, f64, Box<dyn Fn(f64) -> f64>) = match endpoint {
        Endpoint::Left(x0) => {
            if x0 > a {
                return Err(HardyError::InvalidInterval { a, b });
            }
            (a - x0, b - x0, Box::new(move |rho| x0 + rho))
        }
        Endpoint::Right(x0) => {
            if x0 < b {
                return Err(HardyError::InvalidInterval { a, b });
            }
            (x0 - b, x0 - a, Box::new(move |rho| x0 - rho))
        }
    };
    power_law_integral(|rho| f_smooth(to_t(rho)), alpha, (rho_lo, rho_hi), tol)
}

/// `integral_{lo}^{hi} rho^alpha * h(rho) d rho` for `0 <= lo < hi`.
pub(crate) fn power_law_integral<H: Fn(f64) -> f64>(
    h: H,
    alpha: f64,
    (lo, hi): (f64, f64),
    tol: f64,
) -> Result<QuadResult> {
    if !(lo >= 0.0) || !(hi >= lo) || !hi.is_finite() {
        return Err(HardyError::InvalidInterval { a: lo, b: hi });
    }
    if lo == hi {
        return Ok(QuadResult::ZERO);
    }
    if lo == 0.0 {
        if alpha <= -1.0 {
            return Err(HardyError::NonIntegrable { alpha });
        }
        if alpha >= 0.0 && alpha.fract() == 0.0 {
            return integrate(|rho| rho.powf(alpha) * h(rho), (0.0, hi), tol);
        }
        // v = rho^(alpha+1): d rho * rho^alpha = dv / (alpha + 1)
        let q = alpha + 1.0;
        let inv_q = 1.0 / q;
        let v_hi = hi.powf(q);
        return Ok(integrate(|v| h(v.powf(inv_q)), (0.0, v_hi), tol)?.scaled(inv_q));
    }
    if hi / lo > 4.0 {
        // rho = e^u
        let q = alpha + 1.0;
        return integrate(
            |u| {
                let rho = u.exp();
                (q * u).exp() * h(rho)
            },
            (lo.ln(), hi.ln()),
            tol,
        );
    }
    integrate(|rho| rho.powf(alpha) * h(rho), (lo, hi), tol)
}

/// Integrates `f_smooth(t) * t^-1 * X(t)^gamma` over `[delta, b] ⊆ (0, 1]`
/// after the substitution `tau = 1 - log t`, i.e.
/// `integral f_smooth(e^(1 - tau)) tau^-gamma d tau` over
/// `[1 - log b, 1 - log delta]`.
pub fn integrate_log_weighted<F: Fn(f64) -> f64>(
    f_smooth: F,
    gamma: f64,
    interval: (f64, f64),
    tol: f64,
) -> Result<QuadResult> {
    let (delta, b) = interval;
    if !(delta > 0.0) || !(b <= 1.0) || delta > b {
        return Err(HardyError::InvalidInterval { a: delta, b });
    }
    if delta == b {
        return Ok(QuadResult::ZERO);
    }
    let tau_lo = 1.0 - b.ln();
    let tau_hi = 1.0 - delta.ln();
    integrate(
        |tau| f_smooth((1.0 - tau).exp()) * tau.powf(-gamma),
        (tau_lo, tau_hi),
        tol,
    )
}

/// Closed form of `integral_{delta}^{b} t^-1 X(t)^gamma dt` (the
/// `f_smooth ≡ 1` case of [`integrate_log_weighted`]); `delta = 0` is
/// allowed for `gamma > 1`.
pub fn log_weight_closed_form(gamma: f64, delta: f64, b: f64) -> Result<f64> {
    if !(delta >= 0.0) || !(b <= 1.0) || delta > b {
        return Err(HardyError::InvalidInterval { a: delta, b });
    }
    let tau_lo = 1.0 - b.ln();
    let tau_hi = 1.0 - delta.ln();
    if (gamma - 1.0).abs() < 1e-15 {
        if delta == 0.0 {
            return Err(HardyError::Divergent(
                "log weight with gamma = 1 down to zero".into(),
            ));
        }
        // log(tau_hi / tau_lo) written to stay accurate when the two are close
        return Ok(((tau_hi - tau_lo) / tau_lo).ln_1p());
    }
    let upper = if tau_hi.is_infinite() {
        0.0
    } else {
        tau_hi.powf(1.0 - gamma)
    };
    Ok((tau_lo.powf(1.0 - gamma) - upper) / (gamma - 1.0))
}
