//! Command-line front end: argument parsing, dispatch and report output.
//!
//! Reports are CSV (default) or JSON. Both carry the same fields, in the
//! same order, and identical configurations produce byte-identical output.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use crate::acceptance;
use crate::checks;
use crate::constants::{convergence_study_with, predicted_constant, ConstantParams, StudyMode, StudyReport, CONSTANT_IDS};
use crate::error::{HardyError, Result};
use crate::functionals::{
    div_t_grid, EvalOptions, EvaluationReport, Evaluator, FieldId, FieldParams, Functional, GapParams,
    ImDenominator, InequalityId, Route,
};
use crate::geometry::{make_domain, Domain, DomainSpec};
use crate::profiles::{
    annulus_indicator, ball_shell_indicator, cheeger_concentric, power_profile, radial_bump,
    shifted_power_profile, strip_slab_profile, Profile,
};

/// Default pass tolerance when neither `--tol` nor `HARDYLAB_TOL` is set.
pub const DEFAULT_TOL: f64 = 1e-8;

/// Residual bound used by `divcheck`.
pub const DIVCHECK_TOL: f64 = 1e-6;

pub const CSV_HEADER: &str =
    "domain,dim,geom_params,family,family_params,functional,s,beta,gamma,p,value,err_est,prediction,gap,pass";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DomainKind {
    Ball,
    Strip,
    PuncturedSpace,
    PuncturedBall,
    Annulus,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FamilyKind {
    Annulus,
    Power,
    PowerS,
    BallShell,
    Slab,
    Cheeger,
    Bump,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FunctionalKind {
    Plain,
    Qbeta,
    Qgamma,
    Remainder,
    Im,
    Gradq,
    Meanlap,
    Lp,
    Gap,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Limit,
    Above,
    Zero,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RouteArg {
    Auto,
    Closed,
    Quadrature,
}

#[derive(Debug, Parser)]
#[command(name = "hardylab", version, about = "Weighted Hardy inequality laboratory")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Debug, Subcommand)]
enum Cmd {
    /// List the catalogue domains and their geometric data.
    Catalogue(OutputArgs),
    /// Predicted constants for a domain.
    Constants {
        #[command(flatten)]
        domain: DomainArgs,
        #[arg(long)]
        s: f64,
        #[arg(long)]
        p: Option<f64>,
        #[arg(long)]
        gamma: Option<f64>,
        #[arg(long)]
        k: Option<u32>,
        /// One constant id; all applicable ones when absent.
        #[arg(long)]
        id: Option<String>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Evaluate one functional on one test function.
    Quotient(EvalArgs),
    /// Evaluate a functional along a ladder of family parameters.
    Sweep {
        #[command(flatten)]
        eval: EvalArgs,
        /// `a:b:k:log`, `a:b:k:lin` or a comma list, strictly decreasing.
        #[arg(long)]
        ladder: String,
        #[arg(long, value_enum, default_value = "limit")]
        mode: ModeArg,
        /// Final-value threshold for `--mode zero`.
        #[arg(long)]
        threshold: Option<f64>,
    },
    /// Divergence residuals of a calibration field on a grid.
    Divcheck {
        #[command(flatten)]
        domain: OptDomainArgs,
        #[arg(long)]
        field: String,
        #[arg(long)]
        s: f64,
        #[arg(long, default_value_t = 2.0)]
        gamma: f64,
        #[arg(long = "scale")]
        r: Option<f64>,
        #[arg(long, default_value_t = 64)]
        grid: usize,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Run a verification suite.
    Verify {
        #[arg(long)]
        suite: String,
    },
}

#[derive(Debug, Clone, Args)]
struct OutputArgs {
    #[arg(long, value_enum)]
    format: Option<Format>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    tol: Option<f64>,
}

#[derive(Debug, Clone, Args)]
struct DomainArgs {
    #[arg(long, value_enum)]
    domain: DomainKind,
    #[command(flatten)]
    lengths: DomainLengths,
}

#[derive(Debug, Clone, Args)]
struct OptDomainArgs {
    #[arg(long, value_enum)]
    domain: Option<DomainKind>,
    #[command(flatten)]
    lengths: DomainLengths,
}

#[derive(Debug, Clone, Args)]
struct DomainLengths {
    #[arg(long, default_value_t = 3)]
    dim: usize,
    /// Ball radius, strip half width or punctured-ball outer radius.
    #[arg(long)]
    radius: Option<f64>,
    #[arg(long)]
    inner: Option<f64>,
    #[arg(long)]
    outer: Option<f64>,
}

#[derive(Debug, Clone, Args)]
struct EvalArgs {
    #[command(flatten)]
    domain: DomainArgs,
    #[arg(long, value_enum)]
    family: FamilyKind,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long)]
    eta: Option<f64>,
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long)]
    exponent: Option<f64>,
    /// Transverse scale of the slab family.
    #[arg(long)]
    scale: Option<f64>,
    /// Slab transverse scale as `eps^k`.
    #[arg(long)]
    scale_power: Option<f64>,
    #[arg(long)]
    rho: Option<f64>,
    #[arg(long)]
    center: Option<f64>,
    #[arg(long)]
    width: Option<f64>,
    /// Defaults to qbeta with `--beta`, qgamma with `--gamma`, else plain.
    #[arg(long, value_enum)]
    functional: Option<FunctionalKind>,
    #[arg(long)]
    s: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    c0: Option<f64>,
    #[arg(long)]
    q: Option<f64>,
    #[arg(long)]
    m: Option<u32>,
    /// Use the `d^-1 X` denominator for `im`.
    #[arg(long)]
    x_weight: bool,
    /// Inequality id for `gap`.
    #[arg(long)]
    id: Option<String>,
    /// Remainder constant for `gap`.
    #[arg(long)]
    c: Option<f64>,
    #[arg(long)]
    prediction: Option<f64>,
    #[arg(long, value_enum, default_value = "auto")]
    route: RouteArg,
    #[command(flatten)]
    output: OutputArgs,
}

/// How the slab's transverse scale is chosen.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SlabScale {
    Fixed(f64),
    /// `eps^k`.
    Power(f64),
}

/// A test-function family with its parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FamilySpec {
    Annulus { delta: f64, eta: f64 },
    Power { exponent: f64 },
    PowerS { eps: f64 },
    BallShell { delta: f64 },
    Slab { eps: f64, eta: f64, scale: SlabScale },
    Cheeger { rho: f64 },
    Bump { center: f64, width: f64 },
}

impl FamilySpec {
    pub fn build(&self) -> Result<Profile> {
        Ok(match *self {
            FamilySpec::Annulus { delta, eta } => annulus_indicator(delta, eta)?.into(),
            FamilySpec::Power { exponent } => power_profile(exponent)?.into(),
            FamilySpec::PowerS { eps } => shifted_power_profile(eps)?.into(),
            FamilySpec::BallShell { delta } => ball_shell_indicator(delta)?.into(),
            FamilySpec::Slab { eps, eta, scale } => {
                let scale = match scale {
                    SlabScale::Fixed(v) => v,
                    SlabScale::Power(k) => eps.powf(k),
                };
                strip_slab_profile(eps, eta, scale)?.into()
            }
            FamilySpec::Cheeger { rho } => cheeger_concentric(rho)?.into(),
            FamilySpec::Bump { center, width } => radial_bump(center, width)?.into(),
        })
    }

    /// The same family with its ladder parameter replaced.
    pub fn with_ladder_value(&self, v: f64) -> FamilySpec {
        let mut f = *self;
        match &mut f {
            FamilySpec::Annulus { delta, .. } | FamilySpec::BallShell { delta } => *delta = v,
            FamilySpec::Power { exponent } => *exponent = v,
            FamilySpec::PowerS { eps } | FamilySpec::Slab { eps, .. } => *eps = v,
            FamilySpec::Cheeger { rho } => *rho = v,
            FamilySpec::Bump { width, .. } => *width = v,
        }
        f
    }

    /// Name of the parameter a sweep varies.
    pub fn ladder_parameter(&self) -> &'static str {
        match self {
            FamilySpec::Annulus { .. } | FamilySpec::BallShell { .. } => "delta",
            FamilySpec::Power { .. } => "exponent",
            FamilySpec::PowerS { .. } | FamilySpec::Slab { .. } => "eps",
            FamilySpec::Cheeger { .. } => "rho",
            FamilySpec::Bump { .. } => "width",
        }
    }
}

/// What to do, with every parameter already validated.
#[derive(Debug, Clone, PartialEq)]
pub enum Command {
    Catalogue,
    Constants {
        domain: DomainSpec,
        params: ConstantParams,
        id: Option<String>,
    },
    Quotient {
        domain: DomainSpec,
        family: FamilySpec,
        functional: Functional,
        prediction: Option<f64>,
        route: Route,
    },
    Sweep {
        domain: DomainSpec,
        family: FamilySpec,
        functional: Functional,
        ladder: Vec<f64>,
        prediction: Option<f64>,
        mode: StudyMode,
        route: Route,
    },
    Divcheck {
        domain: DomainSpec,
        field: FieldId,
        params: FieldParams,
        grid: usize,
    },
    Verify,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub tol: f64,
    /// File to write; stdout when absent.
    pub out: Option<PathBuf>,
    pub format: Format,
}

fn usage(msg: impl Into<String>) -> HardyError {
    HardyError::Usage(msg.into())
}

fn need(v: Option<f64>, flag: &str) -> Result<f64> {
    v.ok_or_else(|| usage(format!("missing --{flag}")))
}

fn parse_f64(s: &str, what: &str) -> Result<f64> {
    s.trim()
        .parse::<f64>()
        .map_err(|_| usage(format!("cannot parse {what} '{s}' as a number")))
}

/// Expands `a:b:k:log`, `a:b:k:lin` or `x1,x2,...`.
pub fn parse_ladder(spec: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = spec.split(':').collect();
    let ladder = if parts.len() == 4 {
        let a = parse_f64(parts[0], "ladder start")?;
        let b = parse_f64(parts[1], "ladder stop")?;
        let k: usize = parts[2]
            .trim()
            .parse()
            .map_err(|_| usage(format!("cannot parse ladder count '{}'", parts[2])))?;
        if k < 2 {
            return Err(usage("a ladder needs at least two points"));
        }
        let step = |i: usize| i as f64 / (k - 1) as f64;
        match parts[3] {
            "log" => {
                if !(a > 0.0 && b > 0.0) {
                    return Err(usage("a log ladder needs positive end points"));
                }
                let (la, lb) = (a.log10(), b.log10());
                (0..k).map(|i| 10f64.powf(la + (lb - la) * step(i))).collect()
            }
            "lin" => (0..k).map(|i| a + (b - a) * step(i)).collect(),
            other => return Err(usage(format!("unknown ladder spacing '{other}'"))),
        }
    } else if parts.len() == 1 {
        spec.split(',')
            .map(|x| parse_f64(x, "ladder value"))
            .collect::<Result<Vec<_>>>()?
    } else {
        return Err(usage(format!("bad ladder '{spec}'")));
    };
    if !ladder.windows(2).all(|w| w[1] < w[0]) {
        return Err(usage("ladder must be strictly decreasing"));
    }
    Ok(ladder)
}

fn domain_spec(kind: DomainKind, l: &DomainLengths) -> Result<DomainSpec> {
    let spec = match kind {
        DomainKind::Ball => DomainSpec::ball(l.dim, need(l.radius, "radius")?),
        DomainKind::Strip => DomainSpec::strip(l.dim, need(l.radius, "radius")?),
        DomainKind::PuncturedSpace => DomainSpec::punctured_space(l.dim),
        DomainKind::PuncturedBall => DomainSpec::punctured_ball(l.dim, need(l.radius, "radius")?),
        DomainKind::Annulus => {
            DomainSpec::annulus(l.dim, need(l.inner, "inner")?, need(l.outer, "outer")?)
        }
    };
    make_domain(spec.clone()).map_err(|e| usage(e.to_string()))?;
    Ok(spec)
}

fn family_spec(a: &EvalArgs, ladder_fill: Option<f64>) -> Result<FamilySpec> {
    // a sweep supplies the ladder parameter itself
    let fill = |v: Option<f64>| v.or(ladder_fill);
    let spec = match a.family {
        FamilyKind::Annulus => FamilySpec::Annulus {
            delta: need(fill(a.delta), "delta")?,
            eta: need(a.eta, "eta")?,
        },
        FamilyKind::Power => FamilySpec::Power {
            exponent: need(fill(a.exponent), "exponent")?,
        },
        FamilyKind::PowerS => FamilySpec::PowerS {
            eps: need(fill(a.eps), "eps")?,
        },
        FamilyKind::BallShell => FamilySpec::BallShell {
            delta: need(fill(a.delta), "delta")?,
        },
        FamilyKind::Slab => FamilySpec::Slab {
            eps: need(fill(a.eps), "eps")?,
            eta: need(a.eta, "eta")?,
            scale: match (a.scale, a.scale_power) {
                (Some(v), None) => SlabScale::Fixed(v),
                (None, Some(k)) => SlabScale::Power(k),
                (None, None) => SlabScale::Fixed(1.0),
                (Some(_), Some(_)) => return Err(usage("give --scale or --scale-power, not both")),
            },
        },
        FamilyKind::Cheeger => FamilySpec::Cheeger {
            rho: need(fill(a.rho), "rho")?,
        },
        FamilyKind::Bump => FamilySpec::Bump {
            center: need(a.center, "center")?,
            width: need(fill(a.width), "width")?,
        },
    };
    Ok(spec)
}

fn functional(a: &EvalArgs) -> Result<Functional> {
    let kind = a.functional.unwrap_or(if a.beta.is_some() {
        FunctionalKind::Qbeta
    } else if a.gamma.is_some() {
        FunctionalKind::Qgamma
    } else {
        FunctionalKind::Plain
    });
    let s = || need(a.s, "s");
    let f = match kind {
        FunctionalKind::Plain => Functional::Plain { s: s()? },
        FunctionalKind::Qbeta => {
            let (s, beta) = (s()?, need(a.beta, "beta")?);
            if !(s > 1.0) {
                return Err(usage(format!("Q_beta needs s > 1, got {s}")));
            }
            if !(beta > 0.0 && beta <= s - 1.0) {
                return Err(usage(format!("Q_beta needs 0 < beta <= s - 1, got {beta}")));
            }
            Functional::Qbeta { s, beta }
        }
        FunctionalKind::Qgamma => Functional::Qgamma {
            s: s()?,
            gamma: need(a.gamma, "gamma")?,
        },
        FunctionalKind::Remainder => Functional::Remainder {
            s: s()?,
            c0: need(a.c0, "c0")?,
            q: need(a.q, "q")?,
            gamma: need(a.gamma, "gamma")?,
        },
        FunctionalKind::Im => Functional::Im {
            s: s()?,
            m: a.m.unwrap_or(0),
            denom: if a.x_weight {
                ImDenominator::XWeight
            } else {
                ImDenominator::Power(need(a.beta, "beta")?)
            },
        },
        FunctionalKind::Gradq => {
            let s = s()?;
            Functional::Gradient {
                s,
                c0: a.c0.unwrap_or(s - 1.0),
                alpha: need(a.alpha, "alpha")?,
            }
        }
        FunctionalKind::Meanlap => Functional::MeanLap,
        FunctionalKind::Lp => Functional::Lp {
            s: s()?,
            p: need(a.p, "p")?,
        },
        FunctionalKind::Gap => {
            let id: InequalityId = a
                .id
                .as_deref()
                .ok_or_else(|| usage("missing --id"))?
                .parse()?;
            let mut params = GapParams::new(s()?);
            if let Some(g) = a.gamma {
                params = params.with_gamma(g);
            }
            if let Some(p) = a.p {
                params = params.with_p(p);
            }
            if let Some(c) = a.c {
                params = params.with_c(c);
            }
            Functional::Gap { id, params }
        }
    };
    if let Some(s) = f.s() {
        if !s.is_finite() {
            return Err(usage(format!("s = {s} is not finite")));
        }
    }
    Ok(f)
}

fn route(r: RouteArg) -> Route {
    match r {
        RouteArg::Auto => Route::Auto,
        RouteArg::Closed => Route::ClosedForm,
        RouteArg::Quadrature => Route::Quadrature,
    }
}

fn resolve_output(o: &OutputArgs, env: &HashMap<String, String>, stem: &str) -> Result<(f64, Option<PathBuf>, Format)> {
    let tol = match o.tol {
        Some(t) => t,
        None => match env.get("HARDYLAB_TOL") {
            Some(v) => parse_f64(v, "HARDYLAB_TOL")?,
            None => DEFAULT_TOL,
        },
    };
    if !(tol > 0.0) {
        return Err(usage(format!("tolerance must be positive, got {tol}")));
    }
    let format = o.format.unwrap_or(Format::Csv);
    let ext = match format {
        Format::Csv => "csv",
        Format::Json => "json",
    };
    let out = match &o.out {
        Some(p) => Some(p.clone()),
        None => env
            .get("HARDYLAB_OUT")
            .map(|dir| Path::new(dir).join(format!("hardylab-{stem}.{ext}"))),
    };
    Ok((tol, out, format))
}

/// Parses `argv` (without the program name) against an environment map.
/// Flags override the environment.
pub fn parse_config<I, S>(argv: I, env: &HashMap<String, String>) -> Result<RunConfig>
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let args = std::iter::once(std::ffi::OsString::from("hardylab")).chain(argv.into_iter().map(Into::into));
    let cli = Cli::try_parse_from(args).map_err(|e| usage(e.to_string()))?;
    let (command, output, stem) = match cli.command {
        Cmd::Catalogue(o) => (Command::Catalogue, o, "catalogue"),
        Cmd::Constants {
            domain,
            s,
            p,
            gamma,
            k,
            id,
            output,
        } => {
            let mut params = ConstantParams::new(s);
            params.p = p.unwrap_or(params.p);
            params.gamma = gamma.unwrap_or(params.gamma);
            params.k = k.unwrap_or(params.k);
            if let Some(id) = &id {
                if !CONSTANT_IDS.contains(&id.as_str()) {
                    return Err(usage(format!("unknown constant id '{id}'")));
                }
            }
            let domain = domain_spec(domain.domain, &domain.lengths)?;
            (Command::Constants { domain, params, id }, output, "constants")
        }
        Cmd::Quotient(a) => {
            let domain = domain_spec(a.domain.domain, &a.domain.lengths)?;
            let family = family_spec(&a, None)?;
            family.build()?;
            let cmd = Command::Quotient {
                domain,
                family,
                functional: functional(&a)?,
                prediction: a.prediction,
                route: route(a.route),
            };
            (cmd, a.output, "quotient")
        }
        Cmd::Sweep {
            eval: a,
            ladder,
            mode,
            threshold,
        } => {
            let domain = domain_spec(a.domain.domain, &a.domain.lengths)?;
            let ladder = parse_ladder(&ladder)?;
            let family = family_spec(&a, Some(ladder[0]))?;
            for &v in &ladder {
                family.with_ladder_value(v).build()?;
            }
            let mode = match mode {
                ModeArg::Limit => StudyMode::Limit,
                ModeArg::Above => StudyMode::LimitFromAbove,
                ModeArg::Zero => StudyMode::DecreasingToZero {
                    threshold: need(threshold, "threshold")?,
                },
            };
            let prediction = match mode {
                StudyMode::DecreasingToZero { .. } => Some(a.prediction.unwrap_or(0.0)),
                _ => a.prediction,
            };
            let cmd = Command::Sweep {
                domain,
                family,
                functional: functional(&a)?,
                ladder,
                prediction,
                mode,
                route: route(a.route),
            };
            (cmd, a.output, "sweep")
        }
        Cmd::Divcheck {
            domain,
            field,
            s,
            gamma,
            r,
            grid,
            output,
        } => {
            let field: FieldId = field.parse()?;
            let spec = match domain.domain {
                Some(kind) => domain_spec(kind, &domain.lengths)?,
                None => DomainSpec::ball(domain.lengths.dim, domain.lengths.radius.unwrap_or(1.0)),
            };
            if grid == 0 {
                return Err(usage("--grid must be positive"));
            }
            let params = FieldParams { s, gamma, r };
            (
                Command::Divcheck {
                    domain: spec,
                    field,
                    params,
                    grid,
                },
                output,
                "divcheck",
            )
        }
        Cmd::Verify { suite } => {
            if suite != "acceptance" {
                return Err(usage(format!("unknown suite '{suite}'")));
            }
            let o = OutputArgs {
                format: None,
                out: None,
                tol: None,
            };
            (Command::Verify, o, "verify")
        }
    };
    let (tol, out, format) = resolve_output(&output, env, stem)?;
    Ok(RunConfig {
        command,
        tol,
        out,
        format,
    })
}

/// One report row.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Row {
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
    pub value: Option<f64>,
    pub err_est: Option<f64>,
    /// Already formatted: a number, `inf` or `lo..hi`.
    pub prediction: Option<String>,
    pub gap: Option<f64>,
    pub pass: Option<bool>,
}

/// `{:.16e}` with `inf`, `-inf` and `nan` spelled out.
pub fn format_float(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{v:.16e}")
    }
}

fn beta_gamma_p(f: &Functional) -> (Option<f64>, Option<f64>, Option<f64>) {
    match *f {
        Functional::Qbeta { beta, .. } => (Some(beta), None, None),
        Functional::Qgamma { gamma, .. } | Functional::Remainder { gamma, .. } => (None, Some(gamma), None),
        Functional::Im {
            denom: ImDenominator::Power(beta),
            ..
        } => (Some(beta), None, None),
        Functional::Lp { p, .. } => (None, None, Some(p)),
        Functional::Gap { params, .. } => (None, Some(params.gamma), Some(params.p)),
        _ => (None, None, None),
    }
}

impl Row {
    fn for_domain(d: &Domain) -> Row {
        Row {
            domain: d.kind_label().into(),
            dim: d.dim(),
            geom_params: d.geom_params_label(),
            ..Row::default()
        }
    }

    fn judged(mut self, prediction: Option<f64>, tol: f64) -> Row {
        if let (Some(pred), Some(v)) = (prediction, self.value) {
            let gap = v - pred;
            self.prediction = Some(format_float(pred));
            self.gap = Some(gap);
            self.pass = Some(gap.abs() <= tol);
        }
        self
    }

    /// A row for one evaluation.
    pub fn from_evaluation(d: &Domain, u: &Profile, rep: &EvaluationReport) -> Row {
        let (beta, gamma, p) = beta_gamma_p(&rep.functional);
        Row {
            family: u.family().into(),
            family_params: u.params_label(),
            functional: rep.functional.label(),
            s: rep.functional.s(),
            beta,
            gamma,
            p,
            value: Some(rep.value),
            err_est: Some(rep.error_estimate),
            ..Row::for_domain(d)
        }
    }

    /// One row per ladder point; `pass` is the verdict on the whole study.
    pub fn from_study(study: &StudyReport, params: &[String]) -> Vec<Row> {
        let st = &study.setup;
        study
            .ladder
            .iter()
            .zip(params)
            .map(|(pt, fp)| Row {
                domain: st.domain.clone(),
                dim: st.dim,
                geom_params: st.geom_params.clone(),
                family: st.family.clone(),
                family_params: fp.clone(),
                functional: st.functional.clone(),
                s: st.s,
                beta: st.beta,
                gamma: st.gamma,
                p: st.p,
                value: Some(pt.value),
                err_est: Some(pt.error),
                prediction: Some(format_float(study.prediction)),
                gap: Some(pt.value - study.prediction),
                pass: Some(study.pass),
            })
            .collect()
    }

    fn cells(&self) -> Vec<(&'static str, Cell)> {
        let num = |v: Option<f64>| v.map_or(Cell::Empty, Cell::Num);
        vec![
            ("domain", Cell::Text(self.domain.clone())),
            ("dim", Cell::Int(self.dim)),
            ("geom_params", Cell::Text(self.geom_params.clone())),
            ("family", Cell::Text(self.family.clone())),
            ("family_params", Cell::Text(self.family_params.clone())),
            ("functional", Cell::Text(self.functional.clone())),
            ("s", num(self.s)),
            ("beta", num(self.beta)),
            ("gamma", num(self.gamma)),
            ("p", num(self.p)),
            ("value", num(self.value)),
            ("err_est", num(self.err_est)),
            ("prediction", self.prediction.clone().map_or(Cell::Empty, Cell::Text)),
            ("gap", num(self.gap)),
            ("pass", self.pass.map_or(Cell::Empty, Cell::Bool)),
        ]
    }
}

enum Cell {
    Empty,
    Text(String),
    Int(usize),
    Num(f64),
    Bool(bool),
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Serialises rows; the header is always present.
pub fn emit_report(rows: &[Row], format: Format) -> String {
    match format {
        Format::Csv => {
            let mut out = String::from(CSV_HEADER);
            out.push('\n');
            for row in rows {
                let cells: Vec<String> = row
                    .cells()
                    .into_iter()
                    .map(|(_, c)| match c {
                        Cell::Empty => String::new(),
                        Cell::Text(s) => csv_field(&s),
                        Cell::Int(i) => i.to_string(),
                        Cell::Num(v) => format_float(v),
                        Cell::Bool(b) => b.to_string(),
                    })
                    .collect();
                let _ = writeln!(out, "{}", cells.join(","));
            }
            out
        }
        Format::Json => {
            let runs: Vec<Value> = rows
                .iter()
                .map(|row| {
                    let mut m = Map::new();
                    for (k, c) in row.cells() {
                        let v = match c {
                            Cell::Empty => Value::Null,
                            Cell::Text(s) => Value::String(s),
                            Cell::Int(i) => json!(i),
                            Cell::Num(v) if v.is_finite() => json!(v),
                            Cell::Num(v) => Value::String(format_float(v)),
                            Cell::Bool(b) => Value::Bool(b),
                        };
                        m.insert(k.to_string(), v);
                    }
                    Value::Object(m)
                })
                .collect();
            let doc = json!({ "schema_version": 1, "runs": runs });
            let mut s = serde_json::to_string_pretty(&doc).expect("report values serialise");
            s.push('\n');
            s
        }
    }
}

/// Writes `contents` to `path` through a sibling temporary file and a rename.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    fs::write(&tmp, contents)?;
    fs::rename(&tmp, path).inspect_err(|_| {
        let _ = fs::remove_file(&tmp);
    })?;
    Ok(())
}

/// What a command produced.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    /// Text for stdout or the output file.
    pub text: String,
    /// Whether every judged check passed.
    pub pass: bool,
}

fn evaluator(domain: &Domain, r: Route) -> Evaluator<'_> {
    Evaluator::new(domain).with_options(EvalOptions {
        route: r,
        ..EvalOptions::default()
    })
}

fn catalogue_text() -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:<16} {:>3} {:<12} {:>9} {:>9} {:>9} {:>9} {:>9} {:>4} {:>5}",
        "domain", "n", "params", "inradius", "reach", "H_min", "H_max", "H_mean", "(C)", "check"
    );
    let opt = |v: Option<f64>| v.map_or("-".to_string(), |v| format!("{v:.4}"));
    for d in checks::catalogue() {
        let p = d.properties();
        // condition (C) must agree with the sign of -Δd on a sample grid
        let sampled = d.sampled_min_neg_laplacian(400) >= -1e-12;
        let consistent = sampled == p.satisfies_c;
        let _ = writeln!(
            out,
            "{:<16} {:>3} {:<12} {:>9} {:>9} {:>9} {:>9} {:>9} {:>4} {:>5}",
            d.kind_label(),
            d.dim(),
            d.geom_params_label(),
            format_float_short(p.inradius),
            format_float_short(p.curvature.reach.as_f64()),
            opt(p.curvature.h_min),
            opt(p.curvature.h_max),
            opt(p.curvature.h_mean),
            if p.satisfies_c { "yes" } else { "no" },
            if consistent { "ok" } else { "FAIL" },
        );
    }
    out
}

fn format_float_short(v: f64) -> String {
    if v.is_infinite() {
        "inf".into()
    } else {
        format!("{v:.4}")
    }
}

/// Runs a parsed configuration and returns its report text.
pub fn execute(cfg: &RunConfig) -> Result<Outcome> {
    let tol = cfg.tol;
    let (rows, pass) = match &cfg.command {
        Command::Catalogue => {
            let text = catalogue_text();
            let pass = !text.contains("FAIL");
            return Ok(Outcome { text, pass });
        }
        Command::Verify => {
            let results = acceptance::run();
            let mut text = String::new();
            for r in &results {
                let _ = writeln!(text, "{r}");
            }
            let failed = results.iter().filter(|r| !r.pass).count();
            let _ = writeln!(text, "{} of {} criteria passed", results.len() - failed, results.len());
            return Ok(Outcome {
                text,
                pass: failed == 0,
            });
        }
        Command::Constants { domain, params, id } => {
            let d = make_domain(domain.clone())?;
            let ids: Vec<&str> = match id {
                Some(id) => vec![id.as_str()],
                None => CONSTANT_IDS.to_vec(),
            };
            let mut rows = Vec::new();
            for id in ids {
                let c = match predicted_constant(id, &d, *params) {
                    Ok(c) => c,
                    Err(e) if id_is_optional(id, &e, cfg) => continue,
                    Err(e) => return Err(e),
                };
                rows.push(Row {
                    functional: c.id.clone(),
                    s: Some(params.s),
                    gamma: Some(params.gamma),
                    p: Some(params.p),
                    prediction: Some(c.value.to_string()),
                    ..Row::for_domain(&d)
                });
            }
            (rows, true)
        }
        Command::Quotient {
            domain,
            family,
            functional,
            prediction,
            route,
        } => {
            let d = make_domain(domain.clone())?;
            let u = family.build()?;
            let rep = evaluator(&d, *route).evaluate(&u, functional)?;
            let row = Row::from_evaluation(&d, &u.bind(functional.s().unwrap_or(1.0)), &rep).judged(*prediction, tol);
            let pass = row.pass.unwrap_or(true);
            (vec![row], pass)
        }
        Command::Sweep {
            domain,
            family,
            functional,
            ladder,
            prediction,
            mode,
            route,
        } => {
            let d = make_domain(domain.clone())?;
            let ev = evaluator(&d, *route);
            let study = convergence_study_with(
                &ev,
                |v| family.with_ladder_value(v).build(),
                functional,
                ladder,
                prediction.unwrap_or(f64::NAN),
                *mode,
                tol,
            )?;
            let params: Vec<String> = ladder
                .iter()
                .map(|&v| family.with_ladder_value(v).build().map(|u| u.params_label()))
                .collect::<Result<_>>()?;
            let mut rows = Row::from_study(&study, &params);
            if prediction.is_none() {
                for r in &mut rows {
                    r.prediction = None;
                    r.gap = None;
                    r.pass = None;
                }
            }
            let pass = prediction.is_none() || study.pass;
            (rows, pass)
        }
        Command::Divcheck {
            domain,
            field,
            params,
            grid,
        } => {
            let d = make_domain(domain.clone())?;
            let rows: Vec<Row> = div_t_grid(&d, *field, *params, *grid)?
                .into_iter()
                .map(|(t, r)| Row {
                    family: "grid".into(),
                    family_params: format!("t={t}"),
                    functional: format!("div:{field}"),
                    s: Some(params.s),
                    gamma: Some(params.gamma),
                    value: Some(r),
                    prediction: Some(format_float(0.0)),
                    gap: Some(r),
                    pass: Some(r <= DIVCHECK_TOL),
                    ..Row::for_domain(&d)
                })
                .collect();
            let pass = rows.iter().all(|r| r.pass == Some(true));
            (rows, pass)
        }
    };
    Ok(Outcome {
        text: emit_report(&rows, cfg.format),
        pass,
    })
}

/// Without `--id`, constants whose hypotheses the domain does not meet
/// are skipped.
fn id_is_optional(_id: &str, e: &HardyError, cfg: &RunConfig) -> bool {
    let explicit = matches!(&cfg.command, Command::Constants { id: Some(_), .. });
    !explicit
        && matches!(
            e,
            HardyError::HypothesisViolation(_) | HardyError::InfiniteInradius | HardyError::OutOfRange(_)
        )
}

/// Exit status for an error: 2 for usage and parameter problems, 3 for
/// numerical failures.
pub fn exit_code(e: &HardyError) -> i32 {
    match e {
        HardyError::Usage(_)
        | HardyError::InvalidSpec(_)
        | HardyError::InvalidProfile(_)
        | HardyError::OutOfRange(_)
        | HardyError::InvalidInterval { .. }
        | HardyError::DimensionMismatch { .. } => 2,
        _ => 3,
    }
}

/// Full run: parse, execute, write. Returns the process exit code.
pub fn run<I, S>(argv: I, env: &HashMap<String, String>) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let argv: Vec<std::ffi::OsString> = argv.into_iter().map(Into::into).collect();
    let args = std::iter::once(std::ffi::OsString::from("hardylab")).chain(argv.iter().cloned());
    // help and version go straight to clap
    if let Err(e) = Cli::try_parse_from(args) {
        if matches!(
            e.kind(),
            clap::error::ErrorKind::DisplayHelp
                | clap::error::ErrorKind::DisplayVersion
                | clap::error::ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand
        ) {
            let _ = e.print();
            return if e.kind() == clap::error::ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand {
                2
            } else {
                0
            };
        }
    }
    let cfg = match parse_config(argv, env) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("hardylab: {e}");
            return 2;
        }
    };
    let outcome = match execute(&cfg) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("hardylab: {e}");
            return exit_code(&e);
        }
    };
    match &cfg.out {
        Some(path) => {
            if let Err(e) = write_atomic(path, &outcome.text) {
                eprintln!("hardylab: {e}");
                return 3;
            }
        }
        None => print!("{}", outcome.text),
    }
    if outcome.pass {
        0
    } else {
        1
    }
}
