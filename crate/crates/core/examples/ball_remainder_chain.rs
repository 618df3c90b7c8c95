//! Remainder terms on a ball: the chain of lower-order weights and the
//! logarithmic remainder, evaluated along the ball shell family.

use hardylab::functionals::{Evaluator, GapParams, ImDenominator, InequalityId, Route};
use hardylab::profiles::{ball_shell_indicator, shifted_power_profile, Profile};
use hardylab::{make_domain, DomainSpec};

fn main() -> hardylab::Result<()> {
    let ball = make_domain(DomainSpec::ball(3, 1.0))?;
    let ev = Evaluator::new(&ball);
    let s = 3.5;
    println!("chain gap on shells, s = {s}");
    for delta in [1e-1, 1e-3, 1e-6] {
        let u: Profile = ball_shell_indicator(delta)?.into();
        let gap = ev.inequality_gap(&u, InequalityId::BallChain, GapParams::new(s))?;
        println!("  delta {delta:7.0e}  lhs {:.6e}  rhs {:.6e}  gap/lhs {:.3e}", gap.lhs, gap.rhs, gap.value / gap.lhs);
    }
    println!("I_m ratios on d^(s-1+eps), s = {s}");
    let quad = Evaluator::new(&ball).with_route(Route::Quadrature);
    for eps in [0.5, 0.1, 0.02] {
        let u = Profile::from(shifted_power_profile(eps)?).bind(s);
        let i1 = quad.remainder_ratio_im(&u, s, 1, ImDenominator::Power(1.0))?;
        let ix = quad.remainder_ratio_im(&u, s, 2, ImDenominator::XWeight)?;
        println!("  eps {eps:5}  I_1/int u d^-1 {i1:.6}  I_2/int u d^-1 X {ix:.6}");
    }
    Ok(())
}
