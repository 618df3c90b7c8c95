//! Residuals of the divergence identities behind the remainder
//! inequalities, for each calibration field.

use hardylab::functionals::{div_t_grid, x_log_chain_rule_residual, FieldId, FieldParams};
use hardylab::{make_domain, DomainSpec};

fn main() -> hardylab::Result<()> {
    let ball = make_domain(DomainSpec::ball(3, 1.0))?;
    for field in FieldId::ALL {
        for (s, gamma) in [(2.5, 2.0), (3.0, 1.5), (4.5, 3.0)] {
            let grid = div_t_grid(&ball, field, FieldParams::new(s, gamma), 64)?;
            let worst = grid.iter().map(|&(_, r)| r.abs()).fold(0.0, f64::max);
            println!("{:<10} s={s:<4} gamma={gamma:<4} max residual {worst:.2e}", field.as_str());
        }
    }
    let chain = [1e-12, 1e-3, 0.5, 0.99]
        .iter()
        .map(|&t| x_log_chain_rule_residual(t, 2.0))
        .collect::<hardylab::Result<Vec<_>>>()?;
    let worst = chain.iter().fold(0.0f64, |m, r| m.max(r.abs()));
    println!("X chain rule: worst residual {worst:.1e} over {} points", chain.len());
    Ok(())
}
