//! The Lᵖ remainder ratio on a ball for u = d^((s-1)/p + eps), by
//! quadrature and in closed form, as eps shrinks.

use hardylab::functionals::{lp_ratio, lp_ratio_closed_form};
use hardylab::{make_domain, DomainSpec};

fn main() -> hardylab::Result<()> {
    let ball = make_domain(DomainSpec::ball(3, 1.0))?;
    for (s, p) in [(2.0f64, 2.0f64), (3.0, 1.5), (2.5, 4.0)] {
        // the limit is ((s-1)/p)^(p-1)
        let limit = ((s - 1.0) / p).powf(p - 1.0);
        println!("s = {s}, p = {p}, limit {limit:.8}");
        for k in 0..6 {
            let eps = 0.2 * 0.5f64.powi(k);
            let q = lp_ratio(&ball, s, p, eps)?;
            let c = lp_ratio_closed_form(s, p, eps);
            println!("  eps {eps:.5}  quadrature {q:.12}  closed {c:.12}");
        }
    }
    Ok(())
}
