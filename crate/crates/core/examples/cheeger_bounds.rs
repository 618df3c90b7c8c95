//! Concentric balls give the Cheeger ratio n/rho; its minimum over rho
//! bounds the mean-curvature remainder constant from above.

use hardylab::constants::{b1_bounds, cheeger_estimate};
use hardylab::functionals::{Evaluator, Functional};
use hardylab::profiles::{cheeger_concentric, Profile};
use hardylab::{make_domain, DomainSpec};

fn main() -> hardylab::Result<()> {
    for (n, r) in [(2, 1.0), (3, 1.0), (3, 2.0), (5, 1.5)] {
        let ball = make_domain(DomainSpec::ball(n, r))?;
        let c = cheeger_estimate(&ball)?;
        let (lo, hi) = b1_bounds(&ball)?;
        println!("ball n={n} R={r}: h = {:.4}, B1 in [{lo:.4}, {hi:.4}], h >= (n-1)H_min: {}", c.h_value, c.bound_ok);
        let ev = Evaluator::new(&ball);
        let s = 2.5;
        for frac in [0.25, 0.5, 0.9] {
            let u: Profile = cheeger_concentric(frac * r)?.into();
            let q = ev.evaluate(&u, &Functional::Qbeta { s, beta: 1.0 })?.value;
            println!("  rho = {:.3}: Q_beta = {q:.6}", frac * r);
        }
    }
    Ok(())
}
