//! On a slab the mean-convex constant s - 1 is approached by products of a
//! layer indicator and a widening transverse cone.

use hardylab::functionals::{Evaluator, Functional};
use hardylab::profiles::{strip_slab_profile, Profile};
use hardylab::{make_domain, DomainSpec};

fn main() -> hardylab::Result<()> {
    let strip = make_domain(DomainSpec::strip(3, 1.0))?;
    let ev = Evaluator::new(&strip);
    for s in [1.5, 2.0] {
        println!("s = {s}, target {}", s - 1.0);
        for k in 2..=8 {
            let eps = 10f64.powi(-k);
            let u: Profile = strip_slab_profile(eps, 1.0, 1.0)?.into();
            let q = ev.evaluate(&u, &Functional::Plain { s })?.value;
            println!("  eps {eps:6.0e}  G/H {q:.8}  excess {:.3e}", q - (s - 1.0));
        }
    }
    Ok(())
}
