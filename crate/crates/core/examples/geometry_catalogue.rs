//! Prints the catalogue domains with their curvature data and runs the
//! geometry property checks on each.

use hardylab::checks::{catalogue, geometry_suite};

fn main() -> hardylab::Result<()> {
    for d in catalogue() {
        let p = d.properties();
        println!(
            "{:<16} n={} {:<14} inradius={:<6} reach={:<6} (C)={}",
            d.kind_label(),
            d.dim(),
            d.geom_params_label(),
            p.inradius,
            p.curvature.reach.as_f64(),
            p.satisfies_c
        );
    }
    println!();
    for c in geometry_suite(7)? {
        println!(
            "{} {:<28} {:<16} measured {:.3e} (tol {:.0e})",
            if c.pass { "ok  " } else { "FAIL" },
            c.name,
            c.domain,
            c.measured,
            c.tolerance
        );
    }
    Ok(())
}
