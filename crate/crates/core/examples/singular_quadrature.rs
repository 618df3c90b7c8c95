//! Endpoint-singular and log-weighted integrals against their closed forms.

use hardylab::quadrature::{
    integrate_log_weighted, integrate_power_endpoint, log_weight_closed_form, Endpoint,
};

fn main() -> hardylab::Result<()> {
    // ∫_0^1 t^alpha dt = 1 / (alpha + 1), down to the edge of integrability
    for alpha in [-0.5, -0.9, -0.99, -0.999] {
        let r = integrate_power_endpoint(|_| 1.0, alpha, Endpoint::at_left((0.0, 1.0)), (0.0, 1.0), 1e-12)?;
        let exact = 1.0 / (alpha + 1.0);
        println!(
            "t^{alpha:<7} value {:.15} rel err {:.1e} panels {}",
            r.value,
            (r.value - exact).abs() / exact,
            r.subdivisions
        );
    }
    // ∫_delta^1 t^-1 X(t)^gamma dt, delta spanning 300 decades
    for gamma in [0.5, 1.0, 2.0] {
        for delta in [1e-10, 1e-100, 1e-300] {
            let q = integrate_log_weighted(|_| 1.0, gamma, (delta, 1.0), 1e-12)?.value;
            let c = log_weight_closed_form(gamma, delta, 1.0)?;
            println!("gamma {gamma} delta {delta:e}: {q:.12} vs {c:.12}");
        }
    }
    Ok(())
}
