//! The general-domain constant s - n is approached by annulus indicators on
//! the punctured space, and only from above.

use hardylab::constants::{convergence_study, StudyMode};
use hardylab::functionals::Functional;
use hardylab::profiles::{annulus_indicator, Profile};
use hardylab::{make_domain, DomainSpec};

fn main() -> hardylab::Result<()> {
    let n = 3;
    let space = make_domain(DomainSpec::punctured_space(n))?;
    let ladder: Vec<f64> = (1..=8).map(|k| 10f64.powi(-k)).collect();
    for s in [3.5, 4.0, 6.0] {
        let prediction = s - n as f64;
        let study = convergence_study(
            &space,
            |delta| annulus_indicator(delta, 1.0).map(Profile::from),
            &Functional::Plain { s },
            &ladder,
            prediction,
            StudyMode::LimitFromAbove,
            1e-3,
        )?;
        println!("s = {s}: predicted {prediction}");
        for p in &study.ladder {
            println!("  delta {:8.0e}  ratio {:.10}", p.parameter, p.value);
        }
        println!("  limit {:.8} ({:?}), pass {}", study.extrapolated_limit, study.extrapolation, study.pass);
    }
    Ok(())
}
