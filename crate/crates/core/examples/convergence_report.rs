//! A sweep written as CSV and JSON through the same report path the command
//! line uses.

use hardylab::cli::{execute, parse_config, Format};
use std::collections::HashMap;

fn main() -> hardylab::Result<()> {
    let argv = [
        "sweep", "--domain", "ball", "--radius", "1", "--family", "ball-shell", "--s", "2",
        "--ladder", "1e-1:1e-6:6:log", "--prediction", "1", "--mode", "above", "--tol", "1e-3",
    ];
    let env = HashMap::new();
    for format in ["csv", "json"] {
        let mut args: Vec<&str> = argv.to_vec();
        args.extend(["--format", format]);
        let cfg = parse_config(args, &env)?;
        let out = execute(&cfg)?;
        println!("{}", out.text);
        println!("pass: {} ({})", out.pass, if cfg.format == Format::Csv { "csv" } else { "json" });
    }
    Ok(())
}
