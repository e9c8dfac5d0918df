//! Load a scenario from a TOML file, report every validation problem, and
//! run it.
//!
//! ```text
//! cargo run --release --example config_file -- [path.toml] [--check-only]
//! ```

use pdfast::sim::{parse_config, run};
use pdfast::Error;

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let check_only = args.iter().any(|a| a == "--check-only");
    let path = args
        .iter()
        .find(|a| !a.starts_with("--"))
        .cloned()
        .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/examples/scenarios/notched_strip.toml").into());

    let cfg = match parse_config(&path) {
        Ok(cfg) => cfg,
        Err(Error::Validation(violations)) => {
            eprintln!("{path}: {} problem(s)", violations.len());
            for v in violations {
                eprintln!("  {v}");
            }
            std::process::exit(1);
        }
        Err(e) => {
            eprintln!("{path}: {e}");
            std::process::exit(1);
        }
    };
    let grid = cfg.grid().expect("validated");
    println!("{}: {} nodes {:?}, {} steps", cfg.name, grid.len(), &grid.dims()[..grid.dim()], cfg.solver.steps);
    if check_only {
        return;
    }
    let out = run(&cfg).unwrap_or_else(|e| {
        eprintln!("{e}");
        std::process::exit(1)
    });
    let last = out.monitors.len() - cfg.output.monitors.len();
    for (m, row) in cfg.output.monitors.iter().zip(&out.monitors[last..]) {
        println!("{:>12}  u = ({:.4e}, {:.4e})", m.name, row.u[0], row.u[1]);
    }
    println!("residual |f + b|_inf = {:.3e}", out.residual);
    println!("{}", out.timers);
}
