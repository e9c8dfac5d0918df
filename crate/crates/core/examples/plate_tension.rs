//! Quasi-static uniaxial tension of a steel plate solved with adaptive
//! dynamic relaxation.
//!
//! ```text
//! cargo run --release --example plate_tension -- [nx] [ny] [steps] [fast|dense]
//! ```

use pdfast::sim::{analysis, presets, run, Method};

fn main() -> pdfast::Result<()> {
    let args: Vec<String> = std::env::args().collect();
    let nx: usize = args.get(1).map_or(100, |s| s.parse().expect("nx"));
    let ny: usize = args.get(2).map_or(50, |s| s.parse().expect("ny"));
    let steps: usize = args.get(3).map_or(3000, |s| s.parse().expect("steps"));
    let method = match args.get(4).map(String::as_str) {
        Some("dense") => Method::Dense,
        _ => Method::Fast,
    };
    let mut cfg = presets::plate_tension_at(nx, ny);
    cfg.solver.steps = steps;
    cfg.solver.method = method;
    let out = run(&cfg)?;

    let probe: Vec<f64> = out.monitors.chunks(cfg.output.monitors.len()).map(|rows| rows[0].u[0]).collect();
    for (i, u) in probe.iter().enumerate().step_by((steps / 10).max(1)) {
        println!("step {i:5}  u_x(probe) = {u:.6e} m");
    }
    let grid = cfg.grid()?;
    let center = grid.nearest_node(&[0.5, 0.5 * ny as f64 * cfg.geometry.h]);
    let strain = analysis::axial_strain(&grid, &out.u, center, 0, 5);
    let target = 2.0e8 / cfg.material.e;
    println!("relative change over final 10%: {:.3e}", analysis::tail_relative_change(&probe, 0.1));
    println!("centre strain {strain:.4e}  (p0/E = {target:.4e}, ratio {:.3})", strain / target);
    println!("residual |f + b|_inf = {:.3e}", out.residual);
    println!("{}", out.timers);
    Ok(())
}
