//! A clamped steel block pulled at its free end, solved quasi-statically in 3D.
//!
//! ```text
//! cargo run --release --example block_3d -- [nx] [ny] [nz] [steps]
//! ```

use pdfast::sim::{analysis, presets, run};

fn main() -> pdfast::Result<()> {
    let args: Vec<String> = std::env::args().collect();
    let arg = |i: usize, d: usize| args.get(i).map_or(d, |s| s.parse().expect("integer argument"));
    let (nx, ny, nz, steps) = (arg(1, 40), arg(2, 12), arg(3, 12), arg(4, 2000));
    let mut cfg = presets::block_constrained_at(nx, ny, nz);
    cfg.solver.steps = steps;
    let out = run(&cfg)?;

    let tip: Vec<f64> = out.monitors.iter().map(|row| row.u[0]).collect();
    for (i, u) in tip.iter().enumerate().step_by((steps / 10).max(1)) {
        println!("step {i:5}  u_x(tip) = {u:.6e} m");
    }
    let grid = cfg.grid()?;
    let h = cfg.geometry.h;
    let mid = grid.nearest_node(&[0.5, 0.5 * ny as f64 * h, 0.5 * nz as f64 * h]);
    let strain = analysis::axial_strain(&grid, &out.u, mid, 0, 3);
    println!("relative change over final 10%: {:.3e}", analysis::tail_relative_change(&tip, 0.1));
    println!("mid-span strain {strain:.4e}  (p0/E = {:.4e})", 2.0e8 / cfg.material.e);
    println!("residual |f + b|_inf = {:.3e}", out.residual);
    println!("memory {} bytes", out.memory_bytes);
    println!("{}", out.timers);
    Ok(())
}
