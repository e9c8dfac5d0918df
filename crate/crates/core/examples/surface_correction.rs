//! Quasi-static plate tension with and without a uniform surface-correction
//! coefficient on the near-surface rows. A coefficient of 1 reproduces the
//! uncorrected operator; larger values stiffen the rows near the boundary.
//!
//! ```text
//! cargo run --release --example surface_correction -- [coefficient] [nx] [ny] [steps]
//! ```

use pdfast::sim::{analysis, presets, run};

fn main() -> pdfast::Result<()> {
    let args: Vec<String> = std::env::args().collect();
    let v: f64 = args.get(1).map_or(1.5, |s| s.parse().expect("coefficient"));
    let nx: usize = args.get(2).map_or(100, |s| s.parse().expect("nx"));
    let ny: usize = args.get(3).map_or(50, |s| s.parse().expect("ny"));
    let steps: usize = args.get(4).map_or(3000, |s| s.parse().expect("steps"));

    let base = presets::plate_tension_at(nx, ny);
    let grid = base.grid()?;
    let h = base.geometry.h;
    let w = ny as f64 * h;
    let center = grid.nearest_node(&[0.5, 0.5 * w]);
    let edge = grid.nearest_node(&[0.5, 0.5 * h]);
    let target = 2.0e8 / base.material.e;

    println!("{:>12} {:>14} {:>14} {:>12}", "coefficient", "centre strain", "edge strain", "residual");
    for coefficient in [None, Some(1.0), Some(v)] {
        let mut cfg = base.clone();
        cfg.solver.steps = steps;
        cfg.solver.surface_coefficient = coefficient;
        let out = run(&cfg)?;
        let label = coefficient.map_or("none".to_string(), |c| format!("{c}"));
        println!(
            "{label:>12} {:>14.4e} {:>14.4e} {:>12.3e}",
            analysis::axial_strain(&grid, &out.u, center, 0, 5),
            analysis::axial_strain(&grid, &out.u, edge, 0, 5),
            out.residual
        );
    }
    println!("p0/E = {target:.4e}");
    Ok(())
}
