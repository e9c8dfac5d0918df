//! Dynamic crack growth from a central crack in a plate pulled apart by
//! velocity layers.
//!
//! ```text
//! cargo run --release --example precracked_plate -- [n] [steps] [out_dir]
//! ```

use pdfast::sim::{analysis, presets, run_with};
use std::path::PathBuf;

fn main() -> pdfast::Result<()> {
    let args: Vec<String> = std::env::args().collect();
    let n: usize = args.get(1).map_or(100, |s| s.parse().expect("n"));
    let steps: usize = args.get(2).map_or(1350, |s| s.parse().expect("steps"));
    let mut cfg = presets::precracked_plate_at(n);
    cfg.solver.steps = steps;
    if let Some(dir) = args.get(3) {
        cfg.output.dir = Some(PathBuf::from(dir));
        cfg.output.snapshot_every = (steps / 10).max(1);
    }
    let l = 0.05;
    let every = (steps / 15).max(1);
    let out = run_with(&cfg, |sim| {
        let s = sim.state();
        if s.step % every == 0 {
            let phi = sim.damage();
            let ext = analysis::crack_tips(sim.grid(), &phi, 0.5 * l, 0.5 * l, 0.3);
            let asym = analysis::damage_asymmetry(sim.grid(), &phi, &[0, 1]);
            println!(
                "step {:5}  t {:.3e} s  broken {:6}  tips {:?}  asymmetry {:.2e}",
                s.step,
                s.t,
                sim.ledger().len(),
                ext,
                asym
            );
        }
    })?;
    println!("{}", out.timers);
    Ok(())
}
