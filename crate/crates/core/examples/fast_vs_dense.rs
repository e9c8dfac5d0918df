//! Step the precracked plate with both backends side by side and report the
//! per-step displacement discrepancy and whether the bond ledgers agree.
//!
//! ```text
//! cargo run --release --example fast_vs_dense -- [n] [steps]
//! ```

use pdfast::sim::presets;
use pdfast::stepping::{Method, Simulation};

fn main() -> pdfast::Result<()> {
    let mut args = std::env::args().skip(1);
    let n: usize = args.next().map_or(100, |s| s.parse().expect("n"));
    let steps: usize = args.next().map_or(200, |s| s.parse().expect("steps"));

    let cfg = presets::precracked_plate_at(n);
    let mut setup = cfg.setup()?;
    setup.method = Method::Fast;
    let mut fast = Simulation::new(&setup)?;
    setup.method = Method::Dense;
    let mut dense = Simulation::new(&setup)?;

    let mut worst: f64 = 0.0;
    let mut ledgers_agree = true;
    for _ in 0..steps {
        fast.step()?;
        dense.step()?;
        let step = dense.state().step;
        let (uf, ud) = (&fast.state().u, &dense.state().u);
        let scale = ud.max_abs().max(f64::MIN_POSITIVE);
        let rel = uf.max_abs_diff(ud) / scale;
        worst = worst.max(rel);
        let same = fast.ledger().pairs() == dense.ledger().pairs();
        ledgers_agree &= same;
        if step % 20 == 0 || !same {
            println!(
                "step {step:>5}  rel L-inf {rel:.3e}  broken {:>6} / {:>6}",
                fast.ledger().len(),
                dense.ledger().len()
            );
        }
    }
    println!("worst relative L-inf: {worst:.3e}");
    println!("ledgers identical at every step: {ledgers_agree}");
    println!("fast\n{}\ndense\n{}", fast.timers(), dense.timers());
    Ok(())
}
