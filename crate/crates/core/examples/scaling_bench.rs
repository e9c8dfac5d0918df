//! Time the fast and dense backends over a ladder of square plates and fit
//! the scaling exponents against the node count. Prints the JSON report.
//!
//! ```text
//! cargo run --release --example scaling_bench -- [fast ladder] [dense ladder] [steps]
//! cargo run --release --example scaling_bench -- 64,128,256,512 64,128,256 5
//! ```

use pdfast::sim::bench::bench;
use pdfast::sim::Method;

fn ladder(s: &str) -> Vec<usize> {
    s.split(',').filter(|t| !t.is_empty()).map(|t| t.trim().parse().expect("ladder entry")).collect()
}

fn main() -> pdfast::Result<()> {
    let args: Vec<String> = std::env::args().collect();
    let fast = ladder(args.get(1).map_or("64,128,256", String::as_str));
    let dense = ladder(args.get(2).map_or("32,64,128", String::as_str));
    let steps: usize = args.get(3).map_or(5, |s| s.parse().expect("steps"));
    let report = bench(&[(Method::Fast, fast), (Method::Dense, dense)], steps, None)?;
    for r in &report.records {
        println!(
            "{:>5} {:>9} nodes  assembly {:.4e} s  step {:.4e} s  memory {} B",
            r.backend, r.n, r.assembly_s, r.step_min_s, r.memory_bytes
        );
    }
    println!("{}", report.to_json());
    Ok(())
}
