//! Timing and memory across a ladder of square plate lattices.
//!
//! Every rung is the tension plate at `n × n` nodes with `δ = 3h`, so the
//! stencil is the same on every rung and only `N` varies.

use super::presets;
use crate::error::Result;
use crate::stepping::{Method, Simulation};
use serde::{Deserialize, Serialize};
use std::time::Instant;

/// Peak-allocation hook, e.g. a counting global allocator.
pub trait MemoryProbe {
    fn reset(&self);
    fn peak_bytes(&self) -> usize;
}

/// One rung of the ladder for one backend. Times are in seconds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRecord {
    pub dims: Vec<usize>,
    pub n: usize,
    pub backend: Method,
    /// Fastest of three operator assemblies.
    pub assembly_s: f64,
    /// Fastest single step.
    pub step_min_s: f64,
    pub step_mean_s: f64,
    pub crack_s: f64,
    /// Solver-reported estimate of resident bytes.
    pub memory_bytes: usize,
    /// Measured allocation peak, when a probe is supplied.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub peak_bytes: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Exponents {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fast_stepping: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fast_memory: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dense_assembly: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dense_stepping: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub scenario: String,
    pub steps: usize,
    pub records: Vec<BenchRecord>,
    pub exponents: Exponents,
}

impl BenchReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("bench reports always serialise")
    }
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn fit_exponent(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

/// Operator assemblies per rung; the fastest is reported.
const ASSEMBLY_REPEATS: usize = 3;

/// Time one rung.
pub fn bench_rung(n: usize, method: Method, steps: usize, probe: Option<&dyn MemoryProbe>) -> Result<BenchRecord> {
    let mut cfg = presets::plate_tension_at(n, n);
    cfg.horizon.delta = 3.0 * cfg.geometry.h;
    cfg.solver.method = method;
    cfg.solver.all_pairs_search = method == Method::Dense;
    cfg.output.monitors.clear();
    let setup = cfg.setup()?;
    if let Some(p) = probe {
        p.reset();
    }
    let mut sim = Simulation::new(&setup)?;
    let mut assembly = sim.timers().assembly;
    for _ in 1..ASSEMBLY_REPEATS {
        drop(sim);
        sim = Simulation::new(&setup)?;
        assembly = assembly.min(sim.timers().assembly);
    }
    let mut times = Vec::with_capacity(steps);
    for _ in 0..steps {
        let t0 = Instant::now();
        sim.step()?;
        times.push(t0.elapsed().as_secs_f64());
    }
    let timers = sim.timers();
    let dims = sim.grid().dims()[..2].to_vec();
    Ok(BenchRecord {
        n: sim.grid().len(),
        dims,
        backend: method,
        assembly_s: assembly.as_secs_f64(),
        step_min_s: times.iter().copied().fold(f64::INFINITY, f64::min),
        step_mean_s: times.iter().sum::<f64>() / steps.max(1) as f64,
        crack_s: timers.crack.as_secs_f64(),
        memory_bytes: sim.memory_bytes(),
        peak_bytes: probe.map(|p| p.peak_bytes()),
    })
}

/// Run every backend over its ladder of side lengths and fit the scaling
/// exponents against `N`.
pub fn bench(ladders: &[(Method, Vec<usize>)], steps: usize, probe: Option<&dyn MemoryProbe>) -> Result<BenchReport> {
    let mut records = Vec::new();
    for (method, sides) in ladders {
        for &n in sides {
            records.push(bench_rung(n, *method, steps, probe)?);
        }
    }
    let fit = |m: Method, f: &dyn Fn(&BenchRecord) -> Option<f64>| -> Option<f64> {
        let pts: Vec<(f64, f64)> = records
            .iter()
            .filter(|r| r.backend == m)
            .filter_map(|r| f(r).map(|y| (r.n as f64, y)))
            .collect();
        (pts.len() >= 2).then(|| {
            let (xs, ys): (Vec<f64>, Vec<f64>) = pts.into_iter().unzip();
            fit_exponent(&xs, &ys)
        })
    };
    let exponents = Exponents {
        fast_stepping: fit(Method::Fast, &|r| Some(r.step_min_s)),
        fast_memory: fit(Method::Fast, &|r| Some(r.peak_bytes.unwrap_or(r.memory_bytes) as f64)),
        dense_assembly: fit(Method::Dense, &|r| Some(r.assembly_s)),
        dense_stepping: fit(Method::Dense, &|r| Some(r.step_min_s)),
    };
    Ok(BenchReport { scenario: "plate_tension".into(), steps, records, exponents })
}
