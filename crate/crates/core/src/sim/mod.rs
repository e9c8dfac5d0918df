//! Scenario configuration, presets, output writers, and the benchmark
//! harness.

pub mod analysis;
pub mod bench;
pub mod config;
pub mod output;
pub mod presets;

pub use crate::stepping::{Method, PhaseTimers};
pub use config::{parse_config, parse_str, ScenarioConfig};

use crate::error::Result;
use crate::field::VectorField;
use crate::stepping::Simulation;
use output::MonitorRow;
use serde::Serialize;
use std::path::PathBuf;

/// What a finished run hands back.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub timers: PhaseTimers,
    pub steps: usize,
    pub u: VectorField,
    pub broken_bonds: usize,
    pub damage: Vec<f64>,
    pub monitors: Vec<MonitorRow>,
    pub residual: f64,
    pub memory_bytes: usize,
    pub written: Vec<PathBuf>,
}

#[derive(Serialize)]
struct Summary<'a> {
    name: &'a str,
    method: Method,
    nodes: usize,
    steps: usize,
    broken_bonds: usize,
    residual: f64,
    memory_bytes: usize,
    timers: PhaseTimers,
}

/// Run `cfg` to completion, writing monitors and snapshots when an output
/// directory is configured.
pub fn run(cfg: &ScenarioConfig) -> Result<RunOutput> {
    run_with(cfg, |_| {})
}

/// As [`run`], calling `observe` after setup and after every step.
pub fn run_with(cfg: &ScenarioConfig, mut observe: impl FnMut(&Simulation)) -> Result<RunOutput> {
    let setup = cfg.setup()?;
    let mut sim = Simulation::new(&setup)?;
    let grid = sim.grid().clone();
    let probes: Vec<usize> = cfg.output.monitors.iter().map(|m| grid.nearest_node(&m.point)).collect();
    let dir = cfg.output.dir.clone();
    let mut written = Vec::new();
    let mut monitors = Vec::new();
    let record = |sim: &Simulation, rows: &mut Vec<MonitorRow>| {
        let s = sim.state();
        for &p in &probes {
            rows.push(MonitorRow { step: s.step, t: s.t, node: p, u: s.u.node(p) });
        }
    };
    let snapshot = |sim: &Simulation, written: &mut Vec<PathBuf>| -> Result<()> {
        if let Some(d) = &dir {
            let s = sim.state();
            written.extend(output::write_snapshot(d, &grid, s.step, &s.u, &sim.damage(), &cfg.output.formats)?);
        }
        Ok(())
    };
    let every = cfg.output.snapshot_every;
    record(&sim, &mut monitors);
    if every > 0 {
        snapshot(&sim, &mut written)?;
    }
    observe(&sim);
    for step in 1..=cfg.solver.steps {
        sim.step()?;
        if step % cfg.output.monitor_every == 0 {
            record(&sim, &mut monitors);
        }
        if every > 0 && (step % every == 0 || step == cfg.solver.steps) {
            snapshot(&sim, &mut written)?;
        }
        observe(&sim);
    }
    let mut out = RunOutput {
        timers: sim.timers(),
        steps: cfg.solver.steps,
        u: sim.state().u.clone(),
        broken_bonds: sim.ledger().len(),
        damage: sim.damage(),
        monitors,
        residual: sim.residual(),
        memory_bytes: sim.memory_bytes(),
        written,
    };
    if let Some(d) = &dir {
        std::fs::create_dir_all(d)?;
        if !probes.is_empty() {
            let path = d.join("monitors.tsv");
            output::write_monitors(&path, grid.dim(), &out.monitors)?;
            out.written.push(path);
        }
        let summary = Summary {
            name: &cfg.name,
            method: sim.method(),
            nodes: grid.len(),
            steps: out.steps,
            broken_bonds: out.broken_bonds,
            residual: out.residual,
            memory_bytes: out.memory_bytes,
            timers: out.timers,
        };
        std::fs::write(d.join("summary.json"), serde_json::to_string_pretty(&summary)?)?;
    }
    Ok(out)
}
