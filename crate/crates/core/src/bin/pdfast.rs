//! Command-line front end: run a preset or a TOML scenario, or time the
//! backends over a ladder of plate sizes.

use clap::{Parser, ValueEnum};
use pdfast::sim::{self, bench, presets, Method, ScenarioConfig};
use pdfast::constraints::ConstraintSet;
use pdfast::stepping::Simulation;
use pdfast::VectorField;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Backend {
    Fast,
    Dense,
}

impl From<Backend> for Method {
    fn from(b: Backend) -> Self {
        match b {
            Backend::Fast => Method::Fast,
            Backend::Dense => Method::Dense,
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "pdfast", version, about = "Linear bond-based peridynamics with FFT force evaluation")]
struct Cli {
    /// Preset name (plate_tension, precracked_plate, block_constrained,
    /// kalthoff_winkler) or path to a TOML scenario file.
    scenario: Option<String>,
    /// Force backend; overrides the scenario.
    #[arg(long, value_enum)]
    method: Option<Backend>,
    /// Number of steps; overrides the scenario.
    #[arg(long)]
    steps: Option<usize>,
    /// Output directory for snapshots, monitors and the run summary.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Time the backends on square plates of these side lengths, e.g.
    /// "64,128,256". Uses the backend from --method, or both.
    #[arg(long, value_delimiter = ',')]
    bench: Option<Vec<usize>>,
    /// Steps per bench rung.
    #[arg(long, default_value_t = 5)]
    bench_steps: usize,
    /// Compare the fast and dense forces on a random displacement field
    /// for the scenario instead of running it.
    #[arg(long)]
    check: bool,
    /// Seed for the random field used by --check.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Print the resolved scenario as TOML and exit.
    #[arg(long)]
    print_config: bool,
}

fn load(scenario: &str) -> pdfast::Result<ScenarioConfig> {
    match presets::by_name(scenario) {
        Some(cfg) => Ok(cfg),
        None if std::path::Path::new(scenario).exists() => sim::parse_config(scenario),
        None => Err(pdfast::Error::UnknownScenario(scenario.into())),
    }
}

fn check(cfg: &ScenarioConfig, seed: u64) -> pdfast::Result<()> {
    let mut setup = cfg.setup()?;
    let n = setup.grid.len();
    let dim = setup.grid.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let data: Vec<f64> = (0..dim * n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let u = VectorField::from_vec(dim, n, data)?;
    let mut forces = Vec::new();
    for method in [Method::Fast, Method::Dense] {
        setup.method = method;
        let mut sim = Simulation::new(&setup)?;
        sim.state_mut().u = u.clone();
        forces.push(sim.internal_force()?);
    }
    let fixed = ConstraintSet::resolve(&setup.grid, &setup.constraints, &u);
    let (mut diff, mut scale) = (0.0f64, f64::MIN_POSITIVE);
    for a in 0..dim {
        for p in (0..n).filter(|&p| !fixed.contains(p, a)) {
            diff = diff.max((forces[0].get(a, p) - forces[1].get(a, p)).abs());
            scale = scale.max(forces[1].get(a, p).abs());
        }
    }
    println!("nodes {n}, seed {seed}, constrained components {}", fixed.len());
    println!("max |f_fast - f_dense| / max |f_dense| over free components = {:.3e}", diff / scale);
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> pdfast::Result<()> {
    if let Some(sides) = &cli.bench {
        let methods: Vec<Method> = match cli.method {
            Some(b) => vec![b.into()],
            None => vec![Method::Fast, Method::Dense],
        };
        let ladders: Vec<(Method, Vec<usize>)> = methods.into_iter().map(|m| (m, sides.clone())).collect();
        let report = bench::bench(&ladders, cli.bench_steps, None)?;
        let json = report.to_json();
        if let Some(dir) = &cli.out {
            std::fs::create_dir_all(dir)?;
            std::fs::write(dir.join("bench.json"), &json)?;
        }
        println!("{json}");
        return Ok(());
    }

    let Some(scenario) = cli.scenario.as_deref() else {
        eprintln!("no scenario given; presets: {}", presets::NAMES.join(", "));
        return Ok(());
    };
    let mut cfg = load(scenario)?;
    if let Some(m) = cli.method {
        cfg.solver.method = m.into();
    }
    if let Some(steps) = cli.steps {
        cfg.solver.steps = steps;
    }
    if let Some(dir) = cli.out {
        cfg.output.dir = Some(dir);
    }
    if cli.print_config {
        print!("{}", cfg.to_toml());
        return Ok(());
    }
    if cli.check {
        return check(&cfg, cli.seed);
    }

    let out = sim::run(&cfg)?;
    println!("{}: {} nodes, {} steps, {} method", cfg.name, cfg.grid()?.len(), out.steps, cfg.solver.method);
    println!("broken bonds {}", out.broken_bonds);
    println!("residual |f + b|_inf {:.3e}", out.residual);
    println!("memory estimate {} bytes", out.memory_bytes);
    println!("{}", out.timers);
    for path in &out.written {
        if path.file_name().is_some_and(|f| f == "summary.json") {
            println!("wrote {}", path.display());
        }
    }
    Ok(())
}
