//! The four bundled scenarios, at their reference resolution and at
//! arbitrary resolution.

use super::config::{GeometryConfig, HorizonConfig, Monitor, OutputConfig, ScenarioConfig, SolverConfig};
use crate::constraints::{Constraint, Prescribed};
use crate::fracture::Crack;
use crate::geometry::Aabb;
use crate::grid::Axis;
use crate::kernel::{MaterialParams, StressMode};
use crate::stepping::{BodyLoad, Damping, Integrator, Method};

/// Time step of the dynamic fracture scenarios (s).
pub const FRACTURE_DT: f64 = 1.3367e-8;

pub const NAMES: [&str; 4] = ["plate_tension", "precracked_plate", "block_constrained", "kalthoff_winkler"];

pub fn by_name(name: &str) -> Option<ScenarioConfig> {
    match name {
        "plate_tension" => Some(plate_tension()),
        "precracked_plate" => Some(precracked_plate()),
        "block_constrained" => Some(block_constrained()),
        "kalthoff_winkler" => Some(kalthoff_winkler()),
        _ => None,
    }
}

fn solver(integrator: Integrator, steps: usize, fracture: bool) -> SolverConfig {
    SolverConfig {
        method: Method::Fast,
        integrator,
        steps,
        fracture,
        stress_mode: StressMode::PlaneStress,
        watch: None,
        all_pairs_search: false,
        surface_coefficient: None,
    }
}

fn adr() -> Integrator {
    Integrator::Adr { dt: 1.0, damping: Damping::Adaptive }
}

/// Largest horizon `≤ target` that is a positive multiple of `h`.
fn horizon_multiple(target: f64, h: f64) -> f64 {
    let m = ((target / h) + 1e-9).floor().max(1.0);
    m * h
}

/// Uniaxial tension of a 1.0 × 0.5 m steel plate, 400 × 200 nodes.
pub fn plate_tension() -> ScenarioConfig {
    plate_tension_at(400, 200)
}

/// Uniaxial tension: traction `p0` pulls the single node layers on the two
/// `x` faces apart, applied as force density `±p0/h`. Quasi-static (ADR).
pub fn plate_tension_at(nx: usize, ny: usize) -> ScenarioConfig {
    let (l, t, p0) = (1.0, 0.0025, 2.0e8);
    let h = l / nx as f64;
    let w = ny as f64 * h;
    let b = p0 / h;
    ScenarioConfig {
        name: "plate_tension".into(),
        geometry: GeometryConfig { bounds: vec![[0.0, l], [0.0, w]], h, thickness: Some(t) },
        material: MaterialParams::steel(),
        horizon: HorizonConfig { delta: horizon_multiple(0.03, h) },
        solver: solver(adr(), 3000, false),
        constraints: vec![],
        loads: vec![
            BodyLoad { region: Aabb::new(&[0.0, 0.0], &[h, w]), density: vec![-b, 0.0] },
            BodyLoad { region: Aabb::new(&[l - h, 0.0], &[l, w]), density: vec![b, 0.0] },
        ],
        initial_velocity: vec![],
        cracks: vec![],
        output: OutputConfig {
            monitors: vec![
                Monitor { name: "probe".into(), point: vec![0.255, 0.125f64.min(0.5 * w)] },
                Monitor { name: "center".into(), point: vec![0.5 * l, 0.5 * w] },
            ],
            ..OutputConfig::default()
        },
    }
}

/// 0.05 m square plate with a central crack of length 0.01 m, 100 × 100
/// nodes plus the loading layers.
pub fn precracked_plate() -> ScenarioConfig {
    precracked_plate_at(100)
}

/// The crack lies on the horizontal centreline. Layers of depth `δ` below
/// and above the plate move at ∓20 m/s in `y`, so the lattice has
/// `n × (n + 2M)` nodes.
pub fn precracked_plate_at(n: usize) -> ScenarioConfig {
    let (l, t, c, v) = (0.05, 0.0025, 0.005, 20.0);
    let h = l / n as f64;
    let m = 3;
    let delta = m as f64 * h;
    let yc = 0.5 * l;
    ScenarioConfig {
        name: "precracked_plate".into(),
        geometry: GeometryConfig { bounds: vec![[0.0, l], [-delta, l + delta]], h, thickness: Some(t) },
        material: MaterialParams { s0_override: Some(0.01), ..MaterialParams::steel() },
        horizon: HorizonConfig { delta },
        solver: solver(Integrator::Vv { dt: FRACTURE_DT }, 1350, true),
        constraints: vec![
            Constraint {
                region: Aabb::new(&[0.0, -delta], &[l, 0.0]),
                axes: vec![Axis::Y],
                prescribed: Prescribed::Velocity(-v),
            },
            Constraint {
                region: Aabb::new(&[0.0, l], &[l, l + delta]),
                axes: vec![Axis::Y],
                prescribed: Prescribed::Velocity(v),
            },
        ],
        loads: vec![],
        initial_velocity: vec![],
        cracks: vec![Crack::segment([0.5 * l - c, yc], [0.5 * l + c, yc])],
        output: OutputConfig {
            monitors: vec![Monitor { name: "above_tip".into(), point: vec![0.5 * l + c, yc + 2.0 * h] }],
            ..OutputConfig::default()
        },
    }
}

/// 1.0 × 0.3 × 0.3 m block, 100 × 30 × 30 nodes.
pub fn block_constrained() -> ScenarioConfig {
    block_constrained_at(100, 30, 30)
}

/// Clamped (`u = 0` in every direction) over a layer of depth `δ` at
/// `x = 0`; traction `p0` in `+x` on the single node layer at `x = L`,
/// applied as force density `p0/h`. Quasi-static (ADR).
pub fn block_constrained_at(nx: usize, ny: usize, nz: usize) -> ScenarioConfig {
    let (l, p0) = (1.0, 2.0e8);
    let h = l / nx as f64;
    let (w, d) = (ny as f64 * h, nz as f64 * h);
    let delta = 3.0 * h;
    ScenarioConfig {
        name: "block_constrained".into(),
        geometry: GeometryConfig { bounds: vec![[0.0, l], [0.0, w], [0.0, d]], h, thickness: None },
        material: MaterialParams { nu: 0.25, ..MaterialParams::steel() },
        horizon: HorizonConfig { delta },
        solver: solver(adr(), 3000, false),
        constraints: vec![Constraint::clamp(Aabb::new(&[0.0], &[delta]), vec![Axis::X, Axis::Y, Axis::Z])],
        loads: vec![BodyLoad { region: Aabb::new(&[l - h], &[l]), density: vec![p0 / h, 0.0, 0.0] }],
        initial_velocity: vec![],
        cracks: vec![],
        output: OutputConfig {
            monitors: vec![Monitor { name: "tip".into(), point: vec![l - 0.5 * h, 0.5 * w, 0.5 * d] }],
            ..OutputConfig::default()
        },
    }
}

/// 0.2 × 0.1 × 0.009 m block with two notches, `h = 0.001`.
pub fn kalthoff_winkler() -> ScenarioConfig {
    kalthoff_winkler_at(200, 100, 9, 0.009)
}

/// Two notches of length 0.05 m and width 0.0015 m run in `+y` from the
/// `y = 0` face at `x = 0.075` and `x = 0.125`. The impactor is reduced to a
/// prescribed velocity `v0 = 32 m/s` in `+y` on the node layers within `δ`
/// of the impact face between the notches. Dynamic (VV) with bond breaking
/// at `s0 = 0.01`.
pub fn kalthoff_winkler_at(nx: usize, ny: usize, nz: usize, thickness: f64) -> ScenarioConfig {
    let (l, a0, gap, notch_w, v0) = (0.2, 0.05, 0.05, 0.0015, 32.0);
    let h = l / nx as f64;
    let w = ny as f64 * h;
    assert!((nz as f64 * h - thickness).abs() < 1e-9 * thickness, "nz·h must equal the thickness");
    let delta = 3.0 * h;
    let (x1, x2) = (0.5 * l - 0.5 * gap, 0.5 * l + 0.5 * gap);
    let (z0, z1) = (-h, thickness + h);
    let notch = |x: f64| {
        Crack::rectangle([x, -h, z0], [0.0, a0 + h, 0.0], [0.0, 0.0, z1 - z0]).with_width(notch_w)
    };
    ScenarioConfig {
        name: "kalthoff_winkler".into(),
        geometry: GeometryConfig { bounds: vec![[0.0, l], [0.0, w], [0.0, thickness]], h, thickness: None },
        material: MaterialParams { nu: 0.25, s0_override: Some(0.01), ..MaterialParams::steel() },
        horizon: HorizonConfig { delta },
        solver: solver(Integrator::Vv { dt: FRACTURE_DT }, 1350, true),
        constraints: vec![Constraint {
            region: Aabb::new(&[x1 + 0.5 * notch_w, 0.0], &[x2 - 0.5 * notch_w, delta]),
            axes: vec![Axis::Y],
            prescribed: Prescribed::Velocity(v0),
        }],
        loads: vec![],
        initial_velocity: vec![],
        cracks: vec![notch(x1), notch(x2)],
        output: OutputConfig {
            monitors: vec![Monitor { name: "impact".into(), point: vec![0.5 * l, 0.5 * h, 0.5 * thickness] }],
            ..OutputConfig::default()
        },
    }
}

/// The coarse Kalthoff-Winkler lattice used for quick runs: 100 × 50 × 5
/// nodes at `h = 0.002`.
pub fn kalthoff_winkler_coarse() -> ScenarioConfig {
    kalthoff_winkler_at(100, 50, 5, 0.01)
}
