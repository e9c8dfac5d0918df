//! Explicit integrators and the per-step pipeline.
//!
//! Each step runs: force (fast or dense) → corrections → integrate →
//! enforce constraints → fracture update. Adaptive dynamic relaxation (ADR)
//! drives a quasi-static solve; velocity Verlet (VV) integrates dynamics.

use crate::constraints::{Constraint, ConstraintSet};
use crate::convolution::{EmbeddedKernel, FastScratch};
use crate::corrections::{apply_corrections, surface_corrected_rows, CoefficientTable, SurfaceCorrectionDiag};
use crate::error::{Error, Result};
use crate::field::VectorField;
use crate::fracture::{bond_counts, damage, seed_cracks, Crack, FractureModel};
use crate::geometry::Aabb;
use crate::grid::{classify_regions, Axis, Grid, HorizonSpec, RegionLabels};
use crate::kernel::{KernelStack, MaterialParams};
use crate::ledger::BondLedger;
use crate::reference::{DenseModel, NeighborTable};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::time::{Duration, Instant};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    #[default]
    Fast,
    Dense,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Fast => "fast",
            Method::Dense => "dense",
        })
    }
}

/// Internal force evaluation `f = A u` for the current bond states.
pub trait ForceBackend: Send {
    fn force(&mut self, u: &VectorField, ledger: &BondLedger, out: &mut VectorField) -> Result<()>;
    fn method(&self) -> Method;
    /// Bytes held by the operator and its scratch space.
    fn memory_bytes(&self) -> usize;
}

/// `Â u` by FFT, then `Dᵉ` and `Dᶠ` corrections.
pub struct FastBackend {
    grid: Grid,
    kernels: KernelStack,
    embedded: EmbeddedKernel,
    de: SurfaceCorrectionDiag,
    regions: RegionLabels,
    scratch: FastScratch,
    surface: Option<CoefficientTable>,
}

impl FastBackend {
    pub fn new(grid: &Grid, kernels: &KernelStack, regions: RegionLabels) -> Result<Self> {
        let embedded = EmbeddedKernel::new(kernels, grid.dims())?;
        let de = SurfaceCorrectionDiag::build(grid, &regions, kernels);
        let scratch = embedded.scratch();
        Ok(Self { grid: grid.clone(), kernels: kernels.clone(), embedded, de, regions, scratch, surface: None })
    }

    /// Replace near-surface rows by a coefficient-weighted direct sum.
    pub fn with_surface_coefficients(mut self, table: CoefficientTable) -> Self {
        self.surface = Some(table);
        self
    }

    pub fn regions(&self) -> &RegionLabels {
        &self.regions
    }

    pub fn surface_diag(&self) -> &SurfaceCorrectionDiag {
        &self.de
    }
}

impl ForceBackend for FastBackend {
    fn force(&mut self, u: &VectorField, ledger: &BondLedger, out: &mut VectorField) -> Result<()> {
        self.embedded.fast_force(u, out, &mut self.scratch)?;
        apply_corrections(out, u, &self.de, ledger, &self.kernels, &self.grid, &self.regions)?;
        if let Some(table) = &self.surface {
            surface_corrected_rows(out, u, &self.grid, &self.regions, &self.kernels, ledger, table)?;
        }
        Ok(())
    }

    fn method(&self) -> Method {
        Method::Fast
    }

    fn memory_bytes(&self) -> usize {
        self.embedded.memory_bytes()
            + self.embedded.scratch_bytes()
            + self.kernels.memory_bytes()
            + self.de.memory_bytes()
            + self.regions.memory_bytes()
    }
}

/// Direct horizon summation.
pub struct DenseBackend {
    model: DenseModel,
}

impl DenseBackend {
    pub fn new(model: DenseModel) -> Self {
        Self { model }
    }

    pub fn model(&self) -> &DenseModel {
        &self.model
    }
}

impl ForceBackend for DenseBackend {
    fn force(&mut self, u: &VectorField, ledger: &BondLedger, out: &mut VectorField) -> Result<()> {
        self.model.force(u, ledger, out);
        Ok(())
    }

    fn method(&self) -> Method {
        Method::Dense
    }

    fn memory_bytes(&self) -> usize {
        self.model.table().memory_bytes()
    }
}

/// Displacement, velocity and total force (`f + b`) at one step boundary.
///
/// Under ADR `v` holds the half-step velocity `u̇^{n-1/2}` and `prev_force`
/// the total force of the previous step.
#[derive(Debug, Clone, PartialEq)]
pub struct SimState {
    pub u: VectorField,
    pub v: VectorField,
    pub f: VectorField,
    pub prev_force: VectorField,
    pub t: f64,
    pub step: usize,
}

impl SimState {
    pub fn zeros(dim: usize, n: usize) -> Self {
        let z = VectorField::zeros(dim, n);
        Self { u: z.clone(), v: z.clone(), f: z.clone(), prev_force: z, t: 0.0, step: 0 }
    }
}

/// ADR damping: the adaptive lowest-frequency estimate, or a fixed value.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Damping {
    #[default]
    Adaptive,
    Fixed(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct AdrParams {
    /// Fictitious diagonal density, one value per node and direction.
    pub density: VectorField,
    pub damping: Damping,
    pub dt: f64,
}

impl AdrParams {
    /// `D_ii = (Δt²/4) Σ_b Σ_d |K^{ab}(d)|`, a Gershgorin bound on the row
    /// sums of the stiffness in direction `a`.
    pub fn from_kernels(kernels: &KernelStack, n: usize, dt: f64, damping: Damping) -> Self {
        let dim = kernels.dim();
        let mut density = VectorField::zeros(dim, n);
        for a in 0..dim {
            let row: f64 = (0..dim).map(|b| kernels.stencil().map(|d| kernels.get(a, b, d).abs()).sum::<f64>()).sum();
            density.comp_mut(a).fill(0.25 * dt * dt * row);
        }
        Self { density, damping, dt }
    }
}

/// `c = 2 √(uᵀ ¹K u / uᵀ u)` with the local diagonal stiffness estimate
/// `¹K_ii = -(F^n_i - F^{n-1}_i) / (D_ii Δt u̇^{n-1/2}_i)`, clamped to
/// `[0, 2/Δt]`.
pub fn adaptive_damping(state: &SimState, params: &AdrParams) -> f64 {
    let dt = params.dt;
    let u = state.u.as_slice();
    let v = state.v.as_slice();
    let f = state.f.as_slice();
    let f0 = state.prev_force.as_slice();
    let d = params.density.as_slice();
    let (mut num, mut den) = (0.0, 0.0);
    for i in 0..u.len() {
        den += u[i] * u[i];
        if v[i] != 0.0 {
            let k = -(f[i] - f0[i]) / (d[i] * dt * v[i]);
            num += u[i] * k * u[i];
        }
    }
    if den <= 0.0 || num <= 0.0 {
        return 0.0;
    }
    (2.0 * (num / den).sqrt()).clamp(0.0, 2.0 / dt)
}

/// One ADR velocity and position update from the current total force.
pub fn adr_step(state: &mut SimState, params: &AdrParams) {
    let dt = params.dt;
    let d = params.density.as_slice();
    if state.step == 0 {
        let f = state.f.as_slice();
        for (i, v) in state.v.as_mut_slice().iter_mut().enumerate() {
            *v = 0.5 * dt * f[i] / d[i];
        }
    } else {
        let c = match params.damping {
            Damping::Adaptive => adaptive_damping(state, params),
            Damping::Fixed(c) => c,
        };
        let f = state.f.as_slice();
        let (a, b) = (2.0 - c * dt, 2.0 + c * dt);
        for (i, v) in state.v.as_mut_slice().iter_mut().enumerate() {
            *v = (a * *v + 2.0 * dt * f[i] / d[i]) / b;
        }
    }
    let v = state.v.as_slice();
    for (i, u) in state.u.as_mut_slice().iter_mut().enumerate() {
        *u += dt * v[i];
    }
    state.t += dt;
}

/// VV position update `u += Δt v + Δt² F / (2ρ)`.
pub fn vv_positions(state: &mut SimState, dt: f64, rho: f64) {
    let v = state.v.as_slice();
    let f = state.f.as_slice();
    for (i, u) in state.u.as_mut_slice().iter_mut().enumerate() {
        *u += dt * v[i] + 0.5 * dt * dt * f[i] / rho;
    }
    state.t += dt;
}

/// VV velocity update `v += Δt (F^n + F^{n+1}) / (2ρ)`.
pub fn vv_velocities(v: &mut VectorField, f_old: &VectorField, f_new: &VectorField, dt: f64, rho: f64) {
    let (a, b) = (f_old.as_slice(), f_new.as_slice());
    for (i, v) in v.as_mut_slice().iter_mut().enumerate() {
        *v += 0.5 * dt * (a[i] + b[i]) / rho;
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Integrator {
    Adr {
        dt: f64,
        #[serde(default)]
        damping: Damping,
    },
    Vv {
        dt: f64,
    },
}

/// Constant body-force density on a box.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BodyLoad {
    pub region: Aabb,
    pub density: Vec<f64>,
}

/// Initial velocity on a box, applied before the first step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InitialVelocity {
    pub region: Aabb,
    pub axis: Axis,
    pub value: f64,
}

/// Everything needed to assemble a [`Simulation`].
#[derive(Debug, Clone)]
pub struct Setup {
    pub grid: Grid,
    pub horizon: HorizonSpec,
    pub material: MaterialParams,
    pub method: Method,
    pub integrator: Integrator,
    pub constraints: Vec<Constraint>,
    pub loads: Vec<BodyLoad>,
    pub initial_velocity: Vec<InitialVelocity>,
    pub cracks: Vec<Crack>,
    /// Critical stretch; `None` disables bond breaking.
    pub s0: Option<f64>,
    pub watch: Option<Aabb>,
    pub surface_coefficients: Option<CoefficientTable>,
    /// Use the all-pairs distance search for the dense neighbour table.
    pub all_pairs_search: bool,
}

/// Wall time per phase: operator assembly, stepping, and bond breaking.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct PhaseTimers {
    pub assembly: Duration,
    pub stepping: Duration,
    pub crack: Duration,
}

impl fmt::Display for PhaseTimers {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "matrix assembly  {:>12.6} s", self.assembly.as_secs_f64())?;
        writeln!(f, "time stepping    {:>12.6} s", self.stepping.as_secs_f64())?;
        write!(f, "crack factor     {:>12.6} s", self.crack.as_secs_f64())
    }
}

pub struct Simulation {
    grid: Grid,
    horizon: HorizonSpec,
    backend: Box<dyn ForceBackend>,
    constraints: ConstraintSet,
    body: VectorField,
    ledger: BondLedger,
    fracture: Option<FractureModel>,
    integrator: Integrator,
    adr: Option<AdrParams>,
    rho: f64,
    state: SimState,
    scratch_force: VectorField,
    counts: Vec<usize>,
    timers: PhaseTimers,
}

fn check_finite(field: &VectorField, name: &'static str, step: usize) -> Result<()> {
    match field.find_non_finite() {
        Some((node, component)) => Err(Error::NonFinite { field: name, step, node, component }),
        None => Ok(()),
    }
}

impl Simulation {
    /// Assemble the operator, seed cracks, and evaluate the initial force.
    pub fn new(setup: &Setup) -> Result<Self> {
        let start = Instant::now();
        let grid = setup.grid.clone();
        let n = grid.len();
        let dim = grid.dim();
        let horizon = setup.horizon;
        let kernels = KernelStack::build(&grid, &horizon, &setup.material)?;
        let ledger = seed_cracks(&setup.cracks, &grid, &horizon);
        let boxes = ConstraintSet::boxes(&setup.constraints);
        let regions = classify_regions(&grid, &horizon, &boxes, Some(&ledger));
        let backend: Box<dyn ForceBackend> = match setup.method {
            Method::Fast => {
                let mut b = FastBackend::new(&grid, &kernels, regions)?;
                if let Some(t) = &setup.surface_coefficients {
                    b = b.with_surface_coefficients(t.clone());
                }
                Box::new(b)
            }
            Method::Dense => {
                let table = if setup.all_pairs_search {
                    NeighborTable::all_pairs(&grid, &horizon)
                } else {
                    NeighborTable::windowed(&grid, &horizon)
                };
                Box::new(DenseBackend::new(DenseModel::with_table(&grid, &horizon, &setup.material, table)?))
            }
        };
        let mut state = SimState::zeros(dim, n);
        for iv in &setup.initial_velocity {
            let a = iv.axis.index();
            for p in grid.nodes_in(&iv.region) {
                if a < dim {
                    state.v.set(a, p, iv.value);
                }
            }
        }
        let constraints = ConstraintSet::resolve(&grid, &setup.constraints, &state.u);
        let mut body = VectorField::zeros(dim, n);
        for load in &setup.loads {
            for p in grid.nodes_in(&load.region) {
                for (a, v) in load.density.iter().enumerate().take(dim) {
                    body.add(a, p, *v);
                }
            }
        }
        let fracture = setup.s0.map(|s0| FractureModel::new(&grid, &horizon, s0, setup.watch.as_ref(), &ledger));
        let adr = match setup.integrator {
            Integrator::Adr { dt, damping } => Some(AdrParams::from_kernels(&kernels, n, dt, damping)),
            Integrator::Vv { .. } => None,
        };
        let counts = bond_counts(&grid, &horizon);
        let mut sim = Self {
            grid,
            horizon,
            backend,
            constraints,
            body,
            ledger,
            fracture,
            integrator: setup.integrator,
            adr,
            rho: setup.material.rho,
            state,
            scratch_force: VectorField::zeros(dim, n),
            counts,
            timers: PhaseTimers::default(),
        };
        sim.constraints.enforce(&mut sim.state.u, &mut sim.state.v, 0.0);
        sim.timers.assembly = start.elapsed();
        let t0 = Instant::now();
        sim.total_force_into_state()?;
        sim.timers.stepping += t0.elapsed();
        Ok(sim)
    }

    /// `state.f = A u + b`.
    fn total_force_into_state(&mut self) -> Result<()> {
        self.backend.force(&self.state.u, &self.ledger, &mut self.state.f)?;
        let b = self.body.as_slice();
        for (f, b) in self.state.f.as_mut_slice().iter_mut().zip(b) {
            *f += b;
        }
        check_finite(&self.state.f, "force", self.state.step)
    }

    /// Internal force `L u` for the current displacement, without body
    /// loads, evaluated by the active backend.
    pub fn internal_force(&mut self) -> Result<VectorField> {
        let u = &self.state.u;
        let mut f = VectorField::zeros(u.dim(), u.nodes());
        self.backend.force(u, &self.ledger, &mut f)?;
        Ok(f)
    }

    fn fracture_phase(&mut self) -> usize {
        let Some(model) = self.fracture.as_mut() else { return 0 };
        let t0 = Instant::now();
        let fresh = model.update_bonds(&self.state.u, &mut self.ledger);
        self.timers.crack += t0.elapsed();
        fresh.len()
    }

    /// Advance one step. Returns the number of newly broken bonds.
    pub fn step(&mut self) -> Result<usize> {
        let t0 = Instant::now();
        let crack_before = self.timers.crack;
        let broken = match self.integrator {
            Integrator::Adr { .. } => {
                let params = self.adr.as_ref().expect("ADR parameters");
                adr_step(&mut self.state, params);
                self.constraints.enforce(&mut self.state.u, &mut self.state.v, self.state.t);
                check_finite(&self.state.u, "displacement", self.state.step)?;
                let broken = self.fracture_phase();
                std::mem::swap(&mut self.state.prev_force, &mut self.state.f);
                self.state.step += 1;
                self.total_force_into_state()?;
                broken
            }
            Integrator::Vv { dt } => {
                vv_positions(&mut self.state, dt, self.rho);
                self.constraints.enforce(&mut self.state.u, &mut self.state.v, self.state.t);
                check_finite(&self.state.u, "displacement", self.state.step)?;
                let broken = self.fracture_phase();
                std::mem::swap(&mut self.scratch_force, &mut self.state.f);
                self.state.step += 1;
                self.total_force_into_state()?;
                vv_velocities(&mut self.state.v, &self.scratch_force, &self.state.f, dt, self.rho);
                self.constraints.enforce_velocity(&mut self.state.v);
                broken
            }
        };
        self.timers.stepping += t0.elapsed() - (self.timers.crack - crack_before);
        Ok(broken)
    }

    pub fn run(&mut self, steps: usize) -> Result<()> {
        for _ in 0..steps {
            self.step()?;
        }
        Ok(())
    }

    pub fn state(&self) -> &SimState {
        &self.state
    }

    pub fn state_mut(&mut self) -> &mut SimState {
        &mut self.state
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn horizon(&self) -> &HorizonSpec {
        &self.horizon
    }

    pub fn ledger(&self) -> &BondLedger {
        &self.ledger
    }

    pub fn damage(&self) -> Vec<f64> {
        damage(&self.ledger, &self.counts)
    }

    pub fn timers(&self) -> PhaseTimers {
        self.timers
    }

    pub fn method(&self) -> Method {
        self.backend.method()
    }

    pub fn backend_memory_bytes(&self) -> usize {
        self.backend.memory_bytes()
    }

    /// Estimated bytes held by the solver: operator, fields, and ledger.
    pub fn memory_bytes(&self) -> usize {
        let fields = 5 * self.state.u.memory_bytes() + self.body.memory_bytes();
        self.backend.memory_bytes()
            + fields
            + self.ledger.memory_bytes()
            + self.fracture.as_ref().map_or(0, |f| f.memory_bytes())
            + self.counts.len() * 8
    }

    /// Max-norm of the internal-plus-body force over unconstrained
    /// components; zero at a quasi-static equilibrium.
    pub fn residual(&self) -> f64 {
        let f = &self.state.f;
        let mut worst: f64 = 0.0;
        for a in 0..f.dim() {
            for (p, x) in f.comp(a).iter().enumerate() {
                if !self.constraints.contains(p, a) {
                    worst = worst.max(x.abs());
                }
            }
        }
        worst
    }
}
