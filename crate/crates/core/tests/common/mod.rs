//! Shared fixtures for the integration tests.
#![allow(dead_code)]

use pdfast::constraints::Constraint;
use pdfast::corrections::offset_between;
use pdfast::geometry::Aabb;
use pdfast::grid::{classify_regions, ConstrainedBox};
use pdfast::kernel::{alpha, volume_correction};
use pdfast::reference::DenseModel;
use pdfast::stepping::{FastBackend, ForceBackend};
use pdfast::{Axis, BondLedger, Grid, HorizonSpec, KernelStack, MaterialParams, RegionLabels, VectorField};
use rand::seq::SliceRandom;
use rand::Rng;

pub struct Case {
    pub grid: Grid,
    pub horizon: HorizonSpec,
    pub material: MaterialParams,
    pub boxes: Vec<ConstrainedBox>,
    pub regions: RegionLabels,
    pub ledger: BondLedger,
    pub u: VectorField,
}

pub fn build_grid(dims: &[usize], h: f64) -> Grid {
    let bounds: Vec<(f64, f64)> = dims.iter().map(|&n| (0.0, n as f64 * h)).collect();
    let t = if dims.len() == 2 { Some(0.0025) } else { None };
    Grid::build(&bounds, h, t).unwrap()
}

/// Random displacement, a random strip or two of constrained nodes, and up
/// to `max_broken` random in-band broken bonds.
pub fn random_case(rng: &mut impl Rng, dims: &[usize], m: usize, max_broken: usize) -> Case {
    let h = 0.001;
    let grid = build_grid(dims, h);
    let horizon = HorizonSpec::new(m as f64 * h, h).unwrap();
    let material = MaterialParams::steel();
    let dim = grid.dim();
    let mut boxes = Vec::new();
    for _ in 0..rng.gen_range(0..=2) {
        let axis = rng.gen_range(0..dim);
        let n = dims[axis];
        let lo = rng.gen_range(0..n) as f64 * h;
        let width = rng.gen_range(1..=3) as f64 * h;
        let mut min = vec![f64::NEG_INFINITY; dim];
        let mut max = vec![f64::INFINITY; dim];
        min[axis] = lo;
        max[axis] = lo + width;
        let axes: Vec<Axis> = (0..dim).filter(|_| rng.gen_bool(0.6)).map(Axis::from_index).collect();
        let axes = if axes.is_empty() { vec![Axis::from_index(axis)] } else { axes };
        boxes.push(ConstrainedBox { region: Aabb::new(&min, &max), axes });
    }
    let mut ledger = BondLedger::new(grid.len());
    let offsets = horizon.half_offsets(dim);
    let want = rng.gen_range(0..=max_broken);
    while ledger.len() < want {
        let p = rng.gen_range(0..grid.len());
        let o = offsets.choose(rng).unwrap();
        if let Some(q) = grid.offset_node(p, o.d) {
            ledger.insert(p, q);
        }
    }
    let regions = classify_regions(&grid, &horizon, &boxes, Some(&ledger));
    let data: Vec<f64> = (0..dim * grid.len()).map(|_| rng.gen_range(-1e-4..1e-4)).collect();
    let u = VectorField::from_vec(dim, grid.len(), data).unwrap();
    Case { grid, horizon, material, boxes, regions, ledger, u }
}

pub fn fast_force(c: &Case) -> VectorField {
    let kernels = KernelStack::build(&c.grid, &c.horizon, &c.material).unwrap();
    let mut fast = FastBackend::new(&c.grid, &kernels, c.regions.clone()).unwrap();
    let mut f = VectorField::zeros(c.grid.dim(), c.grid.len());
    fast.force(&c.u, &c.ledger, &mut f).unwrap();
    f
}

pub fn dense_force(c: &Case) -> VectorField {
    let model = DenseModel::new(&c.grid, &c.horizon, &c.material).unwrap();
    model.force_alloc(&c.u, &c.ledger)
}

/// Max-norm error over unconstrained rows, relative to the dense max-norm.
pub fn unconstrained_rel_err(c: &Case, fast: &VectorField, dense: &VectorField) -> f64 {
    let (mut num, mut den) = (0.0f64, 0.0f64);
    for p in 0..c.grid.len() {
        for a in 0..c.grid.dim() {
            if c.regions.is_constrained(p, a) {
                continue;
            }
            num = num.max((fast.get(a, p) - dense.get(a, p)).abs());
            den = den.max(dense.get(a, p).abs());
        }
    }
    num / den
}

/// Textbook double loop over all node pairs, sharing no code with the
/// library's force paths beyond the λ and α formulas.
pub fn naive_force(grid: &Grid, horizon: &HorizonSpec, material: &MaterialParams, ledger: &BondLedger, u: &VectorField) -> VectorField {
    let dim = grid.dim();
    let a = alpha(material.e, horizon.delta(), grid.thickness(), dim).unwrap();
    let v = grid.cell_volume().unwrap();
    let mut f = VectorField::zeros(dim, grid.len());
    for p in 0..grid.len() {
        let xp = grid.position(p);
        for q in 0..grid.len() {
            if p == q || ledger.contains(p, q) {
                continue;
            }
            let xq = grid.position(q);
            let xi: Vec<f64> = (0..dim).map(|k| xq[k] - xp[k]).collect();
            let r = xi.iter().map(|x| x * x).sum::<f64>().sqrt();
            let lam = volume_correction(r, horizon.delta(), grid.h());
            if lam == 0.0 {
                continue;
            }
            for i in 0..dim {
                let mut acc = 0.0;
                for j in 0..dim {
                    acc += a * xi[i] * xi[j] / r.powi(3) * lam * v * (u.get(j, q) - u.get(j, p));
                }
                f.add(i, p, acc);
            }
        }
    }
    f
}

pub fn constraints_from(boxes: &[ConstrainedBox]) -> Vec<Constraint> {
    boxes.iter().map(|b| Constraint::clamp(b.region, b.axes.clone())).collect()
}

pub fn band_ok(grid: &Grid, ledger: &BondLedger, m: usize) -> bool {
    ledger.iter().all(|(p, q)| offset_between(grid, p, q).iter().all(|d| d.unsigned_abs() as usize <= m))
}
