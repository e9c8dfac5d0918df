//! Repairs `f' = Âu` into the true force `f = Au`, where
//! `A = Â + Dᵉ + Dᶠ`.
//!
//! `Dᵉ` is diagonal and lives on near-surface nodes: the Toeplitz centre
//! entry subtracts the full stencil, but only in-lattice neighbours exist, so
//! the kernel entries at the missing offsets are added back. `Dᶠ` removes the
//! contribution of every broken bond and is applied as a gather over the
//! ledger, never materialised.
//!
//! Rows constrained in direction `a` keep their `Â` values; the integrator
//! overwrites those components afterwards.

use crate::error::{Error, Result};
use crate::field::VectorField;
use crate::grid::{Grid, RegionLabels, Zone};
use crate::kernel::KernelStack;
use crate::ledger::BondLedger;
use std::collections::HashMap;

/// Diagonal near-surface correction: a `d × d` block per near-surface node.
#[derive(Debug, Clone, PartialEq)]
pub struct SurfaceCorrectionDiag {
    dim: usize,
    nodes: Vec<usize>,
    values: Vec<f64>,
    slot: HashMap<usize, usize>,
}

impl SurfaceCorrectionDiag {
    /// Sum the kernel over the offsets of every near-surface node that leave
    /// the lattice. Entries for rows constrained in direction `a` are zero.
    pub fn build(grid: &Grid, regions: &RegionLabels, kernels: &KernelStack) -> Self {
        let dim = grid.dim();
        let stencil: Vec<[i64; 3]> = kernels.stencil().filter(|d| *d != [0, 0, 0]).collect();
        let mut nodes = Vec::new();
        let mut values = Vec::new();
        for p in regions.near_surface_nodes() {
            let mut row = vec![0.0; dim * dim];
            for d in &stencil {
                if grid.offset_node(p, *d).is_some() {
                    continue;
                }
                for a in 0..dim {
                    for b in 0..dim {
                        row[a * dim + b] += kernels.get(a, b, *d);
                    }
                }
            }
            for a in 0..dim {
                if regions.is_constrained(p, a) {
                    row[a * dim..(a + 1) * dim].fill(0.0);
                }
            }
            nodes.push(p);
            values.extend(row);
        }
        let slot = nodes.iter().enumerate().map(|(i, &p)| (p, i)).collect();
        Self { dim, nodes, values, slot }
    }

    /// `Dᵉ^{ab}_pp`; zero for interior nodes and constrained rows.
    pub fn get(&self, p: usize, a: usize, b: usize) -> f64 {
        match self.slot.get(&p) {
            Some(&i) => self.values[i * self.dim * self.dim + a * self.dim + b],
            None => 0.0,
        }
    }

    pub fn nodes(&self) -> &[usize] {
        &self.nodes
    }

    pub fn memory_bytes(&self) -> usize {
        self.values.len() * 8 + self.nodes.len() * (8 + 24)
    }
}

/// `f = f' + Dᵉu + Dᶠu` in place, skipping constrained rows.
pub fn apply_corrections(
    f: &mut VectorField,
    u: &VectorField,
    de: &SurfaceCorrectionDiag,
    ledger: &BondLedger,
    kernels: &KernelStack,
    grid: &Grid,
    regions: &RegionLabels,
) -> Result<()> {
    let dim = grid.dim();
    for (i, &p) in de.nodes.iter().enumerate() {
        let row = &de.values[i * dim * dim..(i + 1) * dim * dim];
        for a in 0..dim {
            let mut acc = 0.0;
            for b in 0..dim {
                acc += row[a * dim + b] * u.get(b, p);
            }
            f.add(a, p, acc);
        }
    }
    let m = kernels.m() as i64;
    for (p, q) in ledger.iter() {
        let d = offset_between(grid, p, q);
        if d.iter().any(|v| v.abs() > m) {
            return Err(Error::LedgerOutOfBand { p, q });
        }
        let nd = [-d[0], -d[1], -d[2]];
        for a in 0..dim {
            let (mut fp, mut fq) = (0.0, 0.0);
            for b in 0..dim {
                let du = u.get(b, p) - u.get(b, q);
                fp += kernels.get(a, b, d) * du;
                fq -= kernels.get(a, b, nd) * du;
            }
            if !regions.is_constrained(p, a) {
                f.add(a, p, fp);
            }
            if !regions.is_constrained(q, a) {
                f.add(a, q, fq);
            }
        }
    }
    Ok(())
}

/// Lattice offset from `p` to `q`.
pub fn offset_between(grid: &Grid, p: usize, q: usize) -> [i64; 3] {
    let a = grid.unflat(p);
    let b = grid.unflat(q);
    [b[0] as i64 - a[0] as i64, b[1] as i64 - a[1] as i64, b[2] as i64 - a[2] as i64]
}

/// User-supplied surface-correction coefficients `v_pq`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CoefficientTable {
    pub default: Option<f64>,
    pub entries: HashMap<(usize, usize), f64>,
}

impl CoefficientTable {
    pub fn uniform(v: f64) -> Self {
        Self { default: Some(v), entries: HashMap::new() }
    }

    pub fn insert(&mut self, p: usize, q: usize, v: f64) {
        self.entries.insert((p, q), v);
    }

    fn lookup(&self, p: usize, q: usize) -> Result<f64> {
        self.entries
            .get(&(p, q))
            .copied()
            .or(self.default)
            .ok_or(Error::MissingCoefficients { p, q })
    }
}

/// Replace the near-surface rows of `f` by the direct sum
/// `f_p = Σ_q v_pq K(q - p)(u_q - u_p)` over intact in-lattice bonds.
/// Costs `O(|Ω_e|·M^d)`.
pub fn surface_corrected_rows(
    f: &mut VectorField,
    u: &VectorField,
    grid: &Grid,
    regions: &RegionLabels,
    kernels: &KernelStack,
    ledger: &BondLedger,
    coefficients: &CoefficientTable,
) -> Result<()> {
    let dim = grid.dim();
    let stencil: Vec<[i64; 3]> = kernels.stencil().filter(|d| *d != [0, 0, 0]).collect();
    for p in 0..grid.len() {
        if regions.zone(p) != Zone::NearSurface {
            continue;
        }
        let mut row = [0.0; 3];
        for d in &stencil {
            let Some(q) = grid.offset_node(p, *d) else { continue };
            if ledger.contains(p, q) {
                continue;
            }
            let weight = (0..dim)
                .flat_map(|a| (0..dim).map(move |b| (a, b)))
                .any(|(a, b)| kernels.get(a, b, *d) != 0.0);
            if !weight {
                continue;
            }
            let v = coefficients.lookup(p, q)?;
            for (a, r) in row.iter_mut().enumerate().take(dim) {
                for b in 0..dim {
                    *r += v * kernels.get(a, b, *d) * (u.get(b, q) - u.get(b, p));
                }
            }
        }
        for (a, r) in row.iter().enumerate().take(dim) {
            if !regions.is_constrained(p, a) {
                f.set(a, p, *r);
            }
        }
    }
    Ok(())
}
