//! Meshfree baseline: the force is a direct sum over every intact bond in
//! each node's horizon, using physical coordinates.

use crate::error::Result;
use crate::field::VectorField;
use crate::grid::{Grid, HorizonSpec};
use crate::kernel::{alpha, volume_correction, MaterialParams};
use crate::ledger::BondLedger;
use rayon::prelude::*;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Neighbor {
    pub q: usize,
    /// Lattice offset from the owning node to `q`.
    pub d: [i64; 3],
    pub lambda: f64,
    pub dist: f64,
}

/// Horizon membership of every node, in compressed rows.
#[derive(Debug, Clone, PartialEq)]
pub struct NeighborTable {
    start: Vec<usize>,
    entries: Vec<Neighbor>,
}

impl NeighborTable {
    /// Search only the `(2M+1)^d` index window around each node.
    pub fn windowed(grid: &Grid, horizon: &HorizonSpec) -> Self {
        let offsets = horizon.offsets(grid.dim());
        let h = grid.h();
        let mut start = Vec::with_capacity(grid.len() + 1);
        let mut entries = Vec::new();
        start.push(0);
        for p in 0..grid.len() {
            for o in &offsets {
                if let Some(q) = grid.offset_node(p, o.d) {
                    let dist = h * ((o.d[0] * o.d[0] + o.d[1] * o.d[1] + o.d[2] * o.d[2]) as f64).sqrt();
                    entries.push(Neighbor { q, d: o.d, lambda: o.lambda, dist });
                }
            }
            start.push(entries.len());
        }
        Self { start, entries }
    }

    /// Compare the distance between every pair of nodes: the `Θ(N²)`
    /// traversal of the classical meshfree assembly.
    pub fn all_pairs(grid: &Grid, horizon: &HorizonSpec) -> Self {
        let n = grid.len();
        let delta = horizon.delta();
        let h = grid.h();
        let reach2 = (delta + h).powi(2);
        let pos: Vec<[f64; 3]> = (0..n).map(|p| grid.position(p)).collect();
        let rows: Vec<Vec<Neighbor>> = (0..n)
            .into_par_iter()
            .map(|p| {
                let xp = pos[p];
                let ip = grid.unflat(p);
                let mut row = Vec::new();
                for (q, xq) in pos.iter().enumerate() {
                    let dx = [xq[0] - xp[0], xq[1] - xp[1], xq[2] - xp[2]];
                    let r2 = dx[0] * dx[0] + dx[1] * dx[1] + dx[2] * dx[2];
                    if q == p || r2 > reach2 {
                        continue;
                    }
                    let dist = r2.sqrt();
                    let lambda = volume_correction(dist, delta, h);
                    if lambda > 0.0 {
                        let iq = grid.unflat(q);
                        let d = [
                            iq[0] as i64 - ip[0] as i64,
                            iq[1] as i64 - ip[1] as i64,
                            iq[2] as i64 - ip[2] as i64,
                        ];
                        row.push(Neighbor { q, d, lambda, dist });
                    }
                }
                row
            })
            .collect();
        let mut start = Vec::with_capacity(n + 1);
        let mut entries = Vec::new();
        start.push(0);
        for row in rows {
            entries.extend(row);
            start.push(entries.len());
        }
        Self { start, entries }
    }

    pub fn nodes(&self) -> usize {
        self.start.len() - 1
    }

    pub fn neighbors(&self, p: usize) -> &[Neighbor] {
        &self.entries[self.start[p]..self.start[p + 1]]
    }

    pub fn bond_count(&self) -> usize {
        self.entries.len()
    }

    pub fn memory_bytes(&self) -> usize {
        self.entries.len() * std::mem::size_of::<Neighbor>() + self.start.len() * 8
    }
}

/// Everything the direct sum needs apart from the displacement.
#[derive(Debug, Clone)]
pub struct DenseModel {
    grid: Grid,
    table: NeighborTable,
    /// `α · V`.
    scale: f64,
}

impl DenseModel {
    pub fn new(grid: &Grid, horizon: &HorizonSpec, material: &MaterialParams) -> Result<Self> {
        let table = NeighborTable::windowed(grid, horizon);
        Self::with_table(grid, horizon, material, table)
    }

    pub fn with_table(grid: &Grid, horizon: &HorizonSpec, material: &MaterialParams, table: NeighborTable) -> Result<Self> {
        let a = alpha(material.e, horizon.delta(), grid.thickness(), grid.dim())?;
        Ok(Self { grid: grid.clone(), table, scale: a * grid.cell_volume()? })
    }

    pub fn table(&self) -> &NeighborTable {
        &self.table
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    /// Bond tensor `α V λ ξ⊗ξ / |ξ|³` at physical separation.
    fn bond_tensor(&self, nb: &Neighbor) -> [[f64; 3]; 3] {
        let h = self.grid.h();
        let xi = [nb.d[0] as f64 * h, nb.d[1] as f64 * h, nb.d[2] as f64 * h];
        let w = self.scale * nb.lambda / (nb.dist * nb.dist * nb.dist);
        let mut t = [[0.0; 3]; 3];
        for (a, row) in t.iter_mut().enumerate() {
            for (b, v) in row.iter_mut().enumerate() {
                *v = w * xi[a] * xi[b];
            }
        }
        t
    }

    /// `f^a_p = Σ_{q intact} Σ_b α V λ Δ_aΔ_b/|Δ|³ (u^b_q - u^b_p)`.
    pub fn force(&self, u: &VectorField, ledger: &BondLedger, out: &mut VectorField) {
        let dim = self.grid.dim();
        let n = self.grid.len();
        let rows: Vec<[f64; 3]> = (0..n)
            .into_par_iter()
            .map(|p| {
                let broken = ledger.broken(p);
                let up = u.node(p);
                let mut acc = [0.0; 3];
                for nb in self.table.neighbors(p) {
                    if !broken.is_empty() && broken.contains(&nb.q) {
                        continue;
                    }
                    let t = self.bond_tensor(nb);
                    let uq = u.node(nb.q);
                    for a in 0..dim {
                        for b in 0..dim {
                            acc[a] += t[a][b] * (uq[b] - up[b]);
                        }
                    }
                }
                acc
            })
            .collect();
        for (p, r) in rows.iter().enumerate() {
            for (a, v) in r.iter().enumerate().take(dim) {
                out.set(a, p, *v);
            }
        }
    }

    pub fn force_alloc(&self, u: &VectorField, ledger: &BondLedger) -> VectorField {
        let mut out = VectorField::zeros(self.grid.dim(), self.grid.len());
        self.force(u, ledger, &mut out);
        out
    }

    /// The full stiffness matrix with bond states from `ledger`. Rows and
    /// columns are ordered `(a, p) ↦ a·N + p`. `O(N²)` memory: small grids only.
    pub fn to_dense(&self, ledger: &BondLedger) -> DenseMatrix {
        let dim = self.grid.dim();
        let n = self.grid.len();
        let size = dim * n;
        let mut data = vec![0.0; size * size];
        for p in 0..n {
            for nb in self.table.neighbors(p) {
                if ledger.contains(p, nb.q) {
                    continue;
                }
                let t = self.bond_tensor(nb);
                for a in 0..dim {
                    let row = (a * n + p) * size;
                    for b in 0..dim {
                        data[row + b * n + nb.q] += t[a][b];
                        data[row + b * n + p] -= t[a][b];
                    }
                }
            }
        }
        DenseMatrix { size, data }
    }
}

/// Row-major square matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    size: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn size(&self) -> usize {
        self.size
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.size + c]
    }

    pub fn row(&self, r: usize) -> &[f64] {
        &self.data[r * self.size..(r + 1) * self.size]
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.size).map(|r| self.row(r).iter().zip(x).map(|(a, b)| a * b).sum()).collect()
    }
}
