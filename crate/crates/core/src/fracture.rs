//! Bond breaking against a critical stretch, crack seeding, and damage.

use crate::field::VectorField;
use crate::geometry::{crack_cuts_bond_2d, crack_cuts_bond_3d, cross, Aabb};
use crate::grid::{Grid, HorizonSpec};
use crate::ledger::BondLedger;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Exact stretch `(|ξ + η| - |ξ|) / |ξ|` of the bond from `x_p` to `x_q`.
pub fn bond_stretch(xp: [f64; 3], xq: [f64; 3], up: [f64; 3], uq: [f64; 3]) -> f64 {
    let mut r0 = 0.0;
    let mut r1 = 0.0;
    for a in 0..3 {
        let xi = xq[a] - xp[a];
        let eta = uq[a] - up[a];
        r0 += xi * xi;
        r1 += (xi + eta) * (xi + eta);
    }
    let r0 = r0.sqrt();
    (r1.sqrt() - r0) / r0
}

/// A crack surface: a segment in 2D, a parallelogram `origin + s·e1 + t·e2`
/// in 3D.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CrackGeometry {
    Segment { a: [f64; 2], b: [f64; 2] },
    Rectangle { origin: [f64; 3], e1: [f64; 3], e2: [f64; 3] },
}

/// A pre-existing crack. A positive `width` models a slot: bonds crossing
/// either face, offset by `±width/2` along the normal, are broken.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Crack {
    #[serde(flatten)]
    pub geometry: CrackGeometry,
    #[serde(default)]
    pub width: f64,
}

impl Crack {
    pub fn segment(a: [f64; 2], b: [f64; 2]) -> Self {
        Self { geometry: CrackGeometry::Segment { a, b }, width: 0.0 }
    }

    pub fn rectangle(origin: [f64; 3], e1: [f64; 3], e2: [f64; 3]) -> Self {
        Self { geometry: CrackGeometry::Rectangle { origin, e1, e2 }, width: 0.0 }
    }

    pub fn with_width(mut self, width: f64) -> Self {
        self.width = width;
        self
    }

    /// The zero-width faces that actually cut bonds.
    pub fn faces(&self) -> Vec<CrackGeometry> {
        if self.width <= 0.0 {
            return vec![self.geometry.clone()];
        }
        let w = 0.5 * self.width;
        match &self.geometry {
            CrackGeometry::Segment { a, b } => {
                let (dx, dy) = (b[0] - a[0], b[1] - a[1]);
                let len = (dx * dx + dy * dy).sqrt();
                let n = [-dy / len * w, dx / len * w];
                [1.0, -1.0]
                    .iter()
                    .map(|s| CrackGeometry::Segment {
                        a: [a[0] + s * n[0], a[1] + s * n[1]],
                        b: [b[0] + s * n[0], b[1] + s * n[1]],
                    })
                    .collect()
            }
            CrackGeometry::Rectangle { origin, e1, e2 } => {
                let n = cross(*e1, *e2);
                let len = (n[0] * n[0] + n[1] * n[1] + n[2] * n[2]).sqrt();
                let n = [n[0] / len * w, n[1] / len * w, n[2] / len * w];
                [1.0, -1.0]
                    .iter()
                    .map(|s| CrackGeometry::Rectangle {
                        origin: [origin[0] + s * n[0], origin[1] + s * n[1], origin[2] + s * n[2]],
                        e1: *e1,
                        e2: *e2,
                    })
                    .collect()
            }
        }
    }
}

fn face_cuts(face: &CrackGeometry, p: [f64; 3], q: [f64; 3]) -> bool {
    match face {
        CrackGeometry::Segment { a, b } => crack_cuts_bond_2d(*a, *b, [p[0], p[1]], [q[0], q[1]]),
        CrackGeometry::Rectangle { origin, e1, e2 } => crack_cuts_bond_3d(*origin, *e1, *e2, p, q),
    }
}

/// Every unordered in-lattice bond `(p, q)`, `p` the lexicographic lower
/// endpoint, in a fixed order.
pub fn enumerate_bonds(grid: &Grid, horizon: &HorizonSpec, watch: Option<&Aabb>) -> Vec<(usize, usize)> {
    let half = horizon.half_offsets(grid.dim());
    let tol = 1e-9 * grid.h();
    let inside: Vec<bool> = match watch {
        Some(b) => (0..grid.len()).map(|p| b.contains_with(&grid.position(p), tol)).collect(),
        None => vec![true; grid.len()],
    };
    let mut out = Vec::new();
    for p in 0..grid.len() {
        if !inside[p] {
            continue;
        }
        for o in &half {
            if let Some(q) = grid.offset_node(p, o.d) {
                if inside[q] {
                    out.push((p, q));
                }
            }
        }
    }
    out
}

/// Snap a lattice coordinate to a multiple of `2⁻²⁰` so that crack
/// geometry given in round physical numbers lands exactly on lattice
/// lines and mid-lines.
fn snap(v: f64) -> f64 {
    let s = (1u64 << 20) as f64;
    (v * s).round() / s
}

/// Express a face in lattice units: node `i` sits at `i + 1/2`.
fn to_lattice(face: &CrackGeometry, grid: &Grid) -> CrackGeometry {
    let (o, h) = (grid.origin(), grid.h());
    let pt = |x: f64, a: usize| snap((x - o[a]) / h);
    let vec = |x: f64| snap(x / h);
    match face {
        CrackGeometry::Segment { a, b } => CrackGeometry::Segment {
            a: [pt(a[0], 0), pt(a[1], 1)],
            b: [pt(b[0], 0), pt(b[1], 1)],
        },
        CrackGeometry::Rectangle { origin, e1, e2 } => CrackGeometry::Rectangle {
            origin: [pt(origin[0], 0), pt(origin[1], 1), pt(origin[2], 2)],
            e1: [vec(e1[0]), vec(e1[1]), vec(e1[2])],
            e2: [vec(e2[0]), vec(e2[1]), vec(e2[2])],
        },
    }
}

fn lattice_position(grid: &Grid, p: usize) -> [f64; 3] {
    let ijk = grid.unflat(p);
    let mut x = [0.0; 3];
    for a in 0..grid.dim() {
        x[a] = ijk[a] as f64 + 0.5;
    }
    x
}

/// Break every bond whose segment crosses a crack face.
///
/// The intersection tests run in lattice units, where node coordinates
/// are exact, so mirror-symmetric geometry seeds a mirror-symmetric ledger.
pub fn seed_cracks(cracks: &[Crack], grid: &Grid, horizon: &HorizonSpec) -> BondLedger {
    let mut ledger = BondLedger::new(grid.len());
    if cracks.is_empty() {
        return ledger;
    }
    let faces: Vec<CrackGeometry> = cracks.iter().flat_map(|c| c.faces()).map(|f| to_lattice(&f, grid)).collect();
    let bonds = enumerate_bonds(grid, horizon, None);
    let cut: Vec<(usize, usize)> = bonds
        .par_iter()
        .filter(|&&(p, q)| {
            let (xp, xq) = (lattice_position(grid, p), lattice_position(grid, q));
            faces.iter().any(|f| face_cuts(f, xp, xq))
        })
        .copied()
        .collect();
    for (p, q) in cut {
        ledger.insert(p, q);
    }
    ledger
}

/// The bonds watched for breaking, with their intact flags.
#[derive(Debug, Clone)]
pub struct FractureModel {
    bonds: Vec<(usize, usize)>,
    intact: Vec<bool>,
    positions: Vec<[f64; 3]>,
    s0: f64,
}

impl FractureModel {
    pub fn new(grid: &Grid, horizon: &HorizonSpec, s0: f64, watch: Option<&Aabb>, ledger: &BondLedger) -> Self {
        let bonds = enumerate_bonds(grid, horizon, watch);
        let intact = bonds.iter().map(|&(p, q)| !ledger.contains(p, q)).collect();
        let positions = (0..grid.len()).map(|p| grid.position(p)).collect();
        Self { bonds, intact, positions, s0 }
    }

    pub fn critical_stretch(&self) -> f64 {
        self.s0
    }

    /// Number of stretch evaluations per update.
    pub fn watched(&self) -> usize {
        self.bonds.len()
    }

    /// Break every intact watched bond with `s ≥ s0`. Returns the newly
    /// broken bonds in enumeration order.
    pub fn update_bonds(&mut self, u: &VectorField, ledger: &mut BondLedger) -> Vec<(usize, usize)> {
        let s0 = self.s0;
        let pos = &self.positions;
        let hits: Vec<usize> = self
            .bonds
            .par_iter()
            .zip(self.intact.par_iter())
            .enumerate()
            .filter_map(|(i, (&(p, q), &alive))| {
                if !alive {
                    return None;
                }
                (bond_stretch(pos[p], pos[q], u.node(p), u.node(q)) >= s0).then_some(i)
            })
            .collect();
        let mut fresh = Vec::with_capacity(hits.len());
        for i in hits {
            self.intact[i] = false;
            let (p, q) = self.bonds[i];
            if ledger.insert(p, q) {
                fresh.push((p, q));
            }
        }
        fresh
    }

    pub fn memory_bytes(&self) -> usize {
        self.bonds.len() * 17 + self.positions.len() * 24
    }
}

/// In-lattice bond count of every node.
pub fn bond_counts(grid: &Grid, horizon: &HorizonSpec) -> Vec<usize> {
    let offsets = horizon.offsets(grid.dim());
    (0..grid.len())
        .map(|p| offsets.iter().filter(|o| grid.offset_node(p, o.d).is_some()).count())
        .collect()
}

/// `φ_p = |v_p| / (in-lattice bonds of p)`.
pub fn damage(ledger: &BondLedger, counts: &[usize]) -> Vec<f64> {
    counts
        .iter()
        .enumerate()
        .map(|(p, &c)| if c == 0 { 0.0 } else { ledger.broken_count(p) as f64 / c as f64 })
        .collect()
}
