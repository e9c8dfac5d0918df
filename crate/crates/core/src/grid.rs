//! Uniform cell-centred lattices, horizons, and sub-domain classification.
//!
//! Node `(i, j, k)` (one-based) sits at `x_l + (i - 1/2) h` along each axis and
//! has linear id `p = (k-1) Nx Ny + (j-1) Nx + i`. Internally everything is
//! zero-based with `x` running fastest.

use crate::error::{Error, Result};
use crate::geometry::Aabb;
use crate::kernel::volume_correction;
use crate::ledger::BondLedger;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(a: usize) -> Self {
        Self::ALL[a]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    origin: [f64; 3],
    h: f64,
    dims: [usize; 3],
    dim: usize,
    thickness: Option<f64>,
}

impl Grid {
    /// Lattice over the box `bounds` (one `(lo, hi)` pair per axis, two or
    /// three axes) with spacing `target_h`. Every extent must be an integer
    /// multiple of `target_h` to within `1e-9` relative.
    pub fn build(bounds: &[(f64, f64)], target_h: f64, thickness: Option<f64>) -> Result<Self> {
        let dim = bounds.len();
        if !(2..=3).contains(&dim) {
            return Err(Error::InvalidGrid(format!("expected 2 or 3 axes, got {dim}")));
        }
        if !(target_h > 0.0 && target_h.is_finite()) {
            return Err(Error::InvalidGrid(format!("grid spacing must be positive, got {target_h}")));
        }
        if let Some(t) = thickness {
            if !(t > 0.0) {
                return Err(Error::InvalidGrid(format!("thickness must be positive, got {t}")));
            }
        }
        let mut origin = [0.0; 3];
        let mut dims = [1usize; 3];
        for (axis, &(lo, hi)) in bounds.iter().enumerate() {
            let extent = hi - lo;
            if !(extent > 0.0) {
                return Err(Error::InvalidGrid(format!("axis {axis} has non-positive extent {extent}")));
            }
            let cells = extent / target_h;
            let rounded = cells.round();
            if rounded < 1.0 || (cells - rounded).abs() > 1e-9 * cells.max(1.0) {
                return Err(Error::NonDivisibleExtent { axis, extent, h: target_h });
            }
            origin[axis] = lo;
            dims[axis] = rounded as usize;
        }
        Ok(Self { origin, h: target_h, dims, dim, thickness })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn origin(&self) -> [f64; 3] {
        self.origin
    }

    /// Node counts per axis; the third entry is 1 for 2D grids.
    pub fn dims(&self) -> [usize; 3] {
        self.dims
    }

    pub fn thickness(&self) -> Option<f64> {
        self.thickness
    }

    pub fn len(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Volume carried by one node: `h³` in 3D, `h² · thickness` for plates.
    pub fn cell_volume(&self) -> Result<f64> {
        match self.dim {
            3 => Ok(self.h.powi(3)),
            _ => self.thickness.map(|t| self.h * self.h * t).ok_or(Error::MissingThickness),
        }
    }

    /// Bounding box of the material domain.
    pub fn bounds(&self) -> Aabb {
        let mut min = [f64::NEG_INFINITY; 3];
        let mut max = [f64::INFINITY; 3];
        for a in 0..self.dim {
            min[a] = self.origin[a];
            max[a] = self.origin[a] + self.dims[a] as f64 * self.h;
        }
        Aabb { min, max }
    }

    /// One-based `(i, j[, k])` to one-based linear id.
    pub fn node_index(&self, index: &[usize]) -> Result<usize> {
        let out_of_range = || Error::OutOfRange {
            index: index.to_vec(),
            dims: self.dims[..self.dim].to_vec(),
        };
        if index.len() != self.dim {
            return Err(out_of_range());
        }
        let mut ijk = [0usize; 3];
        for (a, &v) in index.iter().enumerate() {
            if v == 0 || v > self.dims[a] {
                return Err(out_of_range());
            }
            ijk[a] = v - 1;
        }
        Ok(self.flat(ijk) + 1)
    }

    /// Inverse of [`Grid::node_index`].
    pub fn node_position_index(&self, p: usize) -> Result<Vec<usize>> {
        if p == 0 || p > self.len() {
            return Err(Error::OutOfRange { index: vec![p], dims: vec![self.len()] });
        }
        let ijk = self.unflat(p - 1);
        Ok(ijk[..self.dim].iter().map(|v| v + 1).collect())
    }

    /// Zero-based lattice coordinates to zero-based id.
    #[inline]
    pub fn flat(&self, ijk: [usize; 3]) -> usize {
        (ijk[2] * self.dims[1] + ijk[1]) * self.dims[0] + ijk[0]
    }

    #[inline]
    pub fn unflat(&self, p: usize) -> [usize; 3] {
        let nx = self.dims[0];
        let ny = self.dims[1];
        [p % nx, (p / nx) % ny, p / (nx * ny)]
    }

    /// Neighbour of `p` at lattice offset `d`, if it lies on the lattice.
    #[inline]
    pub fn offset_node(&self, p: usize, d: [i64; 3]) -> Option<usize> {
        let ijk = self.unflat(p);
        let mut out = [0usize; 3];
        for a in 0..3 {
            let v = ijk[a] as i64 + d[a];
            if v < 0 || v >= self.dims[a] as i64 {
                return None;
            }
            out[a] = v as usize;
        }
        Some(self.flat(out))
    }

    /// Physical coordinates of node `p` (zero-based); unused axes are 0.
    #[inline]
    pub fn position(&self, p: usize) -> [f64; 3] {
        let ijk = self.unflat(p);
        let mut x = [0.0; 3];
        for a in 0..self.dim {
            x[a] = self.origin[a] + (ijk[a] as f64 + 0.5) * self.h;
        }
        x
    }

    /// Node closest to `x`.
    pub fn nearest_node(&self, x: &[f64]) -> usize {
        let mut ijk = [0usize; 3];
        for a in 0..self.dim {
            let v = ((x.get(a).copied().unwrap_or(0.0) - self.origin[a]) / self.h - 0.5).round();
            ijk[a] = v.clamp(0.0, (self.dims[a] - 1) as f64) as usize;
        }
        self.flat(ijk)
    }

    /// Zero-based ids of the nodes whose positions lie in `b`.
    pub fn nodes_in(&self, b: &Aabb) -> Vec<usize> {
        let tol = 1e-9 * self.h;
        (0..self.len())
            .filter(|&p| b.contains_with(&self.position(p), tol))
            .collect()
    }

    pub fn with_origin(&self, origin: [f64; 3]) -> Self {
        Self { origin, ..self.clone() }
    }
}

/// A lattice offset admitted by the horizon together with its volume weight.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BondOffset {
    pub d: [i64; 3],
    pub lambda: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HorizonSpec {
    delta: f64,
    m: usize,
    h: f64,
}

impl HorizonSpec {
    /// `delta` must equal `M · h` for an integer `M ≥ 1`.
    pub fn new(delta: f64, h: f64) -> Result<Self> {
        let ratio = delta / h;
        let m = ratio.round();
        if !(delta > 0.0) || m < 1.0 || (ratio - m).abs() > 1e-9 * ratio.max(1.0) {
            return Err(Error::NonIntegralHorizon { delta, h });
        }
        Ok(Self { delta, m: m as usize, h })
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// Band half-width in lattice units.
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    /// All non-zero offsets with positive volume weight, in `z, y, x` order.
    pub fn offsets(&self, dim: usize) -> Vec<BondOffset> {
        let m = self.m as i64;
        let zr = if dim == 3 { -m..=m } else { 0..=0 };
        let mut out = Vec::new();
        for dk in zr {
            for dj in -m..=m {
                for di in -m..=m {
                    if di == 0 && dj == 0 && dk == 0 {
                        continue;
                    }
                    let r2 = (di * di + dj * dj + dk * dk) as f64;
                    let lambda = volume_correction(self.h * r2.sqrt(), self.delta, self.h);
                    if lambda > 0.0 {
                        out.push(BondOffset { d: [di, dj, dk], lambda });
                    }
                }
            }
        }
        out
    }

    /// The lexicographically positive half of [`HorizonSpec::offsets`]; each
    /// unordered bond appears once.
    pub fn half_offsets(&self, dim: usize) -> Vec<BondOffset> {
        self.offsets(dim)
            .into_iter()
            .filter(|o| (o.d[2], o.d[1], o.d[0]) > (0, 0, 0))
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Zone {
    /// The full horizon lies on the lattice.
    Interior,
    /// Some horizon offset leaves the lattice.
    NearSurface,
}

/// A box of nodes whose displacement is prescribed along `axes`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstrainedBox {
    pub region: Aabb,
    pub axes: Vec<Axis>,
}

/// Per-node sub-domain labels.
///
/// The geometric zone partitions the lattice; the per-axis constraint flags and
/// the fractured flag are overlays on top of it.
#[derive(Debug, Clone, PartialEq)]
pub struct RegionLabels {
    zone: Vec<Zone>,
    constrained: Vec<u8>,
    fractured: Vec<bool>,
}

impl RegionLabels {
    pub fn len(&self) -> usize {
        self.zone.len()
    }

    pub fn is_empty(&self) -> bool {
        self.zone.is_empty()
    }

    pub fn zone(&self, p: usize) -> Zone {
        self.zone[p]
    }

    pub fn is_constrained(&self, p: usize, axis: usize) -> bool {
        self.constrained[p] & (1 << axis) != 0
    }

    pub fn is_fractured(&self, p: usize) -> bool {
        self.fractured[p]
    }

    pub fn near_surface_nodes(&self) -> impl Iterator<Item = usize> + '_ {
        self.zone
            .iter()
            .enumerate()
            .filter(|(_, z)| **z == Zone::NearSurface)
            .map(|(p, _)| p)
    }

    pub fn count(&self, zone: Zone) -> usize {
        self.zone.iter().filter(|z| **z == zone).count()
    }

    /// Re-sync the fractured overlay with the ledger.
    pub fn refresh_fractured(&mut self, ledger: &BondLedger) {
        for (p, f) in self.fractured.iter_mut().enumerate() {
            *f = ledger.broken_count(p) > 0;
        }
    }

    /// Mark the endpoints of newly broken bonds.
    pub fn mark_fractured(&mut self, bonds: &[(usize, usize)]) {
        for &(p, q) in bonds {
            self.fractured[p] = true;
            self.fractured[q] = true;
        }
    }

    pub fn memory_bytes(&self) -> usize {
        self.zone.len() * (std::mem::size_of::<Zone>() + 2)
    }
}

/// Label every node of `grid`.
///
/// A node is near-surface iff it sits fewer than `M` lattice steps from some
/// face, which is exactly when an admitted horizon offset leaves the lattice.
pub fn classify_regions(
    grid: &Grid,
    horizon: &HorizonSpec,
    constrained: &[ConstrainedBox],
    ledger: Option<&BondLedger>,
) -> RegionLabels {
    let n = grid.len();
    let m = horizon.m();
    let dims = grid.dims();
    let tol = 1e-9 * grid.h();
    let mut zone = Vec::with_capacity(n);
    let mut flags = vec![0u8; n];
    for (p, flag) in flags.iter_mut().enumerate() {
        let ijk = grid.unflat(p);
        let near = (0..grid.dim()).any(|a| ijk[a] < m || ijk[a] + m >= dims[a]);
        zone.push(if near { Zone::NearSurface } else { Zone::Interior });
        let x = grid.position(p);
        for c in constrained {
            if c.region.contains_with(&x, tol) {
                for ax in &c.axes {
                    *flag |= 1 << ax.index();
                }
            }
        }
    }
    let fractured = match ledger {
        Some(l) => (0..n).map(|p| l.broken_count(p) > 0).collect(),
        None => vec![false; n],
    };
    RegionLabels { zone, constrained: flags, fractured }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn plate_tension_grid_dims() {
        let g = Grid::build(&[(0.0, 1.0), (0.0, 0.5)], 0.0025, Some(0.0025)).unwrap();
        assert_eq!(&g.dims()[..2], &[400, 200]);
        assert_eq!(g.len(), 80_000);
    }

    #[test]
    fn single_cell_grid() {
        let g = Grid::build(&[(0.0, 1.0), (0.0, 1.0)], 1.0, None).unwrap();
        assert_eq!(g.len(), 1);
        assert_eq!(g.position(0), [0.5, 0.5, 0.0]);
    }

    #[test]
    fn kalthoff_block_dims() {
        let g = Grid::build(&[(0.0, 0.2), (0.0, 0.1), (0.0, 0.009)], 0.001, None).unwrap();
        assert_eq!(g.dims(), [200, 100, 9]);
    }

    #[test]
    fn non_divisible_extent_is_rejected() {
        let err = Grid::build(&[(0.0, 1.0), (0.0, 0.5)], 0.3, Some(0.01)).unwrap_err();
        assert!(matches!(err, Error::NonDivisibleExtent { axis: 0, .. }));
    }

    #[test]
    fn node_index_formula() {
        let g = Grid::build(&[(0.0, 400.0), (0.0, 5.0)], 1.0, Some(1.0)).unwrap();
        assert_eq!(g.node_index(&[1, 1]).unwrap(), 1);
        assert_eq!(g.node_index(&[3, 2]).unwrap(), 403);
        let g3 = Grid::build(&[(0.0, 4.0), (0.0, 3.0), (0.0, 2.0)], 1.0, None).unwrap();
        assert_eq!(g3.node_index(&[2, 3, 2]).unwrap(), 22);
        assert!(matches!(g3.node_index(&[5, 1, 1]), Err(Error::OutOfRange { .. })));
        assert!(matches!(g3.node_index(&[0, 1, 1]), Err(Error::OutOfRange { .. })));
    }

    #[test]
    fn node_index_matches_lattice_enumeration() {
        let g3 = Grid::build(&[(0.0, 4.0), (0.0, 3.0), (0.0, 2.0)], 1.0, None).unwrap();
        let mut expected = 1;
        for k in 1..=2 {
            for j in 1..=3 {
                for i in 1..=4 {
                    assert_eq!(g3.node_index(&[i, j, k]).unwrap(), expected);
                    expected += 1;
                }
            }
        }
    }

    #[test]
    fn horizon_requires_integral_ratio() {
        assert_eq!(HorizonSpec::new(0.03, 0.0025).unwrap().m(), 12);
        assert!(matches!(HorizonSpec::new(0.00315, 0.001), Err(Error::NonIntegralHorizon { .. })));
        assert!(HorizonSpec::new(0.0005, 0.001).is_err());
    }

    #[test]
    fn interior_node_classification() {
        let g = Grid::build(&[(0.0, 20.0), (0.0, 20.0)], 1.0, Some(1.0)).unwrap();
        let hz = HorizonSpec::new(3.0, 1.0).unwrap();
        let r = classify_regions(&g, &hz, &[], None);
        assert_eq!(r.zone(g.flat([3, 3, 0])), Zone::Interior);
        assert_eq!(r.zone(g.flat([2, 3, 0])), Zone::NearSurface);
        assert_eq!(r.zone(g.flat([16, 10, 0])), Zone::Interior);
        assert_eq!(r.zone(g.flat([17, 10, 0])), Zone::NearSurface);
        // Interior block is (20 - 2·3)².
        assert_eq!(r.count(Zone::Interior), 14 * 14);
    }

    #[test]
    fn constraint_layer_flags_are_per_axis() {
        let g = Grid::build(&[(0.0, 10.0), (0.0, 10.0)], 1.0, Some(1.0)).unwrap();
        let hz = HorizonSpec::new(2.0, 1.0).unwrap();
        let top = ConstrainedBox {
            region: Aabb::new(&[0.0, 8.0], &[10.0, 10.0]),
            axes: vec![Axis::Y],
        };
        let r = classify_regions(&g, &hz, &[top], None);
        let p = g.flat([5, 9, 0]);
        assert!(r.is_constrained(p, 1));
        assert!(!r.is_constrained(p, 0));
        assert_eq!(r.zone(p), Zone::NearSurface);
        assert!(!r.is_constrained(g.flat([5, 5, 0]), 1));
    }

    #[test]
    fn fractured_overlay_mirrors_ledger() {
        let g = Grid::build(&[(0.0, 10.0), (0.0, 10.0)], 1.0, Some(1.0)).unwrap();
        let hz = HorizonSpec::new(2.0, 1.0).unwrap();
        let mut ledger = BondLedger::new(g.len());
        ledger.insert(g.flat([4, 4, 0]), g.flat([5, 4, 0]));
        let r = classify_regions(&g, &hz, &[], Some(&ledger));
        assert!(r.is_fractured(g.flat([4, 4, 0])));
        assert!(r.is_fractured(g.flat([5, 4, 0])));
        assert!(!r.is_fractured(g.flat([6, 4, 0])));
    }

    #[test]
    fn offsets_count_for_unit_horizon() {
        let hz = HorizonSpec::new(1.0, 1.0).unwrap();
        // δ = h: axis neighbours have λ = 1/2, diagonals are beyond δ.
        assert_eq!(hz.offsets(2).len(), 4);
        assert_eq!(hz.half_offsets(2).len(), 2);
        let hz3 = HorizonSpec::new(3.0, 1.0).unwrap();
        assert_eq!(hz3.offsets(2).len(), 28);
    }

    proptest! {
        #[test]
        fn node_index_round_trips(nx in 1usize..9, ny in 1usize..9, nz in 1usize..5, seed in 0usize..10_000) {
            let g = Grid::build(&[(0.0, nx as f64), (0.0, ny as f64), (0.0, nz as f64)], 1.0, None).unwrap();
            let p = seed % g.len() + 1;
            let ijk = g.node_position_index(p).unwrap();
            prop_assert_eq!(g.node_index(&ijk).unwrap(), p);
        }

        #[test]
        fn near_surface_iff_offset_leaves_lattice(nx in 3usize..15, ny in 3usize..15, m in 1usize..4, seed in 0usize..10_000) {
            let g = Grid::build(&[(0.0, nx as f64), (0.0, ny as f64)], 1.0, Some(1.0)).unwrap();
            let hz = HorizonSpec::new(m as f64, 1.0).unwrap();
            let r = classify_regions(&g, &hz, &[], None);
            let p = seed % g.len();
            let leaves = hz.offsets(2).iter().any(|o| g.offset_node(p, o.d).is_none());
            prop_assert_eq!(r.zone(p) == Zone::NearSurface, leaves);
        }
    }
}
