//! Material constants and the kernel tensors that generate the structured
//! stiffness operator.
//!
//! For an interior node the stiffness row only depends on the lattice offset
//! to each neighbour, so one `(2M+1)^d` tensor per component pair `(a, b)`
//! holds every distinct entry. The centre entry is minus the sum of all the
//! others, which makes rows annihilate rigid translations.

use crate::error::{Error, Result};
use crate::grid::{Grid, HorizonSpec};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum StressMode {
    #[default]
    PlaneStress,
    PlaneStrain,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaterialParams {
    /// Elastic modulus (Pa).
    #[serde(rename = "E")]
    pub e: f64,
    /// Informational only: bond-based models fix it at 1/3 (plane stress) or
    /// 1/4 (plane strain and 3D).
    pub nu: f64,
    /// Density (kg/m³).
    pub rho: f64,
    /// Energy release rate (J/m²).
    #[serde(default, rename = "G0", skip_serializing_if = "Option::is_none")]
    pub g0: Option<f64>,
    /// Critical stretch used instead of the `G0` formula.
    #[serde(default, rename = "s0", skip_serializing_if = "Option::is_none")]
    pub s0_override: Option<f64>,
}

impl MaterialParams {
    /// Steel-like values shared by every bundled scenario.
    pub fn steel() -> Self {
        Self { e: 2.0e11, nu: 1.0 / 3.0, rho: 7850.0, g0: None, s0_override: None }
    }

    /// Critical stretch: the override if set, otherwise derived from `G0`.
    pub fn critical_stretch(&self, delta: f64, mode: StressMode) -> Option<f64> {
        self.s0_override
            .or_else(|| self.g0.map(|g0| critical_stretch(g0, self.e, delta, mode)))
    }
}

/// Micromodulus scale: `9E / (π δ³ t)` for plates of thickness `t`,
/// `12E / (π δ⁴)` in 3D.
pub fn alpha(e: f64, delta: f64, thickness: Option<f64>, dim: usize) -> Result<f64> {
    let pi = std::f64::consts::PI;
    match dim {
        3 => Ok(12.0 * e / (pi * delta.powi(4))),
        _ => {
            let t = thickness.ok_or(Error::MissingThickness)?;
            Ok(9.0 * e / (pi * delta.powi(3) * t))
        }
    }
}

/// Fraction of a neighbour cell at distance `dist` that lies inside the
/// horizon: 1 up to `δ - h/2`, then a linear ramp reaching 1/2 at `δ`, and 0
/// beyond.
pub fn volume_correction(dist: f64, delta: f64, h: f64) -> f64 {
    // Absorbs the rounding in `M·h` versus `δ` for bonds exactly at the rim.
    let eps = 1e-9 * h;
    if dist <= delta - 0.5 * h + eps {
        1.0
    } else if dist <= delta + eps {
        0.5 + (delta - dist) / h
    } else {
        0.0
    }
}

/// `√(4πG0 / (9Eδ))` for plane stress, `√(5πG0 / (12Eδ))` for plane strain.
pub fn critical_stretch(g0: f64, e: f64, delta: f64, mode: StressMode) -> f64 {
    let pi = std::f64::consts::PI;
    match mode {
        StressMode::PlaneStress => (4.0 * pi * g0 / (9.0 * e * delta)).sqrt(),
        StressMode::PlaneStrain => (5.0 * pi * g0 / (12.0 * e * delta)).sqrt(),
    }
}

/// Index of the unordered component pair `(a, b)` among the `d(d+1)/2`
/// distinct kernels: xx, xy, (xz,) yy, (yz, zz).
#[inline]
pub fn pair_index(dim: usize, a: usize, b: usize) -> usize {
    let (a, b) = if a <= b { (a, b) } else { (b, a) };
    a * dim - a * a.saturating_sub(1) / 2 + (b - a)
}

/// Number of distinct component pairs.
pub fn pair_count(dim: usize) -> usize {
    dim * (dim + 1) / 2
}

#[derive(Debug, Clone, PartialEq)]
pub struct KernelStack {
    dim: usize,
    m: usize,
    tensors: Vec<Vec<f64>>,
}

impl KernelStack {
    /// Evaluate every kernel entry on the `(2M+1)^d` stencil.
    pub fn build(grid: &Grid, horizon: &HorizonSpec, material: &MaterialParams) -> Result<Self> {
        let dim = grid.dim();
        let a = alpha(material.e, horizon.delta(), grid.thickness(), dim)?;
        let scale = a * grid.cell_volume()? / grid.h();
        let m = horizon.m();
        let side = 2 * m + 1;
        let len = if dim == 3 { side.pow(3) } else { side * side };
        let mut tensors = vec![vec![0.0; len]; pair_count(dim)];
        let offsets = horizon.offsets(dim);
        for o in &offsets {
            let d = [o.d[0] as f64, o.d[1] as f64, o.d[2] as f64];
            let r = (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt();
            let w = scale * o.lambda / (r * r * r);
            let idx = Self::flat_index(dim, m, o.d);
            for ca in 0..dim {
                for cb in ca..dim {
                    tensors[pair_index(dim, ca, cb)][idx] = w * d[ca] * d[cb];
                }
            }
        }
        let center = Self::flat_index(dim, m, [0, 0, 0]);
        for t in tensors.iter_mut() {
            let sum: f64 = offsets.iter().map(|o| t[Self::flat_index(dim, m, o.d)]).sum();
            t[center] = -sum;
        }
        Ok(Self { dim, m, tensors })
    }

    /// A stack from explicit tensors (one per unordered pair), for custom
    /// kernels and tests.
    pub fn from_tensors(dim: usize, m: usize, tensors: Vec<Vec<f64>>) -> Result<Self> {
        let side = 2 * m + 1;
        let len = if dim == 3 { side.pow(3) } else { side * side };
        if tensors.len() != pair_count(dim) {
            return Err(Error::ShapeMismatch { expected: pair_count(dim), got: tensors.len() });
        }
        if let Some(t) = tensors.iter().find(|t| t.len() != len) {
            return Err(Error::ShapeMismatch { expected: len, got: t.len() });
        }
        Ok(Self { dim, m, tensors })
    }

    #[inline]
    fn flat_index(dim: usize, m: usize, d: [i64; 3]) -> usize {
        let side = (2 * m + 1) as i64;
        let m = m as i64;
        let k = if dim == 3 { d[2] + m } else { 0 };
        ((k * side + (d[1] + m)) * side + (d[0] + m)) as usize
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// Stencil width `2M + 1`.
    pub fn side(&self) -> usize {
        2 * self.m + 1
    }

    /// Entry of `K^{ab}` at lattice offset `d`; zero outside the band.
    #[inline]
    pub fn get(&self, a: usize, b: usize, d: [i64; 3]) -> f64 {
        let m = self.m as i64;
        if d.iter().take(self.dim).any(|v| v.abs() > m) || (self.dim == 2 && d[2] != 0) {
            return 0.0;
        }
        self.tensors[pair_index(self.dim, a, b)][Self::flat_index(self.dim, self.m, d)]
    }

    pub fn center(&self, a: usize, b: usize) -> f64 {
        self.get(a, b, [0, 0, 0])
    }

    /// Flat tensor for pair `(a, b)`, `x` fastest, offsets `-M..=M` per axis.
    pub fn tensor(&self, a: usize, b: usize) -> &[f64] {
        &self.tensors[pair_index(self.dim, a, b)]
    }

    pub fn tensors(&self) -> &[Vec<f64>] {
        &self.tensors
    }

    /// Offsets of the stencil in tensor order.
    pub fn stencil(&self) -> impl Iterator<Item = [i64; 3]> + '_ {
        let m = self.m as i64;
        let zr = if self.dim == 3 { m } else { 0 };
        (-zr..=zr).flat_map(move |k| (-m..=m).flat_map(move |j| (-m..=m).map(move |i| [i, j, k])))
    }

    pub fn memory_bytes(&self) -> usize {
        self.tensors.iter().map(|t| t.len() * 8).sum()
    }
}
