use crate::error::{Error, Result};

/// A `d`-component nodal field stored component-major: all `x` values, then
/// all `y` values, and so on.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorField {
    dim: usize,
    n: usize,
    data: Vec<f64>,
}

impl VectorField {
    pub fn zeros(dim: usize, n: usize) -> Self {
        Self { dim, n, data: vec![0.0; dim * n] }
    }

    pub fn from_vec(dim: usize, n: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != dim * n {
            return Err(Error::ShapeMismatch { expected: dim * n, got: data.len() });
        }
        Ok(Self { dim, n, data })
    }

    /// Every node carries the same vector `c`.
    pub fn constant(dim: usize, n: usize, c: &[f64]) -> Self {
        let mut f = Self::zeros(dim, n);
        for a in 0..dim {
            f.comp_mut(a).fill(c[a]);
        }
        f
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nodes(&self) -> usize {
        self.n
    }

    pub fn comp(&self, a: usize) -> &[f64] {
        &self.data[a * self.n..(a + 1) * self.n]
    }

    pub fn comp_mut(&mut self, a: usize) -> &mut [f64] {
        &mut self.data[a * self.n..(a + 1) * self.n]
    }

    #[inline]
    pub fn get(&self, a: usize, p: usize) -> f64 {
        self.data[a * self.n + p]
    }

    #[inline]
    pub fn set(&mut self, a: usize, p: usize, v: f64) {
        self.data[a * self.n + p] = v;
    }

    #[inline]
    pub fn add(&mut self, a: usize, p: usize, v: f64) {
        self.data[a * self.n + p] += v;
    }

    pub fn node(&self, p: usize) -> [f64; 3] {
        let mut out = [0.0; 3];
        for (a, o) in out.iter_mut().enumerate().take(self.dim) {
            *o = self.get(a, p);
        }
        out
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn fill(&mut self, v: f64) {
        self.data.fill(v);
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `max |self - other|`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }

    /// First non-finite entry as `(node, component)`.
    pub fn find_non_finite(&self) -> Option<(usize, usize)> {
        self.data
            .iter()
            .position(|v| !v.is_finite())
            .map(|i| (i % self.n, i / self.n))
    }

    pub fn memory_bytes(&self) -> usize {
        self.data.len() * 8
    }
}
