//! FFT application of the Toeplitz-block-Toeplitz operator `Â`.
//!
//! Each kernel tensor is embedded into a `2Nx × 2Ny (× 2Nz)` circulant
//! generator `G`: offset `d ≥ 0` lands at index `d`, offset `d < 0` wraps to
//! `2N + d`, everything else is zero. Fields are zero-padded to the same
//! shape. Multiplying the spectra and transforming back yields `Âu` on the
//! physical window `[0, N)`.
//!
//! The spectrum of `G` is conjugated before the Hadamard product so that the
//! result is `Σ_q K(q - p) u_q` for any kernel. Peridynamic kernels are even
//! under offset negation, their spectra are real, and the conjugation is a
//! no-op for them.

use crate::error::{Error, Result};
use crate::fft::{FftNd, FftWork};
use crate::field::VectorField;
use crate::kernel::{pair_count, pair_index, KernelStack};
use rustfft::num_complex::Complex64;
use std::sync::Arc;

fn padded_shape(dim: usize, dims: [usize; 3]) -> [usize; 3] {
    [2 * dims[0], 2 * dims[1], if dim == 3 { 2 * dims[2] } else { 1 }]
}

fn check_band(dim: usize, m: usize, dims: [usize; 3]) -> Result<()> {
    for (axis, &n) in dims.iter().enumerate().take(dim) {
        if 2 * n < 2 * m + 2 {
            return Err(Error::HorizonTooLargeForGrid { axis, n, m });
        }
    }
    Ok(())
}

/// One kernel tensor embedded as a circulant generator, with its cached
/// spectrum.
#[derive(Debug, Clone)]
pub struct EmbeddedTensor {
    dim: usize,
    dims: [usize; 3],
    shape: [usize; 3],
    generator: Vec<f64>,
    spectrum: Vec<Complex64>,
    fft: Arc<FftNd>,
}

impl EmbeddedTensor {
    /// Embed a flat `(2M+1)^d` tensor (`x` fastest) for a lattice of `dims`.
    pub fn new(tensor: &[f64], m: usize, dim: usize, dims: [usize; 3]) -> Result<Self> {
        let shape = padded_shape(dim, dims);
        let fft = Arc::new(FftNd::new(shape));
        Self::with_fft(tensor, m, dim, dims, fft)
    }

    fn with_fft(tensor: &[f64], m: usize, dim: usize, dims: [usize; 3], fft: Arc<FftNd>) -> Result<Self> {
        check_band(dim, m, dims)?;
        let side = 2 * m + 1;
        let expected = if dim == 3 { side.pow(3) } else { side * side };
        if tensor.len() != expected {
            return Err(Error::ShapeMismatch { expected, got: tensor.len() });
        }
        let shape = fft.shape();
        let wrap = |d: i64, len: usize| -> usize {
            if d >= 0 {
                d as usize
            } else {
                (len as i64 + d) as usize
            }
        };
        let mi = m as i64;
        let kr = if dim == 3 { mi } else { 0 };
        let mut generator = vec![0.0; fft.len()];
        for dk in -kr..=kr {
            for dj in -mi..=mi {
                for di in -mi..=mi {
                    let src = (((dk + kr) as usize * side + (dj + mi) as usize) * side) + (di + mi) as usize;
                    let gi = wrap(di, shape[0]);
                    let gj = wrap(dj, shape[1]);
                    let gk = wrap(dk, shape[2]);
                    generator[(gk * shape[1] + gj) * shape[0] + gi] = tensor[src];
                }
            }
        }
        let mut spectrum: Vec<Complex64> = generator.iter().map(|&g| Complex64::new(g, 0.0)).collect();
        let mut work = fft.work();
        fft.process(&mut spectrum, false, shape, &mut work);
        Ok(Self { dim, dims, shape, generator, spectrum, fft })
    }

    /// The real circulant generator `G`, `x` fastest, padded shape.
    pub fn generator(&self) -> &[f64] {
        &self.generator
    }

    pub fn padded_shape(&self) -> [usize; 3] {
        self.shape
    }

    pub fn spectrum(&self) -> &[Complex64] {
        &self.spectrum
    }

    fn physical_len(&self) -> usize {
        self.dims[0] * self.dims[1] * if self.dim == 3 { self.dims[2] } else { 1 }
    }

    /// Full padded result `H` of the transform pipeline, before extracting
    /// the physical window. Normalised.
    pub fn apply_full(&self, u: &[f64]) -> Result<Vec<Complex64>> {
        let n = self.physical_len();
        if u.len() != n {
            return Err(Error::ShapeMismatch { expected: n, got: u.len() });
        }
        let mut buf = vec![Complex64::default(); self.fft.len()];
        scatter_padded(u, self.dims, self.shape, &mut buf, |v| Complex64::new(v, 0.0));
        let mut work = self.fft.work();
        self.fft.process(&mut buf, false, self.shape, &mut work);
        for (h, g) in buf.iter_mut().zip(&self.spectrum) {
            *h *= g.conj();
        }
        self.fft.process(&mut buf, true, self.shape, &mut work);
        let scale = 1.0 / self.fft.len() as f64;
        buf.iter_mut().for_each(|v| *v *= scale);
        Ok(buf)
    }

    /// `Âu` on the physical lattice.
    pub fn apply(&self, u: &[f64]) -> Result<Vec<f64>> {
        let n = self.physical_len();
        if u.len() != n {
            return Err(Error::ShapeMismatch { expected: n, got: u.len() });
        }
        let mut buf = vec![Complex64::default(); self.fft.len()];
        scatter_padded(u, self.dims, self.shape, &mut buf, |v| Complex64::new(v, 0.0));
        let support = support_of(self.dim, self.dims);
        let mut work = self.fft.work();
        self.fft.process(&mut buf, false, support, &mut work);
        for (h, g) in buf.iter_mut().zip(&self.spectrum) {
            *h *= g.conj();
        }
        self.fft.process(&mut buf, true, support, &mut work);
        let scale = 1.0 / self.fft.len() as f64;
        let mut out = vec![0.0; n];
        gather_window(&buf, self.dims, self.shape, &mut out, |c| c.re * scale);
        Ok(out)
    }
}

fn support_of(dim: usize, dims: [usize; 3]) -> [usize; 3] {
    [dims[0], dims[1], if dim == 3 { dims[2] } else { 1 }]
}

fn scatter_padded(u: &[f64], dims: [usize; 3], shape: [usize; 3], buf: &mut [Complex64], f: impl Fn(f64) -> Complex64) {
    buf.fill(Complex64::default());
    let nz = u.len() / (dims[0] * dims[1]);
    for k in 0..nz {
        for j in 0..dims[1] {
            let src = (k * dims[1] + j) * dims[0];
            let dst = (k * shape[1] + j) * shape[0];
            for i in 0..dims[0] {
                buf[dst + i] = f(u[src + i]);
            }
        }
    }
}

fn gather_window(buf: &[Complex64], dims: [usize; 3], shape: [usize; 3], out: &mut [f64], f: impl Fn(&Complex64) -> f64) {
    let nz = out.len() / (dims[0] * dims[1]);
    for k in 0..nz {
        for j in 0..dims[1] {
            let dst = (k * dims[1] + j) * dims[0];
            let src = (k * shape[1] + j) * shape[0];
            for i in 0..dims[0] {
                out[dst + i] = f(&buf[src + i]);
            }
        }
    }
}

/// Per-call buffers for [`EmbeddedKernel::fast_force`]. Not shareable between
/// concurrent calls.
#[derive(Debug, Clone)]
pub struct FastScratch {
    packed: [Vec<Complex64>; 2],
    out: [Vec<Complex64>; 2],
    work: FftWork,
}

/// All component kernels of a [`KernelStack`], embedded for one lattice.
#[derive(Debug, Clone)]
pub struct EmbeddedKernel {
    dim: usize,
    dims: [usize; 3],
    shape: [usize; 3],
    fft: Arc<FftNd>,
    tensors: Vec<EmbeddedTensor>,
}

impl EmbeddedKernel {
    pub fn new(kernels: &KernelStack, dims: [usize; 3]) -> Result<Self> {
        let dim = kernels.dim();
        check_band(dim, kernels.m(), dims)?;
        let shape = padded_shape(dim, dims);
        let fft = Arc::new(FftNd::new(shape));
        let tensors = kernels
            .tensors()
            .iter()
            .map(|t| EmbeddedTensor::with_fft(t, kernels.m(), dim, dims, fft.clone()))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { dim, dims, shape, fft, tensors })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn tensor(&self, a: usize, b: usize) -> &EmbeddedTensor {
        &self.tensors[pair_index(self.dim, a, b)]
    }

    pub fn scratch(&self) -> FastScratch {
        let len = self.fft.len();
        FastScratch {
            packed: [vec![Complex64::default(); len], vec![Complex64::default(); len]],
            out: [vec![Complex64::default(); len], vec![Complex64::default(); len]],
            work: self.fft.work(),
        }
    }

    /// Bytes held by the cached spectra and generators.
    pub fn memory_bytes(&self) -> usize {
        self.tensors.len() * self.fft.len() * (16 + 8)
    }

    /// Scratch bytes needed by one in-flight [`EmbeddedKernel::fast_force`].
    pub fn scratch_bytes(&self) -> usize {
        4 * self.fft.len() * 16
    }

    /// Uncorrected force `f' = Â u` for every component.
    ///
    /// Two real components share one complex transform (`u^x + i u^y`), so a
    /// 2D evaluation costs one forward and one inverse transform.
    pub fn fast_force(&self, u: &VectorField, out: &mut VectorField, scratch: &mut FastScratch) -> Result<()> {
        let n = self.dims[0] * self.dims[1] * if self.dim == 3 { self.dims[2] } else { 1 };
        if u.nodes() != n || u.dim() != self.dim {
            return Err(Error::ShapeMismatch { expected: n * self.dim, got: u.as_slice().len() });
        }
        if out.nodes() != n || out.dim() != self.dim {
            return Err(Error::ShapeMismatch { expected: n * self.dim, got: out.as_slice().len() });
        }
        let support = support_of(self.dim, self.dims);
        let shape = self.shape;
        let dims = self.dims;
        let len = self.fft.len();

        // Forward: pack (x, y) and, in 3D, z alone.
        let groups: &[&[usize]] = if self.dim == 3 { &[&[0, 1], &[2]] } else { &[&[0, 1]] };
        for (g, comps) in groups.iter().enumerate() {
            let buf = &mut scratch.packed[g];
            buf.fill(Complex64::default());
            let re = u.comp(comps[0]);
            let nz = support[2];
            for k in 0..nz {
                for j in 0..dims[1] {
                    let src = (k * dims[1] + j) * dims[0];
                    let dst = (k * shape[1] + j) * shape[0];
                    if comps.len() == 2 {
                        let im = u.comp(comps[1]);
                        for i in 0..dims[0] {
                            buf[dst + i] = Complex64::new(re[src + i], im[src + i]);
                        }
                    } else {
                        for i in 0..dims[0] {
                            buf[dst + i] = Complex64::new(re[src + i], 0.0);
                        }
                    }
                }
            }
            self.fft.process(buf, false, support, &mut scratch.work);
        }

        // Spectral products. For each frequency, recover the per-component
        // spectra from the packed transforms and accumulate Ĥ^a.
        let neg = |idx: usize| -> usize {
            let i = idx % shape[0];
            let j = (idx / shape[0]) % shape[1];
            let k = idx / (shape[0] * shape[1]);
            let ni = (shape[0] - i) % shape[0];
            let nj = (shape[1] - j) % shape[1];
            let nk = (shape[2] - k) % shape[2];
            (nk * shape[1] + nj) * shape[0] + ni
        };
        let spectra: Vec<&[Complex64]> = self.tensors.iter().map(|t| t.spectrum.as_slice()).collect();
        let dim = self.dim;
        let half = Complex64::new(0.5, 0.0);
        let minus_half_i = Complex64::new(0.0, -0.5);
        let i_unit = Complex64::new(0.0, 1.0);
        let (out0, out1) = scratch.out.split_at_mut(1);
        let (o0, o1) = (&mut out0[0], &mut out1[0]);
        for idx in 0..len {
            let r = neg(idx);
            let z = scratch.packed[0][idx];
            let zr = scratch.packed[0][r].conj();
            let mut uh = [Complex64::default(); 3];
            uh[0] = (z + zr) * half;
            uh[1] = (z - zr) * minus_half_i;
            if dim == 3 {
                uh[2] = scratch.packed[1][idx];
            }
            let mut hh = [Complex64::default(); 3];
            for (a, h) in hh.iter_mut().enumerate().take(dim) {
                for (b, &ub) in uh.iter().enumerate().take(dim) {
                    *h += spectra[pair_index(dim, a, b)][idx].conj() * ub;
                }
            }
            o0[idx] = hh[0] + i_unit * hh[1];
            if dim == 3 {
                o1[idx] = hh[2];
            }
        }

        let scale = 1.0 / len as f64;
        self.fft.process(o0, true, support, &mut scratch.work);
        if dim == 3 {
            self.fft.process(o1, true, support, &mut scratch.work);
        }
        for k in 0..support[2] {
            for j in 0..dims[1] {
                let dst = (k * dims[1] + j) * dims[0];
                let src = (k * shape[1] + j) * shape[0];
                for i in 0..dims[0] {
                    let v = o0[src + i];
                    out.set(0, dst + i, v.re * scale);
                    out.set(1, dst + i, v.im * scale);
                    if dim == 3 {
                        out.set(2, dst + i, o1[src + i].re * scale);
                    }
                }
            }
        }
        Ok(())
    }

    /// Allocating convenience wrapper around [`EmbeddedKernel::fast_force`].
    pub fn apply(&self, u: &VectorField) -> Result<VectorField> {
        let mut out = VectorField::zeros(u.dim(), u.nodes());
        let mut scratch = self.scratch();
        self.fast_force(u, &mut out, &mut scratch)?;
        Ok(out)
    }

    pub fn pair_count(&self) -> usize {
        pair_count(self.dim)
    }
}
