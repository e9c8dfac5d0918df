//! Multi-dimensional complex FFT on row-major (`x` fastest) tensors, built
//! from rustfft 1D plans applied axis by axis.

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use std::sync::Arc;

/// Number of neighbouring lines gathered per strided pass.
const BLOCK: usize = 16;

pub struct FftNd {
    shape: [usize; 3],
    forward: [Option<Arc<dyn Fft<f64>>>; 3],
    inverse: [Option<Arc<dyn Fft<f64>>>; 3],
    scratch_len: usize,
}

impl std::fmt::Debug for FftNd {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FftNd").field("shape", &self.shape).finish()
    }
}

/// Reusable buffers for [`FftNd::process`].
#[derive(Debug, Default, Clone)]
pub struct FftWork {
    lines: Vec<Complex64>,
    scratch: Vec<Complex64>,
}

impl FftNd {
    pub fn new(shape: [usize; 3]) -> Self {
        let mut planner = FftPlanner::<f64>::new();
        let mut forward = [None, None, None];
        let mut inverse = [None, None, None];
        let mut scratch_len = 0;
        for a in 0..3 {
            if shape[a] > 1 {
                let f = planner.plan_fft_forward(shape[a]);
                let i = planner.plan_fft_inverse(shape[a]);
                scratch_len = scratch_len
                    .max(f.get_inplace_scratch_len())
                    .max(i.get_inplace_scratch_len());
                forward[a] = Some(f);
                inverse[a] = Some(i);
            }
        }
        Self { shape, forward, inverse, scratch_len }
    }

    pub fn shape(&self) -> [usize; 3] {
        self.shape
    }

    pub fn len(&self) -> usize {
        self.shape.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn work(&self) -> FftWork {
        FftWork {
            lines: vec![Complex64::default(); BLOCK * self.shape.iter().copied().max().unwrap_or(1)],
            scratch: vec![Complex64::default(); self.scratch_len],
        }
    }

    /// Unnormalised transform in place.
    ///
    /// `support` bounds the non-zero region (forward) or the region that will
    /// be read afterwards (inverse); lines entirely outside it are skipped.
    /// Pass the full shape for a plain transform.
    pub fn process(&self, data: &mut [Complex64], inverse: bool, support: [usize; 3], work: &mut FftWork) {
        assert_eq!(data.len(), self.len());
        let axes: [usize; 3] = if inverse { [2, 1, 0] } else { [0, 1, 2] };
        for a in axes {
            let plan = if inverse { &self.inverse[a] } else { &self.forward[a] };
            if let Some(plan) = plan {
                self.axis_pass(data, a, plan.as_ref(), support, work);
            }
        }
    }

    fn axis_pass(&self, data: &mut [Complex64], axis: usize, plan: &dyn Fft<f64>, support: [usize; 3], work: &mut FftWork) {
        let [n0, n1, n2] = self.shape;
        let scratch = &mut work.scratch[..];
        match axis {
            0 => {
                for i2 in 0..n2.min(support[2]) {
                    let start = i2 * n0 * n1;
                    let rows = n1.min(support[1]);
                    plan.process_with_scratch(&mut data[start..start + rows * n0], scratch);
                }
            }
            _ => {
                let len = self.shape[axis];
                let stride = if axis == 1 { n0 } else { n0 * n1 };
                // Bases of the line families: one per i2 for axis 1 (limited
                // by support), one per i1 for axis 2.
                let bases: Vec<usize> = if axis == 1 {
                    (0..n2.min(support[2])).map(|i2| i2 * n0 * n1).collect()
                } else {
                    (0..n1).map(|i1| i1 * n0).collect()
                };
                for base in bases {
                    let mut i0 = 0;
                    while i0 < n0 {
                        let b = BLOCK.min(n0 - i0);
                        let lines = &mut work.lines[..b * len];
                        for l in 0..len {
                            let row = base + l * stride + i0;
                            for j in 0..b {
                                lines[j * len + l] = data[row + j];
                            }
                        }
                        plan.process_with_scratch(lines, scratch);
                        for l in 0..len {
                            let row = base + l * stride + i0;
                            for j in 0..b {
                                data[row + j] = lines[j * len + l];
                            }
                        }
                        i0 += b;
                    }
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    fn naive_dft(data: &[Complex64], shape: [usize; 3], inverse: bool) -> Vec<Complex64> {
        let sign = if inverse { 1.0 } else { -1.0 };
        let [n0, n1, n2] = shape;
        let mut out = vec![Complex64::default(); data.len()];
        for k2 in 0..n2 {
            for k1 in 0..n1 {
                for k0 in 0..n0 {
                    let mut acc = Complex64::default();
                    for i2 in 0..n2 {
                        for i1 in 0..n1 {
                            for i0 in 0..n0 {
                                let ph = sign
                                    * 2.0
                                    * std::f64::consts::PI
                                    * ((k0 * i0) as f64 / n0 as f64
                                        + (k1 * i1) as f64 / n1 as f64
                                        + (k2 * i2) as f64 / n2 as f64);
                                acc += data[(i2 * n1 + i1) * n0 + i0] * Complex64::from_polar(1.0, ph);
                            }
                        }
                    }
                    out[(k2 * n1 + k1) * n0 + k0] = acc;
                }
            }
        }
        out
    }

    #[test]
    fn matches_naive_dft() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for shape in [[6, 4, 1], [4, 5, 3], [20, 3, 2]] {
            let n: usize = shape.iter().product();
            let data: Vec<Complex64> = (0..n).map(|_| Complex64::new(rng.gen(), rng.gen())).collect();
            let fft = FftNd::new(shape);
            let mut work = fft.work();
            for inverse in [false, true] {
                let mut got = data.clone();
                fft.process(&mut got, inverse, shape, &mut work);
                let want = naive_dft(&data, shape, inverse);
                for (g, w) in got.iter().zip(&want) {
                    assert!((g - w).norm() < 1e-10, "{shape:?}");
                }
            }
        }
    }

    #[test]
    fn support_skipping_is_exact_for_padded_input() {
        let shape = [8, 6, 4];
        let support = [4, 3, 2];
        let fft = FftNd::new(shape);
        let mut work = fft.work();
        let mut data = vec![Complex64::default(); 8 * 6 * 4];
        for i2 in 0..2 {
            for i1 in 0..3 {
                for i0 in 0..4 {
                    data[(i2 * 6 + i1) * 8 + i0] = Complex64::new((i0 + 3 * i1 + 7 * i2) as f64, 0.0);
                }
            }
        }
        let mut full = data.clone();
        fft.process(&mut full, false, shape, &mut work);
        let mut part = data.clone();
        fft.process(&mut part, false, support, &mut work);
        for (a, b) in full.iter().zip(&part) {
            assert!((a - b).norm() < 1e-12);
        }
        // Inverse with a restricted window agrees inside the window.
        let mut inv_full = full.clone();
        fft.process(&mut inv_full, true, shape, &mut work);
        let mut inv_part = full;
        fft.process(&mut inv_part, true, support, &mut work);
        for i2 in 0..2 {
            for i1 in 0..3 {
                for i0 in 0..4 {
                    let k = (i2 * 6 + i1) * 8 + i0;
                    assert!((inv_full[k] - inv_part[k]).norm() < 1e-9);
                }
            }
        }
    }
}
