//! Axis-wise FFTs over cubic arrays stored in row-major order.

use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

/// Lines gathered together when transforming a strided axis.
const BATCH: usize = 32;

/// Forward and inverse plans for one transform length.
#[derive(Clone)]
pub(crate) struct CubeFft {
    len: usize,
    ndim: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for CubeFft {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("CubeFft")
            .field("len", &self.len)
            .field("ndim", &self.ndim)
            .finish()
    }
}

impl CubeFft {
    pub fn new(len: usize, ndim: usize) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            len,
            ndim,
            forward: planner.plan_fft_forward(len),
            inverse: planner.plan_fft_inverse(len),
        }
    }

    pub fn total(&self) -> usize {
        self.len.pow(self.ndim as u32)
    }

    /// Unnormalised forward transform over every axis.
    pub fn forward(&self, data: &mut [Complex64]) {
        for axis in (0..self.ndim).rev() {
            self.transform_axis(data, axis, self.len, &*self.forward);
        }
    }

    /// Unnormalised inverse transform over every axis.
    pub fn inverse(&self, data: &mut [Complex64]) {
        for axis in 0..self.ndim {
            self.transform_axis(data, axis, self.len, &*self.inverse);
        }
    }

    /// Forward transform of data known to vanish outside `[0, support)^ndim`.
    /// Lines that are still entirely zero are skipped.
    pub fn forward_pruned(&self, data: &mut [Complex64], support: usize) {
        for axis in (0..self.ndim).rev() {
            self.transform_axis(data, axis, support, &*self.forward);
        }
    }

    /// Inverse transform where only the block `[0, keep)^ndim` of the output
    /// is needed; everything else is left in an unspecified state.
    pub fn inverse_pruned(&self, data: &mut [Complex64], keep: usize) {
        for axis in 0..self.ndim {
            self.transform_axis(data, axis, keep, &*self.inverse);
        }
    }

    /// Transforms every line along `axis` whose indices on the leading axes
    /// (those before `axis`) are all below `outer_limit`.
    fn transform_axis(
        &self,
        data: &mut [Complex64],
        axis: usize,
        outer_limit: usize,
        fft: &dyn Fft<f64>,
    ) {
        let len = self.len;
        debug_assert_eq!(data.len(), self.total());
        let stride = len.pow((self.ndim - 1 - axis) as u32);
        let block = len * stride;
        let outer_count = len.pow(axis as u32);
        let mut scratch = vec![Complex64::default(); fft.get_inplace_scratch_len()];

        if stride == 1 {
            for outer in 0..outer_count {
                if !digits_below(outer, len, axis, outer_limit) {
                    continue;
                }
                let base = outer * block;
                fft.process_with_scratch(&mut data[base..base + len], &mut scratch);
            }
            return;
        }

        let batch = BATCH.min(stride);
        let mut lines = vec![Complex64::default(); batch * len];
        for outer in 0..outer_count {
            if !digits_below(outer, len, axis, outer_limit) {
                continue;
            }
            let base = outer * block;
            let mut j0 = 0;
            while j0 < stride {
                let b = batch.min(stride - j0);
                for k in 0..len {
                    let row = &data[base + k * stride + j0..base + k * stride + j0 + b];
                    for (bi, z) in row.iter().enumerate() {
                        lines[bi * len + k] = *z;
                    }
                }
                fft.process_with_scratch(&mut lines[..b * len], &mut scratch);
                for k in 0..len {
                    let row = &mut data[base + k * stride + j0..base + k * stride + j0 + b];
                    for (bi, z) in row.iter_mut().enumerate() {
                        *z = lines[bi * len + k];
                    }
                }
                j0 += b;
            }
        }
    }
}

/// Whether all `count` base-`len` digits of `flat` are below `limit`.
fn digits_below(mut flat: usize, len: usize, count: usize, limit: usize) -> bool {
    if limit >= len {
        return true;
    }
    for _ in 0..count {
        if flat % len >= limit {
            return false;
        }
        flat /= len;
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    fn naive_dft(data: &[Complex64], len: usize, ndim: usize) -> Vec<Complex64> {
        let total = len.pow(ndim as u32);
        let digits = |mut i: usize| {
            let mut d = vec![0usize; ndim];
            for a in (0..ndim).rev() {
                d[a] = i % len;
                i /= len;
            }
            d
        };
        (0..total)
            .map(|k| {
                let kd = digits(k);
                data.iter()
                    .enumerate()
                    .fold(Complex64::default(), |acc, (j, z)| {
                        let jd = digits(j);
                        let phase: usize = kd.iter().zip(&jd).map(|(a, b)| a * b).sum();
                        let ang = -2.0 * std::f64::consts::PI * (phase % len) as f64 / len as f64;
                        acc + z * Complex64::from_polar(1.0, ang)
                    })
            })
            .collect()
    }

    #[test]
    fn matches_naive_dft_in_three_dimensions() {
        let len = 4;
        let plan = CubeFft::new(len, 3);
        let data: Vec<Complex64> = (0..64)
            .map(|i| Complex64::new((i as f64 * 0.37).sin(), (i as f64 * 0.11).cos()))
            .collect();
        let expected = naive_dft(&data, len, 3);
        let mut got = data.clone();
        plan.forward(&mut got);
        for (a, b) in got.iter().zip(&expected) {
            assert!((a - b).norm() < 1e-12);
        }
        plan.inverse(&mut got);
        for (a, b) in got.iter().zip(&data) {
            assert!((a / 64.0 - b).norm() < 1e-14);
        }
    }

    #[test]
    fn pruned_transforms_agree_with_full() {
        let len = 8;
        let support = 4;
        let plan = CubeFft::new(len, 3);
        let mut data = vec![Complex64::default(); plan.total()];
        for i in 0..support {
            for j in 0..support {
                for k in 0..support {
                    data[(i * len + j) * len + k] = Complex64::new(
                        ((i + 2 * j + 3 * k) as f64).cos(),
                        (i * j + k) as f64 * 0.1,
                    );
                }
            }
        }
        let mut full = data.clone();
        plan.forward(&mut full);
        let mut pruned = data.clone();
        plan.forward_pruned(&mut pruned, support);
        for (a, b) in full.iter().zip(&pruned) {
            assert!((a - b).norm() < 1e-12);
        }
        let mut back_full = full.clone();
        plan.inverse(&mut back_full);
        plan.inverse_pruned(&mut pruned, support);
        for i in 0..support {
            for j in 0..support {
                for k in 0..support {
                    let idx = (i * len + j) * len + k;
                    assert!((back_full[idx] - pruned[idx]).norm() < 1e-12);
                }
            }
        }
    }
}
