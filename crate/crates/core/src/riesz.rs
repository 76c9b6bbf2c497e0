//! Free-space convolution with the Riesz kernel
//! `I_α(x) = c_α |x|^{-(N-α)}`, `c_α = Γ((N-α)/2) / (Γ(α/2) π^{N/2} 2^α)`.
//!
//! The discrete operator is `g_i = h^N Σ_j K(x_i - x_j) f_j` with no
//! wrap-around. Nodes of the periodic grid with index 0 on some axis stand
//! for both faces `x_a = ±L` of the cube: their value is split evenly between
//! the two faces as a source and averaged over them as a target. This keeps
//! the discrete operator invariant under the grid reflections `k ↦ M - k`.
//! The kernel at the origin is replaced by its cell average.
//!
//! [`RieszPlan`] evaluates the sum through a zero-padded FFT on the
//! `(2M)^N` embedding; [`riesz_direct`] is the brute-force sum.

use std::f64::consts::PI;

use rustfft::num_complex::Complex64;
use statrs::function::gamma::gamma;

use crate::error::{Error, Result};
use crate::fft::CubeFft;
use crate::grid::{Field, GridSpec};

/// Midpoints per axis used to average the kernel over the origin cell.
const ORIGIN_SUBCELLS: usize = 16;

/// Largest grid (`M^N`) accepted by [`riesz_direct`].
pub const DIRECT_LIMIT: usize = 4096;

pub fn riesz_constant(n: usize, alpha: f64) -> f64 {
    let nf = n as f64;
    gamma((nf - alpha) / 2.0) / (gamma(alpha / 2.0) * PI.powf(nf / 2.0) * 2f64.powf(alpha))
}

/// Riesz kernel on a grid of spacing `h`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RieszKernel {
    n: usize,
    alpha: f64,
    c_alpha: f64,
    origin: f64,
}

impl RieszKernel {
    pub fn new(n: usize, alpha: f64, h: f64) -> Self {
        let c_alpha = riesz_constant(n, alpha);
        let mut k = Self {
            n,
            alpha,
            c_alpha,
            origin: 0.0,
        };
        k.origin = k.cell_average(h);
        k
    }

    pub fn c_alpha(&self) -> f64 {
        self.c_alpha
    }

    /// `c_α / |x|^{N-α}` for `x ≠ 0`.
    pub fn pointwise(&self, r: f64) -> f64 {
        self.c_alpha * r.powf(self.alpha - self.n as f64)
    }

    /// Average of the kernel over the cell `[-h/2, h/2]^N` by midpoint
    /// quadrature on `16^N` sub-cells.
    pub fn cell_average(&self, h: f64) -> f64 {
        let s = ORIGIN_SUBCELLS;
        let sub = h / s as f64;
        let mid = |i: usize| -0.5 * h + (i as f64 + 0.5) * sub;
        let total = s.pow(self.n as u32);
        let mut acc = 0.0;
        for flat in 0..total {
            let mut rem = flat;
            let mut r2 = 0.0;
            for _ in 0..self.n {
                let y = mid(rem % s);
                r2 += y * y;
                rem /= s;
            }
            acc += self.pointwise(r2.sqrt());
        }
        acc / total as f64
    }

    /// Kernel at a grid offset given in index units, origin cell averaged.
    pub fn at_offset(&self, h: f64, offset: &[i64]) -> f64 {
        let d2: i64 = offset.iter().map(|d| d * d).sum();
        if d2 == 0 {
            self.origin
        } else {
            self.pointwise(h * (d2 as f64).sqrt())
        }
    }
}

/// Kernel value at a point `x`; at `x = 0` the average over the grid cell of
/// spacing `h` is returned.
pub fn kernel_value(n: usize, alpha: f64, h: f64, x: &[f64]) -> f64 {
    let kernel = RieszKernel::new(n, alpha, h);
    let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    if r == 0.0 {
        kernel.origin
    } else {
        kernel.pointwise(r)
    }
}

/// Face images of a node: index vectors in `[0, M]^N` with their weights.
fn face_images(idx: &[usize], m: usize) -> Vec<(Vec<usize>, f64)> {
    let mut out = vec![(idx.to_vec(), 1.0)];
    for a in 0..idx.len() {
        if idx[a] == 0 {
            let mut extra = Vec::with_capacity(out.len());
            for (img, w) in out.iter_mut() {
                *w *= 0.5;
                let mut other = img.clone();
                other[a] = m;
                extra.push((other, *w));
            }
            out.extend(extra);
        }
    }
    out
}

/// `O(M^{2N})` direct sum; the reference for [`RieszPlan::apply`].
pub fn riesz_direct(f: &Field, alpha: f64) -> Result<Field> {
    let spec = *f.spec();
    if spec.len() > DIRECT_LIMIT {
        return Err(Error::GridTooLarge {
            points: spec.len(),
            limit: DIRECT_LIMIT,
        });
    }
    let n = spec.dim();
    let m = spec.points();
    let h = spec.spacing();
    let kernel = RieszKernel::new(n, alpha, h);
    // Offsets -M..=M per axis.
    let width = 2 * m + 1;
    let table: Vec<f64> = (0..width.pow(n as u32))
        .map(|flat| {
            let mut rem = flat;
            let offset: Vec<i64> = (0..n)
                .map(|_| {
                    let d = (rem % width) as i64 - m as i64;
                    rem /= width;
                    d
                })
                .collect();
            kernel.at_offset(h, &offset)
        })
        .collect();
    let images: Vec<Vec<(Vec<usize>, f64)>> = (0..spec.len())
        .map(|i| face_images(&spec.unflatten(i), m))
        .collect();
    let vol = spec.cell_volume();
    let mut out = vec![0.0; spec.len()];
    for (i, gi) in out.iter_mut().enumerate() {
        let mut acc = 0.0;
        for (ti, wi) in &images[i] {
            for (j, &fj) in f.values().iter().enumerate() {
                if fj == 0.0 {
                    continue;
                }
                for (sj, wj) in &images[j] {
                    let mut t = 0usize;
                    for a in (0..n).rev() {
                        t = t * width + (ti[a] + m - sj[a]);
                    }
                    acc += wi * wj * table[t] * fj;
                }
            }
        }
        *gi = vol * acc;
    }
    Ok(Field::from_parts(spec, out))
}

/// Precomputed kernel transform for repeated free-space convolutions on one
/// grid.
#[derive(Debug, Clone)]
pub struct RieszPlan {
    spec: GridSpec,
    alpha: f64,
    c_alpha: f64,
    fft: CubeFft,
    /// Real transform of the padded kernel, pre-multiplied by `h^N/(2M)^N`.
    kernel_hat: Vec<f64>,
}

impl RieszPlan {
    pub fn new(spec: GridSpec, alpha: f64) -> Result<Self> {
        let n = spec.dim();
        if !(alpha > 0.0 && alpha < n as f64) {
            return Err(Error::InvalidParams(format!(
                "alpha = {alpha} not in (0, {n})"
            )));
        }
        let m = spec.points();
        let padded = 2 * m;
        let h = spec.spacing();
        let kernel = RieszKernel::new(n, alpha, h);
        let fft = CubeFft::new(padded, n);
        let total = fft.total();
        let mut buf = vec![Complex64::default(); total];
        let mut offset = vec![0i64; n];
        for (flat, z) in buf.iter_mut().enumerate() {
            let mut rem = flat;
            for a in (0..n).rev() {
                let j = rem % padded;
                rem /= padded;
                // index M is the offset ±M between opposite faces
                offset[a] = if j <= m {
                    j as i64
                } else {
                    j as i64 - padded as i64
                };
            }
            *z = Complex64::new(kernel.at_offset(h, &offset), 0.0);
        }
        fft.forward(&mut buf);
        let scale = spec.cell_volume() / total as f64;
        let kernel_hat = buf.iter().map(|z| z.re * scale).collect();
        Ok(Self {
            spec,
            alpha,
            c_alpha: kernel.c_alpha(),
            fft,
            kernel_hat,
        })
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }
    pub fn alpha(&self) -> f64 {
        self.alpha
    }
    pub fn c_alpha(&self) -> f64 {
        self.c_alpha
    }

    /// `I_α ∗ f`.
    pub fn apply(&self, f: &Field) -> Result<Field> {
        self.check(f)?;
        let zeros = vec![0.0; f.values().len()];
        let (out, _) = self.apply_slices(f.values(), &zeros);
        Ok(Field::from_parts(self.spec, out))
    }

    /// `(I_α ∗ f, I_α ∗ g)` from a single complex convolution; the kernel
    /// transform is real, so real and imaginary parts do not mix.
    pub fn apply_pair(&self, f: &Field, g: &Field) -> Result<(Field, Field)> {
        self.check(f)?;
        self.check(g)?;
        let (a, b) = self.apply_slices(f.values(), g.values());
        Ok((
            Field::from_parts(self.spec, a),
            Field::from_parts(self.spec, b),
        ))
    }

    fn check(&self, f: &Field) -> Result<()> {
        if *f.spec() == self.spec {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }

    pub(crate) fn apply_slices(&self, f: &[f64], g: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let n = self.spec.dim();
        let m = self.spec.points();
        let padded = 2 * m;
        let mut buf = vec![Complex64::default(); self.fft.total()];
        let (mut re, mut im) = (vec![0.0; f.len()], vec![0.0; f.len()]);
        for (src, (&a, &b)) in f.iter().zip(g).enumerate() {
            buf[padded_index(src, m, padded, n)] = Complex64::new(a, b);
        }
        for axis in 0..n {
            for_face(m, padded, n, axis, |lo, hi| {
                let half = buf[lo] * 0.5;
                buf[lo] = half;
                buf[hi] = half;
            });
        }
        self.fft.forward_pruned(&mut buf, m + 1);
        for (z, &k) in buf.iter_mut().zip(&self.kernel_hat) {
            *z *= k;
        }
        self.fft.inverse_pruned(&mut buf, m + 1);
        for axis in 0..n {
            for_face(m, padded, n, axis, |lo, hi| {
                buf[lo] = (buf[lo] + buf[hi]) * 0.5;
            });
        }
        for dst in 0..f.len() {
            let z = buf[padded_index(dst, m, padded, n)];
            re[dst] = z.re;
            im[dst] = z.im;
        }
        (re, im)
    }
}

/// Calls `f(lo, hi)` for every pair of padded positions whose coordinates
/// lie in `[0, M]`, agree off `axis`, and are `0` and `M` on `axis`.
fn for_face(m: usize, padded: usize, n: usize, axis: usize, mut f: impl FnMut(usize, usize)) {
    let stride = padded.pow((n - 1 - axis) as u32);
    let count = (m + 1).pow(n as u32 - 1);
    for c in 0..count {
        let mut rem = c;
        let mut lo = 0;
        for a in (0..n).rev() {
            if a == axis {
                continue;
            }
            lo += (rem % (m + 1)) * padded.pow((n - 1 - a) as u32);
            rem /= m + 1;
        }
        f(lo, lo + m * stride);
    }
}

/// Position of unpadded flat index `flat` inside the `(2M)^N` array.
#[inline]
fn padded_index(mut flat: usize, m: usize, padded: usize, n: usize) -> usize {
    let mut out = 0;
    let mut mul = 1;
    for _ in 0..n {
        out += (flat % m) * mul;
        flat /= m;
        mul *= padded;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{inner, integrate};

    /// Closed-form values evaluated in 30-digit arithmetic.
    #[allow(clippy::excessive_precision)]
    const C_ALPHA_TABLE: &[(usize, f64, f64)] = &[
        (1, 0.5, 0.39894228040143267794),
        (1, 0.9, 2.9909608495551638401),
        (2, 1.0, 0.15915494309189533577),
        (2, 0.3, 0.046240802495870986734),
        (3, 1.0, 0.050660591821168885722),
        (3, 2.0, 0.079577471545947667884),
        (3, 2.9, 0.52891800422337612312),
    ];

    #[test]
    fn constant_matches_high_precision_table() {
        for &(n, alpha, expected) in C_ALPHA_TABLE {
            let a = riesz_constant(n, alpha);
            assert!(
                (a - expected).abs() <= 1e-14 * expected,
                "N={n} α={alpha}: {a} vs {expected}"
            );
        }
    }

    #[test]
    fn newtonian_constant() {
        let v = kernel_value(3, 2.0, 0.1, &[1.0, 0.0, 0.0]);
        assert!((v - 1.0 / (4.0 * PI)).abs() < 1e-15);
    }

    #[test]
    fn one_dimensional_value() {
        // Γ(1/4) cancels: c_{1/2} = 1/√(2π)
        let c = 1.0 / (2.0 * PI).sqrt();
        assert!((riesz_constant(1, 0.5) - c).abs() < 1e-14);
        let v = kernel_value(1, 0.5, 0.1, &[2.0]);
        assert!((v - c * 2f64.powf(-0.5)).abs() < 1e-14 * v);
    }

    /// Point-sampled off-origin weights make the sum first order in `h^α`
    /// for a smooth density.
    #[test]
    fn gaussian_potential_converges_at_order_alpha() {
        let c = riesz_constant(1, 0.5);
        let error = |m: usize| {
            let spec = GridSpec::new(1, 8.0, m).unwrap();
            let f = Field::from_fn(spec, |x| (-x[0] * x[0]).exp());
            let g = RieszPlan::new(spec, 0.5).unwrap().apply(&f).unwrap();
            let mut worst: f64 = 0.0;
            for i in (0..m).step_by(m / 32) {
                let x = spec.coordinate(i);
                // y = x ± s² removes the singularity
                let side = |sign: f64| {
                    crate::quad::integrate(
                        |s| 2.0 * (-(x + sign * s * s).powi(2)).exp(),
                        0.0,
                        6.0,
                        1e-13,
                    )
                };
                let exact = c * (side(1.0) + side(-1.0));
                worst = worst.max((g.values()[i] - exact).abs() / exact);
            }
            worst
        };
        let (coarse, fine) = (error(256), error(1024));
        assert!(coarse < 3e-2, "{coarse}");
        let order = (coarse / fine).log2() / 2.0;
        assert!((order - 0.5).abs() < 0.05, "{order}");
    }

    #[test]
    fn origin_cell_is_finite_and_dominant() {
        for &(n, alpha) in &[(1, 0.5), (2, 1.0), (3, 2.0)] {
            let h = 0.25;
            let origin = kernel_value(n, alpha, h, &vec![0.0; n]);
            let mut x = vec![0.0; n];
            x[0] = h;
            assert!(origin.is_finite());
            assert!(origin > kernel_value(n, alpha, h, &x));
        }
    }

    #[test]
    fn plan_matches_direct_sum() {
        for &(n, m, alpha) in &[(1usize, 64usize, 0.5), (2, 16, 1.3), (3, 16, 2.0)] {
            let s = GridSpec::new(n, 3.0, m).unwrap();
            let f = Field::from_fn(s, |x| {
                x.iter()
                    .enumerate()
                    .map(|(a, v)| ((a + 1) as f64 * v).sin())
                    .sum::<f64>()
                    * (-x.iter().map(|v| v * v).sum::<f64>() / 3.0).exp()
            });
            let direct = riesz_direct(&f, alpha).unwrap();
            let fast = RieszPlan::new(s, alpha).unwrap().apply(&f).unwrap();
            let scale = direct.max_abs();
            for (a, b) in fast.values().iter().zip(direct.values()) {
                assert!((a - b).abs() <= 1e-10 * scale, "N={n}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn delta_reproduces_kernel() {
        let s = GridSpec::new(2, 2.0, 16).unwrap();
        let h = s.spacing();
        let mut f = Field::zeros(s);
        let c = s.flatten(&s.center());
        f.values_mut()[c] = 1.0 / s.cell_volume();
        let g = riesz_direct(&f, 1.2).unwrap();
        for i in 0..s.len() {
            let idx = s.unflatten(i);
            let x: Vec<f64> = idx.iter().map(|&k| (k as f64 - 8.0) * h).collect();
            let expected = kernel_value(2, 1.2, h, &x);
            assert!((g.values()[i] - expected).abs() <= 1e-13 * expected);
        }
    }

    #[test]
    fn commutes_with_grid_reflections() {
        let s = GridSpec::new(2, 3.0, 16).unwrap();
        let plan = RieszPlan::new(s, 1.1).unwrap();
        let f = Field::from_fn(s, |x| {
            (-(x[0] - 0.7).powi(2) - 0.3 * x[1] * x[1]).exp() + 0.01
        });
        let reflect = |g: &Field| {
            let v = (0..s.len())
                .map(|i| {
                    let mut idx = s.unflatten(i);
                    idx[0] = (16 - idx[0]) % 16;
                    g.values()[s.flatten(&idx)]
                })
                .collect();
            Field::new(s, v).unwrap()
        };
        let a = reflect(&plan.apply(&f).unwrap());
        let b = plan.apply(&reflect(&f)).unwrap();
        for (x, y) in a.values().iter().zip(b.values()) {
            assert!((x - y).abs() <= 1e-13 * a.max_abs());
        }
    }

    #[test]
    fn zero_maps_to_zero() {
        let s = GridSpec::new(2, 2.0, 16).unwrap();
        assert_eq!(riesz_direct(&Field::zeros(s), 1.0).unwrap().max_abs(), 0.0);
        let plan = RieszPlan::new(s, 1.0).unwrap();
        assert_eq!(plan.apply(&Field::zeros(s)).unwrap().max_abs(), 0.0);
    }

    #[test]
    fn direct_rejects_large_grids() {
        let s = GridSpec::new(3, 2.0, 32).unwrap();
        assert!(matches!(
            riesz_direct(&Field::zeros(s), 1.0),
            Err(Error::GridTooLarge { .. })
        ));
    }

    #[test]
    fn plan_rejects_foreign_field() {
        let plan = RieszPlan::new(GridSpec::new(1, 2.0, 16).unwrap(), 0.5).unwrap();
        let other = Field::zeros(GridSpec::new(1, 3.0, 16).unwrap());
        assert!(matches!(plan.apply(&other), Err(Error::GridMismatch)));
    }

    #[test]
    fn pair_matches_separate_applications() {
        let s = GridSpec::new(2, 3.0, 32).unwrap();
        let plan = RieszPlan::new(s, 0.7).unwrap();
        let f = Field::from_fn(s, |x| (-(x[0] * x[0] + x[1] * x[1])).exp());
        let g = Field::from_fn(s, |x| (-(x[0] - 1.0).powi(2) - 2.0 * x[1] * x[1]).exp());
        let (pf, pg) = plan.apply_pair(&f, &g).unwrap();
        let sf = plan.apply(&f).unwrap();
        let sg = plan.apply(&g).unwrap();
        for (a, b) in pf.values().iter().zip(sf.values()) {
            assert!((a - b).abs() < 1e-13 * sf.max_abs());
        }
        for (a, b) in pg.values().iter().zip(sg.values()) {
            assert!((a - b).abs() < 1e-13 * sg.max_abs());
        }
    }

    #[test]
    fn bilinear_form_is_symmetric() {
        let s = GridSpec::new(3, 3.0, 16).unwrap();
        let plan = RieszPlan::new(s, 1.5).unwrap();
        let f = Field::from_fn(s, |x| (x[0] + 0.3 * x[1]).cos() * (-(x[2] * x[2])).exp());
        let g = Field::from_fn(s, |x| (x[1] * x[2]).sin() + 0.1 * x[0]);
        let a = inner(&plan.apply(&f).unwrap(), &g).unwrap();
        let b = inner(&plan.apply(&g).unwrap(), &f).unwrap();
        assert!((a - b).abs() <= 1e-11 * a.abs().max(b.abs()));
    }

    #[test]
    fn positive_input_gives_positive_output() {
        let s = GridSpec::new(2, 4.0, 32).unwrap();
        let plan = RieszPlan::new(s, 0.4).unwrap();
        let f = Field::from_fn(s, |x| (-(x[0] - 2.0).powi(2) * 4.0 - x[1] * x[1]).exp());
        let g = plan.apply(&f).unwrap();
        assert!(g.min() > 0.0);
        assert!(integrate(&g) > 0.0);
    }
}
